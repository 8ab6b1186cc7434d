//! One function per subcommand, each returning an [`Outcome`].

use nalgebra::DVector;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use projbill::analysis::{self, ConicClass};
use projbill::caustics::{self, CausticClass};
use projbill::polyref::{self, PolygonBilliard, PolygonKind};
use projbill::projective::{confocal_conic, Quadric};
use projbill::reflect::Signature;
use projbill::scene::{PointSpec, Scene};

use crate::output::{csv_string, ellipse_outline, num, Format, Outcome, Svg};
use crate::{Cli, CliError, Command, Config, PolygonChoice};

/// Bounds asserted by the analysis commands.
const LOCUS_TOL: f64 = 1e-8;
const CHASLES_TOL: f64 = 1e-8;
const PERMITTED_TOL: f64 = 1e-8;
const JOACHIMSTHAL_TOL: f64 = 1e-10;
const DUAL_TOL: f64 = 1e-10;

pub fn run(cli: &Cli) -> (&'static str, Result<Outcome, CliError>) {
    let cfg = &cli.config;
    match &cli.command {
        Command::Caustics { n, a, b, check_poncelet, closed_form, starts } => {
            ("caustics", caustics_cmd(cfg, *n, a, b, *check_poncelet, *closed_form, *starts))
        }
        Command::Orbit { scene, steps, start, next } => ("orbit", orbit_cmd(cfg, scene, *steps, start.clone(), next.clone())),
        Command::Polygon { kind, samples, m, n, vertices, center } => {
            ("polygon", polygon_cmd(cfg, *kind, *samples, *m, *n, vertices.clone(), *center))
        }
        Command::Circumcenters { a, b, count } => ("circumcenters", circumcenters_cmd(*a, *b, *count)),
        Command::Chasles { signature, a, b, c, bounces, phase, tilt } => {
            ("chasles", chasles_cmd(*signature, *a, *b, *c, *bounces, *phase, *tilt))
        }
        Command::Permitted { ellipsoid, samples, signature } => {
            ("permitted", permitted_cmd(cfg, ellipsoid, *samples, *signature))
        }
    }
}

#[derive(Serialize)]
struct RootRow {
    re: f64,
    im: f64,
    multiplicity: usize,
    class: CausticClass,
}

#[derive(Serialize)]
struct PonceletRow {
    lambda: f64,
    class: CausticClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    closes: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    porism_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ClosedForm {
    values: Vec<String>,
    max_relative_mismatch: f64,
}

#[derive(Serialize)]
struct CausticsSummary {
    n: u32,
    a: String,
    b: String,
    polynomial: String,
    degree: usize,
    generic_degree: u32,
    roots: Vec<RootRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    poncelet: Vec<PonceletRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedForm>,
}

fn caustics_cmd(
    cfg: &Config,
    n: u32,
    a: &str,
    b: &str,
    check_poncelet: bool,
    closed_form: bool,
    starts: usize,
) -> Result<Outcome, CliError> {
    if n < 3 {
        return Err(CliError::Input("-n must be at least 3".into()));
    }
    let aq = crate::input::parse_rational("a", a)?;
    let bq = crate::input::parse_rational("b", b)?;
    if aq.is_zero() || bq.is_zero() {
        return Err(CliError::Input("a and b must be non-zero".into()));
    }
    let report = caustics::n_caustics(n, &aq, &bq, cfg.dedup_tol)?;
    let (af, bf) = (to_f64(&aq), to_f64(&bq));
    let roots: Vec<RootRow> = report
        .roots
        .iter()
        .map(|r| RootRow { re: r.lambda.re, im: r.lambda.im, multiplicity: r.multiplicity, class: r.class })
        .collect();
    let mut violations = Vec::new();
    let mut poncelet = Vec::new();
    if check_poncelet {
        if !(af > 0.0 && bf > 0.0) {
            return Err(CliError::Input("Poncelet checks need an ellipse (a, b > 0)".into()));
        }
        let c = Quadric::new(nalgebra::DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / af, 1.0 / bf, -1.0])))?;
        let pts = caustics::ellipse_starts(af, bf, starts.max(1), 0.1);
        for r in &report.roots {
            let Some(l) = caustics::real_part_if_real(r.lambda) else { continue };
            if r.class == CausticClass::Excluded {
                continue;
            }
            let inner = r.class == CausticClass::Ellipse && l > 0.0 && l < af.min(bf);
            let outcome = confocal_conic(af, bf, l).and_then(|d| caustics::poncelet_closure(&c, &d, n as usize, &pts, cfg.closure_tol * 100.0));
            match outcome {
                Ok(p) => {
                    if inner && !(p.closes && p.porism_holds) {
                        violations.push(format!("ellipse caustic λ = {l} does not close after {n} steps"));
                    }
                    poncelet.push(PonceletRow {
                        lambda: l,
                        class: r.class,
                        closes: Some(p.closes),
                        porism_holds: Some(p.porism_holds),
                        max_residual: Some(p.max_residual),
                        error: None,
                    });
                }
                Err(e) => {
                    if inner {
                        return Err(e.into());
                    }
                    poncelet.push(PonceletRow { lambda: l, class: r.class, closes: None, porism_holds: None, max_residual: None, error: Some(e.to_string()) });
                }
            }
        }
    }
    let closed = if closed_form {
        let values: Vec<BigRational> = match n {
            3 => caustics::three_caustics_exact(&aq, &bq).map(|v| v.to_vec()).unwrap_or_default(),
            4 => caustics::four_caustics_exact(&aq, &bq)?.to_vec(),
            _ => return Err(CliError::Input("closed forms exist for n = 3 and n = 4 only".into())),
        };
        let floats: Vec<f64> = match n {
            3 => caustics::three_caustics_closed_form(af, bf)?.to_vec(),
            _ => values.iter().map(to_f64).collect(),
        };
        let text: Vec<String> = if values.is_empty() {
            floats.iter().map(|x| format!("{x:?}")).collect()
        } else {
            values.iter().map(|q| q.to_string()).collect()
        };
        let mismatch = floats
            .iter()
            .map(|x| {
                report
                    .roots
                    .iter()
                    .map(|r| (r.lambda - Complex64::new(*x, 0.0)).norm() / x.abs().max(1e-300))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        if mismatch > 1e-9 {
            violations.push(format!("closed form differs from the computed roots by {mismatch:.3e}"));
        }
        Some(ClosedForm { values: text, max_relative_mismatch: mismatch })
    } else {
        None
    };
    let csv = csv_string(
        &["re", "im", "multiplicity", "class"],
        roots.iter().map(|r| vec![num(r.re), num(r.im), r.multiplicity.to_string(), r.class.as_str().to_string()]),
    );
    let summary = CausticsSummary {
        n,
        a: aq.to_string(),
        b: bq.to_string(),
        polynomial: report.polynomial.to_string(),
        degree: report.degree,
        generic_degree: caustics::generic_degree(n),
        roots,
        poncelet,
        closed_form: closed,
    };
    let mut out = Outcome::new(summary)?;
    out.file("caustics.csv", Format::Csv, csv);
    out.violations = violations;
    Ok(out)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Serialize)]
struct OrbitSummary {
    steps: usize,
    dim: usize,
    period: Option<usize>,
    closure_residual: f64,
    max_harmonic_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    joachimsthal_drift: Option<f64>,
}

fn orbit_cmd(
    cfg: &Config,
    path: &std::path::Path,
    steps: usize,
    start: Option<PointSpec>,
    next: Option<PointSpec>,
) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let scene = Scene::from_json(&text)?;
    let billiard = scene.build()?;
    let start = start.or(scene.start.clone()).unwrap_or(PointSpec { boundary: 0, param: default_param(&billiard, 0, 0.3) });
    let next = next.or(scene.next.clone()).unwrap_or_else(|| {
        let j = if billiard.boundaries.len() > 1 { 1 } else { 0 };
        PointSpec { boundary: j, param: default_param(&billiard, j, 2.0) }
    });
    let p1 = Scene::point(&billiard, &start)?;
    let p2 = Scene::point(&billiard, &next)?;
    let orbit = billiard.iterate_orbit(p1, p2, steps, cfg.closure_tol)?;
    let records = orbit.vertex_records(&billiard)?;
    let ellipse = scene.euclidean_ellipse();
    let d = billiard.dim();
    let mut jvals: Vec<Option<f64>> = vec![None; orbit.points.len()];
    if let Some((a, b)) = ellipse {
        for j in 0..orbit.points.len() - 1 {
            let p = &orbit.points[j].point;
            let v = &orbit.points[j + 1].point - p;
            jvals[j] = Some(caustics::joachimsthal([p[0], p[1]], [v[0], v[1]], a, b, cfg.geom_tol)?);
        }
    }
    let joachimsthal_drift = ellipse.map(|_| {
        let first = jvals[0].unwrap_or(0.0);
        jvals.iter().flatten().map(|x| (x - first).abs() / (1.0 + first.abs())).fold(0.0, f64::max)
    });
    let max_harmonic_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mut header = vec!["step", "x", "y"];
    if d == 3 {
        header.push("z");
    }
    header.extend(["incoming_azimuth", "outgoing_azimuth", "residual"]);
    if ellipse.is_some() {
        header.push("joachimsthal");
    }
    let rows = orbit.points.iter().enumerate().map(|(j, p)| {
        let mut row: Vec<String> = vec![j.to_string()];
        row.extend(p.point.iter().map(|x| num(*x)));
        match records.iter().find(|r| r.step == j) {
            Some(r) => row.extend([num(r.azimuth_in), num(r.azimuth_out), num(r.residual)]),
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        if ellipse.is_some() {
            row.push(jvals[j].map(num).unwrap_or_default());
        }
        row
    });
    let csv = csv_string(&header, rows);
    let summary = OrbitSummary {
        steps,
        dim: d,
        period: orbit.period,
        closure_residual: orbit.closure_residual,
        max_harmonic_residual,
        joachimsthal_drift,
    };
    let mut out = Outcome::new(summary)?;
    out.check(max_harmonic_residual <= cfg.geom_tol, format!("harmonicity residual {max_harmonic_residual:.3e}"));
    if let Some(dj) = joachimsthal_drift {
        out.check(dj < JOACHIMSTHAL_TOL, format!("Joachimsthal drift {dj:.3e}"));
    }
    out.file("orbit.csv", Format::Csv, csv);
    if d == 2 {
        let mut svg = Svg::new();
        for fb in &billiard.boundaries {
            let s = &fb.surface;
            let (lo, hi) = s.domain()[0];
            let pts = (0..=200).map(|i| {
                let p = s.point(&[lo + (hi - lo) * i as f64 / 200.0]);
                [p[0], p[1]]
            });
            svg.polyline(pts.collect(), "#555", false);
        }
        let path: Vec<[f64; 2]> = orbit.points.iter().map(|p| [p.point[0], p.point[1]]).collect();
        for p in &path {
            svg.dot(*p, "#c0392b");
        }
        svg.polyline(path, "#2e86c1", false);
        out.file("orbit.svg", Format::Svg, svg.render());
    }
    Ok(out)
}

fn default_param(b: &projbill::reflect::Billiard, j: usize, t: f64) -> Vec<f64> {
    let dom = b.boundaries[j].surface.domain();
    dom.iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            let frac = ((t + 0.37 * i as f64) / std::f64::consts::TAU).fract().clamp(0.1, 0.9);
            if dom.len() == 1 && (hi - lo) <= 1.0 + 1e-12 {
                0.5
            } else {
                lo + (hi - lo) * frac
            }
        })
        .collect()
}

#[derive(Serialize)]
struct PolygonSummary {
    kind: PolygonKind,
    vertices: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    k: usize,
    samples: usize,
    closed: usize,
    max_residual: f64,
    redraws: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual_midpoint_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    great_diagonal_residual: Option<f64>,
}

fn polygon_cmd(
    cfg: &Config,
    kind: PolygonChoice,
    samples: usize,
    m: usize,
    n: usize,
    vertices: Option<Vec<[f64; 2]>>,
    center: Option<[f64; 2]>,
) -> Result<Outcome, CliError> {
    if samples == 0 {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    let (billiard, k) = match kind {
        PolygonChoice::RightSpherical => {
            let v = vertices.unwrap_or(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
            let v: [[f64; 2]; 3] = v.try_into().map_err(|_| CliError::Input("a right-spherical billiard is a triangle".into()))?;
            (PolygonBilliard::right_spherical(v)?, 3)
        }
        PolygonChoice::CpQuadrilateral => {
            let v = vertices.unwrap_or(vec![[0.0, 0.0], [2.0, 0.0], [2.5, 1.5], [0.3, 1.8]]);
            let v: [[f64; 2]; 4] = v.try_into().map_err(|_| CliError::Input("a quadrilateral has 4 vertices".into()))?;
            (PolygonBilliard::diagonal_quadrilateral(v)?, 4)
        }
        PolygonChoice::CpRegular2m => {
            if m < 2 {
                return Err(CliError::Input("--m must be at least 2".into()));
            }
            (PolygonBilliard::regular(2 * m)?, 2 * m)
        }
        PolygonChoice::CpOddN => {
            if n < 3 || n % 2 == 0 {
                return Err(CliError::Input("--n must be odd and at least 3".into()));
            }
            let v = match vertices {
                Some(v) if v.len() == n => v,
                Some(_) => return Err(CliError::Input("--vertices must list n points".into())),
                None => polyref::random_convex_polygon(n, &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
            };
            let c = center.unwrap_or_else(|| {
                let s = v.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
                [s[0] / n as f64 + 0.05, s[1] / n as f64 - 0.03]
            });
            (PolygonBilliard::centrally_projective(c, &v)?, 2 * n)
        }
    };
    let report = billiard.reflectivity_sweep(k, samples, cfg.seed, cfg.closure_tol)?;
    let (mut dual, mut diag) = (None, None);
    if billiard.kind() == PolygonKind::CentrallyProjective {
        let mut worst: f64 = 0.0;
        let mut worst_diag: f64 = 0.0;
        for i in 0..samples.min(20) {
            let t = 0.15 + 0.7 * i as f64 / 20.0;
            let (p0, p1) = billiard.start_from_params(t, 1.0 - t * 0.8);
            let Ok(orbit) = billiard.virtual_orbit(p0, p1, k, cfg.closure_tol) else { continue };
            if let Ok(d) = polyref::dual_conjugate(&billiard, &orbit) {
                let scale = d.q.iter().chain(&d.big_q).map(|q| q.norm()).fold(1.0, f64::max);
                worst = worst.max(d.midpoint_residual() / scale);
            }
            if kind == PolygonChoice::CpRegular2m && orbit.period.is_some() {
                for l in 0..k as i64 {
                    for r in 0..(m as i64 - 1) {
                        if let Ok(x) = polyref::great_diagonal_check(&billiard, &orbit, l, r) {
                            worst_diag = worst_diag.max(x);
                        }
                    }
                }
            }
        }
        dual = Some(worst);
        if kind == PolygonChoice::CpRegular2m {
            diag = Some(worst_diag);
        }
    }
    let csv = csv_string(&["sample", "residual"], report.residuals.iter().enumerate().map(|(i, r)| vec![i.to_string(), num(*r)]));
    let summary = PolygonSummary {
        kind: billiard.kind(),
        vertices: billiard.affine_vertices(),
        center: billiard.center().map(|o| [o[0] / o[2], o[1] / o[2]]),
        k,
        samples,
        closed: report.closed,
        max_residual: report.max_residual,
        redraws: report.redraws,
        dual_midpoint_residual: dual,
        great_diagonal_residual: diag,
    };
    let mut out = Outcome::new(summary)?;
    out.check(report.all_closed(), format!("{}/{} orbits closed at k = {k}", report.closed, samples));
    if let Some(d) = dual {
        out.check(d < DUAL_TOL, format!("dual midpoint identity off by {d:.3e}"));
    }
    if let Some(d) = diag {
        out.check(d < 1e-9, format!("great-diagonal concurrence off by {d:.3e}"));
    }
    out.file("polygon.csv", Format::Csv, csv);
    let mut svg = Svg::new();
    svg.polyline(billiard.affine_vertices(), "#555", true);
    if let Some(o) = billiard.center() {
        svg.dot([o[0] / o[2], o[1] / o[2]], "#c0392b");
    }
    out.file("polygon.svg", Format::Svg, svg.render());
    Ok(out)
}

#[derive(Serialize)]
struct LocusSummary {
    a: f64,
    b: f64,
    orbits: usize,
    class: ConicClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    caustic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_term: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mirror_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<[f64; 6]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    single_point: Option<[f64; 2]>,
}

fn circumcenters_cmd(a: f64, b: f64, count: usize) -> Result<Outcome, CliError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(CliError::Input("-a and -b must be positive".into()));
    }
    if count < 20 {
        return Err(CliError::Input("-N must be at least 20".into()));
    }
    let mut svg = Svg::new();
    svg.polyline(ellipse_outline(a, b), "#555", true);
    if a == b {
        // Every circumcenter is the center of the circle.
        let orbits = analysis::triangular_orbit_family(a, b, count)?;
        let pts: Vec<[f64; 2]> = orbits
            .iter()
            .map(|o| analysis::circumcenter(o.vertices[0], o.vertices[1], o.vertices[2]))
            .collect::<projbill::Result<_>>()?;
        let spread = pts.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        let degenerate = matches!(analysis::fit_conic(&pts), Err(projbill::Error::Degenerate(_)));
        let csv = csv_string(&["index", "x", "y"], pts.iter().enumerate().map(|(i, p)| vec![i.to_string(), num(p[0]), num(p[1])]));
        let summary = LocusSummary {
            a,
            b,
            orbits: count,
            class: ConicClass::Degenerate,
            caustic: Some(analysis::triangular_caustic(a, b)?),
            residual: None,
            cross_term: None,
            mirror_distance: None,
            coefficients: None,
            single_point: Some([0.0, 0.0]),
        };
        let mut out = Outcome::new(summary)?;
        out.check(degenerate && spread < LOCUS_TOL, format!("circle locus is not a single point (spread {spread:.3e})"));
        svg.dot([0.0, 0.0], "#c0392b");
        out.file("locus.csv", Format::Csv, csv);
        out.file("locus.svg", Format::Svg, svg.render());
        return Ok(out);
    }
    let report = analysis::circumcenter_locus(a, b, count)?;
    let fit = &report.fit;
    let csv = csv_string(&["index", "x", "y"], report.points.iter().enumerate().map(|(i, p)| vec![i.to_string(), num(p[0]), num(p[1])]));
    let summary = LocusSummary {
        a,
        b,
        orbits: count,
        class: fit.class,
        caustic: Some(report.caustic),
        residual: Some(fit.residual),
        cross_term: Some(fit.cross_term),
        mirror_distance: Some(report.mirror_distance),
        coefficients: Some(fit.coefficients),
        single_point: None,
    };
    let mut out = Outcome::new(summary)?;
    out.check(fit.class == ConicClass::Ellipse, format!("locus classified as {:?}", fit.class));
    out.check(fit.residual < LOCUS_TOL, format!("fit residual {:.3e}", fit.residual));
    out.check(fit.cross_term < LOCUS_TOL, format!("cross term {:.3e}", fit.cross_term));
    out.check(report.mirror_distance < LOCUS_TOL, format!("mirror asymmetry {:.3e}", report.mirror_distance));
    for p in &report.points {
        svg.dot(*p, "#c0392b");
    }
    out.file("locus.csv", Format::Csv, csv);
    out.file("locus.svg", Format::Svg, svg.render());
    Ok(out)
}

#[derive(Serialize)]
struct ChaslesSummary {
    axes: Vec<f64>,
    signature: (usize, usize),
    bounces: usize,
    initial: Vec<f64>,
    max_drift: f64,
    max_orthogonality: f64,
}

fn chasles_cmd(
    signature: Option<(usize, usize)>,
    a: f64,
    b: f64,
    c: Option<f64>,
    bounces: usize,
    phase: f64,
    tilt: f64,
) -> Result<Outcome, CliError> {
    let mut axes = vec![a, b];
    axes.extend(c);
    let d = axes.len();
    let (k, l) = signature.unwrap_or((d, 0));
    if k + l != d {
        return Err(CliError::Input(format!("signature ({k},{l}) does not match dimension {d}")));
    }
    let sig = Signature { k, l };
    let (start, dir) = analysis::chasles_start(&axes, phase, tilt)?;
    let report = analysis::chasles_invariance(&axes, sig, &start, &dir, bounces)?;
    let width = report.lambdas.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut header = vec!["chord".to_string()];
    header.extend((1..=width).map(|i| format!("lambda_{i}")));
    let header_ref: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv = csv_string(
        &header_ref,
        report.lambdas.iter().enumerate().map(|(i, ls)| {
            let mut row = vec![i.to_string()];
            row.extend(ls.iter().map(|x| num(*x)));
            row
        }),
    );
    let summary = ChaslesSummary {
        axes: axes.clone(),
        signature: (k, l),
        bounces,
        initial: report.lambdas.first().cloned().unwrap_or_default(),
        max_drift: report.max_drift,
        max_orthogonality: report.max_orthogonality,
    };
    let mut out = Outcome::new(summary)?;
    out.check(report.max_drift < CHASLES_TOL, format!("tangency parameters drift by {:.3e}", report.max_drift));
    out.check(report.max_orthogonality < CHASLES_TOL, format!("tangent hyperplanes off orthogonal by {:.3e}", report.max_orthogonality));
    out.file("chasles.csv", Format::Csv, csv);
    if d == 2 {
        let mut svg = Svg::new();
        svg.polyline(ellipse_outline(a, b), "#555", true);
        svg.polyline(report.points.iter().map(|p| [p[0], p[1]]).collect(), "#2e86c1", false);
        out.file("chasles.svg", Format::Svg, svg.render());
    }
    Ok(out)
}

#[derive(Serialize)]
struct PermittedSummary {
    axes: Vec<f64>,
    signature: (usize, usize),
    samples: usize,
    max_count: usize,
    deficient: usize,
    perturbed: usize,
    max_mismatch: f64,
    max_orthogonality: f64,
    max_residual: f64,
}

fn permitted_cmd(cfg: &Config, axes: &[f64], samples: usize, signature: Option<(usize, usize)>) -> Result<Outcome, CliError> {
    let d = axes.len();
    if d != 3 && d != 2 {
        return Err(CliError::Input("--ellipsoid takes 2 or 3 axes".into()));
    }
    let (k, l) = signature.unwrap_or((d, 0));
    if k + l != d {
        return Err(CliError::Input(format!("signature ({k},{l}) does not match dimension {d}")));
    }
    let sweep = analysis::permitted_sweep(axes, Signature { k, l }, samples, cfg.seed)?;
    let mut header: Vec<String> = ["index"].iter().map(|s| s.to_string()).collect();
    header.extend((0..d).map(|j| format!("b{j}")));
    header.extend((0..d).map(|j| format!("xi{j}")));
    header.extend(["ratio", "count", "perturbed", "mismatch"].iter().map(|s| s.to_string()));
    for h in 0..d - 1 {
        header.extend((0..d).map(|j| format!("eta{h}_{j}")));
    }
    let header_ref: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv = csv_string(
        &header_ref,
        sweep.samples.iter().map(|s| {
            let mut row = vec![s.index.to_string()];
            row.extend(s.base.iter().map(|x| num(*x)));
            row.extend(s.xi.iter().map(|x| num(*x)));
            row.extend([num(s.ratio), s.count.to_string(), s.perturbed.to_string(), num(s.mismatch)]);
            for h in 0..d - 1 {
                match s.normals.get(h) {
                    Some(e) => row.extend(e.iter().map(|x| num(*x))),
                    None => row.extend((0..d).map(|_| String::new())),
                }
            }
            row
        }),
    );
    let summary = PermittedSummary {
        axes: axes.to_vec(),
        signature: (k, l),
        samples,
        max_count: sweep.max_count,
        deficient: sweep.deficient,
        perturbed: sweep.samples.iter().filter(|s| s.perturbed).count(),
        max_mismatch: sweep.max_mismatch,
        max_orthogonality: sweep.max_orthogonality,
        max_residual: sweep.max_residual,
    };
    let mut out = Outcome::new(summary)?;
    out.check(sweep.max_count < d, format!("{} permitted hyperplanes exceed d - 1", sweep.max_count));
    out.check(sweep.deficient == 0, format!("{} samples admit fewer than d - 1 hyperplanes", sweep.deficient));
    out.check(sweep.max_mismatch < PERMITTED_TOL, format!("confocal cross-validation off by {:.3e}", sweep.max_mismatch));
    out.file("permitted.csv", Format::Csv, csv);
    Ok(out)
}
