//! JSON description of a framed billiard table.
//!
//! ```json
//! {
//!   "boundaries": [
//!     { "kind": "ellipse", "params": { "axes": [2, 1] }, "frame": "euclidean" }
//!   ],
//!   "order": "first-hit",
//!   "start": { "boundary": 0, "param": [0.3] },
//!   "next": { "boundary": 0, "param": [2.0] }
//! }
//! ```
//!
//! Boundary kinds: `ellipse` (`axes` of length 2), `quadric` (axis-aligned
//! ellipsoid, `axes` of length 2 or 3) and `polygon-edge` (`from`, `to`,
//! optional `bounded`, default true). Frames: `euclidean`, `pseudo(k,l)`,
//! `central(x,y[,z])`, `vertex(x,y)` (line through a vertex; same rule as
//! `central`), and `quadric(...)` with either the diagonal (`d + 1` entries)
//! or the full row-major `(d+1)×(d+1)` matrix of the frame quadric.
//!
//! ```
//! use projbill::scene::Scene;
//! let s = Scene::from_json(r#"{"boundaries":[{"kind":"ellipse","params":{"axes":[2,1]},"frame":"euclidean"}]}"#).unwrap();
//! assert_eq!(s.build().unwrap().dim(), 2);
//! ```

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projective::Quadric;
use crate::reflect::{Billiard, BoundaryPoint, Edge, Ellipsoid, FrameRule, FramedBoundary, HitOrder, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Ellipse,
    PolygonEdge,
    Quadric,
}

/// Shape parameters; which fields are required depends on the kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounded: Option<bool>,
}

/// Frame rule as written in a scene file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FrameSpec {
    Euclidean,
    Pseudo(usize, usize),
    Central(Vec<f64>),
    Vertex(Vec<f64>),
    Quadric(Vec<f64>),
}

impl TryFrom<String> for FrameSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        let t = s.trim();
        if t == "euclidean" {
            return Ok(FrameSpec::Euclidean);
        }
        let open = t.find('(').ok_or_else(|| format!("unknown frame `{t}`"))?;
        if !t.ends_with(')') {
            return Err(format!("frame `{t}` lacks a closing parenthesis"));
        }
        let name = &t[..open];
        let args: Vec<f64> = t[open + 1..t.len() - 1]
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number `{}` in frame `{t}`", x.trim())))
            .collect::<std::result::Result<_, _>>()?;
        match name {
            "pseudo" => {
                if args.len() != 2 || args.iter().any(|x| x.fract() != 0.0 || *x < 0.0) {
                    return Err(format!("pseudo frame needs two non-negative integers, got `{t}`"));
                }
                Ok(FrameSpec::Pseudo(args[0] as usize, args[1] as usize))
            }
            "central" => Ok(FrameSpec::Central(args)),
            "vertex" => Ok(FrameSpec::Vertex(args)),
            "quadric" => Ok(FrameSpec::Quadric(args)),
            _ => Err(format!("unknown frame `{name}`")),
        }
    }
}

impl From<FrameSpec> for String {
    fn from(f: FrameSpec) -> String {
        f.to_string()
    }
}

impl fmt::Display for FrameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            FrameSpec::Euclidean => write!(f, "euclidean"),
            FrameSpec::Pseudo(k, l) => write!(f, "pseudo({k},{l})"),
            FrameSpec::Central(v) => write!(f, "central({})", list(v)),
            FrameSpec::Vertex(v) => write!(f, "vertex({})", list(v)),
            FrameSpec::Quadric(v) => write!(f, "quadric({})", list(v)),
        }
    }
}

fn default_frame() -> FrameSpec {
    FrameSpec::Euclidean
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub kind: BoundaryKind,
    pub params: BoundaryParams,
    #[serde(default = "default_frame")]
    pub frame: FrameSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderSpec {
    #[default]
    FirstHit,
    Cyclic,
}

/// A point given by boundary index and chart parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub boundary: usize,
    pub param: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub boundaries: Vec<BoundarySpec>,
    #[serde(default)]
    pub order: OrderSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next: Option<PointSpec>,
}

impl Scene {
    /// Parse a scene; syntax errors report line and column.
    pub fn from_json(text: &str) -> Result<Scene> {
        serde_json::from_str(text).map_err(|e| {
            Error::InvalidInput(format!("scene: {} at line {}, column {}", strip_position(&e), e.line(), e.column()))
        })
    }

    /// Build the billiard table.
    pub fn build(&self) -> Result<Billiard> {
        let pieces = self
            .boundaries
            .iter()
            .enumerate()
            .map(|(i, b)| build_boundary(b).map_err(|e| prefix(i, e)))
            .collect::<Result<Vec<_>>>()?;
        let order = match self.order {
            OrderSpec::FirstHit => HitOrder::FirstHit,
            OrderSpec::Cyclic => HitOrder::Cyclic,
        };
        Billiard::new(pieces, order)
    }

    /// The single planar ellipse `x²/a + y²/b = 1` with its normal frame, if that
    /// is what the scene describes.
    pub fn euclidean_ellipse(&self) -> Option<(f64, f64)> {
        match self.boundaries.as_slice() {
            [b] if b.frame == FrameSpec::Euclidean && b.kind != BoundaryKind::PolygonEdge => match b.params.axes.as_deref() {
                Some([a, bb]) => Some((*a, *bb)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Resolve a [`PointSpec`] on the built table.
    pub fn point(billiard: &Billiard, p: &PointSpec) -> Result<BoundaryPoint> {
        billiard.point_at(p.boundary, &p.param)
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn prefix(i: usize, e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("boundary {i}: {m}")),
        Error::Degenerate(m) => Error::Degenerate(format!("boundary {i}: {m}")),
        other => other,
    }
}

fn build_boundary(b: &BoundarySpec) -> Result<FramedBoundary> {
    let p = &b.params;
    let surface: Arc<dyn crate::reflect::Surface> = match b.kind {
        BoundaryKind::Ellipse | BoundaryKind::Quadric => {
            let axes = p.axes.as_ref().ok_or_else(|| Error::InvalidInput("missing `axes`".into()))?;
            if b.kind == BoundaryKind::Ellipse && axes.len() != 2 {
                return Err(Error::InvalidInput("an ellipse has two axes".into()));
            }
            if p.from.is_some() || p.to.is_some() || p.bounded.is_some() {
                return Err(Error::InvalidInput("edge parameters given for a quadric".into()));
            }
            Arc::new(Ellipsoid::new(axes)?)
        }
        BoundaryKind::PolygonEdge => {
            let (from, to) = match (p.from, p.to) {
                (Some(f), Some(t)) => (f, t),
                _ => return Err(Error::InvalidInput("an edge needs `from` and `to`".into())),
            };
            if p.axes.is_some() {
                return Err(Error::InvalidInput("`axes` given for an edge".into()));
            }
            Arc::new(Edge::new(DVector::from_row_slice(&from), DVector::from_row_slice(&to), p.bounded.unwrap_or(true))?)
        }
    };
    let d = surface.ambient_dim();
    let frame = match &b.frame {
        FrameSpec::Euclidean => FrameRule::Euclidean,
        FrameSpec::Pseudo(k, l) => {
            if k + l != d {
                return Err(Error::InvalidInput(format!("signature ({k},{l}) does not match dimension {d}")));
            }
            FrameRule::Pseudo(Signature { k: *k, l: *l })
        }
        FrameSpec::Central(o) | FrameSpec::Vertex(o) => {
            if o.len() != d {
                return Err(Error::InvalidInput(format!("frame point needs {d} coordinates")));
            }
            FrameRule::Central(DVector::from_row_slice(o))
        }
        FrameSpec::Quadric(q) => {
            let n = d + 1;
            let m = if q.len() == n {
                DMatrix::from_diagonal(&DVector::from_row_slice(q))
            } else if q.len() == n * n {
                DMatrix::from_row_slice(n, n, q)
            } else {
                return Err(Error::InvalidInput(format!("frame quadric needs {n} or {} entries", n * n)));
            };
            let q2 = Quadric::new(m)?;
            if q2.is_degenerate() {
                return Err(Error::Singular("frame quadric is degenerate".into()));
            }
            FrameRule::Quadric(q2)
        }
    };
    Ok(FramedBoundary::new(surface, frame))
}
