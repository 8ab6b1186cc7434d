//! Parsing of command-line values.

use num_bigint::BigInt;
use num_rational::BigRational;
use projbill::scene::PointSpec;

use crate::CliError;

/// Exact rational from `p/q` or an integer. Decimals go through `f64`
/// (exactness lost) and produce a warning on stderr.
pub fn parse_rational(name: &str, s: &str) -> Result<BigRational, CliError> {
    let t = s.trim();
    let bad = || CliError::Input(format!("-{name}: `{s}` is not a number (use p/q for exact input)"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(CliError::Input(format!("-{name}: zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = t.parse::<BigInt>() {
        return Ok(BigRational::from_integer(i));
    }
    let x: f64 = t.parse().map_err(|_| bad())?;
    let q = projbill::caustics::exact_from_f64(x).map_err(|e| CliError::Input(format!("-{name}: {e}")))?;
    eprintln!("warning: -{name} {s} is a decimal; converted through f64 to {q} (exactness lost)");
    Ok(q)
}

/// `B:u` or `B:u1,u2`: boundary index and chart parameters.
pub fn parse_point(s: &str) -> Result<PointSpec, String> {
    let (b, u) = s.split_once(':').ok_or_else(|| format!("`{s}`: expected BOUNDARY:PARAM[,PARAM]"))?;
    let boundary = b.trim().parse().map_err(|_| format!("`{b}` is not a boundary index"))?;
    let param = u
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PointSpec { boundary, param })
}

/// `k,l` signature.
pub fn parse_signature(s: &str) -> Result<(usize, usize), String> {
    let (k, l) = s.split_once(',').ok_or_else(|| format!("`{s}`: expected K,L"))?;
    let k = k.trim().parse().map_err(|_| format!("`{k}` is not a count"))?;
    let l = l.trim().parse().map_err(|_| format!("`{l}` is not a count"))?;
    Ok((k, l))
}

/// Comma-separated list of positive numbers.
pub fn parse_axes(s: &str) -> Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err("axes must be positive".into());
    }
    Ok(v)
}

/// `x,y;x,y;...` list of planar points.
pub fn parse_vertices(s: &str) -> Result<Vec<[f64; 2]>, String> {
    s.split(';')
        .map(|p| {
            let (x, y) = p.split_once(',').ok_or_else(|| format!("`{p}`: expected X,Y"))?;
            let x = x.trim().parse().map_err(|_| format!("`{x}` is not a number"))?;
            let y = y.trim().parse().map_err(|_| format!("`{y}` is not a number"))?;
            Ok([x, y])
        })
        .collect()
}

/// `x,y` planar point.
pub fn parse_xy(s: &str) -> Result<[f64; 2], String> {
    let v = parse_vertices(s)?;
    match v.as_slice() {
        [p] => Ok(*p),
        _ => Err(format!("`{s}`: expected a single X,Y")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("a", "3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rational("a", "-2").unwrap(), BigRational::from_integer((-2).into()));
        assert_eq!(parse_rational("a", "0.5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("a", "1/0").is_err());
        assert!(parse_rational("a", "x").is_err());
    }

    #[test]
    fn points() {
        let p = parse_point("1:0.5,2").unwrap();
        assert_eq!((p.boundary, p.param), (1, vec![0.5, 2.0]));
        assert!(parse_point("0.5").is_err());
    }
}
