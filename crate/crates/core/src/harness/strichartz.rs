use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrichartzFamily {
    /// `2/q + n/r = n/2`.
    Kg,
    /// `2/q + (n−1)/r = (n−1)/2`.
    Wave,
}

/// A Lebesgue exponent in `[1, ∞]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn int(v: i64) -> Self {
        Exponent::Finite(Rational64::from_integer(v))
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> Rational64 {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational64::from_integer(0),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    /// `"4"`, `"8/3"`, `"inf"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let bad = || Error::InvalidArgument(format!("bad exponent '{s}'"));
        let value = match s.split_once('/') {
            Some((a, b)) => {
                let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if b == 0 {
                    return Err(bad());
                }
                Rational64::new(a, b)
            }
            None => Rational64::from_integer(s.parse().map_err(|_| bad())?),
        };
        Ok(Exponent::Finite(value))
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

fn dims(n: u32, family: StrichartzFamily) -> Rational64 {
    let n = n as i64;
    match family {
        StrichartzFamily::Kg => Rational64::from_integer(n),
        StrichartzFamily::Wave => Rational64::from_integer(n - 1),
    }
}

fn check_r(r: Exponent) -> Result<Rational64> {
    match r {
        Exponent::Finite(v) if v >= Rational64::from_integer(2) => Ok(v),
        other => Err(Error::ExponentRange(format!("r = {other} outside [2, inf)"))),
    }
}

/// Checks the scaling relation exactly and returns `(valid, l)` with
/// `l = 1/q − 1/r + 1/2`. A pair is valid when the relation holds and `q ≥ 2`.
pub fn strichartz_admissible(n: u32, q: Exponent, r: Exponent, family: StrichartzFamily) -> Result<(bool, Rational64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let r = check_r(r)?;
    if let Exponent::Finite(qv) = q {
        if qv <= Rational64::from_integer(0) {
            return Err(Error::ExponentRange(format!("q = {qv} must be positive")));
        }
    }
    let d = dims(n, family);
    let two = Rational64::from_integer(2);
    let inv_q = q.reciprocal();
    let inv_r = r.recip();
    let relation = two * inv_q + d * inv_r == d / two;
    let q_ok = inv_q <= Rational64::new(1, 2);
    let l = inv_q - inv_r + Rational64::new(1, 2);
    Ok((relation && q_ok, l))
}

/// The `q` completing an admissible pair for given `r`, if one exists.
pub fn strichartz_q(n: u32, r: Exponent, family: StrichartzFamily) -> Result<Option<Exponent>> {
    let r = check_r(r)?;
    let d = dims(n, family);
    let two = Rational64::from_integer(2);
    let inv_q = (d / two - d * r.recip()) / two;
    if inv_q < Rational64::from_integer(0) || inv_q > Rational64::new(1, 2) {
        return Ok(None);
    }
    Ok(Some(if inv_q == Rational64::from_integer(0) { Exponent::Infinite } else { Exponent::Finite(inv_q.recip()) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kg_two_dimensional_l4() {
        let (ok, l) = strichartz_admissible(2, Exponent::int(4), Exponent::int(4), StrichartzFamily::Kg).unwrap();
        assert!(ok);
        assert_eq!(l, Rational64::new(1, 2));
    }

    #[test]
    fn kg_three_dimensional_r4() {
        let q = strichartz_q(3, Exponent::int(4), StrichartzFamily::Kg).unwrap().unwrap();
        // 2/q = 3/2 − 3/4 = 3/4.
        assert_eq!(q, Exponent::Finite(Rational64::new(8, 3)));
        let (ok, l) = strichartz_admissible(3, q, Exponent::int(4), StrichartzFamily::Kg).unwrap();
        assert!(ok);
        assert_eq!(l, Rational64::new(3, 8) - Rational64::new(1, 4) + Rational64::new(1, 2));
        assert_eq!(l, Rational64::new(5, 8));
    }

    #[test]
    fn wave_endpoint_is_rejected() {
        // Wave n = 3 with q = 2 would need r = ∞.
        assert_eq!(strichartz_q(3, Exponent::int(2), StrichartzFamily::Wave).unwrap(), Some(Exponent::Infinite));
        assert!(matches!(
            strichartz_admissible(3, Exponent::int(2), Exponent::Infinite, StrichartzFamily::Wave),
            Err(Error::ExponentRange(_))
        ));
        assert!(strichartz_admissible(3, Exponent::int(4), Exponent::int(1), StrichartzFamily::Wave).is_err());
        let (ok, _) = strichartz_admissible(3, Exponent::int(3), Exponent::int(4), StrichartzFamily::Wave).unwrap();
        assert!(!ok);
        let (ok, l) = strichartz_admissible(3, Exponent::Infinite, Exponent::int(2), StrichartzFamily::Wave).unwrap();
        assert!(ok && l == Rational64::from_integer(0));
    }

    #[test]
    fn parses_exponents() {
        assert_eq!("8/3".parse::<Exponent>().unwrap(), Exponent::Finite(Rational64::new(8, 3)));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert!("1/0".parse::<Exponent>().is_err());
        assert_eq!(Exponent::Finite(Rational64::new(8, 3)).to_string(), "8/3");
    }
}
