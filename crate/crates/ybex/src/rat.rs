//! Exact rational arithmetic used by every matrix identity in this crate.
//!
//! All structural checks (Yang-Baxter relations, commuting transfer matrices,
//! stationarity, branching probabilities) are performed over `Rat`, never in
//! floating point, so a passing check is an exact statement.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Renders in the `num/den` form used by the sparse text format, without a
/// denominator when it is 1.
pub fn display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"3"`, `"-1/2"`, and similar. Whitespace around the slash is not
/// accepted; callers split fields on whitespace first.
pub fn parse(text: &str) -> Option<Rat> {
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.parse().ok()?;
            let den: BigInt = den.parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rat::new(num, den))
        }
        None => {
            let num: BigInt = text.parse().ok()?;
            Some(Rat::from_integer(num))
        }
    }
}

/// Nearest f64; exact rationals drive the checks, floats only ever leave
/// through reporting and dynamics.
pub fn to_f64(r: &Rat) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Fast path while both fit in i64.
    if let (Some(n), Some(d)) = (i64::try_from(num).ok(), i64::try_from(den).ok()) {
        return n as f64 / d as f64;
    }
    let mut n = num.abs();
    let mut d = den.clone();
    // Scale down together to keep the ratio while avoiding overflow.
    let bits = n.bits().max(d.bits());
    if bits > 1000 {
        let shift = bits - 1000;
        n >>= shift;
        d >>= shift;
    }
    let approx = big_to_f64(&n) / big_to_f64(&d);
    if r.is_negative() {
        -approx
    } else {
        approx
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    let (_, digits) = v.to_u64_digits();
    let mut acc = 0.0f64;
    for &d in digits.iter().rev() {
        acc = acc * 1.8446744073709552e19 + d as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(display(&rat(1, 2)), "1/2");
        assert_eq!(display(&rat(-3, 6)), "-1/2");
        assert_eq!(display(&int(7)), "7");
        assert_eq!(display(&zero()), "0");
    }

    #[test]
    fn parse_round_trips() {
        for s in ["0", "7", "-3", "1/2", "-5/3", "10/4"] {
            let r = parse(s).unwrap();
            assert_eq!(parse(&display(&r)).unwrap(), r);
        }
        assert!(parse("1/0").is_none());
        assert!(parse("a/2").is_none());
        assert!(parse("").is_none());
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(to_f64(&rat(1, 2)), 0.5);
        assert_eq!(to_f64(&rat(-1, 4)), -0.25);
        assert_eq!(to_f64(&int(3)), 3.0);
        // big numerator/denominator still lands close
        let big = Rat::new(BigInt::from(1u8) << 200, (BigInt::from(1u8) << 200) * 3);
        assert!((to_f64(&big) - 1.0 / 3.0).abs() < 1e-12);
    }
}
