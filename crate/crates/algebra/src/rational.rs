//! Coefficient field helpers on top of `num_rational::BigRational`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(v: &Q) -> f64 {
    if let (Some(n), Some(d)) = (v.numer().to_f64(), v.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale down very large numerators/denominators before converting.
    let nb = v.numer().bits() as i64;
    let db = v.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (v.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (v.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// Exact value of a finite binary float.
pub fn from_f64(v: f64) -> Option<Q> {
    Q::from_float(v)
}

pub fn is_integer(v: &Q) -> bool {
    v.denom().is_one()
}

/// Reduces `v` modulo the prime `p`; `None` when the denominator vanishes mod `p`.
pub fn mod_p(v: &Q, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = big_mod(v.numer(), &pb);
    let d = big_mod(v.denom(), &pb);
    if d == 0 {
        return None;
    }
    Some(crate::modular::mul_mod(n, crate::modular::inv_mod(d, p), p))
}

fn big_mod(v: &BigInt, p: &BigInt) -> u64 {
    let r = v.mod_floor(p);
    r.to_u64().expect("residue fits in u64")
}

pub fn lcm_denominators<'a>(it: impl Iterator<Item = &'a Q>) -> BigInt {
    let mut l = BigInt::one();
    for c in it {
        if !c.denom().is_one() {
            l = l.lcm(c.denom());
        }
    }
    l
}

pub fn gcd_numerators<'a>(it: impl Iterator<Item = &'a Q>) -> BigInt {
    let mut g = BigInt::zero();
    for c in it {
        g = g.gcd(c.numer());
        if g.is_one() {
            break;
        }
    }
    g
}

pub fn sign(v: &Q) -> Sign {
    if v.is_zero() {
        Sign::NoSign
    } else if v.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn render(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form() {
        let v = q_frac(6, -4);
        assert_eq!(v.numer(), &BigInt::from(-3));
        assert_eq!(v.denom(), &BigInt::from(2));
        assert!(q(0).denom().is_one());
    }

    #[test]
    fn modular_image() {
        let p = 1_000_000_007u64;
        let half = mod_p(&q_frac(1, 2), p).unwrap();
        assert_eq!(crate::modular::mul_mod(half, 2, p), 1);
        assert_eq!(mod_p(&q(-1), p), Some(p - 1));
    }

    #[test]
    fn huge_values_convert() {
        let big = Q::from_integer(BigInt::from(10).pow(400));
        let v = to_f64(&(big.clone() / (big * q(4))));
        assert!((v - 0.25).abs() < 1e-15);
    }
}
