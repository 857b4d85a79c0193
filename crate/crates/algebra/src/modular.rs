//! Arithmetic in `Z/pZ` for a 61-bit Mersenne prime, and dense univariate
//! polynomial gcd over it. Used for rigorous gcd-degree bounds.

pub const PRIME: u64 = (1u64 << 61) - 1;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Dense polynomial, index = degree. Trailing zeros are trimmed.
pub fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of `gcd(a, b)` over `F_p`, or `None` if both are zero.
pub fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Option<usize> {
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() && b.is_empty() {
        return None;
    }
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    Some(a.len() - 1)
}

fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while r.len() > db {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let f = mul_mod(lead, inv, p);
            let shift = r.len() - 1 - db;
            for (i, c) in b.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(f, *c, p), p);
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_products() {
        let p = PRIME;
        // (v-1)(v-2) and (v-1)(v+3)
        let a = vec![2, p - 3, 1];
        let b = vec![p - 3, 2, 1];
        assert_eq!(gcd_degree(a, b, p), Some(1));
        assert_eq!(gcd_degree(vec![1, 1], vec![2, 1], p), Some(0));
    }

    #[test]
    fn inverse() {
        let p = PRIME;
        assert_eq!(mul_mod(inv_mod(12345, p), 12345, p), 1);
    }
}
