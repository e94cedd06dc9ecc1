//! Absolute multiplicative and logarithmic heights over Q.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::MultiPoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("height of the zero vector is undefined")]
    ZeroVector,
    #[error("integer too large to factor by trial division: {0}")]
    TooLarge(String),
}

/// Point of projective space with primitive integer coordinates, first nonzero positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProjPoint {
    #[serde(serialize_with = "crate::report::ser_bigints")]
    pub coords: Vec<BigInt>,
}

impl ProjPoint {
    pub fn new(coords: &[BigRational]) -> Result<Self, HeightError> {
        let (c, _) = normalize_primitive(coords)?;
        Ok(ProjPoint { coords: c })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self, HeightError> {
        let r: Vec<BigRational> = coords.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        Self::new(&r)
    }

    pub fn height(&self) -> BigInt {
        self.coords.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub big_h: BigRational,
    pub log_h: f64,
}

impl HeightValue {
    fn from_int(h: BigInt) -> Self {
        let log_h = log_bigint(&h);
        HeightValue { big_h: BigRational::from_integer(h), log_h }
    }
}

/// Natural log of a positive integer, accurate for arbitrary size.
pub fn log_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "log of non-positive integer");
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 900;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn log_rational(x: &BigRational) -> f64 {
    log_bigint(x.numer()) - log_bigint(x.denom())
}

/// Primitive integer representative and the scalar `s` with `v = s * primitive`.
/// The first nonzero entry of the representative is positive.
pub fn normalize_primitive(v: &[BigRational]) -> Result<(Vec<BigInt>, BigRational), HeightError> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(HeightError::ZeroVector);
    }
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for x in v {
        g = g.gcd(x.numer());
        l = l.lcm(x.denom());
    }
    let mut s = BigRational::new(g, l);
    if v.iter().find(|x| !x.is_zero()).unwrap().is_negative() {
        s = -s;
    }
    let out = v.iter().map(|x| (x / &s).to_integer()).collect();
    Ok((out, s))
}

/// Normalise a polynomial's coefficient vector the same way (leading coefficient
/// in graded-lex order made positive).
pub fn normalize_poly(f: &MultiPoly) -> Result<(MultiPoly, BigRational), HeightError> {
    if f.is_zero() {
        return Err(HeightError::ZeroVector);
    }
    let (c, p) = f.content_primitive();
    Ok((p, c))
}

pub fn point_height(v: &[BigRational]) -> Result<HeightValue, HeightError> {
    let (p, _) = normalize_primitive(v)?;
    Ok(HeightValue::from_int(p.iter().map(|x| x.abs()).max().unwrap()))
}

pub fn point_height_int(v: &[BigInt]) -> Result<HeightValue, HeightError> {
    let r: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    point_height(&r)
}

/// Height of the coefficient vector of a polynomial.
pub fn poly_height(f: &MultiPoly) -> Result<HeightValue, HeightError> {
    if f.is_zero() {
        return Err(HeightError::ZeroVector);
    }
    Ok(HeightValue::from_int(f.max_abs_coeff()))
}

/// `max |x_i|` without projective normalisation.
pub fn affine_height(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
}

const TRIAL_LIMIT: u64 = 1 << 40;

fn prime_divisors(x: &BigInt) -> Result<Vec<BigInt>, HeightError> {
    let mut n = x.abs();
    if n.bits() > 80 {
        return Err(HeightError::TooLarge(n.to_string()));
    }
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(TRIAL_LIMIT);
    while &p * &p <= n {
        if p > limit {
            return Err(HeightError::TooLarge(n.to_string()));
        }
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push(n);
    }
    Ok(out)
}

fn valuation(x: &BigInt, p: &BigInt) -> u32 {
    let mut v = 0;
    let mut n = x.clone();
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// `|x|_p` as a rational (`p^{-v_p(x)}`); `0` for `x = 0`.
pub fn p_adic_abs(x: &BigRational, p: &BigInt) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let vn = valuation(x.numer(), p) as i32;
    let vd = valuation(x.denom(), p) as i32;
    let e = vn - vd;
    let pe = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::new(BigInt::one(), pe)
    } else {
        BigRational::from_integer(pe)
    }
}

/// Multiplicative height computed place by place:
/// `max_i |x_i|_inf * prod_p max_i |x_i|_p`.
pub fn height_by_places(v: &[BigRational]) -> Result<BigRational, HeightError> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(HeightError::ZeroVector);
    }
    let mut primes = BTreeSet::new();
    for x in v.iter().filter(|x| !x.is_zero()) {
        primes.extend(prime_divisors(x.numer())?);
        primes.extend(prime_divisors(x.denom())?);
    }
    let mut h = affine_height(v);
    for p in &primes {
        h *= v.iter().map(|x| p_adic_abs(x, p)).max().unwrap();
    }
    Ok(h)
}

/// `|x|_inf * prod_p |x|_p == 1` for nonzero `x`.
pub fn product_formula_check(x: &BigRational) -> Result<bool, HeightError> {
    if x.is_zero() {
        return Err(HeightError::ZeroVector);
    }
    let mut primes = BTreeSet::new();
    primes.extend(prime_divisors(x.numer())?);
    primes.extend(prime_divisors(x.denom())?);
    let mut acc = x.abs();
    for p in &primes {
        acc *= p_adic_abs(x, p);
    }
    Ok(acc.is_one())
}

pub fn harmonic(n: u64) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, k| acc + BigRational::new(BigInt::one(), BigInt::from(k)))
}

/// `N(n, d) = C(n+1, d+1) - 1`, the dimension of the Plücker space minus one.
pub fn plucker_dim(n: u64, d: u64) -> u64 {
    binom_u64(n + 1, d + 1) - 1
}

pub fn binom_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Window for `h(psi)` from the Chow-form height comparison, with the observed value.
#[derive(Clone, Debug, Serialize)]
pub struct HeightAudit {
    pub h_psi: f64,
    pub n_plucker: u64,
    pub harmonic_n: f64,
    pub lower: f64,
    pub upper: f64,
    /// `h(psi) >= 0`, the only unconditional check available without `h(X)`.
    pub consistent: bool,
}

/// Evaluate the height-comparison window. Both ends bound `h(X) - h(psi)`;
/// with `h(X)` unknown the report records the window and the sign check.
pub fn height_comparison_audit(psi: &MultiPoly, n: u64, d: u64, delta: u64) -> Result<HeightAudit, HeightError> {
    let h = poly_height(psi)?.log_h;
    let big_n = plucker_dim(n, d);
    let hn = harmonic(big_n).to_f64().unwrap();
    let nf = big_n as f64;
    let df = delta as f64;
    let lower = -0.5 * (((nf + 1.0) * (df + 1.0)).ln() + df * hn);
    let upper = (nf + 1.0) * df * 2f64.ln() + 4.0 * df * (nf + 1.0).ln() - 0.5 * df * hn;
    Ok(HeightAudit { h_psi: h, n_plucker: big_n, harmonic_n: hn, lower, upper, consistent: h >= 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn normalisation_examples() {
        let (p, s) = normalize_primitive(&[r(4, 1), r(6, 1)]).unwrap();
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(s, r(2, 1));
        let (p, s) = normalize_primitive(&[r(-1, 1), r(0, 1)]).unwrap();
        assert_eq!(p, vec![BigInt::from(1), BigInt::from(0)]);
        assert_eq!(s, r(-1, 1));
        assert_eq!(normalize_primitive(&[r(0, 1)]), Err(HeightError::ZeroVector));
        let (p, s) = normalize_primitive(&[r(1, 2), r(1, 3)]).unwrap();
        assert_eq!(p, vec![BigInt::from(3), BigInt::from(2)]);
        assert_eq!(s, r(1, 6));
    }

    #[test]
    fn heights_agree_place_by_place() {
        let v = vec![r(3, 4), r(-5, 6), r(7, 1)];
        let h = point_height(&v).unwrap();
        assert_eq!(height_by_places(&v).unwrap(), h.big_h);
        assert_eq!(h.big_h, r(84, 1));
    }

    #[test]
    fn product_formula() {
        for (a, b) in [(1, 1), (-12, 35), (1024, 81), (7, 49)] {
            assert!(product_formula_check(&r(a, b)).unwrap());
        }
    }

    #[test]
    fn log_of_huge_integers() {
        let x = num_traits::pow(BigInt::from(10), 400);
        assert!((log_bigint(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn plucker_dimension() {
        assert_eq!(plucker_dim(3, 1), 5);
        assert_eq!(plucker_dim(2, 1), 2);
        assert_eq!(plucker_dim(3, 2), 3);
    }
}
