//! Finite fields `F_{p^e}` (small `q`, log/antilog tables) and the search for
//! linear factors of integer forms reduced modulo `p`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::MultiPoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field too large: q = {0}")]
    FieldTooLarge(u64),
    #[error("budget exceeded: {needed} candidates > {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("coefficient denominator divisible by {0}")]
    BadDenominator(u64),
    #[error("the form vanishes identically modulo {0}")]
    ZeroReduction(u64),
}

const MAX_Q: u64 = 1 << 22;

/// `F_q`, `q = p^e`. Elements are indices `c0 + c1 p + ... ` standing for
/// `c0 + c1 a + ...` where `a` is a root of the fixed defining polynomial.
#[derive(Clone, Debug)]
pub struct GaloisField {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    /// Monic defining polynomial, coefficients low to high (length `e + 1`).
    pub modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(p: u64, e: u32) -> Result<Self, FfError> {
        if !super::is_prime(p) {
            return Err(FfError::NotPrime(p));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_Q).ok_or(FfError::FieldTooLarge(p.saturating_pow(e)))?;
        let modulus = first_irreducible(p, e as usize);
        let mut gf = GaloisField { p, e, q, modulus, exp: Vec::new(), log: Vec::new() };
        gf.build_tables();
        Ok(gf)
    }

    fn digits(&self, a: u32) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.e as usize);
        let mut a = a as u64;
        for _ in 0..self.e {
            v.push(a % self.p);
            a /= self.p;
        }
        v
    }

    fn from_digits(&self, d: &[u64]) -> u32 {
        d.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let e = self.e as usize;
        let p = self.p;
        let mut prod = vec![0u64; 2 * e];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        for k in (e..2 * e).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                prod[k - e + i] = (prod[k - e + i] + (p - self.modulus[i]) % p * c) % p;
            }
        }
        self.from_digits(&prod[..e])
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        for g in 2..q as u32 {
            let mut exp = Vec::with_capacity(q - 1);
            let mut x = 1u32;
            let mut ok = true;
            for k in 0..q - 1 {
                if k > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                x = self.slow_mul(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; q];
                for (k, &v) in exp.iter().enumerate() {
                    log[v as usize] = k as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("multiplicative group is cyclic");
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn from_int(&self, v: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        let r = ((v % &p) + &p) % &p;
        r.to_u64().unwrap() as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.from_digits(&s)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.e == 1 {
            return ((self.p - a as u64) % self.p) as u32;
        }
        let s: Vec<u64> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.from_digits(&s)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q as usize - 1;
        self.exp[(self.log[a as usize] as usize + self.log[b as usize] as usize) % n]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let n = self.q as usize - 1;
        self.exp[(n - self.log[a as usize] as usize) % n]
    }

    pub fn pow(&self, a: u32, k: u32) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((self.log[a as usize] as u64 * k as u64) % n) as usize]
    }

    /// Coefficients of an element in the basis `1, a, a^2, ...`.
    pub fn coordinates(&self, a: u32) -> Vec<u64> {
        self.digits(a)
    }
}

fn poly_has_root(f: &[u64], p: u64) -> bool {
    (0..p).any(|x| f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0)
}

/// First monic irreducible polynomial of degree `e <= 3` in lexicographic order
/// of its lower coefficients. Degree at most 3 means irreducible iff no root.
fn first_irreducible(p: u64, e: usize) -> Vec<u64> {
    if e == 1 {
        return vec![0, 1];
    }
    assert!(e <= 3, "extension degree at most 3");
    let total = p.pow(e as u32);
    for idx in 0..total {
        let mut f = Vec::with_capacity(e + 1);
        let mut k = idx;
        for _ in 0..e {
            f.push(k % p);
            k /= p;
        }
        f.push(1);
        if !poly_has_root(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

/// Sparse polynomial over a Galois field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, u32>,
}

impl FqPoly {
    pub fn zero(nvars: usize) -> Self {
        FqPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, gf: &GaloisField, m: Vec<u32>, c: u32) {
        if c == 0 {
            return;
        }
        let v = gf.add(*self.terms.get(&m).unwrap_or(&0), c);
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn mul(&self, gf: &GaloisField, o: &FqPoly) -> FqPoly {
        let mut out = FqPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let m: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(gf, m, gf.mul(*ca, *cb));
            }
        }
        out
    }

    pub fn eval(&self, gf: &GaloisField, x: &[u32]) -> u32 {
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut t = *c;
            for (xi, &e) in x.iter().zip(m) {
                if e > 0 {
                    t = gf.mul(t, gf.pow(*xi, e));
                }
            }
            acc = gf.add(acc, t);
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(gf: &GaloisField, coeffs: &[u32]) -> FqPoly {
        let n = coeffs.len();
        let mut p = FqPoly::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut m = vec![0; n];
            m[i] = 1;
            p.add_term(gf, m, c);
        }
        p
    }

    /// Divide by a linear form whose coefficient at `pivot` is one.
    /// Returns the cofactor and the remainder (free of the pivot variable).
    pub fn divide_linear(&self, gf: &GaloisField, l: &FqPoly, pivot: usize) -> (FqPoly, FqPoly) {
        let mut rem = self.clone();
        let mut quo = FqPoly::zero(self.nvars);
        while let Some((m, c)) = rem.terms.iter().rev().find(|(m, _)| m[pivot] > 0).map(|(m, c)| (m.clone(), *c)) {
            let mut qm = m.clone();
            qm[pivot] -= 1;
            quo.add_term(gf, qm.clone(), c);
            for (lm, lc) in &l.terms {
                let mm: Vec<u32> = qm.iter().zip(lm).map(|(x, y)| x + y).collect();
                rem.add_term(gf, mm, gf.neg(gf.mul(c, *lc)));
            }
        }
        (quo, rem)
    }
}

/// Reduce an integer-coefficient polynomial modulo `p` into `gf`.
pub fn reduce_mod_p(f: &MultiPoly, gf: &GaloisField) -> Result<FqPoly, FfError> {
    let p = BigInt::from(gf.p);
    let mut out = FqPoly::zero(f.nvars());
    for (m, c) in f.terms() {
        if (c.denom() % &p).is_zero() {
            return Err(FfError::BadDenominator(gf.p));
        }
        let num = gf.from_int(c.numer());
        let den = gf.from_int(c.denom());
        out.add_term(gf, m.0.clone(), gf.mul(num, gf.inv(den)));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FfLinearFactor {
    /// Coefficients in the full variable set, first nonzero equal to one.
    pub coeffs: Vec<u32>,
    pub cofactor: FqPoly,
}

/// All linear forms over `F_{p^e}` (up to scalar) dividing `f mod p`, found by
/// exhaustive search over the dual projective space of the variables present.
pub fn ff_factor_linear(f: &MultiPoly, p: u64, e: u32, budget: u64) -> Result<(GaloisField, Vec<FfLinearFactor>), FfError> {
    let gf = GaloisField::new(p, e)?;
    let fp = reduce_mod_p(f, &gf)?;
    if fp.is_zero() {
        return Err(FfError::ZeroReduction(p));
    }
    let n = f.nvars();
    let present: Vec<usize> = (0..n).filter(|&i| fp.terms.keys().any(|m| m[i] > 0)).collect();
    let m = present.len();
    if m == 0 {
        return Ok((gf, Vec::new()));
    }
    let q = gf.q;
    let needed = (0..m as u32).map(|k| q.saturating_pow(k)).fold(0u64, |a, b| a.saturating_add(b));
    if needed > budget {
        return Err(FfError::Budget { needed, budget });
    }
    let deg = fp.total_degree();
    let mut found = Vec::new();
    for piv in 0..m {
        let free = m - 1 - piv;
        let count = q.pow(free as u32);
        for idx in 0..count {
            let mut coeffs = vec![0u32; n];
            coeffs[present[piv]] = 1;
            let mut k = idx;
            for j in 0..free {
                coeffs[present[piv + 1 + j]] = (k % q) as u32;
                k /= q;
            }
            if !quick_vanishes(&gf, &fp, &coeffs, present[piv], &present, deg) {
                continue;
            }
            let l = FqPoly::linear(&gf, &coeffs);
            let (cof, rem) = fp.divide_linear(&gf, &l, present[piv]);
            if rem.is_zero() {
                debug_assert_eq!(l.mul(&gf, &cof), fp);
                found.push(FfLinearFactor { coeffs, cofactor: cof });
            }
        }
    }
    Ok((gf, found))
}

/// Necessary condition for `l | f`: `f` vanishes at a few points of `V(l)`.
fn quick_vanishes(gf: &GaloisField, f: &FqPoly, l: &[u32], pivot: usize, present: &[usize], deg: u32) -> bool {
    let others: Vec<usize> = present.iter().copied().filter(|&v| v != pivot).collect();
    let trials = (deg as usize + 1).min(gf.q as usize).max(1);
    for t in 0..trials {
        let mut x = vec![0u32; f.nvars];
        for (k, &v) in others.iter().enumerate() {
            x[v] = ((t * (k + 1) + k) % gf.q as usize) as u32;
        }
        let mut s = 0;
        for &v in &others {
            s = gf.add(s, gf.mul(l[v], x[v]));
        }
        x[pivot] = gf.neg(s);
        if f.eval(gf, &x) != 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_auto;

    #[test]
    fn field_axioms_small() {
        for (p, e) in [(2, 1), (2, 2), (3, 2), (5, 3), (7, 1)] {
            let gf = GaloisField::new(p, e).unwrap();
            for a in 1..gf.q as u32 {
                assert_eq!(gf.mul(a, gf.inv(a)), 1);
                assert_eq!(gf.add(a, gf.neg(a)), 0);
                assert_eq!(gf.mul(a, gf.slow_mul(1, a)), gf.slow_mul(a, a));
            }
        }
    }

    #[test]
    fn difference_of_squares_mod_three() {
        let f = parse_poly_auto("x0^2 - x1^2", 2).unwrap();
        let (_, fs) = ff_factor_linear(&f, 3, 1, 1000).unwrap();
        let mut forms: Vec<Vec<u32>> = fs.iter().map(|l| l.coeffs.clone()).collect();
        forms.sort();
        assert_eq!(forms, vec![vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn sum_of_squares_splits_only_in_extension() {
        let f = parse_poly_auto("x0^2 + x1^2", 2).unwrap();
        assert!(ff_factor_linear(&f, 3, 1, 1000).unwrap().1.is_empty());
        assert_eq!(ff_factor_linear(&f, 3, 2, 1000).unwrap().1.len(), 2);
    }

    #[test]
    fn budget_and_zero_reduction() {
        let f = parse_poly_auto("x0^3 + x1^3 + x2^3", 3).unwrap();
        assert!(matches!(ff_factor_linear(&f, 5, 3, 10), Err(FfError::Budget { .. })));
        let g = parse_poly_auto("5*x0", 1).unwrap();
        assert!(matches!(ff_factor_linear(&g, 5, 1, 10), Err(FfError::ZeroReduction(5))));
    }
}
