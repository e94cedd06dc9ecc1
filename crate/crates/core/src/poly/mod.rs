//! Sparse multivariate polynomials over the rationals.

mod essential;
mod gcd;
mod monomial;
mod resultant;
mod text;
pub mod univariate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use essential::essential_variable_count;
pub use gcd::{content_in, gcd_bivariate};
pub use monomial::{monomials_of_degree, monomials_up_to_degree, Monomial};
pub use resultant::{macaulay_resultant, sylvester_resultant, BiForm};
pub(crate) use resultant::rational_determinant;
pub use text::{default_names, parse_lines, parse_poly, parse_poly_auto};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("division is not exact; remainder {remainder}")]
    NotDivisible { remainder: MultiPoly },
    #[error("variable count mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("resultant not certified: {0}")]
    Uncertified(String),
}

/// Polynomial in `nvars` variables with rational coefficients; no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), BigRational::one());
        p
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[BigRational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn linear_int(coeffs: &[i64]) -> Self {
        Self::linear(&coeffs.iter().map(|&c| rat(c)).collect::<Vec<_>>())
    }

    pub fn from_terms<I>(nvars: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    /// Build from `(coefficient, exponents)` pairs with integer coefficients.
    pub fn from_int_terms(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            nvars,
            terms.iter().map(|(c, e)| (Monomial(e.to_vec()), rat(*c))),
        )
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Degree counted over a subset of the variables.
    pub fn degree_in_vars(&self, vars: &[usize]) -> u32 {
        self.terms.keys().map(|m| m.degree_in(vars)).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> BigRational {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact division; fails with the remainder when `g` does not divide `self`.
    pub fn exact_divide(&self, g: &MultiPoly) -> Result<MultiPoly, PolyError> {
        let (q, r) = self.divrem(g)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible { remainder: r })
        }
    }

    /// Multivariate division by a single polynomial with respect to graded-lex.
    pub fn divrem(&self, g: &MultiPoly) -> Result<(MultiPoly, MultiPoly), PolyError> {
        if self.nvars != g.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, g.nvars));
        }
        let (lm, lc) = match g.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(PolyError::Domain("division by zero polynomial".into())),
        };
        let mut p = self.clone();
        let mut q = Self::zero(self.nvars);
        let mut r = Self::zero(self.nvars);
        while let Some((m, c)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match lm.quotient_of(&m) {
                Some(qm) => {
                    let qc = &c / &lc;
                    for (gm, gc) in &g.terms {
                        p.add_term(gm.mul(&qm), -(gc * &qc));
                    }
                    q.add_term(qm, qc);
                }
                None => {
                    p.terms.remove(&m);
                    r.add_term(m, c);
                }
            }
        }
        Ok((q, r))
    }

    pub fn divides(&self, f: &MultiPoly) -> bool {
        matches!(f.divrem(self), Ok((_, r)) if r.is_zero())
    }

    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn evaluate_int(&self, point: &[BigInt]) -> BigRational {
        let p: Vec<BigRational> = point.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        self.evaluate(&p)
    }

    /// Substitute `images[i]` for variable `i`; all images share one arity.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars);
        let out_n = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<MultiPoly>> = images.iter().map(|p| vec![MultiPoly::one(out_n), p.clone()]).collect();
        let mut acc = MultiPoly::zero(out_n);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(out_n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][e as usize];
            }
            acc += &t;
        }
        acc
    }

    /// Re-index into a ring with `new_n` variables, variable `i` going to `map[i]`.
    pub fn embed(&self, new_n: usize, map: &[usize]) -> MultiPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = MultiPoly::zero(new_n);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_n];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Sum of the terms whose degree in `vars` equals `i`.
    pub fn homogeneous_component(&self, vars: &[usize], i: u32) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(vars) == i)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut k = m.clone();
            k.0[var] -= 1;
            out.add_term(k, c * rat(e as i64));
        }
        out
    }

    /// Specialise some variables to rational values, keeping the arity.
    pub fn specialize(&self, values: &[(usize, BigRational)]) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut k = m.clone();
            let mut coef = c.clone();
            for (v, x) in values {
                let e = k.0[*v];
                if e > 0 {
                    coef *= num_traits::pow(x.clone(), e as usize);
                    k.0[*v] = 0;
                }
            }
            out.add_term(k, coef);
        }
        out
    }

    /// `(content, primitive)` with `self = content * primitive`, the primitive
    /// part having coprime integer coefficients and positive leading coefficient.
    pub fn content_primitive(&self) -> (BigRational, MultiPoly) {
        if self.is_zero() {
            return (BigRational::zero(), self.clone());
        }
        let c = rational_content(self.terms.values());
        let lead_neg = self.leading_term().map(|(_, v)| v.is_negative()).unwrap_or(false);
        let c = if lead_neg { -c } else { c };
        let inv = c.recip();
        (c, self.scale(&inv))
    }

    pub fn primitive(&self) -> MultiPoly {
        self.content_primitive().1
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Integer coefficients; panics when a coefficient is not integral.
    pub fn integer_terms(&self) -> Vec<(Monomial, BigInt)> {
        self.terms
            .iter()
            .map(|(m, c)| {
                assert!(c.is_integer(), "non-integral coefficient");
                (m.clone(), c.to_integer())
            })
            .collect()
    }

    /// Largest absolute value of the primitive integer coefficients.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.primitive()
            .terms
            .values()
            .map(|c| c.to_integer().abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn to_text(&self, names: &[String]) -> String {
        text::format_poly(self, names)
    }
}

/// Positive rational `c` with `values / c` coprime integers.
pub(crate) fn rational_content<'a, I>(values: I) -> BigRational
where
    I: IntoIterator<Item = &'a BigRational>,
{
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for v in values {
        g = g.gcd(v.numer());
        l = l.lcm(v.denom());
    }
    if g.is_zero() {
        return BigRational::one();
    }
    BigRational::new(g, l)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_names(self.nvars)))
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in add");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: &MultiPoly) {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in add");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in sub");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in mul");
        let mut out = MultiPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn arithmetic_basics() {
        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &x(2, 1);
        let p = &a * &b;
        let expect = &x(2, 0).pow(2) - &x(2, 1).pow(2);
        assert_eq!(p, expect);
        assert_eq!(p.exact_divide(&a).unwrap(), b);
        assert!(p.exact_divide(&x(2, 0)).is_err());
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let a = &x(3, 0) - &x(3, 0);
        assert!(a.is_zero());
        assert_eq!(a.len(), 0);
    }

    #[test]
    fn content_examples() {
        let p = &x(2, 0).scale(&BigRational::new(1.into(), 2.into()))
            + &x(2, 1).scale(&BigRational::new(1.into(), 3.into()));
        let (c, q) = p.content_primitive();
        assert_eq!(c, BigRational::new(1.into(), 6.into()));
        assert_eq!(q, &x(2, 0).scale(&rat(3)) + &x(2, 1).scale(&rat(2)));
        let (c, q) = (-&x(2, 0)).content_primitive();
        assert_eq!(c, rat(-1));
        assert_eq!(q, x(2, 0));
    }

    #[test]
    fn compose_and_components() {
        // f = x0^2 + x1, substitute x0 -> y0 + y1, x1 -> y0*y1
        let f = &x(2, 0).pow(2) + &x(2, 1);
        let g = f.compose(&[&x(2, 0) + &x(2, 1), &x(2, 0) * &x(2, 1)]);
        let expect = &(&x(2, 0).pow(2) + &x(2, 1).pow(2)) + &(&x(2, 0) * &x(2, 1)).scale(&rat(3));
        assert_eq!(g, expect);
        let c = g.homogeneous_component(&[0], 1);
        assert_eq!(c, (&x(2, 0) * &x(2, 1)).scale(&rat(3)));
    }

    #[test]
    fn leading_term_is_grlex_max() {
        let f = &(&x(3, 1).pow(2) + &x(3, 0)) + &(&x(3, 0) * &x(3, 2));
        let (m, _) = f.leading_term().unwrap();
        assert_eq!(m.0, vec![1, 0, 1]);
    }
}
