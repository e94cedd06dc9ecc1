//! Cayley forms in Plücker coordinates: lines in P^3, hypersurfaces, plane
//! curves in P^3, and the coordinate-change laws for `F_H` and `T_a`.
//!
//! Plücker variables are ordered `p01, p02, p03, p12, p13, p23`, and a line cut
//! out by hyperplanes `u, v` has `p_ij = u_i v_j - u_j v_i`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::poly::{macaulay_resultant, monomials_of_degree, BiForm, Monomial, MultiPoly, PolyError};

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
pub const PLUCKER_NAMES: [&str; 6] = ["p01", "p02", "p03", "p12", "p13", "p23"];
/// Plücker variables whose index pair contains 0.
pub const S0_VARS: [usize; 3] = [0, 1, 2];
/// Plücker variables whose index pair contains 3.
pub const S3_VARS: [usize; 3] = [2, 4, 5];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CayleyError {
    #[error("linear forms are dependent")]
    DependentForms,
    #[error("expected {0}")]
    Domain(String),
    #[error("degenerate cycle: the plane divides the curve equation")]
    DegenerateCycle,
    #[error("biform is not frame-invariant")]
    NotFrameInvariant,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub fn plucker_names() -> Vec<String> {
    PLUCKER_NAMES.iter().map(|s| s.to_string()).collect()
}

pub fn pair_index(i: usize, j: usize) -> usize {
    PAIRS.iter().position(|&p| p == (i.min(j), i.max(j))).expect("valid pair")
}

/// `G = p01 p23 - p02 p13 + p03 p12`.
pub fn grassmann_relation() -> MultiPoly {
    MultiPoly::from_int_terms(6, &[(1, &[1, 0, 0, 0, 0, 1]), (-1, &[0, 1, 0, 0, 1, 0]), (1, &[0, 0, 1, 1, 0, 0])])
}

/// Replace every `p01 p23` by `p02 p13 - p03 p12`. Extra variables beyond the
/// six Plücker ones are carried along as coefficients.
pub fn reduce_mod_grassmann(f: &MultiPoly) -> MultiPoly {
    let n = f.nvars();
    let mut repl = MultiPoly::zero(n);
    let mut e = vec![0u32; n];
    e[1] = 1;
    e[4] = 1;
    repl.add_term(Monomial(e.clone()), BigRational::one());
    let mut e2 = vec![0u32; n];
    e2[2] = 1;
    e2[3] = 1;
    repl.add_term(Monomial(e2), -BigRational::one());
    let mut powers = vec![MultiPoly::one(n)];
    let mut out = MultiPoly::zero(n);
    for (m, c) in f.terms() {
        let k = m.0[0].min(m.0[5]);
        if k == 0 {
            out.add_term(m.clone(), c.clone());
            continue;
        }
        while powers.len() <= k as usize {
            let next = powers.last().unwrap() * &repl;
            powers.push(next);
        }
        let mut rest = m.0.clone();
        rest[0] -= k;
        rest[5] -= k;
        out += &powers[k as usize].mul_monomial(&Monomial(rest), c);
    }
    out
}

/// Homogeneous form in the six Plücker variables, reduced modulo `G`, with
/// primitive integer coefficients and positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PluckerForm {
    #[serde(serialize_with = "ser_plucker")]
    pub poly: MultiPoly,
}

fn ser_plucker<S: serde::Serializer>(p: &MultiPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_text(&plucker_names()))
}

impl PluckerForm {
    pub fn canonical(f: &MultiPoly) -> Result<Self, CayleyError> {
        if f.nvars() != 6 {
            return Err(CayleyError::Domain("a form in six Plücker variables".into()));
        }
        let r = reduce_mod_grassmann(f);
        if r.is_zero() {
            return Err(CayleyError::Domain("a form not divisible by G".into()));
        }
        if !r.is_homogeneous() {
            return Err(CayleyError::Domain("a homogeneous form".into()));
        }
        Ok(PluckerForm { poly: r.primitive() })
    }

    pub fn degree(&self) -> u32 {
        self.poly.total_degree().unwrap_or(0)
    }

    pub fn evaluate(&self, p: &[BigInt; 6]) -> BigRational {
        self.poly.evaluate_int(p)
    }

    pub fn to_text(&self) -> String {
        self.poly.to_text(&plucker_names())
    }
}

impl std::fmt::Display for PluckerForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Line `V(u, v)` in P^3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineP3 {
    #[serde(serialize_with = "crate::report::ser_bigints")]
    pub u: Vec<BigInt>,
    #[serde(serialize_with = "crate::report::ser_bigints")]
    pub v: Vec<BigInt>,
    #[serde(serialize_with = "crate::report::ser_bigints")]
    pub plucker: Vec<BigInt>,
}

fn minors(u: &[BigInt], v: &[BigInt]) -> [BigInt; 6] {
    PAIRS.map(|(i, j)| &u[i] * &v[j] - &u[j] * &v[i])
}

fn primitive_vec(v: &[BigInt]) -> Vec<BigInt> {
    let r: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    linalg::primitive_integer_vector(&r)
}

/// Primitive Plücker coordinates of `V(u, v)`, first nonzero entry positive.
pub fn plucker_of_line(u: &[BigInt], v: &[BigInt]) -> Result<[BigInt; 6], CayleyError> {
    if u.len() != 4 || v.len() != 4 {
        return Err(CayleyError::Domain("two linear forms in four variables".into()));
    }
    let m = minors(u, v);
    if m.iter().all(|x| x.is_zero()) {
        return Err(CayleyError::DependentForms);
    }
    let p = primitive_vec(&m);
    Ok(std::array::from_fn(|i| p[i].clone()))
}

fn linear_coeffs(f: &MultiPoly) -> Result<Vec<BigInt>, CayleyError> {
    if f.nvars() != 4 || f.total_degree() != Some(1) || !f.is_homogeneous() {
        return Err(CayleyError::Domain("a linear form in T0..T3".into()));
    }
    let f = f.primitive();
    Ok((0..4).map(|i| f.coeff(&Monomial::var(4, i)).to_integer()).collect())
}

impl LineP3 {
    pub fn new(u: &[i64], v: &[i64]) -> Result<Self, CayleyError> {
        let u: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_rows(u, v)
    }

    pub fn from_rows(u: Vec<BigInt>, v: Vec<BigInt>) -> Result<Self, CayleyError> {
        let p = plucker_of_line(&u, &v)?;
        Ok(LineP3 { u, v, plucker: p.to_vec() })
    }

    pub fn from_forms(u: &MultiPoly, v: &MultiPoly) -> Result<Self, CayleyError> {
        Self::from_rows(linear_coeffs(u)?, linear_coeffs(v)?)
    }

    pub fn forms(&self) -> (MultiPoly, MultiPoly) {
        let f = |c: &[BigInt]| MultiPoly::linear(&c.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>());
        (f(&self.u), f(&self.v))
    }

    pub fn plucker_array(&self) -> [BigInt; 6] {
        std::array::from_fn(|i| self.plucker[i].clone())
    }
}

/// Coefficients of the incidence pairing `<pL, p>` (expansion of the 4x4 determinant).
fn incidence_coeffs(pl: &[BigInt]) -> [BigInt; 6] {
    [pl[5].clone(), -&pl[4], pl[3].clone(), pl[2].clone(), -&pl[1], pl[0].clone()]
}

/// Linear form vanishing exactly on lines meeting `line`.
pub fn incidence_form(line: &LineP3) -> PluckerForm {
    let c = incidence_coeffs(&line.plucker);
    let terms: Vec<(BigRational, Monomial)> =
        (0..6).map(|i| (BigRational::from_integer(c[i].clone()), Monomial::var(6, i))).collect();
    let f = MultiPoly::from_terms(6, terms.into_iter().map(|(c, m)| (m, c)));
    PluckerForm::canonical(&f).expect("incidence form is nonzero and linear")
}

/// `det[u_L; v_L; u_M; v_M]` computed from Plücker coordinates.
pub fn incidence_pairing(l: &[BigInt], m: &[BigInt]) -> BigInt {
    incidence_coeffs(l).iter().zip(m).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Names of the top-wedge variables for `P^n`: `w_i` omits index `i`.
pub fn wedge_names(n: usize) -> Vec<String> {
    (0..=n)
        .map(|i| {
            let idx: String = (0..=n).filter(|&j| j != i).map(|j| j.to_string()).collect();
            format!("s{idx}")
        })
        .collect()
}

/// Substitute `T_i -> (-1)^i w_i`, primitive and sign-normalised.
pub fn cayley_hypersurface(f: &MultiPoly) -> Result<MultiPoly, CayleyError> {
    if f.is_zero() || !f.is_homogeneous() {
        return Err(CayleyError::Domain("a nonzero homogeneous form".into()));
    }
    let n = f.nvars();
    let images: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let v = MultiPoly::var(n, i);
            if i % 2 == 1 {
                -&v
            } else {
                v
            }
        })
        .collect();
    Ok(f.compose(&images).primitive())
}

/// Images of `T_m` under the intersection of the line with the plane `l`:
/// `x_m = (-1)^m (l_c0 p_c1c2 - l_c1 p_c0c2 + l_c2 p_c0c1)`. `l` has its four
/// coefficients as polynomials in `np` parameters; the output ring is the six
/// Plücker variables followed by the parameters.
fn intersection_images(l: &[MultiPoly], np: usize) -> Vec<MultiPoly> {
    let n = 6 + np;
    let lift: Vec<usize> = (6..n).collect();
    let lc: Vec<MultiPoly> = l.iter().map(|c| c.embed(n, &lift)).collect();
    let pv = |i: usize, j: usize| MultiPoly::var(n, pair_index(i, j));
    (0..4)
        .map(|m| {
            let c: Vec<usize> = (0..4).filter(|&j| j != m).collect();
            let x = &(&(&lc[c[0]] * &pv(c[1], c[2])) - &(&lc[c[1]] * &pv(c[0], c[2]))) + &(&lc[c[2]] * &pv(c[0], c[1]));
            if m % 2 == 1 {
                -&x
            } else {
                x
            }
        })
        .collect()
}

/// Split a form in `T0..T3` plus `np` parameters into its `T`-linear coefficients.
fn linear_parts(l: &MultiPoly) -> Result<Vec<MultiPoly>, CayleyError> {
    let np = l.nvars() - 4;
    let mut parts = vec![MultiPoly::zero(np); 4];
    for (m, c) in l.terms() {
        let tdeg = m.degree_in(&[0, 1, 2, 3]);
        if tdeg != 1 {
            return Err(CayleyError::Domain("a plane form linear in T0..T3".into()));
        }
        let i = (0..4).find(|&i| m.0[i] == 1).unwrap();
        parts[i].add_term(Monomial(m.0[4..].to_vec()), c.clone());
    }
    Ok(parts)
}

/// `Q(x(p))` reduced modulo `G`, unnormalised. `q` and `l` live in `T0..T3`
/// followed by `np` parameters; the result lives in the six Plücker variables
/// followed by the same parameters.
pub fn plane_curve_form_raw(q: &MultiPoly, l: &MultiPoly) -> Result<MultiPoly, CayleyError> {
    if q.nvars() != l.nvars() || q.nvars() < 4 {
        return Err(CayleyError::Domain("curve and plane in the same ring over T0..T3".into()));
    }
    let np = q.nvars() - 4;
    let lp = linear_parts(l)?;
    let mut images = intersection_images(&lp, np);
    for k in 0..np {
        images.push(MultiPoly::var(6 + np, 6 + k));
    }
    Ok(reduce_mod_grassmann(&q.compose(&images)))
}

fn check_curve(q: &MultiPoly, l: &MultiPoly) -> Result<(), CayleyError> {
    if q.nvars() != 4 || q.is_zero() || !q.is_homogeneous() || q.total_degree() == Some(0) {
        return Err(CayleyError::Domain("a nonconstant form in T0..T3".into()));
    }
    linear_coeffs(l)?;
    if l.divides(q) {
        return Err(CayleyError::DegenerateCycle);
    }
    Ok(())
}

/// Cayley form of the plane curve `V(l, Q)` in P^3.
pub fn cayley_plane_curve(q: &MultiPoly, l: &MultiPoly) -> Result<PluckerForm, CayleyError> {
    check_curve(q, l)?;
    PluckerForm::canonical(&plane_curve_form_raw(q, l)?)
}

const U: [usize; 4] = [0, 1, 2, 3];
const V: [usize; 4] = [4, 5, 6, 7];

/// Descend a `(k, k)` biform in `u, v` to the Grassmannian: the unique `P`
/// with no monomial divisible by `p01 p23` and `P(p(u, v)) = b(u, v)`.
pub fn rewrite_biform_to_plucker(b: &BiForm) -> Result<PluckerForm, CayleyError> {
    let k = b.k;
    let basis: Vec<Monomial> = monomials_of_degree(6, k).into_iter().filter(|m| m.0[0] == 0 || m.0[5] == 0).collect();
    let pimg: Vec<MultiPoly> = PAIRS
        .iter()
        .map(|&(i, j)| {
            let mut p = MultiPoly::zero(8);
            let mono = |a: usize, c: usize| {
                let mut e = vec![0u32; 8];
                e[U[a]] = 1;
                e[V[c]] = 1;
                Monomial(e)
            };
            p.add_term(mono(i, j), BigRational::one());
            p.add_term(mono(j, i), -BigRational::one());
            p
        })
        .collect();
    let cols: Vec<MultiPoly> = basis
        .iter()
        .map(|m| MultiPoly::from_terms(6, [(m.clone(), BigRational::one())]).compose(&pimg))
        .collect();
    let mut rows: Vec<Monomial> = cols.iter().flat_map(|c| c.terms().map(|(m, _)| m.clone())).collect();
    rows.extend(b.poly.terms().map(|(m, _)| m.clone()));
    rows.sort();
    rows.dedup();
    let a: Vec<Vec<BigRational>> = rows.iter().map(|r| cols.iter().map(|c| c.coeff(r)).collect()).collect();
    let rhs: Vec<BigRational> = rows.iter().map(|r| b.poly.coeff(r)).collect();
    let x = linalg::solve_rational(&a, &rhs).ok_or(CayleyError::NotFrameInvariant)?;
    let f = MultiPoly::from_terms(6, basis.into_iter().zip(x).filter(|(_, c)| !c.is_zero()));
    PluckerForm::canonical(&f)
}

/// Symbolic check `b(a u + c v, b u + d v) = (ad - bc)^k b(u, v)`.
pub fn frame_invariant(b: &BiForm) -> bool {
    // ring: u0..u3, v0..v3, a, b, c, d
    let n = 12;
    let var = |i| MultiPoly::var(n, i);
    let images: Vec<MultiPoly> = (0..4)
        .map(|i| &(&var(8) * &var(U[i])) + &(&var(10) * &var(V[i])))
        .chain((0..4).map(|i| &(&var(9) * &var(U[i])) + &(&var(11) * &var(V[i]))))
        .collect();
    let lhs = b.poly.compose(&images);
    let det = &(&var(8) * &var(11)) - &(&var(9) * &var(10));
    let rhs = &det.pow(b.k) * &b.poly.embed(n, &(0..8).collect::<Vec<_>>());
    lhs == rhs
}

/// Oracle route: `Res(Q, l, h1, h2)` with symbolic hyperplanes `h1 = u.T`,
/// `h2 = v.T`, rewritten in Plücker coordinates.
pub fn cayley_plane_curve_resultant(q: &MultiPoly, l: &MultiPoly) -> Result<PluckerForm, CayleyError> {
    check_curve(q, l)?;
    let n = 12;
    let lift: Vec<usize> = (0..4).collect();
    let h = |off: usize| {
        let mut p = MultiPoly::zero(n);
        for i in 0..4 {
            let mut e = vec![0u32; n];
            e[i] = 1;
            e[4 + off + i] = 1;
            p.add_term(Monomial(e), BigRational::one());
        }
        p
    };
    let forms = [q.embed(n, &lift), l.embed(n, &lift), h(0), h(4)];
    let res = macaulay_resultant(&forms)?;
    let b = BiForm::new(res)?;
    rewrite_biform_to_plucker(&b)
}

/// `F_H` law: each monomial is scaled by `H^i`, `i` its degree in `p03, p13, p23`.
pub fn transform_fh(psi: &PluckerForm, h: &BigRational) -> Result<PluckerForm, CayleyError> {
    if h.is_zero() {
        return Err(CayleyError::Domain("nonzero H".into()));
    }
    let f = MultiPoly::from_terms(
        6,
        psi.poly.terms().map(|(m, c)| (m.clone(), c * num_traits::pow(h.clone(), m.degree_in(&S3_VARS) as usize))),
    );
    PluckerForm::canonical(&f)
}

/// Apply `T3 -> T3 / H` to a form in `T0..T3` (the curve moves by `x3 -> H x3`).
pub fn apply_fh_to_form(f: &MultiPoly, h: &BigRational) -> Result<MultiPoly, CayleyError> {
    if h.is_zero() {
        return Err(CayleyError::Domain("nonzero H".into()));
    }
    let inv = h.recip();
    Ok(MultiPoly::from_terms(
        f.nvars(),
        f.terms().map(|(m, c)| (m.clone(), c * num_traits::pow(inv.clone(), m.0[3] as usize))),
    ))
}

/// `T_a`: `f(T0, T1 - a1 T0, T2 - a2 T0, T3 - a3 T0)`.
pub fn transform_ta(f: &MultiPoly, a: &[BigInt; 3]) -> Result<MultiPoly, CayleyError> {
    if f.nvars() != 4 {
        return Err(CayleyError::Domain("a form in T0..T3".into()));
    }
    let images: Vec<MultiPoly> = (0..4)
        .map(|i| {
            let mut p = MultiPoly::var(4, i);
            if i > 0 {
                p.add_term(Monomial::var(4, 0), -BigRational::from_integer(a[i - 1].clone()));
            }
            p
        })
        .collect();
    Ok(f.compose(&images))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    /// Degree in the Plücker variables involving index 0.
    S0,
    /// Degree in the Plücker variables involving index 3.
    S3,
}

impl Grading {
    pub fn vars(&self) -> &'static [usize] {
        match self {
            Grading::S0 => &S0_VARS,
            Grading::S3 => &S3_VARS,
        }
    }
}

/// Parts `psi_0..psi_delta` of `psi` by degree in the graded variables.
pub fn cayley_degree_parts(psi: &MultiPoly, grading: Grading) -> Vec<MultiPoly> {
    let d = psi.total_degree().unwrap_or(0);
    (0..=d).map(|i| psi.homogeneous_component(grading.vars(), i)).collect()
}

/// Whether the `S0`-top parts (degree `delta`) agree up to a nonzero scalar.
pub fn top_part_check(psi: &MultiPoly, psi2: &MultiPoly, delta: u32) -> bool {
    let a = psi.homogeneous_component(&S0_VARS, delta);
    let b = psi2.homogeneous_component(&S0_VARS, delta);
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    a.primitive() == b.primitive()
}

/// `l(x) = Q(x) = 0`.
pub fn on_curve(q: &MultiPoly, l: &MultiPoly, x: &[BigInt]) -> bool {
    l.evaluate_int(x).is_zero() && q.evaluate_int(x).is_zero()
}

/// The line spanned by the points `x` and `y`, as a pair of hyperplanes.
pub fn line_through(x: &[BigInt], y: &[BigInt]) -> Result<LineP3, CayleyError> {
    let ker = linalg::kernel(&[x.to_vec(), y.to_vec()], 4);
    if ker.len() != 2 {
        return Err(CayleyError::DependentForms);
    }
    LineP3::from_rows(ker[0].clone(), ker[1].clone())
}

/// `|x|` of an integer vector in the max norm.
pub fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_auto;

    fn p(s: &str) -> MultiPoly {
        parse_poly_auto(s, 4).unwrap()
    }

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn plucker_examples() {
        assert_eq!(plucker_of_line(&b(&[0, 0, 1, 0]), &b(&[0, 0, 0, 1])).unwrap().to_vec(), b(&[0, 0, 0, 0, 0, 1]));
        assert_eq!(plucker_of_line(&b(&[1, 0, 0, 0]), &b(&[0, 1, 0, 0])).unwrap().to_vec(), b(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(plucker_of_line(&b(&[1, 1, 0, 0]), &b(&[0, 0, 1, 0])).unwrap().to_vec(), b(&[0, 1, 0, 1, 0, 0]));
        assert_eq!(plucker_of_line(&b(&[1, 1, 0, 0]), &b(&[2, 2, 0, 0])), Err(CayleyError::DependentForms));
    }

    #[test]
    fn incidence_examples() {
        let l = LineP3::new(&[0, 0, 1, 0], &[0, 0, 0, 1]).unwrap();
        assert_eq!(incidence_form(&l).to_text(), "1 * p01^1");
        let l = LineP3::new(&[1, 0, 0, 0], &[0, 1, 0, 0]).unwrap();
        assert_eq!(incidence_form(&l).to_text(), "1 * p23^1");
        let l = LineP3::new(&[1, 2, -1, 3], &[0, 5, 1, 1]).unwrap();
        assert!(incidence_form(&l).evaluate(&l.plucker_array()).is_zero());
    }

    #[test]
    fn grassmann_reduction() {
        let f = MultiPoly::from_int_terms(6, &[(1, &[1, 0, 0, 0, 0, 1])]);
        let c = PluckerForm::canonical(&f).unwrap();
        assert_eq!(c.to_text(), "1 * p02^1*p13^1 - 1 * p03^1*p12^1");
        assert!(PluckerForm::canonical(&grassmann_relation()).is_err());
    }

    #[test]
    fn hypersurface_examples() {
        assert_eq!(cayley_hypersurface(&p("T0")).unwrap().to_text(&wedge_names(3)), "1 * s123^1");
        assert_eq!(cayley_hypersurface(&p("T0 + T1")).unwrap().to_text(&wedge_names(3)), "1 * s123^1 - 1 * s023^1");
    }

    #[test]
    fn plane_curve_examples() {
        assert_eq!(cayley_plane_curve(&p("T2"), &p("T3")).unwrap().to_text(), "1 * p01^1");
        let q = p("T2^2 - T2*T3 + T3^2");
        let l = p("T0 + T1");
        let a = cayley_plane_curve(&q, &l).unwrap();
        let lifted = &q + &(&p("T0") * &l);
        assert_eq!(a, cayley_plane_curve(&lifted, &l).unwrap());
        assert_eq!(cayley_plane_curve(&p("T3*T0"), &p("T3")), Err(CayleyError::DegenerateCycle));
    }

    #[test]
    fn resultant_route_agrees() {
        for (q, l) in [("T2", "T3"), ("T2^2 - T2*T3 + T3^2", "T0 + T1"), ("T0*T2 - T1^2 + T3^2", "T0 - T1 + 2*T3")] {
            let (q, l) = (p(q), p(l));
            assert_eq!(cayley_plane_curve_resultant(&q, &l).unwrap(), cayley_plane_curve(&q, &l).unwrap());
        }
    }

    #[test]
    fn biform_rewrites() {
        let mut d = MultiPoly::zero(8);
        d.add_term(Monomial(vec![1, 0, 0, 0, 0, 1, 0, 0]), BigRational::one());
        d.add_term(Monomial(vec![0, 1, 0, 0, 1, 0, 0, 0]), -BigRational::one());
        let bf = BiForm::new(d.pow(2)).unwrap();
        assert!(frame_invariant(&bf));
        assert_eq!(rewrite_biform_to_plucker(&bf).unwrap().to_text(), "1 * p01^2");
        let mut e = MultiPoly::zero(8);
        e.add_term(Monomial(vec![0, 0, 1, 0, 0, 0, 0, 1]), BigRational::one());
        e.add_term(Monomial(vec![0, 0, 0, 1, 0, 0, 1, 0]), -BigRational::one());
        let bf = BiForm::new(&d * &e).unwrap();
        assert_eq!(rewrite_biform_to_plucker(&bf).unwrap().to_text(), "1 * p02^1*p13^1 - 1 * p03^1*p12^1");
        let bad = BiForm::new(MultiPoly::from_int_terms(8, &[(1, &[1, 0, 0, 0, 1, 0, 0, 0])])).unwrap();
        assert!(!frame_invariant(&bad));
        assert_eq!(rewrite_biform_to_plucker(&bad), Err(CayleyError::NotFrameInvariant));
    }

    #[test]
    fn fh_law() {
        let f = MultiPoly::from_int_terms(6, &[(1, &[1, 0, 0, 0, 0, 0]), (1, &[0, 0, 0, 0, 0, 1])]);
        let psi = PluckerForm::canonical(&f).unwrap();
        let two = BigRational::from_integer(2.into());
        assert_eq!(transform_fh(&psi, &two).unwrap().to_text(), "1 * p01^1 + 2 * p23^1");
        assert_eq!(transform_fh(&psi, &BigRational::one()).unwrap(), psi);
        let back = transform_fh(&transform_fh(&psi, &two).unwrap(), &two.recip()).unwrap();
        assert_eq!(back, psi);
        assert!(transform_fh(&psi, &BigRational::zero()).is_err());

        let q = p("T0*T2 - T1^2 + T3^2 + T1*T3");
        let l = p("T0 + 2*T1 - T2 + 3*T3");
        let h = BigRational::new(3.into(), 2.into());
        let direct = cayley_plane_curve(&apply_fh_to_form(&q, &h).unwrap(), &apply_fh_to_form(&l, &h).unwrap()).unwrap();
        assert_eq!(direct, transform_fh(&cayley_plane_curve(&q, &l).unwrap(), &h).unwrap());
    }

    #[test]
    fn ta_law() {
        let q = p("T0*T2 - T1^2 + T3^2 + T1*T3");
        let l = p("T0 + 2*T1 - T2 + 3*T3");
        let a = [BigInt::from(1), BigInt::from(0), BigInt::from(0)];
        let psi = plane_curve_form_raw(&q, &l).unwrap();
        let psi2 = plane_curve_form_raw(&transform_ta(&q, &a).unwrap(), &transform_ta(&l, &a).unwrap()).unwrap();
        assert_eq!(psi.homogeneous_component(&S0_VARS, 2), psi2.homogeneous_component(&S0_VARS, 2));
        assert!(top_part_check(&psi, &psi2, 2));
        let zero = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        assert_eq!(transform_ta(&q, &zero).unwrap(), q);
        let b2 = [BigInt::from(-2), BigInt::from(5), BigInt::from(1)];
        let ab = [&a[0] + &b2[0], &a[1] + &b2[1], &a[2] + &b2[2]];
        assert_eq!(transform_ta(&transform_ta(&q, &a).unwrap(), &b2).unwrap(), transform_ta(&q, &ab).unwrap());
    }

    #[test]
    fn degree_parts() {
        let f = MultiPoly::from_int_terms(6, &[(1, &[1, 1, 0, 0, 0, 0])]);
        let parts = cayley_degree_parts(&f, Grading::S0);
        assert!(parts[2] == f && parts[0].is_zero());
        let g = MultiPoly::from_int_terms(6, &[(1, &[0, 0, 0, 2, 0, 0])]);
        assert_eq!(cayley_degree_parts(&g, Grading::S0)[0], g);
    }
}
