//! Empirical determinant method: auxiliary hypersurfaces through point sets
//! of bounded height, searched exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cayley::{self, CayleyError, Grading};
use crate::count::{self, CountError, Variety};
use crate::hilbert::{self, BoundKind, BoundParams};
use crate::linalg;
use crate::poly::{monomials_of_degree, monomials_up_to_degree, Monomial, MultiPoly, PolyError};
use crate::report::{fit_exponent, ExternalConstants};

/// Prime for the rank prefilter (2^61 - 1).
const RANK_PRIME: u64 = 2_305_843_009_213_693_951;

#[derive(Debug, Error)]
pub enum DetError {
    #[error("budget exceeded before an auxiliary form was found; last degree tried {last_degree}")]
    Budget { last_degree: u32 },
    #[error("unsupported variety: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("property violated: {0}")]
    PropertyViolation(String),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Monomials of degree exactly `D` at primitive projective points.
    Projective,
    /// Monomials of degree at most `D` at integral affine points.
    Affine,
}

/// Rows are points, columns monomials in descending graded-lex order. Points
/// are integral, so entries are stored as integers.
#[derive(Clone, Debug, Serialize)]
pub struct EvaluationMatrix {
    pub mode: Mode,
    pub degree: u32,
    #[serde(skip)]
    pub monomials: Vec<Monomial>,
    #[serde(serialize_with = "ser_matrix")]
    pub rows: Vec<Vec<BigInt>>,
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()))
}

impl EvaluationMatrix {
    pub fn ncols(&self) -> usize {
        self.monomials.len()
    }
}

fn columns(nvars: usize, degree: u32, mode: Mode) -> Vec<Monomial> {
    match mode {
        Mode::Projective => monomials_of_degree(nvars, degree),
        Mode::Affine => monomials_up_to_degree(nvars, degree),
    }
}

fn evaluate_on(points: &[Vec<i64>], monomials: &[Monomial]) -> Vec<Vec<BigInt>> {
    let maxe = monomials.iter().flat_map(|m| m.0.iter().copied()).max().unwrap_or(0) as usize;
    points
        .iter()
        .map(|pt| {
            let powers: Vec<Vec<BigInt>> = pt
                .iter()
                .map(|&v| {
                    let mut p = vec![BigInt::one()];
                    for k in 1..=maxe {
                        let next = &p[k - 1] * v;
                        p.push(next);
                    }
                    p
                })
                .collect();
            monomials
                .iter()
                .map(|m| m.0.iter().enumerate().fold(BigInt::one(), |acc, (i, &e)| acc * &powers[i][e as usize]))
                .collect()
        })
        .collect()
}

fn evaluate_mod_p(points: &[Vec<i64>], monomials: &[Monomial], p: u64) -> Vec<Vec<BigInt>> {
    let red = |v: i64| (v as i128).rem_euclid(p as i128) as u64;
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    points
        .iter()
        .map(|pt| {
            monomials
                .iter()
                .map(|m| {
                    let v = m.0.iter().zip(pt).fold(1u64, |acc, (&e, &x)| (0..e).fold(acc, |a, _| mul(a, red(x))));
                    BigInt::from(v)
                })
                .collect()
        })
        .collect()
}

pub fn evaluation_matrix(points: &[Vec<i64>], degree: u32, mode: Mode) -> Result<EvaluationMatrix, DetError> {
    let nvars = points.first().map(|p| p.len()).unwrap_or(0);
    if points.iter().any(|p| p.len() != nvars) {
        return Err(DetError::Precondition("points of equal length".into()));
    }
    let monomials = columns(nvars, degree, mode);
    Ok(EvaluationMatrix { mode, degree, rows: evaluate_on(points, &monomials), monomials })
}

/// Right kernel by fraction-free elimination; every basis vector is checked
/// against `M` exactly.
pub fn exact_kernel(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let k = linalg::kernel(m, ncols);
    for v in &k {
        assert!(linalg::mat_vec(m, v).iter().all(|x| x.is_zero()), "kernel vector fails M k = 0");
    }
    k
}

/// Groebner data of the ideal of `X` in graded-lex order.
#[derive(Clone, Debug)]
struct IdealBasis {
    gens: Vec<MultiPoly>,
    leads: Vec<Monomial>,
}

impl IdealBasis {
    fn new(x: &Variety) -> Result<Self, DetError> {
        let gens = match x.forms.as_slice() {
            [f] => vec![f.clone()],
            [l, q] if l.total_degree() == Some(1) && l.is_homogeneous() => {
                let (_, r) = q.divrem(l)?;
                if r.is_zero() {
                    return Err(DetError::Unsupported("the plane lies in the second form".into()));
                }
                // The leading variable of l is absent from r, so the leading
                // terms are coprime and {l, r} is a Groebner basis.
                vec![l.clone(), r]
            }
            _ => return Err(DetError::Unsupported("a hypersurface or a curve in a plane".into())),
        };
        let leads = gens.iter().map(|g| g.leading_term().expect("nonzero generator").0.clone()).collect();
        Ok(IdealBasis { gens, leads })
    }

    fn is_standard(&self, m: &Monomial) -> bool {
        !self.leads.iter().any(|l| l.divides(m))
    }

    /// Normal form modulo the basis; zero exactly on ideal members.
    fn reduce(&self, g: &MultiPoly) -> Result<MultiPoly, DetError> {
        let mut r = g.clone();
        for b in &self.gens {
            r = r.divrem(b)?.1;
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxCertificate {
    pub vanishes_on_all_points: bool,
    pub not_containing_x: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxiliaryForm {
    pub degree: u32,
    #[serde(serialize_with = "ser_poly")]
    pub form: MultiPoly,
    pub columns: usize,
    pub kernel_dim: usize,
    pub certificate: AuxCertificate,
}

fn ser_poly<S: serde::Serializer>(f: &MultiPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_text(&crate::poly::default_names(f.nvars())))
}

fn form_from(monomials: &[Monomial], coeffs: &[BigInt], nvars: usize) -> MultiPoly {
    MultiPoly::from_terms(nvars, monomials.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), BigRational::from_integer(c.clone()))))
}

fn certify(x: &IdealBasis, form: &MultiPoly, points: &[Vec<i64>]) -> Result<AuxCertificate, DetError> {
    let vanishes_on_all_points = points.iter().all(|p| {
        let pb: Vec<BigInt> = p.iter().map(|&v| BigInt::from(v)).collect();
        form.evaluate_int(&pb).is_zero()
    });
    let not_containing_x = !x.reduce(form)?.is_zero();
    Ok(AuxCertificate { vanishes_on_all_points, not_containing_x })
}

fn first_certified(basis: &IdealBasis, monomials: &[Monomial], kernel: &[Vec<BigInt>], nvars: usize, degree: u32, points: &[Vec<i64>]) -> Result<Option<AuxiliaryForm>, DetError> {
    for v in kernel {
        let form = form_from(monomials, v, nvars).primitive();
        let certificate = certify(basis, &form, points)?;
        assert!(certificate.vanishes_on_all_points, "kernel form must vanish on the points");
        if certificate.not_containing_x {
            return Ok(Some(AuxiliaryForm { degree, form, columns: monomials.len(), kernel_dim: kernel.len(), certificate }));
        }
    }
    Ok(None)
}

/// Degree-`D` form through `points` not vanishing on `X`, searched in the span
/// of standard monomials modulo the ideal of `X`.
pub fn auxiliary_form(x: &Variety, points: &[Vec<i64>], degree: u32, mode: Mode) -> Result<Option<AuxiliaryForm>, DetError> {
    let basis = IdealBasis::new(x)?;
    let monomials: Vec<Monomial> = columns(x.nvars, degree, mode).into_iter().filter(|m| basis.is_standard(m)).collect();
    if monomials.is_empty() {
        return Ok(None);
    }
    let m = evaluate_on(points, &monomials);
    let kernel = one_kernel_vector(&m, monomials.len());
    let found = first_certified(&basis, &monomials, &kernel, x.nvars, degree, points)?;
    if let Some(f) = &found {
        assert!(points.len() >= monomials.len() || f.kernel_dim > 0);
    } else {
        assert!(points.len() >= monomials.len(), "dimension count forces a kernel");
    }
    Ok(found)
}

/// Kernel of the full evaluation matrix; used as an oracle on small inputs.
pub fn auxiliary_form_full(x: &Variety, points: &[Vec<i64>], degree: u32, mode: Mode) -> Result<Option<AuxiliaryForm>, DetError> {
    let basis = IdealBasis::new(x)?;
    let monomials = columns(x.nvars, degree, mode);
    let m = evaluate_on(points, &monomials);
    let kernel = exact_kernel(&m, monomials.len());
    first_certified(&basis, &monomials, &kernel, x.nvars, degree, points)
}

/// A kernel vector from the rows and columns selected mod p, verified on
/// the whole matrix; falls back to the full kernel when the shortcut fails.
fn one_kernel_vector(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let pivots = linalg::pivots_mod_p(m, ncols, RANK_PRIME);
    if pivots.len() == ncols {
        return vec![];
    }
    let free = (0..ncols).find(|c| !pivots.contains(c)).unwrap();
    let mut cols: Vec<usize> = pivots.iter().copied().filter(|&c| c < free).collect();
    cols.push(free);
    let transposed: Vec<Vec<BigInt>> = cols.iter().map(|&c| m.iter().map(|r| r[c].clone()).collect()).collect();
    let rows = linalg::pivots_mod_p(&transposed, m.len(), RANK_PRIME);
    let sub: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&c| m[i][c].clone()).collect()).collect();
    let k = linalg::kernel(&sub, cols.len());
    if k.len() == 1 {
        let mut v = vec![BigInt::zero(); ncols];
        for (j, &c) in cols.iter().enumerate() {
            v[c] = k[0][j].clone();
        }
        if linalg::mat_vec(m, &v).iter().all(|x| x.is_zero()) {
            return vec![v];
        }
    }
    exact_kernel(m, ncols)
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub bound: u64,
    pub points: u64,
    /// Least degree of an auxiliary form; an empirical witness degree.
    pub omega: u32,
    pub form: AuxiliaryForm,
    /// `(d + 1) / (d delta^{1/d})`, the exponent of the global determinant bound.
    pub shape_exponent: f64,
    pub log_bound: Option<f64>,
    pub within_bound: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct OmegaOptions {
    pub budget: u64,
    pub max_degree: u32,
    pub constants: ExternalConstants,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        OmegaOptions { budget: count::DEFAULT_BUDGET, max_degree: 400, constants: ExternalConstants::default() }
    }
}

/// Least `D` admitting an auxiliary form through `S(X; B)`, by linear scan.
pub fn minimal_omega(x: &Variety, bound: u64, opts: &OmegaOptions) -> Result<OmegaReport, DetError> {
    let pts = count::enumerate_projective(x, bound, opts.budget)?.points;
    let basis = IdealBasis::new(x)?;
    for degree in 1..=opts.max_degree {
        let monomials: Vec<Monomial> = columns(x.nvars, degree, Mode::Projective).into_iter().filter(|m| basis.is_standard(m)).collect();
        if monomials.len() <= pts.len() {
            // Full column rank mod p implies full column rank over Q.
            let r = linalg::rank_mod_p(&evaluate_mod_p(&pts, &monomials, RANK_PRIME), monomials.len(), RANK_PRIME);
            if r == monomials.len() {
                continue;
            }
        }
        if let Some(form) = auxiliary_form(x, &pts, degree, Mode::Projective)? {
            let d = x.projective_dim().max(1) as u32;
            let delta = x.degree();
            let shape_exponent = (d + 1) as f64 / (d as f64 * (delta as f64).powf(1.0 / d as f64));
            let kind = if d == 1 { BoundKind::ProjectiveCurve } else { BoundKind::ProjectiveSurface };
            let n = (x.nvars - 1) as u32;
            let log_bound = hilbert::bound_evaluator(kind, BoundParams { n, d, delta, height: bound as f64 }, &opts.constants).ok().map(|v| v.log_value);
            return Ok(OmegaReport {
                bound,
                points: pts.len() as u64,
                omega: degree,
                within_bound: log_bound.map(|lb| (degree as f64).ln() <= lb),
                form,
                shape_exponent,
                log_bound,
            });
        }
    }
    Err(DetError::Budget { last_degree: opts.max_degree })
}

/// Exponent of `omega` against `B` over a list of heights.
pub fn omega_growth(x: &Variety, bounds: &[u64], opts: &OmegaOptions) -> Result<(Vec<OmegaReport>, Option<f64>), DetError> {
    let reps = bounds.iter().map(|&b| minimal_omega(x, b, opts)).collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<f64> = reps.iter().map(|r| r.bound as f64).collect();
    let ys: Vec<f64> = reps.iter().map(|r| r.omega as f64).collect();
    Ok((reps, fit_exponent(&xs, &ys).map(|f| f.0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationResult {
    pub a: [i64; 3],
    pub box_radius: u32,
    pub tried: usize,
    /// Part of the translated Cayley form free of `p01, p02, p03`.
    pub constant_part: String,
    pub top_part_preserved: bool,
}

fn box_vectors(r: i64) -> Vec<[i64; 3]> {
    let mut v = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                v.push([a, b, c]);
            }
        }
    }
    v.sort_by_key(|x| (x.iter().map(|c| c.abs()).max().unwrap(), x.map(|c| c.abs()), *x));
    v
}

/// Integral `a` with `max |a_i| <= delta` such that the translated plane
/// curve has a nonzero constant part in the `p0j` grading.
pub fn translation_search(q: &MultiPoly, l: &MultiPoly, delta: u32) -> Result<TranslationResult, DetError> {
    let psi = cayley::cayley_plane_curve(q, l)?;
    let deg = psi.degree();
    let parts = cayley::cayley_degree_parts(&psi.poly, Grading::S0);
    if parts.get(deg as usize).is_none_or(|p| p.is_zero()) {
        return Err(DetError::Precondition("nonzero top part of the Cayley form".into()));
    }
    let boxed = box_vectors(delta as i64);
    for (tried, a) in boxed.iter().enumerate() {
        let ab = a.map(BigInt::from);
        let q2 = cayley::transform_ta(q, &ab)?;
        let l2 = cayley::transform_ta(l, &ab)?;
        let psi2 = cayley::cayley_plane_curve(&q2, &l2)?;
        let c = cayley::cayley_degree_parts(&psi2.poly, Grading::S0).swap_remove(0);
        if !c.is_zero() {
            return Ok(TranslationResult {
                a: *a,
                box_radius: delta,
                tried: tried + 1,
                constant_part: c.to_text(&cayley::plucker_names()),
                top_part_preserved: cayley::top_part_check(&psi.poly, &psi2.poly, deg),
            });
        }
    }
    Err(DetError::PropertyViolation(format!("no translation with max |a_i| <= {delta} clears the constant part")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_auto;

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly_auto(s, n).unwrap()
    }

    fn conic() -> Variety {
        Variety::hypersurface(&p("x0*x2 - x1^2", 3)).unwrap()
    }

    fn line() -> Variety {
        Variety::hypersurface(&p("x2", 3)).unwrap()
    }

    #[test]
    fn evaluation_matrix_shapes() {
        let m = evaluation_matrix(&[vec![1, 2]], 1, Mode::Projective).unwrap();
        assert_eq!((m.rows.len(), m.ncols()), (1, 2));
        let pts = count::enumerate_projective(&conic(), 2, 1000).unwrap().points;
        let m = evaluation_matrix(&pts, 2, Mode::Projective).unwrap();
        assert_eq!((m.rows.len(), m.ncols()), (4, 6));
        assert_eq!(linalg::rank(&m.rows, 6), 4);
        assert_eq!(exact_kernel(&m.rows, 6).len(), 2);
        let mut dup = pts.clone();
        dup.push(pts[0].clone());
        let m2 = evaluation_matrix(&dup, 2, Mode::Projective).unwrap();
        assert_eq!(linalg::rank(&m2.rows, 6), 4);
        assert!(exact_kernel(&[vec![BigInt::one(), BigInt::zero()], vec![BigInt::zero(), BigInt::one()]], 2).is_empty());
    }

    #[test]
    fn kernel_of_low_rank_product() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a: Vec<Vec<i64>> = (0..10).map(|_| (0..7).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let b: Vec<Vec<i64>> = (0..7).map(|_| (0..10).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m: Vec<Vec<BigInt>> = (0..10).map(|i| (0..10).map(|j| BigInt::from((0..7).map(|k| a[i][k] * b[k][j]).sum::<i64>())).collect()).collect();
        assert_eq!(exact_kernel(&m, 10).len(), 3);
    }

    #[test]
    fn auxiliary_form_examples() {
        let pts = count::enumerate_projective(&conic(), 2, 1000).unwrap().points;
        let f = auxiliary_form(&conic(), &pts, 2, Mode::Projective).unwrap().unwrap();
        assert!(f.certificate.vanishes_on_all_points && f.certificate.not_containing_x);
        assert!(auxiliary_form_full(&conic(), &pts, 2, Mode::Projective).unwrap().is_some());
        assert!(!p("x0*x2 - x1^2", 3).divides(&f.form));

        let lp = count::enumerate_projective(&line(), 1, 1000).unwrap().points;
        assert_eq!(lp.len(), 4);
        assert!(auxiliary_form(&line(), &lp, 2, Mode::Projective).unwrap().is_none());
        assert!(auxiliary_form_full(&line(), &lp, 2, Mode::Projective).unwrap().is_none());

        let any = auxiliary_form(&line(), &[], 1, Mode::Projective).unwrap().unwrap();
        assert_eq!(any.form.total_degree(), Some(1));
    }

    #[test]
    fn reduced_and_full_kernels_agree() {
        let cubic = Variety::hypersurface(&p("x0^3 + x1^3 + x2^3 + x3^3", 4)).unwrap();
        let pts = count::enumerate_projective(&cubic, 2, 10_000).unwrap().points;
        for d in 1..=4 {
            let a = auxiliary_form(&cubic, &pts, d, Mode::Projective).unwrap();
            let b = auxiliary_form_full(&cubic, &pts, d, Mode::Projective).unwrap();
            assert_eq!(a.is_some(), b.is_some(), "D={d}");
        }
        let curve = Variety::plane_curve(&p("x0*x2 - x1^2 + x3^2", 4), &p("x0 - x3", 4)).unwrap();
        let pts = count::enumerate_projective(&curve, 6, 10_000).unwrap().points;
        for d in 1..=5 {
            let a = auxiliary_form(&curve, &pts, d, Mode::Projective).unwrap();
            let b = auxiliary_form_full(&curve, &pts, d, Mode::Projective).unwrap();
            assert_eq!(a.is_some(), b.is_some(), "D={d}");
        }
        let affine = Variety::hypersurface(&p("x0^2 + x1^2 - 25", 2)).unwrap();
        let pts = count::enumerate_affine(&affine, 5, 1000).unwrap().points;
        assert_eq!(pts.len(), 12);
        for d in 1..=7 {
            let a = auxiliary_form(&affine, &pts, d, Mode::Affine).unwrap();
            let b = auxiliary_form_full(&affine, &pts, d, Mode::Affine).unwrap();
            assert_eq!(a.is_some(), b.is_some(), "D={d}");
        }
    }

    #[test]
    fn omega_examples() {
        let o = OmegaOptions::default();
        assert_eq!(minimal_omega(&line(), 1, &o).unwrap().omega, 4);
        assert_eq!(minimal_omega(&conic(), 2, &o).unwrap().omega, 2);
        let mut prev = 0;
        for b in 1..=6 {
            let w = minimal_omega(&conic(), b, &o).unwrap().omega;
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn translation_examples() {
        let l = p("x3 - x1", 4);
        let q = p("x0^2 + x1*x2 + x2^2", 4);
        let t = translation_search(&q, &l, 2).unwrap();
        assert_eq!(t.a, [0, 0, 0]);
        // A conic through the origin [1:0:0:0] has vanishing constant part.
        let q = p("x0*x1 - x2^2 + x1*x3", 4);
        let l = p("x3", 4);
        let t = translation_search(&q, &l, 2).unwrap();
        assert_ne!(t.a, [0, 0, 0]);
        assert!(t.a.iter().all(|c| c.abs() <= 2));
        assert!(t.top_part_preserved);
    }
}
