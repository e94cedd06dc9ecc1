//! Exhaustive enumeration of rational and integral points of bounded height,
//! and the off-line counting experiments on cubic surfaces.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cubic::{self, CubicError, CubicSurface, RationalLine};
use crate::hilbert::{self, BoundKind, BoundParams, HilbertError};
use crate::poly::{MultiPoly, PolyError};
use crate::report::{fit_exponent, ExternalConstants, Tagged};

/// Largest height accepted for surfaces in P^3.
pub const SURFACE_HEIGHT_LIMIT: u64 = 512;
/// Largest height accepted for plane curves and lower-dimensional ambients.
pub const CURVE_HEIGHT_LIMIT: u64 = 10_000;
pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("expected {0}")]
    Domain(String),
    #[error("budget exceeded: {needed} tuples > {budget}; no partial result returned")]
    Budget { needed: u64, budget: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Cubic(#[from] CubicError),
    #[error(transparent)]
    Bound(#[from] HilbertError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Zero locus of integral forms, read projectively or in the affine chart
/// depending on the enumeration routine.
#[derive(Clone, Debug, PartialEq)]
pub struct Variety {
    pub forms: Vec<MultiPoly>,
    pub nvars: usize,
}

impl Variety {
    pub fn new(forms: Vec<MultiPoly>, nvars: usize) -> Result<Self, CountError> {
        if nvars == 0 || forms.iter().any(|f| f.nvars() != nvars || f.is_zero()) {
            return Err(CountError::Domain("nonzero forms in a common set of variables".into()));
        }
        Ok(Variety { forms: forms.iter().map(|f| f.primitive()).collect(), nvars })
    }

    pub fn hypersurface(f: &MultiPoly) -> Result<Self, CountError> {
        Self::new(vec![f.clone()], f.nvars())
    }

    /// Curve `V(l, q)` cut on the plane `l` in P^3.
    pub fn plane_curve(q: &MultiPoly, l: &MultiPoly) -> Result<Self, CountError> {
        if l.total_degree() != Some(1) || !l.is_homogeneous() {
            return Err(CountError::Domain("a linear form for the plane".into()));
        }
        Self::new(vec![l.clone(), q.clone()], q.nvars())
    }

    /// Degree, assuming a complete intersection.
    pub fn degree(&self) -> u32 {
        self.forms.iter().map(|f| f.total_degree().unwrap_or(0)).product::<u32>().max(1)
    }

    /// Projective dimension, assuming a complete intersection.
    pub fn projective_dim(&self) -> usize {
        (self.nvars - 1).saturating_sub(self.forms.len())
    }

    pub fn affine_dim(&self) -> usize {
        self.nvars.saturating_sub(self.forms.len())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialAudit {
    pub delta: u32,
    pub dim: usize,
    /// `delta (2B + 1)^d`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    pub bound: u64,
    pub count: u64,
    /// Points in lexicographic order.
    pub points: Vec<Vec<i64>>,
    pub solve_var: usize,
    /// Every tuple of the search space was examined.
    pub complete: bool,
    pub trivial_audit: Option<TrivialAudit>,
    #[serde(skip)]
    pub seconds: f64,
}

/// Integer polynomial evaluated in `i128`.
#[derive(Clone, Debug)]
struct IntPoly {
    terms: Vec<(i128, Vec<u32>)>,
}

impl IntPoly {
    fn from_poly(f: &MultiPoly) -> Result<Self, CountError> {
        let terms = f
            .integer_terms()
            .into_iter()
            .map(|(m, c)| c.to_i128().map(|c| (c, m.0)).ok_or_else(|| CountError::Domain("coefficients below 2^100".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPoly { terms })
    }

    fn eval(&self, x: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, &v)| acc * (v as i128).pow(k)))
            .sum()
    }
}

/// `f = sum_k coeffs[k] * x_s^k` with each coefficient free of `x_s`.
#[derive(Clone, Debug)]
struct SolvePlan {
    coeffs: Vec<IntPoly>,
}

impl SolvePlan {
    fn new(f: &MultiPoly, s: usize) -> Result<Self, CountError> {
        let deg = f.degree_in(s) as usize;
        let mut parts = vec![MultiPoly::zero(f.nvars()); deg + 1];
        for (m, c) in f.terms() {
            let k = m.0[s] as usize;
            let mut m2 = m.clone();
            m2.0[s] = 0;
            parts[k].add_term(m2, c.clone());
        }
        Ok(SolvePlan { coeffs: parts.iter().map(IntPoly::from_poly).collect::<Result<_, _>>()? })
    }

    fn univariate(&self, x: &[i64]) -> Vec<i128> {
        self.coeffs.iter().map(|c| c.eval(x)).collect()
    }
}

/// Refuse inputs whose evaluations could overflow `i128`.
fn check_magnitudes(forms: &[MultiPoly], bound: u64) -> Result<(), CountError> {
    let lb = (bound.max(2) as f64).log2();
    for f in forms {
        let c = f.max_abs_coeff().bits() as f64;
        let terms = (f.len() as f64).log2();
        let deg = f.total_degree().unwrap_or(0) as f64;
        if c + terms + 2.0 * deg * lb > 118.0 {
            return Err(CountError::Domain("coefficients and height small enough for 128-bit evaluation".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Roots1 {
    All,
    Some(Vec<i64>),
}

fn horner(c: &[i128], x: i64) -> i128 {
    c.iter().rev().fold(0i128, |acc, &a| acc * x as i128 + a)
}

/// Integer roots of `sum c_k x^k` in `[lo, hi]`.
fn integer_roots(c: &[i128], lo: i64, hi: i64) -> Roots1 {
    let mut c: Vec<i128> = c.to_vec();
    while c.last() == Some(&0) {
        c.pop();
    }
    if c.is_empty() {
        return Roots1::All;
    }
    let mut out = Vec::new();
    if lo > hi {
        return Roots1::Some(out);
    }
    let shift = c.iter().take_while(|&&a| a == 0).count();
    if shift > 0 {
        if lo <= 0 && 0 <= hi {
            out.push(0);
        }
        c.drain(..shift);
    }
    let deg = c.len() - 1;
    let range = |x: i64| lo <= x && x <= hi;
    match deg {
        0 => {}
        1 => {
            if c[0] % c[1] == 0 {
                let x = -c[0] / c[1];
                if let Ok(x) = i64::try_from(x) {
                    if range(x) {
                        out.push(x);
                    }
                }
            }
        }
        _ if c[1..deg].iter().all(|&a| a == 0) => {
            // x^deg = -c0 / c_deg
            if c[0] % c[deg] == 0 {
                let r = -c[0] / c[deg];
                let root = r.unsigned_abs().nth_root(deg as u32);
                if root.checked_pow(deg as u32) == Some(r.unsigned_abs()) {
                    if let Ok(root) = i64::try_from(root) {
                        let cands: Vec<i64> = if deg.is_multiple_of(2) {
                            if r >= 0 {
                                vec![root, -root]
                            } else {
                                vec![]
                            }
                        } else if r >= 0 {
                            vec![root]
                        } else {
                            vec![-root]
                        };
                        out.extend(cands.into_iter().filter(|&x| range(x)));
                    }
                }
            }
        }
        2 => match c[1].checked_mul(c[1]).and_then(|b2| c[2].checked_mul(c[0]).and_then(|ac| ac.checked_mul(4)).and_then(|ac4| b2.checked_sub(ac4))) {
            Some(disc) if disc >= 0 => {
                let s = disc.sqrt();
                if s * s == disc {
                    for num in [-c[1] + s, -c[1] - s] {
                        if num % (2 * c[2]) == 0 {
                            if let Ok(x) = i64::try_from(num / (2 * c[2])) {
                                if range(x) {
                                    out.push(x);
                                }
                            }
                        }
                    }
                }
            }
            Some(_) => {}
            None => out.extend(monotone_roots(&c, lo, hi)),
        },
        _ => out.extend(monotone_roots(&c, lo, hi)),
    }
    out.sort_unstable();
    out.dedup();
    Roots1::Some(out)
}

/// Real critical points of `c` (approximate), by recursion on the derivative.
fn critical_points(c: &[i128]) -> Vec<f64> {
    let d: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a as f64).collect();
    real_roots_f64(&d)
}

/// Approximate real roots of a small-degree real polynomial.
fn real_roots_f64(c: &[f64]) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    match c.len() {
        0 | 1 => vec![],
        2 => vec![-c[0] / c[1]],
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                vec![]
            } else {
                let s = disc.sqrt();
                let q = -0.5 * (b + b.signum() * s);
                let mut v = Vec::new();
                if q != 0.0 {
                    v.push(q / a);
                    v.push(cc / q);
                } else {
                    v.push(0.0);
                }
                v
            }
        }
        _ => {
            // Roots of the derivative split the line into monotone pieces; bisect each.
            let crit = real_roots_f64(&c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect::<Vec<_>>());
            let bound = 1.0 + c[..c.len() - 1].iter().map(|a| (a / c[c.len() - 1]).abs()).fold(0.0, f64::max);
            let mut pts = vec![-bound];
            let mut cs = crit.clone();
            cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.extend(cs);
            pts.push(bound);
            let ev = |x: f64| c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
            let mut out = Vec::new();
            for w in pts.windows(2) {
                let (mut a, mut b) = (w[0], w[1]);
                let (fa, fb) = (ev(a), ev(b));
                if fa == 0.0 {
                    out.push(a);
                    continue;
                }
                if fa.signum() == fb.signum() {
                    continue;
                }
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if ev(m).signum() == fa.signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                out.push(0.5 * (a + b));
            }
            out
        }
    }
}

/// Exact integer roots via bisection on monotone pieces; integers within one
/// unit of an approximate critical point are tested directly.
fn monotone_roots(c: &[i128], lo: i64, hi: i64) -> Vec<i64> {
    let mut windows: Vec<(i64, i64)> = critical_points(c)
        .into_iter()
        .filter(|r| r.is_finite())
        .map(|r| {
            let r = r.clamp(lo as f64 - 2.0, hi as f64 + 2.0);
            ((r.floor() as i64 - 1).max(lo), (r.ceil() as i64 + 1).min(hi))
        })
        .filter(|(a, b)| a <= b)
        .collect();
    windows.sort_unstable();
    let mut out = Vec::new();
    let mut cursor = lo;
    let mut pieces = Vec::new();
    for &(a, b) in &windows {
        if a > cursor {
            pieces.push((cursor, a - 1));
        }
        for x in a.max(cursor)..=b {
            if horner(c, x) == 0 {
                out.push(x);
            }
        }
        cursor = cursor.max(b + 1);
    }
    if cursor <= hi {
        pieces.push((cursor, hi));
    }
    for (a, b) in pieces {
        let (ga, gb) = (horner(c, a), horner(c, b));
        if ga == 0 {
            out.push(a);
            continue;
        }
        if gb == 0 {
            out.push(b);
            continue;
        }
        if ga.signum() == gb.signum() {
            continue;
        }
        let (mut l, mut h) = (a, b);
        while h - l > 1 {
            let m = l + (h - l) / 2;
            let gm = horner(c, m);
            if gm == 0 {
                out.push(m);
                break;
            }
            if gm.signum() == ga.signum() {
                l = m;
            } else {
                h = m;
            }
        }
    }
    out
}

fn gcd_all(x: &[i64]) -> i64 {
    x.iter().fold(0i64, |g, &v| g.gcd(&v))
}

fn first_nonzero_positive(x: &[i64]) -> bool {
    x.iter().find(|&&v| v != 0).is_none_or(|&v| v > 0)
}

/// Default solve-for coordinate: the last variable of smallest positive
/// degree in the first form.
fn default_solve_var(x: &Variety) -> usize {
    match x.forms.first() {
        None => x.nvars - 1,
        Some(f) => (0..x.nvars)
            .filter(|&i| f.degree_in(i) > 0)
            .min_by_key(|&i| (f.degree_in(i), std::cmp::Reverse(i)))
            .unwrap_or(x.nvars - 1),
    }
}

fn tuple_count(side: u64, k: usize) -> u64 {
    (0..k).try_fold(1u64, |acc, _| acc.checked_mul(side)).unwrap_or(u64::MAX)
}

/// Visit every `y` in `[-b, b]^k` whose first coordinate equals `first`.
fn for_each_tail(k: usize, b: i64, first: i64, mut visit: impl FnMut(&[i64])) {
    let mut y = vec![-b; k];
    if k == 0 {
        visit(&y);
        return;
    }
    y[0] = first;
    loop {
        visit(&y);
        let mut i = k - 1;
        loop {
            if i == 0 {
                return;
            }
            if y[i] < b {
                y[i] += 1;
                break;
            }
            y[i] = -b;
            i -= 1;
        }
    }
}

struct Solver<'a> {
    x: &'a Variety,
    plan: Option<SolvePlan>,
    checks: Vec<IntPoly>,
}

impl<'a> Solver<'a> {
    fn new(x: &'a Variety, s: usize) -> Result<Self, CountError> {
        let solver_form = (0..x.forms.len()).filter(|&j| x.forms[j].degree_in(s) > 0).min_by_key(|&j| x.forms[j].degree_in(s));
        let plan = solver_form.map(|j| SolvePlan::new(&x.forms[j], s)).transpose()?;
        let checks = (0..x.forms.len())
            .filter(|&j| Some(j) != solver_form)
            .map(|j| IntPoly::from_poly(&x.forms[j]))
            .collect::<Result<_, _>>()?;
        Ok(Solver { x, plan, checks })
    }

    /// Candidate values of the solve variable with the others fixed in `pt`.
    fn roots(&self, pt: &[i64], lo: i64, hi: i64) -> Vec<i64> {
        let r = match &self.plan {
            None => Roots1::All,
            Some(p) => integer_roots(&p.univariate(pt), lo, hi),
        };
        match r {
            Roots1::All => (lo..=hi).collect(),
            Roots1::Some(v) => v,
        }
    }

    fn satisfies_rest(&self, pt: &[i64]) -> bool {
        debug_assert_eq!(pt.len(), self.x.nvars);
        self.checks.iter().all(|c| c.eval(pt) == 0)
    }
}

fn embed_fixed(fixed: &[i64], s: usize, v: i64) -> Vec<i64> {
    let mut pt = Vec::with_capacity(fixed.len() + 1);
    pt.extend_from_slice(&fixed[..s]);
    pt.push(v);
    pt.extend_from_slice(&fixed[s..]);
    pt
}

/// `S(X; B)`: primitive integer points with `max |x_i| <= B`, first nonzero
/// coordinate positive.
pub fn enumerate_projective(x: &Variety, bound: u64, budget: u64) -> Result<CountResult, CountError> {
    enumerate_projective_with(x, bound, budget, default_solve_var(x))
}

pub fn enumerate_projective_with(x: &Variety, bound: u64, budget: u64, solve_var: usize) -> Result<CountResult, CountError> {
    let start = Instant::now();
    if bound < 1 {
        return Err(CountError::Domain("B >= 1".into()));
    }
    if x.nvars < 2 || x.nvars > 4 {
        return Err(CountError::Domain("ambient P^1, P^2 or P^3".into()));
    }
    if solve_var >= x.nvars {
        return Err(CountError::Domain("solve variable within range".into()));
    }
    let limit = if x.nvars == 4 { SURFACE_HEIGHT_LIMIT } else { CURVE_HEIGHT_LIMIT };
    let k = x.nvars - 1;
    let needed = tuple_count(2 * bound + 1, k);
    if bound > limit || needed > budget {
        return Err(CountError::Budget { needed, budget: budget.min(tuple_count(2 * limit + 1, k)) });
    }
    check_magnitudes(&x.forms, bound)?;
    let solver = Solver::new(x, solve_var)?;
    let b = bound as i64;
    let s = solve_var;
    let scan = |fixed: &[i64], out: &mut Vec<Vec<i64>>| {
        if fixed.iter().all(|&v| v == 0) {
            let pt = embed_fixed(fixed, s, 1);
            if solver.roots(&pt, 1, 1).contains(&1) && solver.satisfies_rest(&pt) {
                out.push(pt);
            }
            return;
        }
        if !first_nonzero_positive(fixed) {
            return;
        }
        let probe = embed_fixed(fixed, s, 0);
        for r in solver.roots(&probe, -b, b) {
            let mut pt = probe.clone();
            pt[s] = r;
            if gcd_all(&pt) == 1 && solver.satisfies_rest(&pt) {
                if !first_nonzero_positive(&pt) {
                    pt.iter_mut().for_each(|v| *v = -*v);
                }
                out.push(pt);
            }
        }
    };
    let mut points: Vec<Vec<i64>> = (0..=b)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            for_each_tail(k, b, first, |y| scan(y, &mut out));
            out
        })
        .collect();
    points.sort_unstable();
    points.dedup();
    Ok(CountResult {
        bound,
        count: points.len() as u64,
        points,
        solve_var,
        complete: true,
        trivial_audit: None,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Norm defining the affine search region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    /// `sum x_i^2 <= B^2`, the region of `s(X'; B)`.
    Euclidean,
    /// `max |x_i| <= B`.
    Max,
}

/// `s(X'; B)`: integer solutions with `sum x_i^2 <= B^2`.
pub fn enumerate_affine(x: &Variety, bound: u64, budget: u64) -> Result<CountResult, CountError> {
    enumerate_affine_with(x, bound, budget, Norm::Euclidean, default_solve_var(x))
}

pub fn enumerate_affine_with(x: &Variety, bound: u64, budget: u64, norm: Norm, solve_var: usize) -> Result<CountResult, CountError> {
    let start = Instant::now();
    if x.nvars > 3 {
        return Err(CountError::Domain("ambient A^1, A^2 or A^3".into()));
    }
    if solve_var >= x.nvars {
        return Err(CountError::Domain("solve variable within range".into()));
    }
    let limit = if x.nvars == 3 { SURFACE_HEIGHT_LIMIT } else { CURVE_HEIGHT_LIMIT };
    let k = x.nvars - 1;
    let needed = tuple_count(2 * bound + 1, k);
    if bound > limit || needed > budget {
        return Err(CountError::Budget { needed, budget: budget.min(tuple_count(2 * limit + 1, k)) });
    }
    check_magnitudes(&x.forms, bound)?;
    let solver = Solver::new(x, solve_var)?;
    let b = bound as i64;
    let b2 = b * b;
    let s = solve_var;
    let scan = |fixed: &[i64], out: &mut Vec<Vec<i64>>| {
        let r = match norm {
            Norm::Max => b,
            Norm::Euclidean => {
                let used: i64 = fixed.iter().map(|v| v * v).sum();
                if used > b2 {
                    return;
                }
                (b2 - used).sqrt()
            }
        };
        let probe = embed_fixed(fixed, s, 0);
        for v in solver.roots(&probe, -r, r) {
            let mut pt = probe.clone();
            pt[s] = v;
            if solver.satisfies_rest(&pt) {
                out.push(pt);
            }
        }
    };
    let mut points: Vec<Vec<i64>> = if k == 0 {
        let mut out = Vec::new();
        scan(&[], &mut out);
        out
    } else {
        (-b..=b)
            .into_par_iter()
            .flat_map_iter(|first| {
                let mut out = Vec::new();
                for_each_tail(k, b, first, |y| scan(y, &mut out));
                out
            })
            .collect()
    };
    points.sort_unstable();
    points.dedup();
    let delta = x.degree();
    let dim = x.affine_dim();
    let tb = hilbert::trivial_bound(delta, dim as u32, bound);
    let count = points.len() as u64;
    Ok(CountResult {
        bound,
        count,
        points,
        solve_var,
        complete: true,
        trivial_audit: Some(TrivialAudit { delta, dim, bound: tb, holds: count as f64 <= tb }),
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicOptions {
    /// Search height for a base point of the parameterisation.
    pub base_height: u64,
    pub accelerate: bool,
    /// Also run brute force and compare when both are affordable.
    pub cross_check: bool,
    pub budget: u64,
}

impl Default for ConicOptions {
    fn default() -> Self {
        ConicOptions { base_height: 8, accelerate: true, cross_check: false, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicCount {
    pub result: CountResult,
    pub method: String,
    /// The accelerated path was requested but could not run.
    pub fell_back: bool,
    pub base_point: Option<Vec<i64>>,
    /// Parameter height cutoff of the accelerated path.
    pub parameter_cutoff: Option<u64>,
    /// Brute force and parameterisation agree (when both ran).
    pub paths_agree: Option<bool>,
}

/// `X(s, t) = -Q(v) P0 + (grad Q(P0) . v) v` with `v = s v1 + t v2`, the second
/// intersection of the line through `P0` and `v` with the conic.
fn conic_parameterization(q: &MultiPoly, l: &MultiPoly, p0: &[i64]) -> Option<Vec<MultiPoly>> {
    let lc: Vec<BigRational> = (0..4).map(|i| l.coeff(&crate::poly::Monomial::var(4, i))).collect();
    let lrow: Vec<BigInt> = lc.iter().map(|c| c.to_integer()).collect();
    let basis = crate::linalg::kernel(&[lrow], 4);
    let p0b: Vec<BigInt> = p0.iter().map(|&v| BigInt::from(v)).collect();
    let mut pair = None;
    'outer: for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let m = vec![p0b.clone(), basis[i].clone(), basis[j].clone()];
            if crate::linalg::rank(&m, 4) == 3 {
                pair = Some((basis[i].clone(), basis[j].clone()));
                break 'outer;
            }
        }
    }
    let (v1, v2) = pair?;
    let st = |c: &BigInt, d: &BigInt| MultiPoly::linear(&[BigRational::from_integer(c.clone()), BigRational::from_integer(d.clone())]);
    let v: Vec<MultiPoly> = (0..4).map(|i| st(&v1[i], &v2[i])).collect();
    let qv = q.compose(&v);
    let p0r: Vec<BigRational> = p0.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    let mut grad = MultiPoly::zero(2);
    for (i, vi) in v.iter().enumerate() {
        let gi = q.partial_derivative(i).evaluate(&p0r);
        grad = &grad + &vi.scale(&gi);
    }
    Some((0..4).map(|i| &(&grad * &v[i]) - &qv.scale(&p0r[i])).collect())
}

fn primitive_i64(v: &[BigInt]) -> Option<Vec<i64>> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return None;
    }
    let mut out: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        out.iter_mut().for_each(|x| *x = -x.clone());
    }
    out.iter().map(|x| x.to_i64()).collect()
}

fn accelerated_conic(q: &MultiPoly, l: &MultiPoly, p0: &[i64], bound: u64) -> Option<(Vec<Vec<i64>>, u64)> {
    let family = conic_parameterization(q, l, p0)?;
    let nz: Vec<&MultiPoly> = family.iter().filter(|f| !f.is_zero()).collect();
    let mut best: Option<BigInt> = None;
    for (a, f) in nz.iter().enumerate() {
        for g in &nz[a + 1..] {
            if f.total_degree() != Some(2) || g.total_degree() != Some(2) {
                continue;
            }
            if let Some((_, lv)) = cubic::cofactor_l1(f, g) {
                if best.as_ref().is_none_or(|b| &lv < b) {
                    best = Some(lv);
                }
            }
        }
    }
    let lv = best?;
    let cut = (lv * BigInt::from(bound)).sqrt().to_u64()?;
    if cut > 1 << 20 {
        return None;
    }
    let ints: Vec<Vec<(crate::poly::Monomial, BigInt)>> = family.iter().map(|f| f.integer_terms()).collect();
    let mut set: BTreeSet<Vec<i64>> = cubic::projective_line_points(cut as i64)
        .par_iter()
        .filter_map(|&(s, t)| {
            let v: Vec<BigInt> = ints
                .iter()
                .map(|terms| {
                    terms.iter().fold(BigInt::zero(), |acc, (m, c)| acc + c * num_traits::pow(BigInt::from(s), m.0[0] as usize) * num_traits::pow(BigInt::from(t), m.0[1] as usize))
                })
                .collect();
            let p = primitive_i64(&v)?;
            (p.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) <= bound).then_some(p)
        })
        .collect();
    if p0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) <= bound {
        set.insert(p0.to_vec());
    }
    Some((set.into_iter().collect(), cut))
}

/// Rational points of height `<= B` on the conic `V(l, Q)` in P^3.
pub fn conic_points(q: &MultiPoly, l: &MultiPoly, bound: u64, opts: &ConicOptions) -> Result<ConicCount, CountError> {
    let x = Variety::plane_curve(q, l)?;
    if q.nvars() != 4 || q.total_degree() != Some(2) || !q.is_homogeneous() {
        return Err(CountError::Domain("a quadratic form in T0..T3".into()));
    }
    let lin = &x.forms[0];
    let s = (0..4).rev().find(|&i| lin.involves(i)).expect("nonzero linear form");
    let brute = |b: u64| enumerate_projective_with(&x, b, opts.budget, s);
    if !opts.accelerate {
        return Ok(ConicCount { result: brute(bound)?, method: "brute-force".into(), fell_back: false, base_point: None, parameter_cutoff: None, paths_agree: None });
    }
    let start = Instant::now();
    let base = brute(opts.base_height.min(bound).max(1))?;
    let base_point = base.points.first().cloned();
    let accel = base_point.as_ref().and_then(|p0| accelerated_conic(&x.forms[1], lin, p0, bound));
    match accel {
        Some((points, cut)) => {
            let paths_agree = if opts.cross_check {
                let b = brute(bound)?;
                Some(b.points == points)
            } else {
                None
            };
            let result = CountResult {
                bound,
                count: points.len() as u64,
                points,
                solve_var: s,
                complete: true,
                trivial_audit: None,
                seconds: start.elapsed().as_secs_f64(),
            };
            Ok(ConicCount { result, method: "parameterized".into(), fell_back: false, base_point, parameter_cutoff: Some(cut), paths_agree })
        }
        None => {
            if base_point.is_none() && bound <= opts.base_height {
                return Ok(ConicCount { result: base, method: "brute-force".into(), fell_back: true, base_point: None, parameter_cutoff: None, paths_agree: None });
            }
            Ok(ConicCount { result: brute(bound)?, method: "brute-force".into(), fell_back: true, base_point, parameter_cutoff: None, paths_agree: None })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRow {
    pub bound: u64,
    pub total: u64,
    pub on_lines: u64,
    /// Points off the found lines: the conic-covered proxy.
    pub off_lines: u64,
    pub log_bound_value: Option<f64>,
    pub bound_holds: Option<bool>,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingExperiment {
    pub kind: String,
    pub lines: Vec<String>,
    pub rows: Vec<ExperimentRow>,
    pub fitted_exponent: Option<Tagged<f64>>,
    pub fit_intercept: Option<f64>,
    pub fit_residuals: Vec<f64>,
    pub overlay_exponent: Tagged<f64>,
    pub monotone: bool,
    pub bound_inequality_holds: Option<bool>,
    pub note: &'static str,
}

#[derive(Clone, Debug)]
pub struct ExperimentOptions {
    pub budget: u64,
    pub line_height: u64,
    pub primes: Vec<u64>,
    pub constants: ExternalConstants,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { budget: DEFAULT_BUDGET, line_height: 2, primes: cubic::DEFAULT_PRIMES.to_vec(), constants: ExternalConstants::default() }
    }
}

const PROXY_NOTE: &str = "off-line points bound conic membership, not covering multiplicity";

fn on_any_line(lines: &[(IntPoly, IntPoly)], pt: &[i64]) -> bool {
    lines.iter().any(|(a, b)| a.eval(pt) == 0 && b.eval(pt) == 0)
}

fn finish_experiment(kind: &str, lines: Vec<String>, rows: Vec<ExperimentRow>, overlay: f64) -> CountingExperiment {
    let xs: Vec<f64> = rows.iter().map(|r| r.bound as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.off_lines as f64).collect();
    let fit = fit_exponent(&xs, &ys);
    let fit_residuals = match fit {
        Some((a, b)) => rows.iter().filter(|r| r.off_lines > 0).map(|r| (r.off_lines as f64).ln() - a * (r.bound as f64).ln() - b).collect(),
        None => vec![],
    };
    let monotone = rows.windows(2).all(|w| w[0].bound > w[1].bound || w[0].off_lines <= w[1].off_lines);
    let evaluated: Vec<bool> = rows.iter().filter_map(|r| r.bound_holds).collect();
    CountingExperiment {
        kind: kind.to_string(),
        lines,
        fitted_exponent: fit.map(|f| Tagged::fitted(f.0)),
        fit_intercept: fit.map(|f| f.1),
        fit_residuals,
        overlay_exponent: Tagged::overlay(overlay),
        monotone,
        bound_inequality_holds: (!evaluated.is_empty()).then(|| evaluated.iter().all(|&b| b)),
        rows,
        note: PROXY_NOTE,
    }
}

fn line_forms(lines: &[RationalLine], chart: bool) -> Result<Vec<(IntPoly, IntPoly)>, CountError> {
    lines
        .iter()
        .map(|l| {
            let (a, b) = if chart { (affine_chart(&l.l1), affine_chart(&l.l2)) } else { (l.l1.clone(), l.l2.clone()) };
            Ok((IntPoly::from_poly(&a.primitive_or_zero())?, IntPoly::from_poly(&b.primitive_or_zero())?))
        })
        .collect()
}

trait PrimitiveOrZero {
    fn primitive_or_zero(&self) -> MultiPoly;
}

impl PrimitiveOrZero for MultiPoly {
    fn primitive_or_zero(&self) -> MultiPoly {
        if self.is_zero() {
            self.clone()
        } else {
            self.primitive()
        }
    }
}

fn plucker_label(l: &RationalLine) -> String {
    let v: Vec<String> = l.line.plucker_array().iter().map(|v| v.to_string()).collect();
    format!("[{}]", v.join(":"))
}

/// `f(1, x1, ..., xn)` as a polynomial in `n` variables.
pub fn affine_chart(f: &MultiPoly) -> MultiPoly {
    let n = f.nvars() - 1;
    let mut images = vec![MultiPoly::one(n)];
    images.extend((0..n).map(|i| MultiPoly::var(n, i)));
    f.compose(&images)
}

/// Off-line rational points on a non-ruled cubic surface with a rational line.
pub fn points_on_conics_experiment(x: &CubicSurface, b_list: &[u64], opts: &ExperimentOptions) -> Result<CountingExperiment, CountError> {
    let cl = cubic::classify_cubic(x, &opts.primes);
    if cl.non_ruled != Some(cubic::Confidence::Certified) {
        return Err(CountError::Precondition("non-ruled certificate".into()));
    }
    let lines = cubic::find_lines(x, opts.line_height, opts.budget)?;
    if lines.is_empty() {
        return Err(CountError::Precondition("a rational line on the surface".into()));
    }
    let lf = line_forms(&lines, false)?;
    let var = Variety::hypersurface(&x.f)?;
    let mut rows = Vec::new();
    for &b in b_list {
        let r = enumerate_projective(&var, b, opts.budget)?;
        let on = r.points.iter().filter(|p| on_any_line(&lf, p)).count() as u64;
        let off = r.count - on;
        let bv = hilbert::bound_evaluator(BoundKind::ConicsRational, BoundParams { n: 3, d: 2, delta: 3, height: b as f64 }, &opts.constants).ok();
        rows.push(ExperimentRow {
            bound: b,
            total: r.count,
            on_lines: on,
            off_lines: off,
            log_bound_value: bv.as_ref().map(|v| v.log_value),
            bound_holds: bv.map(|v| off == 0 || (off as f64).ln() <= v.log_value),
            seconds: r.seconds,
        });
    }
    let names = lines.iter().map(plucker_label).collect();
    Ok(finish_experiment("rational-points-on-conics", names, rows, BoundKind::ConicsRational.exponent(3)))
}

/// Off-line integral points `sum x_i^2 <= B^2` on the affine chart `T0 = 1`.
pub fn integral_conics_experiment(f: &MultiPoly, b_list: &[u64], opts: &ExperimentOptions) -> Result<CountingExperiment, CountError> {
    let x = CubicSurface::new(f)?;
    let cl = cubic::classify_cubic(&x, &opts.primes);
    if !cl.ncc {
        return Err(CountError::Precondition("not cylindrical over a curve".into()));
    }
    if cubic::certify_absolutely_irreducible(&cubic::part_at_infinity(&x.f), &opts.primes, opts.budget).is_none() {
        return Err(CountError::Precondition("absolutely irreducible part at infinity".into()));
    }
    let lines = cubic::find_lines(&x, opts.line_height, opts.budget)?;
    let lf = line_forms(&lines, true)?;
    let var = Variety::hypersurface(&affine_chart(&x.f))?;
    let mut rows = Vec::new();
    for &b in b_list {
        let r = enumerate_affine(&var, b, opts.budget)?;
        let on = r.points.iter().filter(|p| on_any_line(&lf, p)).count() as u64;
        let off = r.count - on;
        let bv = hilbert::bound_evaluator(BoundKind::ConicsIntegral, BoundParams { n: 3, d: 2, delta: 3, height: b.max(1) as f64 }, &opts.constants).ok();
        rows.push(ExperimentRow {
            bound: b,
            total: r.count,
            on_lines: on,
            off_lines: off,
            log_bound_value: bv.as_ref().map(|v| v.log_value),
            bound_holds: bv.map(|v| off == 0 || (off as f64).ln() <= v.log_value),
            seconds: r.seconds,
        });
    }
    let names = lines.iter().map(plucker_label).collect();
    Ok(finish_experiment("integral-points-on-conics", names, rows, BoundKind::ConicsIntegral.exponent(3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_auto;

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly_auto(s, n).unwrap()
    }

    fn pts(v: &[&[i64]]) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = v.iter().map(|x| x.to_vec()).collect();
        out.sort();
        out
    }

    #[test]
    fn projective_line_at_height_one() {
        let x = Variety::new(vec![], 2).unwrap();
        let r = enumerate_projective(&x, 1, 1000).unwrap();
        assert_eq!(r.points, pts(&[&[0, 1], &[1, 0], &[1, 1], &[1, -1]]));
    }

    #[test]
    fn conic_points_at_height_two() {
        let x = Variety::hypersurface(&p("x0*x2 - x1^2", 3)).unwrap();
        let r = enumerate_projective(&x, 2, 1000).unwrap();
        assert_eq!(r.points, pts(&[&[1, 0, 0], &[0, 0, 1], &[1, 1, 1], &[1, -1, 1]]));
        for s in 0..3 {
            assert_eq!(enumerate_projective_with(&x, 7, 1000, s).unwrap().points, enumerate_projective(&x, 7, 1000).unwrap().points);
        }
    }

    #[test]
    fn anisotropic_conic_is_empty() {
        let x = Variety::hypersurface(&p("x0^2 + x1^2 + x2^2", 3)).unwrap();
        assert_eq!(enumerate_projective(&x, 10, 10_000).unwrap().count, 0);
    }

    #[test]
    fn budgets_are_enforced() {
        let x = Variety::hypersurface(&p("x0^3 + x1^3 + x2^3 + x3^3", 4)).unwrap();
        assert!(matches!(enumerate_projective(&x, 600, u64::MAX), Err(CountError::Budget { .. })));
        assert!(matches!(enumerate_projective(&x, 20, 100), Err(CountError::Budget { .. })));
    }

    #[test]
    fn affine_line_in_ball() {
        let x = Variety::hypersurface(&p("x0 - x1", 2)).unwrap();
        let r = enumerate_affine_with(&x, 1, 1000, Norm::Max, 1).unwrap();
        assert_eq!(r.points, pts(&[&[-1, -1], &[0, 0], &[1, 1]]));
        assert!(r.trivial_audit.as_ref().unwrap().holds);
        // |(1, 1)| = sqrt 2 lies outside the unit ball.
        assert_eq!(enumerate_affine(&x, 1, 1000).unwrap().points, pts(&[&[0, 0]]));
        assert_eq!(enumerate_affine(&x, 2, 1000).unwrap().points, pts(&[&[-1, -1], &[0, 0], &[1, 1]]));
        assert_eq!(enumerate_affine(&x, 0, 1000).unwrap().points, pts(&[&[0, 0]]));
        for s in 0..2 {
            assert_eq!(enumerate_affine_with(&x, 9, 1000, Norm::Euclidean, s).unwrap().points, enumerate_affine(&x, 9, 1000).unwrap().points);
        }
    }

    /// Independent rescan of every tuple in the box.
    fn naive_projective(f: &MultiPoly, b: i64) -> Vec<Vec<i64>> {
        let ip = IntPoly::from_poly(f).unwrap();
        let n = f.nvars();
        let mut out = Vec::new();
        let mut x = vec![-b; n];
        loop {
            if gcd_all(&x) == 1 && first_nonzero_positive(&x) && ip.eval(&x) == 0 {
                out.push(x.clone());
            }
            let mut i = n;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if x[i] < b {
                    x[i] += 1;
                    break;
                }
                x[i] = -b;
            }
        }
    }

    #[test]
    fn surface_enumeration_matches_naive_scan() {
        for s in ["x0^3 + x1^3 + x2^3 + x3^3", "x0^2*x1 - x2^3 + x3^2*x0 - x1*x2*x3", "2*x3^3 - x0*x3^2 + x1*x2*x3 - 3*x0^3 + x1^3"] {
            let f = p(s, 4);
            let x = Variety::hypersurface(&f).unwrap();
            let naive = naive_projective(&f, 6);
            for sv in 0..4 {
                assert_eq!(enumerate_projective_with(&x, 6, 1 << 20, sv).unwrap().points, naive, "{s} solve {sv}");
            }
        }
    }

    #[test]
    fn root_finder_handles_all_shapes() {
        for c in [vec![-6i128, 11, -6, 1], vec![0, 0, 1], vec![8, 0, 0, 1], vec![-4, 0, 1], vec![1, 0, 1], vec![6, -5, 1], vec![-30, 31, 0, -1, 0]] {
            let got = match integer_roots(&c, -50, 50) {
                Roots1::Some(v) => v,
                Roots1::All => panic!(),
            };
            let want: Vec<i64> = (-50..=50).filter(|&x| horner(&c, x) == 0).collect();
            assert_eq!(got, want, "{c:?}");
        }
        assert_eq!(integer_roots(&[0, 0], -1, 1), Roots1::All);
    }

    #[test]
    fn conic_paths_agree() {
        let l = p("x3", 4);
        let q = p("x0*x2 - x1^2", 4);
        let opts = ConicOptions { cross_check: true, ..Default::default() };
        let c = conic_points(&q, &l, 2, &opts).unwrap();
        assert_eq!(c.result.count, 4);
        assert_eq!(c.paths_agree, Some(true));
        for b in [5, 13, 30] {
            let c = conic_points(&q, &l, b, &opts).unwrap();
            assert_eq!(c.method, "parameterized");
            assert_eq!(c.paths_agree, Some(true), "B={b}");
        }
        let q2 = p("x0^2 - 2*x1^2 + 3*x1*x2 - x2^2 + x0*x3", 4);
        let l2 = p("x0 + x1 - x2 + 2*x3", 4);
        for b in [3, 9, 20] {
            assert_eq!(conic_points(&q2, &l2, b, &opts).unwrap().paths_agree, Some(true));
        }
    }

    #[test]
    fn degenerate_conic_on_plane() {
        // Restricted to the plane, the form does not involve T1: two conjugate
        // lines meeting in the single rational point [1:-1:0:0].
        let q = p("x2^2 - x2*x3 + x3^2", 4);
        let l = p("x0 + x1", 4);
        for b in [1, 12, 40] {
            let c = conic_points(&q, &l, b, &ConicOptions::default()).unwrap();
            assert_eq!(c.result.points, pts(&[&[1, -1, 0, 0]]));
            assert!(c.fell_back);
        }
    }

    #[test]
    fn anisotropic_conic_on_plane() {
        let q = p("x0^2 + x1^2 + x2^2", 4);
        let l = p("x3", 4);
        let c = conic_points(&q, &l, 12, &ConicOptions::default()).unwrap();
        assert_eq!(c.result.count, 0);
        assert!(c.base_point.is_none());
    }

    #[test]
    fn isotropic_conic_growth_is_linear() {
        let q = p("x0*x2 - x1^2", 4);
        let l = p("x3", 4);
        let bs = [100u64, 200, 400, 800];
        let counts: Vec<f64> = bs.iter().map(|&b| conic_points(&q, &l, b, &ConicOptions::default()).unwrap().result.count as f64).collect();
        let (a, _) = fit_exponent(&bs.map(|b| b as f64), &counts).unwrap();
        assert!((a - 1.0).abs() < 0.1, "{a}");
    }

    #[test]
    fn empty_height_list_gives_empty_report() {
        let f = p("x1^3 + x2^3 + x3^3 - x0^3", 4);
        let e = integral_conics_experiment(&f, &[], &ExperimentOptions::default()).unwrap();
        assert!(e.rows.is_empty());
        assert!(e.fitted_exponent.is_none());
        assert!((e.overlay_exponent.value - 0.9330).abs() < 1e-4);
    }

    #[test]
    fn fermat_off_line_counts_are_monotone() {
        let x = CubicSurface::new(&p("x0^3 + x1^3 + x2^3 + x3^3", 4)).unwrap();
        let e = points_on_conics_experiment(&x, &[4, 8, 16], &ExperimentOptions::default()).unwrap();
        assert!(e.monotone);
        assert!((e.overlay_exponent.value - 1.6495).abs() < 1e-4);
        assert!(e.rows.iter().all(|r| r.on_lines > 0));
    }
}
