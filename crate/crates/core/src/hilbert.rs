//! Local and geometric Hilbert-Samuel functions, reductions modulo primes and
//! evaluators for the explicit counting bounds.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, FqPoly, GaloisField};
use crate::heights::{harmonic, plucker_dim};
use crate::linalg;
use crate::poly::MultiPoly;
use crate::report::ExternalConstants;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("form vanishes identically modulo {0}")]
    DegenerateReduction(u64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("missing constant: {0}")]
    MissingConstant(String),
    #[error(transparent)]
    Field(#[from] arith::FfError),
}

/// Binomial coefficient with `C(a, b) = 0` for `b < 0` or `0 <= a < b`.
pub fn binom(a: i64, b: i64) -> u128 {
    if b < 0 || a < 0 || a < b {
        return 0;
    }
    let b = b.min(a - b) as u128;
    let a = a as u128;
    let mut r: u128 = 1;
    for i in 0..b {
        r = r * (a - i) / (i + 1);
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalProfile {
    pub d: u32,
    pub mu: u32,
    pub delta: u32,
}

/// `H(s) = C(d+s, s) - C(d+s-mu, s-mu)`.
pub fn local_hs(d: u32, mu: u32, s: u64) -> u128 {
    let (d, mu, s) = (d as i64, mu as i64, s as i64);
    binom(d + s, s) - binom(d + s - mu, s - mu)
}

/// Sum of the first `m` terms of the nondecreasing sequence in which `s`
/// occurs `H(s)` times.
pub fn q_partial_sum(d: u32, mu: u32, m: u64) -> u128 {
    let mut left = m as u128;
    let mut total = 0u128;
    let mut s = 0u64;
    while left > 0 {
        let take = local_hs(d, mu, s).min(left);
        total += take * s as u128;
        left -= take;
        s += 1;
    }
    total
}

pub fn q_lower_bound(d: u32, mu: u32, m: u64) -> f64 {
    let df = d as f64;
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let lead = (fact / mu as f64).powf(1.0 / df) * (df / (df + 1.0)) * (m as f64).powf((df + 1.0) / df);
    let lin = (df.powi(3) + 5.0 * df * df + 8.0 * df) / (2.0 * (df + 1.0) * (df + 2.0)) * m as f64;
    lead - lin
}

#[derive(Clone, Debug, Serialize)]
pub struct QBoundReport {
    pub d: u32,
    pub mu: u32,
    pub m_max: u64,
    pub violations: Vec<u64>,
    pub min_slack: f64,
    pub argmin: u64,
}

/// Check `Q(m) > bound(m)` for `1 <= m <= m_max`.
pub fn q_lower_bound_check(d: u32, mu: u32, m_max: u64) -> Result<QBoundReport, HilbertError> {
    if d == 0 || mu == 0 || m_max == 0 {
        return Err(HilbertError::Domain("need d, mu, m_max >= 1".into()));
    }
    if d > 4 || mu > 8 || m_max > 10_000 {
        return Err(HilbertError::Budget("d <= 4, mu <= 8, m_max <= 10^4".into()));
    }
    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut argmin = 1;
    let mut q = 0u128;
    let mut s = 0u64;
    let mut used_at_s = 0u128;
    for m in 1..=m_max {
        while used_at_s >= local_hs(d, mu, s) {
            s += 1;
            used_at_s = 0;
        }
        q += s as u128;
        used_at_s += 1;
        let slack = q as f64 - q_lower_bound(d, mu, m);
        if slack <= 0.0 {
            violations.push(m);
        }
        if slack < min_slack {
            min_slack = slack;
            argmin = m;
        }
    }
    Ok(QBoundReport { d, mu, m_max, violations, min_slack, argmin })
}

/// `rg(F_D) = C(d+1+D, d+1) - C(d+1-delta+D, d+1)`.
pub fn geometric_hs(d: u32, delta: u32, big_d: u64) -> u128 {
    let (d, delta, big_d) = (d as i64, delta as i64, big_d as i64);
    binom(d + 1 + big_d, d + 1) - binom(d + 1 - delta + big_d, d + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowCheck {
    pub rg: String,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Exact check of `c (D - (delta - 2)) <= rg^{1/d} <= c (D + (d+1)/2)` with
/// `c = (delta/d!)^{1/d}`, done by raising both sides to the power `d`.
pub fn geometric_hs_window(d: u32, delta: u32, big_d: u64) -> Result<WindowCheck, HilbertError> {
    if big_d < delta as u64 || d == 0 {
        return Err(HilbertError::Domain("window needs D >= delta and d >= 1".into()));
    }
    let rg = BigInt::from(geometric_hs(d, delta, big_d));
    let fact: BigInt = (1..=d).map(BigInt::from).product();
    let dl = BigInt::from(delta);
    let lo_base = BigInt::from(big_d as i64 - delta as i64 + 2);
    let lower_ok = &rg * &fact >= &dl * num_traits::pow(lo_base, d as usize);
    let hi_base = BigInt::from(2 * big_d + d as u64 + 1);
    let upper_ok = &rg * &fact * num_traits::pow(BigInt::from(2), d as usize) <= &dl * num_traits::pow(hi_base, d as usize);
    Ok(WindowCheck { rg: rg.to_string(), lower_ok, upper_ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCensus {
    pub p: u64,
    pub n: u64,
    /// Points `[x0:x1:x2]` (first nonzero entry 1) with their multiplicities.
    pub points: Vec<(Vec<u32>, u32)>,
    /// Whether `p >= 27 delta^4`, where the point-count estimate is asserted.
    pub estimate_applicable: bool,
    /// `1/n >= 1/p - 4 delta^2 / max(p, delta-1)^{3/2}`.
    pub estimate_holds: bool,
}

fn compose_fq(f: &FqPoly, gf: &GaloisField, images: &[FqPoly]) -> FqPoly {
    let n = images[0].nvars;
    let mut out = FqPoly::zero(n);
    for (m, c) in &f.terms {
        let mut t = FqPoly::zero(n);
        t.add_term(gf, vec![0; n], *c);
        for (i, &e) in m.iter().enumerate() {
            for _ in 0..e {
                t = t.mul(gf, &images[i]);
            }
        }
        for (k, v) in t.terms {
            out.add_term(gf, k, v);
        }
    }
    out
}

/// Count points of a plane curve over `F_p` with multiplicity.
pub fn reduction_point_census(f: &MultiPoly, p: u64) -> Result<PointCensus, HilbertError> {
    if f.nvars() != 3 || !f.is_homogeneous() || f.is_zero() {
        return Err(HilbertError::Domain("need a nonzero ternary form".into()));
    }
    if p > 2000 {
        return Err(HilbertError::Budget(format!("p = {p} exceeds the enumeration budget")));
    }
    let gf = GaloisField::new(p, 1)?;
    let fp = arith::reduce_mod_p(f, &gf)?;
    if fp.is_zero() {
        return Err(HilbertError::DegenerateReduction(p));
    }
    let p32 = p as u32;
    let mut pts: Vec<Vec<u32>> = Vec::new();
    for a in 0..p32 {
        for b in 0..p32 {
            pts.push(vec![1, a, b]);
        }
    }
    for b in 0..p32 {
        pts.push(vec![0, 1, b]);
    }
    pts.push(vec![0, 0, 1]);
    let mut points = Vec::new();
    let mut n = 0u64;
    for pt in pts {
        if fp.eval(&gf, &pt) != 0 {
            continue;
        }
        let j = pt.iter().position(|&x| x != 0).unwrap();
        let images: Vec<FqPoly> = (0..3)
            .map(|i| {
                let mut img = FqPoly::zero(3);
                img.add_term(&gf, vec![0, 0, 0], pt[i]);
                if i != j {
                    let mut e = vec![0, 0, 0];
                    e[i] = 1;
                    img.add_term(&gf, e, 1);
                }
                img
            })
            .collect();
        let local = compose_fq(&fp, &gf, &images);
        let mu = local.terms.keys().map(|m| m.iter().sum::<u32>()).min().unwrap_or(0);
        n += mu as u64;
        points.push((pt, mu));
    }
    let delta = f.total_degree().unwrap() as f64;
    let q = p as f64;
    let estimate_applicable = q >= 27.0 * delta.powi(4);
    let rhs = 1.0 / q - 4.0 * delta * delta / q.max(delta - 1.0).powf(1.5);
    let estimate_holds = n == 0 || 1.0 / n as f64 >= rhs;
    Ok(PointCensus { p, n, points, estimate_applicable, estimate_holds })
}

/// Symmetric integer matrix `S` with `q(x) = x^T S x / 2` (so `S_ii = 2 a_ii`).
pub fn quadric_matrix(q: &MultiPoly) -> Result<Vec<Vec<BigInt>>, HilbertError> {
    if !q.is_homogeneous() || q.total_degree() != Some(2) {
        return Err(HilbertError::Domain("not a quadratic form".into()));
    }
    let q = q.primitive();
    let n = q.nvars();
    let mut s = vec![vec![BigInt::zero(); n]; n];
    for (m, c) in q.terms() {
        let c = c.to_integer();
        let idx: Vec<usize> = (0..n).filter(|&i| m.0[i] > 0).collect();
        if idx.len() == 1 {
            s[idx[0]][idx[0]] = 2 * c;
        } else {
            s[idx[0]][idx[1]] = c.clone();
            s[idx[1]][idx[0]] = c;
        }
    }
    Ok(s)
}

fn rank_mod_p(m: &[Vec<BigInt>], p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|r| r.iter().map(|x| (((x % &pb) + &pb) % &pb).to_u64().unwrap()).collect())
        .collect();
    let (rows, cols) = (a.len(), a.first().map(|r| r.len()).unwrap_or(0));
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(piv, rank);
        let inv = pow_mod(a[rank][c], p - 2, p);
        for i in 0..rows {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in 0..cols {
                    a[i][j] = (a[i][j] + p * p - f * a[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    r
}

/// Whether the reduction of a quadric modulo `p` is geometrically reducible:
/// rank below 3 for odd `p`, a linear factor over `F_4` for `p = 2`.
pub fn quadric_reducible_mod_p(q: &MultiPoly, p: u64) -> Result<bool, HilbertError> {
    if p == 2 {
        return match arith::ff_factor_linear(&q.primitive(), 2, 2, 1 << 20) {
            Ok((_, fs)) => Ok(!fs.is_empty()),
            Err(arith::FfError::ZeroReduction(_)) => Ok(true),
            Err(e) => Err(e.into()),
        };
    }
    let s = quadric_matrix(q)?;
    Ok(rank_mod_p(&s, p) < 3)
}

fn minors3(s: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = s.len();
    let mut out = Vec::new();
    for r in combos3(n) {
        for c in combos3(n) {
            let m: Vec<Vec<BigInt>> = r.iter().map(|&i| c.iter().map(|&j| s[i][j].clone()).collect()).collect();
            out.push(linalg::determinant(&m));
        }
    }
    out
}

fn combos3(n: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                v.push([a, b, c]);
            }
        }
    }
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionCensus {
    pub delta: u32,
    pub threshold: u64,
    pub p_max: u64,
    pub bad_primes: Vec<u64>,
    /// `b' = prod exp(log p / p)` over the bad primes found.
    pub b_prime: f64,
    /// A nonzero 3x3 minor of the quadric's matrix; every bad prime divides it.
    pub certifying_minor: String,
    pub complete: bool,
}

/// Bad primes `p > 27 delta^4 = 432` (up to `p_max`) of a geometrically
/// integral quadric.
pub fn bad_reduction_census(q: &MultiPoly, p_max: u64) -> Result<ReductionCensus, HilbertError> {
    let s = quadric_matrix(q)?;
    if s.len() < 3 || linalg::rank(&s, s.len()) < 3 {
        return Err(HilbertError::Precondition("quadric is geometrically reducible (rank < 3)".into()));
    }
    if p_max > 10_000_000 {
        return Err(HilbertError::Budget("p_max <= 10^7".into()));
    }
    let minor = minors3(&s)
        .into_iter()
        .filter(|m| !m.is_zero())
        .min_by(|a, b| a.abs().cmp(&b.abs()))
        .expect("rank >= 3 gives a nonzero minor")
        .abs();
    let threshold = 27 * 2u64.pow(4);
    let mut bad = Vec::new();
    for p in arith::primes_up_to(p_max).into_iter().filter(|&p| p > threshold) {
        if quadric_reducible_mod_p(q, p)? {
            bad.push(p);
        }
    }
    let b_prime = bad.iter().map(|&p| (p as f64).ln() / p as f64).sum::<f64>().exp();
    let complete = BigInt::from(p_max) >= minor;
    Ok(ReductionCensus { delta: 2, threshold, p_max, bad_primes: bad, b_prime, certifying_minor: minor.to_string(), complete })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    ProjectiveCurve,
    ProjectiveSurface,
    AffineCurve,
    AffineSurface,
    ConicsRational,
    ConicsIntegral,
}

impl BoundKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "projective-curve" => Self::ProjectiveCurve,
            "projective-surface" => Self::ProjectiveSurface,
            "affine-curve" => Self::AffineCurve,
            "affine-surface" => Self::AffineSurface,
            "conics-rational" => Self::ConicsRational,
            "conics-integral" => Self::ConicsIntegral,
            _ => return None,
        })
    }

    /// Exponent of `B` in the bound.
    pub fn exponent(&self, delta: u32) -> f64 {
        let dl = delta as f64;
        match self {
            Self::ProjectiveCurve => 2.0 / dl,
            Self::ProjectiveSurface => 3.0 / (2.0 * dl.sqrt()),
            Self::AffineCurve => 1.0 / dl,
            Self::AffineSurface => 1.0 / dl.sqrt(),
            Self::ConicsRational => 3.0 * 3f64.sqrt() / 8.0 + 1.0,
            Self::ConicsIntegral => 3f64.sqrt() / 4.0 + 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: u32,
    pub d: u32,
    pub delta: u32,
    pub height: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub log_value: f64,
    pub value: f64,
    pub exponent: f64,
}

fn log_fact(d: u32) -> f64 {
    (1..=d).map(|k| (k as f64).ln()).sum()
}

/// `C_1(n, d)` at degree `delta` (ground field Q).
pub fn c1(n: u32, d: u32, delta: u32, k: &ExternalConstants) -> f64 {
    let (nf, df, dl) = (n as f64, d as f64, delta as f64);
    (df + 1.0) / (df * dl.powf(1.0 / df)) * (0.75 * (nf + 1.0).ln() - k.b1)
        + k.kappa2
        + 3.0
        + log_fact(d) / df
        + (df.powi(3) + 5.0 * df * df + 8.0 * df) / (2.0 * df * (df + 2.0) * (log_fact(d) / df).exp())
            * (1.0 + (df + 1.0) / 4.0)
            * (1.0 + k.kappa1)
}

fn log_e_factor(k: &ExternalConstants) -> f64 {
    2.0 * k.epsilon2 - 3.0 * 3f64.ln() + 1.0
}

/// `log C_1'(n, d)`.
pub fn log_c1_prime(n: u32, d: u32, delta: u32, k: &ExternalConstants) -> f64 {
    let big_n = plucker_dim(n as u64, d as u64) as f64;
    c1(n, d, delta, k) + (7.0 * (big_n + 1.0)).ln() + log_e_factor(k) + (d as f64).ln()
}

/// `C_1''(n, d)`; `None` when it is not positive (its logarithm is then undefined).
pub fn log_c1_second(n: u32, d: u32, delta: u32, k: &ExternalConstants) -> Option<f64> {
    let big_n = plucker_dim(n as u64, d as u64) as f64;
    let tail = (d as f64 + 1.0) * (k.b1 + 3.5 * (n as f64 + 1.0).ln());
    let c = c1(n, d, delta, k);
    if c <= 0.0 || tail <= 0.0 {
        return None;
    }
    Some(c.ln() + (7.0 * (big_n + 1.0)).ln() + log_e_factor(k) + tail.ln())
}

/// `log C_2(n, d)` at degree `delta`.
pub fn log_c2(n: u32, d: u32, delta: u32, k: &ExternalConstants) -> Option<f64> {
    let big_n = plucker_dim(n as u64, d as u64);
    let nf = big_n as f64;
    let hn = harmonic(big_n).to_f64().unwrap();
    let binom_log = (binom((big_n + delta as u64) as i64, delta as i64) as f64).ln();
    let inner = 3.0 + binom_log + (nf + 1.0) * 2f64.ln() + 4.0 * (nf + 1.0).ln() + 3f64.ln() - 0.5 * hn;
    (inner > 0.0).then(|| log_e_factor(k) + inner.ln())
}

/// `log C_4(n, d)`; needs the threshold constant `B(n, d, K)`.
pub fn log_c4(n: u32, d: u32, delta: u32, k: &ExternalConstants) -> Result<f64, HilbertError> {
    let bt = k
        .b_threshold
        .ok_or_else(|| HilbertError::MissingConstant("b_threshold (B(n,d,K)) is required for affine bounds".into()))?;
    if !(bt > 0.0) {
        return Err(HilbertError::MissingConstant("b_threshold must be positive".into()));
    }
    let big_n = plucker_dim(n as u64, d as u64);
    let nf = big_n as f64;
    let df = d as f64;
    let hn = harmonic(big_n).to_f64().unwrap();
    let lc2 = log_c2(n, d, delta, k).ok_or_else(|| HilbertError::Domain("C_2 is not positive".into()))?;
    let log_c3 = c1(n, d, delta, k)
        + (nf + 1.0) / df * 2f64.ln()
        + 4.0 / df * (nf + 1.0).ln()
        + 2.0 * df * hn
        + (df + 1.0) / std::f64::consts::E
        + (df + 1.0) * bt.ln()
        + lc2
        + 2f64.ln() / df;
    let main = log_c3 + lc2 + 1.0 + (df * (df + 1.0)).ln();
    let extra = k.b1 - 3.5 * (n as f64 + 1.0).ln() + (nf + 1.0) / (df + 1.0) * 2f64.ln() + 4.0 / (df + 1.0) * (nf + 1.0).ln()
        - hn / (2.0 * (df + 1.0));
    // log(e^main + extra), stable for large `main`.
    let total = if main > 40.0 { main + (extra * (-main).exp()).ln_1p() } else { (main.exp() + extra).ln() };
    Ok(total)
}

/// Closed-form bound shapes with the supplied constants.
pub fn bound_evaluator(kind: BoundKind, params: BoundParams, k: &ExternalConstants) -> Result<BoundValue, HilbertError> {
    let b = params.height;
    if !(b >= 1.0) {
        return Err(HilbertError::Domain("height must be >= 1".into()));
    }
    let lb = b.ln();
    let dl = params.delta as f64;
    let exponent = kind.exponent(params.delta);
    let log_value = match kind {
        BoundKind::ProjectiveCurve => log_c1_prime(params.n, 1, params.delta, k) + 4.0 * dl.ln() + exponent * lb,
        BoundKind::ProjectiveSurface => log_c1_prime(params.n, 2, params.delta, k) + 3.0 * dl.ln() + exponent * lb,
        BoundKind::AffineCurve => log_c4(params.n, 1, params.delta, k)? + 4.0 * dl.ln() + exponent * lb,
        BoundKind::AffineSurface => log_c4(params.n, 2, params.delta, k)? + 3.0 * dl.ln() + exponent * lb,
        BoundKind::ConicsRational => {
            let c1s = log_c1_second(3, 1, 2, k).ok_or_else(|| HilbertError::Domain("C_1''(3,1) is not positive".into()))?;
            93312f64.ln() + 23040.0 * 2f64.ln() * 12f64.ln() / 137.0
                + c1s
                + log_c1_prime(20, 1, 1, k)
                + 0.75 * log_c1_prime(3, 2, 3, k)
                + exponent * lb
                + lb.max(2.0).ln()
        }
        BoundKind::ConicsIntegral => {
            93312f64.ln()
                + log_c4(3, 1, 2, k)?
                + log_c1_prime(5, 2, 1, k)
                + 0.75 * log_c4(3, 2, 3, k)?
                + exponent * lb
                + lb.max(2.0).ln()
        }
    };
    Ok(BoundValue { log_value, value: log_value.exp(), exponent })
}

/// Trivial count bound `delta (2B + 1)^d` for a degree-`delta`, dimension-`d` variety.
pub fn trivial_bound(delta: u32, d: u32, b: u64) -> f64 {
    delta as f64 * (2.0 * b as f64 + 1.0).powi(d as i32)
}
