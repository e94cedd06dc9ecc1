//! Exact matrices: fraction-free (Bareiss) elimination over the integers and
//! over polynomial rings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::MultiPoly;

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Row-echelon form from Bareiss elimination. Row `k` has its pivot in column
/// `pivots[k]`; every stored entry is a minor of the input.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: IntMatrix,
    pub pivots: Vec<usize>,
    pub ncols: usize,
    /// Parity of the row swaps performed.
    pub swaps: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn fraction_free_echelon(m: &[Vec<BigInt>], ncols: usize) -> Echelon {
    let mut a: IntMatrix = m.to_vec();
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, bottom) = a.split_at_mut(r + 1);
        let piv_row = &top[r];
        let pv = piv_row[c].clone();
        for row in bottom.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let v = &pv * &row[j] - &f * &piv_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = pv;
        pivots.push(c);
        r += 1;
    }
    a.truncate(nrows);
    Echelon { rows: a, pivots, ncols, swaps }
}

pub fn rank(m: &[Vec<BigInt>], ncols: usize) -> usize {
    fraction_free_echelon(m, ncols).rank()
}

pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let e = fraction_free_echelon(m, n);
    if e.rank() < n {
        return BigInt::zero();
    }
    let d = e.rows[n - 1][n - 1].clone();
    if e.swaps % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Basis of the right kernel as primitive integer vectors, one per free column,
/// in increasing order of the free column.
pub fn kernel(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let e = fraction_free_echelon(m, ncols);
    kernel_from_echelon(&e)
}

pub fn kernel_from_echelon(e: &Echelon) -> Vec<Vec<BigInt>> {
    let ncols = e.ncols;
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &p in &e.pivots {
            v[p] = true;
        }
        v
    };
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![BigRational::zero(); ncols];
        x[free] = BigRational::one();
        for k in (0..e.rank()).rev() {
            let pc = e.pivots[k];
            let row = &e.rows[k];
            let mut s = BigRational::zero();
            for j in pc + 1..ncols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += BigRational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(row[pc].clone());
        }
        out.push(primitive_integer_vector(&x));
    }
    out
}

/// Clear denominators and divide by the gcd; first nonzero entry made positive.
pub fn primitive_integer_vector(x: &[BigRational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for v in x {
        l = l.lcm(v.denom());
    }
    let mut ints: Vec<BigInt> = x.iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if !g.is_zero() {
        let neg = ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
        if neg {
            g = -g;
        }
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
    }
    ints
}

/// Scale each rational row by the lcm of its denominators.
pub fn integer_rows(m: &[Vec<BigRational>]) -> IntMatrix {
    m.iter()
        .map(|row| {
            let mut l = BigInt::one();
            for v in row {
                l = l.lcm(v.denom());
            }
            let lr = BigRational::from_integer(l);
            row.iter().map(|v| (v * &lr).to_integer()).collect()
        })
        .collect()
}

pub fn mat_vec(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Solve `a x = b` over Q. Returns one solution (free variables zero) or `None`
/// if the system is inconsistent.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let e = fraction_free_echelon(&integer_rows(&aug), ncols + 1);
    if e.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for k in (0..e.rank()).rev() {
        let pc = e.pivots[k];
        let row = &e.rows[k];
        let mut s = BigRational::from_integer(row[ncols].clone());
        for j in pc + 1..ncols {
            if !row[j].is_zero() {
                s -= BigRational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = s / BigRational::from_integer(row[pc].clone());
    }
    Some(x)
}

/// Determinant of a square matrix of polynomials by Bareiss elimination with
/// exact polynomial division.
pub fn poly_determinant(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    let nv = m.first().and_then(|r| r.first()).map(|p| p.nvars()).unwrap_or(0);
    if n == 0 {
        return MultiPoly::one(nv);
    }
    let mut a: Vec<Vec<MultiPoly>> = m.to_vec();
    let mut prev = MultiPoly::one(nv);
    let mut negate = false;
    for c in 0..n {
        // Prefer the sparsest nonzero pivot to limit expression swell.
        let Some(p) = (c..n).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].len()) else {
            return MultiPoly::zero(nv);
        };
        if p != c {
            a.swap(p, c);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(c + 1);
        let piv_row = &top[c];
        let pv = piv_row[c].clone();
        for row in bottom.iter_mut() {
            let f = std::mem::replace(&mut row[c], MultiPoly::zero(nv));
            for j in c + 1..n {
                let v = &(&pv * &row[j]) - &(&f * &piv_row[j]);
                row[j] = if prev.is_constant() {
                    v.scale(&prev.constant_value().recip())
                } else {
                    v.exact_divide(&prev).expect("Bareiss division is exact")
                };
            }
        }
        prev = pv;
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Rank of an integer matrix reduced modulo the prime `p < 2^63`. A lower
/// bound for the rank over Q.
pub fn rank_mod_p(m: &[Vec<BigInt>], ncols: usize, p: u64) -> usize {
    pivots_mod_p(m, ncols, p).len()
}

/// Pivot columns of the reduced row-echelon form modulo `p`.
pub fn pivots_mod_p(m: &[Vec<BigInt>], ncols: usize, p: u64) -> Vec<usize> {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.mod_floor(&pb).try_into().expect("reduced entry fits u64")).collect())
        .collect();
    let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let inv = |x: u64| {
        let (mut base, mut e, mut acc) = (x, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            e >>= 1;
        }
        acc
    };
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        pivots.push(c);
        a.swap(r, piv);
        let iv = inv(a[r][c]);
        for j in c..ncols {
            a[r][j] = mulmod(a[r][j], iv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for j in c..ncols {
                    row[j] = (row[j] + p - mulmod(f, pivot_row[j])) % p;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    pivots
}
