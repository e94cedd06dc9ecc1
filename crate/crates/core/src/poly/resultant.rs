//! Sylvester resultant of binary forms and Macaulay resultant of `n+1` forms in
//! `n+1` variables (coefficients may be polynomials in further variables).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{monomials_of_degree, Monomial, MultiPoly, PolyError};
use crate::linalg;

/// Resultant of two binary forms, normalised so that `Res(x0^m, x1^n) = 1`.
pub fn sylvester_resultant(f: &MultiPoly, g: &MultiPoly) -> Result<BigRational, PolyError> {
    for p in [f, g] {
        if p.nvars() != 2 {
            return Err(PolyError::ArityMismatch(p.nvars(), 2));
        }
        if p.is_zero() {
            return Err(PolyError::Domain("resultant of a zero form".into()));
        }
        if !p.is_homogeneous() {
            return Err(PolyError::Domain("binary form is not homogeneous".into()));
        }
    }
    let m = f.total_degree().unwrap() as usize;
    let n = g.total_degree().unwrap() as usize;
    let a: Vec<BigRational> = (0..=m).map(|i| f.coeff(&Monomial(vec![(m - i) as u32, i as u32]))).collect();
    let b: Vec<BigRational> = (0..=n).map(|i| g.coeff(&Monomial(vec![(n - i) as u32, i as u32]))).collect();
    let size = m + n;
    let mut rows = vec![vec![BigRational::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    Ok(rational_determinant(&rows))
}

pub(crate) fn rational_determinant(rows: &[Vec<BigRational>]) -> BigRational {
    use num_integer::Integer;
    let mut scale = BigInt::one();
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let mut l = BigInt::one();
            for v in row {
                l = l.lcm(v.denom());
            }
            scale *= &l;
            let lr = BigRational::from_integer(l);
            row.iter().map(|v| (v * &lr).to_integer()).collect()
        })
        .collect();
    BigRational::new(linalg::determinant(&ints), scale)
}

fn coefficient_table(f: &MultiPoly, k: usize) -> Result<(u32, Vec<(Monomial, MultiPoly)>), PolyError> {
    let np = f.nvars() - k;
    let tvars: Vec<usize> = (0..k).collect();
    let mut table: HashMap<Monomial, MultiPoly> = HashMap::new();
    let mut deg = None;
    for (m, c) in f.terms() {
        let d = m.degree_in(&tvars);
        match deg {
            None => deg = Some(d),
            Some(e) if e != d => return Err(PolyError::Domain("form is not homogeneous".into())),
            _ => {}
        }
        let tm = Monomial(m.0[..k].to_vec());
        let pm = Monomial(m.0[k..].to_vec());
        table.entry(tm).or_insert_with(|| MultiPoly::zero(np)).add_term(pm, c.clone());
    }
    let deg = deg.ok_or_else(|| PolyError::Domain("zero form".into()))?;
    let mut v: Vec<(Monomial, MultiPoly)> = table.into_iter().collect();
    v.sort_by(|a, b| b.0.cmp(&a.0));
    Ok((deg, v))
}

struct MacaulayData {
    full: Vec<Vec<MultiPoly>>,
    minor: Vec<Vec<MultiPoly>>,
}

fn macaulay_matrices(tables: &[(u32, Vec<(Monomial, MultiPoly)>)], k: usize, np: usize) -> MacaulayData {
    let degs: Vec<u32> = tables.iter().map(|t| t.0).collect();
    let big_d: u32 = degs.iter().map(|d| d - 1).sum::<u32>() + 1;
    let monos = monomials_of_degree(k, big_d);
    let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let n = monos.len();
    let mut full = vec![vec![MultiPoly::zero(np); n]; n];
    let mut nonreduced = Vec::new();
    for (r, m) in monos.iter().enumerate() {
        let divisible: Vec<usize> = (0..k).filter(|&i| m.0[i] >= degs[i]).collect();
        if divisible.len() >= 2 {
            nonreduced.push(r);
        }
        let i = divisible[0];
        let mut shift = m.clone();
        shift.0[i] -= degs[i];
        for (tm, c) in &tables[i].1 {
            let col = index[&tm.mul(&shift)];
            full[r][col] = c.clone();
        }
    }
    let minor = nonreduced
        .iter()
        .map(|&r| nonreduced.iter().map(|&c| full[r][c].clone()).collect())
        .collect();
    MacaulayData { full, minor }
}

fn minor_determinant(m: &[Vec<MultiPoly>], np: usize) -> MultiPoly {
    if m.is_empty() {
        MultiPoly::one(np)
    } else {
        linalg::poly_determinant(m)
    }
}

fn cyclic_shift(f: &MultiPoly, k: usize, s: usize) -> MultiPoly {
    let n = f.nvars();
    let map: Vec<usize> = (0..n).map(|v| if v < k { (v + s) % k } else { v }).collect();
    f.embed(n, &map)
}

/// Macaulay resultant of `forms` (one per homogeneous variable). The first
/// `forms.len()` variables are the homogeneous ones; any further variables are
/// symbolic coefficients, and the result is a polynomial in those.
/// Normalised by `Res(x0^d0, ..., xn^dn) = 1`.
pub fn macaulay_resultant(forms: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
    let k = forms.len();
    if k == 0 {
        return Err(PolyError::Domain("no forms".into()));
    }
    let nv = forms[0].nvars();
    if nv < k || forms.iter().any(|f| f.nvars() != nv) {
        return Err(PolyError::Domain("forms must share a ring with at least as many variables as forms".into()));
    }
    let np = nv - k;
    let tables = forms.iter().map(|f| coefficient_table(f, k)).collect::<Result<Vec<_>, _>>()?;
    let degs: Vec<u32> = tables.iter().map(|t| t.0).collect();
    if degs.contains(&0) {
        return Err(PolyError::Domain("forms of degree zero are not supported".into()));
    }
    let prod_deg: u64 = degs.iter().map(|&d| d as u64).product();

    for s in 0..k {
        let shifted: Vec<MultiPoly> = forms.iter().map(|f| cyclic_shift(f, k, s)).collect();
        let tabs = if s == 0 {
            tables.clone()
        } else {
            shifted.iter().map(|f| coefficient_table(f, k)).collect::<Result<Vec<_>, _>>()?
        };
        let data = macaulay_matrices(&tabs, k, np);
        let den = minor_determinant(&data.minor, np);
        if den.is_zero() {
            continue;
        }
        let num = linalg::poly_determinant(&data.full);
        let res = num.exact_divide(&den).map_err(|_| PolyError::Uncertified("extraneous factor does not divide".into()))?;
        // Res(F o A) = det(A)^(prod deg) Res(F); a cyclic shift has det (-1)^(k-1).
        let odd = (s as u64 * (k as u64 - 1) * prod_deg) % 2 == 1;
        return Ok(if odd { -&res } else { res });
    }
    generalized_characteristic(forms, k, np, &degs)
}

/// Fallback when every extraneous minor vanishes: perturb symbolically by
/// `lambda * x_i^d_i`, divide exactly, and set `lambda = 0`.
fn generalized_characteristic(forms: &[MultiPoly], k: usize, np: usize, degs: &[u32]) -> Result<MultiPoly, PolyError> {
    let nv = k + np + 1;
    let lam = nv - 1;
    let map: Vec<usize> = (0..k + np).collect();
    let perturbed: Vec<MultiPoly> = forms
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut g = f.embed(nv, &map);
            let mut e = vec![0u32; nv];
            e[i] = degs[i];
            e[lam] = 1;
            g.add_term(Monomial(e), BigRational::one());
            g
        })
        .collect();
    let tables = perturbed.iter().map(|f| coefficient_table(f, k)).collect::<Result<Vec<_>, _>>()?;
    let data = macaulay_matrices(&tables, k, np + 1);
    let den = minor_determinant(&data.minor, np + 1);
    if den.is_zero() {
        return Err(PolyError::Uncertified("perturbed extraneous minor vanishes".into()));
    }
    let num = linalg::poly_determinant(&data.full);
    let q = num
        .exact_divide(&den)
        .map_err(|_| PolyError::Uncertified("perturbed quotient is not exact".into()))?;
    let at0 = q.specialize(&[(np, BigRational::zero())]);
    let keep: Vec<usize> = (0..np).collect();
    Ok(MultiPoly::from_terms(
        np,
        at0.terms().map(|(m, c)| (Monomial(keep.iter().map(|&v| m.0[v]).collect()), c.clone())),
    ))
}

/// Bihomogeneous form of bidegree `(k, k)` in `u0..u3, v0..v3`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiForm {
    pub poly: MultiPoly,
    pub k: u32,
}

impl BiForm {
    pub fn new(poly: MultiPoly) -> Result<BiForm, PolyError> {
        if poly.nvars() != 8 {
            return Err(PolyError::ArityMismatch(poly.nvars(), 8));
        }
        if poly.is_zero() {
            return Err(PolyError::Domain("zero biform".into()));
        }
        let u = [0, 1, 2, 3];
        let v = [4, 5, 6, 7];
        let mut k = None;
        for (m, _) in poly.terms() {
            let (a, b) = (m.degree_in(&u), m.degree_in(&v));
            if a != b || k.is_some_and(|e| e != a) {
                return Err(PolyError::Domain("not bihomogeneous of bidegree (k,k)".into()));
            }
            k = Some(a);
        }
        Ok(BiForm { poly, k: k.unwrap() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly_auto, rat};

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly_auto(s, n).unwrap()
    }

    #[test]
    fn sylvester_examples() {
        assert_eq!(sylvester_resultant(&p("x0^2", 2), &p("x1^3", 2)).unwrap(), rat(1));
        assert_eq!(sylvester_resultant(&p("x0 - x1", 2), &p("x0 + x1", 2)).unwrap(), rat(2));
        assert_eq!(sylvester_resultant(&p("x0^2 - x1^2", 2), &p("x0 - x1", 2)).unwrap(), rat(0));
        assert!(sylvester_resultant(&MultiPoly::zero(2), &p("x0", 2)).is_err());
    }

    #[test]
    fn macaulay_normalisation_and_linear_case() {
        let forms = vec![p("x0^2", 3), p("x1^3", 3), p("x2", 3)];
        assert_eq!(macaulay_resultant(&forms).unwrap().constant_value(), rat(1));
        let lin = vec![
            p("2*x0 + x1 - x3", 4),
            p("x1 + 3*x2", 4),
            p("x0 - x2 + 5*x3", 4),
            p("x0 + x1 + x2 + x3", 4),
        ];
        let rows: Vec<Vec<BigRational>> = lin
            .iter()
            .map(|f| (0..4).map(|i| f.coeff(&Monomial::var(4, i))).collect())
            .collect();
        assert_eq!(macaulay_resultant(&lin).unwrap().constant_value(), rational_determinant(&rows));
    }

    #[test]
    fn macaulay_matches_sylvester_for_binary_forms() {
        let f = p("x0^2 + 3*x0*x1 - x1^2", 2);
        let g = p("2*x0^3 - x1^3 + x0*x1^2", 2);
        let s = sylvester_resultant(&f, &g).unwrap();
        let m = macaulay_resultant(&[f, g]).unwrap().constant_value();
        assert_eq!(s, m);
    }

    #[test]
    fn degenerate_minor_falls_back() {
        // Extraneous minor is zero in the unshifted ordering for these forms.
        let forms = vec![p("x1^2 + x0*x2", 3), p("x2", 3), p("x1", 3)];
        let r = macaulay_resultant(&forms).unwrap().constant_value();
        // Common zero [1:0:0] so the resultant vanishes.
        assert_eq!(r, rat(0));
        let forms = vec![p("x0^2 + x1*x2", 3), p("x2", 3), p("x1 + x2", 3)];
        let r = macaulay_resultant(&forms).unwrap().constant_value();
        // Res = F(x_1 ^ x_2 cross product) = F(1, 0, 0) up to the determinant normalisation.
        assert_eq!(r.clone() * r.clone(), rat(1));
    }
}
