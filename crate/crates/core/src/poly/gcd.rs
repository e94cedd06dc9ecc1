//! Gcd in Q[t1, t2] by primitive remainder sequences over Q[t2][t1], and
//! content extraction with respect to a set of coefficient variables.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::univariate::UniPoly;
use super::{Monomial, MultiPoly};

type Bi = Vec<UniPoly>;

fn to_bi(p: &MultiPoly) -> Bi {
    let mut out: Bi = Vec::new();
    for (m, c) in p.terms() {
        let (i, j) = (m.0[0] as usize, m.0[1] as usize);
        if out.len() <= i {
            out.resize(i + 1, UniPoly::zero());
        }
        let u = &mut out[i].0;
        if u.len() <= j {
            u.resize(j + 1, num_rational::BigRational::zero());
        }
        u[j] += c;
    }
    trim(out)
}

fn from_bi(b: &Bi) -> MultiPoly {
    let mut p = MultiPoly::zero(2);
    for (i, u) in b.iter().enumerate() {
        for (j, c) in u.0.iter().enumerate() {
            p.add_term(Monomial(vec![i as u32, j as u32]), c.clone());
        }
    }
    p
}

fn trim(mut b: Bi) -> Bi {
    for u in b.iter_mut() {
        *u = std::mem::replace(u, UniPoly::zero()).trimmed();
    }
    while b.last().is_some_and(|u| u.is_zero()) {
        b.pop();
    }
    b
}

fn cont(b: &Bi) -> UniPoly {
    let mut g = UniPoly::zero();
    for u in b {
        g = g.gcd(u);
        if g.degree() == Some(0) {
            break;
        }
    }
    g
}

fn div_coeffs(b: &Bi, c: &UniPoly) -> Bi {
    trim(
        b.iter()
            .map(|u| {
                let (q, r) = u.divrem(c);
                debug_assert!(r.is_zero());
                q
            })
            .collect(),
    )
}

fn pp(b: &Bi) -> Bi {
    if b.is_empty() {
        return b.clone();
    }
    div_coeffs(b, &cont(b))
}

fn prem(a: &Bi, b: &Bi) -> Bi {
    let db = b.len() - 1;
    let lc = b[db].clone();
    let mut r = a.clone();
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Bi = r.iter().map(|u| u.mul(&lc)).collect();
        for (k, u) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&u.mul(&lr));
        }
        r = trim(next);
    }
    r
}

/// Gcd of two polynomials in two variables, normalised primitive with positive
/// leading coefficient.
pub fn gcd_bivariate(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.nvars(), 2);
    assert_eq!(b.nvars(), 2);
    let (ba, bb) = (to_bi(a), to_bi(b));
    if ba.is_empty() {
        return b.primitive();
    }
    if bb.is_empty() {
        return a.primitive();
    }
    let c = cont(&ba).gcd(&cont(&bb));
    let mut x = pp(&ba);
    let mut y = pp(&bb);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { pp(&r) };
    }
    let g: Bi = x.iter().map(|u| u.mul(&c)).collect();
    from_bi(&trim(g)).primitive()
}

/// Split `f` as `content * primitive`, where the content is the gcd of the
/// coefficients of `f` viewed as a polynomial in the remaining variables with
/// coefficients in `Q[coeff_vars]` (at most two coefficient variables).
pub fn content_in(f: &MultiPoly, coeff_vars: &[usize]) -> (MultiPoly, MultiPoly) {
    assert!(
        (1..=2).contains(&coeff_vars.len()),
        "one or two coefficient variables"
    );
    let n = f.nvars();
    if f.is_zero() {
        return (MultiPoly::zero(n), f.clone());
    }
    let mut groups: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let mut outer = m.0.clone();
        let mut inner = vec![0u32; 2];
        for (k, &v) in coeff_vars.iter().enumerate() {
            inner[k] = outer[v];
            outer[v] = 0;
        }
        groups
            .entry(outer)
            .or_insert_with(|| MultiPoly::zero(2))
            .add_term(Monomial(inner), c.clone());
    }
    let mut g = MultiPoly::zero(2);
    for p in groups.values() {
        g = gcd_bivariate(&g, p);
        if g.is_constant() {
            break;
        }
    }
    // With one coefficient variable the second slot of `g` is never used.
    let map = [coeff_vars[0], *coeff_vars.get(1).unwrap_or(&coeff_vars[0])];
    let content = g.embed(n, &map);
    let prim = f.exact_divide(&content).expect("content divides f");
    let (c, prim) = prim.content_primitive();
    (content.scale(&c), prim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly_auto, rat};

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly_auto(s, n).unwrap()
    }

    #[test]
    fn bivariate_gcd_examples() {
        let a = p("x0^2 - x1^2", 2);
        let b = p("x0^2 + 2*x0*x1 + x1^2", 2);
        assert_eq!(gcd_bivariate(&a, &b), p("x0 + x1", 2));
        let a = p("x0^3*x1 + x0*x1^3", 2);
        let b = p("x0^2*x1^2", 2);
        assert_eq!(gcd_bivariate(&a, &b), p("x0*x1", 2));
        assert_eq!(gcd_bivariate(&p("x0", 2), &p("x1", 2)), p("1", 2));
        assert_eq!(gcd_bivariate(&p("6*x1^2", 2), &p("4*x1", 2)), p("x1", 2));
    }

    #[test]
    fn content_over_parameters() {
        // variables: x0, x1 outer; x2, x3 the parameters t1, t2
        let f = p("x2^2*x0 + x2^2*x1", 4);
        let (c, q) = content_in(&f, &[2, 3]);
        assert_eq!(c, p("x2^2", 4));
        assert_eq!(q, p("x0 + x1", 4));
        let f = p("2*x2*x0 - 2*x3*x0 + 4*x2*x1 - 4*x3*x1", 4);
        let (c, q) = content_in(&f, &[2, 3]);
        assert_eq!(&c * &q, f);
        assert_eq!(q, p("x0 + 2*x1", 4));
        assert_eq!(c.total_degree(), Some(1));
        let (c, _) = content_in(&p("x0 + x1", 4), &[2, 3]);
        assert_eq!(c, MultiPoly::constant(4, rat(1)));
    }

    #[test]
    fn single_parameter_content() {
        let f = p("x2*x0 + x2^2*x1", 3);
        let (c, q) = content_in(&f, &[2]);
        assert_eq!(c, p("x2", 3));
        assert_eq!(q, p("x0 + x2*x1", 3));
    }
}
