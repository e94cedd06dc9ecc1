use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Monomial, MultiPoly};
use crate::linalg;

/// Minimal number `k` of linear forms `l_1..l_k` with `f` in `Q[l_1..l_k]`, and a
/// basis of such forms (coefficient vectors). In characteristic zero this is the
/// rank of the coefficient matrix of the first partial derivatives.
pub fn essential_variable_count(f: &MultiPoly) -> (usize, Vec<Vec<BigInt>>) {
    let n = f.nvars();
    let derivs: Vec<MultiPoly> = (0..n).map(|i| f.partial_derivative(i)).collect();
    let mut cols: BTreeMap<Monomial, usize> = BTreeMap::new();
    for d in &derivs {
        for (m, _) in d.terms() {
            let next = cols.len();
            cols.entry(m.clone()).or_insert(next);
        }
    }
    // Transposed matrix: one row per monomial, one column per variable. Its row
    // space is spanned by the essential linear forms.
    let mut rows = vec![vec![BigRational::zero(); n]; cols.len()];
    for (i, d) in derivs.iter().enumerate() {
        for (m, c) in d.terms() {
            rows[cols[m]][i] = c.clone();
        }
    }
    let e = linalg::fraction_free_echelon(&linalg::integer_rows(&rows), n);
    let k = e.rank();
    let basis = e.rows[..k]
        .iter()
        .map(|r| {
            let v: Vec<BigRational> = r.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            linalg::primitive_integer_vector(&v)
        })
        .collect();
    (k, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly_auto;

    #[test]
    fn examples() {
        let f = parse_poly_auto("(x0)^3", 2);
        assert!(f.is_err());
        let f = parse_poly_auto("x0^3 + 3*x0^2*x1 + 3*x0*x1^2 + x1^3", 2).unwrap();
        let (k, b) = essential_variable_count(&f);
        assert_eq!(k, 1);
        assert_eq!(b[0], vec![BigInt::from(1), BigInt::from(1)]);
        let (k, _) = essential_variable_count(&parse_poly_auto("x0*x1", 2).unwrap());
        assert_eq!(k, 2);
        let fermat = parse_poly_auto("x0^3 + x1^3 + x2^3 + x3^3", 4).unwrap();
        assert_eq!(essential_variable_count(&fermat).0, 4);
        let cyl = parse_poly_auto("x0^3 + 3*x0^2*x1 + 3*x0*x1^2 + x1^3 + x2^3", 4).unwrap();
        assert_eq!(essential_variable_count(&cyl).0, 2);
    }
}
