use std::cmp::Ordering;

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then lexicographically with `x0 > x1 > ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree counted only over the listed variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.0[v]).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` if it exists.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of exact degree `d` in `n` variables, in descending graded-lex order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(n, d, 0, &mut cur, &mut out);
    out
}

fn fill(n: usize, rem: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if n == 0 {
        if rem == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = rem;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in (0..=rem).rev() {
        cur[pos] = e;
        fill(n, rem - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// All monomials of degree at most `d`, descending graded-lex.
pub fn monomials_up_to_degree(n: usize, d: u32) -> Vec<Monomial> {
    (0..=d).rev().flat_map(|k| monomials_of_degree(n, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![1, 0, 0]);
        let b = Monomial(vec![0, 1, 0]);
        let c = Monomial(vec![0, 0, 2]);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial(vec![1, 0, 1]) > Monomial(vec![0, 2, 0]));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let m = monomials_of_degree(4, 2);
        assert_eq!(m.len(), 10);
        for w in m.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert_eq!(monomials_up_to_degree(3, 2).len(), 10);
        assert_eq!(monomials_of_degree(0, 0).len(), 1);
    }
}
