use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrimeError {
    #[error("argument out of domain: {0}")]
    Domain(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeTable {
    pub bound: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(bound: u64) -> Self {
        PrimeTable { bound, primes: primes_up_to(bound) }
    }
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest prime factor for every integer up to `n` (0 and 1 map to 0).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// `theta(x) = sum log p`, `psi(x) = sum_{p^k <= x} log p`, `phi(x) = sum log p / p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrimeSums {
    pub theta: f64,
    pub psi: f64,
    pub phi: f64,
}

pub fn prime_sums(x: f64) -> PrimeSums {
    let n = if x < 2.0 { 0 } else { x.floor() as u64 };
    let mut s = PrimeSums { theta: 0.0, psi: 0.0, phi: 0.0 };
    for p in primes_up_to(n) {
        let lp = (p as f64).ln();
        s.theta += lp;
        s.phi += lp / p as f64;
        let mut pk = p;
        while pk <= n {
            s.psi += lp;
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    s
}

/// Sampled comparison of `phi(x)` with `log x`.
#[derive(Clone, Debug, Serialize)]
pub struct MertensReport {
    pub x_max: u64,
    pub step: u64,
    pub samples: usize,
    pub sup_deviation: f64,
    pub argsup: u64,
    /// Smallest constant bounding `|phi(x) - log x|` on the samples.
    pub fitted_epsilon2: f64,
}

pub fn mertens_check(x_max: u64, step: u64) -> Result<MertensReport, PrimeError> {
    if x_max < 2 || step == 0 {
        return Err(PrimeError::Domain("need x_max >= 2 and step >= 1".into()));
    }
    let primes = primes_up_to(x_max);
    let mut xs: Vec<u64> = (0..).map(|k| 2 + k * step).take_while(|&x| x <= x_max).collect();
    if *xs.last().unwrap() != x_max {
        xs.push(x_max);
    }
    let mut phi = 0.0;
    let mut pi = 0;
    let mut sup = 0.0f64;
    let mut arg = xs[0];
    for &x in &xs {
        while pi < primes.len() && primes[pi] <= x {
            let p = primes[pi] as f64;
            phi += p.ln() / p;
            pi += 1;
        }
        let dev = (phi - (x as f64).ln()).abs();
        if dev > sup {
            sup = dev;
            arg = x;
        }
    }
    Ok(MertensReport { x_max, step, samples: xs.len(), sup_deviation: sup, argsup: arg, fitted_epsilon2: sup })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorPrimeSum {
    pub a: u64,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

fn distinct_prime_factors(mut a: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= a {
        if a.is_multiple_of(p) {
            out.push(p);
            while a.is_multiple_of(p) {
                a /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if a > 1 {
        out.push(a);
    }
    out
}

/// `sum_{p | a} log p / p` against `log log |a| + 2`.
pub fn divisor_prime_sum(a: i64) -> Result<DivisorPrimeSum, PrimeError> {
    let m = a.unsigned_abs();
    if m < 2 {
        return Err(PrimeError::Domain("need |a| >= 2".into()));
    }
    let value: f64 = distinct_prime_factors(m).iter().map(|&p| (p as f64).ln() / p as f64).sum();
    let bound = (m as f64).ln().ln() + 2.0;
    Ok(DivisorPrimeSum { a: m, value, bound, holds: value <= bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorScan {
    pub max: u64,
    pub violations: Vec<u64>,
    pub min_slack: f64,
    pub argmin: u64,
}

/// Check the divisor prime-sum bound for every `2 <= a <= max`.
pub fn divisor_prime_sum_scan(max: u64) -> DivisorScan {
    let n = max as usize;
    let spf = smallest_prime_factors(n);
    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut argmin = 2;
    for a in 2..=n {
        let mut v = 0.0;
        let mut m = a;
        while m > 1 {
            let p = spf[m] as usize;
            v += (p as f64).ln() / p as f64;
            while m % p == 0 {
                m /= p;
            }
        }
        let slack = (a as f64).ln().ln() + 2.0 - v;
        if slack < 0.0 {
            violations.push(a as u64);
        }
        if slack < min_slack {
            min_slack = slack;
            argmin = a as u64;
        }
    }
    DivisorScan { max, violations, min_slack, argmin }
}

/// Largest prime in `(R/2, R]`.
pub fn bertrand_prime(r: u64) -> Result<u64, PrimeError> {
    if r < 2 {
        return Err(PrimeError::Domain("need R >= 2".into()));
    }
    let mut p = r;
    while 2 * p > r {
        if is_prime(p) {
            return Ok(p);
        }
        p -= 1;
    }
    Err(PrimeError::Domain(format!("no prime in ({}/2, {}]", r, r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_tables() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(primes_up_to(1).is_empty());
        let spf = smallest_prime_factors(20);
        assert_eq!(spf[12], 2);
        assert_eq!(spf[15], 3);
        assert_eq!(spf[17], 17);
    }

    #[test]
    fn prime_sums_at_ten() {
        let s = prime_sums(10.0);
        let theta = (2.0f64 * 3.0 * 5.0 * 7.0).ln();
        assert!((s.theta - theta).abs() < 1e-12);
        let psi = theta + 2f64.ln() * 2.0 + 3f64.ln();
        assert!((s.psi - psi).abs() < 1e-12);
        let phi: f64 = [2.0f64, 3.0, 5.0, 7.0].iter().map(|p| p.ln() / p).sum();
        assert!((s.phi - phi).abs() < 1e-12);
    }

    #[test]
    fn mertens_at_two() {
        let r = mertens_check(2, 1).unwrap();
        assert!((r.sup_deviation - 0.34657).abs() < 1e-4);
        assert_eq!(r.argsup, 2);
    }

    #[test]
    fn divisor_sum_examples() {
        let d = divisor_prime_sum(2).unwrap();
        assert!((d.value - 0.3466).abs() < 1e-4);
        assert!(d.holds);
        assert!(divisor_prime_sum(1).is_err());
        assert!(divisor_prime_sum(-30).unwrap().holds);
    }

    #[test]
    fn bertrand_examples() {
        assert_eq!(bertrand_prime(2).unwrap(), 2);
        assert_eq!(bertrand_prime(10).unwrap(), 7);
        assert_eq!(bertrand_prime(100).unwrap(), 97);
        assert!(bertrand_prime(1).is_err());
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let sieve = primes_up_to(10_000);
        let mr: Vec<u64> = (0..=10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }
}
