//! Exact arithmetic over Q and finite fields, prime tables and the elementary
//! prime sums used by the counting bounds.

mod ff;
mod primes;

pub use ff::{
    ff_factor_linear, reduce_mod_p, FfError, FfLinearFactor, FqPoly, GaloisField,
};
pub use primes::{
    bertrand_prime, PrimeError, divisor_prime_sum, divisor_prime_sum_scan, is_prime, mertens_check, prime_sums,
    primes_up_to, smallest_prime_factors, DivisorPrimeSum, DivisorScan, MertensReport, PrimeSums,
    PrimeTable,
};

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

/// Arithmetic data of the ground field. Only `Q` is implemented; the fields
/// exist so the bound evaluators read them instead of hard-coding `Q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldContext {
    pub degree: u32,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub minkowski_constant: BigRational,
    /// Ratio `R / (lower end)` of the Bertrand interval `(R/2, R]`.
    pub bertrand_factor: u32,
}

impl FieldContext {
    pub fn rational() -> Self {
        FieldContext { degree: 1, minkowski_constant: BigRational::one(), bertrand_factor: 2 }
    }
}

impl Default for FieldContext {
    fn default() -> Self {
        Self::rational()
    }
}
