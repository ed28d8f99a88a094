//! Fractional binomial coefficients.
//!
//! The operator of order `a` is the lower-triangular Toeplitz matrix whose
//! `i`-th subdiagonal holds
//!
//! ```text
//! c_i(a) = (-1)^i Γ(a+1) / (i! Γ(a-i+1))
//! ```
//!
//! i.e. the Taylor coefficients of `(1 - z)^a`. They are generated with the
//! multiplicative recurrence `c_i = c_{i-1} (i-1-a) / i`, which never touches
//! a Gamma pole and stays finite for every real order.

use serde::Serialize;

use crate::error::{Error, Result};

/// Series length used when callers do not ask for one.
pub const DEFAULT_LEN: usize = 128;

/// A validated fractional order.
///
/// Any finite real is accepted except the negative integers, where
/// `Γ(a + 1)` has a pole.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain {
                value,
                reason: "order must be finite".into(),
            });
        }
        if value < 0.0 && value == value.round() {
            return Err(Error::Domain {
                value,
                reason: format!(
                    "Gamma(order + 1) has a pole at {} (order is a negative integer)",
                    value + 1.0
                ),
            });
        }
        Ok(FracOrder(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `Some(m)` when the order is the nonnegative integer `m`.
    pub fn as_integer(self) -> Option<u64> {
        (self.0 >= 0.0 && self.0 == self.0.round()).then_some(self.0 as u64)
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Prefix `c_0 .. c_{N-1}` of the coefficient series of some order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffSeries {
    order: f64,
    terms: Vec<f64>,
}

impl CoeffSeries {
    /// Exponent `a` of `(1 - z)^a`. For inverse series this is `-order`,
    /// which may be a negative integer.
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn into_terms(self) -> Vec<f64> {
        self.terms
    }

    /// Coefficient `c_i`, extending the recurrence past the stored prefix.
    pub fn coeff(&self, i: usize) -> f64 {
        if let Some(&c) = self.terms.get(i) {
            return c;
        }
        let mut c = *self.terms.last().expect("series is never empty");
        for j in self.terms.len()..=i {
            c *= (j as f64 - 1.0 - self.order) / j as f64;
        }
        c
    }
}

/// Coefficients of `(1 - z)^exponent` for an arbitrary real exponent.
pub(crate) fn raw_coeffs(exponent: f64, n: usize) -> Vec<f64> {
    let mut terms = Vec::with_capacity(n);
    if n == 0 {
        return terms;
    }
    terms.push(1.0);
    let mut c = 1.0;
    for i in 1..n {
        c *= (i as f64 - 1.0 - exponent) / i as f64;
        terms.push(c);
    }
    terms
}

/// First `n` coefficients of the forward operator of the given order.
pub fn frac_coeffs(order: FracOrder, n: usize) -> Result<CoeffSeries> {
    if n == 0 {
        return Err(Error::usage("series length must be at least 1"));
    }
    Ok(CoeffSeries {
        order: order.value(),
        terms: raw_coeffs(order.value(), n),
    })
}

/// First `n` coefficients of the inverse operator, i.e. of order `-order`.
///
/// Defined for every valid order, including positive integers whose negation
/// is not itself a valid [`FracOrder`].
pub fn inverse_coeffs(order: FracOrder, n: usize) -> Result<CoeffSeries> {
    if n == 0 {
        return Err(Error::usage("series length must be at least 1"));
    }
    Ok(CoeffSeries {
        order: -order.value(),
        terms: raw_coeffs(-order.value(), n),
    })
}

/// Cauchy product of two equal-length prefixes.
pub fn convolve(a: &CoeffSeries, b: &CoeffSeries) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::usage(format!(
            "cannot convolve series of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(cauchy_product(a.terms(), b.terms()))
}

pub(crate) fn cauchy_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum())
        .collect()
}

/// Absolute sum of a coefficient series with an estimate of the part beyond
/// the computed prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSum {
    /// `Σ |c_i|` over the stored prefix.
    pub prefix: f64,
    /// Estimated `Σ_{i >= N} |c_i|`; `+inf` when unbounded.
    pub tail: f64,
    /// The absolute series does not converge.
    pub unbounded: bool,
}

impl TailSum {
    pub fn total(&self) -> f64 {
        self.prefix + self.tail
    }
}

/// `Σ |c_i|` over the prefix plus an estimate of the remainder.
///
/// Once `i > a` the terms keep a fixed sign and satisfy
/// `|c_{i+1}| / |c_i| = 1 - (a+1)/(i+1)`, so they decay like `i^{-(a+1)}`.
/// That ratio law gives the remainder in closed form,
/// `Σ_{i >= N} |c_i| = |c_N| N / a`, valid for `a > 0`; for `a <= 0` with
/// nonzero terms the series is not summable and the tail is flagged.
pub fn tail_sum_bound(series: &CoeffSeries) -> TailSum {
    let a = series.order();
    let n = series.len();
    let prefix: f64 = series.terms().iter().map(|c| c.abs()).sum();

    if a >= 0.0 && a == a.round() && (n as f64) > a {
        return TailSum { prefix, tail: 0.0, unbounded: false };
    }
    if a <= 0.0 {
        return TailSum { prefix, tail: f64::INFINITY, unbounded: true };
    }

    // Walk forward until the ratio law holds (sign has settled).
    let mut i = n;
    let mut extra = 0.0;
    let mut c = series.coeff(n);
    while (i as f64) <= a {
        extra += c.abs();
        c *= (i as f64 - a) / (i as f64 + 1.0);
        i += 1;
    }
    let tail = extra + c.abs() * i as f64 / a;
    TailSum { prefix, tail, unbounded: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    fn assert_rel(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            let scale = w.abs().max(1e-300);
            assert!((g - w).abs() <= tol * scale, "got {g}, want {w}");
        }
    }

    #[test]
    fn reproduces_published_expansions() {
        let half = frac_coeffs(order(0.5), 5).unwrap();
        assert_rel(half.terms(), &[1.0, -0.5, -1.0 / 8.0, -1.0 / 16.0, -5.0 / 128.0], 1e-12);
        let neg_half = frac_coeffs(order(-0.5), 5).unwrap();
        assert_rel(neg_half.terms(), &[1.0, 0.5, 3.0 / 8.0, 5.0 / 16.0, 35.0 / 128.0], 1e-12);
        let two_thirds = frac_coeffs(order(2.0 / 3.0), 5).unwrap();
        assert_rel(
            two_thirds.terms(),
            &[1.0, -2.0 / 3.0, -1.0 / 9.0, -4.0 / 81.0, -7.0 / 243.0],
            1e-12,
        );
    }

    #[test]
    fn integer_orders() {
        assert_eq!(frac_coeffs(order(0.0), 4).unwrap().terms(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(frac_coeffs(order(1.0), 4).unwrap().terms(), &[1.0, -1.0, 0.0, 0.0]);
        assert_eq!(
            frac_coeffs(order(3.0), 6).unwrap().terms(),
            &[1.0, -3.0, 3.0, -1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn rejects_poles_and_non_finite() {
        for bad in [-1.0, -2.0, -7.0, f64::NAN, f64::INFINITY] {
            let err = FracOrder::new(bad).unwrap_err();
            assert!(matches!(err, Error::Domain { .. }), "{bad}");
        }
        let msg = FracOrder::new(-2.0).unwrap_err().to_string();
        assert!(msg.contains("pole at -1"), "{msg}");
        assert!(FracOrder::new(-1.5).is_ok());
    }

    #[test]
    fn zero_length_is_usage_error() {
        assert!(matches!(frac_coeffs(order(0.5), 0), Err(Error::Usage(_))));
    }

    #[test]
    fn sign_pattern_for_unit_interval_orders() {
        for a in [0.1, 0.5, 0.9] {
            let s = frac_coeffs(order(a), 200).unwrap();
            assert!(s.terms()[0] > 0.0);
            assert!(s.terms()[1..].iter().all(|&c| c < 0.0));
            let mut partial = 0.0;
            let mut prev = f64::INFINITY;
            for &c in s.terms() {
                partial += c;
                assert!(partial > 0.0 && partial <= prev);
                prev = partial;
            }
        }
    }

    #[test]
    fn convolution_identities() {
        let half = frac_coeffs(order(0.5), 5).unwrap();
        let sq = convolve(&half, &half).unwrap();
        assert_rel(&sq[..2], &[1.0, -1.0], 1e-15);
        assert!(sq[2..].iter().all(|c| c.abs() < 1e-15));

        let id = frac_coeffs(order(0.0), 5).unwrap();
        assert_eq!(convolve(&id, &half).unwrap(), half.terms());

        let short = frac_coeffs(order(0.5), 4).unwrap();
        assert!(matches!(convolve(&half, &short), Err(Error::Usage(_))));
    }

    #[test]
    fn coeff_extends_past_prefix() {
        let s = frac_coeffs(order(0.5), 3).unwrap();
        let long = frac_coeffs(order(0.5), 10).unwrap();
        for i in 0..10 {
            assert_eq!(s.coeff(i), long.terms()[i]);
        }
    }

    #[test]
    fn tail_sum_of_first_difference_is_exact() {
        let t = tail_sum_bound(&frac_coeffs(order(1.0), 10).unwrap());
        assert_eq!(t.prefix, 2.0);
        assert_eq!(t.tail, 0.0);
        assert!(!t.unbounded);
    }

    #[test]
    fn tail_sum_handles_orders_above_the_prefix() {
        // a = 3.5 with only two stored terms: the tail walk must pass i = 3.
        let short = tail_sum_bound(&frac_coeffs(order(3.5), 2).unwrap());
        let long = tail_sum_bound(&frac_coeffs(order(3.5), 4000).unwrap());
        assert!((short.total() - long.total()).abs() < 1e-9 * long.total());
    }
}
