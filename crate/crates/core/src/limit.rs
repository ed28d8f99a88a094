//! Limit and supremum estimation from geometrically spaced samples.
//!
//! Every `lim` and `sup` appearing in the membership, norm and compactness
//! conditions is evaluated here. A quantity is sampled at indices
//! `m, 2m, 4m, ...`; the last three samples decide the verdict:
//!
//! * converged: successive samples differ by at most `eps` (and, for
//!   sequence limits, the trailing window does not oscillate by more than
//!   `eps`);
//! * diverging: magnitudes grow monotonically, either by a factor of at least
//!   1.5 per step or with increments that do not shrink;
//! * undetermined: anything else.
//!
//! These are evidence about the infinite object, not proofs.

use serde::Serialize;

use crate::report::finite_or_tag;

/// Growth factor per sample step that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Converged,
    Diverging,
    Undetermined,
}

impl LimitStatus {
    /// Combined status of several estimates: diverging wins, then
    /// undetermined.
    pub fn combine(self, other: LimitStatus) -> LimitStatus {
        use LimitStatus::*;
        match (self, other) {
            (Diverging, _) | (_, Diverging) => Diverging,
            (Undetermined, _) | (_, Undetermined) => Undetermined,
            _ => Converged,
        }
    }
}

/// One evaluation of the quantity at a given index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub index: usize,
    #[serde(serialize_with = "finite_or_tag")]
    pub value: f64,
}

/// Estimated value of a limit (or supremum) together with the evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    #[serde(serialize_with = "finite_or_tag")]
    pub value: f64,
    pub status: LimitStatus,
    #[serde(serialize_with = "finite_or_tag")]
    pub residual: f64,
    pub samples: Vec<Sample>,
}

impl LimitEstimate {
    /// A value known exactly, e.g. a sum over a declared finite support.
    pub fn exact(value: f64) -> Self {
        LimitEstimate {
            value,
            status: LimitStatus::Converged,
            residual: 0.0,
            samples: vec![Sample { index: 0, value }],
        }
    }

    pub fn exact_at(index: usize, value: f64) -> Self {
        LimitEstimate {
            samples: vec![Sample { index, value }],
            ..LimitEstimate::exact(value)
        }
    }

    pub fn undetermined(samples: Vec<Sample>) -> Self {
        let value = samples.last().map_or(f64::NAN, |s| s.value);
        LimitEstimate {
            value,
            status: LimitStatus::Undetermined,
            residual: f64::INFINITY,
            samples,
        }
    }

    /// Limit of a sequence from its samples; `spread` is the oscillation
    /// (max - min) over the trailing window after the last sample.
    pub fn from_trail(samples: Vec<Sample>, spread: f64, eps: f64) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let value = values.last().copied().unwrap_or(f64::NAN);
        if values.iter().any(|v| !v.is_finite()) {
            let status = if values.last().is_some_and(|v| v.is_infinite()) {
                LimitStatus::Diverging
            } else {
                LimitStatus::Undetermined
            };
            return LimitEstimate { value, status, residual: f64::INFINITY, samples };
        }
        if values.len() < 3 {
            return LimitEstimate::undetermined(samples);
        }
        let tail = &values[values.len() - 3..];
        let residual = (tail[1] - tail[0])
            .abs()
            .max((tail[2] - tail[1]).abs())
            .max(spread);
        let status = if residual <= eps {
            LimitStatus::Converged
        } else if grows(tail, eps) {
            LimitStatus::Diverging
        } else {
            LimitStatus::Undetermined
        };
        LimitEstimate { value, status, residual, samples }
    }

    /// Supremum of a sequence from the running maximum sampled at
    /// geometrically spaced indices. Bounded when the running maximum has
    /// stopped increasing over the last step.
    pub fn from_running_sup(samples: Vec<Sample>, eps: f64) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let value = values.last().copied().unwrap_or(f64::NAN);
        if values.iter().any(|v| v.is_nan()) {
            return LimitEstimate::undetermined(samples);
        }
        if value.is_infinite() {
            return LimitEstimate {
                value,
                status: LimitStatus::Diverging,
                residual: f64::INFINITY,
                samples,
            };
        }
        if values.len() < 3 {
            return LimitEstimate::undetermined(samples);
        }
        let tail = &values[values.len() - 3..];
        let scale = eps * tail[2].abs().max(1.0);
        let residual = tail[2] - tail[1];
        let status = if residual <= scale {
            LimitStatus::Converged
        } else if grows(tail, scale) {
            LimitStatus::Diverging
        } else {
            LimitStatus::Undetermined
        };
        LimitEstimate { value, status, residual: residual.max(0.0), samples }
    }

    pub fn is_converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    /// Converged to a value within `eps` of zero.
    pub fn is_zero(&self, eps: f64) -> bool {
        self.is_converged() && self.value.abs() <= eps
    }

    /// `|self|` with status and trail kept.
    pub fn abs(mut self) -> Self {
        self.value = self.value.abs();
        for s in &mut self.samples {
            s.value = s.value.abs();
        }
        self
    }

    /// Combines two estimates elementwise with `op`; statuses are combined
    /// and residuals add.
    pub fn zip_with(&self, other: &LimitEstimate, op: impl Fn(f64, f64) -> f64) -> Self {
        let samples = if self.samples.len() == other.samples.len() {
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| Sample { index: a.index.max(b.index), value: op(a.value, b.value) })
                .collect()
        } else {
            vec![Sample {
                index: self.samples.last().map_or(0, |s| s.index),
                value: op(self.value, other.value),
            }]
        };
        LimitEstimate {
            value: op(self.value, other.value),
            status: self.status.combine(other.status),
            residual: self.residual + other.residual,
            samples,
        }
    }
}

/// Last three magnitudes increase and the growth is not decaying.
fn grows(tail: &[f64], floor: f64) -> bool {
    let m: Vec<f64> = tail.iter().map(|v| v.abs()).collect();
    let d1 = m[1] - m[0];
    let d2 = m[2] - m[1];
    if d1 <= floor || d2 <= floor {
        return false;
    }
    let by_factor = m[0] > 0.0 && m[1] >= DIVERGENCE_FACTOR * m[0] && m[2] >= DIVERGENCE_FACTOR * m[1];
    by_factor || d2 >= d1
}

/// `start, 2 start, 4 start, ...` up to and including `end`.
pub fn geometric_points(start: usize, end: usize) -> Vec<usize> {
    let mut points = Vec::new();
    let mut p = start.max(1);
    while p <= end {
        points.push(p);
        p *= 2;
    }
    points
}

/// `lim_n f(n)` sampled at `points`, with the oscillation of `f` over
/// `window` indices after the last point.
pub fn sequence_limit(
    f: impl Fn(usize) -> f64,
    points: &[usize],
    window: usize,
    eps: f64,
) -> LimitEstimate {
    let samples: Vec<Sample> = points.iter().map(|&n| Sample { index: n, value: f(n) }).collect();
    let spread = match points.last() {
        Some(&last) => {
            let (lo, hi) = (last..last + window)
                .map(&f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            hi - lo
        }
        None => f64::INFINITY,
    };
    LimitEstimate::from_trail(samples, spread, eps)
}

/// `Σ_{j >= 0} term(j)` from partial sums at `points` (each an exclusive
/// upper index), with the oscillation of the partial sums over the last
/// `window` terms.
pub fn series_limit(
    term: impl Fn(usize) -> f64,
    points: &[usize],
    window: usize,
    eps: f64,
) -> LimitEstimate {
    let Some(&last) = points.last() else {
        return LimitEstimate::undetermined(Vec::new());
    };
    let end = last + window;
    let mut partial = 0.0;
    let mut samples = Vec::with_capacity(points.len());
    let mut next = points.iter().peekable();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..end {
        while next.peek().is_some_and(|&&p| p == j) {
            samples.push(Sample { index: j, value: partial });
            next.next();
        }
        if j >= last {
            lo = lo.min(partial);
            hi = hi.max(partial);
        }
        partial += term(j);
    }
    lo = lo.min(partial);
    hi = hi.max(partial);
    LimitEstimate::from_trail(samples, hi - lo, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-8;

    #[test]
    fn constant_sequence_converges() {
        let est = sequence_limit(|_| 3.0, &geometric_points(8, 64), 16, EPS);
        assert_eq!(est.status, LimitStatus::Converged);
        assert_eq!(est.value, 3.0);
        assert_eq!(est.residual, 0.0);
    }

    #[test]
    fn alternating_sequence_is_not_fooled_by_even_samples() {
        let f = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let est = sequence_limit(f, &geometric_points(8, 64), 16, EPS);
        assert_eq!(est.status, LimitStatus::Undetermined);
        assert_eq!(est.residual, 2.0);
    }

    #[test]
    fn geometric_growth_diverges() {
        let est = sequence_limit(|n| n as f64 * n as f64, &geometric_points(8, 64), 4, EPS);
        assert_eq!(est.status, LimitStatus::Diverging);
    }

    #[test]
    fn sqrt_growth_diverges_through_increments() {
        let est = sequence_limit(|n| (n as f64).sqrt(), &geometric_points(8, 512), 4, EPS);
        assert_eq!(est.status, LimitStatus::Diverging);
    }

    #[test]
    fn slow_convergence_is_undetermined() {
        let est = sequence_limit(|n| 1.0 - 1.0 / n as f64, &geometric_points(8, 512), 4, EPS);
        assert_eq!(est.status, LimitStatus::Undetermined);
    }

    #[test]
    fn geometric_series_converges() {
        let est = series_limit(|j| 0.5f64.powi(j as i32), &geometric_points(16, 128), 16, EPS);
        assert_eq!(est.status, LimitStatus::Converged);
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_series_diverges() {
        let est = series_limit(|j| 1.0 / (j + 1) as f64, &geometric_points(16, 1024), 16, EPS);
        assert_eq!(est.status, LimitStatus::Diverging);
    }

    #[test]
    fn running_sup_bounded_and_unbounded() {
        let pts = geometric_points(8, 256);
        let flat: Vec<Sample> = pts.iter().map(|&i| Sample { index: i, value: 2.0 }).collect();
        assert!(LimitEstimate::from_running_sup(flat, EPS).is_converged());
        let growing: Vec<Sample> =
            pts.iter().map(|&i| Sample { index: i, value: (i as f64).sqrt() }).collect();
        assert_eq!(
            LimitEstimate::from_running_sup(growing, EPS).status,
            LimitStatus::Diverging
        );
    }

    #[test]
    fn too_few_samples_is_undetermined() {
        let est = sequence_limit(|_| 1.0, &[8, 16], 4, EPS);
        assert_eq!(est.status, LimitStatus::Undetermined);
    }

    #[test]
    fn status_combination() {
        use LimitStatus::*;
        assert_eq!(Converged.combine(Converged), Converged);
        assert_eq!(Converged.combine(Undetermined), Undetermined);
        assert_eq!(Undetermined.combine(Diverging), Diverging);
    }
}
