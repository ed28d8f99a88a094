//! Membership of truncated sequences in the difference sequence spaces
//! `c0(Δ^a)`, `c(Δ^a)` and `l∞(Δ^a)`, the norm `sup_n |(Δ^a x)_n|`, and
//! expansion in the Schauder basis of the first two spaces.
//!
//! A finite window can never prove membership; verdicts are read off the
//! trailing `window` terms of `y = Δ^a x`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coeffs::{inverse_coeffs, FracOrder};
use crate::error::{Error, Result};
use crate::fracop::{apply_forward, toeplitz_apply, Seq};
use crate::report::opt_finite_or_tag;
use crate::tolerance::ToleranceConfig;

/// Sequence spaces: the three difference domains and the classical
/// codomains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceId {
    #[serde(rename = "c0d")]
    C0Delta,
    #[serde(rename = "cd")]
    CDelta,
    #[serde(rename = "linfd")]
    LinfDelta,
    #[serde(rename = "c0")]
    C0,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "linf")]
    Linf,
    #[serde(rename = "l1")]
    L1,
}

impl SpaceId {
    pub const DOMAINS: [SpaceId; 3] = [SpaceId::LinfDelta, SpaceId::C0Delta, SpaceId::CDelta];
    pub const CODOMAINS: [SpaceId; 4] = [SpaceId::Linf, SpaceId::C0, SpaceId::C, SpaceId::L1];

    pub fn tag(self) -> &'static str {
        match self {
            SpaceId::C0Delta => "c0d",
            SpaceId::CDelta => "cd",
            SpaceId::LinfDelta => "linfd",
            SpaceId::C0 => "c0",
            SpaceId::C => "c",
            SpaceId::Linf => "linf",
            SpaceId::L1 => "l1",
        }
    }

    pub fn is_domain(self) -> bool {
        matches!(self, SpaceId::C0Delta | SpaceId::CDelta | SpaceId::LinfDelta)
    }

    pub fn is_codomain(self) -> bool {
        !self.is_domain()
    }

    pub(crate) fn require_domain(self) -> Result<()> {
        if self.is_domain() {
            Ok(())
        } else {
            Err(Error::usage(format!("{} is not a difference domain (use c0d, cd or linfd)", self)))
        }
    }

    pub(crate) fn require_codomain(self) -> Result<()> {
        if self.is_codomain() {
            Ok(())
        } else {
            Err(Error::usage(format!("{} is not a codomain (use c0, c, linf or l1)", self)))
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SpaceId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "c0d" => SpaceId::C0Delta,
            "cd" => SpaceId::CDelta,
            "linfd" => SpaceId::LinfDelta,
            "c0" => SpaceId::C0,
            "c" => SpaceId::C,
            "linf" => SpaceId::Linf,
            "l1" => SpaceId::L1,
            other => {
                return Err(Error::usage(format!(
                    "unknown space {other:?} (expected c0d, cd, linfd, c0, c, linf or l1)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipStatus {
    Member,
    NonMemberEvidence,
    Undetermined,
}

/// Trailing-window statistics of `y = Δ^a x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowDiagnostics {
    pub window: usize,
    /// `max |y_n|` over the window.
    pub tail_max_abs: f64,
    /// `max y_n - min y_n` over the window.
    pub tail_oscillation: f64,
    /// `|y_n|` strictly increased at every step of the window.
    pub monotone_growth: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub space: SpaceId,
    pub status: MembershipStatus,
    /// Estimated `lim y_n`; present for members of `c(Δ^a)` only.
    #[serde(serialize_with = "opt_finite_or_tag")]
    pub limit: Option<f64>,
    /// `sup_n |y_n|` over the truncation.
    pub norm: f64,
    pub diagnostics: WindowDiagnostics,
}

/// `sup_n |(Δ^a x)_n|` over the window of `x`.
pub fn delta_norm(order: FracOrder, x: &Seq) -> f64 {
    apply_forward(order, x).sup_norm()
}

fn window_stats(y: &[f64], window: usize) -> WindowDiagnostics {
    let tail = &y[y.len() - window..];
    let tail_max_abs = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let growth_span = &y[y.len() - window - 1..];
    let monotone_growth = growth_span.windows(2).all(|w| w[1].abs() > w[0].abs());
    WindowDiagnostics {
        window,
        tail_max_abs,
        tail_oscillation: hi - lo,
        monotone_growth,
    }
}

fn check_length(x: &Seq, tol: &ToleranceConfig) -> Result<()> {
    if x.len() < 2 * tol.window {
        return Err(Error::usage(format!(
            "sequence of length {} is shorter than twice the diagnostic window {}",
            x.len(),
            tol.window
        )));
    }
    Ok(())
}

/// Verdict for membership of `x` in one specific difference domain.
pub fn classify_in(
    order: FracOrder,
    x: &Seq,
    space: SpaceId,
    tol: &ToleranceConfig,
) -> Result<MembershipVerdict> {
    space.require_domain()?;
    check_length(x, tol)?;
    let y = apply_forward(order, x);
    let diagnostics = window_stats(y.terms(), tol.window);
    let tail = &y.terms()[y.len() - tol.window..];

    let (status, limit) = match space {
        SpaceId::C0Delta if diagnostics.tail_max_abs <= tol.eps => (MembershipStatus::Member, None),
        SpaceId::CDelta if diagnostics.tail_oscillation <= tol.eps => {
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            (MembershipStatus::Member, Some(mean))
        }
        SpaceId::LinfDelta if diagnostics.monotone_growth => (MembershipStatus::Undetermined, None),
        SpaceId::LinfDelta => (MembershipStatus::Member, None),
        _ => (MembershipStatus::NonMemberEvidence, None),
    };
    Ok(MembershipVerdict {
        space,
        status,
        limit,
        norm: y.sup_norm(),
        diagnostics,
    })
}

/// Verdict for the smallest of `c0(Δ^a) ⊂ c(Δ^a) ⊂ l∞(Δ^a)` that `x`
/// appears to belong to.
pub fn classify_sequence(order: FracOrder, x: &Seq, tol: &ToleranceConfig) -> Result<MembershipVerdict> {
    for space in [SpaceId::C0Delta, SpaceId::CDelta] {
        let verdict = classify_in(order, x, space, tol)?;
        if verdict.status == MembershipStatus::Member {
            return Ok(verdict);
        }
    }
    classify_in(order, x, SpaceId::LinfDelta, tol)
}

/// Basis sequence `c^(n)`: column `n` of `Δ^{-a}`, truncated to `len`.
pub fn basis_vector(order: FracOrder, n: usize, len: usize) -> Vec<f64> {
    let s = inverse_coeffs(order, len.max(1)).expect("non-empty");
    (0..len).map(|k| if k < n { 0.0 } else { s.terms()[k - n] }).collect()
}

/// Basis sequence `c^(-1)` with `c^(-1)_k = Σ_{n<=k} c^(n)_k`.
pub fn basis_constant(order: FracOrder, len: usize) -> Vec<f64> {
    let s = inverse_coeffs(order, len.max(1)).expect("non-empty");
    let mut acc = 0.0;
    s.terms()[..len]
        .iter()
        .map(|c| {
            acc += c;
            acc
        })
        .collect()
}

/// Expansion of `x` in the Schauder basis of `c0(Δ^a)` or `c(Δ^a)`,
/// evaluated on the window of `x`.
///
/// For `c0(Δ^a)` this is `Σ_n y_n c^(n)`; for `c(Δ^a)` it is
/// `ξ c^(-1) + Σ_n (y_n - ξ) c^(n)` with `ξ` the classified limit of `y`.
/// Every basis vector is truncated to the window before combining, so the
/// result matches `x` up to rounding.
pub fn schauder_reconstruct(
    order: FracOrder,
    x: &Seq,
    space: SpaceId,
    tol: &ToleranceConfig,
) -> Result<Seq> {
    let y = apply_forward(order, x);
    let len = x.len();
    let s = inverse_coeffs(order, len)?;
    match space {
        SpaceId::C0Delta => Seq::new(toeplitz_apply(s.terms(), y.terms())),
        SpaceId::CDelta => {
            let verdict = classify_in(order, x, SpaceId::CDelta, tol)?;
            let xi = verdict.limit.ok_or_else(|| {
                Error::usage("sequence does not appear to lie in c(Δ^a); no limit to expand around")
            })?;
            let shifted: Vec<f64> = y.terms().iter().map(|v| v - xi).collect();
            let series = toeplitz_apply(s.terms(), &shifted);
            let constant = basis_constant(order, len);
            Seq::new(series.iter().zip(&constant).map(|(v, c)| v + xi * c).collect())
        }
        SpaceId::LinfDelta => Err(Error::usage(
            "l∞(Δ^a) has no Schauder basis; reconstruction is only defined for c0d and cd",
        )),
        other => Err(Error::usage(format!("{other} is not a difference domain"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    fn seq(v: Vec<f64>) -> Seq {
        Seq::new(v).unwrap()
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn norm_examples() {
        let x = seq(vec![3.0, -4.0, 2.0]);
        assert_eq!(delta_norm(order(0.0), &x), 4.0);
        assert_eq!(delta_norm(order(1.0), &seq(vec![3.0, 4.0, 4.0, 4.0])), 3.0);
        assert_eq!(delta_norm(order(0.5), &seq(vec![1.0; 5])), 1.0);
    }

    #[test]
    fn linear_sequence_has_unit_difference_limit() {
        let x = seq((0..64).map(|n| n as f64).collect());
        let v = classify_sequence(order(1.0), &x, &tol()).unwrap();
        assert_eq!(v.space, SpaceId::CDelta);
        assert_eq!(v.status, MembershipStatus::Member);
        assert_eq!(v.limit, Some(1.0));
    }

    #[test]
    fn geometric_decay_is_null() {
        let x = seq((0..64).map(|n| 0.5f64.powi(n)).collect());
        let v = classify_sequence(order(0.0), &x, &tol()).unwrap();
        assert_eq!(v.space, SpaceId::C0Delta);
        assert_eq!(v.status, MembershipStatus::Member);
        assert_eq!(v.limit, None);
    }

    #[test]
    fn exponential_growth_is_undetermined() {
        let x = seq((0..64).map(|n| 2f64.powi(n)).collect());
        let v = classify_sequence(order(0.5), &x, &tol()).unwrap();
        assert_eq!(v.space, SpaceId::LinfDelta);
        assert_eq!(v.status, MembershipStatus::Undetermined);
        assert!(v.diagnostics.monotone_growth);
    }

    #[test]
    fn specific_space_queries() {
        let x = seq((0..64).map(|n| n as f64).collect());
        let c0 = classify_in(order(1.0), &x, SpaceId::C0Delta, &tol()).unwrap();
        assert_eq!(c0.status, MembershipStatus::NonMemberEvidence);
        let linf = classify_in(order(1.0), &x, SpaceId::LinfDelta, &tol()).unwrap();
        assert_eq!(linf.status, MembershipStatus::Member);
        assert!(classify_in(order(1.0), &x, SpaceId::C0, &tol()).is_err());
    }

    #[test]
    fn short_sequence_is_rejected() {
        let x = seq(vec![1.0; 31]);
        assert!(matches!(classify_sequence(order(0.5), &x, &tol()), Err(Error::Usage(_))));
    }

    #[test]
    fn basis_vectors() {
        assert_eq!(basis_vector(order(0.0), 2, 5), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(basis_constant(order(1.0), 5), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn reconstruct_in_both_bases() {
        let x = seq((0..64).map(|n| (n as f64 * 0.3).sin() * 0.9f64.powi(n)).collect());
        let back = schauder_reconstruct(order(0.5), &x, SpaceId::C0Delta, &tol()).unwrap();
        for (a, b) in back.terms().iter().zip(x.terms()) {
            assert!((a - b).abs() < 1e-9);
        }

        let x = seq((0..64).map(|n| n as f64 + 2.0).collect());
        let back = schauder_reconstruct(order(1.0), &x, SpaceId::CDelta, &tol()).unwrap();
        for (a, b) in back.terms().iter().zip(x.terms()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn no_basis_for_bounded_domain() {
        let x = seq(vec![1.0; 64]);
        assert!(schauder_reconstruct(order(0.5), &x, SpaceId::LinfDelta, &tol()).is_err());
    }

    #[test]
    fn space_tags_round_trip() {
        for s in SpaceId::DOMAINS.iter().chain(&SpaceId::CODOMAINS) {
            assert_eq!(s.tag().parse::<SpaceId>().unwrap(), *s);
            assert_eq!(serde_json::to_string(s).unwrap(), format!("\"{}\"", s.tag()));
        }
        assert!("l2".parse::<SpaceId>().is_err());
    }
}
