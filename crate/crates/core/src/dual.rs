//! β-dual membership of a sequence `a` for the difference domains, and the
//! pairing identity `Σ a_k x_k = Σ (R_k a) y_k` (less `ρ ξ` on `c(Δ^a)`).
//!
//! | space | conditions |
//! |-------|------------|
//! | `c0(Δ^a)` | MF2, MF3 |
//! | `c(Δ^a)`  | MF2, MF3, MF4 |
//! | `l∞(Δ^a)` | MF2, MF5 |
//!
//! with `MF2: Σ_k |R_k a| < ∞`, `MF3: sup_m Σ_k |w_mk| < ∞`,
//! `MF4: lim_m Σ_k w_mk = ρ` and `MF5: lim_m Σ_k |w_mk| = 0`.

use serde::Serialize;

use crate::coeffs::{raw_coeffs, FracOrder};
use crate::error::{Error, Result};
use crate::fracop::{apply_forward, Seq};
use crate::limit::{LimitEstimate, LimitStatus};
use crate::matrix::{GenSeq, MatrixSpec};
use crate::spaces::{classify_in, MembershipStatus, SpaceId};
use crate::tolerance::ToleranceConfig;
use crate::transform::{r_finite, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

impl Verdict {
    /// Conjunction: a failure wins, then undetermined.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Undetermined, _) | (_, Undetermined) => Undetermined,
            _ => Holds,
        }
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().fold(Verdict::Holds, Verdict::and)
    }
}

/// Outcome of one primitive condition with the estimate that decided it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition_id: String,
    pub verdict: Verdict,
    pub witness: LimitEstimate,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl ConditionReport {
    pub fn new(id: &str, verdict: Verdict, witness: LimitEstimate) -> Self {
        ConditionReport { condition_id: id.to_string(), verdict, witness, notes: String::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.notes.is_empty() {
            self.notes = note;
        } else {
            self.notes = format!("{}; {}", self.notes, note);
        }
        self
    }

    /// `quantity < ∞`.
    pub fn bounded(id: &str, est: LimitEstimate) -> Self {
        let verdict = match est.status {
            _ if est.value.is_infinite() => Verdict::Fails,
            LimitStatus::Converged => Verdict::Holds,
            LimitStatus::Diverging => Verdict::Fails,
            LimitStatus::Undetermined => Verdict::Undetermined,
        };
        ConditionReport::new(id, verdict, est)
    }

    /// `lim quantity` exists.
    pub fn exists(id: &str, est: LimitEstimate) -> Self {
        let verdict = match est.status {
            LimitStatus::Converged if est.value.is_finite() => Verdict::Holds,
            LimitStatus::Diverging => Verdict::Fails,
            _ => Verdict::Undetermined,
        };
        ConditionReport::new(id, verdict, est)
    }

    /// `quantity = 0`, judged as residual at most `eps`.
    pub fn zero(id: &str, est: LimitEstimate, eps: f64) -> Self {
        let verdict = match est.status {
            LimitStatus::Converged if est.value.abs() <= eps => Verdict::Holds,
            LimitStatus::Converged | LimitStatus::Diverging => Verdict::Fails,
            LimitStatus::Undetermined => Verdict::Undetermined,
        };
        ConditionReport::new(id, verdict, est)
    }

    /// Conjunction of per-index reports under one label; the witness is the
    /// first decisive failure, else the first undetermined, else the
    /// largest witness value.
    pub fn for_all(id: &str, reports: Vec<ConditionReport>, scope: &str) -> Self {
        let verdict = Verdict::all(reports.iter().map(|r| r.verdict));
        let pick = match verdict {
            Verdict::Holds => reports.iter().max_by(|a, b| {
                a.witness.value.abs().total_cmp(&b.witness.value.abs())
            }),
            v => reports.iter().find(|r| r.verdict == v),
        };
        let witness = pick.map_or_else(|| LimitEstimate::exact(0.0), |r| r.witness.clone());
        ConditionReport::new(id, verdict, witness).with_note(scope)
    }
}

/// Result of the β-dual check for one space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub space: SpaceId,
    pub conditions: Vec<ConditionReport>,
    pub verdict: Verdict,
    /// `ρ = lim_m Σ_k w_mk`, reported for `c(Δ^a)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<LimitEstimate>,
    /// Leading terms of `R a`.
    pub r_transform: Vec<f64>,
}

/// Evaluates the β-dual conditions of `space` for `a`.
pub fn check_beta_dual(
    order: FracOrder,
    a: &GenSeq,
    space: SpaceId,
    tol: &ToleranceConfig,
) -> Result<DualReport> {
    space.require_domain()?;
    let spec = MatrixSpec::rank_one(GenSeq::finite(vec![1.0])?, a.clone());
    let t = Transform::new(order, &spec, tol)?;
    let row = t.hat_row(0);
    let w = t.w_stats(0);

    let mut mf2 = ConditionReport::bounded("MF2", row.abs_sum.clone());
    if a.support().is_some() {
        mf2 = mf2.with_note("finite support: the sum is exact");
    }
    let mut conditions = vec![mf2];
    let mut rho = None;
    match space {
        SpaceId::C0Delta => conditions.push(ConditionReport::bounded("MF3", w.abs_sup.clone())),
        SpaceId::CDelta => {
            conditions.push(ConditionReport::bounded("MF3", w.abs_sup.clone()));
            conditions.push(ConditionReport::exists("MF4", w.gamma.clone()));
            rho = Some(w.gamma.clone());
        }
        _ => conditions.push(
            ConditionReport::zero("MF5", w.abs_limit.clone(), tol.eps)
                .with_note("w_mk summed over j >= m"),
        ),
    }
    let verdict = Verdict::all(conditions.iter().map(|c| c.verdict));
    Ok(DualReport { space, conditions, verdict, rho, r_transform: row.entries.clone() })
}

/// Both sides of the pairing identity over the window of `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pairing {
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
    pub rho: f64,
    /// `lim y_k`, used only on `c(Δ^a)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

/// `Σ a_k x_k` against `Σ (R_k a) y_k - ρ ξ` for a finitely supported `a`
/// and an `x` classified as a member of `space`.
pub fn pairing(
    order: FracOrder,
    a: &Seq,
    x: &Seq,
    space: SpaceId,
    tol: &ToleranceConfig,
) -> Result<Pairing> {
    if a.len() > x.len() {
        return Err(Error::usage(format!(
            "coefficient sequence of length {} is longer than x of length {}",
            a.len(),
            x.len()
        )));
    }
    let membership = classify_in(order, x, space, tol)?;
    if membership.status != MembershipStatus::Member {
        return Err(Error::usage(format!("x is not classified as a member of {space}")));
    }
    let y = apply_forward(order, x);
    let s = raw_coeffs(-order.value(), a.len());
    let ra = r_finite(&s, a.terms());
    let lhs: f64 = a.terms().iter().zip(x.terms()).map(|(a, x)| a * x).sum();
    let mut rhs: f64 = ra.iter().zip(y.terms()).map(|(r, y)| r * y).sum();
    // A finitely supported a has vanishing tail triangle rows, so ρ = 0.
    let rho = 0.0;
    let xi = match space {
        SpaceId::CDelta => {
            let xi = membership.limit.unwrap_or(0.0);
            rhs -= rho * xi;
            Some(xi)
        }
        _ => None,
    };
    Ok(Pairing { lhs, rhs, discrepancy: (lhs - rhs).abs(), rho, xi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Extend;

    fn order(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn unit_vector_is_in_every_dual() {
        let a = GenSeq::finite(vec![1.0]).unwrap();
        for space in SpaceId::DOMAINS {
            let r = check_beta_dual(order(0.5), &a, space, &tol()).unwrap();
            assert_eq!(r.verdict, Verdict::Holds);
            assert_eq!(r.r_transform, vec![1.0]);
            assert_eq!(r.conditions[0].witness.residual, 0.0);
            if space == SpaceId::CDelta {
                assert_eq!(r.rho.as_ref().unwrap().value, 0.0);
            }
        }
    }

    #[test]
    fn constant_sequence_is_not_in_dual_at_order_zero() {
        let a = GenSeq::new(vec![1.0], Extend::Constant).unwrap();
        let r = check_beta_dual(order(0.0), &a, SpaceId::C0Delta, &tol()).unwrap();
        assert_eq!(r.conditions[0].condition_id, "MF2");
        assert_eq!(r.conditions[0].verdict, Verdict::Fails);
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn geometric_sequence_is_in_dual() {
        let a = GenSeq::new(vec![1.0, 0.5], Extend::Geometric).unwrap();
        for space in SpaceId::DOMAINS {
            let r = check_beta_dual(order(0.5), &a, space, &tol()).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{space}: {r:?}");
        }
    }

    #[test]
    fn rejects_codomain() {
        let a = GenSeq::finite(vec![1.0]).unwrap();
        assert!(check_beta_dual(order(0.5), &a, SpaceId::C0, &tol()).is_err());
    }

    #[test]
    fn pairing_with_unit_vector_recovers_coordinate() {
        let y: Vec<f64> = (0..64).map(|k| 0.5f64.powi(k)).collect();
        let x = crate::fracop::apply_inverse(order(0.5), &Seq::new(y).unwrap());
        let a = Seq::unit(3, 5).unwrap();
        let p = pairing(order(0.5), &a, &x, SpaceId::C0Delta, &tol()).unwrap();
        assert_eq!(p.lhs, x.terms()[3]);
        assert!(p.discrepancy < 1e-12);
    }

    #[test]
    fn pairing_requires_membership() {
        let x = Seq::new((0..64).map(|k| k as f64).collect()).unwrap();
        let a = Seq::unit(0, 2).unwrap();
        assert!(pairing(order(0.0), &a, &x, SpaceId::C0Delta, &tol()).is_err());
    }

    #[test]
    fn verdict_conjunction() {
        use Verdict::*;
        assert_eq!(Verdict::all([Holds, Holds]), Holds);
        assert_eq!(Verdict::all([Holds, Undetermined]), Undetermined);
        assert_eq!(Verdict::all([Undetermined, Fails]), Fails);
    }
}
