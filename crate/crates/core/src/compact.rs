//! Hausdorff measure of noncompactness `‖L_A‖_χ` and compactness of `L_A`.
//!
//! Every bound is a constant times `L = lim_r T(r)` for a tail quantity
//! `T(r) = sup_{n>r} q(n)` over the rows of `Â^[r]`:
//!
//! | row | from | to | `q(n)` | bound |
//! |-----|------|----|--------|-------|
//! | 1 | `l∞(Δ^a)`, `c0(Δ^a)` | `l∞` | `Σ_k |â_nk|` | `[0, L]` |
//! | 2 | `c(Δ^a)` | `l∞` | `Σ_k |â_nk| + |γ_n|` | `[0, L]` |
//! | 3 | `l∞(Δ^a)`, `c0(Δ^a)` | `c0` | `Σ_k |â_nk|` | `L` |
//! | 4 | `c(Δ^a)` | `c0` | `Σ_k |â_nk| + |γ_n|` | `L` |
//! | 5 | `l∞(Δ^a)`, `c0(Δ^a)` | `c` | `Σ_k |b̂_nk|` | `[L/2, L]` |
//! | 6 | `c(Δ^a)` | `c` | `Σ_k |b̂_nk| + |δ_n|` | `[L/2, L]` |
//! | 7 | `l∞(Δ^a)`, `c0(Δ^a)` | `l1` | subset sums over `n > r` | `[L, 4L]` |
//! | 8 | `c(Δ^a)` | `l1` | as 7, plus `|Σ γ_n|` | `[L, 4L]` |

use serde::Serialize;

use crate::classify::{row_norm, rows_subset_sup};
use crate::coeffs::FracOrder;
use crate::error::Result;
use crate::limit::{geometric_points, LimitEstimate, LimitStatus, Sample};
use crate::matrix::MatrixSpec;
use crate::spaces::SpaceId;
use crate::tolerance::ToleranceConfig;
use crate::transform::{Transform, SAMPLE_START};

/// Factor separating a nonzero criterion from rounding noise.
pub const NONZERO_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HmncBounds {
    pub from: SpaceId,
    pub to: SpaceId,
    pub formula_row: u8,
    #[serde(serialize_with = "crate::report::finite_or_tag")]
    pub lower: f64,
    #[serde(serialize_with = "crate::report::finite_or_tag")]
    pub upper: f64,
    /// `lim_r T(r)`, with `T(r)` sampled at `r = 8, 16, ...`.
    pub criterion: LimitEstimate,
    /// `T(r)` at each sampled `r`; nonincreasing.
    pub trail: Vec<Sample>,
    pub status: LimitStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compactness {
    Compact,
    NotCompact,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessVerdict {
    pub verdict: Compactness,
    /// The criterion applied, written out.
    pub criterion: String,
    /// `false` when the criterion is only sufficient.
    pub iff: bool,
    pub bounds: HmncBounds,
}

/// Table row for `(from, to)`.
pub fn formula_row(from: SpaceId, to: SpaceId) -> Result<u8> {
    from.require_domain()?;
    to.require_codomain()?;
    let base = match to {
        SpaceId::Linf => 1,
        SpaceId::C0 => 3,
        SpaceId::C => 5,
        _ => 7,
    };
    Ok(base + u8::from(from == SpaceId::CDelta))
}

fn criterion_text(row: u8) -> &'static str {
    match row {
        1 | 3 => "lim_r sup_{n>r} Σ_k |â_nk| = 0",
        2 | 4 => "lim_r sup_{n>r} (Σ_k |â_nk| + |γ_n|) = 0",
        5 => "lim_r sup_{n>r} Σ_k |â_nk - α̂_k| = 0",
        6 => "lim_r sup_{n>r} (Σ_k |â_nk - α̂_k| + |Σ_k α̂_k - γ_n + β|) = 0",
        7 => "lim_r sup_{N ⊂ N_r} Σ_k |Σ_{n∈N} â_nk| = 0",
        _ => "lim_r sup_{N ⊂ N_r} (Σ_k |Σ_{n∈N} â_nk| + |Σ_{n∈N} γ_n|) = 0",
    }
}

pub fn hmnc_bounds(
    order: FracOrder,
    a: &MatrixSpec,
    from: SpaceId,
    to: SpaceId,
    tol: &ToleranceConfig,
) -> Result<HmncBounds> {
    let t = Transform::new(order, a, tol)?;
    hmnc_bounds_with(&t, from, to)
}

pub fn hmnc_bounds_with(t: &Transform, from: SpaceId, to: SpaceId) -> Result<HmncBounds> {
    let row = formula_row(from, to)?;
    let (criterion, trail) = if row >= 7 {
        subset_trail(t, row == 8)
    } else {
        row_trail(t, row)
    };
    let l = criterion.value;
    let (lower, upper) = if criterion.is_converged() {
        match row {
            1 | 2 => (0.0, l),
            3 | 4 => (l, l),
            5 | 6 => (l / 2.0, l),
            _ => (l, 4.0 * l),
        }
    } else {
        // T(r) is nonincreasing, so its last sample still bounds the limit.
        let last = trail.last().map_or(f64::INFINITY, |s| s.value);
        let factor = if row >= 7 { 4.0 } else { 1.0 };
        (0.0, factor * last)
    };
    let mut notes = Vec::new();
    if matches!(row, 3..=6) {
        notes.push("the (l∞, l∞) norm of the row-zeroed matrix is read as sup of row l1 norms".to_string());
    }
    if row == 6 {
        notes.push("δ_n is taken with +β; the corollary prints -β at the same place".to_string());
    }
    if !t.rows_exhausted() {
        notes.push(format!("tail suprema taken over rows n < {}", t.evaluated_rows()));
    }
    Ok(HmncBounds {
        from,
        to,
        formula_row: row,
        lower,
        upper,
        status: criterion.status,
        criterion,
        trail,
        notes,
    })
}

fn r_points(t: &Transform) -> Vec<usize> {
    geometric_points(SAMPLE_START, (t.tol().rows / 2).max(4 * SAMPLE_START))
}

/// `T(r) = sup_{n>r} q(n)` from a suffix maximum over the evaluated rows.
fn row_trail(t: &Transform, row: u8) -> (LimitEstimate, Vec<Sample>) {
    let with_gamma = row.is_multiple_of(2);
    let beta = if row == 6 { Some(t.beta()) } else { None };
    let q = |n: usize| -> (f64, LimitStatus) {
        match row {
            1..=4 => row_norm(t, n, with_gamma),
            _ => {
                let (b, st) = t.b_hat_abs_sum(n);
                match &beta {
                    Some(beta) => {
                        let (d, dst) = t.delta(n, beta);
                        (b + d.abs(), st.combine(dst))
                    }
                    None => (b, st),
                }
            }
        }
    };
    let exhausted = t.rows_exhausted();
    let points = r_points(t);
    let rows = t.evaluated_rows();
    // One row past the support is a zero row and closes the tail exactly.
    let end = if exhausted { rows + 1 } else { rows };
    let mut status = LimitStatus::Converged;
    let values: Vec<f64> = (0..end)
        .map(|n| {
            let (v, st) = q(n);
            status = status.combine(st);
            v
        })
        .collect();
    let mut suffix = vec![0.0f64; end + 1];
    for n in (0..end).rev() {
        suffix[n] = suffix[n + 1].max(values[n]);
    }
    let tail = |r: usize| -> f64 {
        if r + 1 < end {
            suffix[r + 1]
        } else if exhausted {
            values[end - 1]
        } else {
            f64::NAN
        }
    };
    let trail: Vec<Sample> = points.iter().map(|&r| Sample { index: r, value: tail(r) }).collect();
    let mut criterion = if exhausted {
        LimitEstimate::exact_at(rows, values[rows])
    } else {
        LimitEstimate::from_trail(trail.clone(), 0.0, t.tol().eps)
    };
    criterion.status = criterion.status.combine(status);
    (criterion, trail)
}

/// Subset-sup tails over `N_r`, made monotone by carrying later values
/// back (a subset of `N_{r'}` is a subset of `N_r` for `r < r'`).
fn subset_trail(t: &Transform, with_gamma: bool) -> (LimitEstimate, Vec<Sample>) {
    let exhausted = t.rows_exhausted();
    let rows = t.evaluated_rows();
    let mut status = LimitStatus::Converged;
    let mut trail: Vec<Sample> = r_points(t)
        .into_iter()
        .map(|r| {
            let (est, _) = rows_subset_sup(t, r + 1, with_gamma);
            status = status.combine(est.status);
            Sample { index: r, value: est.value }
        })
        .collect();
    for i in (0..trail.len().saturating_sub(1)).rev() {
        trail[i].value = trail[i].value.max(trail[i + 1].value);
    }
    let mut criterion = if exhausted {
        LimitEstimate::exact_at(rows, 0.0)
    } else {
        LimitEstimate::from_trail(trail.clone(), 0.0, t.tol().eps)
    };
    criterion.status = criterion.status.combine(status);
    (criterion, trail)
}

pub fn is_compact(
    order: FracOrder,
    a: &MatrixSpec,
    from: SpaceId,
    to: SpaceId,
    tol: &ToleranceConfig,
) -> Result<CompactnessVerdict> {
    let t = Transform::new(order, a, tol)?;
    is_compact_with(&t, from, to)
}

pub fn is_compact_with(t: &Transform, from: SpaceId, to: SpaceId) -> Result<CompactnessVerdict> {
    let bounds = hmnc_bounds_with(t, from, to)?;
    let eps = t.tol().eps;
    let iff = to != SpaceId::Linf;
    let c = &bounds.criterion;
    let tail_nonzero = bounds.trail.len() >= 3
        && bounds.trail[bounds.trail.len() - 3..].iter().all(|s| s.value >= NONZERO_FACTOR * eps);
    let verdict = if c.is_converged() && c.value.abs() <= eps {
        Compactness::Compact
    } else if iff && c.is_converged() && c.value >= NONZERO_FACTOR * eps && tail_nonzero {
        Compactness::NotCompact
    } else {
        Compactness::Undetermined
    };
    Ok(CompactnessVerdict {
        verdict,
        criterion: criterion_text(bounds.formula_row).to_string(),
        iff,
        bounds,
    })
}
