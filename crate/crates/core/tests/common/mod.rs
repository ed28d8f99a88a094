#![allow(dead_code)]

use fracseq::coeffs::FracOrder;
use fracseq::fracop::{apply_inverse, Seq};
use fracseq::matrix::MatrixSpec;
use fracseq::spaces::SpaceId;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

pub fn order(v: f64) -> FracOrder {
    FracOrder::new(v).unwrap()
}

/// Sign and log-magnitude of Γ(x), or `None` at a pole.
fn gamma_parts(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((1.0, ln_gamma(x)));
    }
    if x == x.round() {
        return None;
    }
    let s = (std::f64::consts::PI * x).sin();
    Some((s.signum(), std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x)))
}

/// `(-1)^i Γ(a+1) / (i! Γ(a-i+1))`, evaluated through log-Gamma.
pub fn closed_form_coeff(a: f64, i: usize) -> f64 {
    let (s1, l1) = gamma_parts(a + 1.0).expect("a + 1 is not a pole");
    let Some((s2, l2)) = gamma_parts(a - i as f64 + 1.0) else {
        return 0.0;
    };
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * s1 * s2 * (l1 - ln_gamma(i as f64 + 1.0) - l2).exp()
}

/// `â_nk = Σ_{j>=k} c_{j-k}(-a) a_nj` by direct double summation.
pub fn direct_hat(a: f64, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            (0..row.len())
                .map(|k| (k..row.len()).map(|j| closed_form_coeff(-a, j - k) * row[j]).sum())
                .collect()
        })
        .collect()
}

/// Exhaustive `sup_N Σ_k |Σ_{n∈N} v_nk| + |Σ_{n∈N} o_n|`, members summed
/// in ascending order.
pub fn brute_subset_sup(vectors: &[Vec<f64>], offsets: Option<&[f64]>) -> f64 {
    let r = vectors.len();
    let width = vectors.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut best = 0.0f64;
    for mask in 0u32..(1 << r) {
        let mut acc = vec![0.0f64; width];
        let mut off = 0.0;
        for n in 0..r {
            if mask & (1 << n) != 0 {
                for k in 0..vectors[n].len() {
                    acc[k] += vectors[n][k];
                }
                if let Some(o) = offsets {
                    off += o[n];
                }
            }
        }
        let mut v = 0.0;
        for a in &acc {
            v += a.abs();
        }
        v += f64::abs(off);
        if v > best {
            best = v;
        }
    }
    best
}

/// Rows of a random finite-rank matrix.
pub fn random_rows(rng: &mut impl Rng, max_rows: usize, max_width: usize) -> Vec<Vec<f64>> {
    let n = rng.gen_range(1..=max_rows);
    (0..n)
        .map(|_| {
            let w = rng.gen_range(1..=max_width);
            (0..w)
                .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..2.0) })
                .collect()
        })
        .collect()
}

pub fn finite_rank(rows: Vec<Vec<f64>>) -> MatrixSpec {
    MatrixSpec::finite_rank(rows).unwrap()
}

/// A random `x` in the given domain, built as `Δ^{-a} y` for a `y` of the
/// matching kind.
pub fn random_member(rng: &mut impl Rng, a: FracOrder, space: SpaceId, len: usize) -> Seq {
    let xi: f64 = rng.gen_range(-2.0..2.0);
    let y: Vec<f64> = (0..len)
        .map(|k| {
            let u: f64 = rng.gen_range(-1.0..1.0);
            match space {
                SpaceId::C0Delta => u * 0.5f64.powi(k as i32),
                SpaceId::CDelta => xi + u * 0.5f64.powi(k as i32),
                _ => u,
            }
        })
        .collect();
    apply_inverse(a, &Seq::new(y).unwrap())
}
