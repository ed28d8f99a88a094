//! Applying the fractional difference operator and its inverse to truncated
//! one-sided sequences.
//!
//! Sequences are indexed from zero and taken to vanish at negative indices, so
//! `(Δ^a x)_k = Σ_{i=0}^{k} c_i(a) x_{k-i}`.

use serde::{Deserialize, Serialize};

use crate::coeffs::{inverse_coeffs, raw_coeffs, FracOrder};
use crate::error::{Error, Result};

/// Finite window `x_0 .. x_{N-1}` into a one-sided sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqRepr", into = "SeqRepr")]
pub struct Seq {
    terms: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    terms: Vec<f64>,
}

impl TryFrom<SeqRepr> for Seq {
    type Error = Error;
    fn try_from(repr: SeqRepr) -> Result<Self> {
        Seq::new(repr.terms)
    }
}

impl From<Seq> for SeqRepr {
    fn from(seq: Seq) -> Self {
        SeqRepr { terms: seq.terms }
    }
}

impl Seq {
    pub fn new(terms: Vec<f64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::usage("sequence must have at least one term"));
        }
        if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
            return Err(Error::usage(format!("sequence term {i} is not finite")));
        }
        Ok(Seq { terms })
    }

    /// Unit vector `e^(n)` of the given length.
    pub fn unit(n: usize, len: usize) -> Result<Self> {
        if n >= len {
            return Err(Error::usage(format!("unit index {n} outside length {len}")));
        }
        let mut terms = vec![0.0; len];
        terms[n] = 1.0;
        Seq::new(terms)
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

    pub fn sup_norm(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.abs()))
    }
}

/// Lower-triangular matrix stored row by row; row `n` holds `t_{n,0..=n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriMatrix {
    rows: Vec<Vec<f64>>,
}

impl TriMatrix {
    /// Toeplitz triangle with `t_{nk} = diagonals[n - k]`.
    pub fn toeplitz(diagonals: &[f64]) -> Self {
        let rows = (0..diagonals.len())
            .map(|n| (0..=n).map(|k| diagonals[n - k]).collect())
            .collect();
        TriMatrix { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Entry `t_{nk}`; zero above the diagonal.
    pub fn entry(&self, n: usize, k: usize) -> f64 {
        if k > n {
            0.0
        } else {
            self.rows[n][k]
        }
    }

    /// A triangle in the strict sense: every diagonal entry is nonzero.
    pub fn is_triangle(&self) -> bool {
        self.rows.iter().enumerate().all(|(n, row)| row[n] != 0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.size() {
            return Err(Error::usage(format!(
                "vector of length {} does not match matrix size {}",
                x.len(),
                self.size()
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(t, v)| t * v).sum())
            .collect())
    }

    pub fn mul(&self, other: &TriMatrix) -> Result<TriMatrix> {
        if other.size() != self.size() {
            return Err(Error::usage("matrix sizes differ"));
        }
        let rows = (0..self.size())
            .map(|n| {
                (0..=n)
                    .map(|k| (k..=n).map(|j| self.rows[n][j] * other.rows[j][k]).sum())
                    .collect()
            })
            .collect();
        Ok(TriMatrix { rows })
    }

    /// Largest deviation from the identity matrix.
    pub fn identity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (n, row) in self.rows.iter().enumerate() {
            for (k, &t) in row.iter().enumerate() {
                let target = if n == k { 1.0 } else { 0.0 };
                worst = worst.max((t - target).abs());
            }
        }
        worst
    }
}

pub(crate) fn toeplitz_apply(coeffs: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|k| (0..=k).map(|i| coeffs[i] * x[k - i]).sum())
        .collect()
}

/// `y = Δ^a x` over the window of `x`.
pub fn apply_forward(order: FracOrder, x: &Seq) -> Seq {
    let c = raw_coeffs(order.value(), x.len());
    Seq { terms: toeplitz_apply(&c, x.terms()) }
}

/// `x = Δ^{-a} y`, the exact inverse of [`apply_forward`] on every window.
pub fn apply_inverse(order: FracOrder, y: &Seq) -> Seq {
    let s = inverse_coeffs(order, y.len()).expect("non-empty sequence");
    Seq { terms: toeplitz_apply(s.terms(), y.terms()) }
}

/// Leading `size x size` block of the operator matrix of the given order.
pub fn operator_matrix(order: FracOrder, size: usize) -> Result<TriMatrix> {
    if size == 0 {
        return Err(Error::usage("matrix size must be at least 1"));
    }
    Ok(TriMatrix::toeplitz(&raw_coeffs(order.value(), size)))
}

/// Leading block of the inverse operator matrix `Δ^{-a}`.
pub fn inverse_matrix(order: FracOrder, size: usize) -> Result<TriMatrix> {
    let s = inverse_coeffs(order, size)?;
    Ok(TriMatrix::toeplitz(s.terms()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    fn seq(v: &[f64]) -> Seq {
        Seq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn first_difference_of_constant() {
        let y = apply_forward(order(1.0), &seq(&[5.0, 5.0, 5.0, 5.0]));
        assert_eq!(y.terms(), &[5.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn order_zero_is_identity() {
        let x = seq(&[1.5, -2.0, 3.25]);
        assert_eq!(apply_forward(order(0.0), &x), x);
        assert_eq!(apply_inverse(order(0.0), &x), x);
    }

    #[test]
    fn half_order_of_ones_gives_partial_sums() {
        let y = apply_forward(order(0.5), &seq(&[1.0; 5]));
        // Direct summation of c_0..c_k(1/2).
        let c = [1.0, -0.5, -0.125, -0.0625, -0.0390625];
        let mut acc = 0.0;
        for (k, &ck) in c.iter().enumerate() {
            acc += ck;
            assert!((y.terms()[k] - acc).abs() < 1e-15);
        }
        let want = [1.0, 0.5, 0.375, 0.3125, 0.2734375];
        for (g, w) in y.terms().iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_of_first_difference_is_partial_summation() {
        let x = apply_inverse(order(1.0), &seq(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(x.terms(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn inverse_half_of_unit_impulse() {
        let x = apply_inverse(order(0.5), &Seq::unit(0, 5).unwrap());
        let want = [1.0, 0.5, 3.0 / 8.0, 5.0 / 16.0, 35.0 / 128.0];
        for (g, w) in x.terms().iter().zip(want) {
            assert!((g - w).abs() <= 1e-12 * w);
        }
    }

    #[test]
    fn matrix_of_half_order() {
        let m = operator_matrix(order(0.5), 3).unwrap();
        assert_eq!(m.rows(), &[vec![1.0], vec![-0.5, 1.0], vec![-0.125, -0.5, 1.0]]);
        assert!(m.is_triangle());
        assert_eq!(m.entry(0, 2), 0.0);
    }

    #[test]
    fn forward_times_inverse_is_identity() {
        for a in [0.0, 0.5, 1.0, 1.7, -0.3] {
            let t = operator_matrix(order(a), 12).unwrap();
            let s = inverse_matrix(order(a), 12).unwrap();
            assert!(t.mul(&s).unwrap().identity_defect() < 1e-12, "a = {a}");
        }
        assert_eq!(operator_matrix(order(0.0), 4).unwrap().identity_defect(), 0.0);
    }

    #[test]
    fn rejects_invalid_sequences() {
        assert!(Seq::new(vec![]).is_err());
        assert!(Seq::new(vec![1.0, f64::NAN]).is_err());
        assert!(serde_json::from_str::<Seq>(r#"{"terms":[]}"#).is_err());
        let s: Seq = serde_json::from_str(r#"{"terms":[1,2.5]}"#).unwrap();
        assert_eq!(s.terms(), &[1.0, 2.5]);
    }
}
