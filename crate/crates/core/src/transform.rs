//! The transformed matrix `Â`, the tail triangles `W`, and the limits built
//! from them.
//!
//! With `s_i = c_i(-a)` the coefficients of the inverse operator,
//!
//! ```text
//! (R a)_k   = Σ_{j>=k} s_{j-k} a_j
//! â_nk      = (R A_n)_k
//! w_mk      = Σ_{j>=m} s_{j-k} a_j          (0 <= k <= m)
//! γ_n       = lim_m Σ_{k<=m} w_mk^(A_n)
//! β         = lim_n (Σ_k â_nk - γ_n)
//! α̂_k       = lim_n â_nk
//! b̂_nk      = â_nk - α̂_k
//! δ_n       = Σ_k α̂_k - γ_n + β
//! ```
//!
//! Rows with finite support are summed exactly. Rows with an infinite
//! generator tail are summed to `cols`, `2 cols` and `4 cols` terms and the
//! partial sums are judged by [`crate::limit`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::coeffs::{raw_coeffs, FracOrder};
use crate::error::{Error, Result};
use crate::fracop::Seq;
use crate::limit::{
    geometric_points, sequence_limit, series_limit, LimitEstimate, LimitStatus, Sample,
};
use crate::matrix::{GenSeq, MatrixSpec, Row};
use crate::report::vec_finite_or_tag;
use crate::tolerance::ToleranceConfig;

/// First sample index for limits over rows or columns.
pub const SAMPLE_START: usize = 8;

/// Column limits sample rows up to this multiple of the row budget.
pub const ALPHA_ROW_FACTOR: usize = 4;

/// `(R a)_k` for a finitely supported `a`, skipping zero entries.
pub(crate) fn r_finite(s: &[f64], a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (j, &aj) in a.iter().enumerate() {
        if aj == 0.0 {
            continue;
        }
        for (k, o) in out[..=j].iter_mut().enumerate() {
            *o += s[j - k] * aj;
        }
    }
    out
}

/// `R a` for a finitely supported sequence; every entry is exact.
pub fn r_transform(order: FracOrder, a: &Seq) -> Vec<LimitEstimate> {
    let s = raw_coeffs(-order.value(), a.len());
    r_finite(&s, a.terms())
        .into_iter()
        .enumerate()
        .map(|(k, v)| LimitEstimate::exact_at(k, v))
        .collect()
}

/// Rows `w_m0 .. w_mm` for `m = 0 .. m_max` of the tail triangle of a
/// finitely supported `a`.
pub fn w_triangle(order: FracOrder, a: &Seq, m_max: usize) -> Vec<Vec<f64>> {
    let len = a.len().max(m_max + 1);
    let s = raw_coeffs(-order.value(), len);
    (0..=m_max).map(|m| w_row_finite(&s, a.terms(), m)).collect()
}

fn w_row_finite(s: &[f64], a: &[f64], m: usize) -> Vec<f64> {
    let mut row = vec![0.0; m + 1];
    for (j, &aj) in a.iter().enumerate().skip(m) {
        if aj == 0.0 {
            continue;
        }
        for (k, w) in row.iter_mut().enumerate() {
            *w += s[j - k] * aj;
        }
    }
    row
}

/// Per-`m` sums `Σ_k w_mk` and `Σ_k |w_mk|` for all `m < len(a)`, built
/// backwards with `w_mk = w_{m+1,k} + s_{m-k} a_m`.
fn w_sums_finite(s: &[f64], a: &[f64]) -> Vec<(f64, f64)> {
    let len = a.len();
    let mut out = vec![(0.0, 0.0); len];
    let mut row = vec![0.0; len];
    for m in (0..len).rev() {
        let am = a[m];
        if am != 0.0 {
            for (k, w) in row[..=m].iter_mut().enumerate() {
                *w += s[m - k] * am;
            }
        }
        let slice = &row[..=m];
        out[m] = (slice.iter().sum(), slice.iter().map(|w| w.abs()).sum());
    }
    out
}

/// One row of `Â`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatRow {
    pub index: usize,
    /// `â_nk` for `k < entries.len()`.
    #[serde(serialize_with = "vec_finite_or_tag")]
    pub entries: Vec<f64>,
    /// Entries past `entries.len()` are exactly zero.
    pub exact: bool,
    /// Worst convergence status of the inner sums defining the entries.
    pub tail_status: LimitStatus,
    /// `Σ_k |â_nk|`.
    pub abs_sum: LimitEstimate,
    /// `Σ_k â_nk`.
    pub sum: LimitEstimate,
}

impl HatRow {
    pub fn get(&self, k: usize) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    fn zero(index: usize) -> Self {
        HatRow {
            index,
            entries: Vec::new(),
            exact: true,
            tail_status: LimitStatus::Converged,
            abs_sum: LimitEstimate::exact_at(index, 0.0),
            sum: LimitEstimate::exact_at(index, 0.0),
        }
    }

    fn scaled(&self, index: usize, scale: f64) -> Self {
        let scale_est = |e: &LimitEstimate, f: f64| {
            let mut e = e.clone();
            e.value *= f;
            e.residual *= f.abs();
            for s in &mut e.samples {
                s.value *= f;
            }
            e
        };
        HatRow {
            index,
            entries: self.entries.iter().map(|v| v * scale).collect(),
            exact: self.exact,
            tail_status: self.tail_status,
            abs_sum: scale_est(&self.abs_sum, scale.abs()),
            sum: scale_est(&self.sum, scale),
        }
    }
}

/// Statistics of the tail triangle `W^(A_n)` of one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WStats {
    /// `γ_n = lim_m Σ_k w_mk`.
    pub gamma: LimitEstimate,
    /// `sup_m Σ_k |w_mk|`.
    pub abs_sup: LimitEstimate,
    /// `lim_m Σ_k |w_mk|`.
    pub abs_limit: LimitEstimate,
}

impl WStats {
    fn zero(index: usize) -> Self {
        WStats {
            gamma: LimitEstimate::exact_at(index, 0.0),
            abs_sup: LimitEstimate::exact_at(index, 0.0),
            abs_limit: LimitEstimate::exact_at(index, 0.0),
        }
    }

    fn scaled(&self, scale: f64) -> Self {
        let f = |e: &LimitEstimate, g: f64| {
            let mut e = e.clone();
            e.value *= g;
            e.residual *= g.abs();
            for s in &mut e.samples {
                s.value *= g;
            }
            e
        };
        WStats {
            gamma: f(&self.gamma, scale),
            abs_sup: f(&self.abs_sup, scale.abs()),
            abs_limit: f(&self.abs_limit, scale.abs()),
        }
    }
}

/// Lazily evaluated transform of one matrix at one order.
///
/// Rows and per-row statistics are cached; the matrix is immutable, so a
/// `Transform` can be shared between threads.
#[derive(Debug)]
pub struct Transform {
    order: FracOrder,
    spec: MatrixSpec,
    tol: ToleranceConfig,
    s: Vec<f64>,
    rows: Mutex<HashMap<usize, Arc<HatRow>>>,
    wstats: Mutex<HashMap<usize, Arc<WStats>>>,
    base_hat: OnceLock<HatRow>,
    base_w: OnceLock<WStats>,
    alpha: OnceLock<AlphaHat>,
}

/// Column limits `α̂_k` and their absolute sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaHat {
    pub columns: Vec<LimitEstimate>,
    /// `α̂_k` is exactly zero for `k >= columns.len()`.
    pub exact_beyond: bool,
    /// `Σ_k α̂_k`.
    pub sum: LimitEstimate,
    /// `Σ_k |α̂_k|`.
    pub abs_sum: LimitEstimate,
}

impl AlphaHat {
    pub fn get(&self, k: usize) -> f64 {
        self.columns.get(k).map_or(0.0, |e| e.value)
    }

    pub fn status(&self) -> LimitStatus {
        self.columns
            .iter()
            .fold(LimitStatus::Converged, |acc, e| acc.combine(e.status))
    }
}

impl Transform {
    pub fn new(order: FracOrder, spec: &MatrixSpec, tol: &ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        let s_len = 4 * (tol.rows + tol.cols) + 4 * tol.window + 64;
        Ok(Transform {
            order,
            spec: spec.clone(),
            tol: *tol,
            s: raw_coeffs(-order.value(), s_len),
            rows: Mutex::new(HashMap::new()),
            wstats: Mutex::new(HashMap::new()),
            base_hat: OnceLock::new(),
            base_w: OnceLock::new(),
            alpha: OnceLock::new(),
        })
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn spec(&self) -> &MatrixSpec {
        &self.spec
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    fn coeffs(&self, len: usize) -> std::borrow::Cow<'_, [f64]> {
        if len <= self.s.len() {
            std::borrow::Cow::Borrowed(&self.s[..len])
        } else {
            std::borrow::Cow::Owned(raw_coeffs(-self.order.value(), len))
        }
    }

    /// Rows that can be nonzero within the evaluation budget.
    pub fn evaluated_rows(&self) -> usize {
        self.spec.row_support().map_or(self.tol.rows, |r| r.min(self.tol.rows))
    }

    /// The matrix has finitely many nonzero rows and all of them fit the
    /// budget, so every limit over rows is exact.
    pub fn rows_exhausted(&self) -> bool {
        self.spec.row_support().is_some_and(|r| r <= self.tol.rows)
    }

    /// Geometric sample rows used for limits over `n`.
    pub fn limit_points(&self) -> Vec<usize> {
        geometric_points(SAMPLE_START, self.tol.rows)
    }

    pub fn hat_row(&self, n: usize) -> Arc<HatRow> {
        if let Some(row) = self.rows.lock().unwrap().get(&n) {
            return Arc::clone(row);
        }
        let row = Arc::new(self.compute_hat_row(n));
        self.rows.lock().unwrap().insert(n, Arc::clone(&row));
        row
    }

    fn compute_hat_row(&self, n: usize) -> HatRow {
        match self.spec.row(n) {
            Row::Finite(a) => {
                if a.iter().all(|&x| x == 0.0) {
                    return HatRow::zero(n);
                }
                let s = self.coeffs(a.len());
                let entries = r_finite(&s, &a);
                let abs: f64 = entries.iter().map(|v| v.abs()).sum();
                let sum: f64 = entries.iter().sum();
                HatRow {
                    index: n,
                    entries,
                    exact: true,
                    tail_status: LimitStatus::Converged,
                    abs_sum: LimitEstimate::exact_at(n, abs),
                    sum: LimitEstimate::exact_at(n, sum),
                }
            }
            Row::Scaled { scale, base } => {
                if scale == 0.0 {
                    return HatRow::zero(n);
                }
                self.base_hat
                    .get_or_init(|| self.hat_of_generator(base))
                    .scaled(n, scale)
            }
        }
    }

    /// `R v` for an infinite generator: each entry is an inner series
    /// summed to `cols`, `2 cols`, `4 cols` terms.
    fn hat_of_generator(&self, v: &GenSeq) -> HatRow {
        let tol = &self.tol;
        let len = tol.cols + tol.window;
        let inner_points = [tol.cols, 2 * tol.cols, 4 * tol.cols];
        let s = self.coeffs(4 * tol.cols + tol.window + 1);
        let mut status = LimitStatus::Converged;
        let entries: Vec<f64> = (0..len)
            .map(|k| {
                let est = series_limit(|i| s[i] * v.get(k + i), &inner_points, tol.window, tol.eps);
                status = status.combine(est.status);
                est.value
            })
            .collect();
        let outer = geometric_points(tol.cols / 4, tol.cols);
        let mut abs_sum = series_limit(|k| entries[k].abs(), &outer, tol.window, tol.eps);
        let mut sum = series_limit(|k| entries[k], &outer, tol.window, tol.eps);
        abs_sum.status = abs_sum.status.combine(status);
        sum.status = sum.status.combine(status);
        HatRow { index: 0, entries, exact: false, tail_status: status, abs_sum, sum }
    }

    /// Row `m` of `W^(A_n)`, with the largest inner-sum truncation residual
    /// (zero for finitely supported rows).
    pub fn w_row(&self, n: usize, m: usize) -> (Vec<f64>, f64) {
        match self.spec.row(n) {
            Row::Finite(a) => {
                let s = self.coeffs(a.len().max(m + 1));
                (w_row_finite(&s, &a, m), 0.0)
            }
            Row::Scaled { scale, base } => {
                let (row, res) = self.w_row_generator(base, m);
                (row.into_iter().map(|w| w * scale).collect(), res * scale.abs())
            }
        }
    }

    fn w_row_generator(&self, v: &GenSeq, m: usize) -> (Vec<f64>, f64) {
        let tail = 4 * self.tol.cols;
        let s = self.coeffs(m + tail + 1);
        let mut residual: f64 = 0.0;
        let row = (0..=m)
            .map(|k| {
                let mut half = 0.0;
                let mut full = 0.0;
                for i in 0..tail {
                    full += s[m - k + i] * v.get(m + i);
                    if i + 1 == tail / 2 {
                        half = full;
                    }
                }
                residual = residual.max((full - half).abs());
                full
            })
            .collect();
        (row, residual)
    }

    pub fn w_stats(&self, n: usize) -> Arc<WStats> {
        if let Some(w) = self.wstats.lock().unwrap().get(&n) {
            return Arc::clone(w);
        }
        let stats = Arc::new(self.compute_w_stats(n));
        self.wstats.lock().unwrap().insert(n, Arc::clone(&stats));
        stats
    }

    fn compute_w_stats(&self, n: usize) -> WStats {
        match self.spec.row(n) {
            Row::Finite(a) => {
                let support = a.iter().rposition(|&x| x != 0.0).map_or(0, |i| i + 1);
                if support == 0 {
                    return WStats::zero(n);
                }
                let s = self.coeffs(support);
                let sums = w_sums_finite(&s, &a[..support]);
                let (arg, sup) = sums
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |(bi, bv), (m, &(_, abs))| if abs > bv { (m, abs) } else { (bi, bv) });
                WStats {
                    gamma: LimitEstimate::exact_at(support, 0.0),
                    abs_sup: LimitEstimate::exact_at(arg, sup),
                    abs_limit: LimitEstimate::exact_at(support, 0.0),
                }
            }
            Row::Scaled { scale, base } => {
                if scale == 0.0 {
                    return WStats::zero(n);
                }
                self.base_w.get_or_init(|| self.w_stats_generator(base)).scaled(scale)
            }
        }
    }

    fn w_stats_generator(&self, v: &GenSeq) -> WStats {
        let tol = &self.tol;
        let points = geometric_points(SAMPLE_START, tol.cols);
        let mut residual: f64 = 0.0;
        let mut sums = HashMap::new();
        let mut eval = |m: usize| -> (f64, f64) {
            *sums.entry(m).or_insert_with(|| {
                let (row, res) = self.w_row_generator(v, m);
                residual = residual.max(res);
                (row.iter().sum::<f64>(), row.iter().map(|w| w.abs()).sum::<f64>())
            })
        };
        let last = *points.last().unwrap();
        for m in points.iter().copied().chain(last..last + tol.window) {
            eval(m);
        }
        let lookup = |m: usize, abs: bool| {
            let (s, a) = sums[&m];
            if abs {
                a
            } else {
                s
            }
        };
        let mut gamma = sequence_limit(|m| lookup(m, false), &points, tol.window, tol.eps);
        let mut abs_limit = sequence_limit(|m| lookup(m, true), &points, tol.window, tol.eps);
        let mut running = 0.0f64;
        let sup_samples: Vec<Sample> = points
            .iter()
            .map(|&m| {
                running = running.max(lookup(m, true));
                Sample { index: m, value: running }
            })
            .collect();
        let mut abs_sup = LimitEstimate::from_running_sup(sup_samples, tol.eps);
        if residual > tol.eps {
            for e in [&mut gamma, &mut abs_limit, &mut abs_sup] {
                e.status = e.status.combine(LimitStatus::Undetermined);
                e.residual = e.residual.max(residual);
            }
        }
        WStats { gamma, abs_sup, abs_limit }
    }

    pub fn gamma(&self, n: usize) -> LimitEstimate {
        self.w_stats(n).gamma.clone()
    }

    /// `lim_n f(n)` for a per-row quantity; exact once rows run out.
    pub fn row_limit(&self, f: impl Fn(usize) -> (f64, LimitStatus)) -> LimitEstimate {
        if let Some(r) = self.spec.row_support().filter(|_| self.rows_exhausted()) {
            let (v, st) = f(r);
            let mut est = LimitEstimate::exact_at(r, v);
            est.status = st;
            return est;
        }
        let points = self.limit_points();
        let last = *points.last().unwrap();
        let mut status = LimitStatus::Converged;
        let mut values = HashMap::new();
        for n in points.iter().copied().chain(last..last + self.tol.window) {
            let (v, st) = f(n);
            status = status.combine(st);
            values.insert(n, v);
        }
        let mut est = sequence_limit(|n| values[&n], &points, self.tol.window, self.tol.eps);
        est.status = est.status.combine(status);
        est
    }

    /// `sup_n f(n)` over the evaluated rows, exact when the rows run out.
    pub fn row_sup(&self, f: impl Fn(usize) -> (f64, LimitStatus)) -> LimitEstimate {
        let rows = self.evaluated_rows();
        let mut status = LimitStatus::Converged;
        let mut running = 0.0f64;
        let mut argmax = 0;
        let mut trail = Vec::new();
        let points = self.limit_points();
        let mut next = points.iter().peekable();
        for n in 0..rows {
            let (v, st) = f(n);
            status = status.combine(st);
            if v > running || v.is_nan() {
                running = v;
                argmax = n;
            }
            while next.peek().is_some_and(|&&p| p == n + 1) {
                trail.push(Sample { index: n + 1, value: running });
                next.next();
            }
        }
        if self.rows_exhausted() {
            let mut est = LimitEstimate::exact_at(argmax, running);
            est.status = status;
            if status != LimitStatus::Converged {
                est.residual = f64::INFINITY;
            }
            return est;
        }
        let mut est = LimitEstimate::from_running_sup(trail, self.tol.eps);
        est.status = est.status.combine(status);
        est
    }

    /// Column limits `α̂_k`, cached.
    pub fn alpha_hat(&self) -> &AlphaHat {
        self.alpha.get_or_init(|| self.compute_alpha_hat())
    }

    fn compute_alpha_hat(&self) -> AlphaHat {
        let tol = &self.tol;
        if let Some(r) = self.spec.row_support().filter(|_| self.rows_exhausted()) {
            return AlphaHat {
                columns: Vec::new(),
                exact_beyond: true,
                sum: LimitEstimate::exact_at(r, 0.0),
                abs_sum: LimitEstimate::exact_at(r, 0.0),
            };
        }
        // Rows run to 4 * rows so that every judged column k < rows / 2 lies
        // well left of the diagonal of the last three sampled rows.
        let points = geometric_points(SAMPLE_START, ALPHA_ROW_FACTOR * tol.rows);
        let last = *points.last().unwrap();
        let sample_rows: Vec<usize> = points.iter().copied().chain(last..last + tol.window).collect();
        let rows: HashMap<usize, Arc<HatRow>> =
            sample_rows.iter().map(|&n| (n, self.hat_row(n))).collect();
        let width = rows
            .values()
            .map(|r| r.entries.len())
            .max()
            .unwrap_or(0)
            .min(tol.rows / 2);
        let exact_beyond = false;
        let row_status = rows
            .values()
            .fold(LimitStatus::Converged, |acc, r| acc.combine(r.tail_status));
        let columns: Vec<LimitEstimate> = (0..width)
            .map(|k| {
                let mut est = sequence_limit(|n| rows[&n].get(k), &points, tol.window, tol.eps);
                est.status = est.status.combine(row_status);
                est
            })
            .collect();
        let col_status = columns
            .iter()
            .fold(LimitStatus::Converged, |acc, e| acc.combine(e.status));
        let (mut sum, mut abs_sum) = if exact_beyond {
            (
                LimitEstimate::exact_at(width, columns.iter().map(|e| e.value).sum()),
                LimitEstimate::exact_at(width, columns.iter().map(|e| e.value.abs()).sum()),
            )
        } else {
            let outer = geometric_points(SAMPLE_START, width.saturating_sub(tol.window));
            (
                series_limit(|k| columns[k].value, &outer, tol.window, tol.eps),
                series_limit(|k| columns[k].value.abs(), &outer, tol.window, tol.eps),
            )
        };
        for e in [&mut sum, &mut abs_sum] {
            e.status = e.status.combine(col_status);
            if e.status != LimitStatus::Converged {
                e.residual = e.residual.max(f64::MIN_POSITIVE);
            }
        }
        AlphaHat { columns, exact_beyond, sum, abs_sum }
    }

    /// `β = lim_n (Σ_k â_nk - γ_n)`.
    pub fn beta(&self) -> LimitEstimate {
        self.row_limit(|n| {
            let row = self.hat_row(n);
            let g = self.gamma(n);
            (row.sum.value - g.value, row.sum.status.combine(g.status))
        })
    }

    /// `δ_n = Σ_k α̂_k - γ_n + β`.
    pub fn delta(&self, n: usize, beta: &LimitEstimate) -> (f64, LimitStatus) {
        let alpha = self.alpha_hat();
        let g = self.gamma(n);
        (
            alpha.sum.value - g.value + beta.value,
            alpha.sum.status.combine(g.status).combine(beta.status),
        )
    }

    /// `Σ_k |â_nk - α̂_k|` over every column where either term may be
    /// nonzero.
    pub fn b_hat_abs_sum(&self, n: usize) -> (f64, LimitStatus) {
        let alpha = self.alpha_hat();
        let row = self.hat_row(n);
        let width = row.entries.len().max(alpha.columns.len());
        let v = (0..width).map(|k| (row.get(k) - alpha.get(k)).abs()).sum();
        (v, row.abs_sum.status.combine(alpha.abs_sum.status))
    }
}

/// `Â` restricted to a `rows x cols` window, with per-row tail flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatMatrix {
    pub source: MatrixSpec,
    pub order: FracOrder,
    pub rows: Vec<HatRow>,
    pub row_tail_flags: Vec<LimitStatus>,
}

pub fn hat_matrix(
    order: FracOrder,
    a: &MatrixSpec,
    rows: usize,
    cols: usize,
    tol: &ToleranceConfig,
) -> Result<HatMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::usage("hat matrix window must be non-empty"));
    }
    let t = Transform::new(order, a, tol)?;
    let rows: Vec<HatRow> = (0..rows)
        .map(|n| {
            let mut row = (*t.hat_row(n)).clone();
            row.entries.resize(cols, 0.0);
            row
        })
        .collect();
    let row_tail_flags = rows.iter().map(|r| r.tail_status.combine(r.abs_sum.status)).collect();
    Ok(HatMatrix { source: a.clone(), order, rows, row_tail_flags })
}

/// `γ_n` for `n < n_max`.
pub fn gamma_sequence(
    order: FracOrder,
    a: &MatrixSpec,
    n_max: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<LimitEstimate>> {
    let t = Transform::new(order, a, tol)?;
    Ok((0..n_max).map(|n| t.gamma(n)).collect())
}

pub fn beta_limit(order: FracOrder, a: &MatrixSpec, tol: &ToleranceConfig) -> Result<LimitEstimate> {
    Ok(Transform::new(order, a, tol)?.beta())
}

/// `α̂_k`, `b̂_nk` and `δ_n` over a `k_max`-column, `n_max`-row window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaHatReport {
    pub alpha: Vec<LimitEstimate>,
    pub b_hat: Vec<Vec<f64>>,
    pub delta: Vec<LimitEstimate>,
    pub beta: LimitEstimate,
    /// `b̂` and `δ` are trustworthy only when this is converged.
    pub status: LimitStatus,
}

pub fn alpha_hat(
    order: FracOrder,
    a: &MatrixSpec,
    k_max: usize,
    n_max: usize,
    tol: &ToleranceConfig,
) -> Result<AlphaHatReport> {
    let t = Transform::new(order, a, tol)?;
    let ah = t.alpha_hat();
    let alpha: Vec<LimitEstimate> = (0..k_max)
        .map(|k| {
            ah.columns.get(k).cloned().unwrap_or_else(|| {
                if ah.exact_beyond {
                    LimitEstimate::exact_at(k, 0.0)
                } else {
                    LimitEstimate::undetermined(Vec::new())
                }
            })
        })
        .collect();
    let alpha_status = alpha
        .iter()
        .fold(LimitStatus::Converged, |acc, e| acc.combine(e.status));
    let beta = t.beta();
    let status = alpha_status.combine(beta.status);
    let b_hat = (0..n_max)
        .map(|n| {
            let row = t.hat_row(n);
            (0..k_max).map(|k| row.get(k) - alpha[k].value).collect()
        })
        .collect();
    let delta = (0..n_max)
        .map(|n| {
            let (v, st) = t.delta(n, &beta);
            let mut e = LimitEstimate::exact_at(n, v);
            e.status = st.combine(status);
            if e.status != LimitStatus::Converged {
                e.residual = f64::INFINITY;
            }
            e
        })
        .collect();
    Ok(AlphaHatReport { alpha, b_hat, delta, beta, status })
}
