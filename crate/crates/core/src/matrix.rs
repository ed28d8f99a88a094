//! Infinite matrices described by finite data plus a tail rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a generated sequence continues past its listed terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extend {
    /// All further terms are zero.
    #[default]
    Zero,
    /// The last listed term repeats forever.
    Constant,
    /// Terms continue with the ratio of the last two listed terms.
    Geometric,
}

/// Listed terms followed by an [`Extend`] rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenSeq {
    terms: Vec<f64>,
    extend: Extend,
}

impl GenSeq {
    pub fn new(terms: Vec<f64>, extend: Extend) -> Result<Self> {
        if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
            return Err(Error::usage(format!("generator term {i} is not finite")));
        }
        match extend {
            Extend::Constant if terms.is_empty() => {
                return Err(Error::usage("constant extension needs at least one term"))
            }
            Extend::Geometric if terms.len() < 2 => {
                return Err(Error::usage("geometric extension needs at least two terms"))
            }
            Extend::Geometric if terms[terms.len() - 2] == 0.0 => {
                return Err(Error::usage("geometric extension needs a nonzero second-to-last term"))
            }
            _ => {}
        }
        Ok(GenSeq { terms, extend })
    }

    pub fn finite(terms: Vec<f64>) -> Result<Self> {
        GenSeq::new(terms, Extend::Zero)
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn extend(&self) -> Extend {
        self.extend
    }

    fn ratio(&self) -> f64 {
        let n = self.terms.len();
        self.terms[n - 1] / self.terms[n - 2]
    }

    pub fn get(&self, j: usize) -> f64 {
        if let Some(&t) = self.terms.get(j) {
            return t;
        }
        match self.extend {
            Extend::Zero => 0.0,
            Extend::Constant => *self.terms.last().unwrap(),
            Extend::Geometric => {
                let last = *self.terms.last().unwrap();
                let steps = (j + 1 - self.terms.len()) as i32;
                last * self.ratio().powi(steps)
            }
        }
    }

    /// Length past which every term is zero, or `None` for an infinite tail.
    pub fn support(&self) -> Option<usize> {
        let trimmed = self.terms.iter().rposition(|&t| t != 0.0).map_or(0, |i| i + 1);
        let tail_vanishes = match self.extend {
            Extend::Zero => true,
            Extend::Constant | Extend::Geometric => *self.terms.last().unwrap() == 0.0,
        };
        tail_vanishes.then_some(trimmed)
    }
}

/// Window `rows x cols` outside which a matrix is taken to be zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncate {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixKind {
    /// Listed rows; everything else is zero.
    Explicit { rows: Vec<Vec<f64>> },
    /// `a_nn = terms(n)`.
    Diagonal { terms: GenSeq },
    /// `a_{n,n+offsets[i]} = values[i]` for every row `n`.
    Band { offsets: Vec<i64>, values: Vec<f64> },
    /// `a_nk = u(n) v(k)`.
    RankOne { u: GenSeq, v: GenSeq },
    /// Listed rows followed by zero rows.
    FiniteRank { rows: Vec<Vec<f64>> },
    Zero,
}

/// One row of a matrix, either listed in full or a scaled copy of a shared
/// infinite generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Row<'a> {
    Finite(Vec<f64>),
    Scaled { scale: f64, base: &'a GenSeq },
}

impl Row<'_> {
    pub fn get(&self, j: usize) -> f64 {
        match self {
            Row::Finite(v) => v.get(j).copied().unwrap_or(0.0),
            Row::Scaled { scale, base } => scale * base.get(j),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Row::Finite(v) => v.iter().all(|&x| x == 0.0),
            Row::Scaled { scale, .. } => *scale == 0.0,
        }
    }
}

/// An immutable infinite matrix `A = (a_nk)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpec {
    kind: MatrixKind,
    truncate: Option<Truncate>,
}

impl Serialize for MatrixSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from(self).serialize(s)
    }
}

impl MatrixSpec {
    pub fn new(kind: MatrixKind) -> Result<Self> {
        match &kind {
            MatrixKind::Explicit { rows } | MatrixKind::FiniteRank { rows } => {
                for (n, row) in rows.iter().enumerate() {
                    if let Some(k) = row.iter().position(|t| !t.is_finite()) {
                        return Err(Error::usage(format!("entry ({n}, {k}) is not finite")));
                    }
                }
            }
            MatrixKind::Band { offsets, values } => {
                if offsets.len() != values.len() {
                    return Err(Error::usage(format!(
                        "band has {} offsets but {} values",
                        offsets.len(),
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::usage("band values must be finite"));
                }
            }
            _ => {}
        }
        Ok(MatrixSpec { kind, truncate: None })
    }

    pub fn with_truncate(mut self, rows: usize, cols: usize) -> Self {
        self.truncate = Some(Truncate { rows, cols });
        self
    }

    pub fn zero() -> Self {
        MatrixSpec { kind: MatrixKind::Zero, truncate: None }
    }

    pub fn identity() -> Self {
        MatrixSpec::diagonal(GenSeq::new(vec![1.0], Extend::Constant).unwrap())
    }

    pub fn diagonal(terms: GenSeq) -> Self {
        MatrixSpec { kind: MatrixKind::Diagonal { terms }, truncate: None }
    }

    pub fn finite_rank(rows: Vec<Vec<f64>>) -> Result<Self> {
        MatrixSpec::new(MatrixKind::FiniteRank { rows })
    }

    pub fn explicit(rows: Vec<Vec<f64>>) -> Result<Self> {
        MatrixSpec::new(MatrixKind::Explicit { rows })
    }

    pub fn rank_one(u: GenSeq, v: GenSeq) -> Self {
        MatrixSpec { kind: MatrixKind::RankOne { u, v }, truncate: None }
    }

    pub fn band(offsets: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        MatrixSpec::new(MatrixKind::Band { offsets, values })
    }

    pub fn kind(&self) -> &MatrixKind {
        &self.kind
    }

    pub fn truncate(&self) -> Option<Truncate> {
        self.truncate
    }

    /// Parses the JSON description, reporting the failing location.
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: MatrixRepr = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        repr.try_into()
    }

    /// Number of leading rows that may be nonzero; `None` when infinitely
    /// many rows are nonzero.
    pub fn row_support(&self) -> Option<usize> {
        let natural = match &self.kind {
            MatrixKind::Explicit { rows } | MatrixKind::FiniteRank { rows } => {
                Some(rows.iter().rposition(|r| r.iter().any(|&x| x != 0.0)).map_or(0, |i| i + 1))
            }
            MatrixKind::Diagonal { terms } => terms.support(),
            MatrixKind::Band { values, .. } => {
                if values.iter().all(|&v| v == 0.0) {
                    Some(0)
                } else {
                    None
                }
            }
            MatrixKind::RankOne { u, v } => {
                if v.support() == Some(0) {
                    Some(0)
                } else {
                    u.support()
                }
            }
            MatrixKind::Zero => Some(0),
        };
        match (natural, self.truncate) {
            (_, Some(t)) if t.cols == 0 => Some(0),
            (Some(r), Some(t)) => Some(r.min(t.rows)),
            (None, Some(t)) => Some(t.rows),
            (r, None) => r,
        }
    }

    pub fn entry(&self, n: usize, k: usize) -> f64 {
        if let Some(t) = self.truncate {
            if n >= t.rows || k >= t.cols {
                return 0.0;
            }
        }
        match &self.kind {
            MatrixKind::Explicit { rows } | MatrixKind::FiniteRank { rows } => {
                rows.get(n).and_then(|r| r.get(k)).copied().unwrap_or(0.0)
            }
            MatrixKind::Diagonal { terms } => {
                if n == k {
                    terms.get(n)
                } else {
                    0.0
                }
            }
            MatrixKind::Band { offsets, values } => offsets
                .iter()
                .zip(values)
                .filter(|(&off, _)| n as i64 + off == k as i64)
                .map(|(_, &v)| v)
                .sum(),
            MatrixKind::RankOne { u, v } => u.get(n) * v.get(k),
            MatrixKind::Zero => 0.0,
        }
    }

    /// Row `n`, listed in full whenever its support is finite.
    pub fn row(&self, n: usize) -> Row<'_> {
        if let Some(t) = self.truncate {
            if n >= t.rows {
                return Row::Finite(Vec::new());
            }
            let len = self.natural_row_len(n).map_or(t.cols, |l| l.min(t.cols));
            return Row::Finite((0..len).map(|k| self.entry(n, k)).collect());
        }
        match &self.kind {
            MatrixKind::RankOne { u, v } if v.support().is_none() => {
                Row::Scaled { scale: u.get(n), base: v }
            }
            _ => {
                let len = self.natural_row_len(n).unwrap_or(0);
                Row::Finite((0..len).map(|k| self.entry(n, k)).collect())
            }
        }
    }

    /// Support length of row `n` ignoring truncation; `None` if infinite.
    fn natural_row_len(&self, n: usize) -> Option<usize> {
        match &self.kind {
            MatrixKind::Explicit { rows } | MatrixKind::FiniteRank { rows } => {
                Some(rows.get(n).map_or(0, |r| r.len()))
            }
            MatrixKind::Diagonal { .. } => Some(n + 1),
            MatrixKind::Band { offsets, .. } => {
                let reach = offsets.iter().map(|&o| n as i64 + o).max().unwrap_or(-1);
                Some((reach + 1).max(0) as usize)
            }
            MatrixKind::RankOne { u, v } => {
                if u.get(n) == 0.0 {
                    Some(0)
                } else {
                    v.support()
                }
            }
            MatrixKind::Zero => Some(0),
        }
    }
}

/// Wire format of a matrix description.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixRepr {
    #[serde(flatten)]
    kind: KindRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncate: Option<Truncate>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KindRepr {
    Explicit {
        rows: Vec<Vec<f64>>,
    },
    Diagonal {
        terms: Vec<f64>,
        #[serde(default)]
        extend: Extend,
    },
    Band {
        offsets: Vec<i64>,
        values: Vec<f64>,
    },
    RankOne {
        u: Vec<f64>,
        v: Vec<f64>,
        #[serde(default)]
        u_extend: Extend,
        #[serde(default)]
        v_extend: Extend,
    },
    FiniteRank {
        rows: Vec<Vec<f64>>,
    },
    Zero {},
}

impl From<&MatrixSpec> for MatrixRepr {
    fn from(spec: &MatrixSpec) -> Self {
        let kind = match &spec.kind {
            MatrixKind::Explicit { rows } => KindRepr::Explicit { rows: rows.clone() },
            MatrixKind::Diagonal { terms } => KindRepr::Diagonal {
                terms: terms.terms.clone(),
                extend: terms.extend,
            },
            MatrixKind::Band { offsets, values } => KindRepr::Band {
                offsets: offsets.clone(),
                values: values.clone(),
            },
            MatrixKind::RankOne { u, v } => KindRepr::RankOne {
                u: u.terms.clone(),
                v: v.terms.clone(),
                u_extend: u.extend,
                v_extend: v.extend,
            },
            MatrixKind::FiniteRank { rows } => KindRepr::FiniteRank { rows: rows.clone() },
            MatrixKind::Zero => KindRepr::Zero {},
        };
        MatrixRepr { kind, truncate: spec.truncate }
    }
}

impl TryFrom<MatrixRepr> for MatrixSpec {
    type Error = Error;
    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let kind = match repr.kind {
            KindRepr::Explicit { rows } => MatrixKind::Explicit { rows },
            KindRepr::Diagonal { terms, extend } => MatrixKind::Diagonal {
                terms: GenSeq::new(terms, extend)?,
            },
            KindRepr::Band { offsets, values } => MatrixKind::Band { offsets, values },
            KindRepr::RankOne { u, v, u_extend, v_extend } => MatrixKind::RankOne {
                u: GenSeq::new(u, u_extend)?,
                v: GenSeq::new(v, v_extend)?,
            },
            KindRepr::FiniteRank { rows } => MatrixKind::FiniteRank { rows },
            KindRepr::Zero {} => MatrixKind::Zero,
        };
        let mut spec = MatrixSpec::new(kind)?;
        spec.truncate = repr.truncate;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_tails() {
        let c = GenSeq::new(vec![2.0, 3.0], Extend::Constant).unwrap();
        assert_eq!(c.get(10), 3.0);
        assert_eq!(c.support(), None);
        let g = GenSeq::new(vec![1.0, 0.5], Extend::Geometric).unwrap();
        assert_eq!(g.get(4), 1.0 / 16.0);
        let z = GenSeq::finite(vec![1.0, 2.0, 0.0]).unwrap();
        assert_eq!(z.get(5), 0.0);
        assert_eq!(z.support(), Some(2));
        assert!(GenSeq::new(vec![1.0], Extend::Geometric).is_err());
    }

    #[test]
    fn parses_every_kind() {
        let cases = [
            (r#"{"kind":"explicit","rows":[[1,2],[3]]}"#, Some(2)),
            (r#"{"kind":"diagonal","terms":[1],"extend":"constant"}"#, None),
            (r#"{"kind":"diagonal","terms":[1,2]}"#, Some(2)),
            (r#"{"kind":"band","offsets":[0,-1],"values":[1,-1]}"#, None),
            (r#"{"kind":"rank_one","u":[1,1],"v":[1],"v_extend":"constant"}"#, Some(2)),
            (r#"{"kind":"finite_rank","rows":[[1],[0,2],[0]]}"#, Some(2)),
            (r#"{"kind":"zero"}"#, Some(0)),
            (r#"{"kind":"band","offsets":[0],"values":[1],"truncate":{"rows":5,"cols":7}}"#, Some(5)),
        ];
        for (json, support) in cases {
            let m = MatrixSpec::from_json(json).unwrap_or_else(|e| panic!("{json}: {e}"));
            assert_eq!(m.row_support(), support, "{json}");
            let again = MatrixSpec::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
            assert_eq!(again, m, "{json}");
        }
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = MatrixSpec::from_json("{\"kind\":\"explicit\",\n\"rows\":[[1,]]}").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(MatrixSpec::from_json(r#"{"kind":"band","offsets":[0],"values":[]}"#).is_err());
        assert!(MatrixSpec::from_json(r#"{"kind":"nope"}"#).is_err());
    }

    #[test]
    fn entries_and_rows() {
        let band = MatrixSpec::band(vec![0, -1], vec![1.0, -1.0]).unwrap();
        assert_eq!(band.entry(3, 3), 1.0);
        assert_eq!(band.entry(3, 2), -1.0);
        assert_eq!(band.entry(0, 0), 1.0);
        assert_eq!(band.row(2), Row::Finite(vec![0.0, -1.0, 1.0]));

        let id = MatrixSpec::identity();
        assert_eq!(id.row(2), Row::Finite(vec![0.0, 0.0, 1.0]));
        assert_eq!(id.row_support(), None);

        let v = GenSeq::new(vec![1.0], Extend::Constant).unwrap();
        let r1 = MatrixSpec::rank_one(GenSeq::finite(vec![2.0]).unwrap(), v);
        assert!(matches!(r1.row(0), Row::Scaled { scale, .. } if scale == 2.0));
        assert!(r1.row(1).is_zero());

        let t = MatrixSpec::identity().with_truncate(3, 2);
        assert_eq!(t.row(2), Row::Finite(vec![0.0, 0.0]));
        assert_eq!(t.row(5), Row::Finite(vec![]));
        assert_eq!(t.row_support(), Some(3));
    }
}
