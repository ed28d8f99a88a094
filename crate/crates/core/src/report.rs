//! JSON report helpers.
//!
//! Reports are serialized with a fixed field order and shortest round-trip
//! float formatting, so identical inputs always give byte-identical output.
//! Non-finite numbers, which JSON cannot carry, are written as the strings
//! `"inf"`, `"-inf"` and `"nan"`.

use serde::{Serialize, Serializer};

pub fn finite_or_tag<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn opt_finite_or_tag<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => finite_or_tag(v, s),
        None => s.serialize_none(),
    }
}

pub fn vec_finite_or_tag<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Tagged(f64);
    impl Serialize for Tagged {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            finite_or_tag(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Tagged(*x))?;
    }
    seq.end()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Probe {
        #[serde(serialize_with = "finite_or_tag")]
        a: f64,
        #[serde(serialize_with = "vec_finite_or_tag")]
        b: Vec<f64>,
    }

    #[test]
    fn non_finite_values_become_tags() {
        let p = Probe { a: f64::INFINITY, b: vec![0.1, f64::NEG_INFINITY, f64::NAN] };
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"a":"inf","b":[0.1,"-inf","nan"]}"#);
    }

    #[test]
    fn floats_round_trip() {
        let x = 0.1 + 0.2;
        let json = serde_json::to_string(&Probe { a: x, b: vec![] }).unwrap();
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["a"].as_f64().unwrap(), x);
    }
}
