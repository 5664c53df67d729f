//! Field file format.
//!
//! ```text
//! {"header":{"format_version":1,"d":3,"N":1,"domain":{"kind":"torus","n":2,"side":1.0}},
//! "data":[
//! [[1.0,0.0],[0.0,0.0], ...],
//! ...
//! ]}
//! ```
//!
//! Each sample is a length-`(dN)²` array of `[re, im]` pairs in row-major
//! matrix order. Non-finite values may appear as the strings `"NaN"`,
//! `"inf"`, `"-inf"` (or `"Infinity"`/`"-Infinity"`) and are rejected with the
//! offending sample and flat index.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::{Domain, MatrixField};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const FORMAT_VERSION: u64 = 1;

pub fn load_field(path: impl AsRef<Path>) -> Result<MatrixField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(&text)
}

pub fn save_field(field: &MatrixField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(field)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json_string(field: &MatrixField) -> String {
    let domain = match field.domain() {
        Domain::Torus { n, side } => json!({"kind": "torus", "n": n, "side": side}),
        Domain::Points { coords } => json!({"kind": "points", "coords": coords}),
    };
    let header = json!({
        "format_version": FORMAT_VERSION,
        "d": field.d(),
        "N": field.n_comp(),
        "domain": domain,
    });
    let mut out = String::new();
    write!(out, "{{\"header\":{header},\n\"data\":[\n").unwrap();
    for (s, m) in field.samples().iter().enumerate() {
        out.push('[');
        let dn = m.ncols();
        for r in 0..m.nrows() {
            for c in 0..dn {
                let z = m[(r, c)];
                if r + c > 0 {
                    out.push(',');
                }
                write!(out, "[{},{}]", Value::from(z.re), Value::from(z.im)).unwrap();
            }
        }
        out.push(']');
        if s + 1 < field.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

pub(crate) fn from_json_str(text: &str) -> Result<MatrixField> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let header = root
        .get("header")
        .ok_or_else(|| Error::Format("missing `header` object".into()))?;
    let version = uint(header, "format_version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format_version {version}")));
    }
    let d = uint(header, "d")? as usize;
    let n_comp = uint(header, "N")? as usize;
    let dom = header
        .get("domain")
        .ok_or_else(|| Error::Format("missing `domain`".into()))?;
    let domain = match dom.get("kind").and_then(Value::as_str) {
        Some("torus") => Domain::Torus {
            n: uint(dom, "n")? as usize,
            side: dom
                .get("side")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Format("torus domain needs numeric `side`".into()))?,
        },
        Some("points") => {
            let coords = dom
                .get("coords")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Format("points domain needs `coords` array".into()))?
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    c.as_array()
                        .and_then(|c| c.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| Error::Format(format!("coordinate {k} is not a numeric array")))
                })
                .collect::<Result<Vec<_>>>()?;
            Domain::Points { coords }
        }
        other => return Err(Error::Format(format!("unknown domain kind {other:?}"))),
    };
    let data = root
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("missing `data` array".into()))?;
    let dn = d * n_comp;
    let mut samples = Vec::with_capacity(data.len());
    for (s, sample) in data.iter().enumerate() {
        let entries = sample
            .as_array()
            .ok_or_else(|| Error::Format(format!("sample {s} is not an array")))?;
        if entries.len() != dn * dn {
            return Err(Error::DimensionMismatch(format!(
                "sample {s} has {} entries, expected {}",
                entries.len(),
                dn * dn
            )));
        }
        let mut m = CMatrix::zeros(dn, dn);
        for (k, e) in entries.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Format(format!("sample {s}, flat index {k}: expected [re, im]")))?;
            let re = component(&pair[0], s, k)?;
            let im = component(&pair[1], s, k)?;
            for (v, part) in [(re, "real"), (im, "imaginary")] {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        sample: s,
                        flat_index: k,
                        part,
                    });
                }
            }
            m[(k / dn, k % dn)] = Complex64::new(re, im);
        }
        samples.push(m);
    }
    MatrixField::new(d, n_comp, domain, samples)
}

fn uint(obj: &Value, key: &str) -> Result<u64> {
    obj.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Format(format!("`{key}` must be a non-negative integer")))
}

fn component(v: &Value, s: usize, k: usize) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Format(format!("sample {s}, flat index {k}: bad number"))),
        Value::String(t) => match t.as_str() {
            "NaN" | "nan" => Ok(f64::NAN),
            "inf" | "Infinity" | "+inf" => Ok(f64::INFINITY),
            "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
            _ => Err(Error::Format(format!("sample {s}, flat index {k}: unexpected string {t:?}"))),
        },
        _ => Err(Error::Format(format!("sample {s}, flat index {k}: expected a number"))),
    }
}

/// The text following the `"data":` key; used to compare data sections.
pub fn data_section(text: &str) -> Option<&str> {
    text.find("\"data\":").map(|i| &text[i..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::constant_torus;
    use crate::linalg;

    #[test]
    fn identity_file_loads() {
        let text = to_json_string(&constant_torus(3, 1, linalg::identity(3), 2, 1.0).unwrap());
        let f = from_json_str(&text).unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(f.torus(), Some((2, 1.0)));
        assert!(f.samples().iter().all(|m| *m == linalg::identity(3)));
    }

    #[test]
    fn random_field_round_trips_bit_exactly() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let f = crate::coeff::sample::elliptic_torus(3, 2, 3, 2.5, 0.3, 7.0, 1.0, &mut rng).unwrap();
        assert_eq!(from_json_str(&to_json_string(&f)).unwrap(), f);
    }

    #[test]
    fn nan_string_is_rejected_with_index() {
        let text = to_json_string(&constant_torus(3, 1, linalg::identity(3), 2, 1.0).unwrap());
        // third sample, flat entry 4 real part
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let line = &mut lines[4];
        let mut parts: Vec<String> = line.split("],[").map(String::from).collect();
        parts[4] = "\"NaN\",0.0".into();
        *line = parts.join("],[");
        let bad = lines.join("\n");
        match from_json_str(&bad) {
            Err(Error::NonFinite {
                sample,
                flat_index,
                part,
            }) => assert_eq!((sample, flat_index, part), (2, 4, "real")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_header_and_dimension_mismatch() {
        assert!(matches!(from_json_str("{\"data\":[]}"), Err(Error::Format(_))));
        let text = "{\"header\":{\"format_version\":1,\"d\":3,\"N\":1,\"domain\":{\"kind\":\"torus\",\"n\":2,\"side\":1.0}},\"data\":[[[1,0]]]}";
        assert!(matches!(from_json_str(text), Err(Error::DimensionMismatch(_))));
        let text = text.replace("\"format_version\":1", "\"format_version\":2");
        assert!(matches!(from_json_str(&text), Err(Error::Format(_))));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_field("/nonexistent/field.json").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/field.json"));
    }
}
