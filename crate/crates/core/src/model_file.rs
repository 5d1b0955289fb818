//! Text persistence for [`SgModel`].
//!
//! One `key = value` pair per line, UTF-8. Blank lines and lines starting
//! with `#` are ignored. Version 1 keys:
//!
//! | key | value |
//! |-----|-------|
//! | `format_version` | integer, currently `1` |
//! | `f_lo_ghz`, `f_hi_ghz` | validity range |
//! | `c1_a0` .. `c1_a4`, `c2_a0` .. `c2_a4` | coefficients, ascending degree |
//! | `source` | optional, free text |
//! | `n_train` | optional, integer |
//! | `created_utc` | optional, free text |
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly. Unknown or repeated keys are
//! rejected.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::poly::{Poly4, Provenance, SgModel, MODEL_FORMAT_VERSION, POLY_TERMS};

const NUMERIC_KEYS: [&str; 12] = [
    "f_lo_ghz", "f_hi_ghz", "c1_a0", "c1_a1", "c1_a2", "c1_a3", "c1_a4", "c2_a0", "c2_a1", "c2_a2",
    "c2_a3", "c2_a4",
];
const OPTIONAL_KEYS: [&str; 3] = ["source", "n_train", "created_utc"];

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_text(key: &str, value: &str) -> Result<()> {
    if value.contains(['\n', '\r']) || value.trim() != value || value.is_empty() {
        return Err(Error::InvalidValue(format!(
            "{key} must be a non-empty single line without surrounding whitespace"
        )));
    }
    Ok(())
}

pub fn model_to_string(m: &SgModel) -> Result<String> {
    let mut out = String::new();
    let (lo, hi) = m.valid_range();
    let _ = writeln!(out, "format_version = {}", m.format_version());
    let _ = writeln!(out, "f_lo_ghz = {}", sci(lo));
    let _ = writeln!(out, "f_hi_ghz = {}", sci(hi));
    for (name, poly) in [("c1", m.c1()), ("c2", m.c2())] {
        for (i, a) in poly.coeffs().iter().enumerate() {
            let _ = writeln!(out, "{name}_a{i} = {}", sci(*a));
        }
    }
    let p = m.provenance();
    if let Some(source) = &p.source {
        check_text("source", source)?;
        let _ = writeln!(out, "source = {source}");
    }
    if let Some(n) = p.n_train {
        let _ = writeln!(out, "n_train = {n}");
    }
    if let Some(ts) = &p.created_utc {
        check_text("created_utc", ts)?;
        let _ = writeln!(out, "created_utc = {ts}");
    }
    Ok(out)
}

fn malformed(line: Option<usize>, reason: impl Into<String>) -> Error {
    Error::MalformedModelFile {
        line,
        reason: reason.into(),
    }
}

pub fn parse_model(text: &str) -> Result<SgModel> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            malformed(
                Some(line_no),
                format!("expected `key = value`, got {line:?}"),
            )
        })?;
        let (key, value) = (key.trim(), value.trim());
        if entries.insert(key, (line_no, value)).is_some() {
            return Err(malformed(Some(line_no), format!("duplicate key {key:?}")));
        }
    }

    let (vline, version) = entries
        .get("format_version")
        .copied()
        .ok_or_else(|| malformed(None, "missing format_version"))?;
    match version.parse::<u32>() {
        Ok(MODEL_FORMAT_VERSION) => {}
        Ok(_) => return Err(Error::UnsupportedVersion(version.to_owned())),
        Err(_) => {
            return Err(malformed(
                Some(vline),
                format!("format_version {version:?} is not an integer"),
            ))
        }
    }

    for (key, (line_no, _)) in &entries {
        if *key != "format_version" && !NUMERIC_KEYS.contains(key) && !OPTIONAL_KEYS.contains(key) {
            return Err(malformed(Some(*line_no), format!("unknown key {key:?}")));
        }
    }

    let number = |key: &str| -> Result<f64> {
        let (line_no, v) = entries
            .get(key)
            .copied()
            .ok_or_else(|| malformed(None, format!("missing key {key:?}")))?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| {
                malformed(
                    Some(line_no),
                    format!("{key} = {v:?} is not a finite number"),
                )
            })
    };
    let coeffs = |prefix: &str| -> Result<[f64; POLY_TERMS]> {
        let mut a = [0.0; POLY_TERMS];
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = number(&format!("{prefix}_a{i}"))?;
        }
        Ok(a)
    };
    let lo = number("f_lo_ghz")?;
    let hi = number("f_hi_ghz")?;
    let c1 = Poly4::new(coeffs("c1")?, lo, hi).map_err(|e| malformed(None, e.to_string()))?;
    let c2 = Poly4::new(coeffs("c2")?, lo, hi).map_err(|e| malformed(None, e.to_string()))?;

    let n_train = entries
        .get("n_train")
        .map(|&(line_no, v)| {
            v.parse::<usize>()
                .map_err(|_| malformed(Some(line_no), format!("n_train = {v:?} is not a count")))
        })
        .transpose()?;
    let text_field = |key: &str| -> Result<Option<String>> {
        match entries.get(key) {
            Some(&(line_no, "")) => Err(malformed(Some(line_no), format!("{key} is empty"))),
            Some(&(_, v)) => Ok(Some(v.to_owned())),
            None => Ok(None),
        }
    };
    let provenance = Provenance {
        source: text_field("source")?,
        n_train,
        created_utc: text_field("created_utc")?,
    };
    let model = SgModel::new(c1, c2, provenance).map_err(|e| malformed(None, e.to_string()))?;
    for w in model.physical_warnings() {
        log::warn!("model: {w}");
    }
    Ok(model)
}

pub fn save_model(m: &SgModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = model_to_string(m)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SgModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| malformed(None, "file is not valid UTF-8"))?;
    parse_model(&text)
}
