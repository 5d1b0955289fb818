//! Dataset directory layout:
//!
//! ```text
//! <dir>/manifest.csv          id,type,w_air_g,f_float_g,sg,temperature_c,replicates
//! <dir>/spectra/<file>.csv    f_ghz,eps_real[,eps_imag]
//! ```
//!
//! `replicates` lists spectrum files relative to `<dir>`, separated by `;`.
//! `sg` may be empty, in which case it is derived from `w_air_g / f_float_g`;
//! when given it is authoritative. `w_air_g`, `f_float_g` and
//! `temperature_c` may be empty.

use std::fs;
use std::path::{Path, PathBuf};

use super::{num, opt_num, read_rows_from_path, write_rows_to_path, CsvRow, FieldError, Fields};
use crate::error::{Error, Result};
use crate::types::{
    Dataset, DielectricSpectrum, FrequencyGrid, PotatoType, ReplicateSet, TuberSample, Weighing,
};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const SPECTRA_DIR: &str = "spectra";

struct ManifestRow {
    id: String,
    ptype: String,
    w_air_g: Option<f64>,
    f_float_g: Option<f64>,
    sg: Option<f64>,
    temperature_c: Option<f64>,
    replicates: Vec<String>,
}

impl CsvRow for ManifestRow {
    const HEADER: &'static [&'static str] = &[
        "id",
        "type",
        "w_air_g",
        "f_float_g",
        "sg",
        "temperature_c",
        "replicates",
    ];
    const OPTIONAL: &'static [&'static str] = &["w_air_g", "f_float_g", "sg", "temperature_c"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.id.clone(),
            self.ptype.clone(),
            opt_num(self.w_air_g),
            opt_num(self.f_float_g),
            opt_num(self.sg),
            opt_num(self.temperature_c),
            self.replicates.join(";"),
        ]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        let replicates: Vec<String> = r
            .text("replicates")?
            .split(';')
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect();
        if replicates.is_empty() {
            return Err(FieldError::new("replicates", "no replicate files listed"));
        }
        Ok(Self {
            id: r.text("id")?,
            ptype: r.text("type")?,
            w_air_g: r.opt_f64("w_air_g")?,
            f_float_g: r.opt_f64("f_float_g")?,
            sg: r.opt_f64("sg")?,
            temperature_c: r.opt_f64("temperature_c")?,
            replicates,
        })
    }
}

struct SpectrumRow {
    f_ghz: f64,
    eps_real: f64,
    eps_imag: Option<f64>,
}

impl CsvRow for SpectrumRow {
    const HEADER: &'static [&'static str] = &["f_ghz", "eps_real", "eps_imag"];
    const OPTIONAL: &'static [&'static str] = &["eps_imag"];

    fn to_fields(&self) -> Vec<String> {
        let mut v = vec![num(self.f_ghz), num(self.eps_real)];
        if let Some(i) = self.eps_imag {
            v.push(num(i));
        }
        v
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            f_ghz: r.f64("f_ghz")?,
            eps_real: r.f64("eps_real")?,
            eps_imag: r.opt_f64("eps_imag")?,
        })
    }
}

fn invalid_file(path: &Path, reason: String) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line: 0,
        column: String::new(),
        reason,
    }
}

pub fn write_spectrum(path: impl AsRef<Path>, s: &DielectricSpectrum) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| super::csv_error(path, e))?;
    let header: &[&str] = if s.eps_imag().is_some() {
        SpectrumRow::HEADER
    } else {
        &SpectrumRow::HEADER[..2]
    };
    w.write_record(header)
        .map_err(|e| super::csv_error(path, e))?;
    for (k, &f_ghz) in s.grid().points().iter().enumerate() {
        let row = SpectrumRow {
            f_ghz,
            eps_real: s.eps_real()[k],
            eps_imag: s.eps_imag().map(|i| i[k]),
        };
        w.write_record(row.to_fields())
            .map_err(|e| super::csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<DielectricSpectrum> {
    let path = path.as_ref();
    let rows: Vec<SpectrumRow> = read_rows_from_path(path)?;
    let has_imag = rows.iter().filter(|r| r.eps_imag.is_some()).count();
    if has_imag != 0 && has_imag != rows.len() {
        return Err(invalid_file(
            path,
            "eps_imag present on some rows only".into(),
        ));
    }
    let grid = FrequencyGrid::new(rows.iter().map(|r| r.f_ghz).collect())
        .map_err(|e| invalid_file(path, e.to_string()))?;
    let real = rows.iter().map(|r| r.eps_real).collect();
    let imag = (has_imag > 0).then(|| rows.iter().map(|r| r.eps_imag.unwrap_or(0.0)).collect());
    DielectricSpectrum::new(grid, real, imag).map_err(|e| invalid_file(path, e.to_string()))
}

fn file_stem_for(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Write `ds` into `dir` (created if needed).
pub fn write_dataset(ds: &Dataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let spectra = dir.join(SPECTRA_DIR);
    fs::create_dir_all(&spectra).map_err(|e| Error::io(&spectra, e))?;
    let mut rows = Vec::with_capacity(ds.len());
    for (i, s) in ds.samples().iter().enumerate() {
        // index prefix keeps names unique even when sanitised ids collide
        let stem = format!("{i:04}_{}", file_stem_for(s.id()));
        let mut files = Vec::with_capacity(s.replicates().len());
        for (r, spec) in s.replicates().replicates().iter().enumerate() {
            let rel = format!("{SPECTRA_DIR}/{stem}_r{}.csv", r + 1);
            write_spectrum(dir.join(&rel), spec)?;
            files.push(rel);
        }
        rows.push(ManifestRow {
            id: s.id().to_owned(),
            ptype: s.ptype().to_string(),
            w_air_g: s.weighing().map(|w| w.w_air_g),
            f_float_g: s.weighing().map(|w| w.f_float_g),
            sg: Some(s.sg()),
            temperature_c: s.temperature_c(),
            replicates: files,
        });
    }
    write_rows_to_path(dir.join(MANIFEST_FILE), &rows)
}

/// Read a dataset directory. The dataset id is the directory name.
pub fn read_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let manifest = dir.join(MANIFEST_FILE);
    let rows: Vec<ManifestRow> = read_rows_from_path(&manifest)?;
    let mut samples = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let line = i as u64 + 2;
        let at = |column: &str, reason: String| Error::Parse {
            path: manifest.clone(),
            line,
            column: column.to_owned(),
            reason,
        };
        let ptype: PotatoType = row
            .ptype
            .parse()
            .map_err(|e: Error| at("type", e.to_string()))?;
        let weighing = match (row.w_air_g, row.f_float_g) {
            (Some(w_air_g), Some(f_float_g)) => Some(Weighing { w_air_g, f_float_g }),
            (None, None) => None,
            _ => {
                return Err(at(
                    "f_float_g",
                    "w_air_g and f_float_g must be given together".into(),
                ))
            }
        };
        let reps = row
            .replicates
            .iter()
            .map(|f| read_spectrum(dir.join(PathBuf::from(f))))
            .collect::<Result<Vec<_>>>()?;
        let reps = ReplicateSet::new(reps).map_err(|e| at("replicates", e.to_string()))?;
        let mut sample = TuberSample::new(row.id, ptype, weighing, row.sg, reps)
            .map_err(|e| at("sg", e.to_string()))?;
        if let Some(t) = row.temperature_c {
            sample = sample.with_temperature(t);
        }
        samples.push(sample);
    }
    let grid = samples
        .first()
        .map(|s| s.replicates().grid().clone())
        .ok_or_else(|| invalid_file(&manifest, "dataset has no samples".into()))?;
    let ds = Dataset::new(grid, samples)?;
    Ok(match dir.file_name().and_then(|n| n.to_str()) {
        Some(name) => ds.with_id(name),
        None => ds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::published_model;
    use crate::synth::{gen_inverse_model, gen_mixture, MixtureParams, SynthConfig};

    fn small() -> Dataset {
        let grid = FrequencyGrid::uniform(0.3, 3.0, 12).unwrap();
        let cfg = SynthConfig {
            n_per_type: 2,
            ..SynthConfig::default()
        };
        gen_inverse_model(&cfg, &published_model(), &grid).unwrap()
    }

    #[test]
    fn dataset_round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train");
        let ds = small();
        write_dataset(&ds, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back.id(), Some("train"));
        assert_eq!(back, ds.clone().with_id("train"));
    }

    #[test]
    fn mixture_round_trip_with_imag() {
        let dir = tempfile::tempdir().unwrap();
        let grid = FrequencyGrid::uniform(0.3, 3.0, 8).unwrap();
        let cfg = SynthConfig {
            n_per_type: 1,
            ..SynthConfig::default()
        };
        let ds = gen_mixture(&cfg, &MixtureParams::default(), &grid).unwrap();
        write_dataset(&ds, dir.path()).unwrap();
        let back = read_dataset(dir.path()).unwrap();
        assert_eq!(back.samples(), ds.samples());
    }

    #[test]
    fn sg_derived_from_weights_when_absent() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("spectra")).unwrap();
        fs::write(
            dir.path().join("spectra/a.csv"),
            "f_ghz,eps_real\n0.3,70\n1.0,65\n3.0,60\n",
        )
        .unwrap();
        fs::write(
            dir.path().join(MANIFEST_FILE),
            "id,type,w_air_g,f_float_g,temperature_c,replicates\na,russet,105.5,100,,spectra/a.csv\n",
        )
        .unwrap();
        let ds = read_dataset(dir.path()).unwrap();
        assert!((ds.samples()[0].sg() - 1.055).abs() < 1e-15);
        assert_eq!(ds.samples()[0].ptype(), &PotatoType::Russet);
    }

    #[test]
    fn parse_errors_name_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join(MANIFEST_FILE),
            "id,type,sg,replicates\na,red,1.05,x.csv\nb,red,abc,y.csv\n",
        )
        .unwrap();
        match read_dataset(dir.path()).unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "sg");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_manifest_is_io() {
        let dir = tempfile::tempdir().unwrap();
        assert!(read_dataset(dir.path().join("none")).unwrap_err().is_io());
    }
}
