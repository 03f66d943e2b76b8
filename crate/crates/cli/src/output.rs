//! JSON and CSV emitters and the run manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use stcq_core::floquet::HarmonicSpectrum;
use stcq_core::qubits::Trajectory;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub seed: Option<u64>,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub files: Vec<ManifestEntry>,
    pub failure: Option<StageFailure>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Serializes with keys sorted at every level and a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes output files under one directory and keeps their inventory.
#[derive(Debug)]
pub struct Emitter {
    root: PathBuf,
    pub format: Format,
    files: Vec<ManifestEntry>,
    started: f64,
}

impl Emitter {
    pub fn new(root: &Path, format: Format) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            format,
            files: Vec::new(),
            started: now(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[ManifestEntry] {
        &self.files
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.retain(|f| f.path != name);
        self.files.push(ManifestEntry {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = canonical_json(value)?;
        self.write_bytes(name, text.as_bytes())
    }

    pub fn csv<R, I>(&mut self, name: &str, header: &[String], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    /// Adopts files written by a nested emitter under `prefix/`.
    pub fn absorb(&mut self, prefix: &str, other: Emitter) {
        for mut f in other.files {
            f.path = format!("{prefix}/{}", f.path);
            self.files.push(f);
        }
    }

    /// Writes the manifest, which lists every other file.
    pub fn finish(
        mut self,
        command: &str,
        config_hash: &str,
        seed: Option<u64>,
        failure: Option<StageFailure>,
    ) -> Result<RunManifest, CliError> {
        let manifest = RunManifest {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_unix_s: self.started,
            finished_unix_s: now(),
            files: self.files.clone(),
            failure,
        };
        let text = canonical_json(&manifest)?;
        let path = self.root.join(MANIFEST_NAME);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.clear();
        Ok(manifest)
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn spectrum_rows(spectrum: &HarmonicSpectrum) -> (Vec<String>, Vec<Vec<String>>) {
    let header = [
        "n",
        "f_hz",
        "re_r",
        "im_r",
        "re_t",
        "im_t",
        "power_r",
        "power_t",
        "theta_r_rad",
        "evanescent",
    ]
    .map(String::from)
    .to_vec();
    let rows = spectrum
        .harmonics
        .iter()
        .map(|h| {
            vec![
                h.n.to_string(),
                num(h.f_hz),
                num(h.re_r),
                num(h.im_r),
                num(h.re_t),
                num(h.im_t),
                num(h.power_r),
                num(h.power_t),
                h.theta_r_rad.map(num).unwrap_or_default(),
                h.evanescent.to_string(),
            ]
        })
        .collect();
    (header, rows)
}

pub fn trajectory_rows(trajectory: &Trajectory) -> (Vec<String>, Vec<Vec<String>>) {
    let qubits = trajectory.populations.first().map_or(0, |p| p.len());
    let mut header = vec!["t_s".to_string()];
    header.extend((1..=qubits).map(|q| format!("p_q{q}")));
    let rows = trajectory
        .times
        .iter()
        .zip(&trajectory.populations)
        .map(|(t, p)| std::iter::once(num(*t)).chain(p.iter().map(|&x| num(x))).collect())
        .collect();
    (header, rows)
}

pub fn emit_spectrum(out: &mut Emitter, stem: &str, spectrum: &HarmonicSpectrum) -> Result<(), CliError> {
    if out.format.json() {
        out.json(&format!("{stem}.json"), spectrum)?;
    }
    if out.format.csv() {
        let (header, rows) = spectrum_rows(spectrum);
        out.csv(&format!("{stem}.csv"), &header, rows)?;
    }
    Ok(())
}

pub fn emit_trajectory(out: &mut Emitter, trajectory: &Trajectory) -> Result<(), CliError> {
    let (header, rows) = trajectory_rows(trajectory);
    out.csv("trajectory.csv", &header, rows)?;
    if out.format.json() {
        out.json("trajectory.json", trajectory)?;
    }
    out.json("final_state.json", &trajectory.final_state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_fields() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = Emitter::new(dir.path(), Format::Both).unwrap();
        e.csv(
            "t.csv",
            &["a".into(), "b".into()],
            vec![vec!["x,y".to_string(), "q\"".to_string()]],
        )
        .unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "a,b\r\n\"x,y\",\"q\"\"\"\r\n");
        let m = e.finish("test", "h", None, None).unwrap();
        assert_eq!(m.files.len(), 1);
        assert_eq!(m.files[0].bytes, text.len() as u64);
    }

    #[test]
    fn canonical_json_sorts_keys() {
        #[derive(Serialize)]
        struct S {
            b: f64,
            a: f64,
        }
        let t = canonical_json(&S { b: 0.1, a: 1e-300 }).unwrap();
        assert!(t.find("\"a\"").unwrap() < t.find("\"b\"").unwrap());
        assert!(t.contains("1e-300"));
    }
}
