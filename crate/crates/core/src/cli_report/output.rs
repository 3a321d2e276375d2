//! Byte-stable JSON/CSV writers and the run manifest.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::profile::fmt17;

use super::config::RunConfig;

pub const ARTIFACT_VERSION: &str = concat!("bn6 ", env!("CARGO_PKG_VERSION"));
pub const MANIFEST: &str = "manifest.json";

/// Pretty JSON with every float written as `{:.16e}`.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::parse("json serialization", e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

/// Comma-separated table with a header row; floats at 17 significant digits.
pub fn to_csv(header: &[&str], rows: &[Vec<CsvCell>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(CsvCell::render).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub enum CsvCell {
    F(f64),
    I(usize),
}

impl CsvCell {
    fn render(&self) -> String {
        match self {
            CsvCell::F(x) => fmt17(*x),
            CsvCell::I(n) => n.to_string(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One emitted file with its content hash.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Verdict {
    pub criterion: usize,
    pub title: String,
    pub pass: bool,
    pub measured: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: Value,
    pub config_text: String,
    pub config_digest: String,
    pub artifact_version: String,
    pub stage_outputs: BTreeMap<String, Vec<FileEntry>>,
    pub timing: BTreeMap<String, f64>,
    pub finished_at_unix: BTreeMap<String, u64>,
    pub verdicts: Vec<Verdict>,
}

impl RunManifest {
    pub fn fresh(cfg: &RunConfig) -> Result<Self> {
        Ok(RunManifest {
            config: serde_json::to_value(cfg).map_err(|e| Error::parse("config", e.to_string()))?,
            config_text: cfg.canonical(),
            config_digest: cfg.digest(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            stage_outputs: BTreeMap::new(),
            timing: BTreeMap::new(),
            finished_at_unix: BTreeMap::new(),
            verdicts: Vec::new(),
        })
    }

    /// The manifest in `dir` if it belongs to this config, otherwise a fresh one.
    pub fn load_or_fresh(dir: &Path, cfg: &RunConfig) -> Result<Self> {
        let path = dir.join(MANIFEST);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(m) = serde_json::from_str::<RunManifest>(&text) {
                if m.config_digest == cfg.digest() && m.artifact_version == ARTIFACT_VERSION {
                    return Ok(m);
                }
            }
        }
        Self::fresh(cfg)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(MANIFEST), to_json(self)?)?;
        Ok(())
    }
}

/// Writes files for one stage and records them in the manifest.
pub struct StageWriter<'a> {
    dir: &'a Path,
    files: Vec<FileEntry>,
}

impl<'a> StageWriter<'a> {
    pub fn new(dir: &'a Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(StageWriter { dir, files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, content: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, content)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let text = to_json(value)?;
        self.write(name, &text)
    }

    pub fn finish(self, manifest: &mut RunManifest, stage: &str, seconds: f64) {
        manifest.stage_outputs.insert(stage.to_string(), self.files);
        manifest.timing.insert(stage.to_string(), seconds);
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        manifest.finished_at_unix.insert(stage.to_string(), now);
    }
}

/// Reads a stage's JSON, demanding that it carries the expected config digest.
pub fn read_stage_json(dir: &Path, stage: &str, file: &str, digest: &str) -> Result<Value> {
    let path = dir.join(file);
    let text = std::fs::read_to_string(&path).map_err(|_| Error::MissingDependency {
        stage: stage.to_string(),
        path: path.clone(),
    })?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::parse(file, e.to_string()))?;
    let found = v.get("config_digest").and_then(Value::as_str).unwrap_or("");
    if found != digest {
        return Err(Error::MixedDigest(format!(
            "{file} was produced under config {found}, current config is {digest}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "n": 3, "v": [1.0, -2.5e-300]})).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("-2.5000000000000000e-300"), "{s}");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
        assert_eq!(back["n"].as_u64(), Some(3));
    }

    #[test]
    fn csv_layout() {
        let s = to_csv(&["a", "b"], &[vec![CsvCell::F(1.5), CsvCell::I(2)]]);
        assert_eq!(s, "a,b\n1.5000000000000000e0,2\n");
    }
}
