use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;

/// Wrapper written around every JSON result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub version: String,
    pub job: JobConfig,
    pub result: T,
}

pub fn version_string() -> String {
    format!("esspec {}", esspec::VERSION)
}

pub fn write_json<T: Serialize>(path: &Path, job: &JobConfig, result: &T) -> anyhow::Result<()> {
    let env = Envelope {
        version: version_string(),
        job: job.clone(),
        result,
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    write_file(path, &text)
}

pub fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The `result` of an envelope, or the whole document when it is not one.
pub fn read_result<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(inner) = value.get_mut("result") {
        value = inner.take();
    }
    serde_json::from_value(value).with_context(|| format!("decoding {}", path.display()))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with two comment lines naming the version and the job.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(job: &JobConfig, header: &[&str]) -> anyhow::Result<Self> {
        let mut text = String::new();
        writeln!(text, "# {}", version_string())?;
        writeln!(text, "# job: {}", serde_json::to_string(job)?)?;
        writeln!(text, "{}", header.join(","))?;
        Ok(Csv { text })
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    /// Appends rows that already carry their own header, dropping it.
    pub fn extend_body(&mut self, csv: &str) {
        for line in csv.lines().skip(1) {
            self.text.push_str(line);
            self.text.push('\n');
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        write_file(path, &self.text)
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// `out.json` → `out.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}
