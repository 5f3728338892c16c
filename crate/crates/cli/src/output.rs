use crate::config::ExperimentConfig;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable naming the root of all output directories.
pub const OUTPUT_ROOT_VAR: &str = "ROUGH_HJ_OUT";

/// `out` from the config, resolved against the output root when relative; otherwise
/// `<root>/<command>-<action>`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("rough-hj-out"));
    match &cfg.out {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => root.join(p),
        None if cfg.action.is_empty() => root.join(&cfg.command),
        None => root.join(format!("{}-{}", cfg.command, cfg.action)),
    }
}

/// Writes through a temporary sibling and renames, so readers never see partial files.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("{}.tmp", path.extension().and_then(|e| e.to_str()).unwrap_or("")));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Collects named artifacts before writing them in one go.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn write_all(&self, dir: &Path) -> std::io::Result<Vec<String>> {
        self.files
            .iter()
            .map(|(name, body)| {
                write_atomic(&dir.join(name), body)?;
                Ok(name.clone())
            })
            .collect()
    }
}

/// Two-column or wider CSV with round-trip float formatting.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/a.csv");
        write_atomic(&p, "x\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "x\n");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn floats_round_trip() {
        let v = 0.1 + 0.2;
        let s = csv(&["v"], [vec![v]]);
        assert_eq!(s.lines().nth(1).unwrap().parse::<f64>().unwrap(), v);
    }
}
