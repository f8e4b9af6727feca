//! Key-value run configuration and flag/config/default resolution.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Parsed `key = value` file. Blank lines and lines starting with `#` are
/// ignored. Relative paths are resolved against the file's directory.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| xlemo::Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| xlemo::Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(ConfigFile {
            values,
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }
}

/// Looks up each setting as flag, then config file, then default, and
/// records the effective value for the manifest.
#[derive(Debug, Default)]
pub struct Settings {
    config: ConfigFile,
    resolved: BTreeMap<String, String>,
    inputs: Vec<(String, PathBuf)>,
}

impl Settings {
    pub fn new(config: Option<&Path>) -> Result<Self, CliError> {
        let config = match config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(Settings {
            config,
            ..Default::default()
        })
    }

    fn configured<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.config.values.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`"))),
            None => Ok(None),
        }
    }

    fn record(&mut self, key: &str, value: String) {
        self.resolved.insert(key.to_string(), value);
    }

    /// A setting with a default.
    pub fn value<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let v = match flag {
            Some(v) => v,
            None => self.configured(key)?.unwrap_or(default),
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let v = flag || self.configured::<bool>(key)?.unwrap_or(false);
        self.record(key, v.to_string());
        Ok(v)
    }

    /// An optional input file; it must exist.
    pub fn input(&mut self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
        let path = match flag {
            Some(p) => Some(p),
            None => self.config.values.get(key).map(|raw| self.config.base.join(raw)),
        };
        let Some(path) = path else { return Ok(None) };
        if !path.is_file() {
            return Err(CliError::Input(xlemo::Error::InvalidArgument(format!(
                "--{key}: no such file `{}`",
                path.display()
            ))));
        }
        self.record(key, path.display().to_string());
        self.inputs.push((key.to_string(), path.clone()));
        Ok(Some(path))
    }

    pub fn required_input(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
        self.input(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing --{key} (flag or config key)")))
    }

    /// The output directory.
    pub fn out_dir(&mut self, flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
        let path = match flag {
            Some(p) => p,
            None => self
                .config
                .values
                .get("out")
                .map(|raw| self.config.base.join(raw))
                .ok_or_else(|| CliError::Usage("missing --out (flag or config key)".into()))?,
        };
        self.record("out", path.display().to_string());
        Ok(path)
    }

    /// Flag, then config, then `XLEMO_SEED`, then 0.
    pub fn seed(&mut self, flag: Option<u64>) -> Result<u64, CliError> {
        let env = match std::env::var("XLEMO_SEED") {
            Ok(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Usage(format!("XLEMO_SEED: `{s}` is not an unsigned integer")))?,
            ),
            Err(_) => None,
        };
        let seed = match flag {
            Some(s) => s,
            None => self.configured("seed")?.or(env).unwrap_or(0),
        };
        self.record("seed", seed.to_string());
        Ok(seed)
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    pub fn inputs(&self) -> &[(String, PathBuf)] {
        &self.inputs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let cfg = ConfigFile::parse("# run\nthreshold = 0.5\nmax_epochs=7\n", Path::new("/tmp/run.cfg")).unwrap();
        let mut s = Settings {
            config: cfg,
            ..Default::default()
        };
        assert_eq!(s.value("threshold", Some(0.8), 0.9).unwrap(), 0.8);
        assert_eq!(s.value("threshold", None, 0.9).unwrap(), 0.5);
        assert_eq!(s.value("max-epochs", None, 50usize).unwrap(), 7);
        assert_eq!(s.value("patience", None, 3usize).unwrap(), 3);
        assert_eq!(s.resolved()["patience"], "3");
    }

    #[test]
    fn bad_lines() {
        assert!(ConfigFile::parse("threshold 0.5", Path::new("x")).is_err());
        let mut s = Settings {
            config: ConfigFile::parse("threshold = high", Path::new("x")).unwrap(),
            ..Default::default()
        };
        assert!(s.value("threshold", None, 0.9).is_err());
    }
}
