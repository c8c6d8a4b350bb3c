//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug)]
enum Source {
    File(PathBuf, usize),
    Flag,
}

impl Source {
    fn describe(&self, key: &str) -> String {
        match self {
            Source::File(path, line) => format!("{}:{line}: key `{key}`", path.display()),
            Source::Flag => format!("flag --{key}"),
        }
    }
}

/// Resolved parameters. Each lookup records the value actually used so the
/// whole effective configuration can be echoed into the manifest.
pub struct Params {
    raw: BTreeMap<String, (String, Source)>,
    resolved: BTreeMap<String, String>,
}

impl Params {
    /// Merges `config` (if any) with flag values; flags win. Keys in the file
    /// that are not in `known` are rejected with their line number.
    pub fn load(config: Option<&Path>, flags: &[(&str, Option<String>)]) -> Result<Self, ConfigError> {
        let mut raw = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let lineno = i + 1;
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    ConfigError(format!("{}:{lineno}: expected `key = value`", path.display()))
                })?;
                let k = k.trim();
                if !flags.iter().any(|(name, _)| *name == k) {
                    return Err(ConfigError(format!("{}:{lineno}: unknown key `{k}`", path.display())));
                }
                let src = Source::File(path.to_path_buf(), lineno);
                if let Some((_, Source::File(_, first))) = raw.insert(k.to_string(), (v.trim().to_string(), src)) {
                    return Err(ConfigError(format!(
                        "{}:{lineno}: key `{k}` already set on line {first}",
                        path.display()
                    )));
                }
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                raw.insert(k.to_string(), (v.clone(), Source::Flag));
            }
        }
        Ok(Params { raw, resolved: BTreeMap::new() })
    }

    fn parse_with<T>(&mut self, key: &str, default: Option<&str>, f: impl Fn(&str) -> Option<T>) -> Result<T, ConfigError> {
        let (text, src) = match self.raw.get(key) {
            Some((v, s)) => (v.clone(), s.clone()),
            None => match default {
                Some(d) => (d.to_string(), Source::Flag),
                None => return Err(ConfigError(format!("missing required key `{key}`"))),
            },
        };
        let value = f(&text).ok_or_else(|| ConfigError(format!("{}: invalid value `{text}`", src.describe(key))))?;
        self.resolved.insert(key.to_string(), text);
        Ok(value)
    }

    pub fn get<T: FromStr>(&mut self, key: &str, default: &str) -> Result<T, ConfigError> {
        self.parse_with(key, Some(default), |s| s.parse().ok())
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T, ConfigError> {
        self.parse_with(key, None, |s| s.parse().ok())
    }

    pub fn positive(&mut self, key: &str, default: &str) -> Result<usize, ConfigError> {
        let v: usize = self.get(key, default)?;
        if v == 0 {
            return Err(self.invalid(key, "must be positive"));
        }
        Ok(v)
    }

    pub fn probability(&mut self, key: &str, default: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.get(key, default)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(self.invalid(key, format!("{v} outside [0, 1]")));
        }
        Ok(v)
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&mut self, key: &str, default: &str) -> Result<Vec<T>, ConfigError> {
        self.parse_with(key, Some(default), |s| {
            s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<Vec<T>>>().filter(|v| !v.is_empty())
        })
    }

    /// One of the listed words.
    pub fn choice(&mut self, key: &str, default: &str, options: &[&str]) -> Result<String, ConfigError> {
        let value: String = self.get(key, default)?;
        if options.contains(&value.as_str()) {
            Ok(value)
        } else {
            let src = self.raw.get(key).map(|(_, s)| s.clone()).unwrap_or(Source::Flag);
            Err(ConfigError(format!("{}: `{value}` is not one of {}", src.describe(key), options.join(", "))))
        }
    }

    /// A validation failure tied to wherever `key` came from.
    pub fn invalid(&self, key: &str, why: impl fmt::Display) -> ConfigError {
        let src = self.raw.get(key).map(|(_, s)| s.clone()).unwrap_or(Source::Flag);
        ConfigError(format!("{}: {why}", src.describe(key)))
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = file("L = 32\n# comment\np = 0.2  # trailing\n");
        let mut p = Params::load(Some(f.path()), &[("L", Some("64".into())), ("p", None)]).unwrap();
        assert_eq!(p.require::<usize>("L").unwrap(), 64);
        assert_eq!(p.require::<f64>("p").unwrap(), 0.2);
        assert_eq!(p.resolved()["L"], "64");
    }

    #[test]
    fn errors_name_the_line() {
        let f = file("L = 32\nbogus = 1\n");
        let e = Params::load(Some(f.path()), &[("L", None)]).err().unwrap();
        assert!(e.0.ends_with(":2: unknown key `bogus`"), "{e}");

        let f = file("\nL = abc\n");
        let mut p = Params::load(Some(f.path()), &[("L", None)]).unwrap();
        let e = p.require::<usize>("L").unwrap_err();
        assert!(e.0.contains(":2: key `L`: invalid value `abc`"), "{e}");

        let f = file("L = 1\nL = 2\n");
        assert!(Params::load(Some(f.path()), &[("L", None)]).is_err());
    }

    #[test]
    fn lists_and_choices() {
        let mut p = Params::load(None, &[("sizes", Some("16, 32,64".into())), ("mode", Some("x".into()))]).unwrap();
        assert_eq!(p.list::<usize>("sizes", "8").unwrap(), vec![16, 32, 64]);
        assert!(p.choice("mode", "a", &["a", "b"]).is_err());
        assert_eq!(p.list::<f64>("ps", "0.1,0.2").unwrap(), vec![0.1, 0.2]);
    }
}
