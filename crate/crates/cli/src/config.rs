//! Flat `key = value` settings with command-line overrides.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    /// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value, got `{raw}`", no + 1));
            };
            let key = normalize(k);
            if key.is_empty() {
                return Err(format!("line {}: empty key", no + 1));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key `{key}`", no + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                Self::parse(&text)
            }
        }
    }

    /// Flags win over the file.
    pub fn apply<T: Display>(&mut self, key: &str, flag: &Option<T>) {
        if let Some(v) = flag {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    /// Reject keys the subcommand does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), String> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(format!("unknown setting `{k}`; expected one of: {}", allowed.join(", "))),
            None => Ok(()),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| format!("setting `{key}` = `{v}`: {e}")))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, String>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, String>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| format!("missing setting `{key}`"))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str, default: &str) -> Result<Vec<T>, String>
    where
        T::Err: Display,
    {
        let raw = self.values.get(key).map(String::as_str).unwrap_or(default);
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| format!("setting `{key}` item `{s}`: {e}")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut s = Settings::parse("p = 0.1\n# comment\neps-d=0.5 # trailing\n\n").unwrap();
        assert_eq!(s.get::<f64>("eps_d").unwrap(), Some(0.5));
        s.apply("p", &Some(0.2));
        s.apply("q", &None::<f64>);
        assert_eq!(s.require::<f64>("p").unwrap(), 0.2);
        assert!(!s.has("q"));
        assert!(s.check_keys(&["p", "eps_d"]).is_ok());
        assert!(s.check_keys(&["p"]).is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(Settings::parse("p 0.1").is_err());
        assert!(Settings::parse("p=1\np=2").is_err());
        assert!(Settings::parse("p=x").unwrap().get::<f64>("p").is_err());
    }

    #[test]
    fn lists() {
        let s = Settings::parse("eps = 0.1, 0.3").unwrap();
        assert_eq!(s.list::<f64>("eps", "").unwrap(), vec![0.1, 0.3]);
        assert_eq!(s.list::<u32>("other", "1,2").unwrap(), vec![1, 2]);
    }
}
