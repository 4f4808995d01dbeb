//! Plain-text `key = value` configuration. Blank lines and lines starting
//! with `#` are ignored. Recognised keys: `format`, `seed`, `q_max`, `p_max`,
//! `conductor_max`.

use std::path::Path;

use crate::error::CliError;
use crate::output::Format;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub format: Format,
    pub seed: u64,
    pub q_max: u64,
    pub p_max: u64,
    pub conductor_max: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { format: Format::Md, seed: 0, q_max: 13, p_max: 5, conductor_max: 3 }
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| CliError::usage(format!("config line {}: {why}", n + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let value = value.trim();
            match key.trim() {
                "format" => s.format = value.parse().map_err(|e: String| bad(&e))?,
                "seed" => s.seed = value.parse().map_err(|_| bad("seed must be an integer"))?,
                "q_max" => s.q_max = value.parse().map_err(|_| bad("q_max must be an integer"))?,
                "p_max" => s.p_max = value.parse().map_err(|_| bad("p_max must be an integer"))?,
                "conductor_max" => s.conductor_max = value.parse().map_err(|_| bad("conductor_max must be an integer"))?,
                other => return Err(bad(&format!("unknown key '{other}'"))),
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.q_max < 2 || self.p_max < 2 || self.conductor_max == 0 {
            return Err(CliError::usage("grid bounds must be positive (q_max, p_max >= 2)"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let s = Settings::parse("# grid\nformat = csv\nseed=9\n\nq_max = 29\nconductor_max = 2\n").unwrap();
        assert_eq!(s, Settings { format: Format::Csv, seed: 9, q_max: 29, p_max: 5, conductor_max: 2 });
    }

    #[test]
    fn rejects_unknown_keys_and_zero_bounds() {
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("q_max = 1").is_err());
        assert!(Settings::parse("seed").is_err());
    }
}
