//! The `key = value` configuration file.
//!
//! ```text
//! kb = merge.kif
//! query = queries/tqg27.kif
//! out = build
//! timeout = 60
//! jobs = 4
//!
//! [prover.eprover]
//! command = eprover
//! args = --auto --cpu-limit={timeout} {file}
//! ```
//!
//! `kb`, `query`, `problem` and `skip` may repeat. Relative paths are taken from the
//! directory holding the file.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

pub const DEFAULT_TIMEOUT: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ProverDef {
    pub name: String,
    pub command: String,
    /// Whitespace-separated words with `{file}` and `{timeout}` holes.
    pub args: Vec<String>,
}

impl ProverDef {
    /// `name=command arg…` as given on the command line.
    pub fn parse_inline(spec: &str) -> Result<ProverDef> {
        let (name, rest) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("prover spec {spec:?} is not name=command args"))?;
        let mut words = rest.split_whitespace().map(String::from);
        let command = words.next().ok_or_else(|| anyhow!("prover {name} has no command"))?;
        Ok(ProverDef {
            name: name.trim().to_string(),
            command,
            args: words.collect(),
        })
    }

    pub fn argv(&self, file: &Path, timeout: f64) -> Vec<String> {
        let secs = format!("{}", timeout.ceil() as u64);
        self.args
            .iter()
            .map(|a| a.replace("{file}", &file.to_string_lossy()).replace("{timeout}", &secs))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub kb: Vec<PathBuf>,
    pub queries: Vec<PathBuf>,
    pub problems: Vec<PathBuf>,
    pub out: PathBuf,
    pub skip_heads: Vec<String>,
    pub selection: Option<PathBuf>,
    pub provers: Vec<ProverDef>,
    pub timeout: f64,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            kb: Vec::new(),
            queries: Vec::new(),
            problems: Vec::new(),
            out: PathBuf::from("out"),
            skip_heads: Vec::new(),
            selection: None,
            provers: Vec::new(),
            timeout: DEFAULT_TIMEOUT,
            jobs: 1,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Config::parse(&text, base).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Config> {
        let mut cfg = Config::default();
        let mut section: Option<usize> = None;
        let resolve = |v: &str| base.join(v);
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = || format!("line {}", k + 1);
            if let Some(head) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = head
                    .trim()
                    .strip_prefix("prover.")
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| anyhow!("{}: unknown section [{head}]", at()))?;
                if cfg.provers.iter().any(|p| p.name == name) {
                    bail!("{}: prover {name} defined twice", at());
                }
                cfg.provers.push(ProverDef {
                    name: name.to_string(),
                    command: String::new(),
                    args: Vec::new(),
                });
                section = Some(cfg.provers.len() - 1);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| anyhow!("{}: expected key = value", at()))?;
            if let Some(i) = section {
                let p = &mut cfg.provers[i];
                match key {
                    "command" => p.command = value.to_string(),
                    "args" => p.args = value.split_whitespace().map(String::from).collect(),
                    _ => bail!("{}: unknown prover key {key}", at()),
                }
                continue;
            }
            match key {
                "kb" => cfg.kb.push(resolve(value)),
                "query" => cfg.queries.push(resolve(value)),
                "problem" => cfg.problems.push(resolve(value)),
                "out" => cfg.out = resolve(value),
                "skip" => cfg.skip_heads.push(value.to_string()),
                "selection" => cfg.selection = Some(resolve(value)),
                "timeout" => cfg.timeout = value.parse().with_context(at)?,
                "jobs" => cfg.jobs = value.parse().with_context(at)?,
                _ => bail!("{}: unknown key {key}", at()),
            }
        }
        if let Some(p) = cfg.provers.iter().find(|p| p.command.is_empty()) {
            bail!("prover {} has no command", p.name);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            bail!("timeout must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_repeats() {
        let text = "# c\nkb = a.kif\nkb = b.kif\nquery = q.kif\ntimeout = 1.5\njobs = 3\nskip = holdsDuring\n\n[prover.z]\ncommand = zipper\nargs = -t {timeout} {file}\n[prover.e]\ncommand = /bin/e\n";
        let c = Config::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(c.kb, vec![PathBuf::from("/cfg/a.kif"), PathBuf::from("/cfg/b.kif")]);
        assert_eq!(c.timeout, 1.5);
        assert_eq!(c.jobs, 3);
        assert_eq!(c.provers.len(), 2);
        assert_eq!(c.provers[0].argv(Path::new("p.p"), 1.5), vec!["-t", "2", "p.p"]);
        assert_eq!(c.provers[1].name, "e");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("jobs = 0", Path::new("")).is_err());
        assert!(Config::parse("timeout = -1", Path::new("")).is_err());
        assert!(Config::parse("colour = red", Path::new("")).is_err());
        assert!(Config::parse("[prover.x]\nargs = {file}", Path::new("")).is_err());
        assert!(Config::parse("[other]", Path::new("")).is_err());
        assert!(Config::parse("just words", Path::new("")).is_err());
    }

    #[test]
    fn inline_provers() {
        let p = ProverDef::parse_inline("stub=sh stub.sh {file}").unwrap();
        assert_eq!((p.name.as_str(), p.command.as_str()), ("stub", "sh"));
        assert_eq!(p.args, vec!["stub.sh", "{file}"]);
        assert!(ProverDef::parse_inline("nothing").is_err());
    }
}
