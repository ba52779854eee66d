use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use sepnet_core::io::write_atomic;
use sepnet_core::suite::Check;
use sepnet_core::Result;

use crate::config::ExperimentConfig;

/// Output directory plus the checks accumulated by one command.
pub struct Run {
    out: PathBuf,
    plots: bool,
    pub checks: Vec<Check>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let out = cfg.out_dir();
        std::fs::create_dir_all(&out)?;
        Ok(Run {
            out,
            plots: !cfg.no_plots,
            checks: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn save(&mut self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.out.join(name), contents.as_bytes())?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn save_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.save(name, &text)
    }

    pub fn plot(&mut self, name: &str, title: &str, series: &[(&str, &[(f64, f64)])]) -> Result<()> {
        if self.plots {
            self.save(name, &crate::plot::line_plot(title, series))?;
        }
        Ok(())
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Writes `report.json`, prints the checks and returns the overall verdict.
    pub fn finish(mut self, command: &str, cfg: &ExperimentConfig, details: Value) -> Result<bool> {
        for c in &self.checks {
            say(&format!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        let pass = self.pass();
        let mut outputs = self.outputs.clone();
        outputs.push("report.json".into());
        let report = json!({
            "command": command,
            "config": cfg,
            "pass": pass,
            "checks": self.checks,
            "outputs": outputs,
            "details": details,
        });
        self.save_json("report.json", &report)?;
        say(&format!("{} → {}", if pass { "ok" } else { "checks failed" }, self.out.display()));
        Ok(pass)
    }
}

/// Prints a line, ignoring a closed stdout (e.g. piped into `head`).
pub fn say(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}
