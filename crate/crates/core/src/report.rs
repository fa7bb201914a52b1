//! JSON report envelope and CSV writers.
//!
//! Every report carries the tool version, the fully resolved run
//! configuration, the RNG seed and the wall-clock runtime. Apart from
//! `runtime_ms`, identical configurations produce byte-identical reports.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const TOOL: &str = "monomix";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Keys that vary between otherwise identical runs.
pub const TIMING_KEYS: &[&str] = &["runtime_ms"];

#[derive(Clone, Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub seed: Option<u64>,
    pub pass: bool,
    pub result: R,
    pub runtime_ms: u64,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(
        command: &'static str,
        config: C,
        seed: Option<u64>,
        pass: bool,
        result: R,
        runtime_ms: u64,
    ) -> Self {
        Report {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            seed,
            pass,
            result,
            runtime_ms,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        s.push('\n');
        Ok(s)
    }
}

/// Parses a report and drops the timing fields, for run-to-run comparison.
pub fn without_timing(json: &str) -> Result<Value> {
    let mut v: Value = serde_json::from_str(json).map_err(std::io::Error::other)?;
    if let Value::Object(map) = &mut v {
        for key in TIMING_KEYS {
            map.remove(*key);
        }
    }
    Ok(v)
}

/// `t,d` rows of a total-variation curve starting at `t = 0`.
pub fn write_tv_csv<W: Write>(curve: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "t,d")?;
    for (t, d) in curve.iter().enumerate() {
        writeln!(out, "{t},{d:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_is_the_only_difference() {
        let a = Report::new("x", "cfg", Some(7), true, vec![1, 2], 10)
            .to_json()
            .unwrap();
        let b = Report::new("x", "cfg", Some(7), true, vec![1, 2], 99)
            .to_json()
            .unwrap();
        assert_ne!(a, b);
        assert_eq!(without_timing(&a).unwrap(), without_timing(&b).unwrap());
        assert!(a.find("\"tool\"").unwrap() < a.find("\"result\"").unwrap());
    }

    #[test]
    fn tv_csv() {
        let mut buf = Vec::new();
        write_tv_csv(&[0.75, 0.25], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,d\n0,7.5e-1\n1,2.5e-1\n");
    }
}
