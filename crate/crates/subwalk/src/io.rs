//! Command-line plumbing: phi literals, flat key=value config files, CSV
//! writers with matching readers, content digests, and the run manifest.
//!
//! Reproducibility conventions, fixed for diff-stable outputs:
//! - CSV uses `.` as the decimal separator, LF line endings, UTF-8, and a
//!   header row; floats print in Rust's shortest round-trip form, so reading
//!   a file back regenerates bitwise-identical values.
//! - JSON is pretty-printed with stable field order (plain structs and
//!   vectors only, never maps), so identical inputs yield identical bytes.

use crate::bernstein::{PhiKind, PhiSpec};
use crate::error::{Error, Result};
use crate::lattice::LatticeKernel;
use crate::subordination::SubordinationWeights;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

// ---------------------------------------------------------------------------
// Phi literals
// ---------------------------------------------------------------------------

/// Parse a shell-friendly phi literal: `kind:param[,param...]`.
///
/// Grammar, mirroring the labels the tool prints:
/// - `stable:0.5`
/// - `mix:0.3,0.7`
/// - `stable-log:0.3,0.2`
/// - `log-cosh:0.6`
/// - `table:0.25=0.125,1=1,4=8` (log-log interpolation nodes `lambda=value`)
pub fn parse_phi(literal: &str) -> Result<PhiSpec> {
    let (kind, params) = literal
        .split_once(':')
        .ok_or_else(|| Error::Config(format!(
            "phi literal '{literal}' must look like kind:params, e.g. stable:0.5"
        )))?;
    let nums = |expect: usize| -> Result<Vec<f64>> {
        let vals: Vec<f64> = params
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("bad number '{s}' in phi literal '{literal}'"))
                })
            })
            .collect::<Result<_>>()?;
        if vals.len() != expect {
            return Err(Error::Config(format!(
                "phi kind '{kind}' takes {expect} parameter(s); got {}",
                vals.len()
            )));
        }
        Ok(vals)
    };
    let kind = match kind {
        "stable" => PhiKind::Stable { alpha: nums(1)?[0] },
        "mix" => {
            let v = nums(2)?;
            PhiKind::StableMixture { alpha: v[0], beta: v[1] }
        }
        "stable-log" => {
            let v = nums(2)?;
            PhiKind::StableLog { alpha: v[0], beta: v[1] }
        }
        "log-cosh" => PhiKind::LogCosh { alpha: nums(1)?[0] },
        "table" => {
            let mut points = Vec::new();
            for pair in params.split(',') {
                let (x, y) = pair.split_once('=').ok_or_else(|| {
                    Error::Config(format!(
                        "table entry '{pair}' must look like lambda=value"
                    ))
                })?;
                let parse = |s: &str| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::Config(format!("bad number '{s}' in table literal"))
                    })
                };
                points.push((parse(x)?, parse(y)?));
            }
            PhiKind::UserTable { points }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown phi kind '{other}'; expected stable, mix, stable-log, \
                 log-cosh, or table"
            )))
        }
    };
    PhiSpec::new(kind)
}

// ---------------------------------------------------------------------------
// Flat config files
// ---------------------------------------------------------------------------

/// A flat `key = value` config file: one pair per line, `#` comments, keys
/// mirroring the command-line flags.  Duplicate keys are refused so a config
/// never silently contradicts itself.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: Vec<(String, String)>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "config line {}: expected key = value, got '{line}'",
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(Error::Config(format!(
                    "config line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
            entries.push((key, value));
        }
        Ok(FlatConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("config key '{key}': bad number '{v}'")))
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Config(format!("config key '{key}': bad integer '{v}'")))
            })
            .transpose()
    }

    /// Refuse keys outside the documented set, so typos surface instead of
    /// silently falling back to defaults.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Config(format!(
                    "unknown config key '{k}'; known keys: {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

// ---------------------------------------------------------------------------
// Digests and the run manifest
// ---------------------------------------------------------------------------

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// One written output file and its content digest.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Echoed configuration entry (flag or config-file key, with the value the
/// run actually used, defaults included).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub key: String,
    pub value: String,
}

/// Record of one CLI invocation: what ran, with which inputs, producing
/// which bytes.  Every output file a subcommand writes gets an entry here.
/// The manifest carries the wall time, so it is the one artifact exempt
/// from byte-identical reruns; the outputs it points to are not.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Vec<ConfigEcho>,
    pub seed: Option<u64>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            tool: "subwalk".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: Vec::new(),
            seed: None,
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn echo(&mut self, key: &str, value: impl std::fmt::Display) {
        self.config.push(ConfigEcho {
            key: key.into(),
            value: value.to_string(),
        });
    }

    /// Write `bytes` to `path` and record its digest.
    pub fn write_output(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, bytes)?;
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Serialize the manifest itself next to the outputs.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let text = to_json_pretty(self)?;
        std::fs::write(path, text.as_bytes())?;
        Ok(())
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Validation(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// CSV writers and readers
// ---------------------------------------------------------------------------

fn parse_csv_line<const N: usize>(line: &str, lineno: usize) -> Result<[&str; N]> {
    let mut fields = line.split(',');
    let mut out = [""; N];
    for slot in out.iter_mut() {
        *slot = fields.next().ok_or_else(|| {
            Error::Config(format!("csv line {lineno}: expected {N} fields"))
        })?;
    }
    if fields.next().is_some() {
        return Err(Error::Config(format!(
            "csv line {lineno}: expected {N} fields"
        )));
    }
    Ok(out)
}

fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("csv line {lineno}: bad number '{s}'")))
}

fn parse_i64(s: &str, lineno: usize) -> Result<i64> {
    s.trim()
        .parse::<i64>()
        .map_err(|_| Error::Config(format!("csv line {lineno}: bad integer '{s}'")))
}

/// Weight table: `m,a_m` rows for m = 1..=M.
pub fn weights_to_csv(w: &SubordinationWeights) -> String {
    let mut out = String::from("m,a_m\n");
    for (i, &a) in w.weights.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, a);
    }
    out
}

/// Read a weight CSV back into the bare weight vector.
pub fn weights_from_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "m,a_m")) => {}
        _ => return Err(Error::Config("weights csv must start with 'm,a_m'".into())),
    }
    let mut weights = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let [m, a] = parse_csv_line::<2>(line, lineno)?;
        let m = parse_i64(m, lineno)?;
        if m != weights.len() as i64 + 1 {
            return Err(Error::Config(format!(
                "csv line {lineno}: expected m = {}, got {m}",
                weights.len() + 1
            )));
        }
        weights.push(parse_f64(a, lineno)?);
    }
    Ok(weights)
}

/// Kernel window: one row per point of `[-R, R]^d` in row-major order,
/// coordinates then mass.
pub fn kernel_to_csv(kernel: &LatticeKernel) -> String {
    let mut out = String::new();
    for i in 1..=kernel.d {
        let _ = write!(out, "x{i},");
    }
    out.push_str("p\n");
    for (x, p) in kernel.window_points() {
        for c in &x {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{p}");
    }
    out
}

/// Read a kernel CSV back: dimension (from the header) and the point rows.
pub fn kernel_from_csv(text: &str) -> Result<(usize, Vec<(Vec<i64>, f64)>)> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l)
        .ok_or_else(|| Error::Config("empty kernel csv".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let d = cols.len() - 1;
    let expected: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let header_ok = d >= 1
        && cols[d] == "p"
        && cols[..d].iter().zip(&expected).all(|(a, b)| a == b);
    if !header_ok {
        return Err(Error::Config(format!(
            "kernel csv header '{header}' must look like x1,...,p"
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::Config(format!(
                "csv line {lineno}: expected {} fields",
                d + 1
            )));
        }
        let mut x = Vec::with_capacity(d);
        for f in &fields[..d] {
            x.push(parse_i64(f, lineno)?);
        }
        rows.push((x, parse_f64(fields[d], lineno)?));
    }
    Ok((d, rows))
}

/// Envelope sweep: `n,norm,envelope` rows.
pub fn envelope_to_csv(rows: &[(u64, f64, f64)]) -> String {
    let mut out = String::from("n,norm,envelope\n");
    for (n, norm, env) in rows {
        let _ = writeln!(out, "{n},{norm},{env}");
    }
    out
}

pub fn envelope_from_csv(text: &str) -> Result<Vec<(u64, f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "n,norm,envelope")) => {}
        _ => {
            return Err(Error::Config(
                "envelope csv must start with 'n,norm,envelope'".into(),
            ))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let [n, norm, env] = parse_csv_line::<3>(line, lineno)?;
        let n = parse_i64(n, lineno)?;
        if n < 1 {
            return Err(Error::Config(format!("csv line {lineno}: n must be >= 1")));
        }
        rows.push((n as u64, parse_f64(norm, lineno)?, parse_f64(env, lineno)?));
    }
    Ok(rows)
}

/// Discrete path: `step,x1[,x2,x3]` rows, one per position.
pub fn path_to_csv(path: &[Vec<i64>]) -> String {
    let d = path.first().map_or(0, Vec::len);
    let mut out = String::from("step");
    for i in 1..=d {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (k, x) in path.iter().enumerate() {
        let _ = write!(out, "{k}");
        for c in x {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

/// Continuous-time path: `event,time,x1[,x2,x3]` rows.
pub fn ctrw_to_csv(times: &[f64], positions: &[Vec<i64>]) -> String {
    let d = positions.first().map_or(0, Vec::len);
    let mut out = String::from("event,time");
    for i in 1..=d {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (k, (t, x)) in times.iter().zip(positions).enumerate() {
        let _ = write!(out, "{k},{t}");
        for c in x {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}
