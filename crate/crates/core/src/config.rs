//! Flat `key = value` configuration for the atomic constants.
//!
//! ```text
//! # comments and blank lines are ignored
//! lamb_shift_au     = 1.61e-7
//! fine_structure_au = 1.66e-6
//! gamma_2s_au       = 1.99e-16
//! gamma_2p_au       = 1.51e-8
//! au_to_mhz         = 6579683920.502
//! gap_convention    = nominal
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hydrogen::{AtomicConstants, GapConvention};

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "QEDWALL_CONFIG";

pub const KEYS: [&str; 6] = [
    "lamb_shift_au",
    "fine_structure_au",
    "gamma_2s_au",
    "gamma_2p_au",
    "au_to_mhz",
    "gap_convention",
];

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}` as a number")))
}

/// Set one key on `constants`.
pub fn apply(constants: &mut AtomicConstants, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    match key.trim() {
        "lamb_shift_au" => constants.lamb_shift = parse_number(key, value)?,
        "fine_structure_au" => constants.fine_structure = parse_number(key, value)?,
        "gamma_2s_au" => constants.gamma_2s = parse_number(key, value)?,
        "gamma_2p_au" => constants.gamma_2p = parse_number(key, value)?,
        "au_to_mhz" => constants.au_to_mhz = parse_number(key, value)?,
        "gap_convention" => constants.convention = value.parse::<GapConvention>()?,
        other => return Err(Error::Config(format!("unknown key `{other}`"))),
    }
    Ok(())
}

/// Parse config text on top of `base`. Later lines win.
pub fn parse(text: &str, base: AtomicConstants) -> Result<AtomicConstants> {
    let mut c = base;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
        apply(&mut c, key, value).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("line {}: {msg}", i + 1)),
            other => other,
        })?;
    }
    c.validate()?;
    Ok(c)
}

/// Read and parse a config file over the defaults.
pub fn load(path: &Path) -> Result<AtomicConstants> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, AtomicConstants::default())
}

/// Constants from an explicit path, else from `QEDWALL_CONFIG`, else defaults.
pub fn resolve(path: Option<&Path>) -> Result<AtomicConstants> {
    if let Some(p) = path {
        return load(p);
    }
    match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => load(Path::new(&p)),
        _ => Ok(AtomicConstants::default()),
    }
}

/// `key = value` lines that reproduce `c` when parsed back.
pub fn render(c: &AtomicConstants) -> Vec<String> {
    let conv = match c.convention {
        GapConvention::Nominal => "nominal",
        GapConvention::Physical => "physical",
    };
    vec![
        format!("lamb_shift_au = {:e}", c.lamb_shift),
        format!("fine_structure_au = {:e}", c.fine_structure),
        format!("gamma_2s_au = {:e}", c.gamma_2s),
        format!("gamma_2p_au = {:e}", c.gamma_2p),
        format!("au_to_mhz = {}", c.au_to_mhz),
        format!("gap_convention = {conv}"),
    ]
}
