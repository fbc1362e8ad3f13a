//! `key = value` parameter files.
//!
//! Two mutually exclusive styles are accepted:
//!
//! ```text
//! # physical constants                # or frequencies directly
//! gamma_i = 2.675e8                   omega0 = 1000
//! gamma_s = 6.728e7                   delta  = 100
//! h0      = 1.5                       j      = 100
//! j       = 100
//! ```
//!
//! All values are rad·s⁻¹ (or rad·s⁻¹·T⁻¹, T). Every frequency-like key
//! also has a `*_hz` variant that is multiplied by 2π on load.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spin_system::SpinSystemParams;

const PHYSICAL_KEYS: [&str; 3] = ["gamma_i", "gamma_s", "h0"];
const FREQUENCY_KEYS: [&str; 2] = ["omega0", "delta"];
const HZ_CAPABLE: [&str; 5] = ["gamma_i", "gamma_s", "omega0", "delta", "j"];

struct Entry {
    value: f64,
    line: usize,
}

pub fn load_params(path: &Path) -> Result<SpinSystemParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: 0,
        key: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_params(&text)
}

pub fn parse_params(text: &str) -> Result<SpinSystemParams> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            key: None,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();

        let (canonical, scale) = canonical_key(key).ok_or_else(|| Error::Config {
            line,
            key: Some(key.to_string()),
            message: format!("unknown key `{key}`"),
        })?;
        let parsed: f64 = value.parse().map_err(|_| Error::Config {
            line,
            key: Some(key.to_string()),
            message: format!("`{key}` has non-numeric value `{value}`"),
        })?;
        if !parsed.is_finite() {
            return Err(Error::Config {
                line,
                key: Some(key.to_string()),
                message: format!("`{key}` must be finite"),
            });
        }
        if let Some(previous) = entries.get(canonical) {
            return Err(Error::Config {
                line,
                key: Some(key.to_string()),
                message: format!("`{canonical}` already set on line {}", previous.line),
            });
        }
        entries.insert(
            canonical,
            Entry {
                value: parsed * scale,
                line,
            },
        );
    }

    let physical = PHYSICAL_KEYS.iter().find(|k| entries.contains_key(*k));
    let direct = FREQUENCY_KEYS.iter().find(|k| entries.contains_key(*k));
    if let (Some(p), Some(d)) = (physical, direct) {
        let line = entries[*p].line.max(entries[*d].line);
        return Err(Error::Config {
            line,
            key: Some(d.to_string()),
            message: format!("`{p}` and `{d}` belong to different config styles; use one"),
        });
    }

    let require = |key: &'static str| -> Result<f64> {
        entries.get(key).map(|e| e.value).ok_or_else(|| Error::Config {
            line: 0,
            key: Some(key.to_string()),
            message: format!("missing required key `{key}`"),
        })
    };

    let params = if physical.is_some() {
        SpinSystemParams::from_physical(
            require("gamma_i")?,
            require("gamma_s")?,
            require("h0")?,
            require("j")?,
        )
    } else {
        SpinSystemParams::from_frequencies(require("omega0")?, require("delta")?, require("j")?)
    };
    params.map_err(|e| Error::Config {
        line: 0,
        key: None,
        message: e.to_string(),
    })
}

fn canonical_key(key: &str) -> Option<(&'static str, f64)> {
    let all = PHYSICAL_KEYS.iter().chain(FREQUENCY_KEYS.iter()).chain(["j"].iter());
    for &name in all {
        if key == name {
            return Some((name, 1.0));
        }
        if HZ_CAPABLE.contains(&name) && key.strip_suffix("_hz") == Some(name) {
            return Some((name, TAU));
        }
    }
    None
}

/// Renders parameters back to the direct-frequency style.
pub fn format_params(params: &SpinSystemParams) -> String {
    use crate::numfmt::fmt_sig17;
    format!(
        "omega0 = {}\ndelta = {}\nj = {}\n",
        fmt_sig17(params.omega0()),
        fmt_sig17(params.delta()),
        fmt_sig17(params.j())
    )
}
