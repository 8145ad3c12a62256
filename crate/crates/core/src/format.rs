//! Locale-independent number formatting and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serializer;

use crate::error::{Error, Result};

/// Significant digits in every emitted number.
pub const SIG_DIGITS: usize = 12;

/// Scientific notation, 12 significant digits, lowercase `e`: `-7.85365542235e0`.
pub fn sci(v: f64) -> String {
    format!("{:.*e}", SIG_DIGITS - 1, v)
}

/// 12 significant digits, positional when the exponent is in [−4, 12),
/// scientific otherwise (the `%.12g` convention without trailing zeros).
pub fn sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = sci(v).rsplit_once('e').and_then(|(_, e)| e.parse::<i32>().ok()).unwrap_or(0);
    if !(-4..SIG_DIGITS as i32).contains(&exp) {
        let s = sci(v);
        let (mantissa, e) = s.split_once('e').expect("scientific format has an exponent");
        return format!("{}e{e}", trim_fraction(mantissa));
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_fraction(&format!("{v:.decimals$}"))
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `v` rounded to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        sci(v).parse().unwrap_or(v)
    } else {
        v
    }
}

pub(crate) fn serialize_sig<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v))
}

pub(crate) fn serialize_sig_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| round_sig(*x)))
}

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place, so `path` is either absent, untouched, or complete.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
