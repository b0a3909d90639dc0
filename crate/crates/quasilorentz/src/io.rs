//! Text formats: survival-curve CSV, JSON documents and point dumps.
//!
//! Output is locale independent (`.` decimal separator, `\n` line endings)
//! and every file is written through a temporary sibling that is renamed into
//! place, so a failed run never leaves a truncated file behind.

use std::io::Write;
use std::path::Path;

use quasilorentz_core::SurvivalCurve;
use serde::Serialize;

use crate::{AppError, AppResult};

pub const CSV_HEADER: &str = "T,survival,count_ge";
/// Significant digits for real numbers in text output.
pub const SIG_DIGITS: usize = 15;

/// Formats `x` with 15 significant digits, trailing zeros removed.
/// Positional notation is used for exponents in `-7..=20`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if x < 0.0 { "-" } else { "" };
    let all: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = all.trim_end_matches('0');
    if !(-7..=20).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
    }
}

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> AppResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| AppError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| AppError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| AppError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| AppError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Resource(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Renders a measured curve as CSV.
pub fn survival_csv(curve: &SurvivalCurve) -> AppResult<String> {
    if curve.counts_ge.len() != curve.thresholds.len() {
        return Err(AppError::Config(format!(
            "curve '{}' carries no counts; only measured curves can be written",
            curve.field_tag
        )));
    }
    let mut out = String::with_capacity(48 * (curve.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..curve.len() {
        out.push_str(&format_sig(curve.thresholds[i]));
        out.push(',');
        out.push_str(&format_sig(curve.survival[i]));
        out.push(',');
        out.push_str(&curve.counts_ge[i].to_string());
        out.push('\n');
    }
    Ok(out)
}

/// Run-level facts a CSV does not carry.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CurveMeta {
    pub field: String,
    pub epsilon: f64,
    pub n: u64,
    pub censor_limit: f64,
}

impl CurveMeta {
    pub fn of(curve: &SurvivalCurve) -> Self {
        Self {
            field: curve.field_tag.clone(),
            epsilon: curve.epsilon,
            n: curve.n,
            censor_limit: curve.censor_limit,
        }
    }
}

/// Parses CSV text. Survival values are recomputed as `count_ge / n`; the
/// printed column must agree with them to its 15 digits.
pub fn parse_survival_csv(text: &str, meta: &CurveMeta) -> Result<SurvivalCurve, String> {
    if meta.n == 0 {
        return Err("sample count n must be at least 1".into());
    }
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => return Err(format!("expected header '{CSV_HEADER}', found '{h}'")),
        None => return Err("empty file".into()),
    }
    let mut thresholds = Vec::new();
    let mut survival = Vec::new();
    let mut counts_ge = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(format!("line {row}: expected 3 columns, found {}", cols.len()));
        }
        let t: f64 = cols[0].parse().map_err(|e| format!("line {row}: T: {e}"))?;
        let printed: f64 = cols[1].parse().map_err(|e| format!("line {row}: survival: {e}"))?;
        let count: u64 = cols[2].parse().map_err(|e| format!("line {row}: count_ge: {e}"))?;
        if count > meta.n {
            return Err(format!("line {row}: count_ge {count} exceeds n = {}", meta.n));
        }
        let exact = count as f64 / meta.n as f64;
        if (printed - exact).abs() > 1e-14 * exact {
            return Err(format!("line {row}: survival {printed} disagrees with {count}/{}", meta.n));
        }
        thresholds.push(t);
        survival.push(exact);
        counts_ge.push(count);
    }
    let curve = SurvivalCurve {
        thresholds,
        survival,
        counts_ge,
        n: meta.n,
        epsilon: meta.epsilon,
        field_tag: meta.field.clone(),
        censor_limit: meta.censor_limit,
    };
    curve.validate().map_err(|e| e.to_string())?;
    Ok(curve)
}

pub fn read_survival_csv(path: &Path, meta: &CurveMeta) -> AppResult<SurvivalCurve> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_survival_csv(&text, meta).map_err(|reason| AppError::Format {
        path: path.to_path_buf(),
        reason,
    })
}

/// One point per line.
pub fn points_text(points: &[f64]) -> String {
    let mut out = String::with_capacity(20 * points.len());
    for &p in points {
        out.push_str(&format_sig(p));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(50.0), "50");
        assert_eq!(format_sig(0.05), "0.05");
        assert_eq!(format_sig(0.1 + 0.2), "0.3");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_sig(-2.5e-3), "-0.0025");
        assert_eq!(format_sig(123456.789), "123456.789");
        assert_eq!(format_sig(1e-9), "1e-9");
        assert_eq!(format_sig(6.02214076e23), "6.02214076e23");
        assert_eq!(format_sig(0.5257311121191336), "0.525731112119134");
        assert_eq!(format_sig(9.999999999999999), "10");
    }

    #[test]
    fn sig_formatting_round_trips_to_15_digits() {
        let mut x = 1.234567890123456e-6;
        for _ in 0..200 {
            let back: f64 = format_sig(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-15 * x.abs(), "{x} -> {back}");
            x *= -1.37;
        }
    }

    fn curve() -> SurvivalCurve {
        SurvivalCurve {
            thresholds: vec![0.05, 1.0 / 3.0, 0.5, 2.0],
            survival: vec![1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0],
            counts_ge: vec![3, 2, 1, 0],
            n: 3,
            epsilon: 1e-3,
            field_tag: "periodic".into(),
            censor_limit: 50.0,
        }
    }

    #[test]
    fn csv_layout() {
        let text = survival_csv(&curve()).unwrap();
        assert_eq!(
            text,
            "T,survival,count_ge\n0.05,1,3\n0.333333333333333,0.666666666666667,2\n0.5,0.333333333333333,1\n2,0,0\n"
        );
    }

    #[test]
    fn csv_round_trip() {
        let c = curve();
        let back = parse_survival_csv(&survival_csv(&c).unwrap(), &CurveMeta::of(&c)).unwrap();
        assert_eq!(back.counts_ge, c.counts_ge);
        assert_eq!(back.survival, c.survival);
        for (a, b) in back.thresholds.iter().zip(&c.thresholds) {
            assert!((a - b).abs() <= 5e-15 * b);
        }
    }

    #[test]
    fn csv_rejects_corruption() {
        let c = curve();
        let meta = CurveMeta::of(&c);
        let good = survival_csv(&c).unwrap();
        assert!(parse_survival_csv("", &meta).is_err());
        assert!(parse_survival_csv(&good.replace("count_ge", "count"), &meta).is_err());
        assert!(parse_survival_csv(&good.replace("0.666666666666667,2", "0.7,2"), &meta).is_err());
        assert!(parse_survival_csv(&good.replace(",2\n", ",9\n"), &meta).is_err());
        assert!(parse_survival_csv(&good.replace("2,0,0", "0.01,0,0"), &meta).is_err());
    }

    #[test]
    fn synthetic_curves_are_not_written() {
        let c = SurvivalCurve::synthetic(vec![1.0, 2.0], vec![0.5, 0.25], "x").unwrap();
        assert!(survival_csv(&c).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        write_atomic(&path, b"first\n").unwrap();
        write_atomic(&path, b"second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let missing = dir.path().join("no/such/dir/b.txt");
        assert_eq!(write_atomic(&missing, b"x").unwrap_err().exit_code(), 3);
    }
}
