//! Writing result files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use systole_core::Surface;

use crate::error::{Failure, Outcome};

/// Formats `x` with `digits` significant digits, without exponent for
/// moderate magnitudes and with trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..=6).contains(&exp) {
        let s = format!("{:.*e}", digits.saturating_sub(1), x);
        let (mant, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mant));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Output directory, created on first write.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn ensure(&self) -> Outcome<()> {
        fs::create_dir_all(&self.root)
            .with_context(|| format!("cannot create {}", self.root.display()))
            .map_err(Failure::Input)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Outcome<PathBuf> {
        self.ensure()?;
        let p = self.path(name);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))
                .map_err(Failure::Input)?;
        }
        fs::write(&p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::Input)?;
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Outcome<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("results serialize");
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Outcome<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).expect("rows serialize");
        }
        let bytes = w.into_inner().expect("in-memory writer");
        self.write_text(name, &String::from_utf8(bytes).expect("utf-8 csv"))
    }

    /// OFF mesh of the planar chart together with its metric edge lengths.
    pub fn write_mesh(&self, stem: &str, s: &Surface) -> Outcome<()> {
        self.write_text(&format!("{stem}.off"), &s.to_off())?;
        self.write_text(&format!("{stem}.edges"), &s.edge_length_table())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(5.783185962946784, 6), "5.78319");
        assert_eq!(sig(0.25, 6), "0.25");
        assert_eq!(sig(203.1234567, 6), "203.123");
        assert_eq!(sig(-0.000123456789, 6), "-0.000123457");
        assert_eq!(sig(1.5e-7, 6), "1.5e-7");
        assert_eq!(sig(12345678.0, 6), "1.23457e7");
        assert_eq!(sig(100.0, 6), "100");
        assert_eq!(sig(0.0, 6), "0");
    }
}
