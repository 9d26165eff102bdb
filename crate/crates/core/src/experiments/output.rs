//! CSV rendering of sweep results.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::SweepResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "grid_value,scheme,mean_rate_bps_hz,stderr,trials";

/// Twelve significant digits in scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

impl SweepResult {
    /// One row per grid point and scheme, grid-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (g, row) in self.stats.iter().enumerate() {
            for (s, st) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_value(self.grid[g]),
                    self.schemes[s],
                    format_value(st.mean),
                    format_value(st.stderr),
                    st.trials
                );
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
        f.write_all(self.to_csv().as_bytes())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Scheme, Summary};

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(1.0), "1.00000000000e0");
        assert_eq!(format_value(-0.000123456789012345), "-1.23456789012e-4");
        let back: f64 = format_value(std::f64::consts::PI).parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn rows_follow_grid_then_scheme() {
        let s = Summary { mean: 2.0, stderr: 0.5, trials: 3 };
        let r = SweepResult {
            grid: vec![1.0, 2.0],
            schemes: vec![Scheme::Robust, Scheme::Capacity],
            stats: vec![vec![s, s], vec![s, s]],
        };
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1.00000000000e0,robust,2.00000000000e0,5.00000000000e-1,3"));
        assert!(lines[2].contains(",capacity,"));
    }
}
