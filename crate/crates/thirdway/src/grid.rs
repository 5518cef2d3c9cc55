//! Grid syntax: `start:stop:step` (inclusive) or a comma-separated list.

use crate::error::{Error, Result};

/// Number of steps in the default grid over the observed range.
pub const DEFAULT_GRID_STEPS: usize = 20;

/// Parses `start:stop:step` or `v1,v2,...`. Stepped grids include `stop`
/// when it is reached to within a millionth of a step.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::usage(format!("grid `{s}` is not start:stop:step or a comma-separated list"));
    let number = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if !(step > 0.0) || stop < start {
            return Err(Error::usage(format!("grid `{s}` needs step > 0 and stop >= start")));
        }
        let count = ((stop - start) / step + 1e-6).floor() as usize + 1;
        Ok((0..count).map(|i| tidy(start + step * i as f64)).collect())
    } else {
        s.split(',').map(number).collect()
    }
}

/// `steps + 1` evenly spaced points from `min` to `max`.
pub fn range_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if min == max {
        return vec![min];
    }
    (0..=steps).map(|i| tidy(min + (max - min) * i as f64 / steps as f64)).collect()
}

/// Rounds to 12 significant digits so `1 + 3 × 0.1` reads as the typed `1.3`.
fn tidy(v: f64) -> f64 {
    format!("{v:.11e}").parse().unwrap()
}
