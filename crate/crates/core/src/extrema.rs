//! Discrete local extrema with plateau merging.
//!
//! A plateau is a maximal run of consecutive samples in which each adjacent
//! pair differs by at most the tolerance. A run that does not touch either
//! end of the series is a maximum when both outside neighbors are lower than
//! the adjacent run edges, and a minimum when both are higher; it collapses
//! to its midpoint frame (floor of the index average). Endpoints are never
//! extrema. Singleton runs reduce to the usual strict three-point test.

use crate::error::{MotionError, Result};

#[derive(Debug, Clone, Default)]
pub struct Extrema {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
}

pub fn scan_extrema(values: &[f64], plateau_tolerance: f64) -> Result<Extrema> {
    let n = values.len();
    if n < 3 {
        return Err(MotionError::TooFewFrames { needed: 3, actual: n });
    }
    let mut out = Extrema::default();
    let mut start = 0usize;
    while start < n {
        let mut end = start;
        while end + 1 < n && (values[end + 1] - values[end]).abs() <= plateau_tolerance {
            end += 1;
        }
        if start > 0 && end < n - 1 {
            let left = values[start - 1];
            let right = values[end + 1];
            let mid = (start + end) / 2;
            if left < values[start] && right < values[end] {
                out.maxima.push(mid);
            } else if left > values[start] && right > values[end] {
                out.minima.push(mid);
            }
        }
        start = end + 1;
    }
    Ok(out)
}
