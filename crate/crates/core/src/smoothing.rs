//! Savitzky-Golay smoothing of root positions and joint angles.
//!
//! Each output sample is the center value of a least-squares polynomial fit
//! over a sliding window, which removes frame-stitching jitter while
//! preserving local extrema. Interior samples use precomputed convolution
//! coefficients; near the series ends the polynomial is fit over the
//! truncated one-sided window and evaluated at the boundary sample, so no
//! phantom motion is mirrored in.

use crate::error::{MotionError, Result};
use crate::sequence::PoseSequence;
use serde::{Deserialize, Serialize};

/// Window length: a fixed odd sample count, or adaptive from series length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub enum WindowSpec {
    Fixed(usize),
    /// About a tenth of the series length, forced odd, floor 5, and above
    /// the polynomial order.
    Adaptive,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WindowRepr {
    Num(usize),
    Text(String),
}

impl TryFrom<WindowRepr> for WindowSpec {
    type Error = String;
    fn try_from(r: WindowRepr) -> std::result::Result<Self, String> {
        match r {
            WindowRepr::Num(n) => Ok(WindowSpec::Fixed(n)),
            WindowRepr::Text(s) if s == "adaptive" => Ok(WindowSpec::Adaptive),
            WindowRepr::Text(s) => Err(format!("unknown window spec '{s}', expected a number or \"adaptive\"")),
        }
    }
}

impl From<WindowSpec> for WindowRepr {
    fn from(w: WindowSpec) -> Self {
        match w {
            WindowSpec::Fixed(n) => WindowRepr::Num(n),
            WindowSpec::Adaptive => WindowRepr::Text("adaptive".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgConfig {
    /// Polynomial order of the local fit.
    pub poly_order: usize,
    pub window: WindowSpec,
}

impl Default for SgConfig {
    fn default() -> Self {
        Self { poly_order: 3, window: WindowSpec::Adaptive }
    }
}

impl SgConfig {
    /// Concrete window length for a series of `len` samples.
    pub fn resolve_window(&self, len: usize) -> Result<usize> {
        if self.poly_order == 0 {
            return Err(MotionError::InvalidConfig("poly_order must be at least 1".into()));
        }
        let w = match self.window {
            WindowSpec::Fixed(w) => {
                if w.is_multiple_of(2) {
                    return Err(MotionError::InvalidConfig(format!(
                        "window length must be odd, got {w}"
                    )));
                }
                if w <= self.poly_order {
                    return Err(MotionError::InvalidConfig(format!(
                        "window length {w} must exceed poly_order {}",
                        self.poly_order
                    )));
                }
                w
            }
            WindowSpec::Adaptive => {
                let mut w = len / 10;
                if w.is_multiple_of(2) {
                    w += 1;
                }
                w = w.max(5);
                while w <= self.poly_order {
                    w += 2;
                }
                w
            }
        };
        if w > len {
            return Err(MotionError::TooFewFrames { needed: w, actual: len });
        }
        Ok(w)
    }
}

/// Solve a small dense linear system in place by Gaussian elimination with
/// partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(MotionError::InvalidConfig("singular polynomial fit system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Convolution coefficients for the center value of a degree-`p` fit over
/// offsets `-m..=m`: the first row of `(A^T A)^{-1} A^T`.
#[allow(clippy::needless_range_loop)]
fn center_coefficients(half: usize, poly_order: usize) -> Result<Vec<f64>> {
    let m = half as i64;
    let p = poly_order;
    // Gram matrix of power sums S_{k+l} = sum_j j^(k+l).
    let mut gram = vec![vec![0.0; p + 1]; p + 1];
    for k in 0..=p {
        for l in 0..=p {
            gram[k][l] = (-m..=m).map(|j| (j as f64).powi((k + l) as i32)).sum();
        }
    }
    let mut e0 = vec![0.0; p + 1];
    e0[0] = 1.0;
    let x = solve_dense(gram, e0)?;
    Ok((-m..=m)
        .map(|j| (0..=p).map(|k| x[k] * (j as f64).powi(k as i32)).sum())
        .collect())
}

/// Least-squares fit value at offset zero for samples `(offsets, values)`,
/// with the fit degree capped by the sample count.
#[allow(clippy::needless_range_loop)]
fn boundary_fit(offsets: &[f64], values: &[f64], poly_order: usize) -> Result<f64> {
    let degree = poly_order.min(values.len() - 1);
    let mut gram = vec![vec![0.0; degree + 1]; degree + 1];
    let mut rhs = vec![0.0; degree + 1];
    for (&x, &y) in offsets.iter().zip(values) {
        for k in 0..=degree {
            let xk = x.powi(k as i32);
            rhs[k] += xk * y;
            for l in 0..=degree {
                gram[k][l] += xk * x.powi(l as i32);
            }
        }
    }
    Ok(solve_dense(gram, rhs)?[0])
}

/// Savitzky-Golay filter of a scalar series.
///
/// The data is centered on the output sample before fitting, so constant
/// series pass through bit-identically.
pub fn sg_filter(series: &[f64], cfg: &SgConfig) -> Result<Vec<f64>> {
    let n = series.len();
    let w = cfg.resolve_window(n)?;
    let half = w / 2;
    let coeffs = center_coefficients(half, cfg.poly_order)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i >= half && i + half < n {
            let base = series[i];
            let acc: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| c * (series[i - half + j] - base))
                .sum();
            out.push(base + acc);
        } else {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let base = series[i];
            let offsets: Vec<f64> = (lo..=hi).map(|t| t as f64 - i as f64).collect();
            let values: Vec<f64> = (lo..=hi).map(|t| series[t] - base).collect();
            out.push(base + boundary_fit(&offsets, &values, cfg.poly_order)?);
        }
    }
    Ok(out)
}

/// Which channel groups of a sequence to filter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSelect {
    pub root_position: bool,
    pub joint_angles: bool,
}

impl Default for ChannelSelect {
    fn default() -> Self {
        Self { root_position: true, joint_angles: true }
    }
}

/// Filter the selected channels of a sequence component-wise.
///
/// Root orientation quaternions are never filtered component-wise (that
/// would break unit norm); they pass through untouched. Cached `body_pos`
/// and `joint_vel` are dropped from the output because the underlying
/// channels moved.
pub fn smooth_sequence(
    seq: &PoseSequence,
    cfg: &SgConfig,
    channels: ChannelSelect,
) -> Result<PoseSequence> {
    let n = seq.len();
    if n == 0 {
        return Err(MotionError::InvalidSequence("no frames".into()));
    }
    let dof = seq.frames[0].joint_pos.len();
    if let Some(bad) = seq.frames.iter().find(|f| f.joint_pos.len() != dof) {
        return Err(MotionError::DofMismatch { expected: dof, actual: bad.joint_pos.len() });
    }
    let mut frames = seq.frames.clone();
    for f in &mut frames {
        f.body_pos = None;
        f.joint_vel = None;
    }

    let mut apply = |extract: &dyn Fn(&crate::sequence::Frame) -> f64,
                     store: &mut dyn FnMut(&mut crate::sequence::Frame, f64)|
     -> Result<()> {
        let series: Vec<f64> = seq.frames.iter().map(extract).collect();
        let filtered = sg_filter(&series, cfg)?;
        for (f, v) in frames.iter_mut().zip(filtered) {
            store(f, v);
        }
        Ok(())
    };

    if channels.root_position {
        apply(&|f| f.root_pos.x, &mut |f, v| f.root_pos.x = v)?;
        apply(&|f| f.root_pos.y, &mut |f, v| f.root_pos.y = v)?;
        apply(&|f| f.root_pos.z, &mut |f, v| f.root_pos.z = v)?;
    }
    if channels.joint_angles {
        for j in 0..dof {
            apply(&move |f| f.joint_pos[j], &mut move |f, v| f.joint_pos[j] = v)?;
        }
    }
    Ok(PoseSequence::new(seq.fps, seq.skeleton_id.clone(), frames))
}
