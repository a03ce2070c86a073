//! Savitzky-Golay filtering checked against a per-window least-squares
//! oracle.

mod common;

use common::{point_sequence, single_body_skeleton};
use motion_forge_core::correction::{correct_root_height, CorrectionConfig};
use motion_forge_core::sequence::{Frame, PoseSequence};
use motion_forge_core::math::{Quat, Vec3};
use motion_forge_core::smoothing::{sg_filter, smooth_sequence, ChannelSelect, SgConfig, WindowSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Oracle: explicit normal-equations polynomial fit over one symmetric
/// window, evaluated at the center. Solves by unpivoted elimination on the
/// raw (uncentered) samples.
fn oracle_window_fit(window: &[f64], poly_order: usize) -> f64 {
    let m = window.len() / 2;
    let p = poly_order;
    let mut a = vec![vec![0.0; p + 1]; p + 1];
    let mut b = vec![0.0; p + 1];
    for (idx, &y) in window.iter().enumerate() {
        let x = idx as f64 - m as f64;
        for r in 0..=p {
            b[r] += x.powi(r as i32) * y;
            for c in 0..=p {
                a[r][c] += x.powi((r + c) as i32);
            }
        }
    }
    // Forward elimination without pivoting (the Vandermonde gram matrix of a
    // symmetric window is well conditioned at these sizes).
    for col in 0..=p {
        for row in col + 1..=p {
            let f = a[row][col] / a[col][col];
            for k in col..=p {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; p + 1];
    for row in (0..=p).rev() {
        let mut s = b[row];
        for k in row + 1..=p {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x[0]
}

#[test]
fn noisy_sine_interior_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let series: Vec<f64> = (0..120)
        .map(|i| (i as f64 * 0.17).sin() + rng.random_range(-0.05..0.05))
        .collect();
    let cfg = SgConfig { poly_order: 3, window: WindowSpec::Fixed(11) };
    let out = sg_filter(&series, &cfg).unwrap();
    for i in 5..115 {
        let expect = oracle_window_fit(&series[i - 5..=i + 5], 3);
        assert!((out[i] - expect).abs() < 1e-9, "sample {i}: {} vs {expect}", out[i]);
    }
}

#[test]
fn polynomial_exactness_across_windows() {
    let poly = |x: f64| 1.25 - 0.8 * x + 0.31 * x * x - 0.07 * x * x * x;
    let series: Vec<f64> = (0..160).map(|i| poly(i as f64 * 0.05)).collect();
    for w in [5usize, 11, 21] {
        let cfg = SgConfig { poly_order: 3, window: WindowSpec::Fixed(w) };
        let out = sg_filter(&series, &cfg).unwrap();
        let half = w / 2;
        for i in half..160 - half {
            assert!((out[i] - series[i]).abs() < 1e-9, "window {w} sample {i}");
        }
    }
}

#[test]
fn linearity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (a, b) = (2.5, -1.25);
    let combined: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| a * xi + b * yi).collect();
    let cfg = SgConfig { poly_order: 3, window: WindowSpec::Fixed(9) };
    let fx = sg_filter(&x, &cfg).unwrap();
    let fy = sg_filter(&y, &cfg).unwrap();
    let fc = sg_filter(&combined, &cfg).unwrap();
    for i in 0..80 {
        assert!((fc[i] - (a * fx[i] + b * fy[i])).abs() < 1e-9, "sample {i}");
    }
}

#[test]
fn shift_invariance_on_interior() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let series: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..1.0)).collect();
    let shifted: Vec<f64> = series[7..].to_vec();
    let cfg = SgConfig { poly_order: 3, window: WindowSpec::Fixed(11) };
    let a = sg_filter(&series, &cfg).unwrap();
    let b = sg_filter(&shifted, &cfg).unwrap();
    // Compare away from both series' boundaries.
    for i in 5..88 - 5 {
        assert!((b[i] - a[i + 7]).abs() < 1e-12, "sample {i}");
    }
}

#[test]
fn spike_attenuated() {
    let mut joints = vec![0.2; 60];
    joints[30] = 1.2; // 1.0 above baseline
    let frames: Vec<Frame> = joints
        .iter()
        .map(|&j| Frame::new(Vec3::new(0.0, 0.0, 0.9), Quat::IDENTITY, vec![j]))
        .collect();
    let seq = PoseSequence::new(50.0, "s", frames);
    let cfg = SgConfig { poly_order: 3, window: WindowSpec::Fixed(11) };
    let out = smooth_sequence(&seq, &cfg, ChannelSelect::default()).unwrap();
    let spike_out = out.frames[30].joint_pos[0] - 0.2;
    assert!(spike_out < 1.0, "spike must shrink, got {spike_out}");
    assert!(spike_out > 0.0);
    for (t, f) in out.frames.iter().enumerate() {
        let dev = (f.joint_pos[0] - 0.2).abs();
        assert!(dev < 1.0, "frame {t} deviates {dev}");
    }
    // The sequence path reproduces the scalar filter on the channel.
    let reference = sg_filter(&joints, &cfg).unwrap();
    for (t, f) in out.frames.iter().enumerate() {
        assert_eq!(f.joint_pos[0], reference[t], "frame {t}");
    }
}

#[test]
fn sequence_channels_match_scalar_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let frames: Vec<Frame> = (0..70)
        .map(|_| {
            Frame::new(
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..1.5),
                ),
                Quat::IDENTITY,
                vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            )
        })
        .collect();
    let seq = PoseSequence::new(50.0, "s", frames);
    let cfg = SgConfig::default();
    let out = smooth_sequence(&seq, &cfg, ChannelSelect::default()).unwrap();
    let heights: Vec<f64> = seq.frames.iter().map(|f| f.root_pos.z).collect();
    let expect_z = sg_filter(&heights, &cfg).unwrap();
    for j in 0..2 {
        let channel: Vec<f64> = seq.frames.iter().map(|f| f.joint_pos[j]).collect();
        let expect = sg_filter(&channel, &cfg).unwrap();
        for (t, f) in out.frames.iter().enumerate() {
            assert_eq!(f.joint_pos[j], expect[t], "joint {j} frame {t}");
        }
    }
    for (t, f) in out.frames.iter().enumerate() {
        assert_eq!(f.root_pos.z, expect_z[t], "root z frame {t}");
    }
}

#[test]
fn root_only_channel_selection() {
    let frames: Vec<Frame> = (0..40)
        .map(|i| {
            Frame::new(
                Vec3::new(0.0, 0.0, (i as f64 * 0.4).sin()),
                Quat::IDENTITY,
                vec![(i as f64 * 0.7).sin()],
            )
        })
        .collect();
    let seq = PoseSequence::new(50.0, "s", frames);
    let cfg = SgConfig { poly_order: 2, window: WindowSpec::Fixed(7) };
    let out = smooth_sequence(&seq, &cfg, ChannelSelect { root_position: true, joint_angles: false })
        .unwrap();
    for (a, b) in seq.frames.iter().zip(&out.frames) {
        assert_eq!(a.joint_pos, b.joint_pos);
    }
    assert!(seq.frames.iter().zip(&out.frames).any(|(a, b)| a.root_pos.z != b.root_pos.z));
}

/// 200-frame single-jump profile whose climb decelerates ballistically into
/// the apex, the way real jumps do.
fn ballistic_jump_profile() -> (Vec<f64>, usize) {
    let g_frame = 9.81 / 2500.0;
    let mut h = vec![0.0; 60];
    // Climb: the tail of an upward parabola reaching 0.5 at the apex.
    for i in 0..=16 {
        let j = (16 - i) as f64;
        h.push((0.5 - 0.5 * g_frame * j * j).max(0.0));
    }
    let apex = h.len() - 1;
    // Descent junk for the reconstruction to replace.
    for k in 0..15 {
        h.push(0.5 * (15 - k) as f64 / 16.0 + 0.01);
    }
    h.push(0.0);
    h.push(0.01);
    while h.len() < 200 {
        h.push(0.02);
    }
    (h, apex)
}

/// Golden regression: smoothing a corrected jump with the default adaptive
/// window lowers the apex by well under 1% of the jump height.
#[test]
fn corrected_jump_apex_preserved() {
    let skel = single_body_skeleton();
    let (heights, apex) = ballistic_jump_profile();
    let seq = point_sequence(&heights);
    let (corrected, _) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();
    let apex_before = corrected.frames[apex].root_pos.z;
    assert!((apex_before - 0.5).abs() < 1e-12);
    let smoothed = smooth_sequence(&corrected, &SgConfig::default(), ChannelSelect::default()).unwrap();
    let apex_after = smoothed.frames[apex].root_pos.z;
    let drop = apex_before - apex_after;
    let jump_height = 0.5;
    assert!(drop < 0.01 * jump_height, "apex dropped {drop}");
    // Frozen regression value for this fixture (jump height 0.5, adaptive
    // window of 21 samples over 200 frames).
    assert!((drop - GOLDEN_APEX_DROP).abs() < 1e-12, "apex drop drifted: {drop}");
}

const GOLDEN_APEX_DROP: f64 = 0.0;
