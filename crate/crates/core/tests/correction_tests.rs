//! Height correction checked against brute-force and closed-form oracles.

mod common;

use common::{humanoid, point_jump_profile, point_sequence, single_body_skeleton};
use motion_forge_core::correction::{
    correct_root_height, detect_extrema, CorrectionConfig, JumpStatus,
};
use motion_forge_core::kinematics::min_body_height;
use motion_forge_core::math::{Quat, Vec3};
use motion_forge_core::sequence::{Frame, PoseSequence};
use motion_forge_core::skeleton::{Body, SkeletonSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Extrema oracle: independent plateau-merged neighbor comparison.
// ---------------------------------------------------------------------------

/// For each index, grow its plateau run outward by the adjacent-pair rule,
/// then compare the run edges against the outside neighbors. Quadratic and
/// deliberately structured differently from the implementation's single
/// forward sweep.
fn oracle_extrema(h: &[f64], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let n = h.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut i = 0;
    while i < n {
        let mut a = i;
        while a > 0 && (h[a] - h[a - 1]).abs() <= tol {
            a -= 1;
        }
        let mut b = i;
        while b + 1 < n && (h[b + 1] - h[b]).abs() <= tol {
            b += 1;
        }
        let mid = (a + b) / 2;
        if i == mid && a > 0 && b < n - 1 {
            if h[a - 1] < h[a] && h[b + 1] < h[b] {
                maxima.push(mid);
            }
            if h[a - 1] > h[a] && h[b + 1] > h[b] {
                minima.push(mid);
            }
        }
        i += 1;
    }
    (maxima, minima)
}

/// 200-frame profile with two jumps, plateaus, and quantized wobble.
fn two_jump_profile() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut h = Vec::with_capacity(200);
    let push_stand = |h: &mut Vec<f64>, base: f64, len: usize, rng: &mut ChaCha8Rng| {
        for _ in 0..len {
            // Quantized wobble so genuine plateaus appear.
            let wobble = (rng.random_range(0..4) as f64) * 1e-3;
            h.push(base + wobble);
        }
    };
    let push_jump = |h: &mut Vec<f64>, apex: f64| {
        let base = *h.last().unwrap();
        for k in 1..=5 {
            h.push(base + (apex - base) * k as f64 / 5.0);
        }
        for k in 1..15 {
            h.push(apex - (apex - base) * k as f64 / 15.0);
        }
        h.push(base - 0.01);
    };
    push_stand(&mut h, 0.8, 50, &mut rng);
    push_jump(&mut h, 1.3);
    push_stand(&mut h, 0.79, 40, &mut rng);
    push_jump(&mut h, 1.45);
    while h.len() < 200 {
        let remaining = 200 - h.len();
        push_stand(&mut h, 0.8, remaining, &mut rng);
    }
    h
}

#[test]
fn detect_extrema_matches_brute_force_oracle() {
    let h = two_jump_profile();
    let cfg = CorrectionConfig { auto_skip_prominence: 0.0, ..Default::default() };
    let got = detect_extrema(&h, &cfg).unwrap();
    let (maxima, minima) = oracle_extrema(&h, cfg.plateau_tolerance);
    assert_eq!(got.maxima, maxima);
    assert_eq!(got.minima, minima);
    assert!(!maxima.is_empty() && !minima.is_empty());
}

#[test]
fn extrema_sets_disjoint_and_alternating() {
    let h = two_jump_profile();
    let cfg = CorrectionConfig { auto_skip_prominence: 0.0, ..Default::default() };
    let e = detect_extrema(&h, &cfg).unwrap();
    for m in &e.maxima {
        assert!(!e.minima.contains(m), "maxima and minima must be disjoint");
    }
    // Between consecutive maxima there is at least one minimum.
    for pair in e.maxima.windows(2) {
        assert!(
            e.minima.iter().any(|&t| t > pair[0] && t < pair[1]),
            "no minimum between maxima {} and {}",
            pair[0],
            pair[1]
        );
    }
}

// ---------------------------------------------------------------------------
// Correction behavior.
// ---------------------------------------------------------------------------

#[test]
fn floating_standing_sequence_aligned_to_ground() {
    // Constant pose floating 0.07 m above ground: no extrema after plateau
    // merge, so the first-frame alignment propagates through.
    let skel = humanoid();
    let heights = vec![common::HUMANOID_STAND_HEIGHT + 0.07; 60];
    let seq = common::humanoid_sequence(&heights, &[0.0; 9]);
    let (out, report) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();
    for t in 0..out.len() {
        let z = min_body_height(&out, &skel, t).unwrap();
        assert!(z.abs() <= 1e-12, "frame {t}: z_min {z}");
    }
    assert!(!report.has_flags());
}

#[test]
fn jump_reconstruction_matches_closed_form_parabola() {
    let skel = single_body_skeleton();
    let profile = point_jump_profile(15);
    let seq = point_sequence(&profile.heights);
    let (out, report) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();

    let segment = report
        .jump_segments
        .iter()
        .find(|s| s.status == JumpStatus::Reconstructed)
        .expect("one reconstructed segment");
    assert_eq!(segment.start, profile.take_off);
    assert_eq!(segment.end, Some(profile.landing));

    // Closed-form oracle in seconds: y(t) = y0 - g/2 t^2 with
    // T = sqrt(2 (y0 - y1) / g).
    let g: f64 = 9.81;
    let fps: f64 = 50.0;
    let y0: f64 = 0.5;
    let t_total = (2.0 * y0 / g).sqrt();
    assert!((segment.flight_time.unwrap() - t_total).abs() < 1e-9);

    let n_interior = profile.landing - profile.take_off - 1;
    for k in 1..=n_interior {
        let dt = k as f64 / (n_interior + 1) as f64 * t_total;
        let expect = y0 - 0.5 * g * dt * dt;
        let got = out.frames[profile.take_off + k].root_pos.z;
        assert!((got - expect).abs() < 1e-9, "interior sample {k}: {got} vs {expect}");
    }

    // Second finite difference over the segment is constant and equals
    // -g_frame * (T_frames / (N+1))^2.
    let g_frame = g / (fps * fps);
    let t_frames = (2.0 * y0 / g_frame).sqrt();
    let expect_dd = -g_frame * (t_frames / (n_interior + 1) as f64).powi(2);
    for t in profile.take_off..=profile.landing - 2 {
        let dd = out.frames[t + 2].root_pos.z - 2.0 * out.frames[t + 1].root_pos.z
            + out.frames[t].root_pos.z;
        assert!((dd - expect_dd).abs() < 1e-9, "second difference at {t}");
    }
}

#[test]
fn contact_frames_exactly_grounded() {
    let skel = single_body_skeleton();
    let profile = point_jump_profile(12);
    let seq = point_sequence(&profile.heights);
    let (out, report) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();
    for &t in &report.contact_frames {
        let z = min_body_height(&out, &skel, t).unwrap();
        assert!(z.abs() <= 1e-9, "contact frame {t}: {z}");
    }
    assert!(report.contact_frames.contains(&profile.landing));
}

#[test]
fn drifting_input_satisfies_non_penetration() {
    // Floating and penetrating phases around a jump, on the full humanoid.
    let skel = humanoid();
    let mut heights = Vec::new();
    let mut joints: Vec<Vec<f64>> = Vec::new();
    let stand = common::HUMANOID_STAND_HEIGHT;
    // Floating phase.
    for i in 0..40 {
        heights.push(stand + 0.12 + ((i % 4) as f64) * 2e-3);
        joints.push(vec![0.0; 9]);
    }
    // Penetrating phase.
    for i in 0..40 {
        heights.push(stand - 0.09 + ((i % 3) as f64) * 2e-3);
        joints.push(vec![0.0; 9]);
    }
    // Take-off climb.
    for k in 1..=4 {
        heights.push(stand - 0.09 + 0.15 * k as f64);
        joints.push(vec![0.0; 9]);
    }
    // Flight with leg tuck.
    for k in 0..14 {
        heights.push(stand + 0.5 - 0.03 * k as f64);
        let bend = 0.8 * (1.0 - ((k as f64 / 7.0) - 1.0).abs());
        let mut j = vec![0.0; 9];
        j[4] = bend; // l_shin
        j[7] = bend; // r_shin
        joints.push(j);
    }
    // Landing and hold.
    for i in 0..40 {
        heights.push(stand - 0.02 + if i == 0 { 0.0 } else { 2e-3 + ((i % 3) as f64) * 1.5e-3 });
        joints.push(vec![0.0; 9]);
    }
    let frames: Vec<Frame> = heights
        .iter()
        .zip(&joints)
        .map(|(&z, j)| Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, j.clone()))
        .collect();
    let seq = PoseSequence::new(50.0, "humanoid10", frames);

    let (out, report) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();
    for t in 0..out.len() {
        let z = min_body_height(&out, &skel, t).unwrap();
        assert!(z >= -1e-9, "frame {t} penetrates: {z}");
    }
    for &t in &report.contact_frames {
        let z = min_body_height(&out, &skel, t).unwrap();
        assert!(z.abs() <= 1e-9, "contact frame {t}: {z}");
    }
}

#[test]
fn idempotent_on_jump_profile() {
    let skel = single_body_skeleton();
    let profile = point_jump_profile(15);
    let seq = point_sequence(&profile.heights);
    let cfg = CorrectionConfig::default();
    let (once, _) = correct_root_height(&seq, &skel, &cfg).unwrap();
    let (twice, _) = correct_root_height(&once, &skel, &cfg).unwrap();
    for (t, (a, b)) in once.frames.iter().zip(&twice.frames).enumerate() {
        assert!(
            (a.root_pos.z - b.root_pos.z).abs() <= 1e-9,
            "frame {t}: {} vs {}",
            a.root_pos.z,
            b.root_pos.z
        );
    }
}

#[test]
fn imaginary_flight_time_flagged_and_completed() {
    // Hip-foot chain: the bent pre-jump stance aligns low (foot swung up),
    // the straight-leg landing aligns high, so the corrected apex ends up
    // below the landing and the flight time would be imaginary.
    let skel = SkeletonSpec {
        name: "leg".into(),
        bodies: vec![
            Body {
                name: "root".into(),
                parent: None,
                offset: Vec3::ZERO,
                joint_axis: None,
                z_offset: 0.0,
                mass: 1.0,
            },
            Body {
                name: "hip".into(),
                parent: Some(0),
                offset: Vec3::ZERO,
                joint_axis: Some(Vec3::new(0.0, 1.0, 0.0)),
                z_offset: 0.0,
                mass: 1.0,
            },
            Body {
                name: "foot".into(),
                parent: Some(1),
                offset: Vec3::new(0.0, 0.0, -0.4),
                joint_axis: None,
                z_offset: 0.0,
                mass: 1.0,
            },
        ],
        dof_map: vec![1],
        body_sets: BTreeMap::new(),
        joint_limits: vec![(-2.0, 2.0)],
    };
    let bent = 1.3_f64; // foot clearance 0.4*cos(1.3) ~ 0.107 below root
    let mut frames = Vec::new();
    let push = |z: f64, theta: f64, frames: &mut Vec<Frame>| {
        frames.push(Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, vec![theta]));
    };
    for _ in 0..10 {
        push(0.5, bent, &mut frames);
    }
    // Slow climb below the velocity threshold: propagation holds the
    // corrected height at the bent-stance level.
    for k in 1..=60 {
        push(0.5 + 5e-4 * k as f64, bent, &mut frames);
    }
    // Descent into a straight-leg landing minimum, then rise and hold.
    push(0.51, bent, &mut frames);
    push(0.49, bent, &mut frames);
    push(0.47, bent, &mut frames);
    push(0.45, 0.0, &mut frames);
    push(0.47, 0.0, &mut frames);
    for _ in 0..8 {
        push(0.48, 0.0, &mut frames);
    }
    let seq = PoseSequence::new(50.0, "leg", frames);
    let cfg = CorrectionConfig { auto_skip_prominence: 0.0, ..Default::default() };
    let (out, report) = correct_root_height(&seq, &skel, &cfg).unwrap();
    assert!(
        report.jump_segments.iter().any(|s| s.status == JumpStatus::ImaginaryFlightTime),
        "segments: {:?}",
        report.jump_segments
    );
    // Flagged but completed: output still satisfies non-penetration.
    for t in 0..out.len() {
        assert!(min_body_height(&out, &skel, t).unwrap() >= -1e-9);
    }
}

#[test]
fn degenerate_adjacent_extrema() {
    let skel = single_body_skeleton();
    let heights = vec![0.0, 0.1, 0.5, 0.2, 0.4, 0.1, 0.12, 0.12, 0.12];
    let seq = point_sequence(&heights);
    let cfg = CorrectionConfig { auto_skip_prominence: 0.0, ..Default::default() };
    let (_, report) = correct_root_height(&seq, &skel, &cfg).unwrap();
    assert!(report.jump_segments.iter().any(|s| s.status == JumpStatus::Degenerate));
    assert!(!report.has_flags());
}

#[test]
fn gravity_per_frame_flag() {
    let skel = single_body_skeleton();
    let profile = point_jump_profile(10);
    let seq = point_sequence(&profile.heights);
    // Same physics expressed directly per-frame^2.
    let per_frame = CorrectionConfig {
        gravity: 9.81 / 2500.0,
        gravity_per_frame: true,
        ..Default::default()
    };
    let (a, _) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();
    let (b, _) = correct_root_height(&seq, &skel, &per_frame).unwrap();
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        assert!((fa.root_pos.z - fb.root_pos.z).abs() < 1e-12);
    }
}

#[test]
fn report_heights_lengths() {
    let skel = single_body_skeleton();
    let profile = point_jump_profile(8);
    let seq = point_sequence(&profile.heights);
    let (_, report) = correct_root_height(&seq, &skel, &CorrectionConfig::default()).unwrap();
    assert_eq!(report.original_heights.len(), seq.len());
    assert_eq!(report.corrected_heights.len(), seq.len());
}
