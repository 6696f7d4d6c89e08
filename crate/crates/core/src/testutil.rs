//! Deterministic scenario construction shared by unit tests.

use crate::observation::{BsPose, NoiseConfig, SatelliteErrors, Scenario};
use nalgebra::{Rotation3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draw a rotation uniformly over SO(3).
pub(crate) fn random_rotation(rng: &mut impl Rng) -> Rotation3<f64> {
    let q = loop {
        let q = nalgebra::Quaternion::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if q.norm() > 1e-3 {
            break q;
        }
    };
    UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// Build a reproducible scenario with `n` satellites spread over the upper
/// hemisphere and `l` base stations in a 50 m box around the user.
pub(crate) fn scenario(n: usize, l: usize, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let user = Vector3::new(1187.0e3, -4777.0e3, 4171.0e3);
    let up = user.normalize();
    let east = Vector3::z().cross(&up).normalize();
    let north = up.cross(&east);

    let mut sats = Vec::with_capacity(n);
    for _ in 0..n {
        let azimuth = rng.random_range(0.0..std::f64::consts::TAU);
        let el: f64 = rng.random_range(0.26..1.40); // 15..80 degrees
        let dir = up * el.sin() + (east * azimuth.cos() + north * azimuth.sin()) * el.cos();
        sats.push(user + dir * rng.random_range(2.0e7..2.4e7));
    }

    let mut bs_poses = Vec::with_capacity(l);
    for _ in 0..l {
        let offset = Vector3::new(
            rng.random_range(-25.0..25.0),
            rng.random_range(-25.0..25.0),
            rng.random_range(-25.0..25.0),
        );
        bs_poses.push(BsPose {
            position: user + offset,
            orientation: random_rotation(&mut rng),
        });
    }

    let clock_cycle = 1e-3;
    Scenario {
        user_position: user,
        base_position: user + east * 150.0 + north * -80.0 + up * 2.0,
        bs_poses,
        sat_positions: sats,
        wavelength: crate::observation::GPS_L1_WAVELENGTH,
        truth_ambiguities: (0..n).map(|_| rng.random_range(-100..=100)).collect(),
        clock_bias: rng.random_range(0.0..clock_cycle),
        clock_cycle,
        noise: NoiseConfig::from_phase_sigma(0.001, 1e-3, 1e-3, 1e-9),
        sat_errors: vec![SatelliteErrors::default(); n],
        user_clock_bias: 0.0,
        base_clock_bias: 0.0,
        noise_enabled: true,
    }
}
