//! Synthetic GNSS and 5G observation generation.
//!
//! From a ground-truth [`Scenario`] this module produces raw pseudo-range and
//! carrier-phase observations for the user and base receivers, forms the
//! double-difference (DD) stacked model with its design matrices and
//! covariance, and generates 5G angle-of-departure / delay observations.
//!
//! Carrier phase is expressed in meters (range-equivalent), so the ambiguity
//! design block is `lambda * I` and the stacked DD model reads
//! `y1 = B*p_u + C*k - b`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Rotation3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// GPS L1 carrier wavelength, m.
pub const GPS_L1_WAVELENGTH: f64 = SPEED_OF_LIGHT / 1_575.42e6;

/// Position and orientation of one 5G base station.
///
/// `orientation` maps BS-frame vectors to the global (ECEF) frame.
#[derive(Debug, Clone)]
pub struct BsPose {
    pub position: Vector3<f64>,
    pub orientation: Rotation3<f64>,
}

/// Standard deviations of the additive observation noise.
#[derive(Debug, Clone, Copy)]
pub struct NoiseConfig {
    /// Carrier-phase noise, m.
    pub sigma_phase: f64,
    /// Pseudo-range (code) noise, m.
    pub sigma_code: f64,
    /// Azimuth noise, rad.
    pub sigma_az: f64,
    /// Elevation noise, rad.
    pub sigma_el: f64,
    /// Delay noise, s.
    pub sigma_tau: f64,
}

impl NoiseConfig {
    /// Standard configuration: code noise fixed at 100x the phase noise.
    pub fn from_phase_sigma(sigma_phase: f64, sigma_az: f64, sigma_el: f64, sigma_tau: f64) -> Self {
        Self {
            sigma_phase,
            sigma_code: 100.0 * sigma_phase,
            sigma_az,
            sigma_el,
            sigma_tau,
        }
    }

    pub fn zero() -> Self {
        Self {
            sigma_phase: 0.0,
            sigma_code: 0.0,
            sigma_az: 0.0,
            sigma_el: 0.0,
            sigma_tau: 0.0,
        }
    }
}

/// Per-satellite error terms common to both receivers (short baseline).
#[derive(Debug, Clone, Copy, Default)]
pub struct SatelliteErrors {
    /// Ionospheric delay, m.
    pub iono: f64,
    /// Tropospheric delay, m.
    pub tropo: f64,
    /// Satellite clock bias, s.
    pub clock_bias: f64,
}

/// Ground-truth world state from which observations are synthesized.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// True user position, ECEF m.
    pub user_position: Vector3<f64>,
    /// Known GNSS base-station position, ECEF m.
    pub base_position: Vector3<f64>,
    /// 5G base stations (length L).
    pub bs_poses: Vec<BsPose>,
    /// Satellite positions, ECEF m (length N).
    pub sat_positions: Vec<Vector3<f64>>,
    /// Carrier wavelength, m.
    pub wavelength: f64,
    /// True per-satellite single-difference ambiguities, cycles. The base
    /// receiver's ambiguities are fixed to 0, so these are the user's.
    pub truth_ambiguities: Vec<i64>,
    /// True 5G clock bias Delta, s; lies in [0, clock_cycle).
    pub clock_bias: f64,
    /// User clock cycle T_c, s. Bounds the clock bias and its initialization.
    pub clock_cycle: f64,
    pub noise: NoiseConfig,
    /// Per-satellite common error terms (length N).
    pub sat_errors: Vec<SatelliteErrors>,
    /// User receiver clock bias, s.
    pub user_clock_bias: f64,
    /// Base receiver clock bias, s.
    pub base_clock_bias: f64,
    /// When false, the noise draws are skipped (exact observations) while the
    /// configured sigmas still define the covariances used for weighting.
    pub noise_enabled: bool,
}

impl Scenario {
    pub fn n_sats(&self) -> usize {
        self.sat_positions.len()
    }

    pub fn n_bs(&self) -> usize {
        self.bs_poses.len()
    }

    fn check_lengths(&self) -> Result<()> {
        let n = self.n_sats();
        if self.truth_ambiguities.len() != n {
            return Err(Error::DimensionMismatch {
                context: "scenario truth_ambiguities",
                expected: n,
                actual: self.truth_ambiguities.len(),
            });
        }
        if self.sat_errors.len() != n {
            return Err(Error::DimensionMismatch {
                context: "scenario sat_errors",
                expected: n,
                actual: self.sat_errors.len(),
            });
        }
        Ok(())
    }
}

/// Raw code and phase observations of one receiver, meters, one entry per
/// satellite.
#[derive(Debug, Clone)]
pub struct RawObservations {
    pub code: Vec<f64>,
    pub phase: Vec<f64>,
}

/// Raw observations of both receivers for a common satellite set.
#[derive(Debug, Clone)]
pub struct RawSet {
    pub user: RawObservations,
    pub base: RawObservations,
}

/// Stacked double-difference observations with design matrices.
#[derive(Debug, Clone)]
pub struct DdObservations {
    /// DD pseudo-ranges, m (length N-1).
    pub code: DVector<f64>,
    /// DD carrier phases, m (length N-1).
    pub phase: DVector<f64>,
    /// Differenced line-of-sight matrix H, (N-1) x 3.
    pub los_diff: DMatrix<f64>,
    /// Position design B = [H; H], (2N-2) x 3.
    pub design_pos: DMatrix<f64>,
    /// Ambiguity design C = [0; lambda*I], (2N-2) x (N-1).
    pub design_amb: DMatrix<f64>,
    /// Offset b = B * p_b, length 2N-2.
    pub offset: DVector<f64>,
    /// Joint design A = [H 0 0; H lambda*I 0], (2N-2) x (N+3). The last
    /// column (clock) is zero: GNSS observations do not see Delta.
    pub design_joint: DMatrix<f64>,
    /// DD covariance Q_y1 = D * Q_raw * D^T, (2N-2) x (2N-2).
    pub cov: DMatrix<f64>,
    pub ref_index: usize,
    pub wavelength: f64,
}

impl DdObservations {
    /// Number of double differences (N-1 for N observed satellites).
    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    /// Stacked observation vector y1 = [code; phase].
    pub fn y1(&self) -> DVector<f64> {
        let n = self.len();
        let mut y = DVector::zeros(2 * n);
        y.rows_mut(0, n).copy_from(&self.code);
        y.rows_mut(n, n).copy_from(&self.phase);
        y
    }

    /// Placeholder for configurations with fewer than two satellites: no DD
    /// observations and no ambiguity unknowns.
    pub fn empty(wavelength: f64) -> Self {
        Self {
            code: DVector::zeros(0),
            phase: DVector::zeros(0),
            los_diff: DMatrix::zeros(0, 3),
            design_pos: DMatrix::zeros(0, 3),
            design_amb: DMatrix::zeros(0, 0),
            offset: DVector::zeros(0),
            design_joint: DMatrix::zeros(0, 4),
            cov: DMatrix::zeros(0, 0),
            ref_index: 0,
            wavelength,
        }
    }
}

/// Stacked 5G observations: all azimuths, then all elevations, then all
/// delays.
#[derive(Debug, Clone)]
pub struct FiveGObservations {
    /// Azimuth angles, rad, in (-pi, pi].
    pub az: DVector<f64>,
    /// Elevation angles, rad.
    pub el: DVector<f64>,
    /// Channel delays, s.
    pub tau: DVector<f64>,
    /// Diagonal covariance of the stacked vector, 3L x 3L.
    pub cov: DMatrix<f64>,
}

impl FiveGObservations {
    pub fn n_bs(&self) -> usize {
        self.az.len()
    }

    /// Stacked observation vector y2 = [az; el; tau].
    pub fn y2(&self) -> DVector<f64> {
        let l = self.n_bs();
        let mut y = DVector::zeros(3 * l);
        y.rows_mut(0, l).copy_from(&self.az);
        y.rows_mut(l, l).copy_from(&self.el);
        y.rows_mut(2 * l, l).copy_from(&self.tau);
        y
    }
}

/// Wrap an angle to the interval (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let mut a = x % std::f64::consts::TAU;
    if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    } else if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

/// Unit vector from the receiver toward the satellite.
pub fn los_unit_vector(p_sat: &Vector3<f64>, p_rx: &Vector3<f64>) -> Result<Vector3<f64>> {
    let d = p_sat - p_rx;
    let norm = d.norm();
    if norm == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(d / norm)
}

fn sample(rng: &mut impl Rng, sigma: f64, enabled: bool) -> f64 {
    if enabled && sigma > 0.0 {
        Normal::new(0.0, sigma).unwrap().sample(rng)
    } else {
        0.0
    }
}

/// Generate raw code and phase observations for user and base.
///
/// Both receivers share the per-satellite ionospheric, tropospheric, and
/// satellite-clock terms (short-baseline assumption). Base ambiguities are 0.
pub fn generate_raw(scenario: &Scenario, rng: &mut impl Rng) -> Result<RawSet> {
    scenario.check_lengths()?;
    let n = scenario.n_sats();
    if n < 1 {
        return Err(Error::DimensionMismatch {
            context: "generate_raw satellite count",
            expected: 1,
            actual: 0,
        });
    }
    let c = SPEED_OF_LIGHT;
    let mut receivers = Vec::with_capacity(2);
    for (p_rx, rx_clock, is_user) in [
        (&scenario.user_position, scenario.user_clock_bias, true),
        (&scenario.base_position, scenario.base_clock_bias, false),
    ] {
        let mut code = Vec::with_capacity(n);
        let mut phase = Vec::with_capacity(n);
        for i in 0..n {
            let rho = (scenario.sat_positions[i] - p_rx).norm();
            let err = &scenario.sat_errors[i];
            let common = err.iono + err.tropo + c * (rx_clock - err.clock_bias);
            let ambiguity = if is_user {
                scenario.wavelength * scenario.truth_ambiguities[i] as f64
            } else {
                0.0
            };
            code.push(
                rho + common + sample(rng, scenario.noise.sigma_code, scenario.noise_enabled),
            );
            // Ionosphere advances the carrier: opposite sign on phase.
            phase.push(
                rho + ambiguity - 2.0 * err.iono
                    + common
                    + sample(rng, scenario.noise.sigma_phase, scenario.noise_enabled),
            );
        }
        receivers.push(RawObservations { code, phase });
    }
    let base = receivers.pop().unwrap();
    let user = receivers.pop().unwrap();
    Ok(RawSet { user, base })
}

/// Form double differences against the reference satellite and build the
/// stacked model (design matrices, offset, covariance).
pub fn double_difference(
    scenario: &Scenario,
    raw: &RawSet,
    ref_index: usize,
) -> Result<DdObservations> {
    let n = scenario.n_sats();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            context: "double_difference satellite count",
            expected: 2,
            actual: n,
        });
    }
    if ref_index >= n {
        return Err(Error::RefIndexOutOfRange {
            ref_index,
            n_sats: n,
        });
    }
    if raw.user.code.len() != n || raw.base.code.len() != n {
        return Err(Error::DimensionMismatch {
            context: "double_difference raw observations",
            expected: n,
            actual: raw.user.code.len().min(raw.base.code.len()),
        });
    }
    let m = n - 1;
    let lambda = scenario.wavelength;

    // Single differences user - base, then difference against the reference.
    let sd = |user: &[f64], base: &[f64], i: usize| user[i] - base[i];
    let mut code = DVector::zeros(m);
    let mut phase = DVector::zeros(m);
    // LOS vectors taken at the user side, satellite-to-receiver direction, so
    // that the far-field model comes out as y1 = B*p_u + C*k - b.
    let h_user = |i: usize| -> Result<Vector3<f64>> {
        Ok(-los_unit_vector(&scenario.sat_positions[i], &scenario.user_position)?)
    };
    let h_ref = h_user(ref_index)?;
    let mut los_diff = DMatrix::zeros(m, 3);

    let mut row = 0usize;
    for i in 0..n {
        if i == ref_index {
            continue;
        }
        code[row] = sd(&raw.user.code, &raw.base.code, i) - sd(&raw.user.code, &raw.base.code, ref_index);
        phase[row] =
            sd(&raw.user.phase, &raw.base.phase, i) - sd(&raw.user.phase, &raw.base.phase, ref_index);
        let h = h_user(i)? - h_ref;
        los_diff.set_row(row, &h.transpose());
        row += 1;
    }

    let mut design_pos = DMatrix::zeros(2 * m, 3);
    design_pos.rows_mut(0, m).copy_from(&los_diff);
    design_pos.rows_mut(m, m).copy_from(&los_diff);

    let mut design_amb = DMatrix::zeros(2 * m, m);
    design_amb
        .view_mut((m, 0), (m, m))
        .copy_from(&(DMatrix::identity(m, m) * lambda));

    let offset = &design_pos * scenario.base_position;

    // A = [H 0 0; H lambda*I 0] over x = [p_u; k; Delta].
    let mut design_joint = DMatrix::zeros(2 * m, n + 3);
    design_joint.view_mut((0, 0), (2 * m, 3)).copy_from(&design_pos);
    design_joint
        .view_mut((0, 3), (2 * m, m))
        .copy_from(&design_amb);

    // Combined differencing operator D over the raw stacking
    // [user code; base code; user phase; base phase].
    let mut d_op = DMatrix::zeros(2 * m, 4 * n);
    let mut row = 0usize;
    for i in 0..n {
        if i == ref_index {
            continue;
        }
        for (block, offset_col) in [(row, 0), (m + row, 2 * n)] {
            d_op[(block, offset_col + i)] = 1.0;
            d_op[(block, offset_col + n + i)] = -1.0;
            d_op[(block, offset_col + ref_index)] = -1.0;
            d_op[(block, offset_col + n + ref_index)] = 1.0;
        }
        row += 1;
    }
    let mut q_raw = DMatrix::zeros(4 * n, 4 * n);
    let code_var = scenario.noise.sigma_code.powi(2);
    let phase_var = scenario.noise.sigma_phase.powi(2);
    for i in 0..2 * n {
        q_raw[(i, i)] = code_var;
        q_raw[(2 * n + i, 2 * n + i)] = phase_var;
    }
    let cov = &d_op * q_raw * d_op.transpose();

    Ok(DdObservations {
        code,
        phase,
        los_diff,
        design_pos,
        design_amb,
        offset,
        design_joint,
        cov,
        ref_index,
        wavelength: lambda,
    })
}

/// Noise-free 5G observation of one base station.
pub fn bs_observation(pose: &BsPose, p_u: &Vector3<f64>, clock_bias: f64) -> Result<(f64, f64, f64)> {
    let d_vec = p_u - pose.position;
    let d = d_vec.norm();
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let t = pose.orientation.inverse() * d_vec;
    let az = t.y.atan2(t.x);
    let el = (t.z / d).clamp(-1.0, 1.0).asin();
    let tau = d / SPEED_OF_LIGHT + clock_bias;
    Ok((az, el, tau))
}

/// Generate azimuth/elevation/delay observations for every 5G base station.
pub fn generate_5g(scenario: &Scenario, rng: &mut impl Rng) -> Result<FiveGObservations> {
    let l = scenario.n_bs();
    if l < 1 {
        return Err(Error::DimensionMismatch {
            context: "generate_5g base-station count",
            expected: 1,
            actual: 0,
        });
    }
    let mut az = DVector::zeros(l);
    let mut el = DVector::zeros(l);
    let mut tau = DVector::zeros(l);
    for (i, pose) in scenario.bs_poses.iter().enumerate() {
        let (a, e, t) = bs_observation(pose, &scenario.user_position, scenario.clock_bias)?;
        az[i] = wrap_angle(a + sample(rng, scenario.noise.sigma_az, scenario.noise_enabled));
        el[i] = e + sample(rng, scenario.noise.sigma_el, scenario.noise_enabled);
        tau[i] = t + sample(rng, scenario.noise.sigma_tau, scenario.noise_enabled);
    }
    let mut cov = DMatrix::zeros(3 * l, 3 * l);
    for i in 0..l {
        cov[(i, i)] = scenario.noise.sigma_az.powi(2);
        cov[(l + i, l + i)] = scenario.noise.sigma_el.powi(2);
        cov[(2 * l + i, 2 * l + i)] = scenario.noise.sigma_tau.powi(2);
    }
    Ok(FiveGObservations { az, el, tau, cov })
}
