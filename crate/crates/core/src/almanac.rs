//! GPS Yuma almanac parsing and Keplerian orbit propagation.
//!
//! Provides the satellite geometry for simulated scenarios: parse a Yuma
//! almanac, propagate entries to Earth-fixed positions at a given GPS time of
//! week, and select visible satellites above an elevation mask.

use crate::error::{Error, Result};
use nalgebra::Vector3;

/// WGS-84 Earth gravitational parameter, m^3/s^2 (GPS interface specification).
pub const MU_EARTH: f64 = 3.986005e14;
/// Earth rotation rate, rad/s (GPS interface specification).
pub const OMEGA_DOT_EARTH: f64 = 7.2921151467e-5;

/// One satellite record from a Yuma almanac.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmanacEntry {
    pub prn: u32,
    pub health: u32,
    pub eccentricity: f64,
    /// Seconds of GPS week at which the elements apply.
    pub time_of_applicability: f64,
    /// Inclination, rad.
    pub inclination: f64,
    /// Rate of right ascension, rad/s.
    pub rate_of_right_ascension: f64,
    /// Square root of the semi-major axis, m^(1/2).
    pub sqrt_semi_major_axis: f64,
    /// Right ascension at the week epoch, rad.
    pub raan_at_week_epoch: f64,
    /// Argument of perigee, rad.
    pub argument_of_perigee: f64,
    /// Mean anomaly at the time of applicability, rad.
    pub mean_anomaly: f64,
    /// Clock bias, s. Parsed but not applied to geometry.
    pub af0: f64,
    /// Clock drift, s/s. Parsed but not applied to geometry.
    pub af1: f64,
    pub gps_week: u32,
}

/// Earth-centered Earth-fixed position, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcefPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }
}

// Canonical key prefixes recognized in a Yuma block. Keys are lowercased and
// stripped of everything but letters and digits before matching, so both
// "SQRT(A)  (m 1/2)" and "SQRT(A) (m^1/2)" resolve to "sqrta".
const KEY_PRN: &str = "id";
const KEY_HEALTH: &str = "health";
const KEY_ECC: &str = "eccentricity";
const KEY_TOA: &str = "timeofapplicability";
const KEY_INC: &str = "orbitalinclination";
const KEY_RAAN_RATE: &str = "rateofrightascen";
const KEY_SQRT_A: &str = "sqrta";
const KEY_RAAN: &str = "rightascenatweek";
const KEY_ARGP: &str = "argumentofperigee";
const KEY_M0: &str = "meananom";
const KEY_AF0: &str = "af0";
const KEY_AF1: &str = "af1";
const KEY_WEEK: &str = "week";

fn canonical_key(raw: &str) -> String {
    raw.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

#[derive(Default)]
struct BlockFields {
    prn: Option<u32>,
    health: Option<u32>,
    ecc: Option<f64>,
    toa: Option<f64>,
    inc: Option<f64>,
    raan_rate: Option<f64>,
    sqrt_a: Option<f64>,
    raan: Option<f64>,
    argp: Option<f64>,
    m0: Option<f64>,
    af0: Option<f64>,
    af1: Option<f64>,
    week: Option<u32>,
}

impl BlockFields {
    fn block_name(&self, index: usize) -> String {
        match self.prn {
            Some(prn) => format!("PRN {prn}"),
            None => format!("#{index}"),
        }
    }

    fn finish(self, index: usize) -> Result<AlmanacEntry> {
        let name = self.block_name(index);
        let missing = |field: &str| Error::YumaParse {
            block: name.clone(),
            line: String::new(),
            reason: format!("missing required field {field}"),
        };
        let entry = AlmanacEntry {
            prn: self.prn.ok_or_else(|| missing("ID"))?,
            health: self.health.ok_or_else(|| missing("Health"))?,
            eccentricity: self.ecc.ok_or_else(|| missing("Eccentricity"))?,
            time_of_applicability: self.toa.ok_or_else(|| missing("Time of Applicability"))?,
            inclination: self.inc.ok_or_else(|| missing("Orbital Inclination"))?,
            rate_of_right_ascension: self.raan_rate.ok_or_else(|| missing("Rate of Right Ascen"))?,
            sqrt_semi_major_axis: self.sqrt_a.ok_or_else(|| missing("SQRT(A)"))?,
            raan_at_week_epoch: self.raan.ok_or_else(|| missing("Right Ascen at Week"))?,
            argument_of_perigee: self.argp.ok_or_else(|| missing("Argument of Perigee"))?,
            mean_anomaly: self.m0.ok_or_else(|| missing("Mean Anom"))?,
            af0: self.af0.ok_or_else(|| missing("Af0"))?,
            af1: self.af1.ok_or_else(|| missing("Af1"))?,
            gps_week: self.week.ok_or_else(|| missing("week"))?,
        };
        if !(0.0..1.0).contains(&entry.eccentricity) {
            return Err(Error::YumaParse {
                block: name,
                line: String::new(),
                reason: format!("eccentricity {} outside [0, 1)", entry.eccentricity),
            });
        }
        if entry.sqrt_semi_major_axis <= 0.0 {
            return Err(Error::YumaParse {
                block: name,
                line: String::new(),
                reason: format!("non-positive SQRT(A) {}", entry.sqrt_semi_major_axis),
            });
        }
        Ok(entry)
    }
}

/// Parse a Yuma-format almanac: blocks of `key: value` lines separated by
/// blank lines or `*****` banner lines. Unknown keys are ignored.
pub fn parse_yuma(text: &str) -> Result<Vec<AlmanacEntry>> {
    let mut entries = Vec::new();
    let mut fields: Option<BlockFields> = None;
    let mut block_index = 0usize;

    let mut flush = |fields: &mut Option<BlockFields>, block_index: &mut usize| -> Result<()> {
        if let Some(f) = fields.take() {
            entries.push(f.finish(*block_index)?);
            *block_index += 1;
        }
        Ok(())
    };

    for raw_line in text.lines() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('*') {
            flush(&mut fields, &mut block_index)?;
            continue;
        }
        let (key_raw, value_raw) = line.split_once(':').ok_or_else(|| Error::YumaParse {
            block: fields
                .as_ref()
                .map(|f| f.block_name(block_index))
                .unwrap_or_else(|| format!("#{block_index}")),
            line: raw_line.to_string(),
            reason: "expected a `key: value` line".to_string(),
        })?;
        let key = canonical_key(key_raw);
        let value = value_raw.trim();
        let f = fields.get_or_insert_with(BlockFields::default);

        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::YumaParse {
                block: f.block_name(block_index),
                line: raw_line.to_string(),
                reason: format!("unparsable number {v:?}"),
            })
        };
        let parse_u32 = |v: &str| -> Result<u32> {
            v.parse::<u32>().map_err(|_| Error::YumaParse {
                block: f.block_name(block_index),
                line: raw_line.to_string(),
                reason: format!("unparsable integer {v:?}"),
            })
        };

        // `week` must be tested after the longer `rightascenatweek` prefix.
        if key.starts_with(KEY_PRN) {
            f.prn = Some(parse_u32(value)?);
        } else if key.starts_with(KEY_HEALTH) {
            f.health = Some(parse_u32(value)?);
        } else if key.starts_with(KEY_ECC) {
            f.ecc = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_TOA) {
            f.toa = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_INC) {
            f.inc = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_RAAN_RATE) {
            f.raan_rate = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_SQRT_A) {
            f.sqrt_a = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_RAAN) {
            f.raan = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_ARGP) {
            f.argp = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_M0) {
            f.m0 = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_AF0) {
            f.af0 = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_AF1) {
            f.af1 = Some(parse_f64(value)?);
        } else if key.starts_with(KEY_WEEK) {
            f.week = Some(parse_u32(value)?);
        }
        // unknown keys ignored
    }
    flush(&mut fields, &mut block_index)?;
    Ok(entries)
}

/// Render entries in Yuma layout. `parse_yuma(format_yuma(e)) == e`: numeric
/// fields are written with enough digits to round-trip f64 exactly.
pub fn format_yuma(entries: &[AlmanacEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!(
            "******** Week {} almanac for PRN-{:02} ********\n",
            e.gps_week, e.prn
        ));
        out.push_str(&format!("ID:                         {:02}\n", e.prn));
        out.push_str(&format!("Health:                     {:03}\n", e.health));
        out.push_str(&format!("Eccentricity:               {:.16E}\n", e.eccentricity));
        out.push_str(&format!("Time of Applicability(s):   {:.4}\n", e.time_of_applicability));
        out.push_str(&format!("Orbital Inclination(rad):   {:.16E}\n", e.inclination));
        out.push_str(&format!("Rate of Right Ascen(r/s):   {:.16E}\n", e.rate_of_right_ascension));
        out.push_str(&format!("SQRT(A)  (m 1/2):           {:.16E}\n", e.sqrt_semi_major_axis));
        out.push_str(&format!("Right Ascen at Week(rad):   {:.16E}\n", e.raan_at_week_epoch));
        out.push_str(&format!("Argument of Perigee(rad):   {:.16E}\n", e.argument_of_perigee));
        out.push_str(&format!("Mean Anom(rad):             {:.16E}\n", e.mean_anomaly));
        out.push_str(&format!("Af0(s):                     {:.16E}\n", e.af0));
        out.push_str(&format!("Af1(s/s):                   {:.16E}\n", e.af1));
        out.push_str(&format!("week:                       {}\n", e.gps_week));
        out.push('\n');
    }
    out
}

/// Solve Kepler's equation M = E - e*sin(E) for the eccentric anomaly.
///
/// Newton iteration from E0 = M, at most 30 steps, until the residual
/// |E - e*sin(E) - M| drops below 1e-13.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> Result<f64> {
    let (m, e) = (mean_anomaly, eccentricity);
    let mut big_e = m;
    for _ in 0..30 {
        let f = big_e - e * big_e.sin() - m;
        if f.abs() < 1e-13 {
            return Ok(big_e);
        }
        big_e -= f / (1.0 - e * big_e.cos());
    }
    let residual = (big_e - e * big_e.sin() - m).abs();
    if residual < 1e-12 {
        return Ok(big_e);
    }
    Err(Error::KeplerNonConvergence {
        mean_anomaly: m,
        eccentricity: e,
        residual,
    })
}

/// Propagate an almanac entry to an ECEF position at GPS time of week `t` (s).
pub fn propagate(entry: &AlmanacEntry, t: f64) -> Result<EcefPosition> {
    if entry.health != 0 {
        return Err(Error::UnhealthySatellite { prn: entry.prn });
    }
    let a = entry.sqrt_semi_major_axis * entry.sqrt_semi_major_axis;
    let n = (MU_EARTH / (a * a * a)).sqrt();
    let tk = t - entry.time_of_applicability;
    let m = entry.mean_anomaly + n * tk;
    let e = entry.eccentricity;
    let big_e = solve_kepler(m, e)?;

    let nu = ((1.0 - e * e).sqrt() * big_e.sin()).atan2(big_e.cos() - e);
    let u = nu + entry.argument_of_perigee;
    let r = a * (1.0 - e * big_e.cos());
    let (x_orb, y_orb) = (r * u.cos(), r * u.sin());

    // Longitude of ascending node in the Earth-fixed frame.
    let omega = entry.raan_at_week_epoch + (entry.rate_of_right_ascension - OMEGA_DOT_EARTH) * tk
        - OMEGA_DOT_EARTH * entry.time_of_applicability;
    let (sin_o, cos_o) = omega.sin_cos();
    let (sin_i, cos_i) = entry.inclination.sin_cos();

    Ok(EcefPosition::new(
        x_orb * cos_o - y_orb * cos_i * sin_o,
        x_orb * sin_o + y_orb * cos_i * cos_o,
        y_orb * sin_i,
    ))
}

/// Elevation of `sat` above the local horizon of `receiver`, spherical Earth.
pub fn elevation(sat: &EcefPosition, receiver: &EcefPosition) -> f64 {
    let up = receiver.as_vector().normalize();
    let los = sat.as_vector() - receiver.as_vector();
    (up.dot(&los) / los.norm()).clamp(-1.0, 1.0).asin()
}

/// Indices of satellites above the elevation `mask` (rad), sorted by
/// descending elevation.
pub fn visible_satellites(
    sat_positions: &[EcefPosition],
    receiver: &EcefPosition,
    mask: f64,
) -> Vec<usize> {
    let mut visible: Vec<(usize, f64)> = sat_positions
        .iter()
        .enumerate()
        .map(|(i, p)| (i, elevation(p, receiver)))
        .filter(|(_, el)| *el > mask)
        .collect();
    visible.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    visible.into_iter().map(|(i, _)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TWO_BLOCK_FIXTURE: &str = "\
******** Week 195 almanac for PRN-01 ********
ID:                         01
Health:                     000
Eccentricity:               0.1084890366E-001
Time of Applicability(s):  319488.0000
Orbital Inclination(rad):   0.9857587217
Rate of Right Ascen(r/s):  -0.7714606188E-008
SQRT(A)  (m 1/2):           5153.566895
Right Ascen at Week(rad):  -0.5972845554E+000
Argument of Perigee(rad):   0.861878725
Mean Anom(rad):             0.2913171868E+001
Af0(s):                     0.4844665527E-003
Af1(s/s):                   0.3637978807E-011
week:                        195

******** Week 195 almanac for PRN-07 ********
ID:                         07
Health:                     000
Eccentricity:               1.6250610351e-02
Time of Applicability(s):  319488.0000
Orbital Inclination(rad):   0.9561980441
Rate of Right Ascen(r/s):  -0.8000333242E-008
SQRT(A)  (m 1/2):           5153.625488
Right Ascen at Week(rad):   2.5388711021
Argument of Perigee(rad):  -2.4445409491
Mean Anom(rad):             1.2136711909
Af0(s):                    -0.1049041748E-003
Af1(s/s):                   0.0000000000E+000
week:                        195
";

    #[test]
    fn parses_two_block_fixture() {
        let entries = parse_yuma(TWO_BLOCK_FIXTURE).unwrap();
        assert_eq!(entries.len(), 2);
        let a = &entries[0];
        assert_eq!(a.prn, 1);
        assert_eq!(a.health, 0);
        assert_relative_eq!(a.eccentricity, 0.1084890366e-1);
        assert_relative_eq!(a.time_of_applicability, 319488.0);
        assert_relative_eq!(a.inclination, 0.9857587217);
        assert_relative_eq!(a.rate_of_right_ascension, -0.7714606188e-8);
        assert_relative_eq!(a.sqrt_semi_major_axis, 5153.566895);
        assert_relative_eq!(a.raan_at_week_epoch, -0.5972845554);
        assert_relative_eq!(a.argument_of_perigee, 0.861878725);
        assert_relative_eq!(a.mean_anomaly, 2.913171868);
        assert_relative_eq!(a.af0, 0.4844665527e-3);
        assert_relative_eq!(a.af1, 0.3637978807e-11);
        assert_eq!(a.gps_week, 195);
        let b = &entries[1];
        assert_eq!(b.prn, 7);
        // lower-case exponent spelling accepted
        assert_relative_eq!(b.eccentricity, 1.6250610351e-2);
        assert_relative_eq!(b.argument_of_perigee, -2.4445409491);
    }

    #[test]
    fn zero_eccentricity_field_reads_exactly() {
        let block = "ID: 3\nHealth: 0\nEccentricity: 0.0000000000E+000\n\
            Time of Applicability(s): 0\nOrbital Inclination(rad): 0.96\n\
            Rate of Right Ascen(r/s): 0\nSQRT(A)  (m 1/2): 5153.6\n\
            Right Ascen at Week(rad): 0.1\nArgument of Perigee(rad): 0.2\n\
            Mean Anom(rad): 0.3\nAf0(s): 0\nAf1(s/s): 0\nweek: 195\n";
        let entries = parse_yuma(block).unwrap();
        assert_eq!(entries[0].eccentricity, 0.0);
    }

    #[test]
    fn empty_input_yields_empty_list() {
        assert!(parse_yuma("").unwrap().is_empty());
        assert!(parse_yuma("\n\n  \n").unwrap().is_empty());
    }

    #[test]
    fn missing_field_names_prn() {
        let block = "ID: 12\nHealth: 0\nEccentricity: 0.01\n";
        let err = parse_yuma(block).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("PRN 12"), "{msg}");
        assert!(msg.contains("missing"), "{msg}");
    }

    #[test]
    fn unparsable_number_names_offending_line() {
        let block = "ID: 5\nEccentricity: bogus\n";
        let err = parse_yuma(block).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn round_trip_through_emitter() {
        let entries = parse_yuma(TWO_BLOCK_FIXTURE).unwrap();
        let reparsed = parse_yuma(&format_yuma(&entries)).unwrap();
        assert_eq!(entries, reparsed);
    }

    #[test]
    fn kepler_circular_orbit_is_identity() {
        assert_eq!(solve_kepler(1.2, 0.0).unwrap(), 1.2);
    }

    #[test]
    fn kepler_zero_anomaly_is_zero() {
        assert_eq!(solve_kepler(0.0, 0.5).unwrap(), 0.0);
    }

    // Bisection on [0, 2pi] is an independent route to the same root.
    fn kepler_bisection(m: f64, e: f64) -> f64 {
        let g = |x: f64| x - e * x.sin() - m;
        let (mut lo, mut hi) = (0.0f64, std::f64::consts::TAU);
        assert!(g(lo) <= 0.0 && g(hi) >= 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn kepler_matches_bisection_oracle() {
        let e = solve_kepler(1.0, 0.1).unwrap();
        let oracle = kepler_bisection(1.0, 0.1);
        assert_relative_eq!(e, oracle, epsilon = 1e-10);
        assert!((e - 0.1 * e.sin() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kepler_residual_small_over_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let m = rng.random_range(0.0..std::f64::consts::TAU);
            let e = rng.random_range(0.0..0.97);
            let big_e = solve_kepler(m, e).unwrap();
            assert!(
                (big_e - e * big_e.sin() - m).abs() < 1e-12,
                "residual too large for M={m}, e={e}"
            );
        }
    }

    fn circular_equatorial_entry() -> AlmanacEntry {
        AlmanacEntry {
            prn: 99,
            health: 0,
            eccentricity: 0.0,
            time_of_applicability: 319488.0,
            inclination: 0.0,
            rate_of_right_ascension: 0.0,
            sqrt_semi_major_axis: 5153.6,
            raan_at_week_epoch: 0.5,
            argument_of_perigee: 0.0,
            mean_anomaly: 1.0,
            af0: 0.0,
            af1: 0.0,
            gps_week: 195,
        }
    }

    #[test]
    fn propagate_circular_equatorial_closed_form() {
        // e = i = argp = raan_rate = 0 at t = toa: the satellite sits on the
        // equatorial circle of radius a at longitude M + raan - omega_e * t.
        let entry = circular_equatorial_entry();
        let t = entry.time_of_applicability;
        let a = entry.sqrt_semi_major_axis.powi(2);
        let lon = entry.mean_anomaly + entry.raan_at_week_epoch - OMEGA_DOT_EARTH * t;
        let p = propagate(&entry, t).unwrap();
        assert_relative_eq!(p.x, a * lon.cos(), epsilon = 1e-6);
        assert_relative_eq!(p.y, a * lon.sin(), epsilon = 1e-6);
        assert_relative_eq!(p.z, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn propagate_real_entries_stay_in_gps_shell() {
        let entries = parse_yuma(TWO_BLOCK_FIXTURE).unwrap();
        for e in &entries {
            for dt in [-302400.0, -100000.0, 0.0, 50000.0, 302400.0] {
                let p = propagate(e, e.time_of_applicability + dt).unwrap();
                let r = p.norm();
                assert!((2.0e7..3.0e7).contains(&r), "radius {r} outside GPS shell");
            }
        }
    }

    #[test]
    fn propagate_is_periodic_up_to_plane_rotation() {
        let entries = parse_yuma(TWO_BLOCK_FIXTURE).unwrap();
        let e = &entries[1];
        let a = e.sqrt_semi_major_axis.powi(2);
        let n = (MU_EARTH / (a * a * a)).sqrt();
        let period = std::f64::consts::TAU / n;
        let t0 = e.time_of_applicability + 12345.0;
        let p1 = propagate(e, t0).unwrap().as_vector();
        let p2 = propagate(e, t0 + period).unwrap().as_vector();
        // After one orbital period the in-plane position repeats; the node
        // has regressed by (raan_rate - omega_e) * period.
        let dpsi = (e.rate_of_right_ascension - OMEGA_DOT_EARTH) * period;
        let rot = nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), -dpsi);
        let back = rot * p2;
        assert_relative_eq!((back - p1).norm(), 0.0, epsilon = 1e-3);
    }

    #[test]
    fn propagate_refuses_unhealthy_entry() {
        let mut entry = circular_equatorial_entry();
        entry.health = 63;
        assert!(matches!(
            propagate(&entry, entry.time_of_applicability),
            Err(Error::UnhealthySatellite { prn: 99 })
        ));
    }

    #[test]
    fn zenith_satellite_is_visible_at_ninety_degrees() {
        let rx = EcefPosition::new(6.4e6, 0.0, 0.0);
        let sat = EcefPosition::new(6.4e6 + 2.0e7, 0.0, 0.0);
        let vis = visible_satellites(&[sat], &rx, 10f64.to_radians());
        assert_eq!(vis, vec![0]);
        assert_relative_eq!(elevation(&sat, &rx), std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn antipodal_satellite_is_excluded() {
        let rx = EcefPosition::new(6.4e6, 0.0, 0.0);
        let sat = EcefPosition::new(-2.6e7, 0.0, 0.0);
        assert!(visible_satellites(&[sat], &rx, 10f64.to_radians()).is_empty());
    }

    #[test]
    fn visibility_matches_dot_product_oracle_and_is_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rx = EcefPosition::new(1187.0e3, -4777.0e3, 4171.0e3);
        let sats: Vec<EcefPosition> = (0..40)
            .map(|_| {
                let v = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
                .normalize()
                    * 2.65e7;
                EcefPosition::from_vector(&v)
            })
            .collect();
        let mask = 10f64.to_radians();
        let vis = visible_satellites(&sats, &rx, mask);

        // Independent route: elevation = pi/2 - angle(up, los) via plain dots.
        let up = rx.as_vector() / rx.norm();
        let oracle: Vec<usize> = {
            let mut els: Vec<(usize, f64)> = sats
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let los = s.as_vector() - rx.as_vector();
                    let cos_zenith = up.dot(&los) / los.norm();
                    (i, std::f64::consts::FRAC_PI_2 - cos_zenith.clamp(-1.0, 1.0).acos())
                })
                .filter(|(_, el)| *el > mask)
                .collect();
            els.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
            els.into_iter().map(|(i, _)| i).collect()
        };
        assert_eq!(vis, oracle);

        let els: Vec<f64> = vis.iter().map(|&i| elevation(&sats[i], &rx)).collect();
        for w in els.windows(2) {
            assert!(w[0] >= w[1], "visibility output not sorted by elevation");
        }
    }
}
