//! Dimensional localization-availability check.
//!
//! A configuration of N satellites and L base stations is localizable when
//! the observation count is at least the unknown count. GNSS contributes
//! 2(N-1) double differences (none for N < 2); 5G contributes 3 observations
//! per base station. Unknowns are the 3 position coordinates, the N-1
//! ambiguities (none for N < 2), and one clock bias whenever L >= 1.

/// Observation/unknown counts and the resulting verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AvailabilityResult {
    pub n_obs: usize,
    pub n_unknowns: usize,
    pub localizable: bool,
}

/// Assess localizability of a configuration with `n_sats` satellites and
/// `n_bs` 5G base stations.
pub fn assess(n_sats: usize, n_bs: usize) -> AvailabilityResult {
    let dd = n_sats.saturating_sub(1);
    let n_obs = 2 * dd + 3 * n_bs;
    let n_unknowns = 3 + dd + usize::from(n_bs >= 1);
    AvailabilityResult {
        n_obs,
        n_unknowns,
        localizable: n_obs >= n_unknowns,
    }
}

/// Render the availability grid for N in `0..=n_max`, L in `0..=l_max`.
/// Nonlocalizable cells are marked with `*`.
pub fn grid(n_max: usize, l_max: usize) -> String {
    let mut out = String::new();
    out.push_str("L\\N ");
    for n in 0..=n_max {
        out.push_str(&format!("{n:>9}"));
    }
    out.push('\n');
    for l in 0..=l_max {
        out.push_str(&format!("{l:<4}"));
        for n in 0..=n_max {
            let r = assess(n, l);
            let mark = if r.localizable { " " } else { "*" };
            out.push_str(&format!("{:>9}", format!("({},{}){}", r.n_obs, r.n_unknowns, mark)));
        }
        out.push('\n');
    }
    out
}
