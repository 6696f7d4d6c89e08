//! Standalone RTK estimation from double-difference observations.
//!
//! Weighted least-squares float solution with covariance, the
//! ambiguity-conditioned position solution, and the three-term decomposition
//! of the quadratic cost used by integer least squares.

use crate::error::{Error, Result};
use crate::observation::DdObservations;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// Reciprocal-condition threshold below which a normal matrix is treated as
/// singular.
const RCOND_MIN: f64 = 1e-12;

/// Float RTK solution and its covariance blocks.
#[derive(Debug, Clone)]
pub struct FloatSolution {
    /// Estimated user position, m.
    pub position: Vector3<f64>,
    /// Float ambiguities, cycles (length N-1).
    pub ambiguities: DVector<f64>,
    /// Position covariance block Q_p.
    pub cov_position: Matrix3<f64>,
    /// Ambiguity covariance block Q_k.
    pub cov_ambiguities: DMatrix<f64>,
    /// Cross covariance Q_pk, 3 x (N-1).
    pub cov_cross: DMatrix<f64>,
}

/// Evaluate r^T W r.
pub(crate) fn quad_form(w: &DMatrix<f64>, r: &DVector<f64>) -> f64 {
    r.dot(&(w * r))
}

fn check_spd_dims(context: &'static str, w: &DMatrix<f64>, dim: usize) -> Result<()> {
    if w.nrows() != dim || w.ncols() != dim {
        return Err(Error::DimensionMismatch {
            context,
            expected: dim,
            actual: w.nrows(),
        });
    }
    Ok(())
}

/// Solve the weighted LS float problem in [B C] for (p_u, k).
///
/// The full (N+2) x (N+2) normal matrix is factorized once; the solution and
/// the covariance blocks both come from that factorization.
pub fn solve_float_rtk(obs: &DdObservations, w1: &DMatrix<f64>) -> Result<FloatSolution> {
    let m = obs.len();
    let rows = 2 * m;
    check_spd_dims("solve_float_rtk weight matrix", w1, rows)?;
    let dim = 3 + m;

    // Stacked design [B C].
    let mut design = DMatrix::zeros(rows, dim);
    design.view_mut((0, 0), (rows, 3)).copy_from(&obs.design_pos);
    design.view_mut((0, 3), (rows, m)).copy_from(&obs.design_amb);

    let wd = w1 * &design;
    let normal = design.transpose() * &wd;
    let rhs = wd.transpose() * (obs.y1() + &obs.offset);

    // Deterministic singularity detection before factorizing.
    let eig = normal.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min_ev = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    let rcond = if max_ev > 0.0 { min_ev / max_ev } else { 0.0 };
    if !(rcond > RCOND_MIN) {
        return Err(Error::RankDeficient { dim, rcond });
    }

    let chol = normal
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let solution = chol.solve(&rhs);
    let cov = chol.inverse();

    Ok(FloatSolution {
        position: Vector3::new(solution[0], solution[1], solution[2]),
        ambiguities: solution.rows(3, m).into_owned(),
        cov_position: cov.fixed_view::<3, 3>(0, 0).into_owned(),
        cov_ambiguities: cov.view((3, 3), (m, m)).into_owned(),
        cov_cross: cov.view((0, 3), (3, m)).into_owned(),
    })
}

/// LS position conditioned on a given ambiguity vector, with its covariance:
/// p(k) = p_hat - Q_pk Q_k^-1 (k_hat - k).
pub fn conditional_solution(
    float: &FloatSolution,
    k: &DVector<f64>,
) -> Result<(Vector3<f64>, Matrix3<f64>)> {
    let m = float.ambiguities.len();
    if k.len() != m {
        return Err(Error::DimensionMismatch {
            context: "conditional_solution ambiguity vector",
            expected: m,
            actual: k.len(),
        });
    }
    let chol = float
        .cov_ambiguities
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let dk = &float.ambiguities - k;
    let qk_inv_dk = chol.solve(&dk);
    let correction = &float.cov_cross * qk_inv_dk;
    let position = float.position - Vector3::new(correction[0], correction[1], correction[2]);

    let qk_inv_qkp = chol.solve(&float.cov_cross.transpose());
    let correction = &float.cov_cross * qk_inv_qkp;
    let mut cov = float.cov_position;
    for i in 0..3 {
        for j in 0..3 {
            cov[(i, j)] -= correction[(i, j)];
        }
    }
    Ok((position, cov))
}

/// Split the quadratic cost ||y1 - B p - C k + b||^2_W1 into the float
/// residual, the ambiguity term, and the conditional-position term.
pub fn cost_decomposition(
    obs: &DdObservations,
    w1: &DMatrix<f64>,
    float: &FloatSolution,
    k: &DVector<f64>,
    p: &Vector3<f64>,
) -> Result<(f64, f64, f64)> {
    let m = obs.len();
    check_spd_dims("cost_decomposition weight matrix", w1, 2 * m)?;

    let residual_float =
        obs.y1() - &obs.design_pos * float.position - &obs.design_amb * &float.ambiguities
            + &obs.offset;
    let term1 = quad_form(w1, &residual_float);

    let dk = &float.ambiguities - k;
    let chol_k = float
        .cov_ambiguities
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let term2 = dk.dot(&chol_k.solve(&dk));

    let (p_cond, q_cond) = conditional_solution(float, k)?;
    let dp = p_cond - p;
    let chol_p = q_cond
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let term3 = dp.dot(&chol_p.solve(&dp));

    Ok((term1, term2, term3))
}

/// Directly evaluated quadratic cost ||y1 - B p - C k + b||^2_W1.
pub fn direct_cost(
    obs: &DdObservations,
    w1: &DMatrix<f64>,
    k: &DVector<f64>,
    p: &Vector3<f64>,
) -> f64 {
    let r = obs.y1() - &obs.design_pos * *p - &obs.design_amb * k + &obs.offset;
    quad_form(w1, &r)
}
