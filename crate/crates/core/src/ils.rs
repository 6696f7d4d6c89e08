//! Integer least squares in the LAMBDA style.
//!
//! Factors the ambiguity covariance as Q = L^T D L, decorrelates it with an
//! integer unimodular transform Z (alternating integer Gauss reductions and
//! symmetric permutations), and enumerates the minimizers of
//! ||k_hat - k||^2_{Q^-1} with a shrinking-ellipsoid depth-first search.
//! A brute-force box enumeration serves as the exactness oracle.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Maximum dimension accepted by [`brute_force_ils`].
const BRUTE_FORCE_MAX_DIM: usize = 6;

/// Result of the integer decorrelation of an SPD matrix.
#[derive(Debug, Clone)]
pub struct Decorrelation {
    /// Unimodular transform; the transformed matrix is Z^T Q Z.
    pub z: DMatrix<i64>,
    /// Inverse transpose of `z`, accumulated exactly; maps decorrelated
    /// integer vectors back to the original coordinates.
    pub z_inv_t: DMatrix<i64>,
    /// Z^T Q Z.
    pub q_transformed: DMatrix<f64>,
    /// Unit lower-triangular factor of `q_transformed`.
    pub l: DMatrix<f64>,
    /// Positive diagonal factor of `q_transformed`.
    pub d: DVector<f64>,
}

/// An integer candidate with its quadratic cost.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub ambiguities: DVector<i64>,
    pub cost: f64,
}

/// Factor an SPD matrix as Q = L^T D L with L unit lower triangular and D
/// diagonal positive. Only the lower triangle of Q is read.
pub fn ltdl(q: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = q.nrows();
    if q.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "ltdl input",
            expected: n,
            actual: q.ncols(),
        });
    }
    let mut work = q.clone();
    let mut l = DMatrix::zeros(n, n);
    let mut d = DVector::zeros(n);
    for i in (0..n).rev() {
        let pivot = work[(i, i)];
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: i });
        }
        d[i] = pivot;
        let sd = pivot.sqrt();
        for j in 0..=i {
            l[(i, j)] = work[(i, j)] / sd;
        }
        for j in 0..i {
            for k in 0..=j {
                work[(j, k)] -= l[(i, k)] * l[(i, j)];
            }
        }
        let diag = l[(i, i)];
        for j in 0..=i {
            l[(i, j)] /= diag;
        }
    }
    Ok((l, d))
}

/// Decorrelate an SPD matrix with integer Gauss transformations and symmetric
/// permutations until no off-diagonal reduction or advantageous swap remains.
pub fn decorrelate(q: &DMatrix<f64>) -> Result<Decorrelation> {
    let n = q.nrows();
    let (mut l, mut d) = ltdl(q)?;
    let mut z = DMatrix::<i64>::identity(n, n);
    let mut z_inv_t = DMatrix::<i64>::identity(n, n);

    if n >= 2 {
        let mut reduce_from = n - 2;
        let mut swapped = true;
        while swapped {
            swapped = false;
            let mut i = n - 1;
            while !swapped && i > 0 {
                i -= 1;
                if i <= reduce_from {
                    for j in i + 1..n {
                        let mu = l[(j, i)].round();
                        if mu != 0.0 {
                            for r in j..n {
                                l[(r, i)] -= mu * l[(r, j)];
                            }
                            let mu_i = mu as i64;
                            for r in 0..n {
                                // Z gets the column operation, its inverse
                                // transpose the complementary one.
                                z[(r, i)] -= mu_i * z[(r, j)];
                                z_inv_t[(r, j)] += mu_i * z_inv_t[(r, i)];
                            }
                        }
                    }
                }
                let delta = d[i] + l[(i + 1, i)].powi(2) * d[i + 1];
                if delta < d[i + 1] {
                    let lam = d[i + 1] * l[(i + 1, i)] / delta;
                    let eta = d[i] / delta;
                    d[i] = eta * d[i + 1];
                    d[i + 1] = delta;
                    for c in 0..i {
                        let a = l[(i, c)];
                        let b = l[(i + 1, c)];
                        l[(i, c)] = -l[(i + 1, i)] * a + b;
                        l[(i + 1, c)] = eta * a + lam * b;
                    }
                    l[(i + 1, i)] = lam;
                    for r in i + 2..n {
                        l.swap((r, i), (r, i + 1));
                    }
                    for r in 0..n {
                        z.swap((r, i), (r, i + 1));
                        z_inv_t.swap((r, i), (r, i + 1));
                    }
                    reduce_from = i;
                    swapped = true;
                }
            }
        }
    }

    let z_f = z.map(|v| v as f64);
    let q_transformed = z_f.transpose() * q * &z_f;
    Ok(Decorrelation {
        z,
        z_inv_t,
        q_transformed,
        l,
        d,
    })
}

fn lex_less(a: &DVector<i64>, b: &DVector<i64>) -> bool {
    for i in 0..a.len() {
        if a[i] != b[i] {
            return a[i] < b[i];
        }
    }
    false
}

struct BestSet {
    capacity: usize,
    entries: Vec<Candidate>,
}

impl BestSet {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::with_capacity(capacity + 1),
        }
    }

    fn bound(&self) -> f64 {
        if self.entries.len() < self.capacity {
            f64::INFINITY
        } else {
            self.entries.last().unwrap().cost
        }
    }

    fn offer(&mut self, cand: Candidate) {
        let pos = self
            .entries
            .partition_point(|e| {
                e.cost < cand.cost
                    || (e.cost == cand.cost && lex_less(&e.ambiguities, &cand.ambiguities))
            });
        self.entries.insert(pos, cand);
        if self.entries.len() > self.capacity {
            self.entries.pop();
        }
    }
}

/// Distance-ordered enumeration of integers around a real center:
/// round(c), then alternating outward.
struct IntSpiral {
    current: i64,
    step: i64,
}

impl IntSpiral {
    fn start(center: f64) -> Self {
        let first = center.round();
        let step = if center - first >= 0.0 { 1 } else { -1 };
        Self {
            current: first as i64,
            step,
        }
    }

    fn advance(&mut self) {
        self.current += self.step;
        self.step = -self.step - self.step.signum();
    }
}

/// Find the `n_best` integer vectors minimizing ||k_hat - k||^2_{Q^-1},
/// ascending by cost; exact ties broken by lexicographic order of the vector.
pub fn search(k_hat: &DVector<f64>, q: &DMatrix<f64>, n_best: usize) -> Result<Vec<Candidate>> {
    let n = k_hat.len();
    if q.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "search covariance",
            expected: n,
            actual: q.nrows(),
        });
    }
    if n == 0 || n_best == 0 {
        return Ok(Vec::new());
    }
    let dec = decorrelate(q)?;
    let z_f = dec.z.map(|v| v as f64);
    let z_hat = z_f.transpose() * k_hat;

    let mut best = BestSet::new(n_best);
    let mut choice = vec![0i64; n];
    let mut residual = vec![0.0f64; n];
    dfs(
        n - 1,
        &dec,
        &z_hat,
        0.0,
        &mut choice,
        &mut residual,
        &mut best,
    );
    Ok(best.entries)
}

fn dfs(
    level: usize,
    dec: &Decorrelation,
    z_hat: &DVector<f64>,
    partial: f64,
    choice: &mut Vec<i64>,
    residual: &mut Vec<f64>,
    best: &mut BestSet,
) {
    let n = z_hat.len();
    // Conditional estimate of this level given the levels above it.
    let mut cond = z_hat[level];
    for j in level + 1..n {
        cond -= dec.l[(j, level)] * residual[j];
    }
    let mut spiral = IntSpiral::start(cond);
    loop {
        let v = cond - spiral.current as f64;
        let node_cost = partial + v * v / dec.d[level];
        if node_cost > best.bound() {
            // Enumeration is distance ordered, so every later value of this
            // level only costs more.
            return;
        }
        choice[level] = spiral.current;
        residual[level] = v;
        if level == 0 {
            let z_vec = DVector::from_iterator(n, choice.iter().cloned());
            let k = &dec.z_inv_t * &z_vec;
            best.offer(Candidate {
                ambiguities: k,
                cost: node_cost,
            });
        } else {
            dfs(level - 1, dec, z_hat, node_cost, choice, residual, best);
        }
        spiral.advance();
    }
}

/// Exhaustive ILS over the integer box round(k_hat) +/- radius. Exact and
/// independent of the decorrelated search; dimensions above 6 are rejected.
pub fn brute_force_ils(
    k_hat: &DVector<f64>,
    q: &DMatrix<f64>,
    radius: i64,
) -> Result<DVector<i64>> {
    let n = k_hat.len();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::SearchTooLarge {
            dim: n,
            max: BRUTE_FORCE_MAX_DIM,
        });
    }
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "brute_force_ils covariance",
            expected: n,
            actual: q.nrows(),
        });
    }
    let chol = q
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let center: Vec<i64> = k_hat.iter().map(|v| v.round() as i64).collect();
    let width = 2 * radius + 1;
    let total = (width as u64).pow(n as u32);

    let mut best_k: Option<DVector<i64>> = None;
    let mut best_cost = f64::INFINITY;
    for idx in 0..total {
        let mut rem = idx;
        let mut k = DVector::zeros(n);
        for i in 0..n {
            k[i] = center[i] - radius + (rem % width as u64) as i64;
            rem /= width as u64;
        }
        let diff = DVector::from_iterator(n, (0..n).map(|i| k_hat[i] - k[i] as f64));
        let cost = diff.dot(&chol.solve(&diff));
        let better = cost < best_cost
            || (cost == best_cost
                && best_k.as_ref().map(|b| lex_less(&k, b)).unwrap_or(true));
        if better {
            best_cost = cost;
            best_k = Some(k);
        }
    }
    Ok(best_k.expect("box enumeration is never empty"))
}
