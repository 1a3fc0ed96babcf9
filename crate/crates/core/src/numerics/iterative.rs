//! Deterministic iterative estimators: dominant eigenvalue modulus and
//! operator 2-norm.
//!
//! Both estimators use a fixed start-vector policy (all ones, then an
//! alternating +-1 vector, then basis vectors if an iterate collapses to
//! zero), so results are reproducible without consuming any experiment RNG
//! state.
//!
//! The spectral radius run fits the most recent power iterates to a linear
//! recurrence `A^m v = b_{m-1} A^{m-1} v + ... + b_0 v` of order up to four
//! and reads the estimate off the maximum root modulus of
//! `x^m - b_{m-1} x^{m-1} - ... - b_0`. The fit is exact whenever at most
//! `m` modes survive, which covers complex-conjugate dominant pairs, small
//! Jordan blocks, and clusters of up to four near-tied eigenvalue moduli,
//! exactly the cases where plain norm-growth ratios oscillate or crawl. The
//! order degrades automatically (4 -> 3 -> 2 -> 1) as the iterates collapse
//! onto a lower-dimensional dominant subspace.

use crate::error::{Error, Result};
use crate::numerics::matrix::{dot, DenseMatrix, DenseVector};

/// Default relative tolerance for the iterative estimators.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default iteration cap for the iterative estimators.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Maximum recurrence order of the spectral-radius fit.
const FIT_ORDER: usize = 4;
/// Elimination pivots of the (cosine-scaled) fit system below this mean the
/// iterates span fewer directions; the fit order degrades.
const FIT_PIVOT_EPS: f64 = 1e-6;

enum RunOutcome {
    Converged(f64),
    /// The iterate became exactly zero: this start vector lives in a subspace
    /// annihilated by some power of the matrix.
    Collapsed,
    Stalled(f64),
}

/// Geometric-sequence stopping rule: accepts once the step-to-step change,
/// extrapolated by the observed contraction ratio, falls under `tol`
/// relative to the current estimate, twice in a row.
struct StopRule {
    tol: f64,
    est_prev: f64,
    delta_prev: Option<f64>,
    hits: usize,
}

impl StopRule {
    fn new(tol: f64, first_est: f64) -> Self {
        Self {
            tol,
            est_prev: first_est,
            delta_prev: None,
            hits: 0,
        }
    }

    fn push(&mut self, est: f64) -> bool {
        let delta = (est - self.est_prev).abs();
        let q = if delta == 0.0 {
            0.0
        } else {
            match self.delta_prev {
                Some(dp) if dp > 0.0 => (delta / dp).clamp(0.0, 0.995),
                _ => 0.995,
            }
        };
        let threshold = self.tol * est.abs().max(f64::MIN_POSITIVE) * (1.0 - q);
        if delta <= threshold {
            self.hits += 1;
        } else {
            self.hits = 0;
        }
        self.est_prev = est;
        self.delta_prev = Some(delta);
        self.hits >= 2
    }
}

fn start_vector(k: usize, n: usize) -> DenseVector {
    let data = match k {
        0 => vec![1.0; n],
        1 => (0..n)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect(),
        _ => {
            let mut v = vec![0.0; n];
            v[k - 2] = 1.0;
            v
        }
    };
    DenseVector::from_raw(data)
}

fn normalized(v: &DenseVector) -> Option<(DenseVector, f64)> {
    let norm = v.norm2();
    if norm == 0.0 {
        return None;
    }
    let scaled = v.as_slice().iter().map(|x| x / norm).collect();
    Some((DenseVector::from_raw(scaled), norm))
}

fn check_iteration_args(tol: f64, max_iter: usize) -> Result<()> {
    let tol_ok = tol.is_finite() && tol > 0.0;
    if !tol_ok {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be a positive finite number, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument(
            "max_iter must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Runs converged estimates from the fixed start policy through `run`,
/// combining the first two informative starts by maximum (both schemes only
/// ever under-estimate once converged).
fn drive_starts(
    n: usize,
    max_iter: usize,
    mut run: impl FnMut(DenseVector) -> RunOutcome,
) -> Result<f64> {
    let mut best: Option<f64> = None;
    let mut stalled: Option<f64> = None;
    let mut informative = 0;
    for k in 0..n + 2 {
        match run(start_vector(k, n)) {
            RunOutcome::Converged(est) => {
                best = Some(best.map_or(est, |b: f64| b.max(est)));
                informative += 1;
            }
            RunOutcome::Stalled(est) => {
                stalled = Some(est);
                informative += 1;
            }
            RunOutcome::Collapsed => continue,
        }
        if informative == 2 {
            break;
        }
    }
    match (best, stalled) {
        (Some(est), _) => Ok(est),
        (None, Some(last_estimate)) => Err(Error::NonConvergence {
            max_iter,
            last_estimate,
        }),
        // Every start vector was eventually annihilated: nilpotent matrix.
        (None, None) => Ok(0.0),
    }
}

/// Estimates the spectral radius (maximum eigenvalue modulus) of a square
/// matrix to relative tolerance `tol`.
pub fn spectral_radius(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "spectral radius of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    check_iteration_args(tol, max_iter)?;
    let n = a.rows();
    drive_starts(n, max_iter, |v0| spectral_radius_run(a, v0, tol, max_iter))
}

/// Ring of the most recent `FIT_ORDER + 1` normalized power iterates,
/// their step scales (`A u_{i-1} = s_i u_i`), and all pairwise cosines.
struct IterateWindow {
    units: Vec<DenseVector>,
    scales: Vec<f64>,
    cosines: Vec<Vec<f64>>,
}

impl IterateWindow {
    fn new(u0: DenseVector) -> Self {
        Self {
            units: vec![u0],
            scales: Vec::new(),
            cosines: vec![vec![1.0]],
        }
    }

    fn len(&self) -> usize {
        self.units.len()
    }

    fn push(&mut self, u: DenseVector, scale: f64) {
        if self.units.len() == FIT_ORDER + 1 {
            self.units.remove(0);
            self.scales.remove(0);
            self.cosines.remove(0);
            for row in &mut self.cosines {
                row.remove(0);
            }
        }
        let mut row: Vec<f64> = self
            .units
            .iter()
            .map(|v| dot(v.as_slice(), u.as_slice()))
            .collect();
        row.push(1.0);
        for (i, r) in self.cosines.iter_mut().enumerate() {
            r.push(row[i]);
        }
        self.cosines.push(row);
        self.units.push(u);
        self.scales.push(scale);
    }

    /// Fits the highest-order recurrence the iterates support and returns the
    /// maximum root modulus of its characteristic polynomial.
    fn estimate(&self) -> f64 {
        let latest = self.len() - 1;
        let top = FIT_ORDER.min(latest);
        for order in (2..=top).rev() {
            if let Some(est) = self.fit(order) {
                return est;
            }
        }
        // Order-1 fallback: plain growth ratio.
        self.scales[latest - 1]
    }

    /// Order-`m` fit on the last `m + 1` iterates; `None` when they span
    /// fewer than `m` directions (degenerate system).
    fn fit(&self, m: usize) -> Option<f64> {
        let latest = self.len() - 1;
        let t0 = latest - m;
        // Solve C beta = d on unit iterates, then undo the scale products:
        // b_k = beta_k * (sigma_latest / sigma_{t0+k}), where sigma ratios
        // are products of the step scales in between.
        let mut c = vec![vec![0.0; m]; m];
        let mut d = vec![0.0; m];
        for j in 0..m {
            c[j].copy_from_slice(&self.cosines[t0 + j][t0..t0 + m]);
            d[j] = self.cosines[t0 + j][latest];
        }
        let beta = solve_small(&mut c, &mut d)?;

        let mut coeffs = vec![0.0; m];
        for (k, &b) in beta.iter().enumerate() {
            let mut scale_ratio = 1.0;
            for i in (t0 + k)..latest {
                scale_ratio *= self.scales[i];
            }
            coeffs[k] = b * scale_ratio;
        }
        let est = max_root_modulus(&coeffs);
        est.is_finite().then_some(est)
    }
}

/// Gaussian elimination with partial pivoting on a small system; `None` when
/// a pivot falls under the degeneracy threshold.
fn solve_small(c: &mut [Vec<f64>], d: &mut [f64]) -> Option<Vec<f64>> {
    let m = d.len();
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&i, &j| c[i][col].abs().partial_cmp(&c[j][col].abs()).unwrap())?;
        if c[pivot_row][col].abs() < FIT_PIVOT_EPS {
            return None;
        }
        c.swap(col, pivot_row);
        d.swap(col, pivot_row);
        let pivot = c[col].clone();
        for row in 0..m {
            if row == col {
                continue;
            }
            let factor = c[row][col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (slot, &p) in c[row].iter_mut().zip(&pivot).skip(col) {
                *slot -= factor * p;
            }
            d[row] -= factor * d[col];
        }
    }
    Some((0..m).map(|i| d[i] / c[i][i]).collect())
}

/// Maximum root modulus of `x^m - coeffs[m-1] x^{m-1} - ... - coeffs[0]`,
/// by Durand-Kerner iteration in complex arithmetic.
fn max_root_modulus(coeffs: &[f64]) -> f64 {
    let m = coeffs.len();
    if m == 1 {
        return coeffs[0].abs();
    }
    // p(z) = z^m - sum coeffs[k] z^k, evaluated by Horner on the monic form.
    let eval = |z: (f64, f64)| {
        let mut acc = (1.0, 0.0);
        for k in (0..m).rev() {
            acc = cmul(acc, z);
            acc.0 -= coeffs[k];
        }
        acc
    };
    let seed = (0.4, 0.9);
    let mut roots: Vec<(f64, f64)> = Vec::with_capacity(m);
    let mut power = seed;
    for _ in 0..m {
        roots.push(power);
        power = cmul(power, seed);
    }
    for _ in 0..200 {
        let mut max_step = 0.0_f64;
        for k in 0..m {
            let mut denom = (1.0, 0.0);
            for j in 0..m {
                if j != k {
                    denom = cmul(denom, csub(roots[k], roots[j]));
                }
            }
            let step = cdiv(eval(roots[k]), denom);
            roots[k] = csub(roots[k], step);
            max_step = max_step.max(cabs(step));
        }
        if max_step <= 1e-14 {
            break;
        }
    }
    roots.iter().map(|&r| cabs(r)).fold(0.0, f64::max)
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let denom = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / denom, (a.1 * b.0 - a.0 * b.1) / denom)
}

fn cabs(a: (f64, f64)) -> f64 {
    a.0.hypot(a.1)
}

fn spectral_radius_run(a: &DenseMatrix, v0: DenseVector, tol: f64, max_iter: usize) -> RunOutcome {
    let Some((u0, _)) = normalized(&v0) else {
        return RunOutcome::Collapsed;
    };
    let mut window = IterateWindow::new(u0);
    let mut stop: Option<StopRule> = None;
    let mut last = 0.0;
    for _ in 1..=max_iter {
        let w = a
            .matvec(&window.units[window.len() - 1])
            .expect("square matvec");
        let Some((u_next, s_next)) = normalized(&w) else {
            return RunOutcome::Collapsed;
        };
        window.push(u_next, s_next);
        if window.len() < 3 {
            continue;
        }
        let mut est = window.estimate();
        if !est.is_finite() {
            est = s_next;
        }
        let converged = match stop.as_mut() {
            None => {
                stop = Some(StopRule::new(tol, est));
                false
            }
            Some(rule) => rule.push(est),
        };
        if converged {
            return RunOutcome::Converged(est);
        }
        last = est;
    }
    RunOutcome::Stalled(last)
}

/// Estimates the operator 2-norm (largest singular value) of a matrix via
/// power iteration on the implicit Gram matrix `A^T A`, which is symmetric
/// positive semidefinite.
pub fn operator_norm_2(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    check_iteration_args(tol, max_iter)?;
    let n = a.cols();
    drive_starts(n, max_iter, |v0| operator_norm_run(a, v0, tol, max_iter))
}

fn operator_norm_run(a: &DenseMatrix, v0: DenseVector, tol: f64, max_iter: usize) -> RunOutcome {
    let Some((mut u, _)) = normalized(&v0) else {
        return RunOutcome::Collapsed;
    };
    let mut stop: Option<StopRule> = None;
    let mut last = 0.0;
    for _ in 1..=max_iter {
        let w = a.matvec(&u).expect("matvec dims checked by caller");
        // |A u| with |u| = 1 is the square root of the Gram Rayleigh quotient.
        let sigma = w.norm2();
        if sigma == 0.0 {
            return RunOutcome::Collapsed;
        }
        let z = a.matvec_transpose(&w).expect("matvec dims checked by caller");
        let (z_unit, _) = normalized(&z).expect("A^T A u vanishes only with A u");
        u = z_unit;

        let converged = match stop.as_mut() {
            None => {
                stop = Some(StopRule::new(tol, sigma));
                false
            }
            Some(rule) => rule.push(sigma),
        };
        if converged {
            return RunOutcome::Converged(sigma);
        }
        last = sigma;
    }
    RunOutcome::Stalled(last)
}
