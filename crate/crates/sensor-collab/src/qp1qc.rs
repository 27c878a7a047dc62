//! KKT-based solver for quadratic programs with a single quadratic
//! constraint:
//!
//! ```text
//!     minimize    w' A0 w + 2 b0' w
//!     subject to  w' A1 w + 2 b1' w + r1 <= 0,
//! ```
//!
//! with `A0` positive definite, `A1` an arbitrary symmetric matrix and
//! `r1 > 0`. The instance is diagonalized through `A0^{-1/2}` and solved by
//! collecting the positive roots of the scalar secular equation in the dual
//! variable, plus the unconstrained branch when it is feasible.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::inv_sqrt_pd;

#[derive(Debug, Clone)]
pub struct Qp1qcInstance {
    pub a0: DMatrix<f64>,
    pub b0: DVector<f64>,
    pub a1: DMatrix<f64>,
    pub b1: DVector<f64>,
    pub r1: f64,
}

/// Diagonalized secular problem: `lambda`, `g` and `e` are the transformed
/// constraint spectrum, linear objective term and linear constraint term.
#[derive(Debug, Clone)]
pub struct SecularProblem {
    pub lambda: DVector<f64>,
    pub g: DVector<f64>,
    pub e: DVector<f64>,
}

/// Root-search configuration for the secular equation.
#[derive(Debug, Clone)]
pub struct RootSearchConfig {
    /// Points per geometric scan interval.
    pub grid_points: usize,
    /// Scan span beyond the negative-eigenvalue pole, in multiples of the
    /// pole location.
    pub span_factor: f64,
    /// Bisection/Newton iteration cap per bracket.
    pub max_refine_iters: usize,
}

impl Default for RootSearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 64,
            span_factor: 1e4,
            max_refine_iters: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Qp1qcSolution {
    pub w: DVector<f64>,
    pub mu: f64,
    pub objective: f64,
    /// Set when the degenerate hard case forced a perturbation of the
    /// transformed linear term.
    pub perturbed: bool,
}

impl SecularProblem {
    /// The dual-variable secular function whose positive roots are the KKT
    /// candidates with an active constraint.
    pub fn eval(&self, mu: f64) -> f64 {
        let mut acc = 1.0;
        for i in 0..self.lambda.len() {
            let lam = self.lambda[i];
            let den = mu * lam + 1.0;
            let num = mu * self.e[i] + self.g[i];
            acc += lam * num * num / (den * den) - 2.0 * self.e[i] * num / den;
        }
        acc
    }

    /// Residual scale used for the root tolerance.
    fn scale(&self) -> f64 {
        1.0 + self
            .lambda
            .iter()
            .zip(self.g.iter())
            .map(|(l, g)| (l * g * g).abs())
            .sum::<f64>()
    }

    fn poles(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self
            .lambda
            .iter()
            .filter(|&&l| l < 0.0)
            .map(|&l| -1.0 / l)
            .collect();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p
    }
}

/// Collects the positive roots of the secular equation.
///
/// Structure of the search follows the spectrum: on `(0, first pole)` the
/// function is monotone when exactly one eigenvalue is negative, so a single
/// bracketed root suffices there; past the pole a geometric grid scan picks
/// up the remaining sign changes. With no negative eigenvalue the function
/// is strictly decreasing and a single expanding bracket finds the root.
pub fn secular_positive_roots(sp: &SecularProblem, config: &RootSearchConfig) -> Vec<f64> {
    if sp.lambda.iter().all(|&l| l == 0.0) {
        return Vec::new();
    }
    let tol = 1e-9 * sp.scale();
    let mut roots: Vec<f64> = Vec::new();
    let poles = sp.poles();

    if poles.is_empty() {
        // Strictly decreasing for mu > 0; expand until a sign change.
        let f0 = sp.eval(0.0);
        if f0 <= 0.0 {
            return roots;
        }
        let mut hi = 1.0;
        let mut found = false;
        for _ in 0..200 {
            if sp.eval(hi) <= 0.0 {
                found = true;
                break;
            }
            hi *= 2.0;
        }
        if found {
            if let Some(r) = refine_root(sp, hi / 2.0, hi, tol, config.max_refine_iters) {
                roots.push(r);
            } else if let Some(r) = refine_root(sp, 0.0, hi, tol, config.max_refine_iters) {
                roots.push(r);
            }
        }
        return roots;
    }

    // Interval before the first pole.
    let p1 = poles[0];
    let pad = p1 * 1e-9;
    scan_interval(sp, 1e-12 * p1, p1 - pad, config.grid_points, tol, config, &mut roots);

    // Intervals between consecutive poles, then beyond the last one.
    for win in poles.windows(2) {
        let (a, b) = (win[0], win[1]);
        let pad = (b - a) * 1e-9;
        scan_interval(sp, a + pad, b - pad, config.grid_points, tol, config, &mut roots);
    }
    let last = *poles.last().unwrap();
    scan_interval(
        sp,
        last * (1.0 + 1e-6),
        last * config.span_factor,
        config.grid_points,
        tol,
        config,
        &mut roots,
    );

    // Drop candidates hugging a pole.
    roots.retain(|&r| poles.iter().all(|&p| (r - p).abs() > 1e-9 * p.max(1.0)));
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    roots
}

/// Geometric grid over `(lo, hi)`, bracketing every sign change.
fn scan_interval(
    sp: &SecularProblem,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
    config: &RootSearchConfig,
    roots: &mut Vec<f64>,
) {
    if !(hi > lo && lo > 0.0) {
        return;
    }
    let ratio = (hi / lo).powf(1.0 / (points as f64 - 1.0));
    let mut prev_x = lo;
    let mut prev_f = sp.eval(lo);
    for k in 1..points {
        let x = lo * ratio.powi(k as i32);
        let f = sp.eval(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * f < 0.0 {
            if let Some(r) = refine_root(sp, prev_x, x, tol, config.max_refine_iters) {
                roots.push(r);
            }
        }
        prev_x = x;
        prev_f = f;
    }
}

/// Bisection with a Newton polish on a sign-changing bracket.
fn refine_root(sp: &SecularProblem, mut lo: f64, mut hi: f64, tol: f64, max_iters: usize) -> Option<f64> {
    let mut flo = sp.eval(lo);
    let fhi = sp.eval(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo * fhi > 0.0 {
        return None;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_iters {
        mid = 0.5 * (lo + hi);
        let fm = sp.eval(mid);
        if fm.abs() <= tol || (hi - lo) <= 1e-15 * hi.max(1.0) {
            return Some(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Some(mid)
}

/// Solves the QP1QC by enumerating KKT candidates.
pub fn solve_qp1qc(inst: &Qp1qcInstance, config: &RootSearchConfig) -> Result<Qp1qcSolution> {
    let l = inst.a0.nrows();
    if inst.b0.len() != l || inst.b1.len() != l || inst.a1.nrows() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            got: inst.b0.len(),
        });
    }
    if inst.r1 == 0.0 && inst.b1.amax() == 0.0 {
        return Err(Error::Degenerate("r1 = 0 with b1 = 0".into()));
    }
    if inst.r1 <= 0.0 {
        return Err(Error::Degenerate(format!(
            "constraint constant r1 = {} must be positive",
            inst.r1
        )));
    }

    let a0_is = inv_sqrt_pd(&inst.a0, "QP1QC objective matrix")?;
    let p = (&a0_is * &inst.a1 * &a0_is) / inst.r1;
    let eig = p.symmetric_eigen();
    let u_mat = eig.eigenvectors;
    let lambda = eig.eigenvalues;

    let mut g = u_mat.transpose() * &a0_is * &inst.b0;
    let e = u_mat.transpose() * &a0_is * &inst.b1 / inst.r1;

    // Hard case: the transformed linear term vanishes along the negative
    // eigendirection, which degenerates the secular equation. Perturb and
    // record a diagnostic.
    let mut perturbed = false;
    let neg_count = lambda.iter().filter(|&&x| x < 0.0).count();
    if neg_count == 1 && e.amax() == 0.0 {
        let i = (0..l).find(|&i| lambda[i] < 0.0).unwrap();
        if g[i].abs() < 1e-10 * g.norm().max(1.0) {
            g[i] += 1e-8 * g.norm().max(1.0);
            perturbed = true;
        }
    }

    let sp = SecularProblem {
        lambda: lambda.clone(),
        g: g.clone(),
        e: e.clone(),
    };

    let constraint_scale = 1e-7 * (1.0 + inst.r1.abs());
    let mut candidates: Vec<(f64, DVector<f64>)> = Vec::new();

    // mu = 0 branch: unconstrained minimizer, kept only if feasible.
    let u0 = -g.clone();
    if transformed_constraint(&sp, &u0) <= constraint_scale / inst.r1 {
        candidates.push((0.0, u0));
    }

    for mu in secular_positive_roots(&sp, config) {
        let mut u = DVector::zeros(l);
        let mut ok = true;
        for i in 0..l {
            let den = 1.0 + mu * lambda[i];
            if den.abs() < 1e-12 {
                ok = false;
                break;
            }
            u[i] = -(g[i] + mu * e[i]) / den;
        }
        if !ok {
            continue;
        }
        if transformed_constraint(&sp, &u) <= constraint_scale / inst.r1 {
            candidates.push((mu, u));
        }
    }

    if candidates.is_empty() {
        return Err(Error::SolverFailure(format!(
            "no KKT candidate satisfies the constraint (f(0) = {}, {} negative eigenvalues)",
            sp.eval(0.0),
            neg_count
        )));
    }

    // Pick the candidate with the smallest objective; break near-ties by
    // the smaller multiplier.
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for (mu, u) in candidates {
        let obj = (u.transpose() * &u)[(0, 0)] + 2.0 * u.dot(&g);
        match &best {
            Some((bobj, bmu, _)) if obj > bobj - 1e-9 && (obj > bobj + 1e-9 || mu >= *bmu) => {}
            _ => best = Some((obj, mu, u)),
        }
    }
    let (_, mu, u) = best.unwrap();

    let w = &a0_is * &u_mat * &u;
    let objective = (w.transpose() * &inst.a0 * &w)[(0, 0)] + 2.0 * inst.b0.dot(&w);

    // Stationarity residual of the KKT system; `mu` multiplies the
    // constraint scaled by 1/r1, matching the diagonalization above.
    let ms = mu / inst.r1;
    let resid = (&inst.a0 * &w + &inst.a1 * &w * ms + &inst.b0 + &inst.b1 * ms).norm();
    let scale =
        (inst.a0.norm() + ms * inst.a1.norm()) * w.norm() + inst.b0.norm() + ms * inst.b1.norm();
    if resid > 1e-6 * scale.max(1.0) {
        return Err(Error::SolverFailure(format!(
            "stationarity residual {resid} exceeds tolerance (mu = {mu})"
        )));
    }

    Ok(Qp1qcSolution {
        w,
        mu,
        objective,
        perturbed,
    })
}

fn transformed_constraint(sp: &SecularProblem, u: &DVector<f64>) -> f64 {
    let mut acc = 1.0;
    for i in 0..u.len() {
        acc += sp.lambda[i] * u[i] * u[i] + 2.0 * sp.e[i] * u[i];
    }
    acc
}

/// Constraint value of the original instance at `w`.
pub fn constraint_value(inst: &Qp1qcInstance, w: &DVector<f64>) -> f64 {
    (w.transpose() * &inst.a1 * w)[(0, 0)] + 2.0 * inst.b1.dot(w) + inst.r1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> RootSearchConfig {
        RootSearchConfig::default()
    }

    #[test]
    fn secular_roots_hand_cases() {
        // f(mu) = -g^2 / (1 - mu)^2 + 1 with g = 0.5: roots 0.5 and 1.5.
        let sp = SecularProblem {
            lambda: dvector![-1.0],
            g: dvector![0.5],
            e: dvector![0.0],
        };
        let roots = secular_positive_roots(&sp, &cfg());
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0], 0.5, epsilon = 1e-8);
        assert_relative_eq!(roots[1], 1.5, epsilon = 1e-8);

        // All-positive spectrum with f > 0 everywhere: no root.
        let sp = SecularProblem {
            lambda: dvector![2.0],
            g: dvector![1.0],
            e: dvector![0.0],
        };
        assert!(secular_positive_roots(&sp, &cfg()).is_empty());

        // lambda = -4, g = 1: f(0) < 0, the only root lies past the pole.
        let sp = SecularProblem {
            lambda: dvector![-4.0],
            g: dvector![1.0],
            e: dvector![0.0],
        };
        let roots = secular_positive_roots(&sp, &cfg());
        assert_eq!(roots.len(), 1);
        assert_relative_eq!(roots[0], 0.75, epsilon = 1e-8);
    }

    #[test]
    fn qp1qc_inactive_constraint() {
        // min w^2 - 4w subject to w^2 >= 1: unconstrained optimum w = 2 is
        // feasible.
        let inst = Qp1qcInstance {
            a0: dmatrix![1.0],
            b0: dvector![-2.0],
            a1: dmatrix![-1.0],
            b1: dvector![0.0],
            r1: 1.0,
        };
        let sol = solve_qp1qc(&inst, &cfg()).unwrap();
        assert_relative_eq!(sol.w[0], 2.0, epsilon = 1e-8);
        assert_eq!(sol.mu, 0.0);
        assert_relative_eq!(sol.objective, -4.0, epsilon = 1e-8);
    }

    #[test]
    fn qp1qc_two_roots_picks_lower_objective() {
        // min w^2 + w subject to w^2 >= 1: optimum w = -1 (objective 0),
        // the other KKT point w = +1 has objective 2.
        let inst = Qp1qcInstance {
            a0: dmatrix![1.0],
            b0: dvector![0.5],
            a1: dmatrix![-1.0],
            b1: dvector![0.0],
            r1: 1.0,
        };
        let sol = solve_qp1qc(&inst, &cfg()).unwrap();
        assert_relative_eq!(sol.w[0], -1.0, epsilon = 1e-7);
        assert_relative_eq!(sol.mu, 0.5, epsilon = 1e-7);
        assert_relative_eq!(sol.objective, 0.0, epsilon = 1e-7);
    }

    #[test]
    fn qp1qc_convex_case_hand_value() {
        // min ||w||^2 subject to ||w||^2 - 2 w_1 + 0.75 <= 0: boundary
        // point (0.5, 0).
        let inst = Qp1qcInstance {
            a0: DMatrix::identity(2, 2),
            b0: DVector::zeros(2),
            a1: DMatrix::identity(2, 2),
            b1: dvector![-1.0, 0.0],
            r1: 0.75,
        };
        let sol = solve_qp1qc(&inst, &cfg()).unwrap();
        assert_relative_eq!(sol.w[0], 0.5, epsilon = 1e-7);
        assert_relative_eq!(sol.w[1].abs(), 0.0, epsilon = 1e-7);
        assert_relative_eq!(sol.objective, 0.25, epsilon = 1e-7);
    }

    #[test]
    fn degenerate_instances_rejected() {
        let inst = Qp1qcInstance {
            a0: dmatrix![1.0],
            b0: dvector![1.0],
            a1: dmatrix![1.0],
            b1: dvector![0.0],
            r1: 0.0,
        };
        assert!(matches!(solve_qp1qc(&inst, &cfg()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn secular_monotone_before_pole() {
        // f is non-increasing on (0, -1/lambda_1) for Prop-1 style spectra.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let l = 2 + rng.gen_range(0..4);
            let mut lambda = DVector::from_fn(l, |_, _| rng.gen::<f64>() * 3.0 + 0.01);
            lambda[0] = -(rng.gen::<f64>() * 3.0 + 0.05);
            let g = DVector::from_fn(l, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let sp = SecularProblem {
                lambda: lambda.clone(),
                g,
                e: DVector::zeros(l),
            };
            let pole = -1.0 / lambda[0];
            let mut prev = sp.eval(pole * 1e-4);
            for k in 1..50 {
                let x = pole * (1e-4 + (1.0 - 2e-4) * k as f64 / 50.0);
                let f = sp.eval(x);
                assert!(f <= prev + 1e-9 * sp.scale(), "f increased before pole");
                prev = f;
            }
        }
    }

    /// Dense polar-grid brute force over the feasible set of an L = 2
    /// instance; independent of the KKT path.
    fn brute_force_l2(inst: &Qp1qcInstance, radius: f64, steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..steps {
            let r = radius * (i as f64 + 1.0) / steps as f64;
            for k in 0..steps {
                let th = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
                let w = dvector![r * th.cos(), r * th.sin()];
                if constraint_value(inst, &w) <= 1e-9 {
                    let obj = (w.transpose() * &inst.a0 * &w)[(0, 0)] + 2.0 * inst.b0.dot(&w);
                    if obj < best {
                        best = obj;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn qp1qc_matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut solved = 0;
        for trial in 0..60 {
            let convex = trial % 2 == 0;
            // Random PD A0.
            let m = DMatrix::from_fn(2, 2, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let a0 = &m * m.transpose() + DMatrix::identity(2, 2) * 0.5;
            let b0 = DVector::from_fn(2, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let (a1, b1, r1) = if convex {
                let q = DMatrix::from_fn(2, 2, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
                let a1 = &q * q.transpose() + DMatrix::identity(2, 2) * 0.3;
                let b1 = DVector::from_fn(2, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
                // Keep the instance feasible: constraint at the minimizer
                // -A1^{-1} b1 must be nonpositive, so cap r1.
                let wmin = -&a1.clone().try_inverse().unwrap() * &b1;
                let low = (wmin.transpose() * &a1 * &wmin)[(0, 0)] + 2.0 * b1.dot(&wmin);
                let r1 = -low * (0.2 + 0.6 * rng.gen::<f64>());
                (a1, b1, r1)
            } else {
                // One negative eigenvalue, homogeneous constraint.
                let q = DMatrix::from_fn(2, 2, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
                let mut a1 = &q * q.transpose();
                let eig = a1.clone().symmetric_eigen();
                let mut vals = eig.eigenvalues.clone();
                vals[0] = -(rng.gen::<f64>() + 0.2);
                a1 = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
                (a1, DVector::zeros(2), rng.gen::<f64>() * 0.5 + 0.1)
            };
            if r1 <= 1e-6 {
                continue;
            }
            let inst = Qp1qcInstance { a0, b0, a1, b1, r1 };
            let sol = solve_qp1qc(&inst, &cfg()).unwrap();
            assert!(constraint_value(&inst, &sol.w) <= 1e-6, "infeasible output");
            let brute = brute_force_l2(&inst, sol.w.norm() * 2.0 + 2.0, 600);
            assert!(
                sol.objective <= brute + 1e-2,
                "objective {} worse than brute force {}",
                sol.objective,
                brute
            );
            solved += 1;
        }
        assert!(solved >= 55, "too few instances solved: {solved}");
    }
}
