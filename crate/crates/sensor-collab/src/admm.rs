//! ADMM splitting loops for the weighted-l1 subproblems: the nonconvex
//! information-constrained loop and the convexified joint-selection loop,
//! together with their proximal operators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{group_indices, QuadForms};
use crate::qp1qc::{solve_qp1qc, Qp1qcInstance, RootSearchConfig};

/// Per-iteration ADMM record, emitted when tracing is enabled.
#[derive(Debug, Clone)]
pub struct AdmmTraceRow {
    pub k: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct AdmmState {
    pub w: DVector<f64>,
    pub v: DVector<f64>,
    pub chi: DVector<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<AdmmTraceRow>,
}

#[derive(Debug, Clone)]
pub struct AdmmConfig {
    pub rho: f64,
    pub eps_ad: f64,
    pub max_iter: usize,
    pub trace: bool,
    pub root_search: RootSearchConfig,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 20.0,
            eps_ad: 1e-3,
            max_iter: 500,
            trace: false,
            root_search: RootSearchConfig::default(),
        }
    }
}

/// Entrywise soft thresholding: proximal operator of `sum theta_l |v_l|`.
pub fn soft_threshold(b: &DVector<f64>, theta: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(b.len(), |l, _| {
        let t = theta[l];
        if b[l].abs() > t {
            (1.0 - t / b[l].abs()) * b[l]
        } else {
            0.0
        }
    })
}

/// Block soft thresholding: proximal operator of a weighted l1 plus group
/// l2 penalty, applied to one row group.
pub fn block_soft_threshold(
    b_g: &DVector<f64>,
    f_g: &DVector<f64>,
    d_tilde: f64,
    rho: f64,
) -> DVector<f64> {
    let nu = DVector::from_fn(b_g.len(), |i, _| {
        let shrunk = (b_g[i].abs() - f_g[i] / rho).max(0.0);
        b_g[i].signum() * shrunk * if b_g[i] == 0.0 { 0.0 } else { 1.0 }
    });
    let norm = nu.norm();
    if norm >= d_tilde / rho && norm > 0.0 {
        nu * (1.0 - d_tilde / (rho * norm))
    } else {
        DVector::zeros(b_g.len())
    }
}

/// Linearized (convexified) information constraint built around the point
/// `beta`: `w' (Jc * Omega_JD) w - 2 beta_tilde' w + gamma_tilde <= 0`.
#[derive(Debug, Clone)]
pub struct LinearizedConstraint {
    pub omega_jd_tilde: DMatrix<f64>,
    pub beta_tilde: DVector<f64>,
    pub gamma_tilde: f64,
}

impl LinearizedConstraint {
    pub fn around(forms: &QuadForms, j_check: f64, beta: &DVector<f64>) -> Self {
        let beta_tilde = &forms.omega_jn * beta;
        let gamma_tilde = beta.dot(&beta_tilde) + j_check * forms.xi2;
        LinearizedConstraint {
            omega_jd_tilde: &forms.omega_jd * j_check,
            beta_tilde,
            gamma_tilde,
        }
    }

    pub fn value(&self, w: &DVector<f64>) -> f64 {
        (w.transpose() * &self.omega_jd_tilde * w)[(0, 0)] - 2.0 * self.beta_tilde.dot(w)
            + self.gamma_tilde
    }
}

fn omega_t_tilde(forms: &QuadForms, rho: f64) -> DMatrix<f64> {
    &forms.omega_t + DMatrix::identity(forms.l, forms.l) * (rho / 2.0)
}

/// ADMM loop for the information-constrained weighted-l1 problem.
///
/// The w-step is the nonconvex QP1QC with the exact information constraint;
/// the v-step is entrywise soft thresholding with weights
/// `alpha_l c_l / rho`. The returned vector is the final w iterate, which
/// satisfies the information constraint; sparsity should be read off `v`.
pub fn admm_info(
    forms: &QuadForms,
    j_check: f64,
    alpha_weights: &DVector<f64>,
    w0: &DVector<f64>,
    config: &AdmmConfig,
) -> Result<(DVector<f64>, AdmmState)> {
    let rho = config.rho;
    let a0 = omega_t_tilde(forms, rho);
    let a1 = &forms.omega_jd * j_check - &forms.omega_jn;
    let r1 = j_check * forms.xi2;
    let theta = DVector::from_fn(forms.l, |l, _| alpha_weights[l] * forms.c[l] / rho);

    let step = |a: &DVector<f64>| -> Result<DVector<f64>> {
        let inst = Qp1qcInstance {
            a0: a0.clone(),
            b0: a * (-rho / 2.0),
            a1: a1.clone(),
            b1: DVector::zeros(forms.l),
            r1,
        };
        Ok(solve_qp1qc(&inst, &config.root_search)?.w)
    };
    let vstep = |b: &DVector<f64>| soft_threshold(b, &theta);
    let objective = |w: &DVector<f64>, v: &DVector<f64>| -> f64 {
        (w.transpose() * &forms.omega_t * w)[(0, 0)]
            + (0..forms.l).map(|l| alpha_weights[l] * forms.c[l] * v[l].abs()).sum::<f64>()
    };

    run_admm(forms, j_check, w0, config, step, vstep, objective)
}

/// ADMM loop for the convexified joint selection-and-collaboration
/// subproblem built on a linearized information constraint.
pub fn admm_joint(
    forms: &QuadForms,
    lin: &LinearizedConstraint,
    tau_weights: &DVector<f64>,
    delta_weights: &DVector<f64>,
    w0: &DVector<f64>,
    config: &AdmmConfig,
) -> Result<(DVector<f64>, AdmmState)> {
    let rho = config.rho;
    let a0 = omega_t_tilde(forms, rho);
    let f = DVector::from_fn(forms.l, |l, _| tau_weights[l] * forms.c[l]);
    let d_tilde = DVector::from_fn(forms.n, |m, _| delta_weights[m] * forms.d[m]);

    let step = |a: &DVector<f64>| -> Result<DVector<f64>> {
        let inst = Qp1qcInstance {
            a0: a0.clone(),
            b0: a * (-rho / 2.0),
            a1: lin.omega_jd_tilde.clone(),
            b1: -lin.beta_tilde.clone(),
            r1: lin.gamma_tilde,
        };
        Ok(solve_qp1qc(&inst, &config.root_search)?.w)
    };
    let n = forms.n;
    let vstep = move |b: &DVector<f64>| {
        let mut v = DVector::zeros(b.len());
        for m in 0..n {
            let idx = group_indices(m, n);
            let b_g = DVector::from_fn(n, |i, _| b[idx.start + i]);
            let f_g = DVector::from_fn(n, |i, _| f[idx.start + i]);
            let v_g = block_soft_threshold(&b_g, &f_g, d_tilde[m], rho);
            for i in 0..n {
                v[idx.start + i] = v_g[i];
            }
        }
        v
    };
    let tau = tau_weights.clone();
    let delta = delta_weights.clone();
    let objective = move |w: &DVector<f64>, v: &DVector<f64>| -> f64 {
        (w.transpose() * &forms.omega_t * w)[(0, 0)]
            + (0..forms.l).map(|l| tau[l] * forms.c[l] * v[l].abs()).sum::<f64>()
            + (0..forms.n)
                .map(|m| delta[m] * forms.d[m] * crate::model::group_norm(v, m, forms.n))
                .sum::<f64>()
    };

    run_admm_with_feasibility(
        w0,
        config,
        step,
        vstep,
        objective,
        |w| lin.value(w) <= 1e-6 * lin.gamma_tilde.max(1.0),
    )
}

fn run_admm<S, V, O>(
    forms: &QuadForms,
    j_check: f64,
    w0: &DVector<f64>,
    config: &AdmmConfig,
    step: S,
    vstep: V,
    objective: O,
) -> Result<(DVector<f64>, AdmmState)>
where
    S: Fn(&DVector<f64>) -> Result<DVector<f64>>,
    V: Fn(&DVector<f64>) -> DVector<f64>,
    O: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    let feas = |w: &DVector<f64>|

        forms.fisher_info(w).map(|j| j >= j_check - 1e-6).unwrap_or(false);
    run_admm_with_feasibility(w0, config, step, vstep, objective, feas)
}

fn run_admm_with_feasibility<S, V, O, F>(
    w0: &DVector<f64>,
    config: &AdmmConfig,
    step: S,
    vstep: V,
    objective: O,
    feasible: F,
) -> Result<(DVector<f64>, AdmmState)>
where
    S: Fn(&DVector<f64>) -> Result<DVector<f64>>,
    V: Fn(&DVector<f64>) -> DVector<f64>,
    O: Fn(&DVector<f64>, &DVector<f64>) -> f64,
    F: Fn(&DVector<f64>) -> bool,
{
    let rho = config.rho;
    let l = w0.len();
    let mut w = w0.clone();
    let mut v = w0.clone();
    let mut chi = DVector::zeros(l);

    let mut best_feasible = w.clone();
    let mut best_obj = f64::INFINITY;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut k = 0;

    while k < config.max_iter {
        k += 1;
        let a = &v - &chi / rho;
        w = step(&a).map_err(|e| attach_iter(e, k))?;
        let b = &w + &chi / rho;
        let v_new = vstep(&b);
        chi += (&w - &v_new) * rho;

        let primal = (&w - &v_new).norm();
        let dual = (&v_new - &v).norm();
        v = v_new;

        let obj = objective(&w, &v);
        if config.trace {
            trace.push(AdmmTraceRow {
                k,
                primal_residual: primal,
                dual_residual: dual,
                objective: obj,
            });
        }
        if feasible(&w) && obj < best_obj {
            best_obj = obj;
            best_feasible = w.clone();
        }
        if primal <= config.eps_ad && dual <= config.eps_ad {
            converged = true;
            break;
        }
    }

    let out = if converged || feasible(&w) {
        w.clone()
    } else {
        best_feasible
    };
    let state = AdmmState {
        w,
        v,
        chi,
        rho,
        iterations: k,
        converged,
        trace,
    };
    Ok((out, state))
}

fn attach_iter(e: Error, k: usize) -> Error {
    match e {
        Error::SolverFailure(msg) => Error::SolverFailure(format!("ADMM iteration {k}: {msg}")),
        other => other,
    }
}
