//! Generalized-eigenvalue machinery and the closed-form fixed-topology
//! solvers used for initialization, oracle evaluation and final polishing.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::QuadForms;

/// Relative cutoff separating a genuinely positive pencil eigenvalue from
/// round-off.
const POS_EIG_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum EigKind {
    MinPositive,
    Maximum,
}

#[derive(Debug, Clone)]
pub struct GenEigResult {
    pub lambda: f64,
    pub v: DVector<f64>,
    pub kind: EigKind,
}

/// Symmetric inverse square root of a positive definite matrix.
pub fn inv_sqrt_pd(a: &DMatrix<f64>, name: &'static str) -> Result<DMatrix<f64>> {
    let eig = a.clone().symmetric_eigen();
    let max = eig.eigenvalues.amax();
    if eig.eigenvalues.iter().any(|&v| v <= 1e-14 * max.max(1e-300)) {
        return Err(Error::NotPositiveDefinite(name));
    }
    let dinv = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok(&eig.eigenvectors * dinv * eig.eigenvectors.transpose())
}

/// Flips the sign so the first component above round-off is positive.
fn normalize_sign(mut v: DVector<f64>) -> DVector<f64> {
    let scale = v.amax();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale.max(1e-300)) {
        if *first < 0.0 {
            v = -v;
        }
    }
    v
}

/// Smallest positive eigenvalue of the pencil `A v = lambda B v` with
/// `A` positive definite. Returns `Infeasible` when the pencil has no
/// positive eigenvalue.
pub fn gen_eig_min_pos(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<GenEigResult> {
    let a_is = inv_sqrt_pd(a, "pencil PD side")?;
    // A v = lambda B v  <=>  M u = (1/lambda) u with M = A^{-1/2} B A^{-1/2}.
    let m = &a_is * b * &a_is;
    let eig = m.symmetric_eigen();
    let cutoff = POS_EIG_CUTOFF * eig.eigenvalues.amax();
    let mut best: Option<usize> = None;
    for i in 0..eig.eigenvalues.len() {
        let nu = eig.eigenvalues[i];
        if nu > cutoff {
            match best {
                Some(j) if eig.eigenvalues[j] >= nu => {}
                _ => best = Some(i),
            }
        }
    }
    let Some(i) = best else {
        return Err(Error::Infeasible(
            "pencil has no positive eigenvalue".into(),
        ));
    };
    let nu = eig.eigenvalues[i];
    let v = normalize_sign(&a_is * eig.eigenvectors.column(i));
    Ok(GenEigResult {
        lambda: 1.0 / nu,
        v,
        kind: EigKind::MinPositive,
    })
}

/// Maximum eigenvalue of the pencil `A v = lambda B v` with `B` positive
/// definite.
pub fn gen_eig_max(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<GenEigResult> {
    let b_is = inv_sqrt_pd(b, "pencil PD side")?;
    let m = &b_is * a * &b_is;
    let eig = m.symmetric_eigen();
    let mut idx = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[idx] {
            idx = i;
        }
    }
    let v = normalize_sign(&b_is * eig.eigenvectors.column(idx));
    Ok(GenEigResult {
        lambda: eig.eigenvalues[idx],
        v,
        kind: EigKind::Maximum,
    })
}

/// Fisher information ceiling `J0 = lambda_max(Omega_JN, Omega_JD)`.
pub fn info_bound_j0(forms: &QuadForms) -> Result<f64> {
    Ok(gen_eig_max(&forms.omega_jn, &forms.omega_jd)?.lambda.max(0.0))
}

/// Distortion floor `D0 = eta2 / (1 + eta2 * J0)`.
pub fn min_distortion_d0(forms: &QuadForms) -> Result<f64> {
    let j0 = info_bound_j0(forms)?;
    Ok(forms.eta2 / (1.0 + forms.eta2 * j0))
}

/// Closed-form minimum-energy solution for the fully connected network at
/// information threshold `j_check`. Returns the total energy (including the
/// full collaboration cost) and the solution vector.
pub fn fully_connected_info(forms: &QuadForms, j_check: f64) -> Result<(f64, DVector<f64>)> {
    fixed_topology_info(forms, &all_indices(forms.l), j_check)
}

/// Closed-form maximum-information solution for the fully connected network
/// under budget `p_hat`.
pub fn fully_connected_energy(forms: &QuadForms, p_hat: f64) -> Result<(f64, DVector<f64>)> {
    fixed_topology_energy(forms, &all_indices(forms.l), p_hat)
}

fn all_indices(l: usize) -> Vec<usize> {
    (0..l).collect()
}

fn restrict(m: &DMatrix<f64>, support: &[usize]) -> DMatrix<f64> {
    let k = support.len();
    DMatrix::from_fn(k, k, |i, j| m[(support[i], support[j])])
}

fn embed(sub: &DVector<f64>, support: &[usize], l: usize) -> DVector<f64> {
    let mut w = DVector::zeros(l);
    for (i, &idx) in support.iter().enumerate() {
        w[idx] = sub[i];
    }
    w
}

/// Minimum-energy solution restricted to a given support set.
///
/// Returns `(P, w)` where `P` includes the fixed collaboration cost of the
/// support. Infeasible when the restricted topology cannot reach `j_check`.
pub fn fixed_topology_info(
    forms: &QuadForms,
    support: &[usize],
    j_check: f64,
) -> Result<(f64, DVector<f64>)> {
    if support.is_empty() {
        if j_check > 0.0 {
            return Err(Error::Infeasible("empty support with positive target".into()));
        }
        return Ok((0.0, DVector::zeros(forms.l)));
    }
    if j_check <= 0.0 {
        return Err(Error::Infeasible(format!(
            "information threshold {j_check} must be positive"
        )));
    }
    let ot = restrict(&forms.omega_t, support);
    let ojn = restrict(&forms.omega_jn, support);
    let ojd = restrict(&forms.omega_jd, support);
    let fixed_cost: f64 = support.iter().map(|&l| forms.c[l]).sum();

    let pencil_b = &ojn / j_check - &ojd;
    let res = gen_eig_min_pos(&ot, &pencil_b)?;
    let p = res.lambda * forms.xi2 + fixed_cost;

    let quad = (res.v.transpose() * &ot * &res.v)[(0, 0)];
    let scale = ((p - fixed_cost) / quad).sqrt();
    let w = embed(&(res.v * scale), support, forms.l);

    // The information constraint must be active at the returned point.
    let j = forms.fisher_info(&w)?;
    if (j - j_check).abs() > 1e-6 * j_check.max(1e-12) {
        return Err(Error::SolverFailure(format!(
            "fixed-topology info solution misses target: J = {j}, target {j_check}"
        )));
    }
    Ok((p, w))
}

/// Maximum-information solution restricted to a given support set under
/// total budget `p_hat` (fixed collaboration cost included).
pub fn fixed_topology_energy(
    forms: &QuadForms,
    support: &[usize],
    p_hat: f64,
) -> Result<(f64, DVector<f64>)> {
    if support.is_empty() {
        return Ok((0.0, DVector::zeros(forms.l)));
    }
    let fixed_cost: f64 = support.iter().map(|&l| forms.c[l]).sum();
    if p_hat <= fixed_cost {
        return Err(Error::Infeasible(format!(
            "budget {p_hat} does not exceed the fixed topology cost {fixed_cost}"
        )));
    }
    let ot = restrict(&forms.omega_t, support);
    let ojn = restrict(&forms.omega_jn, support);
    let ojd = restrict(&forms.omega_jd, support);

    let b = &ojd + &ot * (forms.xi2 / (p_hat - fixed_cost));
    let res = gen_eig_max(&ojn, &b)?;
    let j = res.lambda.max(0.0);

    let quad = (res.v.transpose() * &ot * &res.v)[(0, 0)];
    let scale = ((p_hat - fixed_cost) / quad).sqrt();
    let w = embed(&(res.v * scale), support, forms.l);

    let spent = forms.transmission_cost(&w)?;
    if (spent - (p_hat - fixed_cost)).abs() > 1e-6 * (p_hat - fixed_cost).max(1e-12) {
        return Err(Error::SolverFailure(format!(
            "fixed-topology energy solution misses budget: spent {spent}"
        )));
    }
    Ok((j, w))
}
