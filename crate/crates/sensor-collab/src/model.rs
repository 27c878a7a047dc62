//! Scenario construction and the quadratic-form representation of the
//! transmission cost, collaboration/selection costs and Fisher information.
//!
//! A scenario places `N` sensors and a fusion center on a 10x10 square and
//! carries the statistical parameters of the gains and noises. All cost and
//! information expressions are assembled into quadratic forms in the
//! row-wise vectorization `w` of the collaboration matrix `W`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length of the deployment square.
pub const GRID_SIDE: f64 = 10.0;

/// Statistical and cost parameters of a homogeneous equicorrelated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Number of sensors.
    pub n: usize,
    /// Expected observation gain.
    pub h0: f64,
    /// Expected channel gain.
    pub g0: f64,
    /// Observation gain certainty in [0, 1].
    pub alpha_h: f64,
    /// Channel gain certainty in [0, 1].
    pub alpha_g: f64,
    /// Measurement noise power.
    pub zeta2: f64,
    /// Measurement noise correlation, must lie in (-1/(N-1), 1).
    pub rho_corr: f64,
    /// Channel noise power.
    pub xi2: f64,
    /// Prior variance of the estimated parameter.
    pub eta2: f64,
    /// Collaboration cost per unit distance.
    pub alpha_c: f64,
    /// Selection cost per unit distance.
    pub alpha_s: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            n: 5,
            h0: 1.0,
            g0: 1.0,
            alpha_h: 0.7,
            alpha_g: 0.7,
            zeta2: 1.0,
            rho_corr: 0.5,
            xi2: 1.0,
            eta2: 0.1,
            alpha_c: 0.01,
            alpha_s: 0.01,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("sensor count must be >= 1".into()));
        }
        let lo = if self.n > 1 {
            -1.0 / (self.n as f64 - 1.0)
        } else {
            -1.0
        };
        if !(self.rho_corr > lo && self.rho_corr < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_corr {} outside ({}, 1)",
                self.rho_corr, lo
            )));
        }
        for (name, v) in [("alpha_h", self.alpha_h), ("alpha_g", self.alpha_g)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} {v} outside [0, 1]")));
            }
        }
        for (name, v) in [
            ("zeta2", self.zeta2),
            ("xi2", self.xi2),
            ("eta2", self.eta2),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.alpha_c < 0.0 || self.alpha_s < 0.0 {
            return Err(Error::InvalidParameter(
                "cost rates must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// A concrete network: parameters plus sensor/FC geometry.
///
/// The collaboration cost matrix and selection cost vector are derived from
/// the geometry on demand and never serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: ScenarioParams,
    pub seed: u64,
    pub sensor_pos: Vec<[f64; 2]>,
    pub fc_pos: [f64; 2],
}

impl Scenario {
    /// Deterministically deploys `n` sensors and the FC uniformly on the
    /// deployment square.
    pub fn build(params: ScenarioParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sensor_pos = (0..params.n)
            .map(|_| [rng.gen::<f64>() * GRID_SIDE, rng.gen::<f64>() * GRID_SIDE])
            .collect();
        let fc_pos = [rng.gen::<f64>() * GRID_SIDE, rng.gen::<f64>() * GRID_SIDE];
        let s = Self {
            params,
            seed,
            sensor_pos,
            fc_pos,
        };
        s.check_noise_pd()?;
        Ok(s)
    }

    /// Builds a scenario from explicit positions (used by tests and the
    /// closed-form scalar case).
    pub fn with_positions(
        params: ScenarioParams,
        sensor_pos: Vec<[f64; 2]>,
        fc_pos: [f64; 2],
    ) -> Result<Self> {
        params.validate()?;
        if sensor_pos.len() != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                got: sensor_pos.len(),
            });
        }
        let s = Self {
            params,
            seed: 0,
            sensor_pos,
            fc_pos,
        };
        s.check_noise_pd()?;
        Ok(s)
    }

    fn check_noise_pd(&self) -> Result<()> {
        if self.noise_cov().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite("measurement noise covariance"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Measurement noise covariance `zeta2 * [(1 - rho)I + rho * 11^T]`.
    pub fn noise_cov(&self) -> DMatrix<f64> {
        let n = self.n();
        let p = &self.params;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                p.zeta2
            } else {
                p.zeta2 * p.rho_corr
            }
        })
    }

    /// Pairwise collaboration cost `C_mn = alpha_c * ||s_m - s_n||`.
    pub fn collab_cost_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |m, k| {
            self.params.alpha_c * dist(self.sensor_pos[m], self.sensor_pos[k])
        })
    }

    /// Selection cost `d_n = alpha_s * ||s_n - s_fc||`.
    pub fn selection_cost_vector(&self) -> DVector<f64> {
        DVector::from_fn(self.n(), |i, _| {
            self.params.alpha_s * dist(self.sensor_pos[i], self.fc_pos)
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s)?;
        sc.params.validate()?;
        if sc.sensor_pos.len() != sc.params.n {
            return Err(Error::DimensionMismatch {
                expected: sc.params.n,
                got: sc.sensor_pos.len(),
            });
        }
        sc.check_noise_pd()?;
        Ok(sc)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Row index (0-based) of vector entry `l` under row-wise vectorization.
pub fn row_of(l: usize, n: usize) -> usize {
    l / n
}

/// Column index (0-based) of vector entry `l` under row-wise vectorization.
pub fn col_of(l: usize, n: usize) -> usize {
    l % n
}

/// Indices of row group `G_m` (row `m` of `W`), 0-based.
pub fn group_indices(m: usize, n: usize) -> std::ops::Range<usize> {
    m * n..(m + 1) * n
}

/// Reshapes the length-`N^2` vector `w` into the `N x N` matrix `W` row-wise.
pub fn reshape_to_matrix(w: &DVector<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| w[i * n + j])
}

/// Row-wise vectorization of `W`.
pub fn vectorize(w_mat: &DMatrix<f64>) -> DVector<f64> {
    let n = w_mat.nrows();
    DVector::from_fn(n * n, |l, _| w_mat[(row_of(l, n), col_of(l, n))])
}

/// Assembled quadratic forms of the collaboration design problem.
#[derive(Debug, Clone)]
pub struct QuadForms {
    pub n: usize,
    pub l: usize,
    /// Transmission energy form, `I_N (x) Sigma_x`.
    pub omega_t: DMatrix<f64>,
    /// Fisher numerator form, rank one.
    pub omega_jn: DMatrix<f64>,
    /// Fisher denominator form.
    pub omega_jd: DMatrix<f64>,
    /// Row-wise vectorization of the collaboration cost matrix.
    pub c: DVector<f64>,
    /// Selection cost vector.
    pub d: DVector<f64>,
    pub xi2: f64,
    pub eta2: f64,
    // Direct-form data kept for cross-check evaluation.
    pub h: DVector<f64>,
    pub g: DVector<f64>,
    pub sigma_x: DMatrix<f64>,
    /// `g g^T + Sigma_g`.
    pub sigma_g_hat: DMatrix<f64>,
}

/// Assembles all quadratic forms for a scenario.
pub fn build_forms(scenario: &Scenario) -> Result<QuadForms> {
    let p = &scenario.params;
    let n = p.n;
    let l = n * n;

    let h = DVector::from_element(n, p.h0 * p.alpha_h.sqrt());
    let g = DVector::from_element(n, p.g0 * p.alpha_g.sqrt());
    let sigma_h = DMatrix::from_diagonal_element(n, n, p.h0 * p.h0 * (1.0 - p.alpha_h));
    let sigma_g = DMatrix::from_diagonal_element(n, n, p.g0 * p.g0 * (1.0 - p.alpha_g));
    let sigma_eps = scenario.noise_cov();

    let sigma_x = &sigma_eps + (&h * h.transpose() + &sigma_h) * p.eta2;
    let sigma_g_hat = &g * g.transpose() + &sigma_g;

    let omega_t = kron_eye_left(n, &sigma_x);

    // G is L x N with [G]_{l, j} = g_{m_l} at column j = n_l.
    let big_g = DMatrix::from_fn(l, n, |li, j| if col_of(li, n) == j { g[row_of(li, n)] } else { 0.0 });
    let gh = &big_g * &h;
    let omega_jn = &gh * gh.transpose();

    let big_h = kron_eye_left_vec(n, &h);
    let omega_jd = &big_g * (&sigma_eps + &sigma_h * p.eta2) * big_g.transpose()
        + (&big_h * &sigma_g * big_h.transpose()) * p.eta2
        + kron(&sigma_g, &sigma_h) * p.eta2
        + kron(&sigma_g, &sigma_eps);

    let cm = scenario.collab_cost_matrix();
    let c = vectorize(&cm);
    let d = scenario.selection_cost_vector();

    Ok(QuadForms {
        n,
        l,
        omega_t,
        omega_jn,
        omega_jd,
        c,
        d,
        xi2: p.xi2,
        eta2: p.eta2,
        h,
        g,
        sigma_x,
        sigma_g_hat,
    })
}

/// `I_n (x) A` for square `A`.
fn kron_eye_left(n: usize, a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let mut out = DMatrix::zeros(n * m, n * m);
    for b in 0..n {
        out.view_mut((b * m, b * m), (m, m)).copy_from(a);
    }
    out
}

/// `I_n (x) h` for a column vector `h` (block-diagonal `nm x n` matrix).
fn kron_eye_left_vec(n: usize, h: &DVector<f64>) -> DMatrix<f64> {
    let m = h.len();
    let mut out = DMatrix::zeros(n * m, n);
    for b in 0..n {
        out.view_mut((b * m, b), (m, 1)).copy_from(h);
    }
    out
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

impl QuadForms {
    fn check_len(&self, w: &DVector<f64>) -> Result<()> {
        if w.len() != self.l {
            return Err(Error::DimensionMismatch {
                expected: self.l,
                got: w.len(),
            });
        }
        Ok(())
    }

    /// Transmission energy `w^T Omega_T w`.
    pub fn transmission_cost(&self, w: &DVector<f64>) -> Result<f64> {
        self.check_len(w)?;
        Ok((w.transpose() * &self.omega_t * w)[(0, 0)])
    }

    /// Transmission energy computed from the reshaped `W` as
    /// `tr(W Sigma_x W^T)`; independent cross-check path.
    pub fn transmission_cost_direct(&self, w: &DVector<f64>) -> Result<f64> {
        self.check_len(w)?;
        let wm = reshape_to_matrix(w, self.n);
        Ok((&wm * &self.sigma_x * wm.transpose()).trace())
    }

    /// Equivalent Fisher information in quadratic-form shape.
    pub fn fisher_info(&self, w: &DVector<f64>) -> Result<f64> {
        self.check_len(w)?;
        let num = (w.transpose() * &self.omega_jn * w)[(0, 0)];
        let den = (w.transpose() * &self.omega_jd * w)[(0, 0)] + self.xi2;
        Ok(num / den)
    }

    /// Fisher information computed from the direct matrix formula;
    /// independent cross-check path.
    pub fn fisher_info_direct(&self, w: &DVector<f64>) -> Result<f64> {
        self.check_len(w)?;
        let wm = reshape_to_matrix(w, self.n);
        let gwh = (self.g.transpose() * &wm * &self.h)[(0, 0)];
        let num = gwh * gwh;
        let den = (&self.sigma_g_hat * &wm * &self.sigma_x * wm.transpose()).trace()
            - self.eta2 * num
            + self.xi2;
        Ok(num / den)
    }

    /// Collaboration cost `Q`: sum of `c_l` over nonzero entries.
    pub fn collaboration_cost(&self, w: &DVector<f64>, zero_tol: f64) -> f64 {
        let thr = nonzero_threshold(w, zero_tol);
        (0..self.l)
            .filter(|&l| w[l].abs() > thr)
            .map(|l| self.c[l])
            .sum()
    }

    /// Selection cost `S`: sum of `d_n` over rows with nonzero group norm.
    pub fn selection_cost(&self, w: &DVector<f64>, zero_tol: f64) -> f64 {
        let thr = nonzero_threshold(w, zero_tol);
        (0..self.n)
            .filter(|&m| group_norm(w, m, self.n) > thr)
            .map(|m| self.d[m])
            .sum()
    }

    /// Distortion `eta2 / (1 + eta2 * J)`.
    pub fn distortion(&self, j: f64) -> f64 {
        distortion(j, self.eta2)
    }
}

/// Relative cardinality threshold: `zero_tol * max(1, ||w||_inf)`.
pub fn nonzero_threshold(w: &DVector<f64>, zero_tol: f64) -> f64 {
    zero_tol * w.amax().max(1.0)
}

pub fn group_norm(w: &DVector<f64>, m: usize, n: usize) -> f64 {
    group_indices(m, n).map(|l| w[l] * w[l]).sum::<f64>().sqrt()
}

/// Number of entries counted as nonzero under the relative threshold.
pub fn cardinality(w: &DVector<f64>, zero_tol: f64) -> usize {
    let thr = nonzero_threshold(w, zero_tol);
    w.iter().filter(|x| x.abs() > thr).count()
}

pub fn distortion(j: f64, eta2: f64) -> f64 {
    eta2 / (1.0 + eta2 * j)
}

/// Rescales distortion to `(0, 1]` between the floor `d0` and the prior
/// variance.
pub fn normalized_distortion(d: f64, d0: f64, eta2: f64) -> Result<f64> {
    if d <= d0 || d > eta2 * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "distortion {d} outside ({d0}, {eta2}]"
        )));
    }
    Ok((d - d0) / (eta2 - d0))
}

/// Converts a normalized-distortion target back to an information threshold.
pub fn dnorm_to_j(dnorm: f64, d0: f64, eta2: f64) -> Result<f64> {
    if !(dnorm > 0.0 && dnorm <= 1.0) {
        return Err(Error::Infeasible(format!("D_norm {dnorm} outside (0, 1]")));
    }
    let d = d0 + dnorm * (eta2 - d0);
    Ok(1.0 / d - 1.0 / eta2)
}

/// Percentage of active off-diagonal links. Only meaningful when all
/// diagonal entries are active (no-selection problems).
pub fn link_percentage(w: &DVector<f64>, n: usize, zero_tol: f64) -> Result<f64> {
    let l = n * n;
    if l <= n {
        return Err(Error::Domain(
            "link percentage undefined for a single-sensor network".into(),
        ));
    }
    let card = cardinality(w, zero_tol);
    Ok((card as f64 - n as f64) / (l as f64 - n as f64) * 100.0)
}

/// Scalar metrics recomputed from a solution vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metrics {
    /// Transmission energy.
    pub t: f64,
    /// Collaboration energy.
    pub q: f64,
    /// Selection energy.
    pub s: f64,
    /// `T + Q`.
    pub p: f64,
    /// `T + Q + S`.
    pub total: f64,
    /// Fisher information.
    pub j: f64,
    /// Distortion.
    pub d: f64,
    /// Normalized distortion.
    pub d_norm: f64,
    /// Link percentage; absent when the diagonal is not fully active.
    pub per_w: Option<f64>,
    pub card: usize,
    pub selected: Vec<usize>,
}

impl Metrics {
    /// Computes every metric from scratch. `d0` is the distortion floor.
    pub fn compute(forms: &QuadForms, w: &DVector<f64>, zero_tol: f64, d0: f64) -> Result<Metrics> {
        let t = forms.transmission_cost(w)?;
        let q = forms.collaboration_cost(w, zero_tol);
        let s = forms.selection_cost(w, zero_tol);
        let j = forms.fisher_info(w)?;
        let d = forms.distortion(j);
        let d_norm = normalized_distortion(d, d0, forms.eta2).unwrap_or(1.0);
        let thr = nonzero_threshold(w, zero_tol);
        let selected: Vec<usize> = (0..forms.n)
            .filter(|&m| group_norm(w, m, forms.n) > thr)
            .collect();
        let diag_active = (0..forms.n).all(|m| w[m * forms.n + m].abs() > thr);
        let per_w = if diag_active && forms.l > forms.n {
            link_percentage(w, forms.n, zero_tol).ok()
        } else {
            None
        };
        Ok(Metrics {
            t,
            q,
            s,
            p: t + q,
            total: t + q + s,
            j,
            d,
            d_norm,
            per_w,
            card: cardinality(w, zero_tol),
            selected,
        })
    }
}


#[cfg(test)]
pub(crate) use tests::scalar_scenario;
