//! Exhaustive-search ground truth on tiny networks. Every admissible
//! support (and, for the joint problem, every selected-row set) is solved
//! exactly through the fixed-topology machinery; intended for tests and
//! validation runs only.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::QuadForms;
use crate::spectral::{fixed_topology_energy, fixed_topology_info};

#[derive(Debug, Clone)]
pub struct EnumerationBudget {
    /// Largest network for collaboration-only enumeration (2^(L-N) supports).
    pub max_n_collab: usize,
    /// Largest network for joint enumeration.
    pub max_n_joint: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_n_collab: 4,
            max_n_joint: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    /// Optimal objective: minimal energy (info/joint) or maximal J (energy).
    pub value: f64,
    pub support: Vec<usize>,
    pub selected: Vec<usize>,
    pub w: DVector<f64>,
}

fn off_diagonal_indices(n: usize) -> Vec<usize> {
    (0..n * n).filter(|&l| l / n != l % n).collect()
}

fn check_budget(n: usize, max_n: usize) -> Result<()> {
    if n > max_n {
        return Err(Error::InvalidParameter(format!(
            "network of {n} sensors exceeds the enumeration budget {max_n}"
        )));
    }
    Ok(())
}

/// Minimum total energy meeting `j_check`, by enumeration of all supports.
/// Diagonal entries are always included: their collaboration cost is zero
/// and growing the support never hurts the restricted optimum.
pub fn exhaustive_info(
    forms: &QuadForms,
    j_check: f64,
    budget: &EnumerationBudget,
) -> Result<OracleSolution> {
    check_budget(forms.n, budget.max_n_collab)?;
    let off = off_diagonal_indices(forms.n);
    let diag: Vec<usize> = (0..forms.n).map(|m| m * forms.n + m).collect();

    let mut best: Option<OracleSolution> = None;
    for mask in 0u64..(1u64 << off.len()) {
        let mut support = diag.clone();
        for (bit, &l) in off.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                support.push(l);
            }
        }
        support.sort_unstable();
        match fixed_topology_info(forms, &support, j_check) {
            Ok((p, w)) => {
                if best.as_ref().map_or(true, |b| p < b.value) {
                    best = Some(OracleSolution {
                        value: p,
                        support,
                        selected: (0..forms.n).collect(),
                        w,
                    });
                }
            }
            Err(Error::Infeasible(_)) | Err(Error::SolverFailure(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| Error::Infeasible("no support reaches the threshold".into()))
}

/// Maximum information under total budget `p_hat`, by enumeration.
pub fn exhaustive_energy(
    forms: &QuadForms,
    p_hat: f64,
    budget: &EnumerationBudget,
) -> Result<OracleSolution> {
    check_budget(forms.n, budget.max_n_collab)?;
    let off = off_diagonal_indices(forms.n);
    let diag: Vec<usize> = (0..forms.n).map(|m| m * forms.n + m).collect();

    let mut best = OracleSolution {
        value: 0.0,
        support: Vec::new(),
        selected: Vec::new(),
        w: DVector::zeros(forms.l),
    };
    for mask in 0u64..(1u64 << off.len()) {
        let mut support = diag.clone();
        for (bit, &l) in off.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                support.push(l);
            }
        }
        support.sort_unstable();
        match fixed_topology_energy(forms, &support, p_hat) {
            Ok((j, w)) => {
                if j > best.value {
                    best = OracleSolution {
                        value: j,
                        support,
                        selected: (0..forms.n).collect(),
                        w,
                    };
                }
            }
            Err(Error::Infeasible(_)) | Err(Error::SolverFailure(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Minimum total energy (transmission + collaboration + selection) meeting
/// `j_check`, enumerating selected-row subsets and then the supports over
/// entries in selected rows. Rows outside the selection are forced to zero;
/// diagonal entries of selected rows are always kept.
pub fn exhaustive_joint(
    forms: &QuadForms,
    j_check: f64,
    budget: &EnumerationBudget,
) -> Result<OracleSolution> {
    check_budget(forms.n, budget.max_n_joint)?;
    let n = forms.n;

    let mut best: Option<OracleSolution> = None;
    for rows_mask in 1u32..(1u32 << n) {
        let selected: Vec<usize> = (0..n).filter(|&m| rows_mask >> m & 1 == 1).collect();
        let sel_cost: f64 = selected.iter().map(|&m| forms.d[m]).sum();
        let base: Vec<usize> = selected.iter().map(|&m| m * n + m).collect();
        let optional: Vec<usize> = selected
            .iter()
            .flat_map(|&m| (0..n).filter(move |&j| j != m).map(move |j| m * n + j))
            .collect();

        for mask in 0u64..(1u64 << optional.len()) {
            let mut support = base.clone();
            for (bit, &l) in optional.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    support.push(l);
                }
            }
            support.sort_unstable();
            match fixed_topology_info(forms, &support, j_check) {
                Ok((p, w)) => {
                    let total = p + sel_cost;
                    if best.as_ref().map_or(true, |b| total < b.value) {
                        best = Some(OracleSolution {
                            value: total,
                            support,
                            selected: selected.clone(),
                            w,
                        });
                    }
                }
                Err(Error::Infeasible(_)) | Err(Error::SolverFailure(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible("no selection reaches the threshold".into()))
}
