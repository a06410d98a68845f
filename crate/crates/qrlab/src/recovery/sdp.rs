use num_complex::Complex64;

use crate::channels::{ChoiMatrix, KrausChannel};
use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::qlinalg::{eig_hermitian, DenseOperator};

use super::petz::petz_for_code;

/// Largest register dimension accepted by the SDP solver (Choi 64x64).
pub const SDP_DIM_CAP: usize = 8;

/// Projected-gradient / Dykstra solver parameters.
#[derive(Clone, Copy, Debug)]
pub struct SdpParams {
    pub max_iterations: usize,
    /// Objective-change window for the stopping rule.
    pub window: usize,
    /// Relative objective change over the window that counts as converged.
    pub rel_tol: f64,
    /// Dykstra stopping tolerance during ascent (relative to the iterate
    /// norm); the returned iterate is re-projected at `polish_tol`.
    pub dykstra_tol: f64,
    pub dykstra_max: usize,
    pub polish_tol: f64,
    pub polish_max: usize,
    /// Feasibility tolerances the returned iterate must meet for the
    /// converged flag.
    pub tp_tol: f64,
    pub psd_tol: f64,
}

impl Default for SdpParams {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            window: 50,
            rel_tol: 1e-9,
            dykstra_tol: 1e-10,
            dykstra_max: 4,
            polish_tol: 1e-14,
            polish_max: 5000,
            tp_tol: 1e-9,
            psd_tol: 1e-10,
        }
    }
}

/// Best CPTP iterate of the fidelity maximisation.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub choi: ChoiMatrix,
    /// Objective value, the squared entanglement fidelity.
    pub objective: f64,
    pub iterations: usize,
    pub tp_residual: f64,
    pub psd_violation: f64,
    pub converged: bool,
}

impl SdpSolution {
    /// `F_e` of the returned recovery. When `converged` is false this is a
    /// lower bound on the optimum.
    pub fn fe(&self) -> f64 {
        self.objective.max(0.0).sqrt()
    }
}

/// Maximises the squared entanglement fidelity over CPTP recovery maps by
/// projected gradient ascent on the Choi matrix, with Dykstra alternating
/// projections onto the PSD cone and the trace-preserving affine set.
///
/// The objective is linear: `F_e² = tr(J M)` with
/// `M = (1/d²) sum_m vec(Pi E_m†) vec(Pi E_m†)†`, so each accepted iterate
/// is monotone non-decreasing in the objective.
pub fn sdp_optimal(
    channel: &KrausChannel,
    code: &CssCode,
    params: &SdpParams,
) -> Result<SdpSolution> {
    let dim = channel.dim();
    if dim > SDP_DIM_CAP {
        return Err(Error::Resource(format!(
            "SDP register dimension {dim} exceeds cap {SDP_DIM_CAP}"
        )));
    }
    if dim != code.dim() {
        return Err(Error::Argument(format!(
            "channel dimension {dim} does not match code dimension {}",
            code.dim()
        )));
    }

    let objective_matrix = build_objective(channel, code)?;
    let (obj_vals, _) = eig_hermitian(&objective_matrix)?;
    let lipschitz = obj_vals.last().copied().unwrap_or(0.0);
    if lipschitz <= 0.0 {
        return Err(Error::Solver("objective matrix is zero".into()));
    }
    let step = Complex64::new(1.0 / lipschitz, 0.0);

    // Warm start from the Petz recovery (feasible and near-optimal).
    let start = petz_for_code(channel, code, None)
        .map(|petz| ChoiMatrix::from_channel(&petz).matrix().clone())
        .unwrap_or_else(|_| {
            ChoiMatrix::from_channel(&KrausChannel::identity(channel.local_dims()))
                .matrix()
                .clone()
        })
        .with_local_dims(&[dim, dim])?;

    let mut current = project_cptp(&start, dim, params.dykstra_tol, params.dykstra_max);
    let mut best = current.clone();
    let mut best_obj = trace_product(&best, &objective_matrix);
    let mut history = vec![best_obj];
    let mut iterations = 0usize;

    for t in 1..=params.max_iterations {
        iterations = t;
        let ascent = &current + &objective_matrix.scaled(step);
        current = project_cptp(&ascent, dim, params.dykstra_tol, params.dykstra_max);
        let obj = trace_product(&current, &objective_matrix);
        if obj > best_obj {
            best_obj = obj;
            best = current.clone();
        }
        history.push(obj);
        if t >= params.window {
            let past = history[t - params.window];
            if (obj - past).abs() <= params.rel_tol * obj.abs().max(1.0) {
                break;
            }
        }
    }

    // The ascent phase projects loosely; land the returned iterate inside
    // the feasible set to full precision and report its objective.
    let polished = project_cptp(&best, dim, params.polish_tol, params.polish_max);
    let best_obj = trace_product(&polished, &objective_matrix);

    let choi = ChoiMatrix::from_parts(dim, dim, polished)?;
    let tp_residual = choi.tp_defect()?;
    let psd_violation = choi.psd_defect()?;
    let converged = iterations < params.max_iterations
        && tp_residual <= params.tp_tol
        && psd_violation <= params.psd_tol;
    Ok(SdpSolution {
        choi,
        objective: best_obj.clamp(0.0, 1.0),
        iterations,
        tp_residual,
        psd_violation,
        converged,
    })
}

/// `M = (1/d²) sum_m vec(Pi E_m†) vec(Pi E_m†)†` on the `out (x) in`
/// register of the recovery's Choi matrix.
fn build_objective(channel: &KrausChannel, code: &CssCode) -> Result<DenseOperator> {
    let dim = channel.dim();
    let projector = code.codespace_projector()?;
    let d = code.logical_dim() as f64;
    let mut m = DenseOperator::zeros(&[dim, dim]);
    let scale = Complex64::new(1.0 / (d * d), 0.0);
    for e in channel.kraus_ops() {
        let b = projector.matmul(&e.dagger());
        let v: Vec<Complex64> = (0..dim * dim)
            .map(|idx| b.get(idx / dim, idx % dim))
            .collect();
        m = &m + &DenseOperator::outer(&[dim, dim], &v, &v).scaled(scale);
    }
    Ok(m.hermitian_part())
}

/// `tr(A B)` for Hermitian A, B (real part).
fn trace_product(a: &DenseOperator, b: &DenseOperator) -> f64 {
    let dim = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc.re
}

/// Dykstra alternating projections onto {PSD} ∩ {tr_out J = I}. Ends on
/// the affine projection, so the result is trace preserving to machine
/// precision and PSD up to the stopping tolerance. Runs on raw matrices:
/// this is the solver's inner loop.
fn project_cptp(y0: &DenseOperator, dim: usize, tol: f64, max_iter: usize) -> DenseOperator {
    use faer::{c64, Mat};
    let scale = y0.frobenius_norm().max(1.0);
    let total = dim * dim;
    let mut x = y0.to_faer();
    let mut p = Mat::<c64>::zeros(total, total);
    let mut q = Mat::<c64>::zeros(total, total);
    for _ in 0..max_iter {
        let y = project_psd_faer(&(&x + &p));
        p = &(&x + &p) - &y;
        let x_next = project_tp_faer(&(&y + &q), dim);
        q = &(&y + &q) - &x_next;
        let gap = (&x_next - &y).norm_l2();
        x = x_next;
        if gap <= tol * scale {
            break;
        }
    }
    DenseOperator::from_faer(&x, &[dim, dim])
}

fn project_psd_faer(a: &faer::Mat<faer::c64>) -> faer::Mat<faer::c64> {
    use faer::{c64, Mat};
    let n = a.nrows();
    let h = Mat::<c64>::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let (vals, u) = crate::qlinalg::eigen_backend(&h).expect("hermitised eigendecomposition");
    let mut scaled = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        let l = vals[j].max(0.0);
        for i in 0..n {
            scaled[(i, j)] = u[(i, j)] * l;
        }
    }
    &scaled * &u.adjoint()
}

/// Orthogonal projection onto the affine set `tr_out J = I_in`.
fn project_tp_faer(a: &faer::Mat<faer::c64>, dim: usize) -> faer::Mat<faer::c64> {
    use faer::{c64, Mat};
    // marginal[i, j] = sum_o a[(o, i), (o, j)]
    let mut marginal = Mat::<c64>::zeros(dim, dim);
    for o in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                marginal[(i, j)] += a[(o * dim + i, o * dim + j)];
            }
        }
    }
    let inv_d = 1.0 / dim as f64;
    let mut out = a.cloned();
    for o in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let delta = if i == j {
                    c64::new(1.0, 0.0)
                } else {
                    c64::new(0.0, 0.0)
                };
                out[(o * dim + i, o * dim + j)] += (delta - marginal[(i, j)]) * inv_d;
            }
        }
    }
    out
}

/// Optimal fidelities before and after post-composing `extra`:
/// `(F_opt(channel), F_opt(extra ∘ channel))`.
pub fn post_channel_comparison(
    channel: &KrausChannel,
    extra: &KrausChannel,
    code: &CssCode,
    params: &SdpParams,
) -> Result<(SdpSolution, SdpSolution)> {
    let before = sdp_optimal(channel, code, params)?;
    let composed = extra.compose(channel)?;
    let after = sdp_optimal(&composed, code, params)?;
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use crate::channels::{channel_distance, to_choi};
    use crate::codes::build_code;
    use crate::qlinalg::DenseOperator as Op;

    use super::*;

    fn solve(channel: &KrausChannel, code: &CssCode) -> SdpSolution {
        sdp_optimal(channel, code, &SdpParams::default()).unwrap()
    }

    #[test]
    fn identity_channel_is_perfectly_recoverable() {
        let code = build_code("trivial1").unwrap();
        let sol = solve(&KrausChannel::identity(&[2]), &code);
        assert!(
            sol.converged,
            "tp {:.2e} psd {:.2e}",
            sol.tp_residual, sol.psd_violation
        );
        assert!(
            (sol.objective - 1.0).abs() < 1e-7,
            "objective {}",
            sol.objective
        );
    }

    #[test]
    fn unitary_noise_is_perfectly_recoverable_by_its_inverse() {
        let code = build_code("trivial1").unwrap();
        let u = Op::hadamard();
        let channel = KrausChannel::from_unitary(u.clone(), "H").unwrap();
        let sol = solve(&channel, &code);
        assert!(sol.converged);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        // The optimal recovery matches U† in Choi form.
        let inverse = KrausChannel::from_unitary(u.dagger(), "H-inv").unwrap();
        let rebuilt = sol.choi.kraus_channel("sdp-recovery", 1e-6).unwrap();
        assert!(channel_distance(&rebuilt, &inverse).unwrap() < 1e-4);
    }

    #[test]
    fn solution_is_feasible_and_beats_petz() {
        let code = build_code("trivial1").unwrap();
        for p in [0.1, 0.3, 0.5] {
            let channel = KrausChannel::amplitude_damping(p).unwrap();
            let sol = solve(&channel, &code);
            assert!(sol.converged, "p={p}");
            assert!(sol.tp_residual < 1e-9);
            assert!(sol.psd_violation < 1e-10);
            // Petz objective can never exceed the optimum.
            let petz = petz_for_code(&channel, &code, None).unwrap();
            let petz_choi = to_choi(&petz)
                .matrix()
                .clone()
                .with_local_dims(&[2, 2])
                .unwrap();
            let m = build_objective(&channel, &code).unwrap();
            let petz_obj = trace_product(&petz_choi, &m);
            assert!(
                sol.objective >= petz_obj - 1e-7,
                "p={p}: sdp {} < petz {}",
                sol.objective,
                petz_obj
            );
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let code = build_code("css422").unwrap();
        let channel = KrausChannel::bit_flip(0.1)
            .unwrap()
            .tensor_power(4)
            .unwrap();
        assert!(matches!(
            sdp_optimal(&channel, &code, &SdpParams::default()),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn cptp_projection_lands_in_the_set() {
        let params = SdpParams::default();
        let raw = Op::from_fn(&[2, 2], |i, j| {
            Complex64::new((i as f64 - 0.3 * j as f64).sin(), (i * j) as f64 * 0.1)
        });
        let projected = project_cptp(&raw, 2, params.polish_tol, params.polish_max);
        let choi = ChoiMatrix::from_parts(2, 2, projected).unwrap();
        assert!(choi.tp_defect().unwrap() < 1e-11);
        assert!(choi.psd_defect().unwrap() < 1e-10);
    }
}
