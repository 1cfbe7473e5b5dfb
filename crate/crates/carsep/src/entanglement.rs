//! Convex-roof entanglement-of-formation functionals.
//!
//! For a state of a partitioned system the weighted roof at mixing
//! parameter `k` is the infimum over decompositions into states of
//!
//! ```text
//! sum_i  lambda_i [ k S(omega_i|I) + (1-k) S(omega_i|J) ]
//! ```
//!
//! Marginal entropy is concave, so the infimum is attained on pure
//! decompositions; every pure decomposition of a density of rank `r` into at
//! most `m` components arises from an `r x m` row isometry applied to the
//! sub-normalized eigenvectors. The optimizer performs projected gradient
//! descent with analytic gradients over that isometry, restarted from
//! seeded random initial points. Returned values are upper bounds of the
//! infimum; `converged` reports agreement of the best restarts only, not a
//! global guarantee.
//!
//! The superselection-respecting roof (infimum over even-state
//! decompositions, defined for even states) splits the state into its
//! parity blocks and runs the roof within each block: pure even components
//! live entirely in one parity eigenspace, grouping any even decomposition
//! by sector, and for even pure components all four marginal entropies
//! coincide, so the block cost may be taken on the I side. A direct
//! optimizer over sector-constrained decompositions of the full state is
//! kept as an independent slow path and cross-checked in the test suite.

use rayon::prelude::*;

use crate::basis::Partition;
use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, hermitian_eigen, psd_sqrt, trace_product, CMat, CVec,
};
use crate::random;
use crate::state::{Decomposition, QuantumState};
use crate::tol;

/// Options for the roof optimizer. Results are deterministic given a seed;
/// enlarging `restarts` never increases the returned value.
#[derive(Debug, Clone)]
pub struct RoofOptions {
    pub restarts: usize,
    /// Components per decomposition; defaults to `min(rank^2, 32)`.
    pub max_components: Option<usize>,
    /// Agreement tolerance (nats) used for the `converged` flag.
    pub tolerance: f64,
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for RoofOptions {
    fn default() -> RoofOptions {
        RoofOptions {
            restarts: 32,
            max_components: None,
            tolerance: tol::ROOF_OPT,
            seed: 0,
            max_iters: 400,
        }
    }
}

impl RoofOptions {
    pub fn seeded(seed: u64) -> RoofOptions {
        RoofOptions {
            seed,
            ..RoofOptions::default()
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> RoofOptions {
        self.restarts = restarts;
        self
    }
}

/// Which marginal the plain entanglement of formation is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    I,
    J,
}

/// Upper-bound estimate of a roof value with the decomposition that
/// achieves it.
#[derive(Debug, Clone)]
pub struct RoofResult {
    /// Best value found (nats); an upper bound of the infimum.
    pub value: f64,
    pub decomposition: Decomposition,
    pub restarts_used: usize,
    /// Whether the best three restarts agree within the tolerance.
    pub converged: bool,
    /// Spread of the best three restart values.
    pub gap_estimate: f64,
    /// Mixing parameter whose weighted cost reproduces `value` from the
    /// stored decomposition (1 for the superselection-respecting roof,
    /// whose components are even and pure).
    pub cost_k: f64,
}

impl RoofResult {
    /// Recomputes `sum_i lambda_i cost(component_i)` from the stored
    /// decomposition; agrees with `value` within 1e-9.
    pub fn recompute_value(&self, partition: &Partition) -> Result<f64> {
        let mut acc = 0.0;
        for (w, comp) in self
            .decomposition
            .weights()
            .iter()
            .zip(self.decomposition.components())
        {
            acc += w * weighted_marginal_cost(comp, partition, self.cost_k)?;
        }
        Ok(acc)
    }

    pub fn is_numerically_zero(&self) -> bool {
        self.value < tol::ROOF_ZERO
    }
}

fn weighted_marginal_cost(state: &QuantumState, partition: &Partition, k: f64) -> Result<f64> {
    let mut cost = 0.0;
    if k > 0.0 {
        cost += k * state.restrict_with(partition.basis_i())?.entropy();
    }
    if k < 1.0 {
        cost += (1.0 - k) * state.restrict_with(partition.basis_j())?.entropy();
    }
    Ok(cost)
}

/// Weighted entanglement of formation: the roof of
/// `k S(.|I) + (1-k) S(.|J)` over all decompositions. For pure states the
/// optimization is bypassed and the closed form
/// `k S(omega|I) + (1-k) S(omega|J)` is returned.
pub fn eof_weighted(
    state: &QuantumState,
    partition: &Partition,
    k: f64,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::WeightOutOfRange(k));
    }
    require_ambient(state, partition)?;
    if state.is_pure() {
        let value = weighted_marginal_cost(state, partition, k)?;
        return Ok(RoofResult {
            value,
            decomposition: Decomposition::new(vec![1.0], vec![state.clone()])?,
            restarts_used: 0,
            converged: true,
            gap_estimate: 0.0,
            cost_k: k,
        });
    }
    let problem = vec![block_from_density(state.density())];
    let outcome = optimize_blocks(&problem, partition, k, opts);
    outcome.into_result(partition, k, opts)
}

/// The averaged entanglement of formation, the `k = 1/2` roof. Zero exactly
/// on states separable for the CAR pair.
pub fn eof_averaged(
    state: &QuantumState,
    partition: &Partition,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    eof_weighted(state, partition, 0.5, opts)
}

/// Plain entanglement of formation on one side: `k = 1` for the I marginal
/// and `k = 0` for the J marginal. Quantifies nonseparability for the
/// tensor pair of that subalgebra with its commutant.
pub fn eof_tensor(
    state: &QuantumState,
    partition: &Partition,
    side: Side,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    let k = match side {
        Side::I => 1.0,
        Side::J => 0.0,
    };
    eof_weighted(state, partition, k, opts)
}

/// Entanglement of formation under the univalence superselection rule: the
/// roof over even-state decompositions, defined for even states only.
pub fn eof_superselected(
    state: &QuantumState,
    partition: &Partition,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    eof_superselected_side(state, partition, Side::I, opts)
}

/// Same roof with the block cost taken on the chosen marginal; the two
/// sides agree for even pure components and are cross-checked in tests.
pub fn eof_superselected_side(
    state: &QuantumState,
    partition: &Partition,
    side: Side,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    require_ambient(state, partition)?;
    let k = match side {
        Side::I => 1.0,
        Side::J => 0.0,
    };
    let blocks = state.parity_blocks()?;
    let mut value = 0.0;
    let mut weights = Vec::new();
    let mut components = Vec::new();
    let mut converged = true;
    let mut gap_estimate = 0.0;
    let mut restarts_used = 0;
    for (w, block) in [
        (blocks.even_weight, blocks.even_block),
        (blocks.odd_weight, blocks.odd_block),
    ] {
        let Some(block) = block else { continue };
        let sub = eof_weighted(&block, partition, k, opts)?;
        value += w * sub.value;
        gap_estimate += w * sub.gap_estimate;
        converged &= sub.converged;
        restarts_used = restarts_used.max(sub.restarts_used);
        for (bw, comp) in sub
            .decomposition
            .weights()
            .iter()
            .zip(sub.decomposition.components())
        {
            weights.push(w * bw);
            components.push(comp.clone());
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(RoofResult {
        value: value.max(0.0),
        decomposition: Decomposition::new(weights, components)?,
        restarts_used,
        converged,
        gap_estimate,
        cost_k: k,
    })
}

/// Independent slow path for the superselection-respecting roof: a joint
/// optimization over decompositions of the full state whose components are
/// constrained to single parity sectors.
pub fn eof_superselected_direct(
    state: &QuantumState,
    partition: &Partition,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    require_ambient(state, partition)?;
    let blocks = state.parity_blocks()?;
    let dim = state.algebra().dim();
    let mut problem = Vec::new();
    for (w, block) in [
        (blocks.even_weight, blocks.even_block),
        (blocks.odd_weight, blocks.odd_block),
    ] {
        if let Some(block) = block {
            // Sub-normalized sector block of the full density.
            problem.push(block_from_density(&block.density().clone().scale(w)));
        }
    }
    if problem.is_empty() {
        return Err(Error::NotAState("state with no parity support".into()));
    }
    let _ = dim;
    let outcome = optimize_blocks(&problem, partition, 1.0, opts);
    let mut result = outcome.into_result(partition, 1.0, opts)?;
    result.cost_k = 1.0;
    Ok(result)
}

/// Closed-form two-qubit entanglement of formation (nats) for the tensor
/// pair of a two-mode partition, via the spin-flip concurrence. Serves as
/// an independent oracle for the roof optimizer.
pub fn concurrence_eof(state: &QuantumState, partition: &Partition) -> Result<f64> {
    require_ambient(state, partition)?;
    if partition.dim_i() != 2 || partition.dim_j() != 2 {
        return Err(Error::WrongModeCount {
            expected: 2,
            got: partition.i_labels().len() + partition.j_labels().len(),
        });
    }
    let rho = state.density();
    let yy = {
        let y = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        y.kronecker(&y)
    };
    let rho_conj = rho.map(|z| z.conj());
    let rho_tilde = &yy * rho_conj * &yy;
    let s = psd_sqrt(rho);
    let m = &s * rho_tilde * &s;
    let (vals, _) = hermitian_eigen(&m);
    let mut roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let concurrence = (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0);
    let x = 0.5 * (1.0 + (1.0 - concurrence * concurrence).max(0.0).sqrt());
    Ok(binary_entropy(x))
}

fn binary_entropy(x: f64) -> f64 {
    let mut s = 0.0;
    for p in [x, 1.0 - x] {
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    s.max(0.0)
}

// ---------------------------------------------------------------------------
// Optimizer internals
// ---------------------------------------------------------------------------

/// One block of the decomposition problem: sub-normalized eigenvector
/// columns of (part of) the density.
struct Block {
    /// d x r matrix of eigenvectors scaled by sqrt(eigenvalue).
    x: CMat,
    rank: usize,
}

fn block_from_density(rho: &CMat) -> Block {
    let (vals, vecs) = hermitian_eigen(rho);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 1e-12).collect();
    let d = rho.nrows();
    let mut x = CMat::zeros(d, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let scaled = vecs.column(i) * cr(vals[i].sqrt());
        x.set_column(col, &scaled);
    }
    Block {
        x,
        rank: keep.len(),
    }
}

/// Cached per-partition data for evaluating marginal costs of component
/// vectors.
struct CostCtx<'a> {
    partition: &'a Partition,
    k: f64,
    /// Adjoints of the small-representation basis elements of J, scaled by
    /// 1/2^|J| (so that sigma_J = sum_b <phi, F_b phi> f_small_adj[b]).
    f_small_adj: Vec<CMat>,
}

impl<'a> CostCtx<'a> {
    fn new(partition: &'a Partition, k: f64) -> CostCtx<'a> {
        let bj = partition.basis_j();
        let scale = 1.0 / partition.dim_j() as f64;
        let f_small_adj = (0..bj.len())
            .map(|b| bj.on_small(b).adjoint().scale(scale))
            .collect();
        CostCtx {
            partition,
            k,
            f_small_adj,
        }
    }

    /// Cost of a sub-normalized component vector and, if requested, the
    /// gradient vector `G phi`.
    fn component(&self, phi: &CVec, with_grad: bool) -> (f64, Option<CVec>) {
        let lam = phi.norm_squared();
        if lam < 1e-14 {
            return (0.0, with_grad.then(|| CVec::zeros(phi.len())));
        }
        let d1 = self.partition.dim_i();
        let d2 = self.partition.dim_j();
        let mut cost = lam * lam.ln();
        let mut grad = with_grad.then(|| phi * cr(lam.ln() + 1.0));

        if self.k > 0.0 {
            // Marginal on the leading factor via the reshaped vector.
            let phi_mat = CMat::from_fn(d1, d2, |r, s| phi[r * d2 + s]);
            let sigma = &phi_mat * phi_mat.adjoint();
            let (trace_eta, logp1) = log_terms(&sigma, with_grad);
            cost -= self.k * trace_eta;
            if let Some(g) = grad.as_mut() {
                let glead = logp1.expect("gradient requested") * &phi_mat;
                for r in 0..d1 {
                    for s in 0..d2 {
                        g[r * d2 + s] -= cr(self.k) * glead[(r, s)];
                    }
                }
            }
        }
        if self.k < 1.0 {
            // Marginal on the subalgebra of J via the monomial expansion.
            let bj = self.partition.basis_j();
            let count = bj.len();
            let mut images: Vec<CVec> = Vec::with_capacity(if with_grad { count } else { 0 });
            let ds = self.f_small_adj[0].nrows();
            let mut sigma = CMat::zeros(ds, ds);
            for b in 0..count {
                let img = bj.on_big(b) * phi;
                let expect = phi.dotc(&img);
                sigma += &self.f_small_adj[b] * expect;
                if with_grad {
                    images.push(img);
                }
            }
            let (trace_eta, logp1) = log_terms(&sigma, with_grad);
            cost -= (1.0 - self.k) * trace_eta;
            if let Some(g) = grad.as_mut() {
                let logp1 = logp1.expect("gradient requested");
                for b in 0..count {
                    let coef = trace_product(&logp1, &self.f_small_adj[b]);
                    *g -= &images[b] * (coef * cr(1.0 - self.k));
                }
            }
        }
        (cost, grad)
    }
}

/// Returns (Tr eta(sigma), ln(sigma) + id) for a PSD Hermitian matrix with
/// eta(x) = x ln x, eigenvalues clipped at 1e-15 inside the logarithm.
fn log_terms(sigma: &CMat, with_log: bool) -> (f64, Option<CMat>) {
    let (vals, vecs) = hermitian_eigen(sigma);
    let mut trace_eta = 0.0;
    for &v in &vals {
        if v > 0.0 {
            trace_eta += v * v.ln();
        }
    }
    let logm = with_log.then(|| {
        let n = vals.len();
        let mut diag = CMat::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            diag[(i, i)] = cr(v.max(1e-15).ln() + 1.0);
        }
        &vecs * diag * vecs.adjoint()
    });
    (trace_eta, logm)
}

/// Orthonormalizes the rows of each block matrix (thin QR of the adjoint,
/// with the R diagonal phase-fixed so that feasible inputs are returned
/// unchanged).
fn retract(ws: &[CMat]) -> Vec<CMat> {
    ws.iter()
        .map(|w| {
            let qr = w.adjoint().qr();
            let q = qr.q();
            let r = qr.r();
            let mut out = q.adjoint();
            for j in 0..out.nrows() {
                let d = r[(j, j)];
                if d.norm() > 0.0 {
                    let phase = (d / cr(d.norm())).conj();
                    for col in 0..out.ncols() {
                        out[(j, col)] *= phase;
                    }
                }
            }
            out
        })
        .collect()
}

fn random_row_isometry<R: rand::Rng>(rng: &mut R, r: usize, m: usize) -> CMat {
    let g = random::ginibre(rng, m, r);
    g.qr().q().adjoint()
}

struct Evaluation {
    value: f64,
    /// Riemannian gradients: Euclidean gradients projected onto the tangent
    /// space of the row-isometry manifold at the current point.
    grads: Option<Vec<CMat>>,
    grad_norm2: f64,
}

fn evaluate(blocks: &[Block], ws: &[CMat], ctx: &CostCtx, with_grad: bool) -> Evaluation {
    let mut value = 0.0;
    let mut grads = with_grad.then(Vec::new);
    let mut grad_norm2 = 0.0;
    for (block, w) in blocks.iter().zip(ws) {
        let m = w.ncols();
        let mut gamma = with_grad.then(|| CMat::zeros(block.rank, m));
        for i in 0..m {
            let wi = w.column(i).into_owned();
            let phi = &block.x * &wi;
            let (cost, gphi) = ctx.component(&phi, with_grad);
            value += cost;
            if let (Some(gm), Some(gphi)) = (gamma.as_mut(), gphi) {
                let col = block.x.adjoint() * gphi;
                gm.set_column(i, &col);
            }
        }
        if let (Some(gs), Some(gamma)) = (grads.as_mut(), gamma) {
            // Tangent projection at W (rows orthonormal): remove the
            // component that only rotates within the constraint's normal
            // space, Pi = Gamma - herm(Gamma W^dag) W.
            let s = &gamma * w.adjoint();
            let herm = (&s + s.adjoint()).scale(0.5);
            let projected = gamma - herm * w;
            grad_norm2 += projected.norm_squared();
            gs.push(projected);
        }
    }
    Evaluation {
        value,
        grads,
        grad_norm2,
    }
}

fn descend(blocks: &[Block], ws0: Vec<CMat>, ctx: &CostCtx, max_iters: usize) -> (f64, Vec<CMat>) {
    let mut ws = ws0;
    let mut eval = evaluate(blocks, &ws, ctx, true);
    let mut best = (eval.value, ws.clone());
    let mut step = 0.1;
    let mut previous: Option<(Vec<CMat>, Vec<CMat>)> = None; // (ws, grads)
    let mut recent = std::collections::VecDeque::from([eval.value]);
    let mut tiny = 0usize;
    for iter in 0..max_iters {
        if eval.grad_norm2.sqrt() <= 1e-11 * (1.0 + eval.value.abs()) {
            break;
        }
        let grads = eval.grads.clone().expect("gradient present");

        // Barzilai-Borwein step from the previous point, alternating the two
        // variants; falls back to the last accepted step on the first pass.
        if let Some((pw, pg)) = &previous {
            let mut sy = 0.0;
            let mut yy = 0.0;
            let mut ss = 0.0;
            for ((w, pw), (g, pg)) in ws.iter().zip(pw).zip(grads.iter().zip(pg)) {
                let dw = w - pw;
                let dg = g - pg;
                sy += crate::linalg::hs_inner(&dw, &dg).re;
                yy += dg.norm_squared();
                ss += dw.norm_squared();
            }
            let bb = if iter % 2 == 0 {
                ss / sy.abs().max(1e-16)
            } else {
                sy.abs() / yy.max(1e-16)
            };
            if bb.is_finite() && bb > 0.0 {
                step = bb.clamp(1e-8, 10.0);
            }
        }

        // Non-monotone Armijo check against the worst recent value.
        let f_ref = recent.iter().copied().fold(f64::MIN, f64::max);
        let mut accepted = None;
        let mut trial_step = step;
        for _ in 0..40 {
            let trial: Vec<CMat> = ws
                .iter()
                .zip(&grads)
                .map(|(w, g)| w - g * cr(trial_step))
                .collect();
            let trial = retract(&trial);
            let f_try = evaluate(blocks, &trial, ctx, false).value;
            if f_try <= f_ref - 1e-4 * trial_step * eval.grad_norm2 {
                accepted = Some((trial, f_try));
                break;
            }
            trial_step *= 0.4;
            if trial_step < 1e-14 {
                break;
            }
        }
        let Some((trial, f_try)) = accepted else { break };
        let improvement = eval.value - f_try;
        previous = Some((ws.clone(), grads));
        ws = trial;
        eval = evaluate(blocks, &ws, ctx, true);
        step = trial_step;
        if eval.value < best.0 {
            best = (eval.value, ws.clone());
        }
        recent.push_back(eval.value);
        if recent.len() > 5 {
            recent.pop_front();
        }
        if improvement.abs() <= 1e-12 * (1.0 + eval.value.abs()) {
            tiny += 1;
            if tiny >= 5 {
                break;
            }
        } else {
            tiny = 0;
        }
    }
    best
}

struct Outcome {
    best_value: f64,
    best_ws: Vec<CMat>,
    restart_values: Vec<f64>,
    blocks: Vec<Block>,
}

impl Outcome {
    fn into_result(self, partition: &Partition, k: f64, opts: &RoofOptions) -> Result<RoofResult> {
        let mut weights = Vec::new();
        let mut components = Vec::new();
        for (block, w) in self.blocks.iter().zip(&self.best_ws) {
            for i in 0..w.ncols() {
                let phi = &block.x * w.column(i).into_owned();
                let lam = phi.norm_squared();
                if lam > 1e-12 {
                    let density = (&phi * phi.adjoint()).scale(1.0 / lam);
                    weights.push(lam);
                    components.push(QuantumState::from_density(partition.ambient(), density)?);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut sorted = self.restart_values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let top = sorted.iter().take(3).collect::<Vec<_>>();
        let gap_estimate = match top.as_slice() {
            [] | [_] => 0.0,
            xs => *xs[xs.len() - 1] - *xs[0],
        };
        let converged = sorted.len() < 3 || gap_estimate <= opts.tolerance;
        Ok(RoofResult {
            value: self.best_value.max(0.0),
            decomposition: Decomposition::new(weights, components)?,
            restarts_used: self.restart_values.len(),
            converged,
            gap_estimate,
            cost_k: k,
        })
    }
}

fn optimize_blocks(
    blocks_src: &[Block],
    partition: &Partition,
    k: f64,
    opts: &RoofOptions,
) -> Outcome {
    let ctx = CostCtx::new(partition, k);
    let sizes: Vec<(usize, usize)> = blocks_src
        .iter()
        .map(|b| {
            let m = opts
                .max_components
                .unwrap_or_else(|| (b.rank * b.rank).min(32))
                .max(b.rank);
            (b.rank, m)
        })
        .collect();

    let runs: Vec<(f64, Vec<CMat>)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = random::rng_from_seed(random::stream_seed(opts.seed, t as u64));
            let ws0: Vec<CMat> = sizes
                .iter()
                .map(|&(r, m)| random_row_isometry(&mut rng, r, m))
                .collect();
            descend(blocks_src, ws0, &ctx, opts.max_iters)
        })
        .collect();

    let mut best = 0usize;
    for (t, run) in runs.iter().enumerate() {
        if run.0 < runs[best].0 {
            best = t;
        }
    }
    let restart_values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let best_value = runs[best].0;
    let best_ws = runs[best].1.clone();
    Outcome {
        best_value,
        best_ws,
        restart_values,
        blocks: blocks_src
            .iter()
            .map(|b| Block {
                x: b.x.clone(),
                rank: b.rank,
            })
            .collect(),
    }
}

fn require_ambient(state: &QuantumState, partition: &Partition) -> Result<()> {
    if state.algebra().labels() != partition.ambient().labels() {
        return Err(Error::AlgebraMismatch {
            expected: partition.ambient().labels().to_vec(),
            got: state.algebra().labels().to_vec(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;
    use crate::state::product_extension;

    const LN2: f64 = std::f64::consts::LN_2;

    fn part() -> Partition {
        Partition::new(&[1], &[2]).unwrap()
    }

    fn opts() -> RoofOptions {
        RoofOptions::seeded(7).with_restarts(16)
    }

    #[test]
    fn component_gradient_matches_finite_differences() {
        let part = part();
        for k in [0.0, 0.3, 1.0] {
            let ctx = CostCtx::new(&part, k);
            let mut rng = random::rng_from_seed(99);
            let phi = random::pure_vector(&mut rng, 4) * cr(0.8);
            let (f0, g) = ctx.component(&phi, true);
            let g = g.unwrap();
            let h = 1e-6;
            for dir in 0..4 {
                for im in [false, true] {
                    let mut phi2 = phi.clone();
                    phi2[dir] += if im { c(0.0, h) } else { cr(h) };
                    let (f1, _) = ctx.component(&phi2, false);
                    let numeric = (f1 - f0) / h;
                    let analytic = if im { 2.0 * g[dir].im } else { 2.0 * g[dir].re };
                    assert!(
                        (numeric - analytic).abs() <= 1e-4 * (1.0 + analytic.abs()),
                        "k {k} dir {dir} im {im}: numeric {numeric} analytic {analytic}"
                    );
                }
            }
        }
    }

    #[test]
    fn pure_state_shortcuts() {
        let part = part();
        let bell = named::psi_plus(part.ambient()).unwrap();
        let r = eof_weighted(&bell, &part, 0.5, &opts()).unwrap();
        assert!((r.value - LN2).abs() <= 1e-10);
        assert_eq!(r.restarts_used, 0);

        let varrho = named::varrho_asym(part.ambient()).unwrap();
        let avr = eof_averaged(&varrho, &part, &opts()).unwrap();
        assert!((avr.value - 0.5 * LN2).abs() <= 1e-10);
        let ei = eof_tensor(&varrho, &part, Side::I, &opts()).unwrap();
        let ej = eof_tensor(&varrho, &part, Side::J, &opts()).unwrap();
        assert!(ei.value <= 1e-10);
        assert!((ej.value - LN2).abs() <= 1e-10);
    }

    #[test]
    fn tracial_state_roofs_vanish() {
        let part = part();
        let tau = QuantumState::tracial(part.ambient());
        for k in [0.0, 0.5, 1.0] {
            let r = eof_weighted(&tau, &part, k, &opts()).unwrap();
            assert!(r.value <= tol::ROOF_ZERO, "k={k} value {}", r.value);
        }
        let t = eof_superselected(&tau, &part, &opts()).unwrap();
        assert!(t.value <= tol::ROOF_ZERO, "superselected {}", t.value);
    }

    #[test]
    fn superselected_examples() {
        let part = part();
        // Even product extensions have vanishing superselected roof.
        let alg_i = part.basis_i().small_algebra().clone();
        let alg_j = part.basis_j().small_algebra().clone();
        let mut rng = random::rng_from_seed(3);
        let w1 = QuantumState::from_density(&alg_i, random::even_density(&alg_i, &mut rng))
            .unwrap();
        let w2 = QuantumState::from_density(&alg_j, random::even_density(&alg_j, &mut rng))
            .unwrap();
        let prod = product_extension(&part, &w1, &w2).unwrap();
        let r = eof_superselected(&prod, &part, &opts()).unwrap();
        assert!(r.value <= tol::ROOF_ZERO, "value {}", r.value);

        // The hopping pair is pure and even with entropy ln 2 marginals.
        let bell = named::psi_plus(part.ambient()).unwrap();
        let r = eof_superselected(&bell, &part, &opts()).unwrap();
        assert!((r.value - LN2).abs() <= 1e-9);

        // Noneven states are rejected.
        let varrho = named::varrho_asym(part.ambient()).unwrap();
        assert!(matches!(
            eof_superselected(&varrho, &part, &opts()),
            Err(Error::NotEven(_))
        ));
    }

    #[test]
    fn value_recomputes_from_decomposition() {
        let part = part();
        let (p2, st) = named::phi_lambda_default(0.8).unwrap();
        let r = eof_averaged(&st, &p2, &opts()).unwrap();
        let recomputed = r.recompute_value(&p2).unwrap();
        assert!((recomputed - r.value).abs() <= 1e-9);
        assert!(r.value >= 0.0);
        let _ = part;
    }

    #[test]
    fn monotone_in_restarts() {
        let part = part();
        let (p2, st) = named::phi_lambda_default(0.9).unwrap();
        let few = eof_averaged(&st, &p2, &RoofOptions::seeded(11).with_restarts(4)).unwrap();
        let many = eof_averaged(&st, &p2, &RoofOptions::seeded(11).with_restarts(12)).unwrap();
        assert!(many.value <= few.value + 1e-12);
        let _ = part;
    }

    #[test]
    fn concurrence_oracle_basics() {
        let part = part();
        let tau = QuantumState::tracial(part.ambient());
        assert!(concurrence_eof(&tau, &part).unwrap() <= 1e-12);
        let bell = named::psi_plus(part.ambient()).unwrap();
        assert!((concurrence_eof(&bell, &part).unwrap() - LN2).abs() <= 1e-12);
    }

    #[test]
    fn optimizer_matches_oracle_on_samples() {
        let part = part();
        let mut rng = random::rng_from_seed(17);
        for trial in 0..8 {
            let rho = random::density(&mut rng, 4, if trial % 2 == 0 { 2 } else { 4 });
            let st = QuantumState::from_density(part.ambient(), rho).unwrap();
            let oracle = concurrence_eof(&st, &part).unwrap();
            let roof = eof_tensor(&st, &part, Side::I, &opts()).unwrap();
            assert!(
                (roof.value - oracle).abs() <= 5e-3,
                "trial {trial}: roof {} oracle {}",
                roof.value,
                oracle
            );
        }
    }

    #[test]
    fn superselected_direct_path_agrees() {
        let part = part();
        let mut rng = random::rng_from_seed(23);
        for _ in 0..4 {
            let amb = part.ambient().clone();
            let rho = random::even_density(&amb, &mut rng);
            let st = QuantumState::from_density(&amb, rho).unwrap();
            let fast = eof_superselected(&st, &part, &opts()).unwrap();
            let slow = eof_superselected_direct(&st, &part, &opts()).unwrap();
            assert!(
                (fast.value - slow.value).abs() <= tol::ROOF_OPT,
                "fast {} slow {}",
                fast.value,
                slow.value
            );
        }
    }

    #[test]
    fn phi_lambda_has_positive_roofs_but_zero_tensor_eof() {
        let (part, st) = named::phi_lambda_default(1.0).unwrap();
        let avr = eof_averaged(&st, &part, &opts()).unwrap();
        let sup = eof_superselected(&st, &part, &opts()).unwrap();
        assert!(avr.value > 1e-3, "averaged {}", avr.value);
        assert!(sup.value > 1e-3, "superselected {}", sup.value);
        for side in [Side::I, Side::J] {
            let e = eof_tensor(&st, &part, side, &opts()).unwrap();
            assert!(e.value <= 1e-3, "tensor side {:?} value {}", side, e.value);
        }
    }
}
