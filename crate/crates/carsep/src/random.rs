//! Seed-deterministic random matrices, vectors, and states used by the
//! property suites and the separable-state generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::algebra::AlgebraRef;
use crate::basis::SubalgebraBasis;
use crate::linalg::{c, cr, CMat, CVec};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for subtask `index`; the mapping does not
/// depend on how many streams are drawn, so enlarging a batch keeps the
/// earlier items unchanged.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    // splitmix64 step on master + index
    let mut z = master
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the standard
/// phase fix.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / cr(d.norm()) } else { cr(1.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Normalized random vector.
pub fn pure_vector<R: Rng>(rng: &mut R, dim: usize) -> CVec {
    let mut v = CVec::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let n = v.norm();
    v /= cr(n);
    v
}

/// Random density of the given rank from the Ginibre ensemble.
pub fn density<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> CMat {
    let g = ginibre(rng, dim, rank.clamp(1, dim));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m.scale(1.0 / tr)
}

/// Dirichlet(1, ..., 1) weights (uniform on the simplex).
pub fn dirichlet<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    w
}

/// Occupation-basis indices of the given particle-number parity.
pub fn parity_sector_indices(alg: &AlgebraRef, even: bool) -> Vec<usize> {
    (0..alg.dim())
        .filter(|&i| ((i as u32).count_ones() % 2 == 0) == even)
        .collect()
}

/// Random normalized vector supported in a single parity sector; its vector
/// state is even and pure.
pub fn even_pure_vector<R: Rng>(alg: &AlgebraRef, rng: &mut R) -> CVec {
    let even: bool = rng.random();
    let idx = parity_sector_indices(alg, even);
    let sub = pure_vector(rng, idx.len());
    let mut v = CVec::zeros(alg.dim());
    for (k, &i) in idx.iter().enumerate() {
        v[i] = sub[k];
    }
    v
}

/// Random even density: a parity-block-diagonal mixture of Ginibre blocks
/// with Dirichlet sector weights.
pub fn even_density<R: Rng>(alg: &AlgebraRef, rng: &mut R) -> CMat {
    let dim = alg.dim();
    let mut out = CMat::zeros(dim, dim);
    let weights = dirichlet(rng, 2);
    for (w, even) in weights.iter().zip([true, false]) {
        let idx = parity_sector_indices(alg, even);
        let block = density(rng, idx.len(), idx.len());
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                out[(ia, ib)] += block[(a, b)] * cr(*w);
            }
        }
    }
    out
}

/// Random element of a subalgebra with standard-normal coefficients over the
/// orthonormal monomial basis.
pub fn subalgebra_element<R: Rng>(
    basis: &SubalgebraBasis,
    rng: &mut R,
    filter: crate::basis::GradeFilter,
) -> CMat {
    let indices = basis.indices(filter);
    let rows = basis.on_big(0).nrows();
    let mut out = CMat::zeros(rows, rows);
    for i in indices {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        out += basis.on_big(i) * c(re, im);
    }
    out
}
