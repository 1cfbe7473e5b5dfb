//! Dense complex matrix helpers shared across the crate.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Hilbert-Schmidt inner product Tr(a^dag b).
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::default();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// Largest entrywise absolute difference.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    max_abs_diff(a, &a.adjoint()) <= tol
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first
/// so that callers may pass matrices that are Hermitian only up to roundoff.
/// Returns (eigenvalues ascending, column eigenvectors in matching order).
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let sym = (a + a.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &CMat) -> f64 {
    a.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Principal square root of a PSD Hermitian matrix; small negative
/// eigenvalues from roundoff are clipped to zero.
pub fn psd_sqrt(a: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let n = vals.len();
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = cr(vals[i].max(0.0).sqrt());
    }
    &vecs * d * vecs.adjoint()
}

/// Shannon entropy (nats) of a probability vector that may carry PSD
/// roundoff noise: values in [neg_tol, 0) are clipped to zero.
/// Panics in debug builds on more negative values.
pub fn entropy_of_spectrum(vals: &[f64], neg_tol: f64) -> f64 {
    let mut s = 0.0;
    for &v in vals {
        debug_assert!(v >= neg_tol, "eigenvalue {v} below PSD tolerance");
        if v > 0.0 {
            s -= v * v.ln();
        }
    }
    s.max(0.0)
}

/// Von Neumann entropy (nats) of a Hermitian PSD matrix.
pub fn entropy_of_density(rho: &CMat, neg_tol: f64) -> f64 {
    entropy_of_spectrum(&hermitian_eigenvalues(rho), neg_tol)
}

/// Tr(ab) without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = C64::default();
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Partial trace over the second factor of a density on C^d1 (x) C^d2,
/// with the first factor on the most significant index.
pub fn ptrace_second(rho: &CMat, d1: usize, d2: usize) -> CMat {
    let mut out = CMat::zeros(d1, d1);
    for r in 0..d1 {
        for rp in 0..d1 {
            let mut acc = C64::default();
            for s in 0..d2 {
                acc += rho[(r * d2 + s, rp * d2 + s)];
            }
            out[(r, rp)] = acc;
        }
    }
    out
}

/// Partial trace over the first factor.
pub fn ptrace_first(rho: &CMat, d1: usize, d2: usize) -> CMat {
    let mut out = CMat::zeros(d2, d2);
    for s in 0..d2 {
        for sp in 0..d2 {
            let mut acc = C64::default();
            for r in 0..d1 {
                acc += rho[(r * d2 + s, r * d2 + sp)];
            }
            out[(s, sp)] = acc;
        }
    }
    out
}

/// Partial transpose over the second factor.
pub fn partial_transpose_second(rho: &CMat, d1: usize, d2: usize) -> CMat {
    let mut out = CMat::zeros(d1 * d2, d1 * d2);
    for r in 0..d1 {
        for rp in 0..d1 {
            for s in 0..d2 {
                for sp in 0..d2 {
                    out[(r * d2 + s, rp * d2 + sp)] = rho[(r * d2 + sp, rp * d2 + s)];
                }
            }
        }
    }
    out
}
