//! Action of the step unitary exp(−i H Δt) on a state.
//!
//! H is Hermitian, so a Lanczos recursion reduces the exponential to a small
//! real symmetric tridiagonal problem. Iterations stop once the standard
//! residual estimate drops below the tolerance; if the Krylov cap is hit
//! first the step is split in half and retried, so each macro-step is exact
//! to the requested tolerance regardless of ‖H‖·Δt.

use super::hamiltonian::Hamiltonian;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

const MAX_KRYLOV: usize = 96;

/// exp(−i·dt·H)·psi to within `tol` in 2-norm (for a normalized input).
pub fn expmv(h: &Hamiltonian, dt_us: f64, psi: &DVector<Complex64>, tol: f64) -> DVector<Complex64> {
    let dim = h.dim();
    let beta0 = psi.norm();
    if beta0 == 0.0 || dt_us == 0.0 {
        return psi.clone();
    }
    let m_max = dim.min(MAX_KRYLOV);
    let mut basis: Vec<DVector<Complex64>> = vec![psi.unscale(beta0)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w: DVector<Complex64> = DVector::zeros(dim);

    loop {
        let j = alphas.len();
        h.apply(&basis[j], &mut w);
        if j > 0 {
            w.axpy(Complex64::from(-betas[j - 1]), &basis[j - 1], Complex64::from(1.0));
        }
        let alpha = basis[j].dotc(&w).re;
        w.axpy(Complex64::from(-alpha), &basis[j], Complex64::from(1.0));
        // full reorthogonalization keeps the recursion stable at these sizes
        for v in &basis {
            let overlap = v.dotc(&w);
            w.axpy(-overlap, v, Complex64::from(1.0));
        }
        alphas.push(alpha);
        let beta = w.norm();

        let coeffs = tridiag_exp_column(&alphas, &betas, dt_us);
        let err = beta * coeffs[j].norm() * dt_us.abs();
        let exact_subspace = beta <= 1e-13 || j + 1 == dim;
        if err <= tol || exact_subspace {
            let mut out: DVector<Complex64> = DVector::zeros(dim);
            for (coef, v) in coeffs.iter().zip(&basis) {
                out.axpy(coef * Complex64::from(beta0), v, Complex64::from(1.0));
            }
            return out;
        }
        if j + 1 == m_max {
            // Krylov cap reached: halve the step
            let half = expmv(h, dt_us / 2.0, psi, tol / 2.0);
            return expmv(h, dt_us / 2.0, &half, tol / 2.0);
        }
        betas.push(beta);
        basis.push(w.unscale(beta));
    }
}

/// First column of exp(−i·dt·T) for the real symmetric tridiagonal T given
/// by its diagonal and off-diagonal entries.
fn tridiag_exp_column(alphas: &[f64], betas: &[f64], dt: f64) -> Vec<Complex64> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m - 1).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(t);
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| Complex64::new(0.0, -lambda * dt).exp())
        .collect();
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| phases[l] * eig.eigenvectors[(k, l)] * eig.eigenvectors[(0, l)])
                .sum()
        })
        .collect()
}
