//! Complex linear algebra helpers on tensor-product spaces.
//!
//! States live in C^(d^n) with party 0 the most significant tensor factor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Forces exact Hermitian symmetry, averaging away floating-point drift.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix: (eigenvalues, eigenvectors as
/// columns), unsorted.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = nalgebra::linalg::SymmetricEigen::new(hermitize(m));
    (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
}

/// Unit eigenvector of a Hermitian matrix with the largest eigenvalue.
pub fn principal_eigenvector(m: &CMatrix) -> (f64, CVector) {
    let (values, vectors) = hermitian_eigen(m);
    let (best, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite eigenvalues"))
        .expect("non-empty spectrum");
    (values[best], vectors.column(best).into_owned())
}

/// Projector onto the span of eigenvectors with eigenvalue > 0.
pub fn positive_eigenspace_projector(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let d = m.nrows();
    let mut p = CMatrix::zeros(d, d);
    for (i, &v) in values.iter().enumerate() {
        if v > 0.0 {
            let col = vectors.column(i);
            p += &col * col.adjoint();
        }
    }
    p
}

/// Applies a d x d matrix to the `party`-th tensor factor of a state in
/// C^(d^n).
pub fn apply_single(state: &CVector, party: usize, parties: usize, d: usize, m: &CMatrix) -> CVector {
    let total = state.len();
    debug_assert_eq!(total, d.pow(parties as u32));
    // stride of the party index; party 0 most significant
    let stride = d.pow((parties - party - 1) as u32);
    let mut out = CVector::zeros(total);
    let block = stride * d;
    for base in (0..total).step_by(block) {
        for off in 0..stride {
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..d {
                    let v = state[base + s * stride + off];
                    if v != Complex64::new(0.0, 0.0) {
                        acc += m[(r, s)] * v;
                    }
                }
                out[base + r * stride + off] = acc;
            }
        }
    }
    out
}

/// Kronecker product chain of per-party operators (party 0 most significant).
pub fn kron_all(ops: &[&CMatrix]) -> CMatrix {
    let mut acc = ops[0].clone();
    for op in &ops[1..] {
        acc = acc.kronecker(op);
    }
    acc
}

/// Hermitian square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (i, &v) in values.iter().enumerate() {
        let root = v.max(0.0).sqrt();
        if root > 0.0 {
            let col = vectors.column(i);
            out += (&col * col.adjoint()).scale(root);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn apply_single_matches_kron() {
        let d = 2;
        let n = 3;
        let m = CMatrix::from_row_slice(d, d, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let id = CMatrix::identity(d, d);
        let state = CVector::from_fn(8, |i, _| c(i as f64 + 1.0, -(i as f64)));
        for party in 0..n {
            let ops: Vec<&CMatrix> = (0..n).map(|j| if j == party { &m } else { &id }).collect();
            let full = kron_all(&ops);
            let direct = &full * &state;
            let fast = apply_single(&state, party, n, d, &m);
            for i in 0..8 {
                assert_relative_eq!(direct[i].re, fast[i].re, epsilon = 1e-12);
                assert_relative_eq!(direct[i].im, fast[i].im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn principal_eigenvector_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(5.0, 0.0), c(3.0, 0.0)]));
        let (val, vec) = principal_eigenvector(&m);
        assert_relative_eq!(val, 5.0, epsilon = 1e-12);
        assert_relative_eq!(vec[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]);
        let psd = &a * a.adjoint();
        let root = psd_sqrt(&psd);
        let back = &root * &root;
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(back[(i, j)].re, psd[(i, j)].re, epsilon = 1e-10);
                assert_relative_eq!(back[(i, j)].im, psd[(i, j)].im, epsilon = 1e-10);
            }
        }
    }
}
