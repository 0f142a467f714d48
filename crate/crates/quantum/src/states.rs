//! Two-qubit state diagnostics: Wootters concurrence and the Horodecki CHSH
//! criterion.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::linalg::{hermitian_eigen, psd_sqrt, CMatrix, CVector};
use crate::QuantumError;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices.
pub fn pauli(i: usize) -> CMatrix {
    match i {
        0 => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        1 => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        2 => CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        _ => panic!("pauli index ranges over 0..3"),
    }
}

fn check_two_qubit_density(rho: &CMatrix) -> Result<(), QuantumError> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(QuantumError::BadState("density matrix must be 4x4".into()));
    }
    let trace: Complex64 = rho.diagonal().iter().sum();
    if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
        return Err(QuantumError::BadState(format!("trace {trace} is not 1")));
    }
    let (values, _) = hermitian_eigen(rho);
    if values.iter().any(|&v| v < -1e-10) {
        return Err(QuantumError::BadState("density matrix is not PSD".into()));
    }
    Ok(())
}

/// The rank-2 two-qubit family p |Psi_1><Psi_1| + (1-p) |Psi_2><Psi_2| with
/// |Psi_1> = cos(theta)|00> + sin(theta)|11> and |Psi_2> = |01>.
pub fn rho_p_theta(p: f64, theta: f64) -> CMatrix {
    let psi1 = CVector::from_vec(vec![
        c(theta.cos(), 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(theta.sin(), 0.0),
    ]);
    let psi2 = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    (&psi1 * psi1.adjoint()).scale(p) + (&psi2 * psi2.adjoint()).scale(1.0 - p)
}

/// Wootters concurrence of a two-qubit density matrix:
/// max(0, l1 - l2 - l3 - l4) over the decreasing spin-flipped spectrum.
pub fn concurrence(rho: &CMatrix) -> Result<f64, QuantumError> {
    check_two_qubit_density(rho)?;
    let yy = pauli(1).kronecker(&pauli(1));
    let rho_tilde = &yy * rho.map(|z| z.conj()) * &yy;
    // eigenvalues of rho * rho_tilde equal those of the Hermitian
    // sqrt(rho) rho_tilde sqrt(rho)
    let root = psd_sqrt(rho);
    let inner = &root * rho_tilde * &root;
    let (mut values, _) = hermitian_eigen(&inner);
    let mut lambdas: Vec<f64> = values
        .drain(..)
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Horodecki CHSH quantity M(rho): the sum of the two largest eigenvalues of
/// T^T T, where T_ij = Tr(rho sigma_i x sigma_j). The state can violate CHSH
/// for some measurements iff M > 1.
pub fn horodecki_chsh(rho: &CMatrix) -> Result<f64, QuantumError> {
    check_two_qubit_density(rho)?;
    let mut t = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let op = pauli(i).kronecker(&pauli(j));
            let val: Complex64 = (rho * op).diagonal().iter().sum();
            t[(i, j)] = val.re;
        }
    }
    let u = t.transpose() * t;
    let se = nalgebra::linalg::SymmetricEigen::new(u);
    let mut eig: Vec<f64> = se.eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(eig[0] + eig[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bell_phi_plus() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        &psi * psi.adjoint()
    }

    #[test]
    fn concurrence_extremes() {
        // product pure state: zero
        let psi = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let product = &psi * psi.adjoint();
        assert_relative_eq!(concurrence(&product).unwrap(), 0.0, epsilon = 1e-9);
        // maximally entangled: one
        assert_relative_eq!(concurrence(&bell_phi_plus()).unwrap(), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn horodecki_extremes() {
        assert_relative_eq!(horodecki_chsh(&bell_phi_plus()).unwrap(), 2.0, epsilon = 1e-9);
        let mixed = CMatrix::identity(4, 4).scale(0.25);
        assert_relative_eq!(horodecki_chsh(&mixed).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rho_p_theta_at_reference_point() {
        let rho = rho_p_theta(0.955, std::f64::consts::PI / 14.0);
        let conc = concurrence(&rho).unwrap();
        assert!((conc - 0.4144).abs() < 5e-4, "concurrence {conc}");
        let m = horodecki_chsh(&rho).unwrap();
        assert!(m <= 1.0, "the state must not violate CHSH, M = {m}");
    }

    #[test]
    fn bad_density_rejected() {
        let not_normalized = CMatrix::identity(4, 4);
        assert!(concurrence(&not_normalized).is_err());
        let wrong_shape = CMatrix::identity(2, 2);
        assert!(horodecki_chsh(&wrong_shape).is_err());
    }
}
