//! Fully connected transverse-field Ising Hamiltonian and its propagator.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{ComplexMatrix, C64};
use super::state::{z_sign, HERMITIAN_TOL};
use super::MAX_QUBITS;
use crate::error::{Error, Result};

/// Couplings and field of `H = Σ_{i<j} J_ij X_i X_j + v Σ_i Z_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingSpec {
    pub n_qubits: usize,
    /// Seed the couplings were drawn from, `None` for hand-written couplings.
    pub coupling_seed: Option<u64>,
    pub field_strength: f64,
    /// Symmetric with zero diagonal; each pair counted once in `H`.
    pub couplings: DMatrix<f64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Size(format!(
            "n_qubits = {n} is outside the dense range [1, {MAX_QUBITS}]"
        )));
    }
    Ok(())
}

impl IsingSpec {
    /// Draws `J_ij ~ U[0, 1)` for `i < j` in row-major order from a
    /// ChaCha8 stream seeded with `coupling_seed`.
    pub fn sample(n_qubits: usize, coupling_seed: u64, field_strength: f64) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(coupling_seed);
        let mut j = DMatrix::zeros(n_qubits, n_qubits);
        for a in 0..n_qubits {
            for b in (a + 1)..n_qubits {
                let value: f64 = rng.gen();
                j[(a, b)] = value;
                j[(b, a)] = value;
            }
        }
        Ok(Self {
            n_qubits,
            coupling_seed: Some(coupling_seed),
            field_strength,
            couplings: j,
        })
    }

    pub fn from_couplings(n_qubits: usize, field_strength: f64, couplings: DMatrix<f64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if couplings.shape() != (n_qubits, n_qubits) {
            return Err(Error::Argument(format!(
                "coupling matrix is {:?}, expected {n_qubits}x{n_qubits}",
                couplings.shape()
            )));
        }
        for a in 0..n_qubits {
            if couplings[(a, a)] != 0.0 {
                return Err(Error::Argument(format!("J[{a},{a}] must be zero")));
            }
            for b in (a + 1)..n_qubits {
                let v = couplings[(a, b)];
                if v != couplings[(b, a)] {
                    return Err(Error::Argument(format!("J is not symmetric at ({a},{b})")));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Argument(format!("J[{a},{b}] = {v} is outside [0, 1]")));
                }
            }
        }
        Ok(Self {
            n_qubits,
            coupling_seed: None,
            field_strength,
            couplings,
        })
    }
}

/// A Hermitian operator together with its eigendecomposition
/// `matrix = V diag(λ) V†`, computed once at construction.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    real_eigenvectors: Option<DMatrix<f64>>,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Argument("Hermitian operator must be square".into()));
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::Argument(format!("matrix is not Hermitian (deviation {dev:e})")));
        }
        if matrix.is_real() {
            let eig = SymmetricEigen::new(matrix.real_part());
            let eigenvectors = ComplexMatrix::from_real(&eig.eigenvectors);
            Ok(Self {
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                eigenvectors,
                real_eigenvectors: Some(eig.eigenvectors),
                matrix,
            })
        } else {
            let eig = SymmetricEigen::new(matrix.as_matrix().clone());
            Ok(Self {
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                eigenvectors: ComplexMatrix::from_matrix(eig.eigenvectors),
                real_eigenvectors: None,
                matrix,
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Eigenvectors as a real orthogonal matrix when the operator is real symmetric.
    pub fn real_eigenvectors(&self) -> Option<&DMatrix<f64>> {
        self.real_eigenvectors.as_ref()
    }

    /// ‖V diag(λ) V† − A‖_F / ‖A‖_F
    pub fn reconstruction_error(&self) -> f64 {
        let diag: Vec<C64> = self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)).collect();
        let rebuilt = &(&self.eigenvectors * &ComplexMatrix::from_diagonal(&diag)) * &self.eigenvectors.adjoint();
        let diff = ComplexMatrix::from_matrix(rebuilt.as_matrix() - self.matrix.as_matrix());
        let norm = self.matrix.frobenius_norm();
        if norm == 0.0 {
            diff.frobenius_norm()
        } else {
            diff.frobenius_norm() / norm
        }
    }
}

/// Dense `H` for the given couplings; the result carries its eigendecomposition.
pub fn build_ising_hamiltonian(spec: &IsingSpec) -> Result<HermitianOperator> {
    check_qubits(spec.n_qubits)?;
    let n = spec.n_qubits;
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        h[(b, b)] = spec.field_strength * (0..n).map(|q| z_sign(b, q, n)).sum::<f64>();
    }
    for a in 0..n {
        for c in (a + 1)..n {
            let j = spec.couplings[(a, c)];
            if j == 0.0 {
                continue;
            }
            let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - c));
            for b in 0..dim {
                h[(b ^ mask, b)] += j;
            }
        }
    }
    HermitianOperator::new(ComplexMatrix::from_real(&h))
}

/// `e^{-iHτ}` assembled from the cached eigendecomposition.
pub fn propagator(h: &HermitianOperator, tau: f64) -> Result<ComplexMatrix> {
    if !tau.is_finite() {
        return Err(Error::Argument(format!("evolution time {tau} is not finite")));
    }
    let v = h.eigenvectors.as_matrix();
    let mut scaled = v.clone();
    for (k, &lambda) in h.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * tau);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Ok(ComplexMatrix::from_matrix(scaled * v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn single_qubit_is_pauli_z() {
        let spec = IsingSpec::sample(1, 3, 1.0).unwrap();
        let h = build_ising_hamiltonian(&spec).unwrap();
        let want = ComplexMatrix::from_real_row_major(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(h.matrix(), &want);
    }

    #[test]
    fn two_qubit_hand_built() {
        let j = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        let spec = IsingSpec::from_couplings(2, 1.0, j).unwrap();
        let h = build_ising_hamiltonian(&spec).unwrap();
        #[rustfmt::skip]
        let want = ComplexMatrix::from_real_row_major(4, 4, &[
            2.0, 0.0, 0.0, 0.5,
            0.0, 0.0, 0.5, 0.0,
            0.0, 0.5, 0.0, 0.0,
            0.5, 0.0, 0.0, -2.0,
        ]).unwrap();
        assert_eq!(h.matrix(), &want);
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian_and_decomposed() {
        let spec = IsingSpec::sample(3, 99, 1.0).unwrap();
        let h = build_ising_hamiltonian(&spec).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
        assert!(h.reconstruction_error() < 1e-8);
        assert!(h.eigenvectors().unitarity_error() < 1e-10);
    }

    #[test]
    fn couplings_are_deterministic_and_in_range() {
        let a = IsingSpec::sample(6, 42, 1.0).unwrap();
        let b = IsingSpec::sample(6, 42, 1.0).unwrap();
        assert_eq!(a.couplings, b.couplings);
        for i in 0..6 {
            assert_eq!(a.couplings[(i, i)], 0.0);
            for j in 0..6 {
                assert_eq!(a.couplings[(i, j)], a.couplings[(j, i)]);
                assert!((0.0..=1.0).contains(&a.couplings[(i, j)]));
            }
        }
        let c = IsingSpec::sample(6, 43, 1.0).unwrap();
        assert_ne!(a.couplings, c.couplings);
    }

    #[test]
    fn size_bounds() {
        assert!(matches!(IsingSpec::sample(0, 1, 1.0), Err(Error::Size(_))));
        assert!(matches!(IsingSpec::sample(13, 1, 1.0), Err(Error::Size(_))));
    }

    #[test]
    fn from_couplings_validates() {
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]);
        assert!(IsingSpec::from_couplings(2, 1.0, bad).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 0.2, 0.3, 0.0]);
        assert!(IsingSpec::from_couplings(2, 1.0, asym).is_err());
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let h = build_ising_hamiltonian(&IsingSpec::sample(3, 5, 1.0).unwrap()).unwrap();
        let u = propagator(&h, 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);
    }

    #[test]
    fn propagator_of_z() {
        let h = build_ising_hamiltonian(&IsingSpec::sample(1, 0, 1.0).unwrap()).unwrap();
        let u = propagator(&h, FRAC_PI_2).unwrap();
        let want = ComplexMatrix::from_diagonal(&[
            C64::from_polar(1.0, -FRAC_PI_2),
            C64::from_polar(1.0, FRAC_PI_2),
        ]);
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn propagator_is_unitary_and_composes() {
        let h = build_ising_hamiltonian(&IsingSpec::sample(3, 8, 1.0).unwrap()).unwrap();
        let u = propagator(&h, 1.0).unwrap();
        assert!(u.unitarity_error() < 1e-10);
        let half = propagator(&h, 0.5).unwrap();
        let composed = &half * &half;
        let diff = ComplexMatrix::from_matrix(composed.as_matrix() - u.as_matrix());
        assert!(diff.frobenius_norm() < 1e-9);
    }

    #[test]
    fn propagator_rejects_non_finite_time() {
        let h = build_ising_hamiltonian(&IsingSpec::sample(2, 8, 1.0).unwrap()).unwrap();
        assert!(matches!(propagator(&h, f64::NAN), Err(Error::Argument(_))));
        assert!(matches!(propagator(&h, f64::INFINITY), Err(Error::Argument(_))));
    }
}
