//! Density matrices and the dense primitives that act on them.
//!
//! Qubit `0` is the first (most significant) tensor factor: basis index `b`
//! has qubit `q` in state `(b >> (n - 1 - q)) & 1`.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;

use super::matrix::{ComplexMatrix, C64};
use super::MAX_QUBITS;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_SLACK` are accepted as round-off.
pub const PSD_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps `matrix` after checking shape, Hermiticity and unit trace.
    /// Positivity is checked separately by [`DensityMatrix::is_positive_semidefinite`]
    /// since it needs an eigendecomposition.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Argument("density matrix must be square".into()));
        }
        let dim = matrix.rows();
        if !dim.is_power_of_two() {
            return Err(Error::Argument(format!("dimension {dim} is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Size(format!(
                "{n_qubits} qubits exceeds the dense limit of {MAX_QUBITS}"
            )));
        }
        let herm = matrix.hermitian_deviation();
        if herm > HERMITIAN_TOL {
            return Err(Error::Argument(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Argument(format!("trace is {tr}, expected 1")));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let dim = amplitudes.len();
        let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| amplitudes[i] * amplitudes[j].conj());
        Self::new(ComplexMatrix::from_matrix(m))
    }

    /// Computational basis state |index⟩⟨index| on `n_qubits` qubits.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Argument(format!("basis index {index} out of range for {dim}")));
        }
        let mut diag = vec![C64::new(0.0, 0.0); dim];
        diag[index] = C64::new(1.0, 0.0);
        Self::new(ComplexMatrix::from_diagonal(&diag))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let diag = vec![C64::new(1.0 / dim as f64, 0.0); dim];
        Self::new(ComplexMatrix::from_diagonal(&diag))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Tr(ρ²)
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.as_matrix().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.matrix.as_matrix().clone());
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(|a, b| a.total_cmp(b));
        values
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.eigenvalues().first().is_none_or(|&v| v >= -PSD_SLACK)
    }
}

/// Amplitudes of `⊗_j R_Y(x_j)|0⟩`, i.e. qubit `j` in `cos(x_j/2)|0⟩ + sin(x_j/2)|1⟩`.
/// The amplitudes are real.
pub fn product_amplitudes(angles: &[f64]) -> Vec<f64> {
    let mut amps = vec![1.0];
    for &x in angles {
        let (s, c) = (x / 2.0).sin_cos();
        let mut next = Vec::with_capacity(amps.len() * 2);
        for &a in &amps {
            next.push(a * c);
            next.push(a * s);
        }
        amps = next;
    }
    amps
}

pub(crate) fn check_angles(angles: &[f64]) -> Result<()> {
    if angles.is_empty() {
        return Err(Error::Argument("angle list is empty".into()));
    }
    if angles.len() > MAX_QUBITS {
        return Err(Error::Size(format!(
            "{} input angles exceed the dense limit of {MAX_QUBITS} qubits",
            angles.len()
        )));
    }
    for (j, &x) in angles.iter().enumerate() {
        if !x.is_finite() || x.abs() > PI + 1e-12 {
            return Err(Error::Argument(format!("angle {j} = {x} is outside [-pi, pi]")));
        }
    }
    Ok(())
}

/// Encodes each angle on its own qubit with a Y rotation applied to |0⟩.
pub fn encode_input(angles: &[f64]) -> Result<DensityMatrix> {
    check_angles(angles)?;
    let amps: Vec<C64> = product_amplitudes(angles)
        .into_iter()
        .map(|a| C64::new(a, 0.0))
        .collect();
    DensityMatrix::from_pure(&amps)
}

/// Kronecker product `a ⊗ b`; `a` becomes the leading qubits.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let n = a.n_qubits + b.n_qubits;
    if n > MAX_QUBITS {
        return Err(Error::Size(format!(
            "tensor product of {} and {} qubits exceeds {MAX_QUBITS}",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(DensityMatrix {
        n_qubits: n,
        matrix: a.matrix.kron(&b.matrix),
    })
}

/// `U ρ U†`
pub fn evolve(rho: &DensityMatrix, unitary: &ComplexMatrix) -> Result<DensityMatrix> {
    if !unitary.is_square() || unitary.rows() != rho.dim() {
        return Err(Error::Argument(format!(
            "operator is {}x{} but the state has dimension {}",
            unitary.rows(),
            unitary.cols(),
            rho.dim()
        )));
    }
    let out = &(unitary * &rho.matrix) * &unitary.adjoint();
    DensityMatrix::new(out)
}

/// Traces out the first `n_traced` qubits and returns the reduced state of
/// the remaining ones.
pub fn partial_trace_first(rho: &DensityMatrix, n_traced: usize) -> Result<DensityMatrix> {
    if n_traced >= rho.n_qubits {
        return Err(Error::Argument(format!(
            "cannot trace {n_traced} of {} qubits",
            rho.n_qubits
        )));
    }
    let keep = rho.n_qubits - n_traced;
    let dk = 1usize << keep;
    let dt = 1usize << n_traced;
    let m = rho.matrix.as_matrix();
    let reduced = nalgebra::DMatrix::from_fn(dk, dk, |h, hp| {
        (0..dt).map(|i| m[(i * dk + h, i * dk + hp)]).sum::<C64>()
    });
    Ok(DensityMatrix {
        n_qubits: keep,
        matrix: ComplexMatrix::from_matrix(reduced),
    })
}

/// Sign of Z on qubit `q` for basis index `b` in an `n`-qubit register.
#[inline]
pub(crate) fn z_sign(b: usize, q: usize, n: usize) -> f64 {
    if (b >> (n - 1 - q)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// ⟨Z_q⟩ = Tr[ρ Z_q] for every qubit, read off the diagonal.
pub fn pauli_z_expectations(rho: &DensityMatrix) -> Vec<f64> {
    let n = rho.n_qubits;
    let m = rho.matrix.as_matrix();
    let diag: Vec<f64> = (0..rho.dim()).map(|b| m[(b, b)].re).collect();
    z_expectations_from_populations(&diag, n)
}

pub(crate) fn z_expectations_from_populations(pop: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|q| pop.iter().enumerate().map(|(b, p)| p * z_sign(b, q, n)).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::hamiltonian::{build_ising_hamiltonian, propagator, IsingSpec};
    use std::f64::consts::FRAC_PI_2;

    fn diag_of(rho: &DensityMatrix) -> Vec<f64> {
        (0..rho.dim()).map(|i| rho.matrix().get(i, i).re).collect()
    }

    #[test]
    fn encode_zero_and_pi() {
        let r0 = encode_input(&[0.0]).unwrap();
        assert!((diag_of(&r0)[0] - 1.0).abs() < 1e-15);
        let r1 = encode_input(&[PI]).unwrap();
        let d = diag_of(&r1);
        assert!(d[0].abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
        assert!((r1.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn encode_half_pi_has_zero_z() {
        let rho = encode_input(&[FRAC_PI_2]).unwrap();
        assert!(pauli_z_expectations(&rho)[0].abs() < 1e-15);
    }

    #[test]
    fn encode_rejects_empty_and_out_of_range() {
        assert!(matches!(encode_input(&[]), Err(Error::Argument(_))));
        assert!(matches!(encode_input(&[4.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn tensor_of_ground_states() {
        let z = encode_input(&[0.0]).unwrap();
        let t = tensor(&z, &z).unwrap();
        assert_eq!(diag_of(&t), vec![1.0, 0.0, 0.0, 0.0]);
        assert!((t.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_size_limit() {
        let a = DensityMatrix::maximally_mixed(7).unwrap();
        let b = DensityMatrix::maximally_mixed(6).unwrap();
        assert!(matches!(tensor(&a, &b), Err(Error::Size(_))));
    }

    #[test]
    fn partial_trace_of_product_returns_second_factor() {
        let a = encode_input(&[0.7, -1.1]).unwrap();
        let b = encode_input(&[2.3]).unwrap();
        let ab = tensor(&a, &b).unwrap();
        let red = partial_trace_first(&ab, 2).unwrap();
        assert!(red.matrix().max_abs_diff(b.matrix()) < 1e-12);
        let same = partial_trace_first(&ab, 0).unwrap();
        assert_eq!(same, ab);
        assert!(partial_trace_first(&ab, 3).is_err());
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = C64::new(0.0, 0.0);
        let bell = DensityMatrix::from_pure(&[C64::new(s, 0.0), zero, zero, C64::new(s, 0.0)])
            .unwrap();
        let red = partial_trace_first(&bell, 1).unwrap();
        let half = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(red.matrix().max_abs_diff(half.matrix()) < 1e-12);
    }

    #[test]
    fn z_expectations_of_basis_and_mixed_states() {
        let rho = DensityMatrix::basis_state(2, 0b01).unwrap();
        assert_eq!(pauli_z_expectations(&rho), vec![1.0, -1.0]);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(pauli_z_expectations(&mixed).iter().all(|z| z.abs() < 1e-15));
    }

    #[test]
    fn xx_rotation_flips_both_qubits() {
        // e^{-i (π/2) X⊗X}|00⟩ = -i|11⟩
        let spec = IsingSpec::from_couplings(
            2,
            0.0,
            nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        )
        .unwrap();
        let h = build_ising_hamiltonian(&spec).unwrap();
        let u = propagator(&h, FRAC_PI_2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let out = evolve(&rho, &u).unwrap();
        let target = DensityMatrix::basis_state(2, 3).unwrap();
        assert!(out.matrix().max_abs_diff(target.matrix()) < 1e-10);
    }

    #[test]
    fn evolve_preserves_purity_and_rejects_mismatch() {
        let spec = IsingSpec::sample(3, 11, 1.0).unwrap();
        let h = build_ising_hamiltonian(&spec).unwrap();
        let u = propagator(&h, 1.3).unwrap();
        let rho = encode_input(&[0.3, -2.0, 1.0]).unwrap();
        let out = evolve(&rho, &u).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-10);
        assert!(out.is_positive_semidefinite());
        let small = encode_input(&[0.3]).unwrap();
        assert!(matches!(evolve(&small, &u), Err(Error::Argument(_))));
        let same = evolve(&rho, &ComplexMatrix::identity(8)).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn new_rejects_non_hermitian_and_bad_trace() {
        let m = ComplexMatrix::from_real_row_major(2, 2, &[0.5, 0.3, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
        let m = ComplexMatrix::from_real_row_major(2, 2, &[0.6, 0.0, 0.0, 0.6]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }
}
