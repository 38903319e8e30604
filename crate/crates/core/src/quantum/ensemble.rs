//! Factored (purified) density-matrix representation used by the reservoir.
//!
//! A state is held as a set of unnormalized column vectors `ψ_c` with
//! `ρ = Σ_c |ψ_c⟩⟨ψ_c|`. Reservoir states built from product-state inputs
//! have rank at most `2^n_hidden`, so evolving the columns costs
//! `O(rank · 4^n)` instead of the `O(8^n)` of a dense `UρU†`.
//!
//! Propagation goes through the eigenbasis of a real symmetric Hamiltonian:
//! `e^{-iHτ}ψ = V (e^{-iλτ} ⊙ Vᵀψ)`. The basis transform is shared between
//! evolution times, which makes branching at the final step cheap.

use nalgebra::{DMatrix, SymmetricEigen};

use super::hamiltonian::HermitianOperator;
use super::matrix::{ComplexMatrix, C64};
use super::state::{z_expectations_from_populations, DensityMatrix};
use crate::error::{Error, Result};

/// Eigenvalues below this weight are dropped when a reduced state is refactored.
const RANK_CUTOFF: f64 = 1e-15;

/// Real eigenbasis of a real symmetric Hamiltonian.
#[derive(Clone, Debug)]
pub struct RealEigenBasis {
    vectors: DMatrix<f64>,
    vectors_t: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl RealEigenBasis {
    pub fn from_operator(h: &HermitianOperator) -> Result<Self> {
        let v = h.real_eigenvectors().ok_or_else(|| {
            Error::Argument("factored propagation requires a real symmetric Hamiltonian".into())
        })?;
        Ok(Self {
            vectors: v.clone(),
            vectors_t: v.transpose(),
            eigenvalues: h.eigenvalues().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Vᵀψ` for every column of `state`.
    pub fn coefficients(&self, state: &FactoredState) -> EigenCoefficients {
        assert_eq!(state.dim(), self.dim(), "state/basis dimension mismatch");
        EigenCoefficients {
            packed: &self.vectors_t * &state.packed,
            rank: state.rank,
        }
    }

    /// `e^{-iHτ}` applied to the state whose eigenbasis coefficients are `coeffs`.
    pub fn propagate(&self, coeffs: &EigenCoefficients, tau: f64) -> FactoredState {
        let r = coeffs.rank;
        let mut phased = coeffs.packed.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let (s, c) = (lambda * tau).sin_cos();
            for col in 0..r {
                let re = coeffs.packed[(k, col)];
                let im = coeffs.packed[(k, r + col)];
                // (re + i im)(cos - i sin)
                phased[(k, col)] = re * c + im * s;
                phased[(k, r + col)] = im * c - re * s;
            }
        }
        FactoredState {
            packed: &self.vectors * &phased,
            rank: r,
        }
    }
}

/// Coefficients of a factored state in an eigenbasis.
#[derive(Clone, Debug)]
pub struct EigenCoefficients {
    packed: DMatrix<f64>,
    rank: usize,
}

/// `ρ = Σ_c |ψ_c⟩⟨ψ_c|`, stored as `[Re ψ_0 .. Re ψ_{r-1} | Im ψ_0 .. Im ψ_{r-1}]`.
#[derive(Clone, Debug)]
pub struct FactoredState {
    packed: DMatrix<f64>,
    rank: usize,
}

impl FactoredState {
    /// |0…0⟩⟨0…0| on `n_qubits` qubits; a 1×1 unit state when `n_qubits == 0`.
    pub fn ground(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut packed = DMatrix::zeros(dim, 2);
        packed[(0, 0)] = 1.0;
        Self { packed, rank: 1 }
    }

    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let r = columns.len();
        let dim = columns.first().map_or(0, Vec::len);
        if r == 0 || dim == 0 || columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Argument("factor columns must be non-empty and equal length".into()));
        }
        let mut packed = DMatrix::zeros(dim, 2 * r);
        for (c, col) in columns.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                packed[(i, c)] = z.re;
                packed[(i, r + c)] = z.im;
            }
        }
        Ok(Self { packed, rank: r })
    }

    pub fn dim(&self) -> usize {
        self.packed.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.packed.iter().map(|x| x * x).sum()
    }

    /// `|input⟩⟨input| ⊗ self` with a real product-state `input` as the leading factor.
    pub fn prepend_real_pure(&self, input: &[f64]) -> FactoredState {
        let dh = self.dim();
        let r = self.rank;
        let mut packed = DMatrix::zeros(input.len() * dh, 2 * r);
        for (i, &a) in input.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for col in 0..2 * r {
                for h in 0..dh {
                    packed[(i * dh + h, col)] = a * self.packed[(h, col)];
                }
            }
        }
        FactoredState { packed, rank: r }
    }

    /// Traces out the first `n_traced` qubits. The result is refactored
    /// through an eigendecomposition of the smaller Gram matrix so that its
    /// rank never exceeds the reduced dimension.
    pub fn partial_trace_first(&self, n_traced: usize) -> Result<FactoredState> {
        let n = self.n_qubits();
        if n_traced > n {
            return Err(Error::Argument(format!("cannot trace {n_traced} of {n} qubits")));
        }
        let dk = 1usize << (n - n_traced);
        let dt = 1usize << n_traced;
        let r = self.rank;
        // columns φ_{c,i}[h] = ψ_c[i·dk + h]
        let m = r * dt;
        let mut cols_re = DMatrix::zeros(dk, m);
        let mut cols_im = DMatrix::zeros(dk, m);
        for c in 0..r {
            for i in 0..dt {
                let col = c * dt + i;
                for h in 0..dk {
                    cols_re[(h, col)] = self.packed[(i * dk + h, c)];
                    cols_im[(h, col)] = self.packed[(i * dk + h, r + c)];
                }
            }
        }
        if m <= dk {
            let mut packed = DMatrix::zeros(dk, 2 * m);
            packed.columns_mut(0, m).copy_from(&cols_re);
            packed.columns_mut(m, m).copy_from(&cols_im);
            return Ok(FactoredState { packed, rank: m });
        }
        // ρ_red = Φ Φ†, with Φ = A + iB: Re = AAᵀ + BBᵀ, Im = BAᵀ − ABᵀ
        let re = &cols_re * cols_re.transpose() + &cols_im * cols_im.transpose();
        let im = &cols_im * cols_re.transpose() - &cols_re * cols_im.transpose();
        let rho = DMatrix::from_fn(dk, dk, |a, b| {
            C64::new(0.5 * (re[(a, b)] + re[(b, a)]), 0.5 * (im[(a, b)] - im[(b, a)]))
        });
        Ok(Self::from_hermitian(&rho))
    }

    fn from_hermitian(rho: &DMatrix<C64>) -> FactoredState {
        let dk = rho.nrows();
        let eig = SymmetricEigen::new(rho.clone());
        let kept: Vec<usize> = (0..dk).filter(|&k| eig.eigenvalues[k] > RANK_CUTOFF).collect();
        let r = kept.len().max(1);
        let mut packed = DMatrix::zeros(dk, 2 * r);
        for (c, &k) in kept.iter().enumerate() {
            let w = eig.eigenvalues[k].sqrt();
            for h in 0..dk {
                let z = eig.eigenvectors[(h, k)] * w;
                packed[(h, c)] = z.re;
                packed[(h, r + c)] = z.im;
            }
        }
        FactoredState { packed, rank: r }
    }

    /// Diagonal of ρ in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.packed
            .row_iter()
            .map(|row| row.iter().map(|x| x * x).sum())
            .collect()
    }

    pub fn z_expectations(&self) -> Vec<f64> {
        z_expectations_from_populations(&self.populations(), self.n_qubits())
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let dim = self.dim();
        let r = self.rank;
        let m = DMatrix::from_fn(dim, dim, |a, b| {
            (0..r)
                .map(|c| {
                    let za = C64::new(self.packed[(a, c)], self.packed[(a, r + c)]);
                    let zb = C64::new(self.packed[(b, c)], self.packed[(b, r + c)]);
                    za * zb.conj()
                })
                .sum::<C64>()
        });
        DensityMatrix::new(ComplexMatrix::from_matrix(m))
    }
}
