//! Dense complex linear algebra for states and channels.
//!
//! Channels are given by Kraus operators `{Kᵢ}` acting as `ρ ↦ Σᵢ Kᵢ ρ Kᵢ†`.
//! Tensor products order the system factor first, so an index of `A ⊗ B` is
//! `a · dim(B) + b`.

mod entropy;
pub mod random;
mod state;

use num_complex::Complex64;

pub use entropy::{holevo_quantity, von_neumann_entropy, Ensemble};
pub use state::{
    hermitian_eigenvalues, identity, kron, max_abs_diff, partial_trace, trace, ComplexMatrix,
    DensityMatrix,
};

use crate::error::{Error, Result};
use crate::TOL;

/// A channel on a `d`-dimensional system given by its Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds a channel and checks completeness `Σ Kᵢ†Kᵢ = I` within [`TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_operators(kraus)?;
        if !ch.validate_cptp(TOL) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not complete (defect {:e})",
                ch.completeness_defect()
            )));
        }
        Ok(ch)
    }

    /// Builds a Kraus set checking only shapes. Use [`Self::validate_cptp`] to
    /// test trace preservation.
    pub fn from_operators(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        };
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidChannel(
                "zero-dimensional Kraus operator".into(),
            ));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (dim, dim) {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        Ok(Self { dim, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    fn completeness_defect(&self) -> f64 {
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k.adjoint() * k
            });
        max_abs_diff(&sum, &identity(self.dim))
    }

    /// Whether `Σ Kᵢ†Kᵢ = I` holds elementwise within `tol`.
    pub fn validate_cptp(&self, tol: f64) -> bool {
        self.completeness_defect() <= tol
    }

    /// `Σ Kᵢ m Kᵢ†` for an arbitrary operator `m`.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on dimension {}, operator is {}x{}",
                self.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k * m * k.adjoint()
            }))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_operator(rho.matrix())?)
    }

    /// `V = Σᵢ Kᵢ ⊗ |i⟩_E`, mapping the system into system ⊗ environment.
    /// Environment basis order follows the Kraus list.
    pub fn stinespring_dilation(&self) -> Isometry {
        let k = self.kraus.len();
        let mut v = ComplexMatrix::zeros(self.dim * k, self.dim);
        for (i, op) in self.kraus.iter().enumerate() {
            for r in 0..self.dim {
                for c in 0..self.dim {
                    v[(r * k + i, c)] = op[(r, c)];
                }
            }
        }
        Isometry {
            input_dim: self.dim,
            env_dim: k,
            matrix: v,
        }
    }
}

/// The completely depolarising channel `ρ ↦ tr(ρ) I/d`, with the `d²` Kraus
/// operators `|i⟩⟨j| / √d` in row-major `(i, j)` order.
pub fn make_cdpc(d: usize) -> Result<KrausChannel> {
    if d < 2 {
        return Err(Error::InvalidChannel(format!(
            "depolarising channel needs d >= 2, got {d}"
        )));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let kraus = (0..d * d)
        .map(|ij| {
            let mut k = ComplexMatrix::zeros(d, d);
            k[(ij / d, ij % d)] = amp;
            k
        })
        .collect();
    Ok(KrausChannel { dim: d, kraus })
}

pub fn make_identity_channel(d: usize) -> KrausChannel {
    KrausChannel {
        dim: d,
        kraus: vec![identity(d)],
    }
}

/// An isometry from a `d`-dimensional system into system ⊗ environment.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    input_dim: usize,
    env_dim: usize,
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        max_abs_diff(
            &(self.matrix.adjoint() * &self.matrix),
            &identity(self.input_dim),
        ) <= tol
    }

    /// `V m V†` on system ⊗ environment.
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &self.matrix * m * self.matrix.adjoint()
    }

    /// `Tr_E(V m V†)`.
    pub fn apply_traced(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        partial_trace(&self.conjugate(m), &[self.input_dim, self.env_dim], &[0])
    }
}
