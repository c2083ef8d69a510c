//! The N-channel quantum switch and its block-structured output.
//!
//! With control basis `{|π⟩}` labelled by `M` orderings, the output is
//! `ρ′ = Σ_{π,π′} c_{ππ′} 𝒩_{ππ′}(ρ) ⊗ |π⟩⟨π′|`, where `c` is the control
//! density matrix and `𝒩_{ππ′}` the interference term of the two orderings.
//! The full matrix orders system ⊗ control, so entry `(i, p), (j, q)` sits at
//! `(i·M + p, j·M + q)`.

pub mod brute;
pub mod fast;

use num_complex::Complex64;

use crate::channels::{
    identity, kron, max_abs_diff, partial_trace, ComplexMatrix, DensityMatrix, KrausChannel,
};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::TOL;

pub use brute::{
    dilated_interference_check, dilated_interference_term, interference_term, switch_output,
};
pub use fast::{classify_term, switch_output_fast, term_channel, TermClass, TermKind};

/// The Fourier control state `|+⟩⟨+|` with amplitudes `1/√M`.
pub fn fourier_control(m: usize) -> DensityMatrix {
    DensityMatrix::plus(m)
}

pub(crate) fn check_orderings(perms: &[Permutation]) -> Result<usize> {
    let Some(first) = perms.first() else {
        return Err(Error::InvalidSpec(
            "at least one ordering is required".into(),
        ));
    };
    let n = first.len();
    for (i, p) in perms.iter().enumerate() {
        if p.len() != n {
            return Err(Error::InvalidSpec(format!(
                "ordering {i} has {} labels, expected {n}",
                p.len()
            )));
        }
        if perms[..i].contains(p) {
            return Err(Error::InvalidSpec(format!("ordering {p} is repeated")));
        }
    }
    Ok(n)
}

/// Everything needed to evaluate a switch on an input state.
#[derive(Clone, Debug)]
pub struct SwitchSpec {
    d: usize,
    channels: Vec<KrausChannel>,
    perms: Vec<Permutation>,
    control: DensityMatrix,
}

impl SwitchSpec {
    pub fn new(
        channels: Vec<KrausChannel>,
        perms: Vec<Permutation>,
        control: DensityMatrix,
    ) -> Result<Self> {
        let n = check_orderings(&perms)?;
        if channels.len() != n {
            return Err(Error::InvalidSpec(format!(
                "{} channels for orderings of {n} labels",
                channels.len()
            )));
        }
        let d = channels[0].dim();
        if let Some(ch) = channels.iter().find(|c| c.dim() != d) {
            return Err(Error::InvalidSpec(format!(
                "channels act on dimensions {d} and {}",
                ch.dim()
            )));
        }
        if control.dim() != perms.len() {
            return Err(Error::InvalidSpec(format!(
                "control has dimension {}, but {} orderings",
                control.dim(),
                perms.len()
            )));
        }
        Ok(Self {
            d,
            channels,
            perms,
            control,
        })
    }

    /// `N` copies of the completely depolarising channel on dimension `d`.
    pub fn cdpc(d: usize, perms: Vec<Permutation>, control: DensityMatrix) -> Result<Self> {
        let n = check_orderings(&perms)?;
        let ch = crate::channels::make_cdpc(d)?;
        Self::new(vec![ch; n], perms, control)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.channels.len()
    }

    pub fn m(&self) -> usize {
        self.perms.len()
    }

    pub fn channels(&self) -> &[KrausChannel] {
        &self.channels
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn control(&self) -> &DensityMatrix {
        &self.control
    }

    /// Whether every channel acts as `ρ ↦ tr(ρ) I/d` (checked on matrix units,
    /// independent of the Kraus representation).
    pub fn all_depolarising(&self, tol: f64) -> bool {
        self.channels
            .iter()
            .all(|c| is_completely_depolarising(c, tol))
    }
}

pub fn is_completely_depolarising(ch: &KrausChannel, tol: f64) -> bool {
    let d = ch.dim();
    if d < 2 {
        return false;
    }
    let target = identity(d).unscale(d as f64);
    (0..d).all(|i| {
        (0..d).all(|j| {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let out = ch.apply_operator(&unit).expect("dimension matches");
            let expected = if i == j {
                target.clone()
            } else {
                ComplexMatrix::zeros(d, d)
            };
            max_abs_diff(&out, &expected) <= tol
        })
    })
}

/// Output of a switch as an `M × M` array of `d × d` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchOutput {
    d: usize,
    perms: Vec<Permutation>,
    /// Row-major over control indices `(p, q)`.
    blocks: Vec<ComplexMatrix>,
}

impl SwitchOutput {
    pub(crate) fn from_blocks(
        d: usize,
        perms: Vec<Permutation>,
        blocks: Vec<ComplexMatrix>,
    ) -> Self {
        debug_assert_eq!(blocks.len(), perms.len() * perms.len());
        Self { d, perms, blocks }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// Block attached to `|π_p⟩⟨π_q|`.
    pub fn block(&self, p: usize, q: usize) -> &ComplexMatrix {
        &self.blocks[p * self.m() + q]
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// The full `(dM) × (dM)` matrix on system ⊗ control.
    pub fn assemble(&self) -> ComplexMatrix {
        let (d, m) = (self.d, self.m());
        ComplexMatrix::from_fn(d * m, d * m, |r, c| {
            self.block(r % m, c % m)[(r / m, c / m)]
        })
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.assemble())
    }

    /// System state after discarding the control: `Σ_p block(p, p)`.
    pub fn trace_control(&self) -> ComplexMatrix {
        (0..self.m()).fold(ComplexMatrix::zeros(self.d, self.d), |acc, p| {
            acc + self.block(p, p)
        })
    }

    /// Largest elementwise deviation between two outputs of the same shape.
    pub fn max_deviation(&self, other: &SwitchOutput) -> f64 {
        if self.blocks.len() != other.blocks.len() {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    /// Measures the control with the projector `P` and returns the outcome
    /// probability `tr[(I ⊗ P) ρ′]` and the normalised post-measurement
    /// system state `Tr_control[(I ⊗ P) ρ′ (I ⊗ P)] / probability`.
    pub fn measure_control(&self, projector: &ComplexMatrix) -> Result<(f64, DensityMatrix)> {
        let m = self.m();
        if projector.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "projector is {}x{}, control dimension is {m}",
                projector.nrows(),
                projector.ncols()
            )));
        }
        let squared = projector * projector;
        if max_abs_diff(&squared, projector) > TOL
            || max_abs_diff(&projector.adjoint(), projector) > TOL
        {
            return Err(Error::InvalidState(
                "control measurement operator is not a projector".into(),
            ));
        }
        let lifted = kron(&identity(self.d), projector);
        let post = &lifted * self.assemble() * &lifted;
        let prob = post.trace().re;
        if prob < 1e-12 {
            return Err(Error::UnreachableOutcome(prob));
        }
        let reduced = partial_trace(&post, &[self.d, m], &[0])?.unscale(prob);
        Ok((prob, DensityMatrix::new(reduced)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::make_cdpc;

    fn perms2() -> Vec<Permutation> {
        Permutation::cyclic_set(2)
    }

    #[test]
    fn spec_validation() {
        let ch = make_cdpc(2).unwrap();
        let ctrl = fourier_control(2);
        assert!(SwitchSpec::new(vec![ch.clone(); 2], perms2(), ctrl.clone()).is_ok());
        assert!(SwitchSpec::new(vec![ch.clone(); 3], perms2(), ctrl.clone()).is_err());
        assert!(SwitchSpec::new(vec![ch.clone(); 2], perms2(), fourier_control(3)).is_err());
        let dup = vec![Permutation::identity(2), Permutation::identity(2)];
        assert!(SwitchSpec::new(vec![ch.clone(); 2], dup, ctrl.clone()).is_err());
        let mixed = vec![ch, make_cdpc(3).unwrap()];
        assert!(SwitchSpec::new(mixed, perms2(), ctrl).is_err());
    }

    #[test]
    fn depolarising_detection_is_representation_free() {
        assert!(is_completely_depolarising(&make_cdpc(3).unwrap(), TOL));
        assert!(!is_completely_depolarising(
            &crate::make_identity_channel(2),
            TOL
        ));
        // a unitarily mixed Kraus set of the same channel
        let ch = make_cdpc(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = ch.kraus();
        let mixed = vec![
            (&k[0] + &k[1]).scale(s),
            (&k[0] - &k[1]).scale(s),
            k[2].clone(),
            k[3].clone(),
        ];
        assert!(is_completely_depolarising(
            &KrausChannel::new(mixed).unwrap(),
            TOL
        ));
    }

    #[test]
    fn assemble_orders_system_then_control() {
        let d = 2;
        let blocks: Vec<ComplexMatrix> = (0..4)
            .map(|b| {
                ComplexMatrix::from_fn(d, d, |i, j| {
                    Complex64::new((10 * b + 2 * i + j) as f64, 0.0)
                })
            })
            .collect();
        let out = SwitchOutput::from_blocks(d, perms2(), blocks);
        let full = out.assemble();
        // block (0, 1) entry (1, 0) lives at row 1·2 + 0, col 0·2 + 1
        assert_eq!(full[(2, 1)], Complex64::new(12.0, 0.0));
        // block (1, 0) entry (1, 1)
        assert_eq!(full[(3, 2)], Complex64::new(23.0, 0.0));
    }
}
