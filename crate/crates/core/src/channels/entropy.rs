use super::state::{ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::TOL;

/// `−Σ λ log₂ λ` over the spectrum of `rho`, in bits.
///
/// Eigenvalues in `[−TOL, 0)` are clamped to zero; anything more negative is
/// rejected.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues() {
        if lambda < -TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lambda:e} in entropy"
            )));
        }
        let lambda = lambda.clamp(0.0, 1.0);
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s)
}

/// A finite ensemble `{(pₓ, ρₓ)}` of equal-dimension states.
#[derive(Clone, Debug)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return Err(Error::InvalidState("empty ensemble".into()));
        };
        let d = first.dim();
        for (p, rho) in &entries {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidState(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
            if rho.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "ensemble mixes dimensions {d} and {}",
                    rho.dim()
                )));
            }
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!(
                "ensemble probabilities sum to {total}"
            )));
        }
        Ok(Self { entries })
    }

    /// Equiprobable ensemble over `states`.
    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len() as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn average_state(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let avg = self
            .entries
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, (p, rho)| {
                acc + rho.matrix().scale(*p)
            });
        DensityMatrix::new(avg)
    }
}

/// `χ = S(Σ pₓ ρₓ) − Σ pₓ S(ρₓ)`, in bits.
pub fn holevo_quantity(ensemble: &Ensemble) -> Result<f64> {
    let mut chi = von_neumann_entropy(&ensemble.average_state()?)?;
    for (p, rho) in ensemble.entries() {
        chi -= p * von_neumann_entropy(rho)?;
    }
    // roundoff can leave a tiny negative value for identical states
    Ok(if chi.abs() < TOL { chi.abs() } else { chi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert!(
            von_neumann_entropy(&DensityMatrix::basis(3, 1).unwrap())
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(von_neumann_entropy(&DensityMatrix::plus(2)).unwrap().abs() < 1e-12);
        let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        for d in 2..=6 {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(d)).unwrap();
            assert!((s - (d as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn holevo_examples() {
        let same = Ensemble::uniform(vec![DensityMatrix::plus(2); 3]).unwrap();
        assert!(holevo_quantity(&same).unwrap().abs() < 1e-12);
        let orth = Ensemble::uniform(vec![
            DensityMatrix::basis(2, 0).unwrap(),
            DensityMatrix::basis(2, 1).unwrap(),
        ])
        .unwrap();
        assert!((holevo_quantity(&orth).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        let a = DensityMatrix::basis(2, 0).unwrap();
        assert!(Ensemble::new(vec![(0.5, a.clone())]).is_err());
        assert!(Ensemble::new(vec![(1.5, a.clone()), (-0.5, a.clone())]).is_err());
        assert!(Ensemble::new(vec![(0.5, a), (0.5, DensityMatrix::plus(3))]).is_err());
        assert!(Ensemble::new(vec![]).is_err());
    }
}
