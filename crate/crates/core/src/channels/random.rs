//! Random states and channels for property tests and verification runs.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::state::{ComplexMatrix, DensityMatrix};
use super::KrausChannel;

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A full-rank mixed state `G G† / tr(G G†)` with `G` complex Gaussian.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    // enforce exact Hermiticity after scaling
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(m).expect("Ginibre state is a valid density matrix")
}

/// A random channel with `k` Kraus operators `Gᵢ S^{-1/2}`, `S = Σ Gᵢ†Gᵢ`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> KrausChannel {
    let gs: Vec<ComplexMatrix> = (0..k).map(|_| ginibre(rng, d, d)).collect();
    let s = gs
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, g| acc + g.adjoint() * g);
    let s = (&s + s.adjoint()).scale(0.5);
    let eig = s.symmetric_eigen();
    debug_assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
    let inv_sqrt =
        ComplexMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0)));
    let s_inv_sqrt = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let kraus = gs.into_iter().map(|g| g * &s_inv_sqrt).collect();
    let ch = KrausChannel::from_operators(kraus).expect("square operators");
    debug_assert!(ch.validate_cptp(1e-9), "normalised Kraus set is complete");
    ch
}
