//! Closed-form evaluation for switches of completely depolarising channels.
//!
//! Every interference term `𝒩_{ππ′}` of `N` depolarising channels is either
//! proportional to the identity channel or to the depolarising channel. Which
//! one, and with what weight, is read off the cycle decomposition of
//! `C_{ππ′}` ([`build_c_pair`]):
//!
//! * identity kind iff `0` and `π(N)` share a cycle,
//! * the weight is `d^(c − 1 − N)` with `c` the number of cycles, for both kinds
//!   (against `ρ ↦ ρ` and `ρ ↦ tr(ρ) I/d` respectively).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{identity, ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::perm::{build_c_pair, cycle_decomposition, Permutation};

use super::{check_orderings, SwitchOutput};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    /// `𝒩_{ππ′} ∝ ℐ`: the term carries the input through.
    #[serde(rename = "Identity")]
    IdentityProportional,
    /// `𝒩_{ππ′} ∝ 𝒟`: the term forgets the input.
    #[serde(rename = "Depolarising")]
    DepolarisingProportional,
}

impl TermKind {
    pub fn transmits(self) -> bool {
        self == TermKind::IdentityProportional
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermKind::IdentityProportional => "Identity",
            TermKind::DepolarisingProportional => "Depolarising",
        })
    }
}

/// Which element is tested against `0` for same-cycle membership.
///
/// `C_{ππ′}` maps `π(N)` to `π′(N)`, so both anchors always give the same
/// answer; the choice is kept explicit so reports can show it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    PiLast,
    PiPrimeLast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TermClass {
    pub kind: TermKind,
    /// Number of cycles of `C_{ππ′}`, fixed points included.
    pub cycle_count: usize,
    /// `c − 1 − N`: the term's weight is `d` to this power.
    pub coefficient_log_d: i32,
    pub n: usize,
}

impl TermClass {
    pub fn weight(&self, d: usize) -> f64 {
        (d as f64).powi(self.coefficient_log_d)
    }
}

pub fn classify_term(pi: &Permutation, pi_prime: &Permutation) -> Result<TermClass> {
    classify_term_anchored(pi, pi_prime, Anchor::PiLast)
}

pub fn classify_term_anchored(
    pi: &Permutation,
    pi_prime: &Permutation,
    anchor: Anchor,
) -> Result<TermClass> {
    let n = pi.len();
    let cycles = cycle_decomposition(&build_c_pair(pi, pi_prime)?);
    let probe = match anchor {
        Anchor::PiLast => pi.apply(n),
        Anchor::PiPrimeLast => pi_prime.apply(n),
    };
    let kind = if cycles.same_cycle(0, probe)? {
        TermKind::IdentityProportional
    } else {
        TermKind::DepolarisingProportional
    };
    let cycle_count = cycles.cycle_count();
    Ok(TermClass {
        kind,
        cycle_count,
        coefficient_log_d: cycle_count as i32 - 1 - n as i32,
        n,
    })
}

/// The cds-sortability condition: `0` and `π′(N)` share a cycle of `C_{ππ′}`.
///
/// It coincides with the identity kind on every pair. Treating sortable pairs
/// as depolarising instead contradicts brute force everywhere; `verify`
/// reports that mismatch count.
pub fn cds_condition(pi: &Permutation, pi_prime: &Permutation) -> Result<bool> {
    let cycles = cycle_decomposition(&build_c_pair(pi, pi_prime)?);
    cycles.same_cycle(0, pi_prime.apply(pi_prime.len()))
}

/// `𝒩_{ππ′}(m)` for depolarising channels on dimension `d`:
/// `d^(c−1−N) m` or `d^(c−1−N) tr(m) I/d`.
pub fn term_channel(
    pi: &Permutation,
    pi_prime: &Permutation,
    d: usize,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if m.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "input is {}x{}, expected {d}x{d}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(apply_class(&classify_term(pi, pi_prime)?, d, m))
}

fn apply_class(class: &TermClass, d: usize, m: &ComplexMatrix) -> ComplexMatrix {
    let w = class.weight(d);
    match class.kind {
        TermKind::IdentityProportional => m.scale(w),
        TermKind::DepolarisingProportional => {
            identity(d) * (m.trace() * Complex64::new(w / d as f64, 0.0))
        }
    }
}

/// Switch of `N` depolarising channels without any Kraus summation.
pub fn switch_output_fast(
    d: usize,
    perms: &[Permutation],
    control: &DensityMatrix,
    rho: &DensityMatrix,
) -> Result<SwitchOutput> {
    check_orderings(perms)?;
    if d < 2 {
        return Err(Error::InvalidSpec(format!(
            "depolarising channels need d >= 2, got {d}"
        )));
    }
    if control.dim() != perms.len() {
        return Err(Error::InvalidSpec(format!(
            "control has dimension {}, but {} orderings",
            control.dim(),
            perms.len()
        )));
    }
    if rho.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "input state has dimension {}, expected {d}",
            rho.dim()
        )));
    }
    let m = perms.len();
    let mut blocks = Vec::with_capacity(m * m);
    for (p, a) in perms.iter().enumerate() {
        for (q, b) in perms.iter().enumerate() {
            let class = classify_term(a, b)?;
            blocks.push(apply_class(&class, d, rho.matrix()) * control.matrix()[(p, q)]);
        }
    }
    Ok(SwitchOutput::from_blocks(d, perms.to_vec(), blocks))
}
