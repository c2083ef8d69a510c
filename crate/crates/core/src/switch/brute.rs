//! Ground-truth switch evaluation by explicit summation over joint Kraus
//! indices. Works for arbitrary channels; cost is `Πᵢ kᵢ` matrix products
//! per term.

use crate::channels::{
    identity, kron, max_abs_diff, partial_trace, ComplexMatrix, DensityMatrix, KrausChannel,
};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::perm::Permutation;

use super::{SwitchOutput, SwitchSpec};

/// `𝒩_{ππ′}(m) = Σ_j L_j m R_j†` with `L_j = K^{π(N)} ⋯ K^{π(1)}` and
/// `R_j = K^{π′(N)} ⋯ K^{π′(1)}`, where channel `i` uses the same Kraus index
/// `jᵢ` on both sides. `π(1)` is the first channel applied.
///
/// `m` may be any `d × d` operator; the map is linear in it.
pub fn interference_term(
    channels: &[KrausChannel],
    pi: &Permutation,
    pi_prime: &Permutation,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = channels.len();
    if pi.len() != n || pi_prime.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} channels but orderings of {} and {} labels",
            pi.len(),
            pi_prime.len()
        )));
    }
    let d = m.nrows();
    if !m.is_square() || channels.iter().any(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch(format!(
            "input is {}x{}, channels act on {:?}",
            m.nrows(),
            m.ncols(),
            channels.iter().map(KrausChannel::dim).collect::<Vec<_>>()
        )));
    }

    let mut sum = JointKrausSum {
        channels,
        adjoints: channels
            .iter()
            .map(|c| c.kraus().iter().map(|k| k.adjoint()).collect())
            .collect(),
        left: pi.images().iter().map(|&l| l - 1).collect(),
        right: pi_prime.images().iter().map(|&l| l - 1).collect(),
        chosen: vec![0; n],
        prefix: vec![m.clone(); n + 1],
        acc: ComplexMatrix::zeros(d, d),
    };
    sum.descend(0);
    Ok(sum.acc)
}

struct JointKrausSum<'a> {
    channels: &'a [KrausChannel],
    adjoints: Vec<Vec<ComplexMatrix>>,
    /// 0-based channel index applied at each step, left and right sides.
    left: Vec<usize>,
    right: Vec<usize>,
    /// Kraus index currently chosen for each channel.
    chosen: Vec<usize>,
    /// `prefix[a]` is the left product of the first `a` channels applied to the input.
    prefix: Vec<ComplexMatrix>,
    acc: ComplexMatrix,
}

impl JointKrausSum<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.left.len() {
            let mut term = self.prefix[depth].clone();
            for &ch in &self.right {
                term *= &self.adjoints[ch][self.chosen[ch]];
            }
            self.acc += term;
            return;
        }
        let ch = self.left[depth];
        for j in 0..self.channels[ch].num_kraus() {
            self.chosen[ch] = j;
            self.prefix[depth + 1] = &self.channels[ch].kraus()[j] * &self.prefix[depth];
            self.descend(depth + 1);
        }
    }
}

pub fn switch_output(spec: &SwitchSpec, rho: &DensityMatrix) -> Result<SwitchOutput> {
    switch_output_with(spec, rho, Execution::default())
}

/// Block `(p, q)` is `control[p, q] · 𝒩_{π_p π_q}(ρ)`; blocks are evaluated
/// independently.
pub fn switch_output_with(
    spec: &SwitchSpec,
    rho: &DensityMatrix,
    exec: Execution,
) -> Result<SwitchOutput> {
    if rho.dim() != spec.d() {
        return Err(Error::DimensionMismatch(format!(
            "input state has dimension {}, switch acts on {}",
            rho.dim(),
            spec.d()
        )));
    }
    let m = spec.m();
    let blocks = exec.map_range(m * m, |idx| {
        let (p, q) = (idx / m, idx % m);
        interference_term(
            spec.channels(),
            &spec.perms()[p],
            &spec.perms()[q],
            rho.matrix(),
        )
        .map(|t| t * spec.control().matrix()[(p, q)])
    });
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SwitchOutput::from_blocks(
        spec.d(),
        spec.perms().to_vec(),
        blocks,
    ))
}

/// Two-order interference computed through Stinespring dilations: the two
/// orderings `g∘f` and `f∘g` are formed as isometries into
/// system ⊗ E_g ⊗ E_f and all environments are traced out.
pub fn dilated_interference_term(
    f: &KrausChannel,
    g: &KrausChannel,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let d = f.dim();
    if g.dim() != d || m.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "channels act on {} and {}, input is {}x{}",
            d,
            g.dim(),
            m.nrows(),
            m.ncols()
        )));
    }
    let vf = f.stinespring_dilation();
    let vg = g.stinespring_dilation();
    let (kf, kg) = (vf.env_dim(), vg.env_dim());

    // f first: H → (H ⊗ E_g) ⊗ E_f
    let f_then_g = kron(vg.matrix(), &identity(kf)) * vf.matrix();
    // g first: H → (H ⊗ E_f) ⊗ E_g, reordered to H ⊗ E_g ⊗ E_f
    let g_then_f_raw = kron(vf.matrix(), &identity(kg)) * vg.matrix();
    let mut g_then_f = ComplexMatrix::zeros(d * kg * kf, d);
    for h in 0..d {
        for i_f in 0..kf {
            for i_g in 0..kg {
                let from = (h * kf + i_f) * kg + i_g;
                let to = (h * kg + i_g) * kf + i_f;
                g_then_f.set_row(to, &g_then_f_raw.row(from));
            }
        }
    }

    let joint = &f_then_g * m * g_then_f.adjoint();
    partial_trace(&joint, &[d, kg, kf], &[0])
}

/// Whether the dilated computation agrees with [`interference_term`] for the
/// orderings `(1,2)` and `(2,1)` of `[f, g]` within `tol`.
pub fn dilated_interference_check(
    f: &KrausChannel,
    g: &KrausChannel,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<bool> {
    let dilated = dilated_interference_term(f, g, rho.matrix())?;
    let direct = interference_term(
        &[f.clone(), g.clone()],
        &Permutation::identity(2),
        &Permutation::rotation(2, 1),
        rho.matrix(),
    )?;
    Ok(max_abs_diff(&dilated, &direct) <= tol)
}
