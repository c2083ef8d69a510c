//! Ranking sets of orderings for a switch of depolarising channels.
//!
//! A set `S` of `M` orderings is scored by
//! `O(S) = n_id·E_id / (n_dp·E_dp)`, where `n_id`/`n_dp` count the ordered
//! pairs `(π, π′) ∈ S²` whose term is identity-/depolarising-proportional and
//! `E_id`/`E_dp` are the mean weights `d^(c−1−N)` over those pairs. Since
//! `n·E` is just the summed weight, `O(S)` is the total weight of transmitting
//! terms over the total weight of depolarising ones.
//!
//! The exhaustive search compares objectives exactly: every weight is
//! `d^c / d^(N+1)`, so the scaled sums `Σ d^c` are integers.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{holevo_quantity, DensityMatrix, Ensemble};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::perm::{is_mutually_cyclic, Permutation};
use crate::switch::{check_orderings, classify_term, switch_output_fast, TermKind};

/// Largest `N` accepted by [`search_best`].
pub const MAX_EXHAUSTIVE_N: usize = 4;
/// Largest `N` accepted by [`search_sampled`].
pub const MAX_SAMPLED_N: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolScore {
    pub perms: Vec<Permutation>,
    pub n_id: usize,
    pub n_dp: usize,
    pub e_id: f64,
    pub e_dp: f64,
    pub objective: f64,
}

pub fn score(perms: &[Permutation], d: usize) -> Result<ProtocolScore> {
    check_orderings(perms)?;
    let (mut n_id, mut n_dp) = (0usize, 0usize);
    let (mut w_id, mut w_dp) = (0.0, 0.0);
    for a in perms {
        for b in perms {
            let class = classify_term(a, b)?;
            let w = class.weight(d);
            match class.kind {
                TermKind::IdentityProportional => {
                    n_id += 1;
                    w_id += w;
                }
                TermKind::DepolarisingProportional => {
                    n_dp += 1;
                    w_dp += w;
                }
            }
        }
    }
    let mean = |w: f64, n: usize| if n == 0 { 0.0 } else { w / n as f64 };
    let (e_id, e_dp) = (mean(w_id, n_id), mean(w_dp, n_dp));
    let objective = if n_id == 0 || n_dp == 0 {
        0.0
    } else {
        (n_id as f64 * e_id) / (n_dp as f64 * e_dp)
    };
    Ok(ProtocolScore {
        perms: perms.to_vec(),
        n_id,
        n_dp,
        e_id,
        e_dp,
        objective,
    })
}

/// Whether every two distinct members are mutual cyclic rotations.
pub fn pairwise_mutually_cyclic(perms: &[Permutation]) -> Result<bool> {
    for (i, a) in perms.iter().enumerate() {
        for b in &perms[i + 1..] {
            if !is_mutually_cyclic(a, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Maximizer {
    pub perms: Vec<Permutation>,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    pub maximizers: Vec<Maximizer>,
    pub subsets_scanned: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

/// Classification of every ordered pair of `S_N`, as exact scaled weights.
struct PairTable {
    perms: Vec<Permutation>,
    /// `(transmits, d^c)` for pair `(i, j)` at `i * len + j`.
    entries: Vec<(bool, u64)>,
}

impl PairTable {
    fn new(n: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidSpec(format!("d must be at least 2, got {d}")));
        }
        let perms = Permutation::all(n);
        let overflow = || Error::Infeasible(format!("d^{} overflows exact scoring", n + 1));
        let scale_int = (d as u64).checked_pow(n as u32 + 1).ok_or_else(overflow)?;
        // M² · d^(N+1) must fit as well
        (perms.len() as u64 * perms.len() as u64)
            .checked_mul(scale_int)
            .ok_or_else(overflow)?;
        let mut entries = Vec::with_capacity(perms.len() * perms.len());
        for a in &perms {
            for b in &perms {
                let class = classify_term(a, b)?;
                let w = (d as u64).pow(class.cycle_count as u32);
                entries.push((class.kind.transmits(), w));
            }
        }
        Ok(Self { perms, entries })
    }

    fn len(&self) -> usize {
        self.perms.len()
    }

    /// Scaled `(Σ_id d^c, Σ_dp d^c)` over the ordered pairs of `subset`.
    fn sums(&self, subset: &[usize]) -> Fraction {
        let (mut num, mut den) = (0u64, 0u64);
        for &i in subset {
            let row = &self.entries[i * self.len()..(i + 1) * self.len()];
            for &j in subset {
                let (transmits, w) = row[j];
                if transmits {
                    num += w;
                } else {
                    den += w;
                }
            }
        }
        Fraction { num, den }
    }

    fn maximizer(&self, subset: &[usize], f: Fraction) -> Maximizer {
        Maximizer {
            perms: subset.iter().map(|&i| self.perms[i].clone()).collect(),
            objective: f.value(),
        }
    }
}

/// Exact objective `num / den`; `den > 0` always holds because diagonal pairs
/// are depolarising.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default)]
struct Best {
    value: Option<Fraction>,
    ties: Vec<Vec<usize>>,
}

impl Best {
    fn offer(&mut self, f: Fraction, subset: &[usize]) {
        match self.value.map(|v| f.cmp(&v)) {
            None | Some(Ordering::Greater) => {
                self.value = Some(f);
                self.ties.clear();
                self.ties.push(subset.to_vec());
            }
            Some(Ordering::Equal) => self.ties.push(subset.to_vec()),
            Some(Ordering::Less) => {}
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if let Some(v) = other.value {
            match self.value.map(|s| v.cmp(&s)) {
                None | Some(Ordering::Greater) => return other,
                Some(Ordering::Equal) => self.ties.extend(other.ties),
                Some(Ordering::Less) => {}
            }
        }
        self
    }

    fn into_maximizers(mut self, table: &PairTable) -> Vec<Maximizer> {
        let Some(v) = self.value else {
            return Vec::new();
        };
        self.ties.sort();
        self.ties.dedup();
        self.ties.iter().map(|s| table.maximizer(s, v)).collect()
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        loop {
            let rest = binomial((n - next - 1) as u64, (k - slot - 1) as u64);
            if rank < rest {
                break;
            }
            rank -= rest;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

const CHUNK: u64 = 4096;

pub fn search_best(n: usize, m: usize, d: usize) -> Result<SearchReport> {
    search_best_with(n, m, d, Execution::default())
}

/// Scores every `M`-subset of `S_N` and returns all maximizers, sorted
/// lexicographically. Limited to `N ≤ 4`; see [`search_sampled`] beyond.
pub fn search_best_with(n: usize, m: usize, d: usize, exec: Execution) -> Result<SearchReport> {
    if n == 0 || n > MAX_EXHAUSTIVE_N {
        return Err(Error::Infeasible(format!(
            "exhaustive search supports 1 <= N <= {MAX_EXHAUSTIVE_N}, got N = {n}; use sampled mode"
        )));
    }
    let table = PairTable::new(n, d)?;
    let len = table.len();
    if m == 0 || m > len {
        return Err(Error::Infeasible(format!(
            "M must be in 1..={len} for N = {n}, got {m}"
        )));
    }
    let total = binomial(len as u64, m as u64);
    let chunks = total.div_ceil(CHUNK) as usize;
    let partial = exec.map_range(chunks, |chunk| {
        let start = chunk as u64 * CHUNK;
        let count = CHUNK.min(total - start);
        let mut subset = unrank_combination(len, m, start);
        let mut best = Best::default();
        for step in 0..count {
            best.offer(table.sums(&subset), &subset);
            if step + 1 < count {
                next_combination(&mut subset, len);
            }
        }
        best
    });
    let best = partial.into_iter().fold(Best::default(), Best::merge);
    Ok(SearchReport {
        n,
        m,
        d,
        maximizers: best.into_maximizers(&table),
        subsets_scanned: total,
        seed: None,
    })
}

/// Scores `samples` uniformly random `M`-subsets of `S_N` drawn from a
/// ChaCha8 stream seeded with `seed`. The result depends only on the
/// arguments, not on the execution mode.
pub fn search_sampled(
    n: usize,
    m: usize,
    d: usize,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<SearchReport> {
    if n == 0 || n > MAX_SAMPLED_N {
        return Err(Error::Infeasible(format!(
            "sampled search supports 1 <= N <= {MAX_SAMPLED_N}, got N = {n}"
        )));
    }
    let table = PairTable::new(n, d)?;
    let len = table.len();
    if m == 0 || m > len {
        return Err(Error::Infeasible(format!(
            "M must be in 1..={len} for N = {n}, got {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> = (0..samples)
        .map(|_| {
            let mut s = rand::seq::index::sample(&mut rng, len, m).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let scored = exec.map(&subsets, |s| table.sums(s));
    let mut best = Best::default();
    for (s, f) in subsets.iter().zip(scored) {
        best.offer(f, s);
    }
    Ok(SearchReport {
        n,
        m,
        d,
        maximizers: best.into_maximizers(&table),
        subsets_scanned: samples,
        seed: Some(seed),
    })
}

/// Holevo quantity (bits) of the switch outputs, system and control kept,
/// for an ensemble of `d`-dimensional inputs.
pub fn holevo_of_protocol(
    perms: &[Permutation],
    d: usize,
    ensemble: &Ensemble,
    control: &DensityMatrix,
) -> Result<f64> {
    protocol_holevo(perms, d, ensemble, control, false)
}

/// As [`holevo_of_protocol`], with the control discarded before scoring.
pub fn holevo_of_protocol_discarding_control(
    perms: &[Permutation],
    d: usize,
    ensemble: &Ensemble,
    control: &DensityMatrix,
) -> Result<f64> {
    protocol_holevo(perms, d, ensemble, control, true)
}

fn protocol_holevo(
    perms: &[Permutation],
    d: usize,
    ensemble: &Ensemble,
    control: &DensityMatrix,
    discard_control: bool,
) -> Result<f64> {
    if ensemble.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "ensemble states have dimension {}, expected {d}",
            ensemble.dim()
        )));
    }
    let outputs = ensemble
        .entries()
        .iter()
        .map(|(p, rho)| {
            let out = switch_output_fast(d, perms, control, rho)?;
            let state = if discard_control {
                DensityMatrix::new(out.trace_control())?
            } else {
                out.to_density()?
            };
            Ok((*p, state))
        })
        .collect::<Result<Vec<_>>>()?;
    holevo_quantity(&Ensemble::new(outputs)?)
}
