//! Permutations of channel labels and the cycle algebra used to classify
//! interference terms.
//!
//! Channel labels are `1..=N` and a [`Permutation`] is stored in one-line
//! notation: `images[a - 1] = π(a)`, so `π(a)` is the `a`-th channel applied.
//! The extended set `{0, 1, …, N}` reserves `0` for the extra element used by
//! [`build_c_pair`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{1, …, N}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "image {v} outside 1..={n} in {images:?}"
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!(
                    "image {v} repeated in {images:?}"
                )));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (1..=n).collect(),
        }
    }

    /// The `k`-th power of the shift `a ↦ a + 1 (mod N)`, i.e. the one-line
    /// notation `(k+1, k+2, …, N, 1, …, k)`.
    pub fn rotation(n: usize, k: usize) -> Self {
        Self {
            images: (0..n).map(|a| (a + k) % n + 1).collect(),
        }
    }

    /// The `N` rotations of `(1, …, N)`, starting from the identity.
    pub fn cyclic_set(n: usize) -> Vec<Self> {
        (0..n).map(|k| Self::rotation(n, k)).collect()
    }

    /// All `N!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut cur: Vec<usize> = (1..=n).collect();
        let mut out = vec![Self {
            images: cur.clone(),
        }];
        while next_lexicographic(&mut cur) {
            out.push(Self {
                images: cur.clone(),
            });
        }
        out
    }

    /// Number of labels `N`.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `π(a)` for `a ∈ 1..=N`.
    pub fn apply(&self, a: usize) -> usize {
        self.images[a - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `r = self ∘ q`, i.e. `r(a) = self(q(a))`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        check_same_len(self.len(), q.len())?;
        Ok(Permutation {
            images: q.images.iter().map(|&a| self.apply(a)).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Permutation { images }
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&x| x > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

fn check_same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::SizeMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A bijection on `{0, 1, …, N}`, stored 0-indexed: `images[x]` is the image
/// of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedPermutation {
    images: Vec<usize>,
}

impl ExtendedPermutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let len = images.len();
        if len < 2 {
            return Err(Error::InvalidPermutation(format!(
                "extended permutation needs at least 2 elements, got {len}"
            )));
        }
        let mut seen = vec![false; len];
        for &v in &images {
            if v >= len || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection on 0..{len}"
                )));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..=n).collect(),
        }
    }

    /// The cycle `(c[0] c[1] … c[k-1])` on `{0, …, N}`; elements not listed
    /// are fixed.
    pub fn from_cycle(n: usize, cycle: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..=n).collect();
        let mut seen = vec![false; n + 1];
        for (i, &x) in cycle.iter().enumerate() {
            if x > n {
                return Err(Error::OutOfRange { element: x, max: n });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!(
                    "element {x} repeated in cycle {cycle:?}"
                )));
            }
            images[x] = cycle[(i + 1) % cycle.len()];
        }
        Ok(Self { images })
    }

    /// `N`, the largest element.
    pub fn n(&self) -> usize {
        self.images.len() - 1
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ q`.
    pub fn compose(&self, q: &ExtendedPermutation) -> Result<ExtendedPermutation> {
        check_same_len(self.images.len(), q.images.len())?;
        Ok(Self {
            images: q.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> ExtendedPermutation {
        let mut images = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Self { images }
    }
}

/// Disjoint cycles covering `{0, …, N}`, each starting at its smallest
/// element and sorted by that element. Fixed points are singleton cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
    /// Index into `cycles` for every element.
    owner: Vec<usize>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// `N`, the largest element covered.
    pub fn n(&self) -> usize {
        self.owner.len() - 1
    }

    pub fn same_cycle(&self, a: usize, b: usize) -> Result<bool> {
        let max = self.n();
        for x in [a, b] {
            if x > max {
                return Err(Error::OutOfRange { element: x, max });
            }
        }
        Ok(self.owner[a] == self.owner[b])
    }

    /// Rebuilds the permutation the cycles describe.
    pub fn to_permutation(&self) -> ExtendedPermutation {
        let mut images = vec![0; self.owner.len()];
        for c in &self.cycles {
            for (i, &x) in c.iter().enumerate() {
                images[x] = c[(i + 1) % c.len()];
            }
        }
        ExtendedPermutation { images }
    }
}

pub fn cycle_decomposition(e: &ExtendedPermutation) -> CycleDecomposition {
    let len = e.images.len();
    let mut owner = vec![usize::MAX; len];
    let mut cycles = Vec::new();
    // Scanning starts in increasing order, so each cycle begins at its
    // smallest element and cycles come out sorted.
    for start in 0..len {
        if owner[start] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut cycle = Vec::new();
        let mut x = start;
        while owner[x] == usize::MAX {
            owner[x] = id;
            cycle.push(x);
            x = e.images[x];
        }
        cycles.push(cycle);
    }
    CycleDecomposition { cycles, owner }
}

/// Builds `C_{ππ′}` on `{0, …, N}`.
///
/// First applies the cycle `0 → π(1) → π(2) → … → π(N) → 0`, then the cycle
/// `0 → π′(N) → π′(N−1) → … → π′(1) → 0`. On labels this is
/// `π(a) ↦ π′(π′⁻¹(π(a+1)) − 1)` with `π(N+1)` and `π′(0)` read as `0`.
pub fn build_c_pair(pi: &Permutation, pi_prime: &Permutation) -> Result<ExtendedPermutation> {
    check_same_len(pi.len(), pi_prime.len())?;
    let n = pi.len();

    let mut forward = vec![0; n + 1];
    forward[0] = pi.apply(1);
    for a in 1..n {
        forward[pi.apply(a)] = pi.apply(a + 1);
    }
    forward[pi.apply(n)] = 0;

    let mut backward = vec![0; n + 1];
    backward[0] = pi_prime.apply(n);
    for a in 2..=n {
        backward[pi_prime.apply(a)] = pi_prime.apply(a - 1);
    }
    backward[pi_prime.apply(1)] = 0;

    Ok(ExtendedPermutation {
        images: forward.into_iter().map(|x| backward[x]).collect(),
    })
}

/// Whether `π′` is a non-trivial cyclic rotation of `π`, i.e. `π⁻¹ ∘ π′` is
/// `a ↦ a + k (mod N)` for some `k ∈ 1..N`.
///
/// For `N ≤ 3` this is the same as `π′ ∘ π⁻¹` being a single `N`-cycle. For
/// larger `N` only rotations give the maximal identity-proportional
/// coefficient `d⁻²`; a generic `N`-cycle does not.
pub fn is_mutually_cyclic(pi: &Permutation, pi_prime: &Permutation) -> Result<bool> {
    check_same_len(pi.len(), pi_prime.len())?;
    let n = pi.len();
    let rel = pi.inverse().compose(pi_prime)?;
    let k = (rel.apply(1) + n - 1) % n;
    Ok(k != 0 && rel == Permutation::rotation(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        assert!(ExtendedPermutation::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(p(&[2, 1]).compose(&p(&[2, 1])).unwrap(), p(&[1, 2]));
        assert_eq!(
            p(&[1, 2, 3]).compose(&p(&[2, 3, 1])).unwrap(),
            p(&[2, 3, 1])
        );
        assert_eq!(
            p(&[2, 3, 1]).compose(&p(&[3, 1, 2])).unwrap(),
            p(&[1, 2, 3])
        );
        assert!(matches!(
            p(&[1, 2]).compose(&p(&[1, 2, 3])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Permutation::identity(5).inverse(), Permutation::identity(5));
        assert_eq!(p(&[2, 3, 1]).inverse(), p(&[3, 1, 2]));
        assert_eq!(p(&[2, 1]).inverse(), p(&[2, 1]));
    }

    #[test]
    fn enumerates_lexicographically() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], p(&[1, 2, 3]));
        assert_eq!(all[1], p(&[1, 3, 2]));
        assert_eq!(all[5], p(&[3, 2, 1]));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Permutation::all(5).len(), 120);
        assert_eq!(Permutation::all(1), vec![p(&[1])]);
    }

    #[test]
    fn cyclic_set_is_rotations() {
        assert_eq!(
            Permutation::cyclic_set(3),
            vec![p(&[1, 2, 3]), p(&[2, 3, 1]), p(&[3, 1, 2])]
        );
    }

    #[test]
    fn c_pair_examples() {
        let c = build_c_pair(&p(&[1, 2]), &p(&[2, 1])).unwrap();
        assert_eq!(c, ExtendedPermutation::from_cycle(2, &[0, 2, 1]).unwrap());

        let c = build_c_pair(&p(&[1, 2]), &p(&[1, 2])).unwrap();
        assert_eq!(c, ExtendedPermutation::identity(2));

        let c = build_c_pair(&p(&[1, 2, 3]), &p(&[2, 3, 1])).unwrap();
        let d = cycle_decomposition(&c);
        assert_eq!(d.cycles(), &[vec![0, 3, 1], vec![2]]);

        assert!(build_c_pair(&p(&[1, 2]), &p(&[1, 2, 3])).is_err());
    }

    #[test]
    fn c_pair_matches_explicit_cycle_product() {
        // (0 1 3 2) ∘ (0 1 2 3) for π = id, π′ = (2,3,1)
        let first = ExtendedPermutation::from_cycle(3, &[0, 1, 2, 3]).unwrap();
        let second = ExtendedPermutation::from_cycle(3, &[0, 1, 3, 2]).unwrap();
        assert_eq!(
            second.compose(&first).unwrap(),
            build_c_pair(&p(&[1, 2, 3]), &p(&[2, 3, 1])).unwrap()
        );
    }

    #[test]
    fn cycle_decomposition_examples() {
        let d = cycle_decomposition(&ExtendedPermutation::identity(2));
        assert_eq!(d.cycle_count(), 3);
        assert_eq!(d.cycles(), &[vec![0], vec![1], vec![2]]);

        let d = cycle_decomposition(&ExtendedPermutation::from_cycle(2, &[0, 2, 1]).unwrap());
        assert_eq!(d.cycle_count(), 1);
        assert_eq!(d.cycles(), &[vec![0, 2, 1]]);
    }

    #[test]
    fn same_cycle_examples() {
        let id = cycle_decomposition(&ExtendedPermutation::identity(2));
        assert!(!id.same_cycle(0, 2).unwrap());
        let one = cycle_decomposition(&ExtendedPermutation::from_cycle(2, &[0, 2, 1]).unwrap());
        assert!(one.same_cycle(0, 2).unwrap());
        let two = cycle_decomposition(&build_c_pair(&p(&[1, 2, 3]), &p(&[2, 3, 1])).unwrap());
        assert!(two.same_cycle(0, 3).unwrap());
        assert!(!two.same_cycle(0, 2).unwrap());
        assert!(matches!(
            two.same_cycle(0, 4),
            Err(Error::OutOfRange { element: 4, max: 3 })
        ));
    }

    #[test]
    fn mutual_cyclicity_examples() {
        assert!(is_mutually_cyclic(&p(&[1, 2, 3]), &p(&[2, 3, 1])).unwrap());
        assert!(!is_mutually_cyclic(&p(&[1, 2, 3]), &p(&[2, 1, 3])).unwrap());
        assert!(is_mutually_cyclic(&p(&[2, 3, 4, 1]), &p(&[3, 4, 1, 2])).unwrap());
        assert!(!is_mutually_cyclic(&p(&[1, 2]), &p(&[1, 2])).unwrap());
        // a 4-cycle that is not a rotation
        assert!(!is_mutually_cyclic(&p(&[1, 2, 3, 4]), &p(&[3, 4, 2, 1])).unwrap());
        // a rotation whose relative permutation is (1 3)(2 4)
        assert!(is_mutually_cyclic(&p(&[1, 2, 3, 4]), &p(&[3, 4, 1, 2])).unwrap());
    }

    #[test]
    fn rotations_are_mutually_cyclic_pairwise() {
        for n in 2..=6 {
            let set = Permutation::cyclic_set(n);
            for a in &set {
                for b in &set {
                    assert_eq!(is_mutually_cyclic(a, b).unwrap(), a != b);
                }
            }
        }
    }

    #[test]
    fn json_is_one_indexed_array() {
        let q = p(&[2, 3, 1]);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[2,3,1]");
        let back: Permutation = serde_json::from_str("[2,3,1]").unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Permutation>("[2,2,1]").is_err());
        assert_eq!(q.to_string(), "[2,3,1]");
    }
}
