use num_complex::Complex64;
use proptest::prelude::*;
use qswitch_core::channels::random::{random_channel, random_density};
use qswitch_core::channels::{holevo_quantity, identity, kron, max_abs_diff, ComplexMatrix};
use qswitch_core::diagram::{
    build_diagram, count_loops, is_information_transmitting, modify_diagram,
};
use qswitch_core::optimizer::score;
use qswitch_core::perm::{
    build_c_pair, cycle_decomposition, is_mutually_cyclic, ExtendedPermutation,
};
use qswitch_core::switch::brute::{interference_term, switch_output, switch_output_with};
use qswitch_core::switch::{classify_term, fourier_control, switch_output_fast, TermKind};
use qswitch_core::{
    make_cdpc, make_identity_channel, DensityMatrix, Ensemble, Execution, Permutation, SwitchSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn perm_pair(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (1..=max_n).prop_flat_map(|n| (perm(n), perm(n)))
}

fn perm_triple(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1..=max_n).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

fn extended(max_n: usize) -> impl Strategy<Value = ExtendedPermutation> {
    (1..=max_n).prop_flat_map(|n| {
        Just((0..=n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| ExtendedPermutation::new(v).unwrap())
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn is_density(m: &ComplexMatrix, tol: f64) -> bool {
    DensityMatrix::with_tolerance(m.clone(), tol).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative((a, b, c) in perm_triple(7)) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_cancels(a in (1..=8usize).prop_flat_map(perm)) {
        let id = Permutation::identity(a.len());
        prop_assert_eq!(a.compose(&a.inverse()).unwrap(), id.clone());
        prop_assert_eq!(a.inverse().compose(&a).unwrap(), id);
    }

    #[test]
    fn cycles_round_trip(e in extended(8)) {
        let c = cycle_decomposition(&e);
        prop_assert_eq!(c.to_permutation(), e.clone());
        prop_assert_eq!(c.cycles().iter().map(Vec::len).sum::<usize>(), e.n() + 1);
        for cycle in c.cycles() {
            prop_assert_eq!(cycle[0], *cycle.iter().min().unwrap());
        }
    }

    #[test]
    fn c_pair_function_form((a, b) in perm_pair(7)) {
        let n = a.len();
        let c = build_c_pair(&a, &b).unwrap();
        // π′ extended by π′(0) = 0; π′⁻¹ likewise.
        let bp = |x: usize| if x == 0 { 0 } else { b.apply(x) };
        let b_inv = b.inverse();
        for x in 1..n {
            prop_assert_eq!(c.apply(a.apply(x)), bp(b_inv.apply(a.apply(x + 1)) - 1));
        }
        prop_assert_eq!(c.apply(a.apply(n)), b.apply(n));
        prop_assert_eq!(c.apply(0), bp(b_inv.apply(a.apply(1)) - 1));
    }

    #[test]
    fn diagram_agrees_with_cycles((a, b) in perm_pair(7)) {
        let class = classify_term(&a, &b).unwrap();
        let dg = build_diagram(&a, &b).unwrap();
        prop_assert_eq!(count_loops(&modify_diagram(&dg).unwrap()), class.cycle_count);
        prop_assert_eq!(is_information_transmitting(&dg).unwrap(), class.kind.transmits());
    }

    #[test]
    fn relabelling_channels_preserves_class((a, b, s) in perm_triple(6)) {
        let x = classify_term(&a, &b).unwrap();
        let y = classify_term(&s.compose(&a).unwrap(), &s.compose(&b).unwrap()).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn swapping_orderings_preserves_class((a, b) in perm_pair(7)) {
        prop_assert_eq!(classify_term(&a, &b).unwrap(), classify_term(&b, &a).unwrap());
    }

    #[test]
    fn rotations_are_mutually_cyclic(a in (2..=7usize).prop_flat_map(perm), k in 1usize..7) {
        let n = a.len();
        let k = k % n;
        prop_assume!(k != 0);
        let b = a.compose(&Permutation::rotation(n, k)).unwrap();
        prop_assert!(is_mutually_cyclic(&a, &b).unwrap());
        let class = classify_term(&a, &b).unwrap();
        prop_assert_eq!(class.cycle_count, n - 1);
        prop_assert_eq!(class.kind, TermKind::IdentityProportional);
    }

    #[test]
    fn subsets_never_beat_the_cyclic_bound(
        picks in proptest::sample::subsequence((0..24usize).collect::<Vec<_>>(), 2..=5),
        d in 2usize..=3,
    ) {
        let all = Permutation::all(4);
        let set: Vec<Permutation> = picks.iter().map(|&i| all[i].clone()).collect();
        let bound = (set.len() as f64 - 1.0) / (d * d) as f64;
        prop_assert!(score(&set, d).unwrap().objective <= bound + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn channels_map_states_to_states(seed in any::<u64>(), d in 2usize..=4, k in 1usize..=5) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, d, k);
        prop_assert!(ch.validate_cptp(1e-9));
        let out = ch.apply(&random_density(&mut r, d)).unwrap();
        prop_assert!(is_density(out.matrix(), 1e-9));
    }

    #[test]
    fn dilation_reproduces_channel(seed in any::<u64>(), d in 2usize..=4, k in 1usize..=4) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, d, k);
        let rho = random_density(&mut r, d);
        let v = ch.stinespring_dilation();
        prop_assert!(v.is_isometry(1e-10));
        let traced = v.apply_traced(rho.matrix()).unwrap();
        prop_assert!(max_abs_diff(&traced, ch.apply(&rho).unwrap().matrix()) < 1e-10);
    }

    #[test]
    fn holevo_is_bounded(seed in any::<u64>(), d in 2usize..=4, count in 1usize..=4) {
        let mut r = rng(seed);
        let states = (0..count).map(|_| random_density(&mut r, d)).collect();
        let chi = holevo_quantity(&Ensemble::uniform(states).unwrap()).unwrap();
        prop_assert!(chi >= 0.0);
        prop_assert!(chi <= (d as f64).log2() + 1e-10);
    }

    #[test]
    fn cdpc_forgets_input(seed in any::<u64>(), d in 2usize..=4) {
        let rho = random_density(&mut rng(seed), d);
        let out = make_cdpc(d).unwrap().apply(&rho).unwrap();
        prop_assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(d).matrix()) < 1e-12);
    }

    #[test]
    fn discarding_control_of_cyclic_protocol_forgets_input(seed in any::<u64>(), n in 2usize..=5, d in 2usize..=3) {
        let rho = random_density(&mut rng(seed), d);
        let out = switch_output_fast(d, &Permutation::cyclic_set(n), &fourier_control(n), &rho).unwrap();
        prop_assert!(max_abs_diff(&out.trace_control(), DensityMatrix::maximally_mixed(d).matrix()) < 1e-12);
    }

    #[test]
    fn switch_output_is_a_state(seed in any::<u64>(), n in 2usize..=3, d in 2usize..=3) {
        let mut r = rng(seed);
        let channels = (0..n).map(|_| random_channel(&mut r, d, 2)).collect();
        let perms = Permutation::cyclic_set(n);
        let control = random_density(&mut r, n);
        let spec = SwitchSpec::new(channels, perms, control).unwrap();
        let out = switch_output(&spec, &random_density(&mut r, d)).unwrap();
        for p in 0..n {
            for q in 0..n {
                prop_assert!(max_abs_diff(out.block(q, p), &out.block(p, q).adjoint()) < 1e-12);
            }
        }
        let full = out.assemble();
        prop_assert!((full.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(is_density(&full, 1e-9));
    }

    #[test]
    fn interference_term_is_linear(seed in any::<u64>(), (a, b) in perm_pair(3), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let mut r = rng(seed);
        let d = 2;
        let channels: Vec<_> = (0..a.len()).map(|_| random_channel(&mut r, d, 2)).collect();
        let (m1, m2) = (random_density(&mut r, d), random_density(&mut r, d));
        let (cx, cy) = (Complex64::new(x, 0.5), Complex64::new(y, -1.0));
        let combined = m1.matrix() * cx + m2.matrix() * cy;
        let lhs = interference_term(&channels, &a, &b, &combined).unwrap();
        let rhs = interference_term(&channels, &a, &b, m1.matrix()).unwrap() * cx
            + interference_term(&channels, &a, &b, m2.matrix()).unwrap() * cy;
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn identity_channels_pass_input_and_control(seed in any::<u64>(), n in 1usize..=3, d in 2usize..=3) {
        let mut r = rng(seed);
        let perms = Permutation::all(n);
        let control = random_density(&mut r, perms.len());
        let rho = random_density(&mut r, d);
        let spec = SwitchSpec::new(vec![make_identity_channel(d); n], perms, control.clone()).unwrap();
        let out = switch_output(&spec, &rho).unwrap();
        prop_assert!(max_abs_diff(&out.assemble(), &kron(rho.matrix(), control.matrix())) < 1e-12);
    }

    #[test]
    fn execution_modes_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let channels = (0..3).map(|_| random_channel(&mut r, 2, 2)).collect();
        let spec = SwitchSpec::new(channels, Permutation::cyclic_set(3), fourier_control(3)).unwrap();
        let rho = random_density(&mut r, 2);
        let seq = switch_output_with(&spec, &rho, Execution::Sequential).unwrap();
        let par = switch_output_with(&spec, &rho, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}

#[test]
fn cdpc_terms_depend_only_on_class() {
    let rho = DensityMatrix::plus(2);
    let channels = vec![make_cdpc(2).unwrap(); 3];
    for a in Permutation::all(3) {
        for b in Permutation::all(3) {
            let class = classify_term(&a, &b).unwrap();
            let term = interference_term(&channels, &a, &b, rho.matrix()).unwrap();
            let expected = match class.kind {
                TermKind::IdentityProportional => rho.matrix().scale(class.weight(2)),
                TermKind::DepolarisingProportional => identity(2).scale(class.weight(2) / 2.0),
            };
            assert!(max_abs_diff(&term, &expected) < 1e-14, "{a} {b}");
        }
    }
}
