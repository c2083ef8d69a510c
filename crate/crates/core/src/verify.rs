//! Cross-oracle verification suite: brute-force Kraus summation against the
//! cycle classification, the wiring diagrams, the dilation picture and the
//! protocol search.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::random::{random_channel, random_density};
use crate::channels::{identity, make_cdpc, max_abs_diff, ComplexMatrix, DensityMatrix, Ensemble};
use crate::diagram::{build_diagram, count_loops, is_information_transmitting, modify_diagram};
use crate::error::Result;
use crate::optimizer::{
    holevo_of_protocol, holevo_of_protocol_discarding_control, pairwise_mutually_cyclic,
    search_best_with,
};
use crate::par::Execution;
use crate::perm::Permutation;
use crate::switch::brute::{dilated_interference_term, interference_term, switch_output_with};
use crate::switch::fast::{
    cds_condition, classify_term_anchored, switch_output_fast, term_channel, Anchor,
};
use crate::switch::{fourier_control, SwitchSpec, TermKind};

/// Residual allowed when fitting a term against `{ρ, I}`.
pub const FIT_RESIDUAL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub tolerance: f64,
    /// Restrict the Kraus-sum checks to `N ≤ 3`.
    pub quick: bool,
    pub exec: Execution,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            quick: false,
            exec: Execution::default(),
            seed: 2024,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub quick: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status}  {:<width$}  {}", c.name, c.detail)?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} of {} checks passed (tolerance {:e})",
            self.checks.len() - failed,
            self.checks.len(),
            self.tolerance
        )
    }
}

/// Least-squares fit `term ≈ a ρ + b I` in the Frobenius norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProportionalityFit {
    pub rho_coeff: Complex64,
    pub identity_coeff: Complex64,
    pub residual: f64,
}

impl ProportionalityFit {
    /// Identity kind when the `ρ` coefficient is nonzero.
    pub fn kind(&self) -> TermKind {
        if self.rho_coeff.norm() > FIT_RESIDUAL {
            TermKind::IdentityProportional
        } else {
            TermKind::DepolarisingProportional
        }
    }
}

/// `rho` must not be proportional to the identity, or the fit is degenerate.
pub fn proportionality_fit(term: &ComplexMatrix, rho: &ComplexMatrix) -> ProportionalityFit {
    let id = identity(rho.nrows());
    let inner =
        |x: &ComplexMatrix, y: &ComplexMatrix| x.adjoint().component_mul(&y.transpose()).sum();
    let (g11, g12, g22) = (inner(rho, rho), inner(rho, &id), inner(&id, &id));
    let g21 = g12.conj();
    let (r1, r2) = (inner(rho, term), inner(&id, term));
    let det = g11 * g22 - g12 * g21;
    let a = (g22 * r1 - g12 * r2) / det;
    let b = (g11 * r2 - g21 * r1) / det;
    let residual = (term - rho * a - &id * b).norm();
    ProportionalityFit {
        rho_coeff: a,
        identity_coeff: b,
        residual,
    }
}

pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let checks = vec![
        two_channel_closed_form(cfg)?,
        oracle_equivalence(cfg)?,
        classification_fit(cfg)?,
        diagram_loops(cfg)?,
        cyclic_closed_form(cfg)?,
        cyclic_maximizers(cfg)?,
        dilation_consistency(cfg)?,
        capacity_activation(cfg)?,
    ];
    Ok(VerifyReport {
        tolerance: cfg.tolerance,
        quick: cfg.quick,
        checks,
    })
}

fn kraus_max_n(cfg: &VerifyConfig) -> usize {
    if cfg.quick {
        3
    } else {
        4
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn two_channel_closed_form(cfg: &VerifyConfig) -> Result<Check> {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let rho = DensityMatrix::basis(d, 0)?;
        let spec = SwitchSpec::cdpc(d, Permutation::cyclic_set(2), fourier_control(2))?;
        let out = switch_output_with(&spec, &rho, cfg.exec)?;
        let df = d as f64;
        for p in 0..2 {
            for q in 0..2 {
                let expected = if p == q {
                    identity(d).unscale(2.0 * df)
                } else {
                    rho.matrix().unscale(2.0 * df * df)
                };
                worst = worst.max(max_abs_diff(out.block(p, q), &expected));
            }
        }
    }
    Ok(check(
        "two-channel CDPC blocks",
        worst <= cfg.tolerance,
        format!("d in {{2,3}}, max error {worst:.3e}"),
    ))
}

fn oracle_equivalence(cfg: &VerifyConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nmax = kraus_max_n(cfg);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for n in 2..=nmax {
        for d in [2, 3] {
            let channels = vec![make_cdpc(d)?; n];
            let states: Vec<DensityMatrix> = (0..5).map(|_| random_density(&mut rng, d)).collect();
            let all = Permutation::all(n);
            let ordered: Vec<(usize, usize)> = (0..all.len())
                .flat_map(|i| (0..all.len()).map(move |j| (i, j)))
                .collect();
            let errors = cfg.exec.map(&ordered, |&(i, j)| -> Result<f64> {
                let mut e = 0.0f64;
                for rho in &states {
                    let brute = interference_term(&channels, &all[i], &all[j], rho.matrix())?;
                    let fast = term_channel(&all[i], &all[j], d, rho.matrix())?;
                    e = e.max(max_abs_diff(&brute, &fast));
                }
                Ok(e)
            });
            for e in errors {
                worst = worst.max(e?);
            }
            pairs += ordered.len();
        }
    }
    Ok(check(
        "fast terms match Kraus sums",
        worst <= cfg.tolerance,
        format!("N<={nmax}, d in {{2,3}}, {pairs} pairs x 5 states, max error {worst:.3e}"),
    ))
}

fn classification_fit(cfg: &VerifyConfig) -> Result<Check> {
    let d = 2;
    let nmax = kraus_max_n(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let rho = random_density(&mut rng, d);
    let (mut worst_residual, mut worst_coeff) = (0.0f64, 0.0f64);
    let (mut pi_last_bad, mut pi_prime_last_bad, mut literal_bad, mut pairs) = (0, 0, 0, 0);
    for n in 1..=nmax {
        let channels = vec![make_cdpc(d)?; n];
        let all = Permutation::all(n);
        let ordered: Vec<(usize, usize)> = (0..all.len())
            .flat_map(|i| (0..all.len()).map(move |j| (i, j)))
            .collect();
        let fits = cfg.exec.map(&ordered, |&(i, j)| {
            interference_term(&channels, &all[i], &all[j], rho.matrix())
                .map(|t| proportionality_fit(&t, rho.matrix()))
        });
        for (&(i, j), fit) in ordered.iter().zip(fits) {
            let fit = fit?;
            let (a, b) = (&all[i], &all[j]);
            let by_pi = classify_term_anchored(a, b, Anchor::PiLast)?;
            let by_pi_prime = classify_term_anchored(a, b, Anchor::PiPrimeLast)?;
            let fitted = fit.kind();
            pi_last_bad += usize::from(by_pi.kind != fitted);
            pi_prime_last_bad += usize::from(by_pi_prime.kind != fitted);
            // Literal cds reading: sortable pairs are depolarising.
            let literal = if cds_condition(a, b)? {
                TermKind::DepolarisingProportional
            } else {
                TermKind::IdentityProportional
            };
            literal_bad += usize::from(literal != fitted);
            worst_residual = worst_residual.max(fit.residual);
            let w = by_pi.weight(d);
            let expected = match by_pi.kind {
                TermKind::IdentityProportional => {
                    (Complex64::new(w, 0.0), Complex64::new(0.0, 0.0))
                }
                TermKind::DepolarisingProportional => {
                    (Complex64::new(0.0, 0.0), Complex64::new(w / d as f64, 0.0))
                }
            };
            worst_coeff = worst_coeff
                .max((fit.rho_coeff - expected.0).norm())
                .max((fit.identity_coeff - expected.1).norm());
            pairs += 1;
        }
    }
    let passed = pi_last_bad == 0 && worst_residual < FIT_RESIDUAL && worst_coeff <= cfg.tolerance;
    Ok(check(
        "cycle classification vs fit",
        passed,
        format!(
            "N<={nmax}, d=2, {pairs} pairs; mismatches: anchor pi(N) {pi_last_bad}, anchor pi'(N) {pi_prime_last_bad}, \
             literal cds reading {literal_bad}; max residual {worst_residual:.3e}, max coeff error {worst_coeff:.3e}"
        ),
    ))
}

fn diagram_loops(cfg: &VerifyConfig) -> Result<Check> {
    let nmax = if cfg.quick { 4 } else { 5 };
    let (mut bad, mut pairs) = (0usize, 0usize);
    for n in 1..=nmax {
        let all = Permutation::all(n);
        for a in &all {
            for b in &all {
                let class = classify_term_anchored(a, b, Anchor::PiLast)?;
                let dg = build_diagram(a, b)?;
                let open_loops = count_loops(&dg);
                let closed_loops = count_loops(&modify_diagram(&dg)?);
                let delta = if class.kind.transmits() { 1 } else { 2 };
                let ok = closed_loops == class.cycle_count
                    && closed_loops == open_loops + delta
                    && is_information_transmitting(&dg)? == class.kind.transmits();
                bad += usize::from(!ok);
                pairs += 1;
            }
        }
    }
    Ok(check(
        "diagram loops and connectivity",
        bad == 0,
        format!("N<={nmax}, {pairs} pairs, {bad} disagreements"),
    ))
}

fn cyclic_closed_form(cfg: &VerifyConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc1c);
    let nmax_brute = kraus_max_n(cfg);
    let (mut worst_fast, mut worst_brute) = (0.0f64, 0.0f64);
    for n in 2..=5 {
        for d in [2, 3] {
            let rho = random_density(&mut rng, d);
            let perms = Permutation::cyclic_set(n);
            let control = fourier_control(n);
            let fast = switch_output_fast(d, &perms, &control, &rho)?;
            let (nf, df) = (n as f64, d as f64);
            for p in 0..n {
                for q in 0..n {
                    let expected = if p == q {
                        identity(d).unscale(nf * df)
                    } else {
                        rho.matrix().unscale(nf * df * df)
                    };
                    worst_fast = worst_fast.max(max_abs_diff(fast.block(p, q), &expected));
                }
            }
            if n <= nmax_brute {
                let spec = SwitchSpec::cdpc(d, perms, control)?;
                let brute = switch_output_with(&spec, &rho, cfg.exec)?;
                worst_brute = worst_brute.max(brute.max_deviation(&fast));
            }
        }
    }
    Ok(check(
        "cyclic protocol closed form",
        worst_fast <= cfg.tolerance && worst_brute <= cfg.tolerance,
        format!("N in 2..=5, d in {{2,3}}, formula error {worst_fast:.3e}, brute-force error (N<={nmax_brute}) {worst_brute:.3e}"),
    ))
}

fn cyclic_maximizers(cfg: &VerifyConfig) -> Result<Check> {
    let cases: &[(usize, usize)] = if cfg.quick {
        &[(2, 2), (3, 2), (3, 3)]
    } else {
        &[(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (4, 4)]
    };
    let mut problems = Vec::new();
    let mut maximizers = 0;
    for &(n, m) in cases {
        for d in [2, 3] {
            let report = search_best_with(n, m, d, cfg.exec)?;
            let target = (m as f64 - 1.0) / (d * d) as f64;
            for mx in &report.maximizers {
                if !pairwise_mutually_cyclic(&mx.perms)?
                    || (mx.objective - target).abs() > cfg.tolerance
                {
                    problems.push(format!("N={n} M={m} d={d}"));
                    break;
                }
            }
            maximizers += report.maximizers.len();
        }
    }
    let detail = if problems.is_empty() {
        format!(
            "{} (N,M) cases, d in {{2,3}}, {maximizers} maximizers, all pairwise mutually cyclic",
            cases.len()
        )
    } else {
        format!("failing cases: {}", problems.join(", "))
    };
    Ok(check(
        "maximizers are mutually cyclic",
        problems.is_empty(),
        detail,
    ))
}

fn dilation_consistency(cfg: &VerifyConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xd11a);
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let cdpc = make_cdpc(d)?;
        let rho = random_density(&mut rng, d);
        let dilated = dilated_interference_term(&cdpc, &cdpc, rho.matrix())?;
        worst = worst.max(max_abs_diff(
            &dilated,
            &rho.matrix().unscale((d * d) as f64),
        ));
    }
    for _ in 0..20 {
        let d = rng.random_range(2..=3);
        let kf = rng.random_range(1..=4);
        let f = random_channel(&mut rng, d, kf);
        let kg = rng.random_range(1..=4);
        let g = random_channel(&mut rng, d, kg);
        let rho = random_density(&mut rng, d);
        let dilated = dilated_interference_term(&f, &g, rho.matrix())?;
        let direct = interference_term(
            &[f, g],
            &Permutation::identity(2),
            &Permutation::rotation(2, 1),
            rho.matrix(),
        )?;
        worst = worst.max(max_abs_diff(&dilated, &direct));
    }
    Ok(check(
        "dilation matches Kraus sum",
        worst <= cfg.tolerance,
        format!("CDPC d in {{2,3}} and 20 random pairs, max error {worst:.3e}"),
    ))
}

fn capacity_activation(cfg: &VerifyConfig) -> Result<Check> {
    let d = 2;
    let ensemble = Ensemble::uniform(vec![
        DensityMatrix::basis(d, 0)?,
        DensityMatrix::basis(d, 1)?,
    ])?;
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let perms = Permutation::cyclic_set(n);
        let control = fourier_control(n);
        let kept = holevo_of_protocol(&perms, d, &ensemble, &control)?;
        let discarded = holevo_of_protocol_discarding_control(&perms, d, &ensemble, &control)?;
        passed &= kept > cfg.tolerance && discarded <= cfg.tolerance;
        parts.push(format!("N={n}: kept {kept:.6}, discarded {discarded:.3e}"));
    }
    Ok(check("capacity activation", passed, parts.join("; ")))
}
