//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantities. Tolerances are pinned in the asserts.
//!
//! Two sub-checks encode properties the closed-form objects do not actually
//! possess, and fail honestly rather than being weakened:
//!
//! * criterion 1, the density cap `psi(z) <= 2/(z log delta)`: the exhibited
//!   bump concentrates about twice the allowed mass at its peak for every
//!   admissible (delta, kappa) — the measured minimum excess factor is ~1.99
//!   at (delta ~ 5, kappa -> 1) and grows elsewhere;
//! * criterion 2, the halved-constant negative control: the kernel-bound
//!   constant C0 carries at least ~4x slack for every admissible coefficient
//!   pair (measured sup ratios 0.20-0.27), so halving it cannot produce a
//!   violation; a 0.1x deflation does, which is printed for reference.

use sde_stability::{
    certify_gaussian_bound, check_theta_bound, epsilon_p, key_estimate_check,
    majorant_constant, mollification_distance_bound, mollify, probe_holder,
    probe_one_sided_lipschitz, run_stability_experiment, series_majorant, simulate_pair,
    weighted_lp_pow, CoeffPair, Coefficient, ErrorKind, FrozenKernelParams, GridSpec, KdeSpec,
    NormQuadSpec, PairSide, QuadSpec, RateExperimentConfig, SdePair, SimulationPlan,
    StoppingRule, Verdict, WeightedMeasure, YwParams,
};
use std::time::Instant;

fn sign_unit_pair(n_hat: Option<u32>) -> SdePair {
    let b = sde_stability::coeffs::neg_sign_drift();
    let s = sde_stability::coeffs::constant_diffusion(1.0).unwrap();
    let (bh, sh) = match n_hat {
        Some(n) => (
            mollify(&b, n, &QuadSpec::default()).unwrap(),
            mollify(&s, n, &QuadSpec::default()).unwrap(),
        ),
        None => (b.clone(), s.clone()),
    };
    SdePair::new(
        0.0,
        1.0,
        CoeffPair {
            drift: b,
            diffusion: s,
        },
        CoeffPair {
            drift: bh,
            diffusion: sh,
        },
    )
    .unwrap()
}

fn holder_pair() -> SdePair {
    let b = sde_stability::coeffs::neg_sign_drift();
    let s = sde_stability::coeffs::clipped_power_diffusion(0.8, 0.4, 0.75).unwrap();
    SdePair::new(
        0.0,
        1.0,
        CoeffPair {
            drift: b.clone(),
            diffusion: s.clone(),
        },
        CoeffPair {
            drift: b,
            diffusion: s,
        },
    )
    .unwrap()
}

#[test]
fn criterion_01_penalty_function_property_suite() {
    let started = Instant::now();
    let mut stream = sde_stability::rng::CounterStream::new(0xC1);
    let tol = 1e-9;
    let mut worst_phi_prime = 0.0f64;
    let mut worst_majorant_gap = f64::INFINITY;
    let mut worst_cap_excess = f64::NEG_INFINITY;
    let mut worst_cap_at = (0.0, 0.0);
    let mut worst_mass_err = 0.0f64;
    for _ in 0..20 {
        let delta = stream.range(1.5, 20.0);
        let kappa = stream.range(0.1, 0.95);
        let p = YwParams::new(delta, kappa).unwrap();
        let rep = p.property_report(10_000, tol);
        worst_phi_prime = worst_phi_prime.max(rep.max_abs_phi_prime);
        worst_majorant_gap = worst_majorant_gap.min(rep.min_majorant_gap);
        if rep.max_cap_excess > worst_cap_excess {
            worst_cap_excess = rep.max_cap_excess;
            worst_cap_at = (delta, kappa);
        }
        worst_mass_err = worst_mass_err.max(rep.mass_error);
        assert!(
            rep.sign_structure_ok && rep.odd_symmetry_ok,
            "criterion 1: derivative sign structure failed at ({delta}, {kappa})"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    let p3 = worst_phi_prime <= 1.0 + tol;
    let p4 = worst_majorant_gap >= -tol;
    let p5 = worst_cap_excess <= tol;
    let mass = worst_mass_err <= 1e-6;
    println!(
        "criterion 1 (3) |phi'| <= 1: {} (max {worst_phi_prime:.12})",
        if p3 { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 1 (4) |x| <= kappa + phi: {} (min gap {worst_majorant_gap:.3e})",
        if p4 { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 1 (5) psi cap 2/(z log delta): {} (max excess {worst_cap_excess:.4e} at (delta, kappa) = {worst_cap_at:?})",
        if p5 { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 1 mass |int psi - 1| <= 1e-6: {} (max {worst_mass_err:.3e})",
        if mass { "PASS" } else { "FAIL" }
    );
    println!("criterion 1 runtime: {elapsed:.2} s (< 10 s)");
    assert!(p3, "criterion 1: |phi'| exceeded 1 + 1e-9");
    assert!(p4, "criterion 1: majorant property |x| <= kappa + phi failed");
    assert!(mass, "criterion 1: psi mass deviates from 1");
    assert!(elapsed < 10.0, "criterion 1: runtime {elapsed:.2} s over budget");
    assert!(
        p5,
        "criterion 1: the density cap psi <= 2/(z log delta) fails for the \
         closed-form bump (excess {worst_cap_excess:.4e} at {worst_cap_at:?}); \
         the exhibited weight concentrates ~2x the allowed peak mass for every \
         admissible parameter pair, so this part of the criterion is \
         unattainable as stated"
    );
}

#[test]
fn criterion_02_kernel_bound_certification() {
    let started = Instant::now();
    let pairs: Vec<(&str, SdePair, PairSide)> = vec![
        ("sign drift / unit diffusion", sign_unit_pair(None), PairSide::Exact),
        ("mollified pair (n = 8)", sign_unit_pair(Some(8)), PairSide::Perturbed),
        ("Hölder diffusion pair", holder_pair(), PairSide::Exact),
    ];
    let mut max_ratio = 0.0f64;
    for (label, pair, side) in &pairs {
        let rep = check_theta_bound(pair, *side, 1.0, 100_000, 0xC2).unwrap();
        println!(
            "criterion 2 [{label}]: {} (max ratio {:.6}, C0 = {:.4})",
            if rep.pass { "PASS" } else { "FAIL" },
            rep.max_ratio,
            rep.c0
        );
        max_ratio = max_ratio.max(rep.max_ratio);
        assert!(
            rep.pass,
            "criterion 2: kernel bound violated for {label}: max ratio {}",
            rep.max_ratio
        );
    }
    // negative control: the check must flag a deflated constant
    let (label, pair, side) = &pairs[0];
    let halved = check_theta_bound(pair, *side, 0.5, 100_000, 0xC2).unwrap();
    let tenth = check_theta_bound(pair, *side, 0.1, 100_000, 0xC2).unwrap();
    println!(
        "criterion 2 negative control (C0 x 0.5) on {label}: {} ({} violations, max ratio {:.4}); \
         for reference C0 x 0.1 flags {} violations (max ratio {:.4})",
        if halved.violations > 0 { "PASS" } else { "FAIL" },
        halved.violations,
        halved.max_ratio,
        tenth.violations,
        tenth.max_ratio
    );
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion 2 runtime: {elapsed:.2} s (< 30 s)");
    assert!(elapsed < 30.0, "criterion 2: runtime over budget");
    assert!(
        halved.violations > 0,
        "criterion 2: halving C0 produced no violation — the explicit constant \
         carries ~4x derivation slack for every admissible pair (measured sup \
         ratio {:.3} with the honest constant, {:.3} halved), so this negative \
         control is unattainable as stated; a 0.1x deflation does flag ({} \
         violations)",
        max_ratio,
        halved.max_ratio,
        tenth.violations
    );
}

#[test]
fn criterion_03_proof_inequality_micro_suite() {
    let mut stream = sde_stability::rng::CounterStream::new(0xC3);
    let bound_1 = (2.0f64 / std::f64::consts::E).sqrt();
    let mut worst_1 = 0.0f64;
    let mut worst_2 = 0.0f64;
    for _ in 0..1_000_000 {
        // inequality (3.1): (|m|/sqrt(t a)) e^{-m^2/(4 a t)} <= sqrt(2/e)
        let t = stream.range(1e-6, 1.0);
        let a = stream.range(0.25, 4.0);
        let m = stream.range(-20.0, 20.0);
        let u = m.abs() / (t * a).sqrt();
        let lhs = u * (-0.25 * u * u).exp();
        worst_1 = worst_1.max(lhs - bound_1);

        // |x-z|^eta / t^{eta/2} * e^{-|x-z|^2/(16 lambda t)} <= (8 lambda eta / e)^{eta/2}
        let eta = stream.range(0.5, 1.0);
        let lambda = stream.range(1.0, 4.0);
        let d = stream.range(0.0, 30.0);
        let lhs2 = (d / t.sqrt()).powf(eta) * (-d * d / (16.0 * lambda * t)).exp();
        let rhs2 = (8.0 * lambda * eta / std::f64::consts::E).powf(eta / 2.0);
        worst_2 = worst_2.max(lhs2 - rhs2);
    }
    println!(
        "criterion 3 inequality (3.1): {} (max excess {worst_1:.3e})",
        if worst_1 <= 1e-12 { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 3 Hölder-factor bound: {} (max excess {worst_2:.3e})",
        if worst_2 <= 1e-12 { "PASS" } else { "FAIL" }
    );
    assert!(worst_1 <= 1e-12);
    assert!(worst_2 <= 1e-12);

    // majorant partial sums: stable to 1e-10 by m = 50 in the contractive
    // regime (the growth factor is t-dependent; t* below sets it to 1/2)
    let p = FrozenKernelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let c = majorant_constant(&p) * statrs::function::gamma::gamma(p.eta / 2.0);
    let t_star = (0.5 / c).powf(2.0 / (2.0 - p.eta));
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for m in 1..=50 {
        last = series_majorant(m, t_star, &p).unwrap();
        sum += last;
    }
    let stable = last <= 1e-10 * sum;
    println!(
        "criterion 3 majorant partial sums at t* = {t_star:.3e}: {} (term 50 / sum = {:.3e})",
        if stable { "PASS" } else { "FAIL" },
        last / sum
    );
    assert!(stable, "criterion 3: majorant series not stable by m = 50");
}

#[test]
fn criterion_04_weighted_norm_oracles() {
    for (lambda, t) in [(1.0, 1.0), (2.0, 0.5), (1.5625, 2.0)] {
        let m = WeightedMeasure::new(0.3, lambda, t).unwrap();
        let norm = sde_stability::weighted_lp_norm(|_| 1.0, 1.0, &m, &NormQuadSpec::default())
            .unwrap();
        let oracle = 4.0 * (std::f64::consts::PI * lambda * t).sqrt();
        let rel = (norm - oracle).abs() / oracle;
        println!(
            "criterion 4 constant norm (lambda={lambda}, T={t}): {} (rel err {rel:.2e})",
            if rel < 1e-6 { "PASS" } else { "FAIL" }
        );
        assert!(rel < 1e-6);
    }
    // indicator-difference epsilon_1 against the error-function closed form
    let (lambda, t, a) = (1.0, 1.0, 0.75);
    let m = WeightedMeasure::new(0.0, lambda, t).unwrap();
    let b = Coefficient::new(
        "window",
        sde_stability::coeffs::CoeffForm::PiecewiseConst {
            breaks: vec![-a, a],
            values: vec![0.0, 1.0, 0.0],
        },
    )
    .with_bound(1.0)
    .with_osl(1.0);
    let bh = sde_stability::coeffs::constant_drift(0.0);
    let s = sde_stability::coeffs::constant_diffusion(1.0).unwrap();
    let pair = SdePair::new(
        0.0,
        t,
        CoeffPair {
            drift: b,
            diffusion: s.clone(),
        },
        CoeffPair {
            drift: bh,
            diffusion: s,
        },
    )
    .unwrap();
    let eps = epsilon_p(&pair, 1.0, &m).unwrap();
    let scale = (16.0 * lambda * t).sqrt();
    let oracle = scale * std::f64::consts::PI.sqrt() * statrs::function::erf::erf(a / scale);
    let rel = (eps.epsilon - oracle).abs() / oracle;
    println!(
        "criterion 4 indicator epsilon_1: {} (value {:.9}, oracle {oracle:.9}, rel err {rel:.2e})",
        if rel < 1e-6 { "PASS" } else { "FAIL" },
        eps.epsilon
    );
    assert!(rel < 1e-6);
}

#[test]
fn criterion_05_mollifier_suite() {
    let quad = QuadSpec::with_rel_tol(1e-8);
    let b = sde_stability::coeffs::neg_sign_drift();
    let sigma = sde_stability::coeffs::clipped_power_diffusion(0.8, 0.4, 0.75).unwrap();
    let lambda = sigma.ellipticity_lambda.unwrap();
    let measure = WeightedMeasure::new(0.0, lambda, 1.0).unwrap();
    let grid = GridSpec {
        points: 10_000,
        ..GridSpec::standard(&measure)
    };
    let domain = (grid.center - grid.half_width, grid.center + grid.half_width);
    let k_sigma = sigma.bound_k.unwrap();
    let eta = sigma.holder_eta.unwrap();
    let mut worst_osl = f64::NEG_INFINITY;
    let mut worst_holder = 0.0f64;
    let mut worst_ell_low = f64::INFINITY;
    let mut worst_ell_high = 0.0f64;
    let mut worst_distance_margin = f64::NEG_INFINITY;
    for n in 1..=64u32 {
        let bn = mollify(&b, n, &quad).unwrap();
        let sn = mollify(&sigma, n, &quad).unwrap();
        // one-sided Lipschitz preservation (product form, slack 1e-9)
        let osl = probe_one_sided_lipschitz(&bn, domain, 100_000, 0x50 + n as u64).unwrap();
        worst_osl = worst_osl.max(osl.product_excess.unwrap());
        // Hölder-constant preservation
        let hp = probe_holder(&sn, eta, domain, 20_000, 0x51 + n as u64).unwrap();
        worst_holder = worst_holder.max(hp.k_hat);
        // ellipticity window on the standard grid
        for x in grid.nodes() {
            let a = sn.eval_raw(x).powi(2);
            worst_ell_low = worst_ell_low.min(a);
            worst_ell_high = worst_ell_high.max(a);
        }
        // measured weighted distance against the a-priori bound (p = 1)
        let breaks = sigma.nonsmooth_points();
        let spec = NormQuadSpec {
            breakpoints: breaks,
            ..NormQuadSpec::default()
        };
        let measured = weighted_lp_pow(
            |x| sigma.eval_raw(x) - sn.eval_raw(x),
            2.0,
            &measure,
            &spec,
        )
        .unwrap();
        let bound = mollification_distance_bound(&sigma, n, 1.0, &measure).unwrap();
        worst_distance_margin = worst_distance_margin.max(measured - bound);
    }
    let osl_ok = worst_osl <= 1e-9;
    let holder_ok = worst_holder <= k_sigma + 1e-6;
    let ell_ok = worst_ell_low >= 1.0 / lambda - 1e-9 && worst_ell_high <= lambda + 1e-9;
    let dist_ok = worst_distance_margin <= 0.0;
    println!(
        "criterion 5 one-sided Lipschitz preserved: {} (max product excess {worst_osl:.3e})",
        if osl_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 5 Hölder constant preserved: {} (max probed {worst_holder:.9} vs K = {k_sigma})",
        if holder_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 5 ellipticity window: {} (sigma_n^2 in [{worst_ell_low:.9}, {worst_ell_high:.9}], lambda = {lambda})",
        if ell_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "criterion 5 weighted distance <= bound: {} (max margin {worst_distance_margin:.3e})",
        if dist_ok { "PASS" } else { "FAIL" }
    );
    assert!(osl_ok && holder_ok && ell_ok && dist_ok);

    // epsilon ladder strictly decreasing for the sign drift
    let mut prev = f64::INFINITY;
    for n in [2u32, 4, 8, 16, 32] {
        let pair = sign_unit_pair(Some(n));
        let eps = epsilon_p(&pair, 1.0, &pair.measure()).unwrap().epsilon;
        assert!(eps < prev, "criterion 5: eps ladder not decreasing at n = {n}");
        prev = eps;
    }
    println!("criterion 5 epsilon ladder strictly decreasing: PASS");
}

#[test]
fn criterion_06_coupling_null_and_determinism() {
    for seed in [1u64, 0xFEED, 987654321] {
        let pair = sign_unit_pair(None);
        let mut plan = SimulationPlan::new(256, 2_000, seed).unwrap();
        plan.record.stopping = vec![StoppingRule::FirstExit { radius: 0.5 }];
        plan.record.bv = vec![sde_stability::BvFunction::IndicatorAbove { threshold: 0.0 }];
        let e = simulate_pair(&pair, &plan).unwrap();
        for r in &e.records {
            assert_eq!(r.sup_error, 0.0, "criterion 6: nonzero coupling error (seed {seed})");
            assert_eq!(r.terminal_error, 0.0);
            assert!(r.stopped_errors.iter().all(|v| *v == 0.0));
        }
    }
    println!("criterion 6 coupling null test: PASS (exact zeros, 3 seeds)");

    let pair = sign_unit_pair(Some(8));
    let mut aggregates: Option<(u64, u64, u64)> = None;
    for workers in [1usize, 4, 8] {
        let mut plan = SimulationPlan::new(1024, 4_000, 0xD0).unwrap();
        plan.workers = Some(workers);
        plan.record.bv = vec![sde_stability::BvFunction::IndicatorAbove { threshold: 0.0 }];
        let e = simulate_pair(&pair, &plan).unwrap();
        let triple = (
            e.sup_error().value.to_bits(),
            e.terminal_error().value.to_bits(),
            e.bv_error(0, 1.0).unwrap().value.to_bits(),
        );
        match aggregates {
            None => aggregates = Some(triple),
            Some(reference) => assert_eq!(
                reference, triple,
                "criterion 6: aggregates differ at workers = {workers}"
            ),
        }
    }
    println!("criterion 6 determinism across workers {{1, 4, 8}}: PASS (bit-identical)");
}

fn reference_rate_config(error_kind: ErrorKind) -> RateExperimentConfig {
    RateExperimentConfig {
        x0: 0.0,
        t_horizon: 1.0,
        drift: sde_stability::coeffs::neg_sign_drift(),
        diffusion: sde_stability::coeffs::constant_diffusion(1.0).unwrap(),
        n_ladder: vec![2, 4, 8, 16, 32],
        p: 1.0,
        plan: SimulationPlan::new(1 << 12, 10_000, 0x5DE5_7AB1).unwrap(),
        error_kind,
        slope_tolerance: 0.15,
        quad: QuadSpec::with_rel_tol(1e-10),
    }
}

#[test]
fn criterion_07_sup_rate_alpha_half() {
    let started = Instant::now();
    let fit = run_stability_experiment(&reference_rate_config(ErrorKind::Sup)).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let slope_ok = fit.slope >= 0.5 - 0.15;
    let r2_ok = fit.r_squared >= 0.9;
    println!(
        "criterion 7 sup-error rate: {} (slope {:.4} >= 0.35, r^2 {:.4} >= 0.9, verdict {:?}, {elapsed:.1} s)",
        if slope_ok && r2_ok { "PASS" } else { "FAIL" },
        fit.slope,
        fit.r_squared,
        fit.verdict
    );
    if let Some(d) = &fit.grid_doubling {
        println!(
            "criterion 7 grid-doubling diagnostic at n = {}: rel change {:.3e}",
            d.n, d.rel_change
        );
    }
    for p in &fit.points {
        println!(
            "criterion 7 point n = {:>2}: eps = {:.5}, error = {:.6} (se {:.2e})",
            p.n, p.epsilon, p.error, p.error_std_error
        );
    }
    assert!(slope_ok, "criterion 7: slope {} below 0.35", fit.slope);
    assert!(r2_ok, "criterion 7: r^2 {} below 0.9", fit.r_squared);
    assert_eq!(fit.verdict, Verdict::Consistent);
    // error estimates decrease along the ladder whenever eps halves
    let used: Vec<_> = fit.points.iter().filter(|p| p.used).collect();
    for w in used.windows(2) {
        if w[1].epsilon <= 0.5 * w[0].epsilon {
            assert!(
                w[1].error < w[0].error + 2.0 * (w[0].error_std_error + w[1].error_std_error),
                "criterion 7: error did not decrease with eps"
            );
        }
    }
}

#[test]
fn criterion_08_bv_rate_alpha_half() {
    let fit = run_stability_experiment(&reference_rate_config(ErrorKind::Bv {
        g: sde_stability::BvFunction::IndicatorAbove { threshold: 0.0 },
        r: 1.0,
    }))
    .unwrap();
    let slope_ok = fit.slope >= 0.25 - 0.15;
    println!(
        "criterion 8 bounded-variation rate: {} (slope {:.4} >= 0.10, r^2 {:.4}, verdict {:?})",
        if slope_ok { "PASS" } else { "FAIL" },
        fit.slope,
        fit.r_squared,
        fit.verdict
    );
    assert!(slope_ok, "criterion 8: slope {} below 0.10", fit.slope);
    assert_eq!(fit.verdict, Verdict::Consistent);
}

#[test]
fn criterion_09_gaussian_density_bound() {
    // pure-Gaussian control: b = 0, sigma = 1, t = 1; the Euler scheme is
    // exact in distribution, so the fitted constant must match the analytic
    // ratio maximum sqrt(8 lambda) at the center
    let s = sde_stability::coeffs::constant_diffusion(1.0).unwrap();
    let zero = sde_stability::coeffs::constant_drift(0.0);
    let control = SdePair::new(
        0.0,
        1.0,
        CoeffPair {
            drift: zero.clone(),
            diffusion: s.clone(),
        },
        CoeffPair {
            drift: zero,
            diffusion: s,
        },
    )
    .unwrap();
    let plan = SimulationPlan::new(16, 100_000, 0xC9).unwrap();
    let e = simulate_pair(&control, &plan).unwrap();
    let samples = e.terminal_values(PairSide::Exact);
    let fit = certify_gaussian_bound(&samples, 1.0, 0.0, 1.0, &KdeSpec::default()).unwrap();
    let truth = 8.0f64.sqrt();
    let tol = 3.0 * fit.se_at_argmax;
    let control_ok = (fit.c_hat - truth).abs() <= tol + 0.02;
    println!(
        "criterion 9 pure-Gaussian control: {} (C_hat {:.4} vs analytic {truth:.4}, 3 se = {tol:.4})",
        if control_ok { "PASS" } else { "FAIL" },
        fit.c_hat
    );
    assert!(control_ok);

    // sign-drift pair: finite and stable under sample doubling 1e5 -> 2e5
    let pair = sign_unit_pair(None);
    let plan = SimulationPlan::new(1024, 200_000, 0xC9A).unwrap();
    let e = simulate_pair(&pair, &plan).unwrap();
    let all = e.terminal_values(PairSide::Exact);
    let lambda = pair.effective_lambda();
    let fit_half =
        certify_gaussian_bound(&all[..100_000], 1.0, 0.0, lambda, &KdeSpec::default()).unwrap();
    let fit_full = certify_gaussian_bound(&all, 1.0, 0.0, lambda, &KdeSpec::default()).unwrap();
    let rel = (fit_full.c_hat - fit_half.c_hat).abs() / fit_half.c_hat;
    let stable = fit_full.c_hat.is_finite() && rel < 0.10;
    println!(
        "criterion 9 sign-drift stability: {} (C_hat {:.4} -> {:.4}, rel change {:.3})",
        if stable { "PASS" } else { "FAIL" },
        fit_half.c_hat,
        fit_full.c_hat,
        rel
    );
    assert!(stable);
}

#[test]
fn criterion_10_key_estimate_uniformity() {
    // drift branch at full resolution (fast piecewise path), diffusion branch
    // with the Hölder example at a reduced but representative scale
    let drift_cfg = RateExperimentConfig {
        plan: SimulationPlan::new(1024, 5_000, 0xA10).unwrap(),
        ..reference_rate_config(ErrorKind::Sup)
    };
    let rep = key_estimate_check(&drift_cfg, 10.0).unwrap();
    println!(
        "criterion 10 drift branch band: {} (max/min = {:.3})",
        if rep.drift_band <= 10.0 { "PASS" } else { "FAIL" },
        rep.drift_band
    );
    for e in &rep.entries {
        println!(
            "criterion 10 drift n = {:>2}: ratio {:.4} ({:.4e} / {:.4e})",
            e.n, e.drift_ratio, e.drift_numerator, e.drift_denominator
        );
    }
    assert!(rep.drift_band <= 10.0, "criterion 10: drift band {}", rep.drift_band);

    let diffusion_cfg = RateExperimentConfig {
        diffusion: sde_stability::coeffs::clipped_power_diffusion(0.8, 0.4, 0.75).unwrap(),
        plan: SimulationPlan::new(512, 1_500, 0xA11).unwrap(),
        quad: QuadSpec::with_rel_tol(1e-8),
        ..reference_rate_config(ErrorKind::Sup)
    };
    let rep = key_estimate_check(&diffusion_cfg, 10.0).unwrap();
    println!(
        "criterion 10 diffusion branch band: {} (max/min = {:.3})",
        if rep.diffusion_band <= 10.0 { "PASS" } else { "FAIL" },
        rep.diffusion_band
    );
    for e in &rep.entries {
        println!(
            "criterion 10 diffusion n = {:>2}: ratio {:.4} ({:.4e} / {:.4e})",
            e.n, e.diffusion_ratio, e.diffusion_numerator, e.diffusion_denominator
        );
    }
    assert!(
        rep.diffusion_band <= 10.0,
        "criterion 10: diffusion band {}",
        rep.diffusion_band
    );
}
