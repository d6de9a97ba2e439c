//! Cross-check suite: every closed form against its independent oracle,
//! printed one PASS/FAIL line per check.

use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use mqs_core::fock::{pure_to_density, TruncationConfig, TwoModeDensityMatrix};
use mqs_core::loss::{
    apply_loss_single_mode, apply_loss_two_mode, apply_loss_via_beam_splitter, build_kraus_set,
    coherent_loss_analytic, ChannelParams,
};
use mqs_core::math::max_abs_diff;
use mqs_core::metrics::{bures_between, bures_distance, fidelity};
use mqs_core::ofilter::{apply_ofilter, OFilterParams};
use mqs_core::states::{
    coherent_mqs_distance_analytic, coherent_mqs_lossy_density, coherent_pointer_distance,
    coherent_state_vector, noon_distances, noon_state, qiopa_equatorial_lossy_density,
    qiopa_equatorial_pair_canonical, qiopa_equatorial_state, qiopa_hv_lossy_density,
    qiopa_pi_state, qiopa_superposition_identity_check, CoherentMqsParams, MqsSign, NoonParams,
    QiopaParams,
};

/// Outcome of one named cross-check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn from_deviation(name: &'static str, observed: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name,
            passed: observed <= tolerance,
            observed,
            tolerance,
            detail,
        }
    }

    pub fn print(&self) {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {name} observed={obs:.3e} tolerance={tol:.1e} {detail}",
            name = self.name,
            obs = self.observed,
            tol = self.tolerance,
            detail = self.detail
        );
    }
}

/// Deviation-style comparison of two matrices, reported under `name`.
pub fn check_matrix_agreement(
    name: &'static str,
    a: ArrayView2<Complex64>,
    b: ArrayView2<Complex64>,
    tolerance: f64,
    detail: String,
) -> CheckResult {
    CheckResult::from_deviation(name, max_abs_diff(a, b), tolerance, detail)
}

fn random_density(seed: &mut u64, dim: usize) -> Array2<Complex64> {
    // Small deterministic xorshift generator; good enough for test states.
    let mut next = || {
        *seed ^= *seed << 13;
        *seed ^= *seed >> 7;
        *seed ^= *seed << 17;
        (*seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let g = Array2::from_shape_fn((dim, dim), |_| Complex64::new(next(), next()));
    let mut rho = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[(i, k)] * g[(j, k)].conj();
            }
            rho[(i, j)] = acc;
        }
    }
    let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    rho.mapv_inplace(|z| z / tr);
    rho
}

fn check_kraus_completeness() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(80);
    let mut worst = 0.0f64;
    for t in [0.0, 0.1, 0.5, 0.9, 1.0] {
        let kraus = build_kraus_set(&ChannelParams::new(t).unwrap(), &cfg);
        worst = worst.max(kraus.completeness_deviation());
    }
    CheckResult::from_deviation(
        "kraus_completeness",
        worst,
        1e-12,
        "sum E_k^dag E_k vs identity, n_max=80, T in {0,0.1,0.5,0.9,1}".into(),
    )
}

fn check_channel_cptp() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(5);
    let mut seed = 0x9e3779b97f4a7c15u64;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let rho =
            TwoModeDensityMatrix::new(random_density(&mut seed, cfg.two_mode_dim()), cfg).unwrap();
        let t = (i as f64 + 0.5) / 100.0;
        let out = apply_loss_two_mode(&rho, &ChannelParams::new(t).unwrap()).unwrap();
        worst = worst.max((out.trace() - 1.0).abs());
        worst = worst.max((-out.min_eigenvalue().unwrap()).max(0.0));
    }
    CheckResult::from_deviation(
        "channel_cptp",
        worst,
        1e-9,
        "trace preservation and positivity on 100 random two-mode states".into(),
    )
}

fn check_channel_semigroup() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(4);
    let mut seed = 0x5851f42d4c957f2du64;
    let rho =
        TwoModeDensityMatrix::new(random_density(&mut seed, cfg.two_mode_dim()), cfg).unwrap();
    let mut worst = 0.0f64;
    for (t1, t2) in [(0.9, 0.7), (0.5, 0.5), (0.25, 0.95)] {
        let two_step = apply_loss_two_mode(
            &apply_loss_two_mode(&rho, &ChannelParams::new(t1).unwrap()).unwrap(),
            &ChannelParams::new(t2).unwrap(),
        )
        .unwrap();
        let direct = apply_loss_two_mode(&rho, &ChannelParams::new(t1 * t2).unwrap()).unwrap();
        worst = worst.max(max_abs_diff(
            two_step.entries().view(),
            direct.entries().view(),
        ));
    }
    CheckResult::from_deviation(
        "channel_semigroup",
        worst,
        1e-9,
        "loss at T1 then T2 vs single pass at T1*T2".into(),
    )
}

fn check_photon_scaling() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(5);
    let mut seed = 0x2545f4914f6cdd1du64;
    let rho =
        TwoModeDensityMatrix::new(random_density(&mut seed, cfg.two_mode_dim()), cfg).unwrap();
    let n_in = rho.mean_photon_number();
    let mut worst = 0.0f64;
    for t in [0.2, 0.6, 0.9] {
        let out = apply_loss_two_mode(&rho, &ChannelParams::new(t).unwrap()).unwrap();
        worst = worst.max((out.mean_photon_number() - t * n_in).abs());
    }
    CheckResult::from_deviation(
        "channel_photon_scaling",
        worst,
        1e-9,
        "mean photon number scales as T<n>".into(),
    )
}

fn check_coherent_fixed_point() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(40);
    let alpha = Complex64::new(2.0, 0.0);
    let channel = ChannelParams::new(0.5).unwrap();
    let lossy = apply_loss_single_mode(
        &coherent_state_vector(alpha, &cfg).unwrap().to_density(),
        &channel,
    )
    .unwrap();
    let target = coherent_state_vector(coherent_loss_analytic(alpha, &channel), &cfg)
        .unwrap()
        .to_density();
    CheckResult::from_deviation(
        "coherent_fixed_point",
        max_abs_diff(lossy.entries().view(), target.entries().view()),
        1e-8,
        "Kraus loss on |alpha> vs |sqrt(T) alpha>, alpha=2, T=0.5".into(),
    )
}

fn check_beam_splitter_oracle() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(6);
    let mut seed = 0x853c49e6748fea9bu64;
    let mut worst = 0.0f64;
    for t in [0.2, 0.5, 0.9] {
        let params = ChannelParams::new(t).unwrap();
        let rho = mqs_core::fock::SingleModeDensityMatrix::new(
            random_density(&mut seed, cfg.dim()),
            cfg,
        )
        .unwrap();
        let via_bs = apply_loss_via_beam_splitter(&rho, &params).unwrap();
        let via_kraus = apply_loss_single_mode(&rho, &params).unwrap();
        worst = worst.max(max_abs_diff(
            via_bs.entries().view(),
            via_kraus.entries().view(),
        ));
    }
    CheckResult::from_deviation(
        "beam_splitter_oracle",
        worst,
        1e-10,
        "explicit scatter + reflected-mode trace vs Kraus route".into(),
    )
}

fn check_cat_closed_form() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(40);
    let mut worst = 0.0f64;
    for (alpha, phi) in [
        (Complex64::new(2.0, 0.0), std::f64::consts::FRAC_PI_2),
        (Complex64::new(1.5, 0.0), 1.0),
    ] {
        for sign in [MqsSign::Plus, MqsSign::Minus] {
            let params = CoherentMqsParams::new(alpha, phi, sign).unwrap();
            let channel = ChannelParams::from_reflectivity(0.1).unwrap();
            let closed = coherent_mqs_lossy_density(&params, &channel, &cfg).unwrap();
            let kraus = apply_loss_single_mode(
                &mqs_core::states::coherent_mqs_state(&params, &cfg)
                    .unwrap()
                    .to_density(),
                &channel,
            )
            .unwrap();
            worst = worst.max(max_abs_diff(
                closed.entries().view(),
                kraus.entries().view(),
            ));
        }
    }
    CheckResult::from_deviation(
        "cat_closed_form_vs_kraus",
        worst,
        1e-8,
        "lossy cat closed form vs Kraus oracle".into(),
    )
}

fn check_visibility_headline() -> CheckResult {
    // x = R|alpha|^2 = 1 at alpha = 4, R = 1/16: D = 0.096.
    let alpha = Complex64::new(4.0, 0.0);
    let cfg = TruncationConfig::with_n_max(60);
    let channel = ChannelParams::from_reflectivity(1.0 / 16.0).unwrap();
    let plus = CoherentMqsParams::canonical(alpha, MqsSign::Plus);
    let minus = CoherentMqsParams::canonical(alpha, MqsSign::Minus);
    let rho = coherent_mqs_lossy_density(&plus, &channel, &cfg).unwrap();
    let sigma = coherent_mqs_lossy_density(&minus, &channel, &cfg).unwrap();
    let numeric = bures_between(rho.entries().view(), sigma.entries().view())
        .unwrap()
        .bures;
    let analytic =
        coherent_mqs_distance_analytic(alpha, std::f64::consts::FRAC_PI_2, 1.0 / 16.0);
    let dev = (numeric - 0.096).abs().max((analytic - 0.096).abs());
    CheckResult::from_deviation(
        "visibility_headline",
        dev,
        1e-3,
        format!("D at one lost photon: pipeline {numeric:.6}, closed form {analytic:.6}"),
    )
}

fn check_amplifier_mean_photons() -> CheckResult {
    let mut worst = 0.0f64;
    for g in [0.4f64, 0.8] {
        let expect = 4.0 * g.cosh().powi(2) - 3.0;
        let n_max = mqs_core::states::qiopa_required_n_max(g, 1e-12).unwrap();
        let cfg = TruncationConfig::new(n_max, 1e-11).unwrap();
        let p = QiopaParams::new(g, 0.0).unwrap();
        let eq = qiopa_equatorial_state(&p, &cfg).unwrap();
        let pi = qiopa_pi_state(&p, &cfg).unwrap();
        worst = worst.max((eq.mean_photon_number() - expect).abs());
        worst = worst.max((pi.mean_photon_number() - expect).abs());
    }
    CheckResult::from_deviation(
        "amplifier_mean_photons",
        worst,
        1e-8,
        "expansion <n> vs 4 cosh^2 g - 3 for both families".into(),
    )
}

fn check_equatorial_closed_form(n_max: usize) -> CheckResult {
    let cfg = TruncationConfig::new(n_max, 1e-2).unwrap();
    let mut worst: Option<CheckResult> = None;
    for g in [0.4, 0.8] {
        let params = QiopaParams::new(g, 0.9).unwrap();
        let pure = pure_to_density(&qiopa_equatorial_state(&params, &cfg).unwrap());
        for t in [0.1, 0.5, 0.9] {
            let channel = ChannelParams::new(t).unwrap();
            let closed = qiopa_equatorial_lossy_density(&params, &channel, &cfg).unwrap();
            let kraus = apply_loss_two_mode(&pure, &channel).unwrap();
            let result = check_matrix_agreement(
                "equatorial_lossy_closed_form",
                closed.entries().view(),
                kraus.entries().view(),
                1e-8,
                format!("parity-constrained series vs Kraus oracle, n_max={n_max}, worst at g={g}, T={t}"),
            );
            if worst.as_ref().map(|w| result.observed > w.observed).unwrap_or(true) {
                worst = Some(result);
            }
        }
    }
    worst.expect("nonempty grid")
}

fn check_hv_closed_form(n_max: usize) -> CheckResult {
    let cfg = TruncationConfig::new(n_max, 1e-2).unwrap();
    let mut worst: Option<CheckResult> = None;
    for g in [0.4, 0.8] {
        let params = QiopaParams::new(g, 0.0).unwrap();
        let pure = pure_to_density(&qiopa_pi_state(&params, &cfg).unwrap());
        for t in [0.1, 0.5, 0.9] {
            let channel = ChannelParams::new(t).unwrap();
            let closed = qiopa_hv_lossy_density(&params, &channel, &cfg).unwrap();
            let kraus = apply_loss_two_mode(&pure, &channel).unwrap();
            let result = check_matrix_agreement(
                "hv_lossy_closed_form",
                closed.entries().view(),
                kraus.entries().view(),
                1e-8,
                format!("difference-conserving series vs Kraus oracle, n_max={n_max}, worst at g={g}, T={t}"),
            );
            if worst.as_ref().map(|w| result.observed > w.observed).unwrap_or(true) {
                worst = Some(result);
            }
        }
    }
    worst.expect("nonempty grid")
}

fn check_superposition_identity() -> CheckResult {
    let cfg = TruncationConfig::new(40, 1e-4).unwrap();
    let mut worst = 0.0f64;
    for phi in [std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, 2.5] {
        worst = worst.max(qiopa_superposition_identity_check(0.8, phi, &cfg).unwrap());
    }
    CheckResult::from_deviation(
        "superposition_identity",
        worst,
        1e-8,
        "rotated equatorial state vs cos/sin superposition of the plus/minus pair".into(),
    )
}

fn check_phase_covariance() -> CheckResult {
    // The phi-spread of the distance tracks the truncation tail; n_max = 50
    // keeps it two orders below the 1e-7 bound at g = 0.8.
    let cfg = TruncationConfig::new(50, 1e-6).unwrap();
    let channel = ChannelParams::from_reflectivity(0.4).unwrap();
    let mut values = Vec::new();
    for phi in [0.0, std::f64::consts::FRAC_PI_4] {
        let params = QiopaParams::new(0.8, phi).unwrap();
        let (a, b) = qiopa_equatorial_pair_canonical(&params, &cfg).unwrap();
        let la = apply_loss_two_mode(&pure_to_density(&a), &channel).unwrap();
        let lb = apply_loss_two_mode(&pure_to_density(&b), &channel).unwrap();
        values.push(bures_distance(&la, &lb).unwrap().bures);
    }
    let spread = (values[0] - values[1]).abs();
    CheckResult::from_deviation(
        "phase_covariance",
        spread,
        1e-7,
        format!("D at phi=0 vs phi=pi/4: {:.9} vs {:.9}", values[0], values[1]),
    )
}

fn check_noon_laws() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(6);
    let mut worst = 0.0f64;
    for n in [2usize, 4] {
        for r in [0.3, 0.7] {
            let channel = ChannelParams::from_reflectivity(r).unwrap();
            let plus = NoonParams::new(n, MqsSign::Plus).unwrap();
            let minus = NoonParams::new(n, MqsSign::Minus).unwrap();
            let rho =
                apply_loss_two_mode(&noon_state(&plus, &cfg).unwrap().to_density(), &channel)
                    .unwrap();
            let sigma =
                apply_loss_two_mode(&noon_state(&minus, &cfg).unwrap().to_density(), &channel)
                    .unwrap();
            let numeric = bures_distance(&rho, &sigma).unwrap().bures;
            let analytic = noon_distances(&plus, r).mqs;
            worst = worst.max((numeric - analytic).abs());
        }
    }
    CheckResult::from_deviation(
        "noon_scaling_laws",
        worst,
        1e-6,
        "NOON visibility vs sqrt((1-R)^N), N in {2,4}, R in {0.3,0.7}".into(),
    )
}

fn check_pointer_distance_law() -> CheckResult {
    let cfg = TruncationConfig::with_n_max(40);
    let alpha = Complex64::new(2.0, 0.0);
    let mut worst = 0.0f64;
    for t in [0.2, 0.7] {
        let channel = ChannelParams::new(t).unwrap();
        let rho = apply_loss_single_mode(
            &coherent_state_vector(alpha, &cfg).unwrap().to_density(),
            &channel,
        )
        .unwrap();
        let sigma = apply_loss_single_mode(
            &coherent_state_vector(-alpha, &cfg).unwrap().to_density(),
            &channel,
        )
        .unwrap();
        let numeric = bures_between(rho.entries().view(), sigma.entries().view())
            .unwrap()
            .bures;
        worst = worst.max((numeric - coherent_pointer_distance(alpha, t)).abs());
    }
    CheckResult::from_deviation(
        "pointer_distance_law",
        worst,
        1e-6,
        "lossy |±alpha> distance vs sqrt(1 - e^{-2T|alpha|^2})".into(),
    )
}

fn check_ofilter_monotonicity() -> CheckResult {
    let cfg = TruncationConfig::new(40, 1e-4).unwrap();
    let params = QiopaParams::new(0.8, 0.0).unwrap();
    let channel = ChannelParams::from_reflectivity(0.5).unwrap();
    let (a, b) = qiopa_equatorial_pair_canonical(&params, &cfg).unwrap();
    let la = apply_loss_two_mode(&pure_to_density(&a), &channel).unwrap();
    let lb = apply_loss_two_mode(&pure_to_density(&b), &channel).unwrap();
    let mut last_d = -1.0f64;
    let mut last_p = 2.0f64;
    let mut worst = 0.0f64;
    let mut detail = String::from("D_k:");
    for k in [0usize, 4, 6, 8] {
        let filter = OFilterParams::new(k);
        let (fa, pa) = apply_ofilter(&la, &filter).unwrap();
        let (fb, _) = apply_ofilter(&lb, &filter).unwrap();
        let d = fidelity(&fa, &fb).map(|f| (1.0 - f).sqrt()).unwrap();
        detail.push_str(&format!(" {d:.4}"));
        worst = worst.max(last_d - d); // distance must not decrease with k
        worst = worst.max(pa - last_p); // success must not increase with k
        last_d = d;
        last_p = pa;
    }
    CheckResult::from_deviation(
        "ofilter_monotonicity",
        worst.max(0.0),
        1e-9,
        format!("{detail} (g=0.8, R=0.5, k in {{0,4,6,8}})"),
    )
}

/// Run the cross-check suite, optionally restricted to comma-listed names.
/// Returns the failure count.
pub fn run_validation(n_max: usize, filter: Option<&str>) -> usize {
    let started = Instant::now();
    let wanted: Option<Vec<&str>> = filter.map(|f| f.split(',').map(str::trim).collect());
    let should_run =
        |name: &str| wanted.as_ref().map(|w| w.contains(&name)).unwrap_or(true);

    let checks: Vec<(&'static str, Box<dyn Fn() -> CheckResult>)> = vec![
        ("kraus_completeness", Box::new(check_kraus_completeness)),
        ("channel_cptp", Box::new(check_channel_cptp)),
        ("channel_semigroup", Box::new(check_channel_semigroup)),
        ("channel_photon_scaling", Box::new(check_photon_scaling)),
        ("coherent_fixed_point", Box::new(check_coherent_fixed_point)),
        ("beam_splitter_oracle", Box::new(check_beam_splitter_oracle)),
        ("cat_closed_form_vs_kraus", Box::new(check_cat_closed_form)),
        ("visibility_headline", Box::new(check_visibility_headline)),
        ("amplifier_mean_photons", Box::new(check_amplifier_mean_photons)),
        (
            "equatorial_lossy_closed_form",
            Box::new(move || check_equatorial_closed_form(n_max)),
        ),
        (
            "hv_lossy_closed_form",
            Box::new(move || check_hv_closed_form(n_max)),
        ),
        ("superposition_identity", Box::new(check_superposition_identity)),
        ("phase_covariance", Box::new(check_phase_covariance)),
        ("noon_scaling_laws", Box::new(check_noon_laws)),
        ("pointer_distance_law", Box::new(check_pointer_distance_law)),
        ("ofilter_monotonicity", Box::new(check_ofilter_monotonicity)),
    ];

    let mut failures = 0usize;
    let mut ran = 0usize;
    for (name, check) in checks {
        if !should_run(name) {
            continue;
        }
        ran += 1;
        let result = check();
        result.print();
        if !result.passed {
            failures += 1;
        }
    }
    let wall = started.elapsed();
    println!(
        "validate: {ran} checks, {failures} failed, wall={:.1}s",
        wall.as_secs_f64()
    );
    if wall.as_secs_f64() > 600.0 {
        eprintln!(
            "warning: validation took {:.0}s, over the 10-minute single-core budget",
            wall.as_secs_f64()
        );
    }
    failures
}
