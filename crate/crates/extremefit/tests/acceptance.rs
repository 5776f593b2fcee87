//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Statistical criteria run at desk scale with fixed
//! seeds; the paper-scale presets stay available through the CLI for
//! manual runs.

use extremefit::bootstrap::Aggregate;
use extremefit::gev::{
    bm_log_likelihood, extreme_quantile, gev_cdf, gev_quantile, GevParams, INFEASIBLE,
};
use extremefit::harness::{
    reference_cdf, run_real_data, run_simulation, ExperimentConfig, Metric,
};
use extremefit::io::mad_report_csv;
use extremefit::optim::{fit_gev, OptimizerSettings};
use extremefit::rlos::{extract_top_r, rlos_log_likelihood, BlockTopR};
use extremefit::samplers::{sample, SourceDistribution};
use extremefit::seed::rng_for;
use extremefit::stats::median;
use rand::Rng;

fn criterion(id: u32, description: &str, pass: bool) {
    println!(
        "ACCEPTANCE {id:2}: {} - {description}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {id} failed: {description}");
}

#[test]
fn criterion_01_r1_reduction_exact() {
    let mut rng = rng_for(101, 0);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 500 {
        let mu = rng.random::<f64>() * 6.0 - 3.0;
        let sigma = rng.random::<f64>() * 3.0 + 0.2;
        let xi = rng.random::<f64>() * 1.4 - 0.7;
        let params = GevParams::new(mu, sigma, xi).unwrap();
        let m = 1 + (rng.random::<f64>() * 9.0) as usize;
        let maxima: Vec<f64> = (0..m)
            .map(|_| mu + sigma * (rng.random::<f64>() * 8.0 - 2.0))
            .collect();
        let top =
            BlockTopR::from_blocks(maxima.iter().map(|&v| vec![v]).collect(), 30, 1).unwrap();
        let rlos = rlos_log_likelihood(&params, &top);
        let bm = bm_log_likelihood(&params, &maxima).unwrap();
        if rlos == INFEASIBLE || bm == INFEASIBLE {
            assert_eq!(rlos, bm);
        } else {
            worst = worst.max((rlos - bm).abs());
        }
        checked += 1;
    }
    criterion(
        1,
        &format!("r=1 reduction over 500 random pairs, worst |diff| = {worst:.2e} < 1e-12"),
        worst < 1e-12,
    );
}

#[test]
fn criterion_02_gumbel_continuity() {
    let fixture = [0.3, -1.2, 2.5, 0.9, -0.1, 1.7];
    let top = BlockTopR::from_blocks(
        vec![vec![2.5, 0.9], vec![1.7, -0.1], vec![0.3, -1.2]],
        4,
        2,
    )
    .unwrap();
    let zero = GevParams::new(0.1, 1.3, 0.0).unwrap();
    let mut worst: f64 = 0.0;
    for &xi in &[1e-8, -1e-8] {
        let near = GevParams::new(0.1, 1.3, xi).unwrap();
        worst = worst.max(
            (bm_log_likelihood(&near, &fixture).unwrap()
                - bm_log_likelihood(&zero, &fixture).unwrap())
            .abs(),
        );
        worst = worst
            .max((rlos_log_likelihood(&near, &top) - rlos_log_likelihood(&zero, &top)).abs());
        for &y in &fixture {
            worst = worst.max((gev_cdf(&near, y) - gev_cdf(&zero, y)).abs());
        }
        for &p in &[0.05, 0.25, 0.5, 0.75, 0.95] {
            worst = worst.max(
                (gev_quantile(&near, p).unwrap() - gev_quantile(&zero, p).unwrap()).abs(),
            );
        }
    }
    criterion(
        2,
        &format!("Gumbel-branch continuity at xi = +-1e-8, worst |diff| = {worst:.2e} < 1e-5"),
        worst < 1e-5,
    );
}

#[test]
fn criterion_03_quantile_machinery() {
    let mut worst_identity: f64 = 0.0;
    let mut worst_round_trip: f64 = 0.0;
    for &xi in &[-0.5, -0.2, 0.0, 0.2, 0.5] {
        for &(mu, sigma) in &[(0.0, 1.0), (2.0, 3.0), (-1.0, 0.4)] {
            let params = GevParams::new(mu, sigma, xi).unwrap();
            for &p in &[0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999] {
                let q = gev_quantile(&params, p).unwrap();
                worst_round_trip = worst_round_trip.max((gev_cdf(&params, q) - p).abs());
                for &m in &[1usize, 10, 100] {
                    let pm = p.powi(m as i32);
                    if pm > 0.0 {
                        let direct = extreme_quantile(&params, p, m).unwrap();
                        let via_power = gev_quantile(&params, pm).unwrap();
                        worst_identity = worst_identity
                            .max((direct - via_power).abs() / (1.0 + direct.abs()));
                    }
                }
            }
        }
    }
    criterion(
        3,
        &format!(
            "quantile identities: G=F^m rel diff {worst_identity:.2e} < 1e-9, \
             round trip {worst_round_trip:.2e} < 1e-9"
        ),
        worst_identity < 1e-9 && worst_round_trip < 1e-9,
    );
}

#[test]
fn criterion_04_likelihood_oracle() {
    // expected values computed by independent term-by-term summation
    // in 60-digit arithmetic
    #[allow(clippy::type_complexity, clippy::approx_constant, clippy::excessive_precision)]
    let cases: &[(f64, f64, f64, usize, &[&[f64]], f64)] = &[
        (1.044, 2.425, 0.586, 3, &[&[5.707, 4.396, 1.033][..], &[10.623, 9.127, -0.559][..], &[6.213, 6.132, -2.373][..], &[4.985, 2.634, -2.501][..]], -66.73005537711885974665),
        (0.134, 1.742, 0.0, 1, &[&[3.249][..], &[-0.248][..], &[5.0][..], &[4.478][..]], -10.63232486632225348185),
        (-1.717, 1.223, -0.333, 1, &[&[-2.622][..]], -1.697750902066786206391),
        (-0.607, 2.019, 0.0, 2, &[&[5.003, 2.422][..], &[5.755, 3.329][..]], -12.55522808898857498329),
        (-0.486, 2.205, 0.0, 2, &[&[1.096, -2.065][..], &[4.079, -3.724][..], &[6.125, 0.703][..]], -15.85722086973936498894),
        (-0.287, 1.119, 0.241, 2, &[&[3.358, 2.896][..]], -6.01156719603525344406),
        (-1.267, 1.518, -0.242, 2, &[&[1.314, -1.647][..], &[3.997, 3.047][..], &[3.303, 0.167][..], &[-0.412, -2.883][..]], -23.02751211627444927444),
        (0.656, 1.178, -0.318, 1, &[&[0.149][..], &[1.954][..], &[0.133][..]], -4.127536499287217851163),
        (-0.715, 2.829, -0.299, 1, &[&[-4.289][..], &[3.997][..]], -5.964518528781216723174),
        (0.071, 2.708, -0.167, 3, &[&[4.625, 3.999, 3.629][..], &[10.637, 5.916, 5.696][..], &[9.92, 9.831, 3.47][..]], -33.82364110904841441204),
        (-1.382, 1.795, 0.0, 3, &[&[1.952, 0.659, -1.703][..], &[1.386, 0.553, -1.217][..], &[0.867, 0.784, -0.716][..], &[4.831, 1.036, -2.645][..]], -24.30208760447458232372),
        (0.45, 2.266, 0.0, 2, &[&[5.389, -2.019][..]], -5.699099320185629374014),
        (-0.747, 2.744, 0.0, 2, &[&[1.452, -1.267][..], &[4.053, -4.309][..]], -9.971713670687389922268),
        (1.37, 2.989, 0.0, 1, &[&[11.938][..], &[-2.503][..], &[12.811][..]], -13.05703694666000681712),
        (-1.662, 2.337, -0.287, 2, &[&[6.026, -4.938][..], &[2.822, 2.18][..], &[6.425, -0.21][..], &[0.076, -3.9][..]], -35.74085123844619436543),
        (-0.695, 1.594, 0.0, 1, &[&[-1.852][..]], -1.806880169464664253804),
        (-1.738, 1.937, 0.518, 1, &[&[2.102][..]], -2.987229326427227415114),
        (-0.19, 2.143, 0.0, 1, &[&[4.265][..], &[7.796][..]], -7.4789746594812766565),
        (-1.245, 0.787, 0.0, 3, &[&[-0.953, -1.1, -1.534][..], &[1.775, 1.25, 0.751][..], &[1.168, -0.076, -0.854][..]], -14.75577222812485801181),
        (0.329, 0.65, 0.0, 1, &[&[2.489][..], &[-0.624][..], &[0.063][..]], -6.029583904141192346141),
    ];
    let mut worst: f64 = 0.0;
    for &(mu, sigma, xi, r, blocks, expected) in cases {
        let params = GevParams::new(mu, sigma, xi).unwrap();
        let top = BlockTopR::from_blocks(
            blocks.iter().map(|b| b.to_vec()).collect(),
            r.max(4),
            r,
        )
        .unwrap();
        worst = worst.max((rlos_log_likelihood(&params, &top) - expected).abs());
    }
    criterion(
        4,
        &format!(
            "likelihood vs arbitrary-precision oracle on 20 instances, worst |diff| = \
             {worst:.2e} < 1e-12"
        ),
        worst < 1e-12,
    );
}

#[test]
fn criterion_05_sampler_correctness() {
    let n = 100_000usize;
    let threshold = 1.95 / (n as f64).sqrt();
    let mut worst_ks: f64 = 0.0;
    for (i, dist) in [
        SourceDistribution::pareto(0.5).unwrap(),
        SourceDistribution::student_t(5.0).unwrap(),
        SourceDistribution::inverse_gamma(5.0, 1.0).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        let mut xs = sample(dist, n, &mut rng_for(500 + i as u64, 0));
        xs.sort_unstable_by(f64::total_cmp);
        let mut ks: f64 = 0.0;
        for (j, &x) in xs.iter().enumerate() {
            let f = reference_cdf(dist, x);
            let lo = j as f64 / n as f64;
            let hi = (j + 1) as f64 / n as f64;
            ks = ks.max((f - lo).abs()).max((f - hi).abs());
        }
        worst_ks = worst_ks.max(ks);
    }

    let kappa = 0.5;
    let dist = SourceDistribution::pareto(kappa).unwrap();
    let mut xs = sample(&dist, 1_000_000, &mut rng_for(510, 0));
    xs.sort_unstable_by(f64::total_cmp);
    let mut worst_quantile: f64 = 0.0;
    for &q in &[0.5, 0.9, 0.99] {
        let empirical = xs[(q * xs.len() as f64) as usize];
        let exact = (1.0 - q).powf(-kappa);
        worst_quantile = worst_quantile.max((empirical - exact).abs() / exact);
    }
    criterion(
        5,
        &format!(
            "sampler goodness of fit: worst KS = {worst_ks:.4} < {threshold:.4}, \
             Pareto quantile rel err {worst_quantile:.4} < 0.01"
        ),
        worst_ks < threshold && worst_quantile < 0.01,
    );
}

#[test]
fn criterion_06_estimator_consistency() {
    let dist = SourceDistribution::pareto(0.5).unwrap();
    let settings = OptimizerSettings::default();
    let mut estimates = Vec::new();
    for rep in 0..50u64 {
        let data = sample(&dist, 365 * 20, &mut rng_for(600 + rep, 0));
        let top = extract_top_r(&data, 365, 1).unwrap();
        let fit = fit_gev(&top, None, &settings).unwrap();
        assert!(fit.converged, "plain fit failed on replicate {rep}");
        estimates.push(fit.params.xi());
    }
    let med = median(&estimates);
    criterion(
        6,
        &format!("plain-fit consistency: median xi over 50 replicates = {med:.4}, within 0.1 of 0.5"),
        (med - 0.5).abs() < 0.1,
    );
}

fn desk_config(kappa: f64, r_values: Vec<usize>, use_permutations: bool) -> ExperimentConfig {
    ExperimentConfig {
        dist: Some(SourceDistribution::pareto(kappa).unwrap()),
        n: 365 * 20,
        block_size: 365,
        r_values,
        permutations: 10,
        repetitions: 50,
        p_values: vec![1.0 - 1.0 / (365.0 * 20.0)],
        use_permutations,
        aggregate: Aggregate::Median,
        master_seed: 7,
        optimizer: OptimizerSettings::default(),
        identity_permutation: false,
    }
}

#[test]
fn criterion_07_accuracy_improves_with_r() {
    let config = desk_config(0.2, (1..=10).collect(), true);
    let report = run_simulation(&config).unwrap();
    let mad_at = |r: usize| report.cell(r, Metric::Xi, None).unwrap().mad;
    let base = mad_at(1);
    let mut all_within_slack = true;
    for r in 2..=10 {
        if mad_at(r) > 1.2 * base {
            all_within_slack = false;
        }
    }
    let last = mad_at(10);
    criterion(
        7,
        &format!(
            "MAD(xi) trend in r: MAD(1) = {base:.4}, MAD(10) = {last:.4}; every r in 2..=10 \
             within 1.2x of r=1 and MAD(10) < MAD(1)"
        ),
        all_within_slack && last < base,
    );
}

#[test]
fn criterion_08_permutation_benefit() {
    let pb = run_simulation(&desk_config(0.2, vec![1], true)).unwrap();
    let plain = run_simulation(&desk_config(0.2, vec![1], false)).unwrap();
    let mad_pb = pb.cell(1, Metric::Xi, None).unwrap().mad;
    let mad_plain = plain.cell(1, Metric::Xi, None).unwrap().mad;
    criterion(
        8,
        &format!("permutation benefit at r=1: MAD with PB = {mad_pb:.4} <= 1.1 x {mad_plain:.4}"),
        mad_pb <= 1.1 * mad_plain,
    );
}

/// Synthetic stand-in for the Fort Collins daily maximum temperature
/// series: integer-valued Fahrenheit with a yearly cycle plus
/// Gumbel-like noise, 100 years of 365-day years.
fn synthetic_daily_tmax() -> Vec<f64> {
    let mut rng = rng_for(900, 0);
    let gumbel = GevParams::new(0.0, 1.0, 0.0).unwrap();
    (0..36_500)
        .map(|i| {
            let day = (i % 365) as f64;
            let seasonal = 62.0 + 28.0 * (2.0 * std::f64::consts::PI * (day - 200.0) / 365.0).cos();
            let u: f64 = rng.random::<f64>().max(1e-12);
            let noise = 6.0 * gev_quantile(&gumbel, u).unwrap();
            (seasonal + noise).round()
        })
        .collect()
}

#[test]
fn criterion_09_real_data_variability_shrinks_with_r() {
    let series = match std::env::var("EXTREMEFIT_REAL_SERIES") {
        Ok(path) => {
            let loaded = extremefit::io::load_series(
                std::path::Path::new(&path),
                &"tmax".parse().unwrap(),
                true,
            )
            .expect("EXTREMEFIT_REAL_SERIES must point at a CSV with a tmax column");
            loaded.values
        }
        Err(_) => synthetic_daily_tmax(),
    };
    let config = ExperimentConfig {
        dist: None,
        n: series.len(),
        block_size: 365,
        r_values: vec![1, 5],
        permutations: 10,
        repetitions: 10,
        p_values: vec![1.0 - 1.0 / 36_500.0],
        use_permutations: true,
        aggregate: Aggregate::Median,
        master_seed: 90,
        optimizer: OptimizerSettings::default(),
        identity_permutation: false,
    };
    let summary = run_real_data(&config, &series).unwrap();
    let iqr = |r: usize| {
        let cell = summary.cell(r, Metric::Xi, None).unwrap();
        cell.q3 - cell.q1
    };
    let (iqr1, iqr5) = (iqr(1), iqr(5));
    criterion(
        9,
        &format!("grouped-permutation IQR of xi: r=1 -> {iqr1:.5}, r=5 -> {iqr5:.5}, decreasing"),
        iqr5 < iqr1,
    );
}

#[test]
fn criterion_10_seed_determinism() {
    let config = desk_config(0.5, vec![1, 2], true);
    let a = mad_report_csv(&run_simulation(&config).unwrap());
    let b = mad_report_csv(&run_simulation(&config).unwrap());
    criterion(
        10,
        "identical master seed reproduces byte-identical CSV output",
        a == b,
    );
}
