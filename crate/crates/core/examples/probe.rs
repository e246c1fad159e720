// Scratch exploration harness (not part of the deliverable surface).
use std::time::Instant;

use cascade_core::analysis::analyze_bundle;
use cascade_core::observables::Observable;
use cascade_core::sim::SimConfig;
use cascade_core::tail::{
    compare_fits, fit_family, sample, select_xmin, Family, TailData,
};
use cascade_core::trace::{TaskFamily, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    match which.as_str() {
        "mle" => probe_mle(),
        "vuong" => probe_vuong(),
        "sim" => probe_sim(),
        "conc" => probe_concentration(),
        _ => {
            probe_mle();
            probe_vuong();
            probe_sim();
        }
    }
}

fn probe_mle() {
    println!("=== MLE recovery ===");
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let t0 = Instant::now();
    let xs = sample::sample_power_law(2.5, 5, 50_000, &mut rng);
    let fit = fit_family(&xs, Family::PowerLaw, 5).unwrap();
    println!(
        "PL(2.5, xmin=5): alpha_hat={:.4} ks={:.4} [{:?}]",
        fit.alpha_hat().unwrap(),
        fit.ks,
        t0.elapsed()
    );

    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let xs = sample::sample_truncated_power_law(2.3, 50.0, 1, 50_000, &mut rng);
        let t0 = Instant::now();
        let fit = fit_family(&xs, Family::TruncatedPowerLaw, 1).unwrap();
        println!(
            "TPL(2.3, 50) seed {seed}: alpha={:.4} xc={:.2} ks={:.4} [{:?}]",
            fit.alpha_hat().unwrap(),
            fit.xc_hat().unwrap(),
            fit.ks,
            t0.elapsed()
        );
    }
}

fn probe_vuong() {
    println!("=== Vuong selection (TPL truth) ===");
    let mut favored = (0, 0);
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let xs = sample::sample_truncated_power_law(2.3, 50.0, 1, 50_000, &mut rng);
        let (x_min, _) = select_xmin(&xs, Family::PowerLaw).unwrap();
        let data = TailData::from_samples(&xs, x_min);
        let tpl = fit_family(&xs, Family::TruncatedPowerLaw, x_min).unwrap();
        let ln = fit_family(&xs, Family::LogNormal, x_min).unwrap();
        let pl = fit_family(&xs, Family::PowerLaw, x_min).unwrap();
        let vs_ln = compare_fits(&data, &tpl, &ln).unwrap();
        let vs_pl = compare_fits(&data, &tpl, &pl).unwrap();
        println!(
            "seed {seed}: xmin={x_min} n_tail={} | vsLN lr={:+.1} z={:+.2} p={:.4} | vsPL lr={:+.1} z={:+.2} p={:.4}",
            tpl.n_tail, vs_ln.lr, vs_ln.z, vs_ln.p_value, vs_pl.lr, vs_pl.z, vs_pl.p_value
        );
        if vs_ln.lr > 0.0 && vs_ln.p_value < 0.05 {
            favored.0 += 1;
        }
        if vs_pl.lr > 0.0 && vs_pl.p_value < 0.05 {
            favored.1 += 1;
        }
    }
    println!("favored: vsLN {}/10, vsPL {}/10", favored.0, favored.1);

    // Exponential truth: TPL must not be significantly favored.
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let xs = sample::sample_exponential(0.1, 1, 50_000, &mut rng);
        let data = TailData::from_samples(&xs, 1);
        let tpl = fit_family(&xs, Family::TruncatedPowerLaw, 1).unwrap();
        let ex = fit_family(&xs, Family::Exponential, 1).unwrap();
        let cmp = compare_fits(&data, &tpl, &ex).unwrap();
        println!(
            "exp truth seed {seed}: TPLvsEXP lr={:+.2} z={:+.2} p={:.4}",
            cmp.lr, cmp.z, cmp.p_value
        );
    }
}

fn probe_sim() {
    println!("=== simulator defaults ===");
    for n in [16u32, 64, 128] {
        let t0 = Instant::now();
        let mut tce: Vec<u64> = Vec::new();
        let mut events = 0usize;
        for seed in 0..5 {
            let config = SimConfig::defaults(n, Topology::SparseMesh, TaskFamily::Reasoning, seed);
            let bundle = cascade_core::sim::run_simulation(&config).unwrap();
            events += bundle.records.len();
            let analysis = analyze_bundle(&bundle, 10).unwrap();
            tce.extend(analysis.sizes_of(Observable::Tce));
        }
        let max = tce.iter().max().copied().unwrap_or(0);
        let mean = tce.iter().sum::<u64>() as f64 / tce.len() as f64;
        print!(
            "N={n}: events={events} cascades={} mean_tce={mean:.2} max_tce={max} [{:?}] ",
            tce.len(),
            t0.elapsed()
        );
        match select_xmin(&tce, Family::PowerLaw) {
            Ok((x_min, _)) => {
                let data = TailData::from_samples(&tce, x_min);
                let tpl = fit_family(&tce, Family::TruncatedPowerLaw, x_min).unwrap();
                let ln = fit_family(&tce, Family::LogNormal, x_min).unwrap();
                let pl = fit_family(&tce, Family::PowerLaw, x_min).unwrap();
                let vs_ln = compare_fits(&data, &tpl, &ln).unwrap();
                let vs_pl = compare_fits(&data, &tpl, &pl);
                println!(
                    "xmin={x_min} n_tail={} alpha={:.3} xc={:.1} | vsLN z={:+.2} p={:.3} | vsPL {:?}",
                    tpl.n_tail,
                    tpl.alpha_hat().unwrap(),
                    tpl.xc_hat().unwrap(),
                    vs_ln.z,
                    vs_ln.p_value,
                    vs_pl.map(|c| format!("z={:+.2} p={:.3}", c.z, c.p_value))
                );
            }
            Err(e) => println!("xmin scan failed: {e}"),
        }
    }
}

fn probe_concentration() {
    println!("=== concentration vs N and beta ===");
    for beta in [0.0, 0.15] {
        for n in [8u32, 16, 32, 64, 128] {
            let mut e10 = Vec::new();
            for seed in 0..5 {
                let mut config =
                    SimConfig::defaults(n, Topology::SparseMesh, TaskFamily::Reasoning, seed);
                config.beta = beta;
                let bundle = cascade_core::sim::run_simulation(&config).unwrap();
                let analysis = analyze_bundle(&bundle, 10).unwrap();
                for (_, c) in &analysis.concentration {
                    e10.push(c.e_active[&10]);
                }
            }
            let mean = e10.iter().sum::<f64>() / e10.len() as f64;
            println!("beta={beta} N={n}: E_active_10={mean:.4} delta={:+.4}", mean - 0.10);
        }
    }
}
