//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`) so the lines
//! are always printed.

mod common;

use std::time::Instant;

use brforest::data::{bundled, synth_classification, waveform, SynthSpec};
use brforest::experiment::{analyze, read_winners_csv, run_grid, write_grid_rows, GridResult, GridSpec};
use brforest::forest::{bootstrap_sample, named_config};
use brforest::meta::{
    kl_statistics, leave_two_out_splits, meta_evaluate, regime_labels, FeaturePool, MetaFeatureMatrix, MetaGrid,
    RegimeLabel,
};
use brforest::stats::{paired_t_greater, spearman_rho};
use brforest::{rng, Dataset, Result};
use common::{best_split_mismatches, kl_mismatches};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn unique_fraction() -> Result<Outcome> {
    let n = 10_000;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (i, br) in [0.2, 1.0, 2.0, 5.0].into_iter().enumerate() {
        let mut r = rng::stream(2024, &[i as u64]);
        let sample = bootstrap_sample(n, br, &mut r)?;
        let mut seen = vec![false; n];
        sample.iter().for_each(|&j| seen[j] = true);
        let frac = seen.iter().filter(|&&s| s).count() as f64 / n as f64;
        let expected = 1.0 - (-br).exp();
        worst = worst.max((frac - expected).abs());
        parts.push(format!("BR {br}: {frac:.4} vs {expected:.4}"));
    }
    outcome(worst <= 0.01, format!("{}; max |diff| {worst:.4} <= 0.01", parts.join(", ")))
}

// Independent reference values: scipy.stats.spearmanr / ttest_rel(alternative="greater").
const RHO_CASES: [(&[f64], &[f64], f64); 3] = [
    (&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0], 0.948_683_298_050_513_9),
    (
        &[3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0],
        &[2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0],
        0.198_853_681_209_924_67,
    ),
    (
        &[0.5, 0.1, 0.1, 0.3, 0.9, 0.7],
        &[10.0, 30.0, 20.0, 20.0, 50.0, 40.0],
        0.514_705_882_352_941_1,
    ),
];
const T_CASES: [(&[f64], &[f64], f64); 2] = [
    (&[2.1, 1.9, 2.0, 2.2], &[1.0, 1.1, 0.9, 1.2], 0.000_382_942_179_170_019_36),
    (
        &[0.81, 0.79, 0.85, 0.80, 0.83, 0.78],
        &[0.80, 0.80, 0.82, 0.79, 0.81, 0.80],
        0.210_295_513_457_271_32,
    ),
];

fn oracles() -> Result<Outcome> {
    let kl = kl_mismatches(200);
    let split = best_split_mismatches(1000);
    let mut rho_err: f64 = 0.0;
    for (x, y, want) in RHO_CASES {
        rho_err = rho_err.max((spearman_rho(x, y)? - want).abs());
    }
    let mut p_err: f64 = 0.0;
    for (a, b, want) in T_CASES {
        p_err = p_err.max((paired_t_greater(a, b)?.p_value - want).abs());
    }
    outcome(
        kl.is_empty() && split.is_empty() && rho_err <= 1e-6 && p_err <= 5e-4,
        format!(
            "k_l mismatches {}/200, best_split mismatches {}/1000, max |d rho| {rho_err:.1e} <= 1e-6, max |d p| {p_err:.1e} <= 5e-4",
            kl.len(),
            split.len()
        ),
    )
}

fn grid_csv(gr: &GridResult) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_grid_rows(gr.rows(), &mut buf, true)?;
    Ok(buf)
}

/// Full desk-scale grids; returns the Iris grid for the determinism check.
fn desk_grids(iris_grid: &mut Option<GridResult>) -> Result<Outcome> {
    type Loader = fn() -> Result<Dataset>;
    let cases: [(Loader, f64, f64); 3] =
        [(bundled::iris, 95.232, 1.5), (bundled::wine, 97.809, 1.5), (bundled::sonar, 81.627, 2.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (load, target, tol) in cases {
        let ds = load()?;
        let t = Instant::now();
        let gr = in_pool(1, || run_grid(&ds, &GridSpec::default()))?;
        let w = analyze(&gr)?;
        let acc = 100.0 * w.mean_accuracy;
        let ok = (acc - target).abs() <= tol;
        pass &= ok;
        parts.push(format!(
            "{} {} br={} {acc:.3}% vs {target}±{tol} [{}] {:.0}s",
            ds.name(),
            w.best_config,
            w.best_br,
            if ok { "ok" } else { "off" },
            t.elapsed().as_secs_f64()
        ));
        if ds.name() == "Iris" {
            *iris_grid = Some(gr);
        }
    }
    outcome(pass, parts.join("; "))
}

/// Mean accuracies at `hi_br` and `lo_br` and the one-sided p-value for
/// `better` beating the other over shared folds.
fn two_rate_test(ds: &Dataset, config: &str, n_trees: Option<usize>, better: f64, worse: f64) -> Result<(f64, f64, f64)> {
    let mut cfg = named_config(config).expect("known config");
    if let Some(nt) = n_trees {
        cfg.n_trees = nt;
    }
    let mut rates = [better, worse];
    rates.sort_by(f64::total_cmp);
    let spec = GridSpec {
        configs: vec![cfg],
        br_values: rates.to_vec(),
        repeats: 50,
        seed: 0,
    };
    let gr = run_grid(ds, &spec)?;
    let (b, w) = (gr.rate_index(better).unwrap(), gr.rate_index(worse).unwrap());
    let p = paired_t_greater(gr.cell(0, b), gr.cell(0, w))?.p_value;
    Ok((gr.mean(0, b), gr.mean(0, w), p))
}

fn sonar_high_rate() -> Result<Outcome> {
    let (a4, a1, p) = two_rate_test(&bundled::sonar()?, "RF(qs_ent)", None, 4.0, 1.0)?;
    outcome(
        a4 > a1 && p < 0.05,
        format!("Sonar RF(qs_ent): BR 4.0 {:.3}% vs BR 1.0 {:.3}%, p = {p:.2e} < 0.05", 100.0 * a4, 100.0 * a1),
    )
}

fn waveform_low_rate() -> Result<Outcome> {
    let ds = waveform(300, 0)?;
    let (lo, hi, p) = two_rate_test(&ds, "RF(nt_500)", Some(100), 0.2, 5.0)?;
    outcome(
        lo > hi && p < 0.05,
        format!("waveform(300) RF(nt_500)@100 trees: BR 0.2 {:.3}% vs BR 5.0 {:.3}%, p = {p:.2e} < 0.05", 100.0 * lo, 100.0 * hi),
    )
}

fn leave_two_out_counts() -> Result<Outcome> {
    let reports = read_winners_csv(bundled::REFERENCE_WINNERS_CSV.as_bytes())?;
    let all = regime_labels(&reports, None);
    let all_labels: Vec<RegimeLabel> = all.iter().map(|l| l.1).collect();
    let filtered = regime_labels(&reports, Some(0.01));
    let filtered_labels: Vec<RegimeLabel> = filtered.iter().map(|l| l.1).collect();
    let n_all = leave_two_out_splits(&all_labels)?.len();
    let n_filtered = leave_two_out_splits(&filtered_labels)?.len();
    outcome(
        n_all == 320 && filtered.len() == 24 && n_filtered == 143,
        format!(
            "{} datasets -> {n_all} splits (want 320); p <= 0.01 keeps {} (want 24) -> {n_filtered} splits (want 143)",
            all.len(),
            filtered.len()
        ),
    )
}

fn kl_invariants() -> Result<Outcome> {
    use brforest::meta::{dataset_kl, kl_index, MAX_K};
    let mut failures = Vec::new();
    let row_sums = |v: &[f64]| (1..=MAX_K).all(|k| ((0..=k).map(|l| v[kl_index(k, l)]).sum::<f64>() - 100.0).abs() < 1e-9);

    for seed in 0..20 {
        let fx = common::Fixture::random(seed, 40, 3, 3, 0);
        let a = kl_statistics(&fx.dataset())?;
        if !row_sums(&a.values) {
            failures.push(format!("row sums (seed {seed})"));
        }
        let mut x = fx.x.clone();
        let mut y = fx.y.clone();
        x.reverse();
        y.reverse();
        x.rotate_left(seed as usize % 40);
        y.rotate_left(seed as usize % 40);
        if kl_statistics(&Dataset::from_rows("p", &x, y)?)?.values != a.values {
            failures.push(format!("permutation (seed {seed})"));
        }
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        for i in 0..12 {
            rows.push(vec![500.0 * f64::from(c) + 0.01 * f64::from(i), 0.0]);
            labels.push(c as usize);
        }
    }
    let pure = dataset_kl(&Dataset::from_rows("pure", &rows, labels)?)?;
    if (1..=MAX_K).any(|k| pure.value(k, k) != 100.0) {
        failures.push("pure clusters".into());
    }
    let line: Vec<Vec<f64>> = (0..30).map(|i| vec![f64::from(i)]).collect();
    let alt = dataset_kl(&Dataset::from_rows("line", &line, (0..30).map(|i| i % 2).collect())?)?;
    if alt.value(1, 0) != 100.0 {
        failures.push("alternating line".into());
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "row sums, permutation invariance (20 fixtures), pure clusters k_k = 100, alternating line 1_0 = 100".to_owned()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn meta_run(threads: usize) -> Result<Vec<u8>> {
    let mut stats = Vec::new();
    for (i, sep) in [0.3, 0.6, 0.9, 1.2, 1.6, 2.0, 2.5, 3.0].into_iter().enumerate() {
        let ds = synth_classification(&SynthSpec {
            n_samples: 60,
            n_features: 3,
            n_classes: 2,
            n_clusters_per_class: 1,
            class_sep: sep,
            seed: i as u64,
        })?;
        stats.push(in_pool(threads, || kl_statistics(&brforest::data::neighborhood_scale(&ds)?))?);
    }
    let labels: Vec<RegimeLabel> = (0..stats.len())
        .map(|i| if i % 2 == 0 { RegimeLabel::GT1 } else { RegimeLabel::LE1 })
        .collect();
    let matrix = MetaFeatureMatrix::build(&stats, FeaturePool::BASE);
    let mut base = named_config("RF(base)").unwrap();
    base.n_trees = 20;
    let grid = MetaGrid {
        configs: vec![base],
        br_values: vec![0.6, 2.0],
        max_features: 3,
        seed: 5,
    };
    let report = in_pool(threads, || meta_evaluate(&matrix, &labels, &grid))?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    Ok(buf)
}

fn determinism(iris_single_thread: Option<&GridResult>) -> Result<Outcome> {
    let single = match iris_single_thread {
        Some(gr) => grid_csv(gr)?,
        None => return outcome(false, "no single-thread Iris grid to compare against"),
    };
    let ds = bundled::iris()?;
    let multi = grid_csv(&in_pool(3, || run_grid(&ds, &GridSpec::default()))?)?;
    let (m1, m3) = (meta_run(1)?, meta_run(3)?);
    outcome(
        single == multi && m1 == m3,
        format!(
            "Iris grid CSV 1 vs 3 threads: {} ({} bytes); meta CSV 1 vs 3 threads: {}",
            if single == multi { "identical" } else { "DIFFERENT" },
            single.len(),
            if m1 == m3 { "identical" } else { "DIFFERENT" }
        ),
    )
}

fn main() {
    // `cargo test -- --list` and similar harness probes
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut iris_grid = None;
    let mut failed = 0;
    let mut report = |id: &str, name: &str, r: Result<Outcome>, secs: f64| {
        let (status, detail) = match r {
            Ok(o) => (if o.pass { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{id} {status} {name}: {detail} ({secs:.1}s)");
    };
    macro_rules! run {
        ($id:expr, $name:expr, $e:expr) => {{
            let t = Instant::now();
            let r = $e;
            report($id, $name, r, t.elapsed().as_secs_f64());
        }};
    }

    run!("C1", "bootstrap unique fraction", unique_fraction());
    run!("C2", "oracle equivalence", oracles());
    run!("C3", "desk-scale winners", desk_grids(&mut iris_grid));
    run!("C4", "Sonar prefers BR 4.0 over 1.0", sonar_high_rate());
    run!("C5", "waveform prefers BR 0.2 over 5.0", waveform_low_rate());
    run!("C6", "leave-two-out split counts", leave_two_out_counts());
    run!("C7", "k_l invariants", kl_invariants());
    println!("C8 DOCUMENTED full-scale reproduction: needs the complete grid; run scripts/reproduce.sh (not a test gate)");
    run!("C9", "thread-count determinism", determinism(iris_grid.as_ref()));

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
