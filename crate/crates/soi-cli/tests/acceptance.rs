//! Acceptance suite: each test runs one acceptance criterion at its stated
//! tolerance and prints a single PASS/FAIL line (visible with --nocapture).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use soi_core::asymptotics::{
    avg_svn_tail, find_lambda1_star, mass_ratio, vnorm_marginal, TailWeighting,
};
use soi_core::coarse::{bin_cells, build_grid, eta_to_lambda, sample_simplex, Observable};
use soi_core::fidelity::{fidelity_closed, fidelity_soi_maximize, RotatedState};
use soi_core::purification::{embed_environment, gram_metric, partial_trace_e, purify};
use soi_core::spectrum::{normalized_linear, normalized_von_neumann, Spectrum};
use soi_core::stream::derive_seed;
use soi_core::unitary::UnitaryFamily;
use soi_core::volume::{
    closed_form_volume, monte_carlo_volume, normalized_volume, quadrature_volume, VolumeGroup,
};

/// Prints the verdict line and panics when any check failed.
fn verdict(criterion: usize, summary: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {criterion}: PASS — {summary}");
    } else {
        let detail = failures.join("; ");
        println!("acceptance {criterion}: FAIL — {detail}");
        panic!("acceptance {criterion}: FAIL — {detail}");
    }
}

fn check(failures: &mut Vec<String>, ok: bool, message: impl FnOnce() -> String) {
    if !ok {
        failures.push(message());
    }
}

fn random_simplex(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= sum);
    v
}

fn random_xi(f: &UnitaryFamily, rng: &mut impl Rng) -> Vec<f64> {
    f.parameter_domain()
        .iter()
        .map(|p| p.lower + (p.upper - p.lower) * rng.random::<f64>())
        .collect()
}

#[test]
fn acceptance_1_quadrature_matches_closed_forms() {
    let mut failures = Vec::new();
    let start = Instant::now();
    let mut worst: f64 = 0.0;

    let su2 = UnitaryFamily::su2();
    for i in 0..20 {
        let l1 = (i + 1) as f64 / 21.0;
        let s = Spectrum::new(vec![l1, 1.0 - l1]).unwrap();
        let q = quadrature_volume(&s, &su2, 32).unwrap().value;
        let c = closed_form_volume(VolumeGroup::Su2, &s).unwrap().value;
        let rel = ((q - c) / c).abs();
        worst = worst.max(rel);
        check(&mut failures, rel <= 1e-6, || {
            format!("su2 spectrum {l1:.3}: quadrature off by rel {rel:.2e}")
        });
    }

    let so3 = UnitaryFamily::so(3).unwrap();
    for a in 0..5 {
        for b in 0..4 {
            let eta1 = 0.15 + 0.2 * a as f64;
            let eta2 = 0.2 + 0.25 * b as f64;
            let s = eta_to_lambda(eta1, eta2).unwrap();
            let q = quadrature_volume(&s, &so3, 32).unwrap().value;
            let c = closed_form_volume(VolumeGroup::So3, &s).unwrap().value;
            let rel = ((q - c) / c).abs();
            worst = worst.max(rel);
            check(&mut failures, rel <= 1e-6, || {
                format!("so3 eta ({eta1},{eta2}): quadrature off by rel {rel:.2e}")
            });
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    check(&mut failures, elapsed < 10.0, || {
        format!("runtime {elapsed:.1}s exceeds 10s")
    });
    verdict(
        1,
        &format!("quadrature matches closed forms on 40 spectra (max rel dev {worst:.2e}, {elapsed:.1}s)"),
        failures,
    );
}

#[test]
fn acceptance_2_metric_density_pinning() {
    let mut failures = Vec::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_02);
    let su2 = UnitaryFamily::su2();
    let so3 = UnitaryFamily::so(3).unwrap();
    let mut worst: f64 = 0.0;

    for _ in 0..100 {
        let l1: f64 = rng.random();
        let s = Spectrum::new(vec![l1, 1.0 - l1]).unwrap();
        let xi = random_xi(&su2, &mut rng);
        let got = gram_metric(&s, &su2, &xi).unwrap().sqrt_det;
        let expected = (l1 * (1.0 - l1)).sqrt() * (2.0 * xi[0]).sin();
        let dev = (got - expected).abs();
        worst = worst.max(dev);
        check(&mut failures, dev <= 1e-10, || {
            format!("su2 sqrt-det dev {dev:.2e} at lambda1 {l1:.4}")
        });
    }

    for _ in 0..100 {
        let l = random_simplex(&mut rng, 3);
        let s = Spectrum::new(l.clone()).unwrap();
        let xi = random_xi(&so3, &mut rng);
        let got = gram_metric(&s, &so3, &xi).unwrap().sqrt_det;
        let expected = ((l[0] + l[1]) * (l[0] + l[2]) * (l[1] + l[2])).sqrt() * xi[2].cos();
        let dev = (got - expected).abs();
        worst = worst.max(dev);
        check(&mut failures, dev <= 1e-10, || {
            format!("so3 sqrt-det dev {dev:.2e}")
        });
    }

    verdict(
        2,
        &format!("Gram sqrt-det matches the SU(2) and SO(3) closed forms at 200 random points (max dev {worst:.2e})"),
        failures,
    );
}

#[test]
fn acceptance_3_volume_behaves_like_entropy() {
    let mut failures = Vec::new();

    // Zero at pure spectra.
    for (group, dim) in [(VolumeGroup::Su2, 2), (VolumeGroup::So3, 3)] {
        let v = normalized_volume(group, &Spectrum::pure(dim).unwrap()).unwrap();
        check(&mut failures, v <= 1e-15, || {
            format!("{group:?} pure-state volume {v:.2e} not zero")
        });
    }

    // One only at the maximally mixed spectrum.
    for (group, dim) in [(VolumeGroup::Su2, 2), (VolumeGroup::So3, 3)] {
        let v = normalized_volume(group, &Spectrum::maximally_mixed(dim).unwrap()).unwrap();
        check(&mut failures, (v - 1.0).abs() <= 1e-12, || {
            format!("{group:?} maximally mixed volume {v} differs from 1")
        });
    }
    for i in 0..=200 {
        let l1 = i as f64 / 200.0;
        if (l1 - 0.5).abs() < 1e-12 {
            continue;
        }
        let v = normalized_volume(VolumeGroup::Su2, &Spectrum::new(vec![l1, 1.0 - l1]).unwrap())
            .unwrap();
        check(&mut failures, v < 1.0 - 1e-9, || {
            format!("su2 volume {v} reaches 1 away from maximally mixed (lambda1 {l1})")
        });
    }
    for a in 0..=19 {
        for b in 0..=(19 - a) {
            let l = [a as f64 / 19.0, b as f64 / 19.0];
            let s = Spectrum::new(vec![l[0], l[1], (1.0 - l[0] - l[1]).max(0.0)]).unwrap();
            let v = normalized_volume(VolumeGroup::So3, &s).unwrap();
            check(&mut failures, v < 1.0 - 1e-9, || {
                format!("so3 volume {v} reaches 1 away from maximally mixed at {l:?}")
            });
        }
    }

    // Concavity: second differences on step-0.01 grids.
    let su2_curve = |l1: f64| {
        normalized_volume(VolumeGroup::Su2, &Spectrum::new(vec![l1, 1.0 - l1]).unwrap()).unwrap()
    };
    for i in 1..100 {
        let x = i as f64 / 100.0;
        let second = su2_curve(x + 0.01) - 2.0 * su2_curve(x) + su2_curve(x - 0.01);
        check(&mut failures, second <= 1e-9, || {
            format!("su2 curve convex at {x}: second difference {second:.2e}")
        });
    }
    let so3_path = |l1: f64| {
        let mu = (1.0 - l1) / 2.0;
        normalized_volume(VolumeGroup::So3, &Spectrum::new(vec![l1, mu, mu]).unwrap()).unwrap()
    };
    let lo = 1.0f64 / 3.0;
    let steps = ((1.0 - lo) / 0.01).floor() as usize;
    for i in 1..steps {
        let x = lo + 0.01 * i as f64;
        let second = so3_path(x + 0.01) - 2.0 * so3_path(x) + so3_path(x - 0.01);
        check(&mut failures, second <= 1e-9, || {
            format!("so3 path convex at {x}: second difference {second:.2e}")
        });
    }

    // Pointwise upper bound on both normalized entropies, 200-point grids.
    for i in 0..200 {
        let l1 = i as f64 / 199.0;
        let s = Spectrum::new(vec![l1, 1.0 - l1]).unwrap();
        let v = normalized_volume(VolumeGroup::Su2, &s).unwrap();
        let svn = normalized_von_neumann(&s);
        let sl = normalized_linear(&s);
        check(&mut failures, v >= svn - 1e-12 && v >= sl - 1e-12, || {
            format!("su2 bound fails at {l1}: v {v}, svn {svn}, sl {sl}")
        });
    }
    for a in 0..=19 {
        for b in 0..=(19 - a) {
            let s = Spectrum::new(vec![
                a as f64 / 19.0,
                b as f64 / 19.0,
                (1.0 - a as f64 / 19.0 - b as f64 / 19.0).max(0.0),
            ])
            .unwrap();
            let v = normalized_volume(VolumeGroup::So3, &s).unwrap();
            let svn = normalized_von_neumann(&s);
            let sl = normalized_linear(&s);
            check(&mut failures, v >= svn - 1e-12 && v >= sl - 1e-12, || {
                format!("so3 bound fails at {:?}", s.values())
            });
        }
    }

    verdict(
        3,
        "normalized volume vanishes on pure spectra, peaks only at maximally mixed, is concave, and bounds both entropies",
        failures,
    );
}

#[test]
fn acceptance_4_coarse_graining_headline_numbers() {
    let mut failures = Vec::new();
    let start = Instant::now();

    let grid = build_grid(300, true).unwrap();
    let volume_bins = bin_cells(&grid, Observable::Volume, 10).unwrap();
    let top_fraction = volume_bins.fractions[9];
    check(&mut failures, top_fraction > 0.60, || {
        format!("volume-binned top-segment fraction {top_fraction:.4} not > 0.60")
    });
    let avg = volume_bins.avg_svn[9].unwrap_or(0.0);
    check(&mut failures, (avg - 0.88).abs() <= 0.02, || {
        format!("top-segment average entropy {avg:.4} outside 0.88 ± 0.02")
    });

    for obs in [Observable::VonNeumann, Observable::Linear] {
        let bins = bin_cells(&grid, obs, 10).unwrap();
        let fraction = bins.fractions[9];
        check(&mut failures, fraction < 0.33, || {
            format!("{obs:?}-binned top-segment fraction {fraction:.4} not < 0.33")
        });
    }

    let elapsed = start.elapsed().as_secs_f64();
    check(&mut failures, elapsed < 120.0, || {
        format!("runtime {elapsed:.1}s exceeds 2 minutes")
    });
    verdict(
        4,
        &format!("ell=300 coarse-graining gives top fraction {top_fraction:.3} (> 0.60), avg entropy {avg:.3} (0.88 ± 0.02), entropy binnings < 0.33 ({elapsed:.1}s)"),
        failures,
    );
}

#[test]
fn acceptance_5_product_formula_tracks_monte_carlo() {
    let mut failures = Vec::new();
    let start = Instant::now();
    let seed = 7u64;
    let count = 1000;
    let samples = 100_000u64;

    let spectra = sample_simplex(4, count, derive_seed(seed, 0)).unwrap();
    let family = UnitaryFamily::so(4).unwrap();
    let mut product = Vec::with_capacity(count);
    let mut monte_carlo = Vec::with_capacity(count);
    for (i, s) in spectra.iter().enumerate() {
        product.push(closed_form_volume(VolumeGroup::SoNProduct, s).unwrap().value);
        monte_carlo.push(
            monte_carlo_volume(s, &family, samples, derive_seed(seed, 1 + i as u64))
                .unwrap()
                .value,
        );
    }
    let product_max = product.iter().copied().fold(f64::MIN, f64::max);
    let mc_max = monte_carlo.iter().copied().fold(f64::MIN, f64::max);
    let product: Vec<f64> = product.iter().map(|v| v / product_max).collect();
    let monte_carlo: Vec<f64> = monte_carlo.iter().map(|v| v / mc_max).collect();

    let r = pearson(&product, &monte_carlo);
    check(&mut failures, r > 0.999, || {
        format!("Pearson correlation {r:.6} not > 0.999")
    });
    let max_dev = product
        .iter()
        .zip(&monte_carlo)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    check(&mut failures, max_dev < 0.05, || {
        format!("max |product − mc| = {max_dev:.4} not < 0.05")
    });

    let elapsed = start.elapsed().as_secs_f64();
    check(&mut failures, elapsed < 600.0, || {
        format!("runtime {elapsed:.1}s exceeds 10 minutes")
    });
    verdict(
        5,
        &format!("normalized product formula vs Monte Carlo on 1000 spectra: r = {r:.6}, max dev {max_dev:.4} ({elapsed:.0}s)"),
        failures,
    );
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - mean_a) * (y - mean_b);
        var_a += (x - mean_a).powi(2);
        var_b += (y - mean_b).powi(2);
    }
    cov / (var_a * var_b).sqrt()
}

#[test]
fn acceptance_6_large_n_thresholds_and_averages() {
    let mut failures = Vec::new();
    let ns = [3usize, 5, 7, 11, 30];
    let level = 1e-4;
    let mut uniform = Vec::new();
    let mut volume = Vec::new();

    for &n in &ns {
        let star = find_lambda1_star(n, level).unwrap();
        let residual = (vnorm_marginal(n, star).unwrap() - level).abs();
        check(&mut failures, residual <= 1e-10, || {
            format!("N={n}: threshold residual {residual:.2e} exceeds 1e-10")
        });
        let ratio = mass_ratio(n, star).unwrap();
        check(&mut failures, ratio > 0.9999, || {
            format!("N={n}: mass ratio {ratio:.6} not > 0.9999")
        });
        uniform.push(avg_svn_tail(n, star, TailWeighting::Uniform).unwrap());
        volume.push(avg_svn_tail(n, star, TailWeighting::Volume).unwrap());
    }

    check(&mut failures, uniform.last().unwrap() > &0.9, || {
        format!("uniform average at N=30 is {:.4}, not > 0.9", uniform.last().unwrap())
    });
    check(&mut failures, volume.last().unwrap() > &0.9, || {
        format!("volume-weighted average at N=30 is {:.4}, not > 0.9", volume.last().unwrap())
    });
    for (pair, n) in volume.windows(2).zip(ns.windows(2)) {
        check(&mut failures, pair[1] > pair[0], || {
            format!(
                "volume-weighted average not increasing: N={} gives {:.6}, N={} gives {:.6}",
                n[0], pair[0], n[1], pair[1]
            )
        });
    }
    // The uniform-weighted average provably dips between N = 3 (where
    // λ¹* = 1 − 3.0e-9, so the tail spans nearly the whole curve) and N = 5
    // before increasing; this assertion records the intended trend and is
    // expected to fail on that step.
    for (pair, n) in uniform.windows(2).zip(ns.windows(2)) {
        check(&mut failures, pair[1] > pair[0], || {
            format!(
                "uniform average not strictly increasing: N={} gives {:.6}, N={} gives {:.6}",
                n[0], pair[0], n[1], pair[1]
            )
        });
    }

    verdict(
        6,
        "thresholds hit 1e-4 within 1e-10, mass ratios exceed 0.9999, tail averages increase toward 1",
        failures,
    );
}

#[test]
fn acceptance_7_fidelity_equivalence() {
    let mut failures = Vec::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_07);
    let chart = UnitaryFamily::u(2).unwrap();
    let mut worst: f64 = 0.0;

    for trial in 0..50u64 {
        let rho = RotatedState::new(
            Spectrum::new(random_simplex(&mut rng, 2)).unwrap(),
            chart.realize(&random_xi(&chart, &mut rng)).unwrap(),
        )
        .unwrap();
        let sigma = RotatedState::new(
            Spectrum::new(random_simplex(&mut rng, 2)).unwrap(),
            chart.realize(&random_xi(&chart, &mut rng)).unwrap(),
        )
        .unwrap();
        let closed = fidelity_closed(&rho, &sigma).unwrap();
        let soi = fidelity_soi_maximize(&rho, &sigma, 20, trial).unwrap().value;
        let gap = closed - soi;
        worst = worst.max(gap.abs());
        check(&mut failures, soi <= closed + 1e-9, || {
            format!("trial {trial}: search value {soi} exceeds fidelity {closed}")
        });
        check(&mut failures, soi >= closed - 1e-3, || {
            format!("trial {trial}: search value {soi} undershoots fidelity {closed}")
        });
    }

    verdict(
        7,
        &format!("purification-family search matches the closed-form fidelity on 50 pairs (max gap {worst:.2e})"),
        failures,
    );
}

#[test]
fn acceptance_8_purification_contract() {
    let mut failures = Vec::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_08);
    let families = [
        UnitaryFamily::su2(),
        UnitaryFamily::so(3).unwrap(),
        UnitaryFamily::so(4).unwrap(),
    ];

    for draw in 0..1000 {
        let f = &families[draw % families.len()];
        let n = f.dim();
        let s = Spectrum::new(random_simplex(&mut rng, n)).unwrap();
        let xi = random_xi(f, &mut rng);
        let p = purify(&s, f, &xi).unwrap();

        check(&mut failures, (p.state.norm() - 1.0).abs() <= 1e-12, || {
            format!("draw {draw}: norm deviates by {:.2e}", (p.state.norm() - 1.0).abs())
        });
        let rho = partial_trace_e(&p.state, n).unwrap();
        let embedded = embed_environment(&p, n + 2).unwrap();
        let rho_embedded = partial_trace_e(&embedded, n).unwrap();
        check(
            &mut failures,
            (embedded.norm() - 1.0).abs() <= 1e-12,
            || format!("draw {draw}: embedding changes the norm"),
        );
        for r in 0..n {
            for c in 0..n {
                let expected = if r == c { s.values()[r] } else { 0.0 };
                let dev = (rho[(r, c)] - num_complex::Complex64::new(expected, 0.0)).norm();
                let dev_embedded =
                    (rho_embedded[(r, c)] - num_complex::Complex64::new(expected, 0.0)).norm();
                check(&mut failures, dev <= 1e-12, || {
                    format!("draw {draw}: partial trace off by {dev:.2e} at ({r},{c})")
                });
                check(&mut failures, dev_embedded <= 1e-12, || {
                    format!("draw {draw}: embedded partial trace off by {dev_embedded:.2e}")
                });
            }
        }
        if failures.len() > 20 {
            break;
        }
    }

    verdict(
        8,
        "1000 purifications have unit norm and reduce to their spectrum, before and after environment embedding",
        failures,
    );
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!(
            "soi-acceptance-{tag}-{}",
            std::process::id()
        ));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run_cli(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_soi"))
        .args(args)
        .output()
        .expect("failed to launch soi");
    assert!(
        status.status.success(),
        "soi {:?} failed: {}",
        args,
        String::from_utf8_lossy(&status.stderr)
    );
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        files.insert(
            entry.file_name().to_string_lossy().into_owned(),
            fs::read(entry.path()).unwrap(),
        );
    }
    files
}

#[test]
fn acceptance_9_seeded_reruns_are_bit_identical() {
    let mut failures = Vec::new();
    let seeded_runs: Vec<Vec<String>> = vec![
        vec![
            "volume".into(),
            "--group".into(),
            "so3".into(),
            "--spectrum".into(),
            "0.5,0.3,0.2".into(),
            "--method".into(),
            "mc".into(),
            "--samples".into(),
            "20000".into(),
            "--seed".into(),
            "11".into(),
        ],
        vec![
            "so4-compare".into(),
            "--count".into(),
            "5".into(),
            "--samples".into(),
            "8192".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "fidelity".into(),
            "--rho".into(),
            "0.7,0.3".into(),
            "--sigma".into(),
            "0.4,0.6".into(),
            "--method".into(),
            "soi".into(),
            "--budget".into(),
            "5".into(),
            "--seed".into(),
            "2".into(),
        ],
    ];

    for (index, run) in seeded_runs.iter().enumerate() {
        let dir = TempDir::new(&format!("rerun-{index}"));
        let out = dir.path().to_string_lossy().into_owned();
        let mut args: Vec<&str> = run.iter().map(|s| s.as_str()).collect();
        args.push("--out");
        args.push(&out);
        run_cli(&args);

        let first = snapshot(dir.path());
        let config = first
            .keys()
            .find(|name| name.ends_with(".config.json"))
            .cloned();
        let Some(config) = config else {
            failures.push(format!("{}: no config emitted", run[0]));
            continue;
        };
        check(&mut failures, first.len() >= 2, || {
            format!("{}: expected results alongside the config", run[0])
        });

        let config_path = dir.path().join(&config).to_string_lossy().into_owned();
        run_cli(&["--config", &config_path]);
        let second = snapshot(dir.path());
        check(&mut failures, first == second, || {
            format!("{}: rerun from config produced different bytes", run[0])
        });
    }

    verdict(
        9,
        "volume/so4-compare/fidelity reruns from their emitted configs reproduce every output byte",
        failures,
    );
}
