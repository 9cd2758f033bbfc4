//! End-to-end acceptance run: drives the `lcslab` binary and prints one
//! PASS/FAIL line per criterion. Criteria that cannot be met as stated are
//! reported as FAIL together with the measured value; the process exits
//! non-zero only if the verdicts differ from the expected set.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lcslab");

/// Criteria known not to hold as written; see the README.
const EXPECTED_FAIL: &[u32] = &[7, 8];

struct Run {
    code: i32,
    report: Value,
    elapsed: Duration,
}

fn run(out: &Path, args: &[&str]) -> Run {
    let start = Instant::now();
    let o = Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let code = o.status.code().unwrap_or(-1);
    let (cmd, scenario) = (args[0], arg_after(args, "--scenario"));
    let path = out.join(format!("{scenario}.{cmd}.json"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; stderr: {}", path.display(), String::from_utf8_lossy(&o.stderr)));
    Run {
        code,
        report: serde_json::from_str(&text).expect("report is JSON"),
        elapsed,
    }
}

fn arg_after<'a>(args: &[&'a str], flag: &str) -> &'a str {
    let i = args.iter().position(|a| *a == flag).expect("flag present");
    args[i + 1]
}

fn check(r: &Value, name: &str) -> (f64, bool) {
    let c = r["checks"]
        .as_array()
        .and_then(|cs| cs.iter().find(|c| c["name"] == name))
        .unwrap_or_else(|| panic!("check {name} missing"));
    (c["value"].as_f64().unwrap_or(f64::NAN), c["pass"].as_bool().unwrap_or(false))
}

fn passes(r: &Value, name: &str) -> bool {
    check(r, name).1
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn inoue(out: &Path) -> Verdict {
    let r = run(out, &["inoue-verify", "--scenario", "inoue-sol41"]);
    let res = &r.report["results"];
    let feasible: Vec<f64> = res["feasible_k"].as_array().unwrap().iter().map(f).collect();
    let scanned: Vec<f64> = res["scan"].as_array().unwrap().iter().map(|x| f(&x["k"])).collect();
    let all_scanned = [0.0, -0.5, 0.5, 1.0, 1.5, 2.0].iter().all(|k| scanned.contains(k));
    let ok = r.code == 0
        && r.report["passed"] == true
        && feasible == [1.0]
        && all_scanned
        && passes(&r.report, "all_verdicts_certified")
        && passes(&r.report, "witness_d_alpha_exact_zero")
        && passes(&r.report, "witness_taming_min_eig")
        && passes(&r.report, "completion_d_alpha_exact_zero")
        && r.elapsed < Duration::from_secs(5);
    verdict(
        ok,
        format!(
            "feasible k = {feasible:?}, witness min eig = {:.4}, runtime {:.2}s",
            check(&r.report, "witness_taming_min_eig").0,
            r.elapsed.as_secs_f64()
        ),
    )
}

fn perron(out: &Path) -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut min_gap = f64::INFINITY;
    for seed in 1..=20u64 {
        let s = seed.to_string();
        let r = run(out, &["perron-eig", "--scenario", "perron-random-t2", "--seed", &s]);
        let names = [
            "eigen_residual",
            "u0_min",
            "lambda0_imag_abs",
            "dense_vs_power",
            "spectral_gap",
            "sandwich_violations",
        ];
        let samples = r.report["results"]["sandwich"]["samples"].as_u64();
        if r.code != 0 || !names.iter().all(|n| passes(&r.report, n)) || samples != Some(100) {
            failures.push(seed);
        }
        min_gap = min_gap.min(check(&r.report, "spectral_gap").0);
    }
    let elapsed = start.elapsed();
    verdict(
        failures.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "20 seeds at N = 16, failing seeds {failures:?}, min gap {min_gap:.4}, runtime {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn eigencurve(out: &Path) -> Verdict {
    let r = run(out, &["lcs-find", "--scenario", "lcs-constant-t2"]);
    let (curve, c_ok) = check(&r.report, "curve_vs_closed_form");
    let (dt, t_ok) = check(&r.report, "t_star_vs_2");
    let (spread, p_ok) = check(&r.report, "psi_spread");
    verdict(
        r.code == 0 && c_ok && t_ok && p_ok,
        format!("max |λ(t) − t(2−t)c₀²/4| = {curve:e}, |t* − 2| = {dt:e}, ψ spread = {spread:e}"),
    )
}

fn run_identities(out: &Path) -> Run {
    run(out, &["identities", "--scenario", "identities-full"])
}

fn derivative(ids: &Run) -> Verdict {
    let (e, ok) = check(&ids.report, "derivative_rel_error");
    let (e2, better) = check(&ids.report, "derivative_refinement");
    verdict(
        ok && better,
        format!("relative error {e:.3e} at N = 16, {e2:.3e} at N = 32"),
    )
}

struct PerturbedRuns {
    ok: bool,
    detail: String,
    degrees: Vec<f64>,
    consistent_rel: Vec<f64>,
    half_ratio: Vec<f64>,
}

fn perturbed(out: &Path) -> PerturbedRuns {
    let mut ok = true;
    let mut degrees = Vec::new();
    let mut consistent_rel = Vec::new();
    let mut half_ratio = Vec::new();
    let mut worst_tg: f64 = 0.0;
    let mut t_stars = Vec::new();
    for seed in 11..=15u64 {
        let s = seed.to_string();
        let r = run(out, &["lcs-find", "--scenario", "lcs-perturbed-t4", "--seed", &s]);
        for n in [
            "t_star_positive",
            "t_star_at_most_t_max",
            "eigen_residual",
            "psi_min",
            "twisted_gauduchon_residual",
            "lambda_at_t_max",
        ] {
            ok &= passes(&r.report, n);
        }
        ok &= r.code == 0;
        let c = &r.report["results"]["certificate"];
        worst_tg = worst_tg.max(f(&c["tg_residual"]) / f(&c["tg_threshold"]));
        t_stars.push(f(&c["t_star"]));
        let deg = f(&c["degree"]);
        degrees.push(deg);
        consistent_rel.push(check(&r.report, "degree_vs_solution_rel").0);
        half_ratio.push(f(&r.report["results"]["solution_form_half"]) / deg);
    }
    let detail = format!(
        "5 seeds, t* ∈ [{:.4}, {:.4}], worst tg residual / (1e-6·scale) = {worst_tg:.2e}",
        t_stars.iter().cloned().fold(f64::INFINITY, f64::min),
        t_stars.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    );
    PerturbedRuns {
        ok,
        detail,
        degrees,
        consistent_rel,
        half_ratio,
    }
}

fn lemma(ids: &Run) -> Verdict {
    let exact = passes(&ids.report, "lemma_lie_exact_zero");
    let (ratio, lo) = check(&ids.report, "lemma_mesh_ratio_min");
    let hi = passes(&ids.report, "lemma_mesh_ratio_max");
    verdict(
        exact && lo && hi,
        format!("Lie residual exactly 0: {exact}; mesh ratio N 16→32 = {ratio:.3}"),
    )
}

fn degree(p: &PerturbedRuns) -> Verdict {
    let negative = p.degrees.iter().all(|d| *d < 0.0);
    let worst_consistent = p.consistent_rel.iter().cloned().fold(0.0, f64::max);
    let half_ok = p.half_ratio.iter().all(|r| (r - 1.0).abs() < 0.01);
    let ratio_min = p.half_ratio.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio_max = p.half_ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    verdict(
        negative && half_ok,
        format!(
            "degree < 0 in all 5 seeds: {negative}; −½∫(‖a_h‖²+‖dψ‖²/ψ²) / degree ∈ [{ratio_min:.4}, {ratio_max:.4}] \
             (needs 1 ± 1%; the ratio is π because the degree carries 1/2π), \
             with the 1/2π constant on both sides the worst mismatch is {worst_consistent:.2e}"
        ),
    )
}

fn hopf(out: &Path) -> (Verdict, f64) {
    let r = run(out, &["hopf-family", "--scenario", "hopf-standard"]);
    let res = &r.report["results"];
    let (lo, hi) = (f(&res["lee_norm2"]["min"]), f(&res["lee_norm2"]["max"]));
    let others = ["lck_residual_max", "taming_min_eig_min", "pluricanonical_residual_max"]
        .iter()
        .all(|n| passes(&r.report, n));
    let norm_ok = (lo - 2.0).abs() < 1e-10 && (hi - 2.0).abs() < 1e-10;
    let v = verdict(
        others && norm_ok && res["points"] == 50,
        format!(
            "dF_t = tθ∧F_t, taming and pluricanonical checks pass: {others}; ‖θ‖² ∈ [{lo:.15}, {hi:.15}], required 2"
        ),
    );
    (v, hi.max((lo - 1.0).abs() + 1.0))
}

fn sign_obstruction(out: &Path) -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    let mut ratios = Vec::new();
    for seed in 1..=10u64 {
        let s = seed.to_string();
        let r = run(out, &["identities", "--scenario", "sign-obstruction", "--seed", &s]);
        ok &= r.code == 0 && r.report["passed"] == true;
        worst = worst.max(check(&r.report, "sign_obstruction_lambda").0);
        ok &= passes(&r.report, "ibp_psi_one");
        ratios.push(check(&r.report, "ibp_ratio_min").0);
    }
    let (rmin, rmax) = (
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    verdict(
        ok,
        format!("max λ_a over 10 seeds = {worst:.4e}; ibp refinement ratio ∈ [{rmin:.3}, {rmax:.3}]"),
    )
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut m = BTreeMap::new();
    for e in std::fs::read_dir(dir).expect("output dir") {
        let p = e.expect("entry").path();
        m.insert(p.file_name().unwrap().into(), std::fs::read(&p).expect("readable"));
    }
    m
}

fn reproducibility(root: &Path) -> Verdict {
    let list = Command::new(BIN).arg("scenarios").output().expect("binary runs");
    let scenarios: Vec<(String, String)> = String::from_utf8_lossy(&list.stdout)
        .lines()
        .filter_map(|l| {
            let mut w = l.split_whitespace();
            Some((w.next()?.to_string(), w.next()?.to_string()))
        })
        .collect();
    let (a, b) = (root.join("rep-a"), root.join("rep-b"));
    let mut differing = Vec::new();
    for (name, cmd) in &scenarios {
        for dir in [&a, &b] {
            Command::new(BIN)
                .args([cmd.as_str(), "--scenario", name, "--format", "json,csv,svg", "--quiet", "--out"])
                .arg(dir)
                .status()
                .expect("binary runs");
        }
    }
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    for (k, v) in &sa {
        if sb.get(k) != Some(v) {
            differing.push(k.display().to_string());
        }
    }
    verdict(
        differing.is_empty() && sa.len() == sb.len() && !sa.is_empty(),
        format!("{} scenarios, {} files compared, differing: {differing:?}", scenarios.len(), sa.len()),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = tmp.path().join("runs");
    let ids = run_identities(&out);
    let pert = perturbed(&out);
    let (hopf_verdict, lee_norm2) = hopf(&out);
    let verdicts: Vec<(u32, &str, Verdict)> = vec![
        (1, "Inoue rigidity", inoue(&out)),
        (2, "Perron suite", perron(&out)),
        (3, "exact eigencurve", eigencurve(&out)),
        (4, "derivative at t = 0", derivative(&ids)),
        (5, "perturbed existence", verdict(pert.ok, pert.detail.clone())),
        (6, "twisted Gauduchon identity", lemma(&ids)),
        (7, "degree bookkeeping", degree(&pert)),
        (8, "Hopf family", hopf_verdict),
        (9, "sign obstruction", sign_obstruction(&out)),
        (10, "reproducibility", reproducibility(tmp.path())),
    ];
    let mut unexpected = Vec::new();
    for (n, title, v) in &verdicts {
        println!("criterion {n:>2} {}: {title} — {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if v.pass == EXPECTED_FAIL.contains(n) {
            unexpected.push(*n);
        }
    }
    // The known failures are pinned to their measured values.
    assert!(pert.half_ratio.iter().all(|r| (r - std::f64::consts::PI).abs() < 0.01 * std::f64::consts::PI));
    assert!((lee_norm2 - 1.0).abs() < 1e-10, "‖θ‖² = {lee_norm2}");
    assert!(pert.consistent_rel.iter().all(|r| *r < 0.01));
    if !unexpected.is_empty() {
        eprintln!("unexpected verdicts for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
