//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p vai-cli --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use vai_core::catalog::{self, coords, e, principal_nilpotent, sl, Expected, PAIRS};
use vai_core::exact::{Rat, Subspace};
use vai_core::grading::{jacobson_morozov, lem_r_report};
use vai_core::io::{parse_algebra, parse_parabolic, parse_subalgebra, parse_theta};
use vai_core::lie::{LieAlgebra, Subalgebra};
use vai_core::reductivity::{vai_verdict_with_theta, CartanData, Certificate, Verdict};
use vai_core::selfcheck::check_random;
use vai_core::volume::{chi_partial, Sl2ModN};
use vai_core::witness::{build_n1, mt_report, phi_jacobian_sandwich, DecayWitness, ParabolicData};

const CHECK_BUDGET: Duration = Duration::from_secs(1);
const MOD_N_BUDGET: Duration = Duration::from_secs(60);
const SPD2_BUDGET: Duration = Duration::from_secs(90);
const SLOPE_TOLERANCE: f64 = 0.2;
const BOUNDED_BELOW_FRACTION: f64 = 0.5;
const SANDWICH_MAX_RATIO: f64 = 10.0;
const CORRUPTED_MIN_RATIO: f64 = 100.0;
const TAIL_TOLERANCE: f64 = 0.15;
const SUP_MIN: f64 = 10.0;
const NORM_GROWTH_MAX: f64 = 0.05;
const SEED: u64 = 42;
const SAMPLES: usize = 100_000;
const SELFCHECK_CASES: usize = 1000;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn bundled(name: &str) -> &'static str {
    catalog::file(name).unwrap_or_else(|| panic!("no bundled {name}"))
}

fn algebra(name: &str) -> LieAlgebra {
    parse_algebra(bundled(name), name).unwrap()
}

fn subalgebra<'g>(g: &'g LieAlgebra, name: &str) -> Subalgebra<'g> {
    Subalgebra::new(g, parse_subalgebra(bundled(name), name, g).unwrap().basis).unwrap()
}

fn witness(g: &LieAlgebra, h: &str, parabolic: &str) -> DecayWitness {
    let h = subalgebra(g, h);
    let p = ParabolicData::from_file(
        g,
        &parse_parabolic(bundled(parabolic), parabolic, g).unwrap(),
    )
    .unwrap();
    build_n1(g, &h, &p).unwrap()
}

/// Runs the CLI in-process and returns `(exit code, stdout)`.
fn run_cli(args: &[&str]) -> (i32, String) {
    let argv = std::iter::once("vai")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = vai_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

struct BinRun {
    code: i32,
    report: Value,
    csv: String,
    elapsed: Duration,
}

/// Runs the built `vai` binary with `VAI_THREADS` set, writing the CSV to a
/// scratch file.
fn run_bin(args: &[String], threads: usize, tag: &str) -> BinRun {
    let csv_path: PathBuf = std::env::temp_dir().join(format!(
        "vai-acceptance-{}-{tag}-{threads}.csv",
        std::process::id()
    ));
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_vai"))
        .args(args)
        .arg("--out")
        .arg(&csv_path)
        .env("VAI_THREADS", threads.to_string())
        .output()
        .expect("spawn vai");
    let elapsed = start.elapsed();
    let csv = std::fs::read_to_string(&csv_path).unwrap_or_default();
    let _ = std::fs::remove_file(&csv_path);
    BinRun {
        code: output.status.code().unwrap_or(-1),
        report: serde_json::from_slice(&output.stdout).unwrap_or(Value::Null),
        csv,
        elapsed,
    }
}

fn estimate_args(space: &'static str, t_range: &'static str) -> Vec<String> {
    let samples = SAMPLES.to_string();
    let seed = SEED.to_string();
    [
        "estimate",
        "--space",
        space,
        "--t-range",
        t_range,
        "--samples",
        &samples,
        "--seed",
        &seed,
        "--fit",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn criterion_1() -> Outcome {
    let cases = [
        ("sl2", "so2", 0),
        ("sl2", "so11", 0),
        ("sl3", "sl3-so3", 0),
        ("sl2", "nE", 3),
        ("sl3", "e12", 3),
        ("sl5", "sl5-u-u23", 3),
        ("sl2", "borel", 4),
    ];
    let start = Instant::now();
    for (g, h, want) in cases {
        let (ga, ha) = (format!("catalog:{g}"), format!("catalog:{h}"));
        let (code, out) = run_cli(&["check", "--algebra", &ga, "--subalgebra", &ha]);
        ensure(
            code == want,
            format!("({g}, {h}) exited {code}, expected {want}"),
        )?;
        let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let vai = report["payload"]["vai"]
            .as_str()
            .unwrap_or_default()
            .to_string();
        let expected = ["holds", "", "", "fails", "no-invariant-measure"][want as usize];
        ensure(vai == expected, format!("({g}, {h}) verdict {vai:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < CHECK_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("7 verdicts correct in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    for p in PAIRS {
        let g = algebra(p.algebra);
        let h = subalgebra(&g, p.subalgebra);
        let c = CartanData::new(&g, parse_theta(bundled(p.theta), p.theta, &g).unwrap())
            .map_err(|e| e.to_string())?;
        let r = vai_verdict_with_theta(&g, &h, &c).map_err(|e| format!("{}: {e}", p.subalgebra))?;
        let theta_cert = match &r.certificate {
            Certificate::ThetaStable { q } => {
                let qs = q.solver();
                let closed = h.basis().iter().all(|x| {
                    q.basis()
                        .iter()
                        .all(|y| qs.coordinates(&g.bracket(x, y)).is_some())
                });
                ensure(closed, format!("{}: [h, q] not in q", p.subalgebra))?;
                true
            }
            _ => false,
        };
        ensure(
            (r.vai == Verdict::Holds) == theta_cert,
            format!(
                "{}: verdict {:?} but theta certificate {theta_cert}",
                p.subalgebra, r.vai
            ),
        )?;
        let want = match p.expected {
            Expected::Holds => Verdict::Holds,
            Expected::Fails => Verdict::Fails,
            Expected::NoInvariantMeasure => Verdict::NoInvariantMeasure,
        };
        ensure(
            r.vai == want,
            format!("{}: verdict {:?}", p.subalgebra, r.vai),
        )?;
    }
    Ok(format!("{} pairs, zero exceptions", PAIRS.len()))
}

fn criterion_3() -> Outcome {
    let g2 = sl(2);
    let g3 = sl(3);
    let g5 = sl(5);
    let u5 = coords(&g5, &principal_nilpotent(5));
    for (g, u) in [(&g2, e(&g2, 0, 1)), (&g3, e(&g3, 0, 1)), (&g5, u5.clone())] {
        // SL2Triple::new re-validates all three relations; check them once more here
        let t = jacobson_morozov(g, &u).map_err(|e| e.to_string())?;
        let two = Rat::from_int(2);
        let scale = |v: &[Rat], k: &Rat| v.iter().map(|c| c * k).collect::<Vec<_>>();
        ensure(
            g.bracket(t.x(), t.u()) == scale(t.u(), &two),
            "[x, u] != 2u",
        )?;
        ensure(
            g.bracket(t.x(), t.v()) == scale(t.v(), &-two.clone()),
            "[x, v] != -2v",
        )?;
        ensure(g.bracket(t.u(), t.v()) == t.x(), "[u, v] != x")?;
    }
    let um = principal_nilpotent(5);
    let u23 = coords(&g5, &um.pow(2).add(&um.pow(3)));
    let n = Subalgebra::new(&g5, vec![u5.clone(), u23]).map_err(|e| e.to_string())?;
    let t = jacobson_morozov(&g5, &u5).map_err(|e| e.to_string())?;
    let r = lem_r_report(&g5, &n, &t).map_err(|e| e.to_string())?;
    ensure(r.holds(), "graded containment fails on sl5")?;
    let want: BTreeSet<Rat> = [2, 4, 6].into_iter().map(Rat::from_int).collect();
    ensure(
        r.eigencomponents == want,
        format!("eigencomponents {:?}", r.eigencomponents),
    )?;
    Ok("triples exact for E, E12, principal U; sl5 components {2, 4, 6}".into())
}

fn slope_line(run: &BinRun) -> Result<(f64, f64), String> {
    let fc = &run.report["payload"]["fit_check"];
    let slope = fc["slope"].as_f64().ok_or("no slope in report")?;
    let hw = fc["slope_half_width"]
        .as_f64()
        .ok_or("no half width in report")?;
    Ok((slope, hw))
}

fn criterion_4(run: &BinRun) -> Outcome {
    let (code, out) = run_cli(&[
        "witness",
        "--algebra",
        "catalog:sl2",
        "--subalgebra",
        "catalog:nE",
    ]);
    ensure(code == 0, format!("witness exited {code}"))?;
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(
        report["payload"]["gamma"] == "2",
        format!("gamma {}", report["payload"]["gamma"]),
    )?;
    let (slope, hw) = slope_line(run)?;
    ensure(
        (slope - 2.0).abs() <= SLOPE_TOLERANCE,
        format!("slope {slope:.4}"),
    )?;
    ensure(run.code == 0, format!("estimate exited {}", run.code))?;
    ensure(
        run.elapsed < MOD_N_BUDGET,
        format!("took {:?}", run.elapsed),
    )?;
    Ok(format!(
        "gamma = 2, slope {slope:.4} ± {hw:.4} in {:.1?}",
        run.elapsed
    ))
}

fn criterion_5() -> Outcome {
    let g = algebra("sl3");
    let w = witness(&g, "e12", "flag-parabolic");
    ensure(
        w.n1.same_span(&Subspace::span(8, &[e(&g, 0, 2)])),
        "n1 != span(E13)",
    )?;
    ensure(w.gamma == Rat::from_int(3), format!("gamma {}", w.gamma))?;
    let mt = mt_report(&g, &w).map_err(|e| e.to_string())?;
    ensure(mt.structural, "structural M_t check fails")?;
    Ok(format!(
        "n1 = span(E13), gamma = 3, M_t bounded: {}",
        mt.holds()
    ))
}

fn criterion_6(run: &BinRun) -> Outcome {
    let (code, out) = run_cli(&[
        "bound",
        "--algebra",
        "catalog:sl2",
        "--subalgebra",
        "catalog:so2",
        "--theta",
        "catalog:theta-sl2",
        "--bound",
        "catalog:sl2-so2-bound",
    ]);
    ensure(code == 0, format!("bound exited {code}"))?;
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let two_rho = &report["payload"]["symmetric_exponent"];
    ensure(two_rho == "2", format!("2rho {two_rho}"))?;
    let (slope, hw) = slope_line(run)?;
    ensure(
        (slope - 2.0).abs() <= SLOPE_TOLERANCE,
        format!("slope {slope:.4}"),
    )?;
    let est: Vec<f64> = run
        .csv
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(1)?.parse().ok())
        .collect();
    ensure(est.len() == 9, format!("{} grid points in CSV", est.len()))?;
    let min = est.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(
        min >= BOUNDED_BELOW_FRACTION * est[0],
        format!("min {min:.4e} vs v(0) {:.4e}", est[0]),
    )?;
    ensure(run.code == 0, format!("estimate exited {}", run.code))?;
    ensure(run.elapsed < SPD2_BUDGET, format!("took {:?}", run.elapsed))?;
    Ok(format!(
        "2rho = 2, slope {slope:.4} ± {hw:.4}, min/v(0) = {:.3} in {:.1?}",
        min / est[0],
        run.elapsed
    ))
}

fn criterion_7() -> Outcome {
    let g = algebra("sl2");
    let w = witness(&g, "nE", "sl2-borel-parabolic");
    let grid: Vec<f64> = (0..=8).map(|k| -f64::from(k)).collect();
    let s = phi_jacobian_sandwich(&g, &w, 0.1, &grid, 4096, 7).map_err(|e| e.to_string())?;
    let mut bad = w.clone();
    bad.gamma = &bad.gamma + Rat::one();
    let c = phi_jacobian_sandwich(&g, &bad, 0.1, &grid, 4096, 7).map_err(|e| e.to_string())?;
    ensure(
        s.ratio_max_min <= SANDWICH_MAX_RATIO,
        format!("ratio {:.3}", s.ratio_max_min),
    )?;
    ensure(
        c.ratio_max_min > CORRUPTED_MIN_RATIO,
        format!("corrupted ratio {:.3}", c.ratio_max_min),
    )?;
    Ok(format!(
        "ratio {:.3}, with gamma + 1: {:.1}",
        s.ratio_max_min, c.ratio_max_min
    ))
}

fn criterion_8() -> Outcome {
    let c = chi_partial(&Sl2ModN, 10, 0.3, 2.0, 2.0, 20_000, 8).map_err(|e| e.to_string())?;
    let target = (-1f64).exp();
    let growth = (c.norms[9] - c.norms[5]) / c.norms[5];
    ensure(
        (c.tail_ratio - target).abs() <= TAIL_TOLERANCE,
        format!("tail ratio {:.4}", c.tail_ratio),
    )?;
    ensure(c.sup_value >= SUP_MIN, format!("sup {:.3}", c.sup_value))?;
    ensure(growth < NORM_GROWTH_MAX, format!("norm growth {growth:.4}"))?;
    Ok(format!(
        "tail ratio {:.4}, sup {:.1}, norm growth K=6..10 {:.2e}",
        c.tail_ratio, c.sup_value, growth
    ))
}

fn criterion_9(runs: &[(&str, &BinRun, BinRun)]) -> Outcome {
    for (name, one, four) in runs {
        ensure(!one.csv.is_empty(), format!("{name}: empty CSV"))?;
        ensure(
            one.csv == four.csv,
            format!("{name}: CSV differs between 1 and 4 threads"),
        )?;
    }
    Ok("mod-n and spd2 CSVs byte-identical under VAI_THREADS = 1 and 4".into())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    check_random(SELFCHECK_CASES, SEED)
        .map_err(|(i, inst, what)| format!("instance {i}: {what}\n{inst:?}"))?;
    Ok(format!(
        "{SELFCHECK_CASES} instances, zero failures in {:.1?}",
        start.elapsed()
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let mod_n = estimate_args("sl2-mod-n", "-4:0:0.5");
    let spd2 = estimate_args("spd2", "0:4:0.5");
    let mod_n_1 = run_bin(&mod_n, 1, "mod-n");
    let spd2_1 = run_bin(&spd2, 1, "spd2");

    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "verdict suite", guarded(criterion_1)),
        (2, "theta-certificate consistency", guarded(criterion_2)),
        (3, "Jacobson-Morozov triples", guarded(criterion_3)),
        (4, "decay on SL(2,R)/N", guarded(|| criterion_4(&mod_n_1))),
        (5, "SL(3,R)/exp(R E12) witness", guarded(criterion_5)),
        (
            6,
            "symmetric growth on SPD(2)",
            guarded(|| criterion_6(&spd2_1)),
        ),
        (7, "chart Jacobian sandwich", guarded(criterion_7)),
        (8, "unbounded L2 function", guarded(criterion_8)),
    ];
    let det = guarded(|| {
        let mod_n_4 = run_bin(&mod_n, 4, "mod-n");
        let spd2_4 = run_bin(&spd2, 4, "spd2");
        criterion_9(&[("sl2-mod-n", &mod_n_1, mod_n_4), ("spd2", &spd2_1, spd2_4)])
    });
    results.push((9, "thread-count determinism", det));
    results.push((10, "exact-layer property checks", guarded(criterion_10)));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n:>2} ({name}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n:>2} ({name}): {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
