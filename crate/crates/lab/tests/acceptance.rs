//! Acceptance suite: one test per criterion, each printing a single
//! `[k] name: PASS|FAIL` line. Tests are serialized so wall times are
//! meaningful on small machines.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use nsf_core::duhamel::{heat_flow, ForceKind, ForceMode, ForceSpec, QuadratureConfig};
use nsf_core::expansion::{expand, Bucket, DecompositionResult, Leaf, TermExpr, Tree};
use nsf_core::picard::{compute_uf, solve_nsf, SolverConfig};
use nsf_core::spaces::{besov_norm, BesovIndex};
use nsf_core::spectral::{geometric_times, random_divfree, uniform_times, Grid};
use nsf_lab::scenarios;
use nsf_lab::{RunStatus, ScenarioConfig};
use serde_json::Value;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

/// Runs a shipped config into a temp dir; returns the dir and summary.
fn run_config(name: &str) -> (tempfile::TempDir, RunStatus, Value) {
    let (cfg, bytes) = ScenarioConfig::load(&config_path(name)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let r = scenarios::run(&cfg, &bytes, dir.path()).unwrap();
    (dir, r.manifest.status, r.summary.unwrap())
}

fn num(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("summary field {key} missing: {v}"))
}

fn flag(v: &Value, key: &str) -> bool {
    v[key]
        .as_bool()
        .unwrap_or_else(|| panic!("summary field {key} missing: {v}"))
}

fn csv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.deserialize().map(|x| x.unwrap()).collect()
}

/// Prints the criterion line, then fails the test if any check failed.
fn report(k: usize, name: &str, start: Instant, budget: Duration, checks: &[(&str, bool)]) {
    let elapsed = start.elapsed();
    let mut failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if elapsed > budget {
        failed.push("runtime budget");
    }
    let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!(
        "[{k}] {name}: {verdict} ({:.1}s of {}s)",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    if !failed.is_empty() {
        line.push_str(&format!(" failed: {}", failed.join(", ")));
    }
    line.push('\n');
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(failed.is_empty(), "{line}");
}

#[test]
fn criterion_1_scaling_invariance() {
    let _g = serial();
    let start = Instant::now();
    let (dir, status, s) = run_config("scaling_invariance");
    let rows = csv_rows(&dir.path().join("scaling.csv"));
    let worst = rows
        .iter()
        .map(|r| r["rel_gap"].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    let ps: Vec<f64> = rows.iter().map(|r| r["p"].parse().unwrap()).collect();
    report(
        1,
        "critical-norm scaling invariance",
        start,
        Duration::from_secs(30),
        &[
            ("status ok", status == RunStatus::Ok),
            ("40 rows", rows.len() == 40),
            ("p in {4,6}", ps.contains(&4.0) && ps.contains(&6.0)),
            ("lambda = 2", num(&s, "lambda") == 2.0),
            ("rel gap <= 1e-10", worst <= 1e-10),
        ],
    );
}

#[test]
fn criterion_2_small_data_convergence() {
    let _g = serial();
    let start = Instant::now();
    let (dir, status, s) = run_config("small_data_global");
    let small = &s["small_data"];
    let lhs = num(small, "lhs");
    let lambda = num(&s, "lambda");
    let gamma = num(&s, "gamma");
    let x1 = num(&s, "x1_norm");
    let target = 0.8 * (1.0 - lambda).powi(2) / (4.0 * gamma);
    let iters = csv_rows(&dir.path().join("iterations.csv"));
    let ratios_from_3: Vec<f64> = iters
        .iter()
        .skip(2)
        .map(|r| r["ratio"].parse::<f64>().unwrap())
        .collect();
    report(
        2,
        "Picard small-data convergence",
        start,
        Duration::from_secs(180),
        &[
            ("status ok", status == RunStatus::Ok),
            ("L = 0", lambda == 0.0),
            ("x1 at 0.8 radius", (x1 - target).abs() <= 1e-9 * target),
            (
                "ratios <= 0.7 from iteration 3",
                ratios_from_3.iter().all(|r| *r <= 0.7),
            ),
            (
                "mild residual <= 1e-6",
                num(&s, "max_mild_residual") <= 1e-6,
            ),
            (
                "2 gamma |x| <= 1.05 (1 - lambda)",
                lhs <= 1.05 * (1.0 - lambda),
            ),
        ],
    );
}

#[test]
fn criterion_3_forced_pipeline() {
    let _g = serial();
    let start = Instant::now();
    let grid = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
    let times = uniform_times(10.0, 41).unwrap();
    let mut cfg = SolverConfig::new(4.0);
    cfg.quadrature = QuadratureConfig::trapezoid(2).unwrap();
    let mut force = ForceSpec::new(ForceKind::TimeIndependentModeSum {
        modes: vec![ForceMode {
            mode: [1, 0, 0],
            amplitude: [0.0, 0.02, 0.0],
        }],
    });
    let (_, stage) = compute_uf(&mut force.clone(), &grid, &times, &cfg).unwrap();
    let ratio = stage.weak_l3_sup / stage.y_norm.value;
    let u0 = random_divfree(&grid, 1.0, 4.0, 1.0, 5, true);
    let idx = BesovIndex::critical(4.0).unwrap();
    let u0 = u0.scaled(0.05 / besov_norm(&u0, &idx));
    let sol = solve_nsf(&u0, &mut force, &times, &cfg, None).unwrap();
    let max_res = sol.report.max_residual.unwrap_or(f64::INFINITY);
    // The gallery scenario runs the same bound over several forces.
    let (_, g_status, g) = run_config("force_gallery");
    report(
        3,
        "forced pipeline",
        start,
        Duration::from_secs(300),
        &[
            ("U_f converged", stage.report.converged()),
            (
                "y_norm positive and saturated",
                stage.y_norm.value > 0.0 && stage.y_norm.saturated,
            ),
            ("sup weakL3(U_f) <= 2.2 y_norm", ratio <= 2.2),
            ("solve_nsf converged", sol.report.converged()),
            (
                "mild residual <= 1e-6 at all samples",
                sol.report.residual.len() == times.len() && max_res <= 1e-6,
            ),
            (
                "gallery ok",
                g_status == RunStatus::Ok && flag(&g, "all_bounds_hold"),
            ),
        ],
    );
}

#[test]
fn criterion_4_heat_besov_decay() {
    let _g = serial();
    let start = Instant::now();
    let grid = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
    let dk = 2.0 * std::f64::consts::PI / grid.box_length();
    let t_decay = 50.0 / (grid.k_min() * grid.k_min());
    let times = geometric_times(1e-3, t_decay, 24).unwrap();
    let mut multiplier_err: f64 = 0.0;
    let mut monotone = true;
    let mut decayed = true;
    for p in [4.0, 6.0] {
        let idx = BesovIndex::critical(p).unwrap();
        for seed in 0..10u64 {
            let g = random_divfree(&grid, 1.0, 10.0, 0.5, 100 + seed, true);
            // Multiplier against exp(-|m|^2 dk^2 t) from the lattice index.
            let t = 0.037;
            let h = heat_flow(&g, t).unwrap();
            for idx_m in 0..grid.len() {
                let m = grid.lattice(idx_m);
                let k2 = ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64) * dk * dk;
                let mult = (-k2 * t).exp();
                let (a, b) = (g.coefficient(idx_m), h.coefficient(idx_m));
                for c in 0..3 {
                    if a[c].norm() > 0.0 {
                        multiplier_err = multiplier_err.max((b[c] / a[c] - mult).norm());
                    }
                }
            }
            let norms: Vec<f64> = times
                .iter()
                .map(|t| besov_norm(&heat_flow(&g, *t).unwrap(), &idx))
                .collect();
            monotone &= norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
            decayed &= *norms.last().unwrap() <= 1e-3 * norms[0];
        }
    }
    report(
        4,
        "heat-flow Besov decay",
        start,
        Duration::from_secs(60),
        &[
            ("multiplier exact to 1e-12", multiplier_err <= 1e-12),
            ("nonincreasing on geometric grid", monotone),
            ("<= 1e-3 of initial at t = 50/k_min^2", decayed),
        ],
    );
}

/// Each `v` leaf replaced by each of its four summands, as a flat list.
fn naive_subst(t: &Tree) -> Vec<Tree> {
    match t {
        Tree::Leaf(Leaf::V) => ["vl", "(B v v)", "(B w v)", "(B wbar v)"]
            .iter()
            .map(|s| Tree::parse(s).unwrap())
            .collect(),
        Tree::Leaf(_) => vec![t.clone()],
        Tree::B(a, b) => {
            let (xs, ys) = (naive_subst(a), naive_subst(b));
            xs.iter()
                .flat_map(|x| ys.iter().map(move |y| Tree::b(x.clone(), y.clone())))
                .collect()
        }
    }
}

fn multiset(d: &DecompositionResult, buckets: &[Bucket]) -> BTreeMap<String, i64> {
    let mut s = BTreeMap::new();
    for b in buckets {
        for t in d.terms(*b) {
            *s.entry(t.tree.to_string()).or_default() += t.coefficient;
        }
    }
    s
}

#[test]
fn criterion_5_decomposition() {
    let _g = serial();
    let start = Instant::now();
    let d3 = expand(3).unwrap();
    let golden_terms: [(Bucket, &[&str]); 3] = [
        (Bucket::H, &["1 vl", "1 (B vl vl)", "1 (B wbar vl)"]),
        (
            Bucket::W,
            &[
                "1 (B w v)",
                "1 (B wbar (B w v))",
                "2 (B vl (B w v))",
                "2 (B (B w v) (B v v))",
                "2 (B (B w v) (B wbar v))",
                "1 (B (B w v) (B w v))",
            ],
        ),
        (
            Bucket::Z,
            &[
                "2 (B vl (B v v))",
                "1 (B wbar (B v v))",
                "1 (B wbar (B wbar v))",
                "2 (B vl (B v wbar))",
                "2 (B (B v v) (B wbar v))",
                "1 (B (B v v) (B v v))",
                "1 (B (B wbar v) (B wbar v))",
            ],
        ),
    ];
    let golden = golden_terms.iter().all(|(b, lines)| {
        let want: BTreeMap<String, i64> = lines
            .iter()
            .map(|l| {
                let t = TermExpr::parse_line(l).unwrap();
                (t.tree.to_string(), t.coefficient)
            })
            .collect();
        multiset(&d3, &[*b]) == want
    });
    let mut conserved = true;
    for n in 2..5 {
        let d = expand(n).unwrap();
        let next = expand(n + 1).unwrap();
        let mut s = multiset(&d, &[Bucket::H, Bucket::W]);
        for t in d.terms(Bucket::Z) {
            for u in naive_subst(&t.tree) {
                *s.entry(u.to_string()).or_default() += t.coefficient;
            }
        }
        s.retain(|_, c| *c != 0);
        conserved &= s == multiset(&next, &[Bucket::H, Bucket::W, Bucket::Z]);
    }
    let (_, status, s) = run_config("decomposition_check");
    let residuals: Vec<f64> = s["residuals"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_f64().unwrap())
        .collect();
    report(
        5,
        "H/W/Z decomposition",
        start,
        Duration::from_secs(300),
        &[
            ("N = 3 counts 3/6/7", d3.counts() == [3, 6, 7]),
            ("N = 3 golden terms", golden),
            ("formal conservation up to N = 5", conserved),
            ("status ok", status == RunStatus::Ok),
            (
                "residual <= 1e-6 for N = 2, 3",
                residuals.len() == 2 && residuals.iter().all(|r| *r <= 1e-6),
            ),
        ],
    );
}

#[test]
fn criterion_6_weak_strong_coincidence() {
    let _g = serial();
    let start = Instant::now();
    let (cfg, _) = ScenarioConfig::load(&config_path("weak_strong_uniqueness")).unwrap();
    let (dir, status, s) = run_config("weak_strong_uniqueness");
    let rows = csv_rows(&dir.path().join("richardson.csv"));
    let gap = |k: usize| rows[k]["gap"].parse::<f64>().unwrap();
    let slope = (gap(0) / gap(1)).log2();
    let fine_rel = gap(2) / num(&s, "sup_u_L2");
    report(
        6,
        "weak-strong coincidence",
        start,
        Duration::from_secs(600),
        &[
            ("p = 4", cfg.p == 4.0),
            ("status ok", status == RunStatus::Ok),
            (
                "substeps 8/16/32",
                rows.iter()
                    .map(|r| r["substeps"].as_str())
                    .eq(["8", "16", "32"]),
            ),
            ("equal-substep gap <= 1e-6 sup |u|", fine_rel <= 1e-6),
            (
                "Richardson slope in [1.7, 2.3]",
                (1.7..=2.3).contains(&slope),
            ),
            ("trilinear bound holds", flag(&s, "trilinear_bound_holds")),
        ],
    );
}

#[test]
fn criterion_7_longtime_boundedness() {
    let _g = serial();
    let start = Instant::now();
    let (cfg, _) = ScenarioConfig::load(&config_path("longtime_calderon")).unwrap();
    let (dir, status, s) = run_config("longtime_calderon");
    let rows = csv_rows(&dir.path().join("longtime.csv"));
    let t_end: f64 = rows.last().unwrap()["t"].parse().unwrap();
    let weak: Vec<f64> = rows
        .iter()
        .map(|r| r["weakL3_uf"].parse().unwrap())
        .collect();
    let energy: Vec<f64> = rows
        .iter()
        .map(|r| r["L2_omega"].parse::<f64>().unwrap().powi(2))
        .collect();
    let i0 = s["peak_index"].as_u64().unwrap() as usize;
    let dominated = rows
        .iter()
        .zip(&energy)
        .skip(i0)
        .all(|(r, e)| r["gronwall_bound"].parse::<f64>().is_ok_and(|b| *e <= b));
    let m = num(&s, "empirical_M");
    report(
        7,
        "long-time boundedness",
        start,
        Duration::from_secs(900),
        &[
            (
                "32^3 to T = 10",
                cfg.grid.n == 32 && (t_end - 10.0).abs() < 1e-12,
            ),
            ("status ok", status == RunStatus::Ok),
            (
                "weakL3 curve bounded by finite M",
                m.is_finite() && weak.iter().all(|w| *w <= m),
            ),
            (
                "bump energy nonincreasing after peak",
                energy[i0..].windows(2).all(|w| w[1] <= w[0]),
            ),
            ("Gronwall curve dominates", dominated),
        ],
    );
}

#[test]
fn criterion_8_stability_ratios() {
    let _g = serial();
    let start = Instant::now();
    let (dir, status, _) = run_config("stability_perturbation");
    let rows = csv_rows(&dir.path().join("stability.csv"));
    let deltas: Vec<f64> = rows
        .iter()
        .map(|r| r["delta_rel"].parse().unwrap())
        .collect();
    let ratios: Vec<f64> = rows
        .iter()
        .filter_map(|r| r["ratio"].parse().ok())
        .collect();
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    report(
        8,
        "stability ratios",
        start,
        Duration::from_secs(900),
        &[
            ("status ok", status == RunStatus::Ok),
            ("deltas 1e-3, 1e-2, 1e-1", deltas == [1e-3, 1e-2, 1e-1]),
            ("three ratios", ratios.len() == 3),
            ("within a factor 2", hi <= 2.0 * lo),
        ],
    );
}

#[test]
fn criterion_9_nonconvergence_honesty() {
    let _g = serial();
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nsf-lab"))
        .arg("run")
        .arg(config_path("blowup_sweep"))
        .arg("--out")
        .arg(dir.path())
        .env("NSF_LAB_THREADS", "1")
        .output()
        .unwrap();
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let growth_path = dir.path().join("growth.csv");
    let growth = if growth_path.exists() {
        csv_rows(&growth_path)
    } else {
        vec![]
    };
    let last = growth.last();
    report(
        9,
        "non-convergence honesty",
        start,
        Duration::from_secs(300),
        &[
            ("scale 50", num(&summary, "scale") == 50.0),
            ("exit code 2", out.status.code() == Some(2)),
            (
                "manifest non_converged",
                manifest["status"] == "non_converged",
            ),
            ("flagged", flag(&summary, "flagged")),
            ("growth curve emitted", !growth.is_empty()),
            (
                "last point diverged or max_iters",
                last.is_some_and(|r| {
                    matches!(r["status"].as_str(), "diverged" | "max_iters")
                        && r["from_failed_solve"] == "true"
                }),
            ),
        ],
    );
}
