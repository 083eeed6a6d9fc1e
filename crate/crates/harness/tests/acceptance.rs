//! Acceptance criteria AC1 to AC11. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use opjensen::{cli_entry, run_campaign, CampaignConfig, CampaignRun, DimSpec};
use opjensen_core::convex_catalog::{check_operator_convex, parse_function};
use opjensen_core::jensen_checks::{
    check_cfl, check_main_tracial, generate_trial, AblationResult, Branch, CheckInput, CheckName,
    HypothesisMode, TrialSpec,
};
use opjensen_core::linalg::random::{
    derive_seed, gaussian_matrix, random_density, random_hermitian, random_unitary, rng_from_seed,
};
use opjensen_core::linalg::{hermitian_eig, psd_sqrt, ComplexMatrix, HermitianMatrix, ToleranceConfig};
use opjensen_core::spectral_tools::{kaplansky_ranks, singular_value_function, support_projection};
use opjensen_core::tensor_ops::{BlockAlgebra, TensorSpace};

const SEED: u64 = 0x005e_edac;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn config(check: &str, trials: usize, seed: u64) -> CampaignConfig {
    let mut cfg: CampaignConfig = serde_json::from_str(r#"{"checks": ["check_cfl"], "trials": 1}"#).unwrap();
    cfg.checks = vec![check.into()];
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg
}

fn pairs(ds: &[usize]) -> Vec<DimSpec> {
    ds.iter().flat_map(|&a| ds.iter().map(move |&b| DimSpec::Pair(a, b))).collect()
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn run(cfg: &CampaignConfig) -> Result<CampaignRun, String> {
    run_campaign(cfg, None).map_err(|e| e.to_string())
}

fn count_param(run: &CampaignRun, key: &str, value: &str) -> usize {
    run.reports.iter().filter(|(_, r)| r.params.get(key).and_then(|v| v.as_str()) == Some(value)).count()
}

fn ac1() -> Result<Outcome, String> {
    let mut cfg = config("check_cfl", 5000, SEED);
    cfg.dims = pairs(&[2, 3, 4]);
    cfg.functions = strings(&["square", "abs", "quartic", "exp", "hinge:0"]);
    let start = Instant::now();
    let r = run(&cfg)?;
    let elapsed = start.elapsed();
    let s = &r.summary;
    Ok(outcome(
        s.total == 5000 && s.failed == 0 && elapsed < Duration::from_secs(60),
        format!("{} trials, {} violations, {:.2} s", s.total, s.failed, elapsed.as_secs_f64()),
    ))
}

fn ac2() -> Result<Outcome, String> {
    let ws = [0.3, 1.0, 2.5];
    let mut detail = Vec::new();
    let mut pass = true;
    for branch in [Branch::Normalized, Branch::Subnormalized] {
        let mut cfg = config("check_main_tracial", 2000, SEED + 1);
        cfg.dims = pairs(&[2, 3]);
        cfg.functions = strings(&["square", "abs", "quartic", "exp", "hinge:0"]);
        cfg.weights = ws.iter().flat_map(|&a| ws.iter().map(move |&b| (a, b))).collect();
        cfg.branches = vec![branch];
        let r = run(&cfg)?;
        pass &= r.summary.total == 2000 && r.summary.failed == 0 && count_param(&r, "branch", branch.as_str()) == 2000;
        detail.push(format!("{}: {}/{} pass", branch.as_str(), r.summary.passed, r.summary.total));
    }

    // a = ρ^{1/2} with unit weights against the CFL reports
    let tol = ToleranceConfig::default();
    let mut worst: f64 = 0.0;
    for t in 0..500u64 {
        let mut rng = rng_from_seed(derive_seed(SEED + 2, t));
        let (d1, d2) = (2 + (t % 3) as usize, 2 + (t / 3 % 2) as usize);
        let space = TensorSpace::new(d1, d2).map_err(|e| e.to_string())?;
        let f = parse_function(["square", "exp", "abs", "quartic"][t as usize % 4]).map_err(|e| e.to_string())?;
        let h = random_hermitian(d1 * d2, &mut rng).map_err(|e| e.to_string())?;
        let rho = random_density(d1, &mut rng).map_err(|e| e.to_string())?;
        let a = psd_sqrt(rho.as_hermitian()).map_err(|e| e.to_string())?.as_matrix().clone();
        let c = check_cfl(&h, &rho, &f, space, &tol).map_err(|e| e.to_string())?;
        let m = check_main_tracial(&h, &a, &f, space, (1.0, 1.0), Branch::Normalized, &tol)
            .map_err(|e| e.to_string())?;
        for (x, y) in [(c.lhs, m.lhs), (c.rhs, m.rhs)] {
            worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
        }
    }
    pass &= worst <= 1e-12;
    detail.push(format!("CFL match max rel diff {worst:.1e}"));
    Ok(outcome(pass, detail.join(", ")))
}

fn ac3() -> Result<Outcome, String> {
    let mut cfg = config("check_petz", 2000, SEED + 3);
    cfg.dims = vec![DimSpec::Pair(2, 2), DimSpec::Pair(3, 2), DimSpec::Pair(2, 3), DimSpec::Pair(3, 4)];
    cfg.functions = strings(&["square", "abs", "hinge:0", "exp", "shifted_square:-1", "power:1.5"]);
    cfg.map_kinds = strings(&["ucp_stinespring", "transpose", "pinching", "scaled_contractive", "zero"]);
    cfg.weights = vec![(1.0, 1.0), (0.3, 2.5)];
    let r = run(&cfg)?;
    let transpose = count_param(&r, "map_kind", "transpose");
    let contractive = count_param(&r, "map_kind", "scaled_contractive");
    let s = &r.summary;
    Ok(outcome(
        s.total == 2000 && s.failed == 0 && transpose > 0 && contractive > 0,
        format!(
            "{} trials ({transpose} transpose, {contractive} scaled contractive), {} violations",
            s.total, s.failed
        ),
    ))
}

fn ac4() -> Result<Outcome, String> {
    let dir = std::env::temp_dir().join(format!("opjensen-ac4-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut pass = true;
    let mut gaps = Vec::new();
    for n in 1..=4usize {
        let out = dir.join(format!("search-{n}.json"));
        let out_s = out.to_str().unwrap().to_string();
        let code = cli_entry(
            ["opjensen", "search", "--target", "petz_drop_f0", "--trials", "10", "--seed", "1", "--d2", &n.to_string(), "--out", &out_s],
            None,
        );
        let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let result: AblationResult = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let witness_ok = result.witness.as_ref().is_some_and(|w| {
            w.params.get("map_kind").and_then(|v| v.as_str()) == Some("zero")
                && (w.gap + n as f64).abs() <= 1e-12
        });
        let replay = cli_entry(["opjensen", "replay", "--witness", &out_s], None);
        pass &= code == 0 && replay == 0 && witness_ok && (result.max_violation + n as f64).abs() <= 1e-12;
        gaps.push(format!("n={n}: {}", result.max_violation));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(outcome(pass, format!("gaps {}", gaps.join(", "))))
}

fn ac5() -> Result<Outcome, String> {
    let mut cfg = config("check_vector_jensen", 10_000, SEED + 5);
    cfg.dims = pairs(&[2, 3, 4]);
    cfg.functions = strings(&["square", "abs", "quartic", "exp", "hinge:0", "shifted_square:-1", "inv"]);
    cfg.map_kinds = strings(&["ucp_stinespring", "transpose", "pinching", "scaled_contractive", "zero"]);
    let r = run(&cfg)?;
    let s = &r.summary;
    Ok(outcome(
        s.total == 10_000 && s.failed == 0,
        format!("{} trials, {} violations", s.total, s.failed),
    ))
}

fn ac6() -> Result<Outcome, String> {
    let mut cfg = config("check_pinching_chain", 1000, SEED + 6);
    cfg.dims = pairs(&[2, 3, 4]);
    cfg.functions = strings(&["shifted_square:-1"]);
    cfg.map_kinds = strings(&["ucp_stinespring", "transpose", "pinching"]);
    cfg.weights = vec![(1.0, 1.0), (0.3, 2.5)];
    let r = run(&cfg)?;
    let keys = ["preorder_positive", "preorder_negative", "trace_bookkeeping", "jordan_minimal"];
    let all_four = r.reports.iter().all(|(_, rep)| {
        keys.iter().all(|k| rep.params.get(*k).and_then(|v| v.as_bool()) == Some(true))
    });
    let s = &r.summary;
    let rate = s.resampled as f64 / s.total as f64;
    Ok(outcome(
        s.total == 1000 && s.failed == 0 && all_four && rate < 0.01,
        format!("{} trials, {} failures, all four assertions {all_four}, resample rate {:.2}%", s.total, s.failed, 100.0 * rate),
    ))
}

fn ac7() -> Result<Outcome, String> {
    let mut cfg = config("check_partial_trace_duality", 1000, SEED + 7);
    cfg.dims = pairs(&[1, 2, 3, 4]);
    cfg.weights = vec![(1.0, 1.0), (0.3, 2.5), (2.5, 0.3)];
    cfg.tolerances = ToleranceConfig { atol: 0.0, rtol: 1e-10, ..ToleranceConfig::default() };
    let r = run(&cfg)?;
    let nonunit = r.reports.iter().filter(|(_, rep)| rep.params["w1"] != 1.0).count();
    let worst = r
        .reports
        .iter()
        .map(|(_, rep)| (rep.lhs - rep.rhs).abs() / rep.lhs.abs().max(rep.rhs.abs()).max(1.0))
        .fold(0.0, f64::max);
    let s = &r.summary;
    Ok(outcome(
        s.total == 1000 && s.failed == 0 && worst <= 1e-10 && nonunit > 0,
        format!("{} trials ({nonunit} non-unit weights), max scaled |lhs - rhs| {worst:.1e}", s.total),
    ))
}

fn ac8() -> Result<Outcome, String> {
    let tol = ToleranceConfig::default();
    let functions = ["square", "power:1.5", "inv"];
    let dims = [(2, 2), (2, 3), (3, 2), (3, 3)];
    let (mut state_fail, mut hp_fail, mut unitary, mut mismatched) = (0, 0, 0, 0);
    for t in 0..1000usize {
        let f = parse_function(functions[t % 3]).map_err(|e| e.to_string())?;
        let (d1, d2) = dims[t / 3 % dims.len()];
        let seed = derive_seed(SEED + 8, t as u64);
        let state = TrialSpec::new(CheckName::StateVersion, d1, d2).with_function(f.clone());
        let hp = TrialSpec::new(CheckName::HansenPedersen, d1, d2).with_function(f);
        let s_in = generate_trial(&state, seed).map_err(|e| e.to_string())?;
        let h_in = generate_trial(&hp, seed).map_err(|e| e.to_string())?;
        match (&s_in, &h_in) {
            (CheckInput::StateVersion { h, a, .. }, CheckInput::HansenPedersen { h: h2, a: a2, .. }) => {
                if h != h2 || a != a2 {
                    mismatched += 1;
                }
                let gram = &a.adjoint() * a;
                if (&gram - &ComplexMatrix::identity(d1)).frobenius_norm() < 1e-9 {
                    unitary += 1;
                }
            }
            _ => return Err("unexpected trial kinds".into()),
        }
        state_fail += usize::from(!s_in.run(seed, &tol, HypothesisMode::Enforce).map_err(|e| e.to_string())?.pass);
        hp_fail += usize::from(!h_in.run(seed, &tol, HypothesisMode::Enforce).map_err(|e| e.to_string())?.pass);
    }
    Ok(outcome(
        state_fail == 0 && hp_fail == 0 && mismatched == 0 && unitary > 0,
        format!(
            "1000 shared instances ({unitary} unitary): state {state_fail} violations, Loewner {hp_fail} violations"
        ),
    ))
}

fn ac9() -> Result<Outcome, String> {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in ["quartic", "abs"] {
        let f = parse_function(name).map_err(|e| e.to_string())?;
        let found = check_operator_convex(&f, 2, 1000, SEED + 9).map_err(|e| e.to_string())?.found_violation();
        pass &= found;
        detail.push(format!("{name}: violation {found}"));
    }
    for name in ["square", "inv", "power:1.5"] {
        let f = parse_function(name).map_err(|e| e.to_string())?;
        let mut any = false;
        for dim in 2..=4 {
            any |= check_operator_convex(&f, dim, 1000, SEED + 9 + dim as u64)
                .map_err(|e| e.to_string())?
                .found_violation();
        }
        pass &= !any;
        detail.push(format!("{name}: violation {any}"));
    }
    Ok(outcome(pass, detail.join(", ")))
}

fn ac10() -> Result<Outcome, String> {
    let e = |e: opjensen_core::Error| e.to_string();
    let mut worst_eig: f64 = 0.0;
    for t in 0..1000u64 {
        let mut rng = rng_from_seed(derive_seed(SEED + 10, t));
        let dim = 1 + (t % 12) as usize;
        let m = random_hermitian(dim, &mut rng).map_err(e)?.as_matrix().scale(10f64.powi((t % 7) as i32 - 3));
        let m = HermitianMatrix::new(m).map_err(e)?;
        let spec = hermitian_eig(&m).map_err(e)?;
        let u = &spec.eigenvectors;
        let d = ComplexMatrix::diag_real(&spec.eigenvalues);
        let rebuilt = &(u * &d) * &u.adjoint();
        worst_eig = worst_eig.max((&rebuilt - m.as_matrix()).frobenius_norm() / m.frobenius_norm().max(f64::MIN_POSITIVE));
    }

    let mut worst_mu: f64 = 0.0;
    for t in 0..1000u64 {
        let mut rng = rng_from_seed(derive_seed(SEED + 11, t));
        let dims: Vec<usize> = (0..1 + t % 3).map(|k| 1 + ((t + k) % 3) as usize).collect();
        let weights: Vec<f64> = (0..dims.len()).map(|k| [0.3, 1.0, 2.5][(t as usize + k) % 3]).collect();
        let alg = BlockAlgebra::new(dims.clone(), weights.clone()).map_err(e)?;
        let blocks: Vec<ComplexMatrix> = dims.iter().map(|&n| gaussian_matrix(n, n, &mut rng)).collect();
        let x = alg.assemble(&blocks).map_err(e)?;
        let mu = singular_value_function(&x, &alg).map_err(e)?;
        // τ(|x|) = Σ_k w_k Tr (x_k* x_k)^{1/2}
        let mut tau_abs = 0.0;
        for (b, w) in blocks.iter().zip(&weights) {
            let gram = HermitianMatrix::new(&b.adjoint() * b).map_err(e)?;
            tau_abs += w * psd_sqrt(&gram).map_err(e)?.trace_re();
        }
        worst_mu = worst_mu.max((mu.integral() - tau_abs).abs() / tau_abs);
    }

    let mut kaplansky_ok = 0;
    for t in 0..1000u64 {
        let mut rng = rng_from_seed(derive_seed(SEED + 12, t));
        let n = 2 + (t % 6) as usize;
        let u = random_unitary(n, &mut rng).map_err(e)?;
        // p spans r columns of u; q spans c of them plus m - c generic vectors
        let r = 1 + (t as usize / 6) % n;
        let c = (t as usize / 7) % (r + 1);
        let m = (c + (t as usize / 11) % (n - r + 1)).max(c);
        let cols = |idx: &[usize]| ComplexMatrix::from_fn(n, idx.len(), |i, j| u[(i, idx[j])]);
        let p_basis = cols(&(0..r).collect::<Vec<_>>());
        let p = &p_basis * &p_basis.adjoint();
        let mut q_basis = ComplexMatrix::zeros(n, m);
        let shared = cols(&(0..c).collect::<Vec<_>>());
        q_basis.set_submatrix(0, 0, &shared);
        if m > c {
            q_basis.set_submatrix(0, c, &gaussian_matrix(n, m - c, &mut rng));
        }
        let q = support_projection(&(&q_basis * &q_basis.adjoint())).map_err(e)?;
        let ranks = kaplansky_ranks(&p, &q).map_err(e)?;
        // generic position: extra vectors of q meet p only when they must
        let join = (r + m - c).min(n);
        let expected_meet = r + m - join;
        if ranks.holds() && ranks.p == r && ranks.q == m && ranks.join == join && ranks.meet == expected_meet {
            kaplansky_ok += 1;
        }
    }

    Ok(outcome(
        worst_eig <= 1e-11 && worst_mu <= 1e-10 && kaplansky_ok == 1000,
        format!(
            "eig reconstruction {worst_eig:.1e}, mu_t integral {worst_mu:.1e}, Kaplansky {kaplansky_ok}/1000"
        ),
    ))
}

fn ac11() -> Result<Outcome, String> {
    let dir = std::env::temp_dir().join(format!("opjensen-ac11-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let a = dir.join("a.jsonl");
    let b = dir.join("b.jsonl");
    let ca = cli_entry(["opjensen", "campaign", "--jobs", "1", "--out", a.to_str().unwrap()], None);
    let cb = cli_entry(["opjensen", "campaign", "--jobs", "4", "--out", b.to_str().unwrap()], None);
    let (ba, bb) = (std::fs::read(&a).map_err(|e| e.to_string())?, std::fs::read(&b).map_err(|e| e.to_string())?);
    let lines = ba.iter().filter(|&&c| c == b'\n').count();
    let expected = CampaignConfig::default_campaign();
    let _ = std::fs::remove_dir_all(&dir);
    Ok(outcome(
        ca == 0 && cb == 0 && !ba.is_empty() && ba == bb && lines == expected.trials * expected.checks.len(),
        format!("{lines} lines, {} bytes, identical {}", ba.len(), ba == bb),
    ))
}

type Criterion = fn() -> Result<Outcome, String>;

fn main() -> ExitCode {
    let criteria: [(&str, &str, Criterion); 11] = [
        ("AC1", "CFL suite", ac1),
        ("AC2", "partial-trace inequality, both branches", ac2),
        ("AC3", "Petz inequality for positive maps", ac3),
        ("AC4", "zero-map negative control", ac4),
        ("AC5", "vector Jensen inequality", ac5),
        ("AC6", "spectral pre-order and pinching chain", ac6),
        ("AC7", "partial-trace duality", ac7),
        ("AC8", "state version and Loewner inequality", ac8),
        ("AC9", "operator-convexity discriminator", ac9),
        ("AC10", "numerics floor", ac10),
        ("AC11", "determinism of the default campaign", ac11),
    ];
    let mut failed = 0;
    for (id, title, f) in criteria {
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        failed += usize::from(!o.pass);
        println!(
            "{id} {} {title}: {} [{:.2} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
