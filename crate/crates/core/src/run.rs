//! Batch runner: executes the configured checks in order and writes
//! `report.json` plus `bounds.csv`.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CheckName, RunConfig};
use crate::diagrams::{
    combinatorial_identities_check, completely_contracted, contraction_count, enumerate_contractions,
    evaluate_index_sum, evaluate_sweep, reidemeister_check, IdentityOracle, ZfWordOracle,
};
use crate::error::{Error, Result};
use crate::fock::perm::{all_perms, cocycle_tensor, compose, identity_perm, permute_tuple, reduced_word, ENTRY_CAP};
use crate::fock::perm::cocycle_tensor_word;
use crate::fock::zf::Strategy;
use crate::fock::fields::{commutator_residual_unchecked, wedge_commutator_residual};
use crate::fock::{project_pn, OrbitSpace, StateSum, ZfEngine, ZfExpr};
use crate::intertwiner::{gamma_bounds, intertwiner_report, split_epsilon_rho};
use crate::linalg::{flip, max_abs, norm2, CMat};
use crate::nuclearity::{
    antisym_trace, bound_report, elementary_symmetric, pauli_crossover, pauli_ratio, r_kernel, sign_flip_spectra,
    smin_and_series, BoundInputs,
};
use crate::report::{render_report, write_csv, Node, Provenance, Section};
use crate::smatrix::axioms::{interior_points, sample_pairs};
use crate::smatrix::sigma::sigma_coefficients;
use crate::smatrix::{analyticity_residual, check_axioms, comp, norm_kappa, symmetry_unitaries, ModelKind, SMatrixModel};
use crate::smatrix::ScatteringFn;
use crate::C64;

use Provenance::{Enumeration, Formula, Quadrature, SampledSup};

/// Cauchy-Riemann residuals carry the `O(h²)` difference error.
pub const ANALYTICITY_TOL: f64 = 1e-6;
/// The wrong-wedge control must stay above this.
pub const CONTROL_FLOOR: f64 = 1e-3;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Caps the rayon pool at `ZLAB_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("ZLAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("ZLAB_THREADS={v:?} is not a positive integer")))?;
    // A pool built earlier in the process wins; that is fine for tests.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub struct CheckOutcome {
    pub passed: bool,
    pub section: Section,
    pub csv: Option<(String, Vec<&'static str>, Vec<Vec<Option<f64>>>)>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: String,
    pub report_path: Option<PathBuf>,
    pub results: Vec<(CheckName, bool)>,
}

fn timestamp() -> String {
    let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", now.as_secs(), now.subsec_millis())
}

fn metadata(runtimes: &[(CheckName, f64)]) -> Section {
    let mut m = Section::new();
    m.text("timestamp_unix", timestamp()).text("version", env!("CARGO_PKG_VERSION"));
    let mut t = Section::new();
    for (c, secs) in runtimes {
        t.num(c.as_str(), *secs, Formula);
    }
    m.child("runtime_seconds", t);
    m
}

fn write_out(config: &RunConfig, report: &str, csvs: &[(String, Vec<&'static str>, Vec<Vec<Option<f64>>>)]) -> Result<PathBuf> {
    let dir = &config.output.dir;
    std::fs::create_dir_all(dir)?;
    let path = dir.join("report.json");
    std::fs::write(&path, report)?;
    if config.output.csv {
        for (name, header, rows) in csvs {
            write_csv(&dir.join(name), header, rows)?;
        }
    }
    Ok(path)
}

/// Runs every configured check; never panics on bad input.
pub fn run(config: &RunConfig) -> RunOutcome {
    let mut body = Section::new();
    let model = match config.validate() {
        Ok(m) => m,
        Err(e) => {
            body.text("config_error", e.to_string()).int("exit_code", EXIT_CONFIG as usize, Enumeration);
            body.flag("passed", false);
            let report = render_report(&body, &metadata(&[]));
            let report_path = write_out(config, &report, &[]).ok();
            return RunOutcome { exit_code: EXIT_CONFIG, report, report_path, results: Vec::new() };
        }
    };
    let mut run = Section::new();
    run.text("model", model.label())
        .text("spectrum", model.spectrum().fingerprint())
        .int("seed", config.seed as usize, Enumeration)
        .num("kappa", model.kappa(), Formula)
        .set("order", Node::strs(&config.checks.iter().map(|c| c.as_str()).collect::<Vec<_>>()));
    let mut tol = Section::new();
    for &c in &config.checks {
        tol.num(c.as_str(), config.tolerance(c), Formula);
    }
    run.child("tolerances", tol);
    body.child("run", run);

    let mut checks = Section::new();
    let mut results = Vec::new();
    let mut runtimes = Vec::new();
    let mut csvs = Vec::new();
    let mut exit_code = EXIT_PASS;
    for &check in &config.checks {
        let start = Instant::now();
        let outcome = run_check(check, config, &model);
        runtimes.push((check, start.elapsed().as_secs_f64()));
        let (passed, mut section) = match outcome {
            Ok(o) => {
                if let Some(c) = o.csv {
                    csvs.push(c);
                }
                (o.passed, o.section)
            }
            Err(e) => {
                let mut s = Section::new();
                s.text("error", e.to_string());
                if matches!(e, Error::Config(_) | Error::Model(_) | Error::Spectrum(_)) {
                    exit_code = EXIT_CONFIG;
                }
                (false, s)
            }
        };
        section.flag("passed", passed).num("tolerance", config.tolerance(check), Formula);
        if !passed && exit_code == EXIT_PASS {
            exit_code = EXIT_FAIL;
        }
        checks.child(check.as_str(), section);
        results.push((check, passed));
    }
    body.child("checks", checks);
    body.int("exit_code", exit_code as usize, Enumeration).flag("passed", exit_code == EXIT_PASS);
    let report = render_report(&body, &metadata(&runtimes));
    let report_path = match write_out(config, &report, &csvs) {
        Ok(p) => Some(p),
        Err(e) => {
            eprintln!("could not write the report: {e}");
            exit_code = EXIT_CONFIG;
            None
        }
    };
    RunOutcome { exit_code, report, report_path, results }
}

pub fn run_check(check: CheckName, config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    match check {
        CheckName::Axioms => axioms_check(config, model),
        CheckName::Fock => fock_check(config, model),
        CheckName::Diagrams => diagrams_check(config, model),
        CheckName::Bounds => bounds_check(config, model),
        CheckName::Smin => smin_check(config, model),
        CheckName::Intertwiner => intertwiner_check(config, model),
        CheckName::Wedge => wedge_check(config, model),
    }
}

fn outcome(passed: bool, section: Section) -> Result<CheckOutcome> {
    Ok(CheckOutcome { passed, section, csv: None })
}

fn axioms_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let g = &config.grids;
    let tol = config.tolerance(CheckName::Axioms);
    let samples = sample_pairs(config.seed, g.axiom_samples, g.sample_range);
    let gauge = symmetry_unitaries(model, config.seed.wrapping_add(1), 3);
    let rep = check_axioms(model, &samples, &gauge)?;
    let mut s = Section::new();
    let mut res = Section::new();
    for r in &rep.residuals {
        let mut a = Section::new();
        a.num("residual", r.residual, SampledSup).flag("skipped", r.skipped);
        if let Some((t, tp)) = r.argmax {
            a.set("argmax", Node::nums(&[t, tp], Formula));
        }
        res.child(&r.axiom, a);
    }
    s.child("residuals", res).int("samples", samples.len(), Enumeration);
    let analytic = analyticity_residual(model, &interior_points(config.seed, 50, model.kappa()))?;
    s.num("analyticity_residual", analytic, SampledSup);
    let nk = norm_kappa(model, g.norm_resolution)?;
    let mut n = Section::new();
    n.num("value", nk.value, SampledSup)
        .num("boundary_max", nk.boundary_max, SampledSup)
        .num("interior_max", nk.interior_max, SampledSup)
        .set("re_range", Node::nums(&[nk.re_range.0, nk.re_range.1], Formula))
        .int("resolution", nk.resolution, Enumeration)
        .text("kappa_status", "declared, validated by sampling");
    s.child("norm_kappa", n);
    if let ModelKind::SigmaModelON { n, .. } = model.kind() {
        let mut crossed: f64 = 0.0;
        for &(t, _) in &samples {
            let s3 = sigma_coefficients(*n, C64::new(t, 0.0))?[2];
            let s1 = sigma_coefficients(*n, C64::new(-t, PI))?[0];
            crossed = crossed.max((s3 - s1).norm());
        }
        let s0 = model.eval_real(0.0)?;
        let d = model.dim_k();
        let minus_flip = max_abs(&(&s0 + flip(d)));
        let minus_one = max_abs(&(&s0 + CMat::identity(d * d, d * d)));
        let mut si = Section::new();
        si.num("sigma3_vs_crossed_sigma1", crossed, SampledSup)
            .num("s0_plus_flip", minus_flip, Formula)
            .num("s0_plus_identity", minus_one, Formula)
            .flag("s0_is_minus_flip", minus_flip <= 1e-8)
            .text(
                "note",
                "the axiomatic layout has S(0) = −1; the printed layout has S(0) = −F but breaks Yang-Baxter and crossing",
            );
        s.child("sigma_identities", si);
    }
    let passed = rep.max_residual() <= tol && analytic <= ANALYTICITY_TOL;
    outcome(passed, s)
}

fn random_thetas(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let distinct = (0..n).all(|i| (i + 1..n).all(|j| (th[i] - th[j]).abs() > 1e-3));
        if distinct {
            return th;
        }
    }
}

fn random_expr(rng: &mut ChaCha8Rng, d: usize, atoms: &[f64], len: usize) -> ZfExpr {
    let mut e = ZfExpr::new();
    for _ in 0..len {
        let a = rng.gen_range(0..d);
        let t = *atoms.choose(rng).expect("atoms are nonempty");
        e = if rng.gen_bool(0.45) { e.annihilate(a, t) } else { e.create(a, t) };
    }
    e
}

/// Largest deviation from the three exchange relations on random tails.
pub fn exchange_residual(model: &SMatrixModel, seed: u64, trials: usize) -> Result<f64> {
    let e = ZfEngine::new(model)?;
    let d = model.dim_k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = [-0.9, 0.15, 1.2];
    let mut worst: f64 = 0.0;
    let sum = |terms: Vec<(C64, ZfExpr)>| -> Result<StateSum> {
        let mut acc = StateSum::default();
        for (x, expr) in terms {
            acc = acc.plus(&e.normal_order(&expr)?.scale(x));
        }
        Ok(acc)
    };
    for trial in 0..trials {
        let (a, b) = (rng.gen_range(0..d), rng.gen_range(0..d));
        let (t, tp) = if trial % 3 == 2 { (0.15, 0.15) } else { (0.4, -0.7) };
        let s = model.eval_real(t - tp)?;
        let sm = model.eval_real(tp - t)?;
        let tail = random_expr(&mut rng, d, &atoms, 2);
        let lhs = e.normal_order(&ZfExpr::new().create(a, t).create(b, tp).then(&tail))?;
        let mut terms = Vec::new();
        for g in 0..d {
            for h in 0..d {
                terms.push((comp(&s, d, g, h, a, b), ZfExpr::new().create(g, tp).create(h, t).then(&tail)));
            }
        }
        worst = worst.max(lhs.distance(&sum(terms)?));
        let tail = ZfExpr::creators(&[(t, rng.gen_range(0..d)), (tp, rng.gen_range(0..d))]);
        let lhs = e.normal_order(&ZfExpr::new().annihilate(a, t).annihilate(b, tp).then(&tail))?;
        let mut terms = Vec::new();
        for g in 0..d {
            for h in 0..d {
                terms.push((comp(&s, d, b, a, h, g), ZfExpr::new().annihilate(g, tp).annihilate(h, t).then(&tail)));
            }
        }
        worst = worst.max(lhs.distance(&sum(terms)?));
        let tail = ZfExpr::creators(&[(atoms[rng.gen_range(0..3)], rng.gen_range(0..d))]);
        let lhs = e.normal_order(&ZfExpr::new().annihilate(a, t).create(b, tp).then(&tail))?;
        let mut terms = Vec::new();
        for g in 0..d {
            for h in 0..d {
                terms.push((comp(&sm, d, a, g, b, h), ZfExpr::new().create(g, tp).annihilate(h, t).then(&tail)));
            }
        }
        if a == b && t == tp {
            terms.push((C64::new(1.0, 0.0), tail.clone()));
        }
        worst = worst.max(lhs.distance(&sum(terms)?));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfluenceSummary {
    pub expressions: usize,
    pub identical: usize,
    pub max_distance: f64,
}

/// Leftmost against rightmost rewriting on random expressions.
pub fn confluence_suite(model: &SMatrixModel, seed: u64, count: usize) -> Result<ConfluenceSummary> {
    let e = ZfEngine::new(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = [-1.1, -0.2, 0.35, 1.4];
    let mut identical = 0;
    let mut max_distance: f64 = 0.0;
    for _ in 0..count {
        let len = rng.gen_range(1..=5);
        let expr = random_expr(&mut rng, model.dim_k(), &atoms, len);
        let l = e.normal_order_with(&expr, Strategy::Leftmost)?;
        let r = e.normal_order_with(&expr, Strategy::Rightmost)?;
        if l.canonical_string() == r.canonical_string() {
            identical += 1;
        }
        max_distance = max_distance.max(l.distance(&r));
    }
    Ok(ConfluenceSummary { expressions: count, identical, max_distance })
}

fn fock_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let g = &config.grids;
    let tol = config.tolerance(CheckName::Fock);
    let d = model.dim_k();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 2..=g.fock_n_max {
        let (mut words, mut hom, mut idem, mut adj): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..g.fock_samples {
            let th = random_thetas(&mut rng, n);
            for p in all_perms(n) {
                let a = cocycle_tensor_word(model, &reduced_word(&p, true), &th, ENTRY_CAP)?;
                let b = cocycle_tensor_word(model, &reduced_word(&p, false), &th, ENTRY_CAP)?;
                words = words.max(max_abs(&(a - b)));
            }
            let mut p = identity_perm(n);
            p.shuffle(&mut rng);
            let mut q = identity_perm(n);
            q.shuffle(&mut rng);
            let lhs = cocycle_tensor(model, &compose(&p, &q), &th)?;
            let rhs = cocycle_tensor(model, &p, &th)? * cocycle_tensor(model, &q, &permute_tuple(&th, &p))?;
            hom = hom.max(max_abs(&(lhs - rhs)));
        }
        let th = random_thetas(&mut rng, n);
        let space = OrbitSpace::new(model, &th)?;
        idem = idem.max(space.idempotence_residual());
        adj = adj.max(space.self_adjoint_residual());
        worst = worst.max(words).max(hom).max(idem).max(adj);
        let mut r = Section::new();
        r.int("n", n, Enumeration)
            .num("reduced_words", words, SampledSup)
            .num("homomorphism", hom, SampledSup)
            .num("idempotence", idem, SampledSup)
            .num("self_adjoint", adj, SampledSup);
        rows.push(r.into_node());
    }
    let mut s = Section::new();
    s.set("per_n", Node::List(rows));
    let s0 = model.eval_real(0.0)?;
    let mut pauli = Section::new();
    if max_abs(&(&s0 + flip(d))) <= 1e-12 {
        let v: Vec<C64> = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let vv: Vec<C64> = v.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let r = norm2(&project_pn(model, &[0.9, 0.9], &vv)?);
        pauli.num("residual", r, Formula).flag("applicable", true);
        worst = worst.max(r);
    } else {
        pauli.flag("applicable", false).text("note", "S(0) ≠ −F");
    }
    s.child("pauli", pauli);
    let conf = confluence_suite(model, config.seed, g.confluence_expressions)?;
    let mut c = Section::new();
    c.int("expressions", conf.expressions, Enumeration)
        .int("identical_canonical_forms", conf.identical, Enumeration)
        .num("max_coefficient_distance", conf.max_distance, SampledSup);
    s.child("confluence", c);
    let exch = exchange_residual(model, config.seed, 12)?;
    s.num("exchange_relations", exch, SampledSup);
    s.text("convention", "δ(θ−θ′) is the Kronecker symbol on rapidity atoms; equal-atom pairings are convention-dependent");
    worst = worst.max(conf.max_distance).max(exch);
    s.num("max_residual", worst, SampledSup);
    outcome(worst <= tol, s)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn random_word(rng: &mut ChaCha8Rng, d: usize, len: usize) -> ZfExpr {
    let mut atoms = vec![-1.1, -0.2, 0.35, 1.4];
    atoms.shuffle(rng);
    let mut e = ZfExpr::new();
    for &t in &atoms[..len] {
        let a = rng.gen_range(0..d);
        e = if rng.gen_bool(0.3) { e.annihilate(a, t) } else { e.create(a, t) };
    }
    e
}

fn all_tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
    (0..d.pow(n as u32))
        .map(|mut i| {
            let mut v = vec![0; n];
            for slot in (0..n).rev() {
                v[slot] = i % d;
                i /= d;
            }
            v
        })
        .collect()
}

/// `max |⟨A⟩^con_{n,0}(θ, α) − √n!(AΩ)_n(θ, α)|` over the support of `AΩ`,
/// with the right side computed both from `AΩ` and from `conj⟨Ω, A*ψ⟩`.
pub fn vacuum_side_residual(model: &SMatrixModel, word: &ZfExpr, n_max: usize) -> Result<(f64, usize)> {
    let e = ZfEngine::new(model)?;
    let o = ZfWordOracle { engine: &e, word: word.clone() };
    let omega = o.on_vacuum()?;
    let d = model.dim_k();
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    let mut supports: Vec<Vec<f64>> = omega.terms().iter().map(|t| t.word.iter().map(|w| w.0).collect()).collect();
    supports.sort_by(|a, b| a.partial_cmp(b).expect("finite atoms"));
    supports.dedup();
    for th in supports.iter().filter(|th| !th.is_empty() && th.len() <= n_max) {
        for al in all_tuples(d, th.len()) {
            let w: Vec<(f64, usize)> = th.iter().copied().zip(al.iter().copied()).collect();
            let mut expect = C64::new(0.0, 0.0);
            for t in e.word_state(&w)?.terms() {
                expect += t.coefficient.conj() * omega.coefficient(&t.word);
            }
            let through_adjoint = o.element_conjugated(&[], &w)?;
            let got = completely_contracted(model, th.len(), 0, &o, th, &al)?;
            worst = worst.max((got - expect).norm()).max((got - through_adjoint).norm());
            evaluated += 1;
        }
    }
    Ok((worst, evaluated))
}

fn diagrams_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let g = &config.grids;
    let tol = config.tolerance(CheckName::Diagrams);
    let d = model.dim_k();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut s = Section::new();
    let mut passed = true;

    let mut count_mismatch = 0;
    let mut counts = Vec::new();
    for n in 0..=g.combinatorial_n_max {
        for k in 0..=n {
            let listed = enumerate_contractions(n, k)?.len();
            let closed: f64 = (0..=k.min(n - k)).map(|j| binomial(k, j) * binomial(n - k, j) * binomial(j, j) * (1..=j).product::<usize>() as f64).sum();
            if listed as f64 != closed || listed as u128 != contraction_count(n, k) {
                count_mismatch += 1;
            }
            let mut c = Section::new();
            c.int("n", n, Enumeration).int("k", k, Enumeration).int("contractions", listed, Enumeration);
            counts.push(c.into_node());
        }
    }
    s.set("contraction_counts", Node::List(counts)).int("count_mismatches", count_mismatch, Enumeration);
    passed &= count_mismatch == 0;

    let mut ident = Vec::new();
    for n in 1..=g.combinatorial_n_max {
        let r = combinatorial_identities_check(n)?;
        passed &= r.passed();
        let mut c = Section::new();
        c.int("n", n, Enumeration)
            .num("bound", r.bound, Formula)
            .num("max_factorial_sum", r.max_factorial_sum, Enumeration)
            .int("partitions_checked", r.partitions_checked, Enumeration)
            .set("violations", Node::strs(&r.violations))
            .flag("passed", r.passed());
        ident.push(c.into_node());
    }
    s.set("combinatorial_identities", Node::List(ident));

    let mut oracle_worst: f64 = 0.0;
    let mut evaluated = 0;
    for i in 0..g.diagram_words {
        let len = 1 + i % 3;
        let word = random_word(&mut rng, d, len);
        let (w, c) = vacuum_side_residual(model, &word, g.diagrams_n_max)?;
        oracle_worst = oracle_worst.max(w);
        evaluated += c;
    }
    let mut o = Section::new();
    o.num("max_residual", oracle_worst, SampledSup).int("components", evaluated, Enumeration);
    s.child("vacuum_side_equivalence", o);
    passed &= oracle_worst <= tol;

    let e = ZfEngine::new(model)?;
    let id = IdentityOracle { engine: &e };
    let (mut eval_diff, mut identity_part): (f64, f64) = (0.0, 0.0);
    for n in 2..=g.diagrams_n_max.min(4) {
        let th = random_thetas(&mut rng, n);
        let al: Vec<usize> = (0..n).map(|_| rng.gen_range(0..d)).collect();
        for k in 1..n {
            for c in enumerate_contractions(n, k)? {
                let a = evaluate_index_sum(model, &c, &id, &th, &al, None)?;
                let b = evaluate_sweep(model, &c, &id, &th, &al, None)?;
                eval_diff = eval_diff.max((a - b).norm());
            }
            if n % 2 == 0 {
                identity_part = identity_part.max(completely_contracted(model, n, k, &id, &th, &al)?.norm());
            }
        }
    }
    let reid = reidemeister_check(model, config.seed, g.reidemeister_samples)?;
    let mut ev = Section::new();
    ev.num("index_sum_vs_sweep", eval_diff, SampledSup)
        .num("identity_operator_connected_part", identity_part, SampledSup)
        .num("reidemeister_two", reid.type_two, SampledSup)
        .num("reidemeister_three", reid.type_three, SampledSup)
        .num("alternative_embeddings", reid.embeddings, SampledSup);
    s.child("evaluation", ev);
    passed &= eval_diff.max(identity_part).max(reid.max_residual()) <= tol;
    outcome(passed, s)
}

/// `(γ, γ̃)` for models with a diagonal S-matrix; the flip counts as
/// diagonal with constant coefficients.
pub fn intertwiner_constants(model: &SMatrixModel, resolution: usize) -> Result<(f64, f64)> {
    let coeffs = match model.kind() {
        ModelKind::ConstantFlip { sign } => {
            let d = model.dim_k();
            split_epsilon_rho(&vec![vec![ScatteringFn::constant(*sign); d]; d], model.kappa())?
        }
        ModelKind::Diagonal { .. } => crate::intertwiner::DiagonalCoefficients::from_model(model)?,
        ModelKind::SigmaModelON { .. } => {
            return Err(Error::Precondition(
                "no intertwiner constants for the sigma model; supply γ, γ̃ through a user candidate".into(),
            ))
        }
    };
    let g = gamma_bounds(&coeffs, resolution)?;
    Ok((g.gamma, g.gamma_tilde))
}

fn bound_inputs(config: &RunConfig, model: &SMatrixModel) -> Result<(BoundInputs, Option<String>)> {
    let inputs = BoundInputs::from_model(model, config.grids.norm_resolution)?;
    Ok(match intertwiner_constants(model, config.grids.gamma_resolution) {
        Ok((g, gt)) => (inputs.with_intertwiner(g, gt), None),
        Err(e) => (inputs, Some(e.to_string())),
    })
}

fn bounds_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let g = &config.grids;
    let tol = config.tolerance(CheckName::Bounds);
    let (inputs, missing) = bound_inputs(config, model)?;
    let provisional = bound_report(&inputs, 1.0, 0)?;
    let s_val = g.bounds_s.unwrap_or(provisional.s_min.map_or(1.0, |m| 2.0 * m));
    let rep = bound_report(&inputs, s_val, g.bounds_n_max)?;
    let mut s = Section::new();
    let mut inp = Section::new();
    inp.num("mass_gap", inputs.mass_gap, Formula)
        .int("dim_k", inputs.dim_k, Enumeration)
        .num("kappa", inputs.kappa, Formula)
        .num("s_norm", inputs.s_norm, SampledSup);
    if let (Some(ga), Some(gt)) = (inputs.gamma, inputs.gamma_tilde) {
        inp.num("gamma", ga, SampledSup).num("gamma_tilde", gt, Formula);
    }
    if let Some(m) = &missing {
        inp.text("intertwiner_constants", m.clone());
    }
    s.child("inputs", inp).num("s", s_val, Formula);
    let mut c = Section::new();
    c.num("c1", rep.constants.c1, Formula).num("c2", rep.constants.c2, Formula).num("c3", rep.constants.c3, Formula);
    if let Some(p) = rep.constants.c2_pauli {
        c.num("c2_pauli", p, Formula);
    }
    c.set("derivation", Node::strs(&rep.constants.derivation));
    s.child("constants", c);
    if let Some(m) = rep.s_min {
        s.num("s_min", m, Formula);
    }
    if let Some(v) = &rep.verdict {
        s.text("verdict", v.clone());
    }
    s.set("notes", Node::strs(&rep.notes));

    let mut ok = true;
    let mut table = Vec::new();
    let mut csv_rows = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for r in &rep.rows {
        let vals = [Some(r.upsilon), Some(r.x1), Some(r.xi1), r.xi1_pauli, r.partial_sum];
        ok &= vals.iter().flatten().all(|v| v.is_finite() && *v >= 0.0);
        ok &= r.xi1 <= r.upsilon * r.x1 * (1.0 + 1e-12);
        if let (Some(p), Ok(f)) = (r.xi1_pauli, inputs.pauli_factor()) {
            let expect = pauli_ratio(f, r.n);
            worst_ratio = worst_ratio.max((p / r.xi1_corollary - expect).abs() / expect);
        }
        let mut row = Section::new();
        row.int("n", r.n, Enumeration)
            .num("upsilon", r.upsilon, Formula)
            .num("X1", r.x1, Formula)
            .num("Xi1", r.xi1, Formula)
            .num("Xi1_corollary", r.xi1_corollary, Formula);
        if let Some(p) = r.xi1_pauli {
            row.num("Xi1_pauli", p, Formula);
        }
        if let Some(p) = r.partial_sum {
            row.num("partial_sum", p, Formula);
        }
        table.push(row.into_node());
        csv_rows.push([vec![Some(r.n as f64)], vals.to_vec()].concat());
    }
    s.set("table", Node::List(table)).num("pauli_ratio_relative_error", worst_ratio, Formula);
    ok &= worst_ratio <= 4.0 * f64::EPSILON;
    if inputs.pauli_factor().is_ok() {
        match pauli_crossover(&inputs, s_val, g.bounds_n_max)? {
            Some(n0) => s.int("pauli_crossover_n0", n0, Enumeration),
            None => s.text("pauli_crossover_n0", "none up to n_max"),
        };
    }

    let mut kernels = Vec::new();
    for case in &g.kernel_cases {
        let r = r_kernel(&case.profile, case.b, &g.kernel, 1e-6)?;
        let (a, b) = sign_flip_spectra(&case.profile, case.b, &g.kernel)?;
        let flip_diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let trace_err = (r.trace - r.exact_trace_norm).abs();
        ok &= trace_err <= 1e-6 && r.min_eigenvalue >= -1e-8 && flip_diff <= 1e-8;
        let mut k = Section::new();
        k.num("b", r.b, Formula)
            .num("trace", r.trace, Quadrature)
            .num("refined_trace", r.refined_trace, Quadrature)
            .num("exact_trace_norm", r.exact_trace_norm, Formula)
            .num("min_eigenvalue", r.min_eigenvalue, Quadrature)
            .num("eigen_trace", r.eigen_trace, Quadrature)
            .num("sign_flip_spectral_difference", flip_diff, Quadrature)
            .text("profile", serde_json::to_string(&case.profile)?);
        kernels.push(k.into_node());
    }
    s.set("r_kernel", Node::List(kernels));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst_gap = f64::INFINITY;
    for _ in 0..100 {
        let dim = rng.gen_range(2..=6);
        let b = CMat::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let z = &b * b.adjoint();
        let n = rng.gen_range(1..=dim);
        let en = antisym_trace(&z, n)?;
        let lambda: Vec<f64> = crate::linalg::hermitian_eigenvalues(&z).into_iter().map(|x| x.max(0.0)).collect();
        let direct = elementary_symmetric(&lambda, n);
        ok &= (en - direct).abs() <= 1e-9 * direct.max(1.0);
        worst_gap = worst_gap.min(pauli_ratio(z.trace().re, n) - en);
    }
    s.num("antisymmetric_trace_min_slack", worst_gap, Formula);
    ok &= worst_gap >= -tol;
    let header = vec!["n", "upsilon", "X1", "Xi1", "Xi1_pauli", "partial_sum"];
    Ok(CheckOutcome { passed: ok, section: s, csv: Some(("bounds.csv".to_string(), header, csv_rows)) })
}

fn smin_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let g = &config.grids;
    let tol = config.tolerance(CheckName::Smin);
    let (inputs, missing) = bound_inputs(config, model)?;
    if let Some(m) = missing {
        return Err(Error::Precondition(format!("s_min needs intertwiner constants: {m}")));
    }
    let base = smin_and_series(&inputs, &[], tol)?;
    let s_values = if g.smin_s_values.is_empty() { vec![2.0 * base.s_min] } else { g.smin_s_values.clone() };
    let rep = smin_and_series(&inputs, &s_values, tol)?;
    let mut fine_cfg = config.clone();
    fine_cfg.grids.norm_resolution = 2 * g.norm_resolution - 1;
    let (fine_inputs, _) = bound_inputs(&fine_cfg, model)?;
    let fine = smin_and_series(&fine_inputs, &[], tol)?;
    let stability = (fine.s_min - rep.s_min).abs() / rep.s_min;
    let mut s = Section::new();
    s.num("s_min", rep.s_min, Formula)
        .num("s_min_refined_norm", fine.s_min, Formula)
        .num("relative_change_under_refinement", stability, Formula)
        .num("c2", rep.constants.c2, Formula)
        .num("c3", rep.constants.c3, Formula)
        .num("pauli_factor", inputs.pauli_factor()?, SampledSup)
        .set("derivation", Node::strs(&rep.constants.derivation));
    let mut ok = rep.s_min.is_finite() && rep.s_min > 0.0 && stability <= 1e-3;
    let mut series = Vec::new();
    for sr in &rep.series {
        let mut x = Section::new();
        x.num("s", sr.s, Formula)
            .num("ratio", sr.ratio, Formula)
            .text("verdict", sr.verdict())
            .int("terms", sr.terms.len(), Enumeration)
            .num("last_partial_sum", *sr.partial_sums.last().expect("series has a first term"), Formula);
        if let Some(t) = sr.tail_bound {
            x.num("tail_bound", t, Formula);
        }
        if sr.s > rep.s_min {
            ok &= sr.convergent && sr.tail_bound.is_some_and(|t| t < tol);
            ok &= sr.partial_sums.windows(2).all(|w| w[1] >= w[0]);
        }
        series.push(x.into_node());
    }
    s.set("series", Node::List(series));
    outcome(ok, s)
}

fn intertwiner_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let g = &config.grids;
    let tol = config.tolerance(CheckName::Intertwiner);
    let rep = intertwiner_report(model, g.intertwiner_n_max, g.intertwiner_samples, config.seed, g.gamma_resolution, tol)?;
    let mut s = Section::new();
    s.num("gamma", rep.gamma.gamma, SampledSup)
        .num("gamma_refined", rep.gamma.refined_gamma, SampledSup)
        .num("gamma_tilde", rep.gamma.gamma_tilde, Formula)
        .num("intertwining_residual", rep.max_residual, SampledSup)
        .num("subspace_residual", rep.max_subspace_residual, SampledSup)
        .num("unitarity_defect", rep.max_unitarity_defect, SampledSup)
        .num("norm_over_gamma_power", rep.max_norm_ratio, SampledSup)
        .flag("symmetric", rep.symmetric);
    let mut items = Section::new();
    items
        .flag("analytic_bounded", rep.passed_bound)
        .flag("boundary_inverse_bounded", rep.passed_inverse)
        .flag("intertwines", rep.passed_intertwining);
    s.child("items", items);
    if let Some(m) = &rep.message {
        s.text("message", m.clone());
    }
    outcome(rep.passed_bound && rep.passed_inverse && rep.passed_intertwining, s)
}

fn norms_section(n: &crate::fock::fields::CommutatorNorms) -> Section {
    let mut s = Section::new();
    s.num("n0", n.n0, Quadrature).num("n2", n.n2, Quadrature).num("scale", n.scale, Quadrature);
    s
}

fn wedge_check(config: &RunConfig, model: &SMatrixModel) -> Result<CheckOutcome> {
    let w = &config.grids.wedge;
    let tol = config.tolerance(CheckName::Wedge);
    let r = wedge_commutator_residual(model, &w.f, &w.g, w.shift, w.rapidity)?;
    let mut s = Section::new();
    s.child("coarse", norms_section(&r.coarse))
        .child("fine", norms_section(&r.fine))
        .num("resolution_delta", r.resolution_delta, Quadrature)
        .num("fourier_quadrature_delta", r.quad_delta, Quadrature)
        .num("max_residual", r.max_residual(), Quadrature);
    let mut ok = r.max_residual() <= tol && r.resolution_delta <= tol;
    if let Some([cf, cg]) = &w.control {
        let c = commutator_residual_unchecked(model, cf, cg, w.rapidity)?;
        let mut cs = Section::new();
        cs.num("n0", c.coarse.n0, Quadrature).num("floor", CONTROL_FLOOR, Formula);
        s.child("control_same_wedge", cs);
        ok &= c.coarse.n0 > CONTROL_FLOOR;
    }
    outcome(ok, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn quick(checks: &[CheckName], model: &str) -> RunConfig {
        let mut cfg = RunConfig::from_json(model).unwrap();
        cfg.checks = checks.to_vec();
        cfg.grids.axiom_samples = 20;
        cfg.grids.norm_resolution = 201;
        cfg.grids.combinatorial_n_max = 5;
        cfg.grids.diagram_words = 3;
        cfg.grids.fock_samples = 2;
        cfg.grids.confluence_expressions = 30;
        cfg.output.dir = tempfile::tempdir().unwrap().keep();
        cfg
    }

    #[test]
    fn flip_axioms_exit_zero() {
        let cfg = quick(&[CheckName::Axioms], r#"{"spectrum":{"dim_k":2,"masses":[1,1]},"model":{"kind":"flip","sign":1}}"#);
        let out = run(&cfg);
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.report);
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        for (_, r) in v["checks"]["axioms"]["residuals"].as_object().unwrap() {
            assert_eq!(r["residual"]["value"], 0.0);
        }
    }

    #[test]
    fn sigma_axioms_and_diagrams() {
        let cfg = quick(&[CheckName::Axioms, CheckName::Diagrams], r#"{"model":{"kind":"sigma_on","N":3}}"#);
        let out = run(&cfg);
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.report);
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        let crossing = v["checks"]["axioms"]["residuals"]["crossing"]["residual"]["value"].as_f64().unwrap();
        assert!(crossing <= 1e-8);
        assert_eq!(v["checks"]["axioms"]["sigma_identities"]["s0_is_minus_flip"], false);
    }

    #[test]
    fn non_symmetric_intertwiner_fails() {
        let cfg = quick(
            &[CheckName::Intertwiner],
            r#"{"spectrum":{"dim_k":2,"masses":[1,1]},
                "model":{"kind":"diagonal","kappa":0.6,"omega":[[{"type":"const","value":-1},{"type":"sinh_blaschke","B":0.4,"sign":1}],
                                              [{"type":"const","value":-1},{"type":"const","value":-1}]]}}"#,
        );
        let out = run(&cfg);
        assert_eq!(out.exit_code, EXIT_FAIL);
        assert!(out.report.contains("symmetry precondition violated"));
    }

    #[test]
    fn config_errors_exit_two() {
        let mut cfg = quick(&[CheckName::Axioms], r#"{"model":{"kind":"flip","sign":1}}"#);
        let out = run(&cfg);
        assert_eq!(out.exit_code, EXIT_CONFIG);
        assert!(out.report_path.unwrap().exists());
        cfg.grids.fock_n_max = 9;
        assert_eq!(run(&cfg).exit_code, EXIT_CONFIG);
    }

    #[test]
    fn scalar_fermion_fock_and_smin() {
        let cfg = quick(&[CheckName::Fock, CheckName::Smin], "{}");
        let out = run(&cfg);
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.report);
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        assert_eq!(v["checks"]["fock"]["pauli"]["applicable"], true);
    }

    #[test]
    fn exchange_and_confluence_on_charged_model() {
        let spec = crate::spectrum::ParticleSpectrum::new(vec![1.0, 1.0], vec![1, 0], None).unwrap();
        let w = ScatteringFn::sinh_blaschke(0.4, 1.0);
        let m = SMatrixModel::diagonal(spec, vec![vec![w; 2]; 2], None).unwrap();
        assert!(exchange_residual(&m, 3, 9).unwrap() <= 1e-12);
        let c = confluence_suite(&m, 4, 40).unwrap();
        assert!(c.max_distance <= 1e-11);
        let sg = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        assert!(exchange_residual(&sg, 5, 6).unwrap() <= 1e-12);
    }
}
