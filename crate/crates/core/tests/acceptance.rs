//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::Instant;

use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::*;
use drl_core::algebra::{Constraint, ConstraintSet, Inequality, LinearExpr, Var};
use drl_core::analysis::metrics;
use drl_core::compiler::{compile, cp_resolve, CompileConfig, CompileError, CompiledLayer};
use drl_core::lang::{load_constraints, NormalizationConfig};
use drl_core::refiner::{Provenance, RefineConfig, RefineResult, Refiner};

const TAU: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Bitwise idempotence/identity tallies collected over every suite.
#[derive(Default)]
struct Stability {
    idempotence_checks: usize,
    identity_checks: usize,
    failures: Vec<String>,
}

impl Stability {
    fn observe(&mut self, refiner: &Refiner, set: &ConstraintSet, x: &[f64], r: &RefineResult, cfg: &RefineConfig) {
        self.idempotence_checks += 1;
        match refiner.refine(&r.refined, cfg) {
            Ok(rr) if bits(&rr.refined) == bits(&r.refined) => {}
            other => self.failures.push(format!("idempotence at {x:?}: {other:?}")),
        }
        let exact: Vec<Q> = x.iter().map(|&v| qf(v)).collect();
        if holds_all(set.constraints(), &exact) {
            self.identity_checks += 1;
            if bits(&r.refined) != bits(x) {
                self.failures.push(format!("identity at {x:?} -> {:?}", r.refined));
            }
        }
    }
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn cfg() -> RefineConfig {
    RefineConfig { tau: TAU, ..RefineConfig::default() }
}

fn golden() -> Outcome {
    let start = Instant::now();
    let (_, set) = load_constraints(
        "vars: x1, x2, x3, x4, x5\nx5 >= x1\nx5 <= x2 or x5 >= x3\nx5 <= x4\n",
        None,
        &NormalizationConfig::default(),
    )
    .unwrap();
    let layer = compile(&set, &given_order(5), eps(), &CompileConfig::default()).unwrap();
    let mut expected = vec![
        Constraint::single(ineq(&[(3, 1), (0, -1)], 0)).unwrap(),
        Constraint::build([ineq(&[(1, 1), (0, -1)], 0), ineq(&[(3, 1), (2, -1)], 0)]).unwrap(),
    ];
    expected.sort();
    let mut pi4 = layer.level(3).to_vec();
    pi4.sort();
    let chain_ok = pi4 == expected && (0..3).all(|i| layer.level(i).is_empty()) && layer.is_sat();

    let refiner = Refiner::new(&layer).unwrap();
    let cases = [(0.0, 1.0), (2.5, 2.0), (3.2, 4.0), (5.0, 5.0), (7.0, 6.0)];
    let mut refine_ok = true;
    for (v, want) in cases {
        let r = refiner.refine(&[1.0, 2.0, 4.0, 6.0, v], &cfg()).unwrap();
        refine_ok &= bits(&r.refined) == bits(&[1.0, 2.0, 4.0, 6.0, want]);
    }
    let r = refiner.refine(&[1.0, 2.0, 4.0, 6.0, 5.0], &cfg()).unwrap();
    refine_ok &= r.provenance.iter().all(|p| *p == Provenance::Kept || *p == Provenance::Free);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        chain_ok && refine_ok && secs < 1.0,
        format!("chain {chain_ok}, refinements {refine_ok}, {secs:.3}s (< 1 s)"),
    )
}

/// Refines `samples`, checking the result set and feeding `stab`.
fn refine_all(
    layer: &CompiledLayer,
    set: &ConstraintSet,
    samples: &[Vec<f64>],
    stab: &mut Stability,
) -> Result<Vec<RefineResult>, String> {
    let refiner = Refiner::new(layer).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(samples.len());
    for x in samples {
        let r = refiner.refine(x, &cfg()).map_err(|e| format!("{e} at {x:?}"))?;
        stab.observe(&refiner, set, x, &r, &cfg());
        out.push(r);
    }
    Ok(out)
}

fn zero_violation(stab: &mut Stability) -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0x5eed_0001);
    let (mut sets, mut rows, mut snapped, mut worst) = (0usize, 0usize, 0usize, 0.0f64);
    let mut errors = Vec::new();
    while sets < 200 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=10);
        let (set, point) = planted_set(&mut rng, d, n, 3);
        let order = if sets % 2 == 0 { given_order(d) } else { random_order(&mut rng, d) };
        let layer = match compile(&set, &order, eps(), &CompileConfig::default()) {
            Ok(l) => l,
            Err(e) => {
                errors.push(format!("compile: {e}"));
                sets += 1;
                continue;
            }
        };
        let mut samples: Vec<Vec<f64>> = (0..1000).map(|_| uniform_sample(&mut rng, d, -10.0, 10.0)).collect();
        samples[0] = point.iter().map(|p| p.to_string().parse::<f64>().unwrap()).collect();
        match refine_all(&layer, &set, &samples, stab) {
            Ok(res) => {
                let refined: Vec<Vec<f64>> = res.iter().map(|r| r.refined.clone()).collect();
                snapped += res.iter().flat_map(|r| &r.provenance).filter(|p| p.is_snapped()).count();
                let m = metrics(&set, &refined, TAU).unwrap();
                worst = worst.max(m.cvr);
                rows += refined.len();
            }
            Err(e) => errors.push(e),
        }
        sets += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        errors.is_empty() && worst == 0.0 && secs < 300.0,
        format!(
            "{sets} sets, {rows} samples, {snapped} snapped values, max CVR {worst}, {} errors{}, {secs:.1}s (< 300 s)",
            errors.len(),
            errors.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}

/// Constraints loosened by `tau` in every disjunct: the refiner's own notion
/// of satisfaction.
fn loosened(cs: &[Constraint]) -> Vec<Constraint> {
    let t = qr(1, 1_000_000_000);
    cs.iter()
        .filter_map(|c| {
            Constraint::build(c.disjuncts().iter().map(|d| {
                let e = d.expr();
                Inequality::new(LinearExpr::from_terms(e.terms().map(|(v, c)| (v, c.clone())), e.bias() + &t))
            }))
        })
        .collect()
}

fn optimality(stab: &mut Stability) -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0x5eed_0002);
    let (mut checks, mut worst_gap) = (0usize, f64::NEG_INFINITY);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=6);
        let (set, _) = planted_set(&mut rng, d, n, 3);
        let order = random_order(&mut rng, d);
        let layer = compile_default(&set, &order);
        let samples: Vec<Vec<f64>> = (0..4).map(|_| uniform_sample(&mut rng, d, -10.0, 10.0)).collect();
        let res = match refine_all(&layer, &set, &samples, stab) {
            Ok(r) => r,
            Err(e) => {
                failures.push(e);
                continue;
            }
        };
        let cs = loosened(set.constraints());
        for (x, r) in samples.iter().zip(&res) {
            let mut fixed: Vec<Option<Q>> = vec![None; d];
            for &v in &order {
                let target = qf(x[v]);
                let got = (qf(r.refined[v]) - &target).abs();
                match nearest_feasible(&cs, &fixed, v, &target) {
                    Some(best) => {
                        let gap = to_f(&(got - best));
                        worst_gap = worst_gap.max(gap);
                        if gap > 1e-6 {
                            failures.push(format!(
                                "x{} of {x:?}: refined {:?} is {gap} farther than optimal",
                                v + 1,
                                r.refined
                            ));
                        }
                    }
                    None => {
                        failures.push(format!("no feasible extension for x{} after prefix of {:?}", v + 1, r.refined))
                    }
                }
                checks += 1;
                fixed[v] = Some(qf(r.refined[v]));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 600.0,
        format!(
            "50 instances, {checks} coordinate checks, worst excess distance {worst_gap:.3e} (limit 1e-6, exact vertex candidates; one 1e-2 grid step allowed), {} failures{}, {secs:.1}s (< 600 s)",
            failures.len(),
            failures.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}

fn to_f(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

fn pivot_constraint(rng: &mut ChaCha8Rng, d: usize, var: Var, positive: bool) -> Option<Constraint> {
    let mut ds = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let base = random_ineq(rng, d, 10);
        let w = rng.gen_range(1..=5) * if positive { 1 } else { -1 };
        let terms = base.expr().terms().filter(|&(v, _)| v != var).map(|(v, c)| (v, c.clone())).chain([(var, q(w))]);
        ds.push(Inequality::new(LinearExpr::from_terms(terms, base.expr().bias().clone())));
    }
    for _ in 0..rng.gen_range(0..=1) {
        let base = random_ineq(rng, d, 10);
        let terms: Vec<_> = base.expr().terms().filter(|&(v, _)| v != var).map(|(v, c)| (v, c.clone())).collect();
        if !terms.is_empty() {
            ds.push(Inequality::new(LinearExpr::from_terms(terms, base.expr().bias().clone())));
        }
    }
    Constraint::build(ds)
}

fn resolution_properties() -> Outcome {
    let start = Instant::now();
    // soundness of CP resolution
    let mut rng = rng(0x5eed_0003);
    let (mut premise_points, mut sound_failures) = (0usize, 0usize);
    while premise_points < 100_000 {
        let d = rng.gen_range(1..=4);
        let var = rng.gen_range(0..d);
        let (Some(psi), Some(other)) =
            (pivot_constraint(&mut rng, d, var, true), pivot_constraint(&mut rng, d, var, false))
        else {
            continue;
        };
        if psi.occurrences(var) != (true, false) || !other.occurrences(var).1 {
            continue;
        }
        let concl = cp_resolve(&psi, &other, var).unwrap();
        if concl.as_ref().is_some_and(|c| c.mentions(var)) {
            sound_failures += 1;
        }
        for _ in 0..200 {
            let p: Vec<Q> = (0..d).map(|_| qr(rng.gen_range(-40..=40), 4)).collect();
            if holds(&psi, &p) && holds(&other, &p) {
                premise_points += 1;
                if concl.as_ref().is_some_and(|c| !holds(c, &p)) {
                    sound_failures += 1;
                }
            }
        }
    }

    // extendibility: exact prefixes of satisfying the chain always extend
    let mut rng = rng_from(0x5eed_0004);
    let budget = CompileConfig { max_resolvents: 50_000 };
    let (mut pairs, mut empty, mut over_budget) = (0usize, 0usize, 0usize);
    while pairs < 1000 {
        let d = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=8);
        let (set, _) = planted_set(&mut rng, d, n, 3);
        let order = random_order(&mut rng, d);
        let layer = match compile(&set, &order, eps(), &budget) {
            Ok(layer) => layer,
            Err(CompileError::ResolventBudget { .. }) => {
                over_budget += 1;
                continue;
            }
            Err(e) => panic!("compile: {e}"),
        };
        let mut fixed: Vec<Option<Q>> = vec![None; d];
        for (i, &v) in order.iter().enumerate() {
            let target = qr(rng.gen_range(-80..=80), 8);
            pairs += 1;
            match univariate_pick(layer.level(i), &fixed, v, &target) {
                Some(t) => fixed[v] = Some(t),
                None => {
                    empty += 1;
                    break;
                }
            }
        }
        if fixed.iter().all(Option::is_some) {
            let full: Vec<Q> = fixed.into_iter().map(Option::unwrap).collect();
            if !holds_all(set.constraints(), &full) {
                empty += 1;
            }
        }
    }

    // refutational completeness on crafted sets
    let mut rng = rng_from(0x5eed_0005);
    let (mut unsat_ok, mut sat_ok, mut disagreements) = (0usize, 0usize, Vec::new());
    for i in 0..100 {
        let want_sat = i % 2 == 1;
        let text = crafted(&mut rng, want_sat);
        let (_, set) = load_constraints(&text, None, &NormalizationConfig::default()).unwrap();
        let order = random_order(&mut rng, set.dimension());
        let layer = compile_default(&set, &order);
        let oracle = exact_sat(&set);
        if layer.is_sat() == want_sat && oracle == want_sat {
            if want_sat {
                sat_ok += 1;
            } else {
                unsat_ok += 1;
            }
        } else {
            disagreements.push(format!("{text:?}: compiler {} oracle {oracle}", layer.is_sat()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        sound_failures == 0 && empty == 0 && unsat_ok == 50 && sat_ok == 50,
        format!(
            "soundness {premise_points} points / {sound_failures} violations; extendibility {pairs} pairs / {empty} empty ({over_budget} sets over a 50000-resolvent budget skipped); completeness {unsat_ok}/50 unsat, {sat_ok}/50 sat{}; {secs:.1}s",
            disagreements.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    common::rng(seed)
}

/// Three-variable sets whose contradiction runs through a disjunction;
/// `sat` gives the matching control with the gap closed.
fn crafted(rng: &mut ChaCha8Rng, sat: bool) -> String {
    use rand::seq::SliceRandom;
    let mut names = ["a", "b", "c"];
    names.shuffle(rng);
    let [u, v, w] = names;
    let p = rng.gen_range(-5..=5);
    let (q1, q2) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let s = rng.gen_range(1..=4);
    let mut lines = vec!["vars: a, b, c".to_string()];
    match rng.gen_range(0..3) {
        0 => {
            let gap = if sat { 0 } else { 1 };
            lines.push(format!("{s}*{u} >= {}", s * p));
            lines.push(format!("{v} - {u} >= {q1} or {s}*{w} - {s}*{u} >= {}", s * q2));
            lines.push(format!("{v} <= {}", p + q1 - gap));
            lines.push(format!("2*{w} <= {}", 2 * (p + q2) - gap));
        }
        1 => {
            let bound = 2 * p + q1.min(q2) - if sat { 0 } else { 1 };
            lines.push(format!("{u} >= {p} and {v} >= {p} and {w} >= {p}"));
            lines.push(format!("{v} >= {u} + {q1} or {w} >= {u} + {q2}"));
            lines.push(format!("{v} + {w} <= {bound}"));
        }
        _ => {
            let cmp = if sat { ">=" } else { ">" };
            lines.push(format!("{u} {cmp} {p}"));
            lines.push(format!("{v} >= {u} or not ({w} < {u})"));
            lines.push(format!("{v} <= {p} and {w} <= {p}"));
        }
    }
    lines.join("\n") + "\n"
}

fn jacobian(stab: &mut Stability) -> Outcome {
    let start = Instant::now();
    let mut rng = rng(0x5eed_0006);
    let h = 1e-5;
    let (mut pairs, mut attempts, mut worst) = (0usize, 0usize, 0.0f64);
    let mut nontrivial_rows = 0usize;
    while pairs < 500 && attempts < 200_000 {
        attempts += 1;
        let d = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=8);
        let (set, _) = planted_set(&mut rng, d, n, 3);
        let order = random_order(&mut rng, d);
        let layer = compile_default(&set, &order);
        let refiner = Refiner::new(&layer).unwrap();
        let x = uniform_sample(&mut rng, d, -10.0, 10.0);
        let r = refiner.refine_with_jacobian(&x, &cfg()).unwrap();
        stab.observe(&refiner, &set, &x, &r, &cfg());
        if !r.provenance.iter().any(|p| p.is_snapped()) {
            continue;
        }
        // away from branch switches: same provenance within 10h on every axis
        let mut stable = true;
        let mut fd = vec![0.0; d * d];
        for j in 0..d {
            for step in [h, -h, 10.0 * h, -10.0 * h] {
                let mut y = x.clone();
                y[j] += step;
                stable &= refiner.refine(&y, &cfg()).unwrap().provenance == r.provenance;
            }
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let rp = refiner.refine(&xp, &cfg()).unwrap().refined;
            let rm = refiner.refine(&xm, &cfg()).unwrap().refined;
            for i in 0..d {
                fd[i * d + j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        if !stable {
            continue;
        }
        let an = r.jacobian.as_ref().unwrap();
        for i in 0..d {
            let row = &an[i * d..(i + 1) * d];
            if row.iter().enumerate().any(|(j, &v)| v != if i == j { 1.0 } else { 0.0 }) {
                nontrivial_rows += 1;
            }
            for j in 0..d {
                worst = worst.max(rel_err(an[i * d + j], fd[i * d + j]));
            }
        }
        pairs += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pairs == 500 && worst <= 1e-4,
        format!(
            "{pairs} pairs ({nontrivial_rows} non-identity rows), max relative error {worst:.2e} (<= 1e-4), {secs:.1}s"
        ),
    )
}

fn stability(stab: &Stability) -> Outcome {
    outcome(
        stab.failures.is_empty() && stab.identity_checks > 0,
        format!(
            "{} idempotence checks, {} identity checks, {} failures{}",
            stab.idempotence_checks,
            stab.identity_checks,
            stab.failures.len(),
            stab.failures.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}

fn throughput() -> Outcome {
    let mut rng = rng(0x5eed_0007);
    let d = 20;
    let (set, _) = planted_set(&mut rng, d, 13, 3);
    let t0 = Instant::now();
    let layer = compile_default(&set, &given_order(d));
    let compile_secs = t0.elapsed().as_secs_f64();
    let refiner = Refiner::new(&layer).unwrap();
    let samples: Vec<Vec<f64>> = (0..1000).map(|_| uniform_sample(&mut rng, d, -10.0, 10.0)).collect();
    let t1 = Instant::now();
    let mut refined = Vec::with_capacity(samples.len());
    for x in &samples {
        refined.push(refiner.refine(x, &cfg()).unwrap().refined);
    }
    let secs = t1.elapsed().as_secs_f64();
    let cvr = metrics(&set, &refined, TAU).unwrap().cvr;
    outcome(
        secs <= 1.0 && cvr == 0.0,
        format!(
            "1000 samples, D = 20, 13 constraints: {secs:.4}s single-threaded (<= 1.0 s), compile {compile_secs:.3}s, CVR {cvr}"
        ),
    )
}

fn report(name: &str, o: Outcome, failed: &mut usize) {
    println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    *failed += usize::from(!o.pass);
}

fn main() {
    let mut stab = Stability::default();
    let mut failed = 0;
    report("golden example", golden(), &mut failed);
    report("zero-violation guarantee", zero_violation(&mut stab), &mut failed);
    report("sequential optimality", optimality(&mut stab), &mut failed);
    report("resolution properties", resolution_properties(), &mut failed);
    report("jacobian", jacobian(&mut stab), &mut failed);
    report("idempotence and identity", stability(&stab), &mut failed);
    report("throughput", throughput(), &mut failed);
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
