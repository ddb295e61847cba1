//! Generators and exact oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use drl_core::algebra::{Constraint, ConstraintSet, Inequality, LinearExpr, Var};
use drl_core::compiler::{compile, CompileConfig, CompiledLayer};

pub type Q = BigRational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qf(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

pub fn eps() -> Q {
    qr(1, 1_000_000)
}

pub fn ineq(terms: &[(Var, i64)], bias: i64) -> Inequality {
    Inequality::new(LinearExpr::from_terms(terms.iter().map(|&(v, c)| (v, q(c))), q(bias)))
}

/// Value of a disjunct's expression at an exact point.
pub fn value(d: &Inequality, point: &[Q]) -> Q {
    let mut acc = d.expr().bias().clone();
    for (v, c) in d.expr().terms() {
        acc += c * &point[v];
    }
    acc
}

pub fn holds(c: &Constraint, point: &[Q]) -> bool {
    c.disjuncts().iter().any(|d| !value(d, point).is_negative())
}

pub fn holds_all(cs: &[Constraint], point: &[Q]) -> bool {
    cs.iter().all(|c| holds(c, point))
}

/// Random disjunct with integer coefficients in `[-5, 5]` over 1..=3
/// variables and bias in `[-bias, bias]`.
pub fn random_ineq(rng: &mut ChaCha8Rng, d: usize, bias: i64) -> Inequality {
    loop {
        let k = rng.gen_range(1..=d.min(3));
        let mut terms = Vec::new();
        for _ in 0..k {
            let v = rng.gen_range(0..d);
            let c = rng.gen_range(-5..=5);
            terms.push((v, c));
        }
        let e = LinearExpr::from_terms(terms.iter().map(|&(v, c)| (v, q(c))), q(rng.gen_range(-bias..=bias)));
        if !e.is_constant() {
            return Inequality::new(e);
        }
    }
}

/// A constraint of `k` disjuncts, one of which is shifted to hold at
/// `point` when given.
pub fn random_constraint(rng: &mut ChaCha8Rng, d: usize, k: usize, point: Option<&[Q]>) -> Constraint {
    loop {
        let mut ds: Vec<Inequality> = (0..k).map(|_| random_ineq(rng, d, 10)).collect();
        if let Some(p) = point {
            let j = rng.gen_range(0..k);
            let v = value(&ds[j], p);
            if v.is_negative() {
                let slack = q(rng.gen_range(0..=3));
                let e = ds[j].expr();
                let shifted = LinearExpr::from_terms(e.terms().map(|(v, c)| (v, c.clone())), e.bias() - v + slack);
                ds[j] = Inequality::new(shifted);
            }
        }
        if let Some(c) = Constraint::build(ds) {
            return c;
        }
    }
}

/// Satisfiable by construction: every constraint holds at a random
/// integer point of `[-5, 5]^d`.
pub fn planted_set(rng: &mut ChaCha8Rng, d: usize, n: usize, k_max: usize) -> (ConstraintSet, Vec<Q>) {
    let point: Vec<Q> = (0..d).map(|_| q(rng.gen_range(-5..=5))).collect();
    let cs: Vec<Constraint> = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=k_max);
            random_constraint(rng, d, k, Some(&point))
        })
        .collect();
    assert!(holds_all(&cs, &point));
    (ConstraintSet::new(d, cs).unwrap(), point)
}

pub fn free_set(rng: &mut ChaCha8Rng, d: usize, n: usize, k_max: usize) -> ConstraintSet {
    let cs: Vec<Constraint> = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=k_max);
            random_constraint(rng, d, k, None)
        })
        .collect();
    ConstraintSet::new(d, cs).unwrap()
}

pub fn given_order(d: usize) -> Vec<Var> {
    (0..d).collect()
}

pub fn random_order(rng: &mut ChaCha8Rng, d: usize) -> Vec<Var> {
    use rand::seq::SliceRandom;
    let mut o = given_order(d);
    o.shuffle(rng);
    o
}

pub fn compile_default(set: &ConstraintSet, order: &[Var]) -> CompiledLayer {
    compile(set, order, eps(), &CompileConfig::default()).expect("compiles")
}

pub fn uniform_sample(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(lo..hi)).collect()
}

// ---------------------------------------------------------------------------
// Exact feasibility by vertex enumeration.

/// `a . y + b = 0` over a list of free variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Plane {
    a: Vec<Q>,
    b: Q,
}

fn normalized(mut p: Plane) -> Option<Plane> {
    let lead = p.a.iter().find(|c| !c.is_zero())?.abs();
    for c in p.a.iter_mut() {
        *c /= &lead;
    }
    p.b /= &lead;
    Some(p)
}

/// Unique solution of a square system, if non-singular.
fn solve(rows: &[&Plane]) -> Option<Vec<Q>> {
    let n = rows.len();
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|p| {
            let mut r = p.a.clone();
            r.push(-p.b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for c in col..=n {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if go(i + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

fn pool(cs: &[Constraint], fixed: &[Option<Q>], free: &[Var], bound: &Q) -> Vec<Plane> {
    let mut planes = Vec::new();
    for c in cs {
        for d in c.disjuncts() {
            let mut b = d.expr().bias().clone();
            let mut a = vec![Q::zero(); free.len()];
            for (v, coef) in d.expr().terms() {
                match &fixed[v] {
                    Some(x) => b += coef * x,
                    None => a[free.iter().position(|&f| f == v).unwrap()] = coef.clone(),
                }
            }
            if let Some(p) = normalized(Plane { a, b }) {
                planes.push(p);
            }
        }
    }
    for i in 0..free.len() {
        for s in [1, -1] {
            let mut a = vec![Q::zero(); free.len()];
            a[i] = q(s);
            planes.push(Plane { a, b: bound.clone() });
        }
    }
    planes.sort();
    planes.dedup();
    planes
}

fn free_vars(cs: &[Constraint], fixed: &[Option<Q>]) -> Vec<Var> {
    let mut vs: Vec<Var> = cs.iter().flat_map(|c| c.variables()).filter(|&v| fixed[v].is_none()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

fn complete(fixed: &[Option<Q>], free: &[Var], sol: &[Q]) -> Vec<Q> {
    let mut p: Vec<Q> = fixed.iter().map(|x| x.clone().unwrap_or_else(Q::zero)).collect();
    for (&v, x) in free.iter().zip(sol) {
        p[v] = x.clone();
    }
    p
}

/// A point of `[-bound, bound]^free` satisfying every constraint, with the
/// `fixed` coordinates held. Complete for bounded boxes: a nonempty
/// polytope has a vertex, and every vertex meets `|free|` planes of the
/// pool.
pub fn feasible_point(cs: &[Constraint], fixed: &[Option<Q>], bound: &Q) -> Option<Vec<Q>> {
    let free = free_vars(cs, fixed);
    if free.is_empty() {
        let p = complete(fixed, &free, &[]);
        return holds_all(cs, &p).then_some(p);
    }
    let planes = pool(cs, fixed, &free, bound);
    let mut found = None;
    combinations(planes.len(), free.len(), &mut |idx| {
        let rows: Vec<&Plane> = idx.iter().map(|&i| &planes[i]).collect();
        if let Some(sol) = solve(&rows) {
            if sol.iter().all(|x| x.abs() <= *bound) {
                let p = complete(fixed, &free, &sol);
                if holds_all(cs, &p) {
                    found = Some(p);
                    return true;
                }
            }
        }
        false
    });
    found
}

pub fn big() -> Q {
    q(1_000_000)
}

pub fn exact_sat(set: &ConstraintSet) -> bool {
    feasible_point(set.constraints(), &vec![None; set.dimension()], &big()).is_some()
}

/// Distance from `target` to the nearest value `t` of `var` such that
/// `(fixed, var = t)` extends to a point satisfying `cs` inside the box.
/// The feasible values form a union of intervals whose endpoints are
/// vertex coordinates, so only those and `target` need testing.
pub fn nearest_feasible(cs: &[Constraint], fixed: &[Option<Q>], var: Var, target: &Q) -> Option<Q> {
    let bound = big();
    let mut f2 = fixed.to_vec();
    f2[var] = None;
    let mut free = free_vars(cs, &f2);
    if !free.contains(&var) {
        free.push(var);
        free.sort_unstable();
    }
    let pos = free.iter().position(|&v| v == var).unwrap();
    let planes = pool(cs, &f2, &free, &bound);
    let mut cands: Vec<Q> = vec![target.clone()];
    combinations(planes.len(), free.len(), &mut |idx| {
        let rows: Vec<&Plane> = idx.iter().map(|&i| &planes[i]).collect();
        if let Some(sol) = solve(&rows) {
            cands.push(sol[pos].clone());
        }
        false
    });
    cands.sort_by(|a, b| (a - target).abs().cmp(&(b - target).abs()).then(a.cmp(b)));
    cands.dedup();
    for t in cands {
        if t.abs() > bound {
            continue;
        }
        let mut f3 = f2.clone();
        f3[var] = Some(t.clone());
        if feasible_point(cs, &f3, &bound).is_some() {
            return Some((t - target).abs());
        }
    }
    None
}

/// Exact values of the one free variable of `cs` (all others fixed) that
/// satisfy everything: `target` if it does, else the nearest boundary.
/// `None` when no value works.
pub fn univariate_pick(cs: &[Constraint], fixed: &[Option<Q>], var: Var, target: &Q) -> Option<Q> {
    let mut cands = vec![target.clone()];
    let mut m = target.abs() + Q::one();
    for c in cs {
        for d in c.disjuncts() {
            let a = d.expr().coeff(var);
            if a.is_zero() {
                continue;
            }
            let mut b = d.expr().bias().clone();
            for (v, coef) in d.expr().terms() {
                if v != var {
                    b += coef * fixed[v].as_ref().expect("prefix bound");
                }
            }
            let t = -b / a;
            m = m.max(t.abs() + Q::one());
            cands.push(t);
        }
    }
    cands.push(m.clone());
    cands.push(-m);
    cands.sort_by(|a, b| (a - target).abs().cmp(&(b - target).abs()).then(a.cmp(b)));
    let mut point: Vec<Q> = fixed.iter().map(|x| x.clone().unwrap_or_else(Q::zero)).collect();
    for t in cands {
        point[var] = t.clone();
        if holds_all(cs, &point) {
            return Some(t);
        }
    }
    None
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
