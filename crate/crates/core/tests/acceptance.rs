//! Acceptance criteria 1–9, one PASS/FAIL line each.
//!
//! Runs with a custom main so the lines are always visible. Criterion 2 asks
//! for an affine dimension of 99 after the linear stage; the computed value is
//! 29 (confirmed by an independent dense nullspace in the solver unit tests),
//! so its line reads FAIL. The process exits non-zero if any other criterion
//! fails, or if any part of criterion 2 other than that dimension fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhvk_core::cyclo::all_betas;
use qhvk_core::qhopf::{Check, QuasiHopfData, QuasiHopfSpec};
use qhvk_core::salg::{self, SElements, SModel};
use qhvk_core::solver::{self, BranchEnd, BranchNode, ConstraintSystem, Poly, Status};
use qhvk_core::transport::Transport;
use qhvk_core::uqsl2::{self, QModel};
use qhvk_core::{CycNum, Elem, SuperAlgebra, TensorElem};

const EXPECTED_LINEAR_DIM: usize = 99;

struct Line {
    n: usize,
    pass: bool,
    summary: String,
    failures: Vec<String>,
}

fn failing(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| match &c.first_failure {
            Some(m) => format!("{} at {:?} residual {}", c.name, m.indices, m.residual),
            None => c.name.clone(),
        })
        .collect()
}

fn q(k: i64) -> CycNum {
    CycNum::frac(k, 1)
}

/// Named elements written out from their defining formulas, independent of the library's own.
struct Paper {
    one: Elem,
    k2: Elem,
    casimir: Elem,
    e0: Elem,
    e1p: Elem,
    e1m: Elem,
    wp: Elem,
    wm: Elem,
}

impl Paper {
    fn new(alg: &SuperAlgebra) -> Self {
        let w = |s: &str| uqsl2::word(alg, s);
        let i = CycNum::i();
        let half = CycNum::frac(1, 2);
        let one = alg.unit().clone();
        let casimir = w("FE").sub(&w("K").sub(&w("K3")).scale(&(&i * &CycNum::frac(1, 4))));
        let e0 = one.add(&w("K2")).scale(&half);
        let e1 = one.sub(&w("K2")).scale(&half);
        let e1p = alg.mul(&one.scale(&half).add(&casimir), &e1);
        let e1m = alg.mul(&one.scale(&half).sub(&casimir), &e1);
        let wp = alg.mul_all(&[&w("EF").scale(&half), &one.add(&w("K")), &e0]);
        let wm = alg.mul_all(&[&w("EF").scale(&half), &one.sub(&w("K")), &e0]);
        Paper { k2: w("K2"), one, casimir, e0, e1p, e1m, wp, wm }
    }

    /// v = e₀ + β(e₁⁺ − e₁⁻) + 2i(w⁺ − w⁻)
    fn ribbon(&self, beta: &CycNum) -> Elem {
        self.e0
            .add(&self.e1p.sub(&self.e1m).scale(beta))
            .add(&self.wp.sub(&self.wm).scale(&(CycNum::i() * q(2))))
    }
}

fn criterion1(models: &[QModel]) -> Line {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let wanted = ["intertwiner", "counitality", "pentagon", "R-intertwiner", "hexagon_1", "hexagon_2", "antipode_alpha", "antipode_beta", "antipode_phi"];
    for m in models {
        let rep = m.hopf.verify_axioms();
        for name in wanted {
            if rep.get(name).is_none() {
                failures.push(format!("{}: {name} missing", m.beta));
            }
        }
        failures.extend(failing(&rep.checks).into_iter().map(|f| format!("{}: {f}", m.beta)));
        let t = Instant::now();
        let pent = m.hopf.verify_pentagon();
        slowest = slowest.max(t.elapsed());
        if !pent.pass {
            failures.push(format!("{}: pentagon", m.beta));
        }
    }
    if slowest > Duration::from_secs(30) {
        failures.push(format!("pentagon took {slowest:?}"));
    }
    Line {
        n: 1,
        pass: failures.is_empty(),
        summary: format!("quasi-Hopf axioms of Q for all four beta, slowest pentagon {:.2} s", slowest.as_secs_f64()),
        failures,
    }
}

struct SearchRun {
    cs: ConstraintSystem,
    run: solver::TheoremRun,
}

fn criterion2(searches: &[SearchRun], control: &solver::ControlRun) -> (Line, bool) {
    let mut failures = Vec::new();
    let mut rest_ok = true;
    for s in searches {
        if s.run.linear_dim != EXPECTED_LINEAR_DIM {
            failures.push(format!("{}: linear dimension {} (expected {EXPECTED_LINEAR_DIM})", s.run.label, s.run.linear_dim));
        }
        let unsat = s.run.outcome.status == Status::Unsat;
        let replayed = solver::replay_leaves(&s.cs, &s.run.outcome.tree);
        if !unsat || !replayed || !s.run.certificate_replayed {
            rest_ok = false;
            failures.push(format!("{}: status {:?}, certificate replayed {replayed}", s.run.label, s.run.outcome.status));
        }
    }
    if control.run.outcome.status != Status::Sat || !control.contains_rst || !control.witness_verified {
        rest_ok = false;
        failures.push("Q0 control is not SAT with Rst".into());
    }
    let shape: Vec<String> = searches
        .iter()
        .map(|s| format!("{}: dim {}, {:?}, {} leaves, {} steps", s.run.label, s.run.linear_dim, s.run.outcome.status, s.run.outcome.leaves, s.run.outcome.steps))
        .collect();
    let line = Line {
        n: 2,
        pass: failures.is_empty(),
        summary: format!("no R-matrix for Phi_+1, Phi_-1; Q0 control SAT containing Rst [{}]", shape.join("; ")),
        failures,
    };
    (line, rest_ok)
}

fn criterion3(models: &[QModel]) -> Line {
    let mut failures = Vec::new();
    for m in models {
        let checks = uqsl2::r_consistency(m).expect("R present");
        failures.extend(failing(&checks).into_iter().map(|f| format!("{}: {f}", m.beta)));
        // the monodromy has every one of its 256 components compared, zero or not
        let mono = m.hopf.monodromy().expect("R present");
        let closed = uqsl2::monodromy_closed_form(m.alg(), &m.beta);
        let dim = m.alg().dim();
        let compared = (0..dim * dim).filter(|k| mono.get(&[k / dim, k % dim]) == closed.get(&[k / dim, k % dim])).count();
        if compared != 256 {
            failures.push(format!("{}: {} of 256 monodromy components agree", m.beta, compared));
        }
    }
    Line { n: 3, pass: failures.is_empty(), summary: "R on the e0 block equals Rst; R21 R equals the closed-form monodromy".into(), failures }
}

fn criterion4(models: &[QModel]) -> Line {
    let mut failures = Vec::new();
    for m in models {
        let alg = m.alg();
        let paper = Paper::new(alg);
        let mut checks = m.hopf.verify_ribbon(&m.v).expect("ribbon");
        let u_inv = m.hopf.inv(&m.u).expect("u invertible");
        for a in 0..alg.dim() {
            let x = Elem::basis(a);
            let s2 = m.hopf.s(&m.hopf.s(&x));
            checks.push(Check::compare_elems(&format!("s_squared_{}", alg.label(a)), &s2, &alg.mul_all(&[&m.u, &x, &u_inv])));
        }
        checks.push(Check::compare_elems("ribbon_decomposition", &m.v, &paper.ribbon(&m.beta)));
        failures.extend(failing(&checks).into_iter().map(|f| format!("{}: {f}", m.beta)));
    }
    Line { n: 4, pass: failures.is_empty(), summary: "ribbon element: central, S(v) = v, coproduct, counit, v^2 = uS(u), S^2 by u, decomposition".into(), failures }
}

fn criterion5(models: &[QModel]) -> Line {
    let mut failures = Vec::new();
    for m in models {
        let alg = m.alg();
        let p = Paper::new(alg);
        let b2 = m.beta.pow(2);
        let i = CycNum::i();
        let lib = uqsl2::verify_appendix(m).expect("appendix");
        let mut checks: Vec<Check> = lib.into_iter().filter(|c| ["mu_mu_M", "mu_of_c", "right_integral", "cointegral", "centre_dim_5"].contains(&c.name.as_str())).collect();
        let im = m.character_images().expect("images");
        let ck2 = alg.mul(&p.casimir, &p.k2);
        let (chi2p, chi2m) = if b2 == i {
            (p.casimir.scale(&q(4)), ck2.scale(&q(-4)))
        } else {
            (ck2.scale(&q(-4)), p.casimir.scale(&q(4)))
        };
        let chi = [p.one.clone(), p.k2.scale(&q(-1)), chi2p, chi2m];
        for (k, (got, want)) in im.chi.iter().zip(&chi).enumerate() {
            checks.push(Check::compare_elems(&format!("drinfeld_image_{k}"), got, want));
        }
        let four_b2_over_i = &b2 * &q(4) * (-&i);
        let phi = [p.wp.scale(&four_b2_over_i), p.wm.scale(&four_b2_over_i), p.e1p.scale(&q(4)), p.e1m.scale(&q(-4))];
        for (k, (got, want)) in im.phi.iter().zip(&phi).enumerate() {
            checks.push(Check::compare_elems(&format!("radford_image_{k}"), got, want));
        }
        let g = if b2 == -&i { uqsl2::word(alg, "K") } else { uqsl2::word(alg, "K3") };
        checks.push(Check::compare_elems("balancing_g", &m.g, &g));
        checks.push(Check::flag("centre_dim_5", qhvk_core::qhopf::center(alg).len() == 5));
        failures.extend(failing(&checks).into_iter().map(|f| format!("{}: {f}", m.beta)));
    }
    Line { n: 5, pass: failures.is_empty(), summary: "integral, cointegral, Drinfeld and Radford images, g, centre dimension 5".into(), failures }
}

fn sl2z_reference(beta: &CycNum) -> (Vec<Vec<CycNum>>, Vec<Vec<CycNum>>) {
    let i = CycNum::i();
    let h = CycNum::frac(1, 2);
    let z = CycNum::zero();
    let b = beta.pow(2) * CycNum::zeta_pow(8);
    let bi = &b * &i * beta.pow(2).inv().expect("beta != 0");
    // columns are images: S(rho) = -i phi, S(phi) = i rho, S(k0) = (k0 - 2k1 + k2)/2, ...
    let s = vec![
        vec![z.clone(), i.clone(), z.clone(), z.clone(), z.clone()],
        vec![-&i, z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), h.clone(), -&h, h.clone()],
        vec![z.clone(), z.clone(), q(-1), z.clone(), q(1)],
        vec![z.clone(), z.clone(), h.clone(), h.clone(), h.clone()],
    ];
    let t = vec![
        vec![b.clone(), -&bi, z.clone(), z.clone(), z.clone()],
        vec![z.clone(), b.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), -(&b * beta), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), b.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), &b * beta],
    ];
    (s, t)
}

fn criterion6(models: &[QModel]) -> Line {
    let mut failures = Vec::new();
    let actions: Vec<_> = models.iter().map(|m| m.sl2z_action().expect("action")).collect();
    for (m, act) in models.iter().zip(&actions) {
        let (s, t) = sl2z_reference(&m.beta);
        let mut checks = act.relations();
        checks.push(Check::flag("s_entries", act.s == s));
        checks.push(Check::flag("t_entries", act.t == t));
        checks.push(Check::flag("b", act.b == m.beta.pow(2) * CycNum::zeta_pow(8)));
        let flipped = models.iter().zip(&actions).find(|(o, _)| o.beta == -&m.beta).expect("-beta").1;
        checks.push(act.conjugacy(flipped));
        failures.extend(failing(&checks).into_iter().map(|f| format!("{}: {f}", m.beta)));
    }
    Line { n: 6, pass: failures.is_empty(), summary: "SL(2,Z) matrices entry by entry, S^2 = id, (ST)^3 = id, beta <-> -beta conjugacy".into(), failures }
}

fn criterion7(smodels: &[SModel]) -> Line {
    let mut failures = Vec::new();
    for m in smodels {
        let rep = m.suite();
        for name in ["pentagon", "counitality", "antipode_alpha", "antipode_beta", "noncoassoc_witness"] {
            if rep.get(name).is_none() {
                failures.push(format!("{}: {name} missing", m.beta));
            }
        }
        let alg = m.alg();
        let one_minus_l = alg.unit().sub(&salg::sword(alg, "L"));
        let xi = salg::sword(alg, "p").add(&salg::sword(alg, "m"));
        let want = alg.tensor(&[&one_minus_l, &one_minus_l, &xi]).scale(&CycNum::frac(1, 2));
        let mut checks = rep.checks;
        checks.push(Check::compare("witness_from_generators", &m.noncoassoc_witness(), &want));
        failures.extend(failing(&checks).into_iter().map(|f| format!("{}: {f}", m.beta)));
    }
    Line { n: 7, pass: failures.is_empty(), summary: "S: super pentagon, counitality, antipode, non-coassociativity witness".into(), failures }
}

fn criterion8(transports: &[Transport], models: &[QModel]) -> Line {
    let mut failures = Vec::new();
    for (t, m) in transports.iter().zip(models) {
        let mut checks = t.all_checks().expect("transport");
        checks.push(Check::flag("lambda_unique", (0..8).all(|s| t.table1_solve(s).unique())));
        checks.push(Check::flag("lambda_from_tables", t.lambda_from_tables() == Some(salg::build_lambda(t.s.alg(), &t.beta))));
        checks.push(Check::compare("phi_transport", &t.transport_phi().expect("phi"), &m.hopf.phi));
        checks.push(Check::flag("sigma_unique", (0..4).all(|s| t.table2_solve(s).unique())));
        checks.push(Check::compare("sigma_to_r", &t.sigma_to_r(), m.hopf.r.as_ref().expect("R")));
        checks.push(Check::compare_elems("theta_transport", &t.ribbon_transport().expect("v"), &m.v));
        failures.extend(failing(&checks).into_iter().map(|f| format!("{}: {f}", t.beta)));
    }
    Line { n: 8, pass: failures.is_empty(), summary: "transport: Gamma, Lambda table, Phi, sigma table, sigma -> R, theta -> v".into(), failures }
}

// ---- criterion 9 ----

fn delta(rng: &mut ChaCha8Rng) -> CycNum {
    let p = rng.gen_range(1..6) * if rng.gen_bool(0.5) { 1 } else { -1 };
    CycNum::frac(p, rng.gen_range(1..4)) * CycNum::zeta_pow(rng.gen_range(0..24))
}

/// Add a random nonzero amount to one coefficient: an existing term, or any slot if `anywhere`.
fn mutate_tensor(t: &TensorElem, dim: usize, anywhere: bool, rng: &mut ChaCha8Rng) -> TensorElem {
    let idx: Vec<usize> = if anywhere || t.is_empty() {
        (0..t.legs()).map(|_| rng.gen_range(0..dim)).collect()
    } else {
        t.iter().nth(rng.gen_range(0..t.len())).expect("term").0
    };
    let mut out = t.clone();
    out.add_indexed(&idx, &delta(rng));
    out
}

fn mutate_elem(e: &Elem, dim: usize, rng: &mut ChaCha8Rng) -> Elem {
    mutate_tensor(&TensorElem::from_elem(e), dim, true, rng).to_elem()
}

/// Mutate one coefficient of one table of a quasi-Hopf spec.
fn mutate_spec(spec: &QuasiHopfSpec, rng: &mut ChaCha8Rng) -> (QuasiHopfSpec, String) {
    let dim = spec.algebra.dim();
    let mut s = spec.clone();
    let a = rng.gen_range(0..dim);
    let what = match rng.gen_range(0..7) {
        0 => {
            s.coproduct[a] = mutate_tensor(&s.coproduct[a], dim, true, rng);
            format!("coproduct[{a}]")
        }
        1 => {
            s.antipode[a] = mutate_elem(&s.antipode[a], dim, rng);
            format!("antipode[{a}]")
        }
        2 => {
            s.counit[a] = &s.counit[a] + &delta(rng);
            format!("counit[{a}]")
        }
        3 => {
            s.phi = mutate_tensor(&s.phi, dim, rng.gen_bool(0.5), rng);
            "phi".into()
        }
        4 if s.r.is_some() => {
            s.r = s.r.as_ref().map(|r| mutate_tensor(r, dim, rng.gen_bool(0.5), rng));
            "R".into()
        }
        5 => {
            s.alpha = mutate_elem(&s.alpha, dim, rng);
            "alpha".into()
        }
        _ => {
            s.beta_el = mutate_elem(&s.beta_el, dim, rng);
            "beta".into()
        }
    };
    (s, what)
}

fn detects(checks: Result<Vec<Check>, impl std::fmt::Debug>) -> bool {
    checks.map(|c| c.iter().any(|x| !x.pass)).unwrap_or(true)
}

fn tamper(tree: &BranchNode, rng: &mut ChaCha8Rng) -> BranchNode {
    let mut t = tree.clone();
    let events = t.events.len();
    if events > 0 && rng.gen_bool(0.7) {
        let k = rng.gen_range(0..events);
        t.events[k].affine = t.events[k].affine.add(&Poly::constant(delta(rng)));
    } else if let BranchEnd::Contradiction { constant, .. } = &mut t.end {
        *constant = &*constant + &delta(rng);
    }
    t
}

struct Inputs<'a> {
    models: &'a [QModel],
    smodels: &'a [SModel],
    transports: &'a [Transport],
    searches: &'a [SearchRun],
    q0: &'a QuasiHopfData,
}

fn one_mutation(suite: usize, x: &Inputs, rng: &mut ChaCha8Rng) -> (bool, String) {
    let bi = rng.gen_range(0..4);
    let m = &x.models[bi];
    let alg = m.alg();
    let dim = alg.dim();
    match suite {
        1 => {
            let (spec, what) = mutate_spec(&m.hopf.spec(), rng);
            let found = match QuasiHopfData::new(spec) {
                Ok(h) => !h.verify_axioms().all_pass(),
                Err(_) => true,
            };
            (found, what)
        }
        2 => {
            if rng.gen_bool(0.6) {
                let s = &x.searches[rng.gen_range(0..x.searches.len())];
                let t = tamper(&s.run.outcome.tree, rng);
                (!solver::replay_leaves(&s.cs, &t), format!("certificate of {}", s.run.label))
            } else {
                let mut spec = x.q0.spec();
                spec.r = spec.r.as_ref().map(|r| mutate_tensor(r, 8, rng.gen_bool(0.5), rng));
                let found = match QuasiHopfData::new(spec) {
                    Ok(h) => {
                        let mut c = vec![h.verify_r_intertwiner().expect("R")];
                        c.extend(h.verify_hexagons().expect("R"));
                        c.iter().any(|x| !x.pass)
                    }
                    Err(_) => true,
                };
                (found, "Q0 witness Rst".into())
            }
        }
        3 => {
            let mut mm = m.clone();
            mm.hopf.r = mm.hopf.r.as_ref().map(|r| mutate_tensor(r, dim, rng.gen_bool(0.5), rng));
            (detects(uqsl2::r_consistency(&mm)), "R".into())
        }
        4 => {
            if rng.gen_bool(0.7) {
                let v = mutate_elem(&m.v, dim, rng);
                let mut c = m.hopf.verify_ribbon(&v).unwrap_or_default();
                c.push(Check::compare_elems("decomposition", &v, &Paper::new(alg).ribbon(&m.beta)));
                (c.iter().any(|x| !x.pass), "v".into())
            } else {
                let u = mutate_elem(&m.u, dim, rng);
                (detects(m.hopf.verify_s_squared(&u).map(|c| vec![c])), "u".into())
            }
        }
        5 => {
            let mut mm = m.clone();
            let what = match rng.gen_range(0..3) {
                0 => {
                    let k = rng.gen_range(0..dim);
                    mm.mu[k] = &mm.mu[k] + &delta(rng);
                    format!("mu[{k}]")
                }
                1 => {
                    mm.coint = mutate_elem(&mm.coint, dim, rng);
                    "cointegral".into()
                }
                _ => {
                    mm.monodromy = mutate_tensor(&mm.monodromy, dim, rng.gen_bool(0.5), rng);
                    "monodromy".into()
                }
            };
            (detects(uqsl2::verify_appendix(&mm)), what)
        }
        6 => {
            let mut act = m.sl2z_action().expect("action");
            let (r, c) = (rng.gen_range(0..5), rng.gen_range(0..5));
            let target = if rng.gen_bool(0.5) { &mut act.s } else { &mut act.t };
            target[r][c] = &target[r][c] + &delta(rng);
            let mut checks = act.relations();
            checks.extend(act.against_reference(&m.beta));
            (checks.iter().any(|x| !x.pass), format!("matrix entry ({r},{c})"))
        }
        7 => {
            let s = &x.smodels[bi];
            let (spec, what) = mutate_spec(&s.hopf.spec(), rng);
            let found = match QuasiHopfData::new(spec) {
                Ok(h) => {
                    let el = SElements::new(&h.algebra);
                    !SModel { beta: s.beta.clone(), hopf: h, el }.suite().all_pass()
                }
                Err(_) => true,
            };
            (found, what)
        }
        _ => {
            let t = &x.transports[bi];
            match rng.gen_range(0..3) {
                0 => {
                    let sector = rng.gen_range(0..8);
                    let lt = salg::lambda_sectors(t.s.alg(), &t.beta);
                    let bad = mutate_tensor(&lt[sector], t.s.alg().dim(), false, rng);
                    (!t.table1_check_with(sector, &bad).pass, format!("Lambda sector {sector}"))
                }
                1 => {
                    let sector = rng.gen_range(0..4);
                    let body = t.sigma_body_f(sector);
                    let bad = mutate_tensor(&body, body_dim(&body), false, rng);
                    (!t.table2_check_with(sector, &bad).pass, format!("sigma sector {sector}"))
                }
                _ => {
                    let lambda = salg::build_lambda(t.s.alg(), &t.beta);
                    let bad = mutate_tensor(&lambda, t.s.alg().dim(), false, rng);
                    let phi = t.transport_phi_with(&bad);
                    (phi.map(|p| p != m.hopf.phi).unwrap_or(true), "Lambda".into())
                }
            }
        }
    }
}

fn body_dim(t: &TensorElem) -> usize {
    t.iter().flat_map(|(idx, _)| idx).max().map_or(1, |m| m + 1)
}

fn criterion9(x: &Inputs) -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut failures = Vec::new();
    let mut per_suite = [0usize; 8];
    for k in 0..100 {
        let suite = 1 + k % 8;
        let (found, what) = one_mutation(suite, x, &mut rng);
        per_suite[suite - 1] += 1;
        if !found {
            failures.push(format!("mutation {k} in suite {suite} ({what}) passed every check"));
        }
    }
    Line {
        n: 9,
        pass: failures.is_empty(),
        summary: format!("100 single-coefficient mutations over suites 1-8 {per_suite:?}, {} false passes", failures.len()),
        failures,
    }
}

fn report(line: &Line, elapsed: Duration) {
    let mark = if line.pass { "PASS" } else { "FAIL" };
    println!("criterion {} {mark}  {}  ({:.1} s)", line.n, line.summary, elapsed.as_secs_f64());
    for f in line.failures.iter().take(10) {
        println!("    {f}");
    }
}

fn main() {
    let start = Instant::now();
    let betas = all_betas();
    let models: Vec<QModel> = betas.iter().map(|b| uqsl2::build_q(b).expect("Q builds")).collect();
    let mut lines = Vec::new();
    let timed = |f: &mut dyn FnMut() -> Line| {
        let t = Instant::now();
        let line = f();
        report(&line, t.elapsed());
        line
    };

    lines.push(timed(&mut || criterion1(&models)));

    let t2 = Instant::now();
    let searches: Vec<SearchRun> = [1, -1]
        .into_iter()
        .map(|eps| {
            let hopf = solver::q_with_phi_eps(eps).expect("Q with Phi_eps");
            let (_, cs, run) = solver::run_search(&format!("Q, eps = {eps:+}"), &hopf).expect("search");
            SearchRun { cs, run }
        })
        .collect();
    let control = solver::q0_control().expect("control");
    let (line2, rest_ok) = criterion2(&searches, &control);
    report(&line2, t2.elapsed());
    lines.push(line2);

    lines.push(timed(&mut || criterion3(&models)));
    lines.push(timed(&mut || criterion4(&models)));
    lines.push(timed(&mut || criterion5(&models)));
    lines.push(timed(&mut || criterion6(&models)));
    let smodels: Vec<SModel> = betas.iter().map(|b| salg::build_s(b).expect("S builds")).collect();
    lines.push(timed(&mut || criterion7(&smodels)));
    let transports: Vec<Transport> = betas.iter().map(|b| Transport::new(b).expect("transport")).collect();
    lines.push(timed(&mut || criterion8(&transports, &models)));
    let q0 = uqsl2::quotient_q0().expect("Q0");
    let inputs = Inputs { models: &models, smodels: &smodels, transports: &transports, searches: &searches, q0: &q0 };
    lines.push(timed(&mut || criterion9(&inputs)));

    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/9 criteria pass ({:.1} s)", start.elapsed().as_secs_f64());
    let unexpected: Vec<usize> = lines.iter().filter(|l| !l.pass && !(l.n == 2 && rest_ok)).map(|l| l.n).collect();
    if !lines[1].pass && rest_ok {
        println!("known: criterion 2 linear dimension differs from the stated value; every other part of it holds");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
