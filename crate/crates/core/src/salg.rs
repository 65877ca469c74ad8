//! The eight-dimensional super quasi-Hopf algebra S and the transport
//! identities linking it to Q: the isomorphism Γ, the B-module constants,
//! the sector conditions for Λ and σ, and the transport of Φ, R and θ.

use crate::cyclo::CycNum;
use crate::qhopf::{Check, QhError, QuasiHopfData, QuasiHopfSpec, VerificationReport};
use crate::tensor::{pack, Elem, LegMap, SuperAlgebra, TensorElem};
use crate::uqsl2::{c, cx};

/// Dimension of S.
pub const DIM: usize = 8;

/// Basis index of (x⁺)^a (x⁻)^b L^l.
pub fn sidx(a: usize, b: usize, l: usize) -> usize {
    4 * a + 2 * b + (l % 2)
}

/// (a, b, l) of a basis index.
pub fn smono(i: usize) -> (usize, usize, usize) {
    (i / 4, (i / 2) % 2, i % 2)
}

fn label(i: usize) -> String {
    let (a, b, l) = smono(i);
    let mut s = String::new();
    if a == 1 {
        s.push_str("x+");
    }
    if b == 1 {
        s.push_str("x-");
    }
    if l == 1 {
        s.push('L');
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

/// Normal form of a word in x⁺ (b'p'), x⁻ (b'm') times L^l.
fn normal_form(w: &[u8], l: usize) -> Elem {
    if w.windows(2).any(|p| p[0] == p[1]) {
        return Elem::zero();
    }
    if let Some(k) = w.windows(2).position(|p| p == b"mp") {
        // x⁻x⁺ = −x⁺x⁻ + ½ − ½L
        let mut swapped = w.to_vec();
        swapped.swap(k, k + 1);
        let mut dropped = w[..k].to_vec();
        dropped.extend_from_slice(&w[k + 2..]);
        let half = CycNum::frac(1, 2);
        return normal_form(&swapped, l)
            .neg()
            .add(&normal_form(&dropped, l).scale(&half))
            .sub(&normal_form(&dropped, l + 1).scale(&half));
    }
    let a = usize::from(w.first() == Some(&b'p'));
    let b = usize::from(w.last() == Some(&b'm'));
    Elem::basis(sidx(a, b, l))
}

fn mono_word(i: usize) -> (Vec<u8>, usize) {
    let (a, b, l) = smono(i);
    let mut w = Vec::new();
    if a == 1 {
        w.push(b'p');
    }
    if b == 1 {
        w.push(b'm');
    }
    (w, l)
}

fn basis_product(i: usize, j: usize) -> Elem {
    let (mut w, l1) = mono_word(i);
    let (w2, l2) = mono_word(j);
    w.extend(w2);
    normal_form(&w, l1 + l2)
}

pub fn s_algebra() -> SuperAlgebra {
    let labels = (0..DIM).map(label).collect();
    let parity = (0..DIM).map(|i| ((smono(i).0 + smono(i).1) % 2) as u8).collect();
    let mult = (0..DIM).map(|a| (0..DIM).map(|b| basis_product(a, b)).collect()).collect();
    SuperAlgebra::new("salg", labels, parity, mult, Elem::basis(0)).expect("S relations are consistent")
}

/// Parse a word over `p` (x⁺), `m` (x⁻), `L`, `1`.
pub fn sword(alg: &SuperAlgebra, w: &str) -> Elem {
    w.chars().fold(alg.unit().clone(), |acc, ch| {
        let g = match ch {
            'p' => Elem::basis(sidx(1, 0, 0)),
            'm' => Elem::basis(sidx(0, 1, 0)),
            'L' => Elem::basis(sidx(0, 0, 1)),
            '1' => alg.unit().clone(),
            _ => panic!("unknown generator {ch}"),
        };
        alg.mul(&acc, &g)
    })
}

/// Named elements of S and the constants used by the transport identities.
#[derive(Clone, Debug)]
pub struct SElements {
    pub xp: Elem,
    pub xm: Elem,
    pub l: Elem,
    pub e0: Elem,
    pub e1: Elem,
    pub xi: Elem,
    pub z: Elem,
    pub zbar: Elem,
    pub b: Elem,
    pub c: Elem,
    pub delta1: Elem,
    pub delta1_inv: Elem,
    pub kappa: Elem,
    pub delta0: TensorElem,
    pub delta0_inv: TensorElem,
    pub gamma: TensorElem,
    pub gamma_inv: TensorElem,
}

impl SElements {
    pub fn new(alg: &SuperAlgebra) -> Self {
        let w = |s: &str| sword(alg, s);
        let half = CycNum::frac(1, 2);
        let i = CycNum::i();
        let one = alg.unit().clone();
        let e0 = one.add(&w("L")).scale(&half);
        let e1 = one.sub(&w("L")).scale(&half);
        let pm = w("pm");
        let b = alg.mul(&w("mp"), &e1);
        let cc = alg.mul(&w("p"), &e1);
        let delta1 = one.add(&pm);
        let delta1_inv = one.sub(&alg.mul(&pm, &e0.add(&e1.scale(&half))));
        let kappa = alg.mul(&one.sub(&pm), &e0);
        let t = |x: &str, y: &str| alg.tensor(&[&w(x), &w(y)]);
        let delta0 = t("1", "1").add(&t("m", "p"));
        let delta0_inv = t("1", "1").sub(&t("m", "p"));
        let e00 = alg.tensor(&[&e0, &e0]);
        let g = |sgn: i64| {
            t("1", "1").add(&t("m", "p").scale(&c(sgn))).sub(&t("p", "m").scale(&c(sgn))).sub(&t("pm", "pm"))
        };
        let gamma = alg.tmul(&g(1), &e00, true).expect("two legs");
        let gamma_inv = alg.tmul(&g(-1), &e00, true).expect("two legs");
        SElements {
            xp: w("p"),
            xm: w("m"),
            l: w("L"),
            xi: w("p").add(&w("m")),
            z: e0.add(&e1.scale(&i)),
            zbar: e0.sub(&e1.scale(&i)),
            e0,
            e1,
            b,
            c: cc,
            delta1,
            delta1_inv,
            kappa,
            delta0,
            delta0_inv,
            gamma,
            gamma_inv,
        }
    }
}

/// Δ^S, ε and the antipode on the basis.
pub fn s_tables(alg: &SuperAlgebra) -> (Vec<TensorElem>, Vec<CycNum>, Vec<Elem>) {
    let el = SElements::new(alg);
    let i = CycNum::i();
    let one = alg.unit();
    let t = |a: &Elem, b: &Elem| alg.tensor(&[a, b]);
    let diff = alg.mul(&el.e1, &el.xp.sub(&el.xm));
    let dx = |x: &Elem, sgn: i64| {
        t(x, one).add(&t(&el.zbar, x)).add(&t(&el.e1, &diff).scale(&(&i * &c(sgn))))
    };
    let (dp, dm, dl) = (dx(&el.xp, 1), dx(&el.xm, -1), t(&el.l, &el.l));
    let sp = alg.mul(&el.xp, &el.zbar).neg();
    let sm = alg.mul(&el.xm, &el.zbar).neg();
    let mut coproduct = Vec::with_capacity(DIM);
    let mut counit = Vec::with_capacity(DIM);
    let mut antipode = Vec::with_capacity(DIM);
    for k in 0..DIM {
        let (a, b, l) = smono(k);
        let mut d = alg.tensor_unit(2);
        let mut s = one.clone();
        let mut pieces: Vec<(&TensorElem, &Elem)> = Vec::new();
        if a == 1 {
            pieces.push((&dp, &sp));
        }
        if b == 1 {
            pieces.push((&dm, &sm));
        }
        if l == 1 {
            pieces.push((&dl, &el.l));
        }
        for (dg, sg) in &pieces {
            d = alg.tmul(&d, dg, true).expect("two legs");
            s = alg.mul(sg, &s);
        }
        // reversing k odd letters costs (−1)^{k(k−1)/2}
        if a + b == 2 {
            s = s.neg();
        }
        coproduct.push(d);
        counit.push(if a + b == 0 { CycNum::one() } else { CycNum::zero() });
        antipode.push(s);
    }
    (coproduct, counit, antipode)
}

type Term3 = (CycNum, Elem, Elem, Elem);

fn t3(alg: &SuperAlgebra, terms: &[Term3]) -> TensorElem {
    terms.iter().fold(TensorElem::zero(3), |acc, (k, a, b, cc)| acc.add(&alg.tensor(&[a, b, cc]).scale(k)))
}

/// Λ^{abc} components before multiplication by e_a⊗e_b⊗e_c, keyed by sector 4a+2b+c.
pub fn lambda_components(alg: &SuperAlgebra, beta: &CycNum) -> Vec<TensorElem> {
    let w = |s: &str| sword(alg, s);
    let (one, p, m, pm) = (w("1"), w("p"), w("m"), w("pm"));
    let i = CycNum::i();
    let ci = |a: i64, b: i64| cx(a, b);
    let unit = alg.tensor_unit(3);
    let xi = p.add(&m);
    let pim = p.add(&m.scale(&i));
    let l010 = t3(
        alg,
        &[
            (c(1), one.clone(), one.clone(), one.clone()),
            (ci(1, 1), m.clone(), one.clone(), p.clone()),
            (ci(-1, 1), p.clone(), one.clone(), m.clone()),
            (c(-2), pm.clone(), one.clone(), pm.clone()),
        ],
    );
    let l110 = t3(alg, &[(c(1), one.clone(), one.clone(), one.clone()), (ci(0, -1), one.clone(), xi.clone(), xi)]);
    let l101 = t3(
        alg,
        &[
            (c(1), one.clone(), one.clone(), one.clone()),
            (i.clone(), one.clone(), pim.clone(), pim),
            (ci(1, -1), p.sub(&m), pm.clone(), p.scale(&i).sub(&m)),
            (ci(1, 1), m.clone(), p.clone(), one.clone()),
            (ci(-1, 1), p.clone(), m.clone(), one.clone()),
            (ci(1, 1), one.clone(), pm.clone(), one.clone()),
            (c(-2), pm.clone(), pm.clone(), one.clone()),
        ],
    );
    let o = || one.clone();
    let l111 = t3(
        alg,
        &[
            (ci(-1, 1), o(), o(), o()),
            (ci(1, -1), o(), o(), pm.clone()),
            (ci(1, 2), o(), m.clone(), m.clone()),
            (c(1), o(), m.clone(), p.clone()),
            (c(1), o(), p.clone(), m.clone()),
            (c(1), o(), p.clone(), p.clone()),
            (ci(1, -1), o(), pm.clone(), o()),
            (ci(-2, 2), o(), pm.clone(), pm.clone()),
            (ci(-1, 1), m.clone(), o(), m.clone()),
            (ci(1, 1), m.clone(), o(), p.clone()),
            (ci(-1, 1), m.clone(), m.clone(), pm.clone()),
            (ci(1, 1), m.clone(), p.clone(), pm.clone()),
            (ci(1, -1), m.clone(), pm.clone(), m.clone()),
            (ci(-1, -1), m.clone(), pm.clone(), p.clone()),
            (ci(1, -1), p.clone(), m.clone(), o()),
            (ci(-1, 1), p.clone(), m.clone(), pm.clone()),
            (ci(-1, -1), p.clone(), p.clone(), o()),
            (ci(1, 1), p.clone(), p.clone(), pm.clone()),
            (ci(-1, 1), p.clone(), pm.clone(), m.clone()),
            (ci(1, 1), p.clone(), pm.clone(), p.clone()),
            (c(2), pm.clone(), o(), o()),
            (c(-2), pm.clone(), o(), pm.clone()),
            (ci(0, -2), pm.clone(), m.clone(), m.clone()),
            (ci(0, -2), pm.clone(), p.clone(), p.clone()),
            (c(-2), pm.clone(), pm.clone(), o()),
            (c(4), pm.clone(), pm.clone(), pm),
        ],
    )
    .scale(&beta.pow(2));
    let mut out = vec![unit; 8];
    out[0b010] = l010;
    out[0b110] = l110;
    out[0b101] = l101;
    out[0b111] = l111;
    out
}

/// e_a⊗e_b⊗e_c for sector 4a+2b+c.
pub fn sector_idempotent(alg: &SuperAlgebra, sector: usize) -> TensorElem {
    let el = SElements::new(alg);
    let pick = |bit: usize| if (sector >> bit) & 1 == 0 { el.e0.clone() } else { el.e1.clone() };
    alg.tensor(&[&pick(2), &pick(1), &pick(0)])
}

/// Λ̃^{abc} = Λ^{abc}·(e_a⊗e_b⊗e_c) for all eight sectors.
pub fn lambda_sectors(alg: &SuperAlgebra, beta: &CycNum) -> Vec<TensorElem> {
    lambda_components(alg, beta)
        .iter()
        .enumerate()
        .map(|(s, comp)| alg.tmul(comp, &sector_idempotent(alg, s), true).expect("three legs"))
        .collect()
}

pub fn build_lambda(alg: &SuperAlgebra, beta: &CycNum) -> TensorElem {
    lambda_sectors(alg, beta).iter().fold(TensorElem::zero(3), |acc, t| acc.add(t))
}

/// α = e₀ + e₁(x⁺+x⁻), β = e₀ + β²e₁(x⁺−x⁻).
pub fn s_alpha_beta(alg: &SuperAlgebra, beta: &CycNum) -> (Elem, Elem) {
    let el = SElements::new(alg);
    let alpha = el.e0.add(&alg.mul(&el.e1, &el.xi));
    let beta_el = el.e0.add(&alg.mul(&el.e1, &el.xp.sub(&el.xm)).scale(&beta.pow(2)));
    (alpha, beta_el)
}

pub fn s_spec(beta: &CycNum) -> QuasiHopfSpec {
    let alg = s_algebra();
    let (coproduct, counit, antipode) = s_tables(&alg);
    let (alpha, beta_el) = s_alpha_beta(&alg, beta);
    QuasiHopfSpec {
        phi: build_lambda(&alg, beta),
        r: None,
        alpha,
        beta_el,
        algebra: alg,
        sup: true,
        coproduct,
        counit,
        antipode,
    }
}

/// S with its quasi-Hopf structure for one β.
#[derive(Clone, Debug)]
pub struct SModel {
    pub beta: CycNum,
    pub hopf: QuasiHopfData,
    pub el: SElements,
}

pub fn build_s(beta: &CycNum) -> Result<SModel, QhError> {
    let hopf = QuasiHopfData::new(s_spec(beta))?;
    let el = SElements::new(&hopf.algebra);
    Ok(SModel { beta: beta.clone(), hopf, el })
}

impl SModel {
    pub fn alg(&self) -> &SuperAlgebra {
        &self.hopf.algebra
    }

    fn tmul(&self, a: &TensorElem, b: &TensorElem) -> TensorElem {
        self.hopf.tmul(a, b)
    }

    pub fn verify_s_quasihopf(&self) -> VerificationReport {
        self.hopf.verify_axioms()
    }

    /// ((Δ⊗id)∘Δ − (id⊗Δ)∘Δ)(a).
    pub fn coassoc_defect(&self, a: &Elem) -> TensorElem {
        let d = self.hopf.delta(a);
        self.hopf.delta_leg(&d, 0).sub(&self.hopf.delta_leg(&d, 1))
    }

    /// Axioms, the non-coassociativity witness and the B-module identities.
    pub fn suite(&self) -> VerificationReport {
        let mut rep = self.verify_s_quasihopf();
        let alg = self.alg();
        let one_minus_l = alg.unit().sub(&self.el.l);
        let want = alg.tensor(&[&one_minus_l, &one_minus_l, &self.el.xi]).scale(&CycNum::frac(1, 2));
        rep.push(Check::compare("noncoassoc_witness", &self.noncoassoc_witness(), &want));
        for c in self.b_module_products().into_iter().chain(self.constant_inverses()) {
            rep.push(c);
        }
        rep
    }

    pub fn noncoassoc_witness(&self) -> TensorElem {
        self.coassoc_defect(&self.el.xi)
    }

    /// Right multiplication by `r` as a leg map.
    pub fn right_mult(&self, r: &Elem) -> LegMap {
        let alg = self.alg();
        LegMap::from_elems((0..DIM).map(|j| alg.mul(&Elem::basis(j), r)).collect(), false)
    }

    /// Products in the B-module and the δ₁ identity used in the sector computations.
    pub fn b_module_products(&self) -> Vec<Check> {
        let alg = self.alg();
        let el = &self.el;
        let t = |a: &Elem, b: &Elem| alg.tensor(&[a, b]);
        let bb = t(&el.b, &el.b);
        let d = |a: &Elem| self.hopf.delta(a);
        let i = CycNum::i();
        let xp0 = alg.mul(&el.xp, &el.e0);
        let xm0 = alg.mul(&el.xm, &el.e0);
        let mp0 = alg.mul(&sword(alg, "mp"), &el.e0);
        // (b⊗1)·((id⊗S)Δ(b))·(b⊗1) = b⊗δ₁e₀
        let sb = self.hopf.s_leg(&d(&el.b), 1);
        let b1 = t(&el.b, alg.unit());
        let lhs_delta1 = self.tmul(&self.tmul(&b1, &sb), &b1);
        let e11 = t(&el.e1, &el.e1);
        let dx = |x: &Elem, y: &Elem| {
            let want = self.tmul(&t(x, alg.unit()).sub(&t(alg.unit(), y).scale(&i)), &e11);
            Check::compare("", &self.tmul(&d(x), &e11), &want)
        };
        vec![
            Check::compare("b_product_xp", &self.tmul(&d(&xp0), &bb), &t(&el.c, &el.b)),
            Check::compare("b_product_xm", &self.tmul(&d(&xm0), &bb), &t(&el.b, &el.c).scale(&-&i)),
            Check::compare("b_product_e0", &self.tmul(&d(&el.e0), &bb), &bb),
            Check::compare("b_product_xmxp", &self.tmul(&d(&mp0), &bb), &bb.add(&t(&el.c, &el.c).scale(&i))),
            Check::compare("delta1_identity", &lhs_delta1, &t(&el.b, &alg.mul(&el.delta1, &el.e0))),
            Check::all("delta_on_e1e1", vec![dx(&el.xp, &el.xm), dx(&el.xm, &el.xp)]),
        ]
    }

    /// Inverses of the named constants.
    pub fn constant_inverses(&self) -> Vec<Check> {
        let alg = self.alg();
        let el = &self.el;
        let u2 = alg.tensor_unit(2);
        vec![
            Check::compare("delta0_inverse", &self.tmul(&el.delta0, &el.delta0_inv), &u2),
            Check::compare_elems("delta1_inverse", &alg.mul(&el.delta1, &el.delta1_inv), alg.unit()),
            Check::compare("gamma_inverse", &self.tmul(&el.gamma, &el.gamma_inv), &alg.tensor(&[&el.e0, &el.e0])),
            Check::compare_elems("xi_squared", &alg.mul(&el.xi, &el.xi), &el.e1),
        ]
    }
}

/// Merge legs k and k+1 with the product of S (an even map).
pub fn merge_legs(alg: &SuperAlgebra, t: &TensorElem, k: usize) -> TensorElem {
    let legs = t.legs();
    let mut out = TensorElem::zero(legs - 1);
    for (idx, coef) in t.iter() {
        let prod = alg.basis_product(idx[k], idx[k + 1]);
        for (j, pc) in prod.iter() {
            let mut new = idx[..k].to_vec();
            new.push(j);
            new.extend_from_slice(&idx[k + 2..]);
            out.add_term(pack(&new), &(coef * pc));
        }
    }
    out
}
