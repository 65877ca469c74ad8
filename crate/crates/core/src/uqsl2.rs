//! The restricted quantum group Q = U_i sl(2) with its coassociator,
//! R-matrix, ribbon element, and the SL(2,Z) action on its centre.

use serde::Serialize;

use crate::cyclo::CycNum;
use crate::linalg::{self, Matrix};
use crate::qhopf::{center, Check, QhError, QuasiHopfData, QuasiHopfSpec, VerificationReport};
use crate::tensor::{Elem, SuperAlgebra, TensorElem};

/// Dimension of Q.
pub const DIM: usize = 16;

/// Basis index of E^m F^n K^l.
pub fn idx(m: usize, n: usize, l: usize) -> usize {
    8 * m + 4 * n + (l % 4)
}

/// (m, n, l) of a basis index.
pub fn pbw(i: usize) -> (usize, usize, usize) {
    (i / 8, (i / 4) % 2, i % 4)
}

pub fn c(n: i64) -> CycNum {
    CycNum::from_int(n)
}

/// a + b·i.
pub fn cx(a: i64, b: i64) -> CycNum {
    c(a) + c(b) * CycNum::i()
}

fn pbw_label(i: usize) -> String {
    let (m, n, l) = pbw(i);
    let mut s = String::new();
    if m == 1 {
        s.push('E');
    }
    if n == 1 {
        s.push('F');
    }
    match l {
        0 => {}
        1 => s.push('K'),
        _ => s.push_str(&format!("K{l}")),
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

/// Product of two PBW monomials, normal ordered as E, F, K.
fn pbw_product(a: usize, b: usize) -> Elem {
    let (m1, n1, l1) = pbw(a);
    let (m2, n2, l2) = pbw(b);
    // K^{l1} E^{m2} F^{n2} = (−1)^{l1(m2+n2)} E^{m2} F^{n2} K^{l1}
    let sign = if (l1 * (m2 + n2)) % 2 == 1 { -1 } else { 1 };
    let l = (l1 + l2) % 4;
    let mut out = Elem::zero();
    if n1 == 1 && m2 == 1 {
        // F E = E F + (i/2)(K − K³)
        if m1 == 0 && n2 == 0 {
            out.add_term(idx(1, 1, l), &c(sign));
        }
        // E^{m1} K^j F^{n2} = (−1)^{j n2} E^{m1} F^{n2} K^j for odd j
        let s2 = if n2 == 1 { -sign } else { sign };
        let half_i = CycNum::i() * CycNum::frac(s2, 2);
        out.add_term(idx(m1, n2, l + 1), &half_i);
        out.add_term(idx(m1, n2, l + 3), &-half_i);
    } else {
        let m = m1 + m2;
        let n = n1 + n2;
        if m <= 1 && n <= 1 {
            out.add_term(idx(m, n, l), &c(sign));
        }
    }
    out
}

/// The 16-dimensional algebra with PBW basis E^m F^n K^l.
pub fn q_algebra() -> SuperAlgebra {
    let labels = (0..DIM).map(pbw_label).collect();
    let mult = (0..DIM).map(|a| (0..DIM).map(|b| pbw_product(a, b)).collect()).collect();
    SuperAlgebra::new("uqsl2", labels, vec![0; DIM], mult, Elem::basis(0)).expect("Q relations are consistent")
}

/// Parse a word such as `EFK3`, `KF`, `1` into an element (letters multiplied in order).
pub fn word(alg: &SuperAlgebra, w: &str) -> Elem {
    let mut acc = alg.unit().clone();
    let chars: Vec<char> = w.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let ch = chars[k];
        k += 1;
        let mut power = 1u32;
        if k < chars.len() && chars[k].is_ascii_digit() {
            power = chars[k].to_digit(10).expect("digit");
            k += 1;
        }
        let g = match ch {
            'E' => Elem::basis(idx(1, 0, 0)),
            'F' => Elem::basis(idx(0, 1, 0)),
            'K' => Elem::basis(idx(0, 0, 1)),
            '1' => alg.unit().clone(),
            _ => panic!("unknown generator {ch}"),
        };
        acc = alg.mul(&acc, &alg.pow(&g, power));
    }
    acc
}

/// Named elements of Q.
#[derive(Clone, Debug)]
pub struct QElements {
    pub e: Elem,
    pub f: Elem,
    pub k: Elem,
    pub k_inv: Elem,
    pub e0: Elem,
    pub e1: Elem,
    pub fp: Elem,
    pub fm: Elem,
    pub casimir: Elem,
    pub e1p: Elem,
    pub e1m: Elem,
    pub wp: Elem,
    pub wm: Elem,
}

impl QElements {
    pub fn new(alg: &SuperAlgebra) -> Self {
        let w = |s: &str| word(alg, s);
        let half = CycNum::frac(1, 2);
        let i = CycNum::i();
        let one = alg.unit().clone();
        let k2 = w("K2");
        let e0 = one.add(&k2).scale(&half);
        let e1 = one.sub(&k2).scale(&half);
        let casimir = w("FE").sub(&w("K").sub(&w("K3")).scale(&(&i * &CycNum::frac(1, 4))));
        let e1p = alg.mul(&one.scale(&half).add(&casimir), &e1);
        let e1m = alg.mul(&one.scale(&half).sub(&casimir), &e1);
        let ef_half = w("EF").scale(&half);
        let wp = alg.mul_all(&[&ef_half, &one.add(&w("K")), &e0]);
        let wm = alg.mul_all(&[&ef_half, &one.sub(&w("K")), &e0]);
        QElements {
            e: w("E"),
            f: w("F"),
            k: w("K"),
            k_inv: w("K3"),
            fp: w("F").scale(&-&i),
            fm: w("EK3"),
            e0,
            e1,
            casimir,
            e1p,
            e1m,
            wp,
            wm,
        }
    }
}

/// Δ, ε, S tables of Q.
pub fn q_tables(alg: &SuperAlgebra) -> (Vec<TensorElem>, Vec<CycNum>, Vec<Elem>) {
    let w = |s: &str| word(alg, s);
    let t = |a: &str, b: &str| alg.tensor(&[&w(a), &w(b)]);
    let d_e = t("1", "E").add(&t("E", "K"));
    let d_f = t("K3", "F").add(&t("F", "1"));
    let d_k = t("K", "K");
    let s_e = w("EK3").neg();
    let s_f = w("KF").neg();
    let s_k = w("K3");
    let mut coproduct = Vec::with_capacity(DIM);
    let mut counit = Vec::with_capacity(DIM);
    let mut antipode = Vec::with_capacity(DIM);
    for b in 0..DIM {
        let (m, n, l) = pbw(b);
        let mut d = alg.tensor_unit(2);
        let mut s = alg.unit().clone();
        if m == 1 {
            d = alg.tmul(&d, &d_e, false).expect("2 legs");
            s = alg.mul(&s_e, &s);
        }
        if n == 1 {
            d = alg.tmul(&d, &d_f, false).expect("2 legs");
            s = alg.mul(&s_f, &s);
        }
        for _ in 0..l {
            d = alg.tmul(&d, &d_k, false).expect("2 legs");
            s = alg.mul(&s_k, &s);
        }
        coproduct.push(d);
        counit.push(if m == 0 && n == 0 { CycNum::one() } else { CycNum::zero() });
        antipode.push(s);
    }
    (coproduct, counit, antipode)
}

/// Σ c·w(a)⊗w(b)⊗w(c) from word triples.
fn t3(alg: &SuperAlgebra, terms: &[(CycNum, &str, &str, &str)]) -> TensorElem {
    terms.iter().fold(TensorElem::zero(3), |acc, (k, a, b, c)| {
        acc.add(&alg.tensor(&[&word(alg, a), &word(alg, b), &word(alg, c)]).scale(k))
    })
}

fn t2(alg: &SuperAlgebra, terms: &[(CycNum, &str, &str)]) -> TensorElem {
    terms
        .iter()
        .fold(TensorElem::zero(2), |acc, (k, a, b)| acc.add(&alg.tensor(&[&word(alg, a), &word(alg, b)]).scale(k)))
}

fn sector3(alg: &SuperAlgebra, el: &QElements, a: usize, b: usize, cc: usize) -> TensorElem {
    let pick = |s: usize| if s == 0 { &el.e0 } else { &el.e1 };
    alg.tensor(&[pick(a), pick(b), pick(cc)])
}

fn sector2(alg: &SuperAlgebra, el: &QElements, a: usize, b: usize) -> TensorElem {
    let pick = |s: usize| if s == 0 { &el.e0 } else { &el.e1 };
    alg.tensor(&[pick(a), pick(b)])
}

/// The coassociator from its component list over the PBW basis.
pub fn build_phi(alg: &SuperAlgebra, beta: &CycNum) -> TensorElem {
    let el = QElements::new(alg);
    let i = CycNum::i();
    let phi010 = t3(
        alg,
        &[
            (c(1), "1", "1", "1"),
            (-cx(1, 1), "E", "K", "F"),
            (cx(1, -1), "FK", "K", "EK"),
            (c(2), "EFK", "1", "EFK"),
        ],
    );
    let phi101 = t3(
        alg,
        &[
            (cx(-1, 1), "1", "F", "EK"),
            (c(1), "1", "K", "1"),
            (c(2), "1", "EF", "EFK"),
            (-cx(1, 1), "1", "EK", "F"),
            (-cx(1, 1), "E", "FK", "1"),
            (cx(0, 2), "E", "EFK", "F"),
            (cx(1, -1), "FK", "E", "1"),
            (cx(0, -2), "FK", "EFK", "EK"),
            (c(-2), "EFK", "EF", "1"),
        ],
    );
    let phi111 = t3(
        alg,
        &[
            (cx(1, 1), "1", "F", "EK"),
            (c(-1), "1", "K", "1"),
            (c(-2), "1", "EF", "1"),
            (cx(0, -2), "1", "EF", "EFK"),
            (cx(1, 1), "1", "EK", "F"),
            (-cx(1, 1), "E", "1", "F"),
            (cx(1, 1), "E", "FK", "1"),
            (cx(0, 2), "E", "FK", "EFK"),
            (c(2), "E", "EFK", "F"),
            (-cx(1, 1), "FK", "1", "EK"),
            (cx(1, 1), "FK", "E", "1"),
            (cx(0, 2), "FK", "E", "EFK"),
            (c(2), "FK", "EFK", "EK"),
            (cx(0, 2), "EFK", "F", "EK"),
            (cx(0, 2), "EFK", "K", "EFK"),
            (cx(0, -2), "EFK", "EF", "1"),
            (cx(0, 2), "EFK", "EK", "F"),
            (c(4), "EFK", "EF", "EFK"),
        ],
    )
    .scale(&(&i * &beta.pow(2)));
    assemble_phi(alg, &el, &phi010, &phi101, &phi111)
}

fn assemble_phi(
    alg: &SuperAlgebra,
    el: &QElements,
    phi010: &TensorElem,
    phi101: &TensorElem,
    phi111: &TensorElem,
) -> TensorElem {
    let s = |a, b, cc| sector3(alg, el, a, b, cc);
    let mul = |x: &TensorElem, y: &TensorElem| alg.tmul(x, y, false).expect("3 legs");
    s(0, 0, 0)
        .add(&s(1, 0, 0))
        .add(&mul(phi010, &s(0, 1, 0)))
        .add(&s(0, 0, 1))
        .add(&s(1, 1, 0))
        .add(&mul(phi101, &s(1, 0, 1)))
        .add(&s(0, 1, 1))
        .add(&mul(phi111, &s(1, 1, 1)))
}

/// The coassociator from the factorised f± form.
pub fn build_phi_factorised(alg: &SuperAlgebra, beta: &CycNum) -> TensorElem {
    let el = QElements::new(alg);
    let i = CycNum::i();
    let one = alg.unit();
    let fpk = alg.mul(&el.fp, &el.k);
    let fmk = alg.mul(&el.fm, &el.k);
    let fmfp = alg.mul(&el.fm, &el.fp);
    let k = &el.k;
    let u3 = alg.tensor_unit(3);
    let tt = |a: &Elem, b: &Elem, cc: &Elem| alg.tensor(&[a, b, cc]);
    let mul = |xs: &[&TensorElem]| alg.tmul_all(xs, false).expect("3 legs");
    let k_mid = tt(one, k, one);

    let phi010 = mul(&[
        &u3.add(&tt(&fpk, k, &el.fm).scale(&cx(1, 1))),
        &u3.add(&tt(&fmk, k, &el.fp).scale(&cx(1, -1))),
    ]);
    let phi101 = mul(&[
        &u3.add(&tt(one, &fpk, &el.fm).scale(&cx(1, 1))).add(&tt(&fmk, &el.fp, one).scale(&cx(1, -1))),
        &u3.add(&tt(&fpk, &el.fm, one).scale(&cx(1, 1))).add(&tt(one, &fmk, &el.fp).scale(&cx(1, -1))),
        &k_mid,
    ]);
    let im1 = cx(-1, 1);
    let a = tt(one, &fpk, &el.fm)
        .add(&tt(&fpk, k, &el.fm))
        .sub(&tt(&fpk, &el.fm, one))
        .add(&tt(one, &fmfp, one));
    let b = tt(one, &fmk, &el.fp)
        .add(&tt(&fmk, k, &el.fp))
        .sub(&tt(&fmk, &el.fp, one))
        .sub(&tt(one, &fmfp, one));
    let phi111 = mul(&[
        &u3.add(&a.scale(&im1)),
        &u3.sub(&b.scale(&im1)),
        &u3.sub(&tt(one, &fmfp, one).scale(&c(2))),
        &k_mid,
    ])
    .scale(&(beta.pow(2) * i.inv().expect("i ≠ 0")));
    assemble_phi(alg, &el, &phi010, &phi101, &phi111)
}

/// Φ_ε = 1⊗1⊗1 + (ε−1)e₁⊗e₁⊗e₁.
pub fn build_phi_eps(alg: &SuperAlgebra, eps: i64) -> TensorElem {
    let el = QElements::new(alg);
    alg.tensor_unit(3).add(&sector3(alg, &el, 1, 1, 1).scale(&c(eps - 1)))
}

/// Rst = ½Σ(−1)^{mn}K^m⊗K^n(1⊗1 + 2iE⊗F).
pub fn build_rst(alg: &SuperAlgebra) -> TensorElem {
    let w = |s: &str| word(alg, s);
    let mut pref = TensorElem::zero(2);
    for m in 0..2u32 {
        for n in 0..2u32 {
            let sign = if m * n == 1 { -1 } else { 1 };
            pref = pref.add(&alg.tensor(&[&alg.pow(&w("K"), m), &alg.pow(&w("K"), n)]).scale(&CycNum::frac(sign, 2)));
        }
    }
    let body = t2(alg, &[(c(1), "1", "1"), (cx(0, 2), "E", "F")]);
    alg.tmul(&pref, &body, false).expect("2 legs")
}

/// R from its four sector blocks.
pub fn build_r(alg: &SuperAlgebra, beta: &CycNum) -> TensorElem {
    let el = QElements::new(alg);
    let half = CycNum::frac(1, 2);
    let mul = |x: &TensorElem, y: &TensorElem| alg.tmul(x, y, false).expect("2 legs");
    let r00 = mul(
        &t2(alg, &[(c(1), "1", "1"), (c(1), "1", "K"), (c(1), "K", "1"), (c(-1), "K", "K")]).scale(&half),
        &t2(alg, &[(c(1), "1", "1"), (cx(0, 2), "E", "F")]),
    );
    let r01 = mul(
        &t2(alg, &[(c(1), "1", "1"), (cx(0, -1), "1", "K"), (c(1), "K", "1"), (cx(0, 1), "K", "K")]).scale(&half),
        &t2(
            alg,
            &[
                (c(1), "1", "1"),
                (cx(1, -1), "FK", "EK"),
                (-cx(1, -1), "E", "F"),
                (cx(1, 1), "EFK", "1"),
                (cx(0, 2), "EFK", "EFK"),
            ],
        ),
    );
    let r10 = mul(
        &t2(alg, &[(c(1), "1", "1"), (c(1), "1", "K"), (cx(0, -1), "K", "1"), (cx(0, 1), "K", "K")]).scale(&half),
        &t2(
            alg,
            &[
                (c(1), "1", "K"),
                (cx(1, -1), "FK", "E"),
                (cx(1, -1), "E", "FK"),
                (-cx(1, -1), "1", "EF"),
                (cx(0, -2), "EFK", "EF"),
            ],
        ),
    );
    let r11 = mul(
        &t2(alg, &[(c(1), "1", "1"), (cx(0, -1), "1", "K"), (cx(0, -1), "K", "1"), (c(1), "K", "K")])
            .scale(&(beta * &half)),
        &t2(
            alg,
            &[
                (cx(0, -1), "K", "1"),
                (cx(0, 2), "EK", "F"),
                (cx(1, -1), "K", "EFK"),
                (-cx(1, 1), "EF", "1"),
                (cx(0, -2), "EF", "EFK"),
            ],
        ),
    );
    let s = |a, b| sector2(alg, &el, a, b);
    mul(&r00, &s(0, 0)).add(&mul(&r01, &s(0, 1))).add(&mul(&r10, &s(1, 0))).add(&mul(&r11, &s(1, 1)))
}

/// v = (e₀ − iβKe₁)(1 − 2f⁺f⁻).
pub fn ribbon_v(alg: &SuperAlgebra, beta: &CycNum) -> Elem {
    let el = QElements::new(alg);
    let i = CycNum::i();
    let left = el.e0.sub(&alg.mul(&el.k, &el.e1).scale(&(&i * beta)));
    let right = alg.unit().sub(&alg.mul(&el.fp, &el.fm).scale(&c(2)));
    alg.mul(&left, &right)
}

/// v = e₀ + β(e₁⁺ − e₁⁻) + 2i(w⁺ − w⁻).
pub fn ribbon_v_decomposition(alg: &SuperAlgebra, beta: &CycNum) -> Elem {
    let el = QElements::new(alg);
    el.e0.add(&el.e1p.sub(&el.e1m).scale(beta)).add(&el.wp.sub(&el.wm).scale(&cx(0, 2)))
}

/// θ = e₀(1 + 2f⁺f⁻) − iβ⁻¹e₁K(1 − 2f⁺f⁻).
pub fn theta_element(alg: &SuperAlgebra, beta: &CycNum) -> Elem {
    let el = QElements::new(alg);
    let i = CycNum::i();
    let fpfm2 = alg.mul(&el.fp, &el.fm).scale(&c(2));
    let one = alg.unit();
    let a = alg.mul(&el.e0, &one.add(&fpfm2));
    let b = alg.mul_all(&[&el.e1, &el.k, &one.sub(&fpfm2)]).scale(&(&i * &beta.inv().expect("β ≠ 0")));
    a.sub(&b)
}

/// Closed-form monodromy, a quadruple sum over m, n ∈ {0,1} and i, j ∈ {0..3}.
pub fn monodromy_closed_form(alg: &SuperAlgebra, beta: &CycNum) -> TensorElem {
    let q = CycNum::i();
    let b2q = beta.pow(2) * q.inv().expect("q ≠ 0");
    let qq = &q - &q.inv().expect("q ≠ 0");
    let mut m_total = TensorElem::zero(2);
    for m in 0..2i64 {
        for n in 0..2i64 {
            for ii in 0..4i64 {
                for j in 0..4i64 {
                    let e1 = ii * j + m * (ii + j + 1);
                    let e2 = -m * m - m * j + 2 * n * j - 2 * n * ii - ii * j + m * ii;
                    let coef = b2q.powi(e1).expect("nonzero") * qq.pow((m + n) as u32) * q.powi(e2).expect("nonzero");
                    let left = format!("{}{}K{}", if m == 1 { "F" } else { "" }, if n == 1 { "E" } else { "" }, j);
                    let right = format!("{}{}K{}", if m == 1 { "E" } else { "" }, if n == 1 { "F" } else { "" }, ii);
                    m_total = m_total.add(&alg.tensor(&[&word(alg, &left), &word(alg, &right)]).scale(&coef));
                }
            }
        }
    }
    m_total.scale(&CycNum::frac(1, 4))
}

/// μ(E^mF^nK^l) = (β²/i)δ_{m1}δ_{n1}δ_{l3}.
pub fn integral(beta: &CycNum) -> Vec<CycNum> {
    let s = beta.pow(2) * CycNum::i().inv().expect("i ≠ 0");
    (0..DIM).map(|b| if b == idx(1, 1, 3) { s.clone() } else { CycNum::zero() }).collect()
}

/// c = (β²/i)EFΣK^j.
pub fn cointegral(alg: &SuperAlgebra, beta: &CycNum) -> Elem {
    let s = beta.pow(2) * CycNum::i().inv().expect("i ≠ 0");
    (0..4).fold(Elem::zero(), |acc, j| acc.add(&word(alg, &format!("EFK{j}")))).scale(&s)
}

/// A simple Q-module given by action matrices.
#[derive(Clone, Debug, Serialize)]
pub struct SimpleModule {
    pub name: String,
    pub dim: usize,
    pub e: Matrix,
    pub f: Matrix,
    pub k: Matrix,
}

impl SimpleModule {
    /// Matrix of a PBW basis element E^mF^nK^l.
    pub fn basis_matrix(&self, b: usize) -> Matrix {
        let (m, n, l) = pbw(b);
        let mut acc = linalg::identity(self.dim);
        if m == 1 {
            acc = linalg::mat_mul(&acc, &self.e);
        }
        if n == 1 {
            acc = linalg::mat_mul(&acc, &self.f);
        }
        for _ in 0..l {
            acc = linalg::mat_mul(&acc, &self.k);
        }
        acc
    }

    pub fn elem_matrix(&self, a: &Elem) -> Matrix {
        let mut acc = vec![vec![CycNum::zero(); self.dim]; self.dim];
        for (b, coef) in a.iter() {
            let mb = self.basis_matrix(b);
            for r in 0..self.dim {
                for s in 0..self.dim {
                    acc[r][s] = &acc[r][s] + &(coef * &mb[r][s]);
                }
            }
        }
        acc
    }

    /// Check the defining relations of Q on the action matrices.
    pub fn relations_hold(&self) -> bool {
        let mm = |a: &Matrix, b: &Matrix| linalg::mat_mul(a, b);
        let zero = vec![vec![CycNum::zero(); self.dim]; self.dim];
        let id = linalg::identity(self.dim);
        let neg = |a: &Matrix| linalg::mat_scale(a, &c(-1));
        let k2 = mm(&self.k, &self.k);
        let k3 = mm(&k2, &self.k);
        let k4 = mm(&k2, &k2);
        let comm = {
            let ef = mm(&self.e, &self.f);
            let fe = mm(&self.f, &self.e);
            ef.iter().zip(fe.iter()).map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| p - q).collect()).collect::<Matrix>()
        };
        let want = {
            let s = CycNum::i() * CycNum::frac(-1, 2);
            self.k.iter().zip(k3.iter()).map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q) * &s).collect()).collect::<Matrix>()
        };
        mm(&self.e, &self.e) == zero
            && mm(&self.f, &self.f) == zero
            && k4 == id
            && mm(&self.k, &self.e) == neg(&mm(&self.e, &self.k))
            && mm(&self.k, &self.f) == neg(&mm(&self.f, &self.k))
            && comm == want
    }
}

/// X⁺₁, X⁻₁, X⁺₂, X⁻₂.
pub fn simple_modules() -> Vec<SimpleModule> {
    let z = CycNum::zero;
    let i = CycNum::i();
    let one_dim = |name: &str, w: i64| SimpleModule {
        name: name.into(),
        dim: 1,
        e: vec![vec![z()]],
        f: vec![vec![z()]],
        k: vec![vec![c(w)]],
    };
    // columns are images: K v₀ = ±i v₀, K v₁ = ∓i v₁, E v₁ = ±v₀, F v₀ = v₁
    let two_dim = |name: &str, s: i64| SimpleModule {
        name: name.into(),
        dim: 2,
        e: vec![vec![z(), c(s)], vec![z(), z()]],
        f: vec![vec![z(), z()], vec![c(1), z()]],
        k: vec![vec![&i * &c(s), z()], vec![z(), &i * &c(-s)]],
    };
    vec![one_dim("X+1", 1), one_dim("X-1", -1), two_dim("X+2", 1), two_dim("X-2", -1)]
}

/// Q together with its quasi-Hopf data for one choice of β.
#[derive(Clone, Debug)]
pub struct QModel {
    pub beta: CycNum,
    pub hopf: QuasiHopfData,
    pub el: QElements,
    pub v: Elem,
    pub u: Elem,
    pub g: Elem,
    /// Normalised right integral as a covector on the PBW basis.
    pub mu: Vec<CycNum>,
    pub coint: Elem,
    pub monodromy: TensorElem,
}

/// β_el = e₀ − 2iβ²Ce₁.
pub fn beta_element(alg: &SuperAlgebra, beta: &CycNum) -> Elem {
    let el = QElements::new(alg);
    let k = cx(0, -2) * beta.pow(2);
    el.e0.add(&alg.mul(&el.casimir, &el.e1).scale(&k))
}

pub fn q_spec(beta: &CycNum) -> QuasiHopfSpec {
    let alg = q_algebra();
    let (coproduct, counit, antipode) = q_tables(&alg);
    QuasiHopfSpec {
        phi: build_phi(&alg, beta),
        r: Some(build_r(&alg, beta)),
        alpha: alg.unit().clone(),
        beta_el: beta_element(&alg, beta),
        algebra: alg,
        sup: false,
        coproduct,
        counit,
        antipode,
    }
}

pub fn build_q(beta: &CycNum) -> Result<QModel, QhError> {
    let hopf = QuasiHopfData::new(q_spec(beta))?;
    let alg = &hopf.algebra;
    let el = QElements::new(alg);
    let v = ribbon_v(alg, beta);
    let u = hopf.drinfeld_u()?;
    let v_inv = hopf.inv(&v)?;
    let g = alg.mul_all(&[&hopf.beta_el, &hopf.s(&hopf.alpha), &v_inv, &u]);
    let monodromy = hopf.monodromy()?;
    let mu = integral(beta);
    let coint = cointegral(alg, beta);
    Ok(QModel { beta: beta.clone(), el, v, u, g, mu, coint, monodromy, hopf })
}

/// Central basis {ρ, φ, κ₀, κ₁, κ₂} with 𝒮 and 𝒯 as matrices whose column j
/// holds the coordinates of the image of basis vector j.
#[derive(Clone, Debug, Serialize)]
pub struct Sl2zAction {
    pub names: Vec<String>,
    pub s: Matrix,
    pub t: Matrix,
    pub b: CycNum,
}

/// Images of the four simple modules under χ∘qTr and φ∘qTr.
#[derive(Clone, Debug)]
pub struct CharacterImages {
    /// χ(qTr) for X⁺₁, X⁻₁, X⁺₂, X⁻₂.
    pub chi: [Elem; 4],
    /// φ(qTr) for X⁺₁, X⁻₁, X⁺₂, X⁻₂.
    pub phi: [Elem; 4],
}

pub const SL2Z_BASIS: [&str; 5] = ["rho", "phi", "kappa0", "kappa1", "kappa2"];

impl QModel {
    pub fn alg(&self) -> &SuperAlgebra {
        &self.hopf.algebra
    }

    /// Full axiom and ribbon report.
    pub fn verify(&self) -> Result<VerificationReport, QhError> {
        let mut rep = self.hopf.verify_axioms();
        for c in self.hopf.verify_gamma()? {
            rep.push(c);
        }
        rep.push(self.hopf.verify_s_squared(&self.u)?);
        for c in self.hopf.verify_ribbon(&self.v)? {
            rep.push(c);
        }
        Ok(rep)
    }

    pub fn mu_of(&self, a: &Elem) -> CycNum {
        a.iter().map(|(b, c)| c * &self.mu[b]).sum()
    }

    /// χ(f) = (f⊗id)M.
    pub fn drinfeld_map(&self, f: &[CycNum]) -> Elem {
        self.alg().contract(&self.monodromy, 0, f).to_elem()
    }

    /// φ(f) = Σ f(c′)c″.
    pub fn radford_map(&self, f: &[CycNum]) -> Elem {
        self.alg().contract(&self.hopf.delta(&self.coint), 0, f).to_elem()
    }

    /// φ⁻¹(x) = μ(S(x)·−).
    pub fn radford_inverse(&self, x: &Elem) -> Vec<CycNum> {
        let sx = self.hopf.s(x);
        (0..DIM).map(|b| self.mu_of(&self.alg().mul(&sx, &Elem::basis(b)))).collect()
    }

    /// Matrix of χ: column b is χ of the dual basis covector δ_b.
    pub fn drinfeld_matrix(&self) -> Matrix {
        let mut m = vec![vec![CycNum::zero(); DIM]; DIM];
        for (key, coef) in self.monodromy.raw_terms() {
            let ix = crate::tensor::unpack(key, 2);
            m[ix[1]][ix[0]] = &m[ix[1]][ix[0]] + coef;
        }
        m
    }

    /// Unique covector f with χ(f) = a, if any.
    pub fn drinfeld_inverse(&self, a: &Elem) -> Option<Vec<CycNum>> {
        let rows = self.drinfeld_matrix().iter().map(|r| linalg::dense_to_sparse(r)).collect();
        let sol = linalg::solve(rows, a.to_dense(DIM), DIM).ok()?;
        if sol.dim() != 0 {
            return None;
        }
        Some(sol.particular)
    }

    /// qTr_V = Tr_V(g⁻¹·−).
    pub fn qtrace(&self, module: &SimpleModule) -> Result<Vec<CycNum>, QhError> {
        let g_inv = self.hopf.inv(&self.g)?;
        Ok((0..DIM)
            .map(|b| {
                let m = module.elem_matrix(&self.alg().mul(&g_inv, &Elem::basis(b)));
                (0..module.dim).map(|k| m[k][k].clone()).sum()
            })
            .collect())
    }

    /// Basis of Ch(A) = {f : f(xy) = f(S²(y)x)}.
    pub fn char_space(&self) -> Vec<Vec<CycNum>> {
        let alg = self.alg();
        let mut rows = Vec::new();
        for x in 0..DIM {
            for y in 0..DIM {
                let ex = Elem::basis(x);
                let ey = Elem::basis(y);
                let s2y = self.hopf.s(&self.hopf.s(&ey));
                let d = alg.mul(&ex, &ey).sub(&alg.mul(&s2y, &ex));
                if !d.is_zero() {
                    rows.push(d.to_dense(DIM));
                }
            }
        }
        linalg::nullspace(&rows, DIM)
    }

    /// Does f satisfy f(xy) = f(S²(y)x) on all basis pairs?
    pub fn is_q_character(&self, f: &[CycNum]) -> bool {
        let alg = self.alg();
        let ev = |a: &Elem| -> CycNum { a.iter().map(|(b, c)| c * &f[b]).sum() };
        (0..DIM).all(|x| {
            (0..DIM).all(|y| {
                let ex = Elem::basis(x);
                let ey = Elem::basis(y);
                let s2y = self.hopf.s(&self.hopf.s(&ey));
                ev(&alg.mul(&ex, &ey)) == ev(&alg.mul(&s2y, &ex))
            })
        })
    }

    pub fn character_images(&self) -> Result<CharacterImages, QhError> {
        let mods = simple_modules();
        let mut chi = Vec::new();
        let mut phi = Vec::new();
        for m in &mods {
            let q = self.qtrace(m)?;
            chi.push(self.drinfeld_map(&q));
            phi.push(self.radford_map(&q));
        }
        let arr = |v: Vec<Elem>| -> [Elem; 4] { v.try_into().expect("four modules") };
        Ok(CharacterImages { chi: arr(chi), phi: arr(phi) })
    }

    /// ρ, φ, κ₀, κ₁, κ₂ built from the character images.
    pub fn sl2z_basis(&self) -> Result<[Elem; 5], QhError> {
        let im = self.character_images()?;
        let [c1p, c1m, c2p, c2m] = &im.chi;
        let [p1p, p1m, _, _] = &im.phi;
        let rho = c1p.sub(c1m).scale(&CycNum::frac(1, 2));
        let phi = p1p.sub(p1m).scale(&(CycNum::i() * CycNum::frac(1, 2)));
        Ok([rho, phi, c2m.clone(), c1p.add(c1m), c2p.clone()])
    }

    /// 𝒮(a) = φ(χ⁻¹(a)).
    pub fn s_map(&self, a: &Elem) -> Result<Elem, QhError> {
        let f = self.drinfeld_inverse(a).ok_or_else(|| QhError::Shape("χ is not invertible on this element".into()))?;
        Ok(self.radford_map(&f))
    }

    /// 𝒮 and 𝒯 on the centre; 𝒮⁻¹ is the inverse of the 5×5 matrix of 𝒮.
    pub fn sl2z_action(&self) -> Result<Sl2zAction, QhError> {
        let basis = self.sl2z_basis()?;
        let sparse: Vec<_> = basis.iter().map(|e| linalg::dense_to_sparse(&e.to_dense(DIM))).collect();
        let coords = |a: &Elem| -> Result<Vec<CycNum>, QhError> {
            linalg::coordinates(&sparse, &linalg::dense_to_sparse(&a.to_dense(DIM)))
                .ok_or_else(|| QhError::Shape("image leaves the centre".into()))
        };
        let n = basis.len();
        let mut s = vec![vec![CycNum::zero(); n]; n];
        let mut vs = vec![vec![CycNum::zero(); n]; n];
        for (j, a) in basis.iter().enumerate() {
            let sa = self.s_map(a)?;
            let col = coords(&sa)?;
            let vcol = coords(&self.alg().mul(&self.v, &sa))?;
            for r in 0..n {
                s[r][j] = col[r].clone();
                vs[r][j] = vcol[r].clone();
            }
        }
        let s_inv = linalg::mat_inverse(&s).map_err(|_| QhError::Shape("𝒮 is singular on the centre".into()))?;
        let b = projectivity_factor(&self.beta);
        let t = linalg::mat_scale(&linalg::mat_mul(&s_inv, &vs), &b);
        Ok(Sl2zAction { names: SL2Z_BASIS.iter().map(|x| x.to_string()).collect(), s, t, b })
    }
}

fn compare_mats(name: &str, a: &Matrix, b: &Matrix) -> Check {
    let flat = |m: &Matrix| Elem::from_dense(&m.concat());
    Check::compare_elems(name, &flat(a), &flat(b))
}

impl Sl2zAction {
    /// 𝒮² = id and (𝒮𝒯)³ = id.
    pub fn relations(&self) -> Vec<Check> {
        let id = linalg::identity(self.s.len());
        let st = linalg::mat_mul(&self.s, &self.t);
        let st3 = linalg::mat_mul(&linalg::mat_mul(&st, &st), &st);
        vec![
            compare_mats("s_squared_identity", &linalg::mat_mul(&self.s, &self.s), &id),
            compare_mats("st_cubed_identity", &st3, &id),
        ]
    }

    /// Entry-by-entry comparison with the closed form.
    pub fn against_reference(&self, beta: &CycNum) -> Vec<Check> {
        let (s, t) = reference_sl2z(beta);
        vec![compare_mats("s_matrix_reference", &self.s, &s), compare_mats("t_matrix_reference", &self.t, &t)]
    }

    /// P𝒮P and P𝒯P against the action computed at −β.
    pub fn conjugacy(&self, flipped: &Sl2zAction) -> Check {
        let p = beta_flip_matrix();
        let conj = |m: &Matrix| linalg::mat_mul(&linalg::mat_mul(&p, m), &p);
        Check::all(
            "beta_flip_conjugacy",
            vec![compare_mats("", &conj(&self.s), &flipped.s), compare_mats("", &conj(&self.t), &flipped.t)],
        )
    }
}

/// b = β²ζ⁸.
pub fn projectivity_factor(beta: &CycNum) -> CycNum {
    beta.pow(2) * CycNum::zeta_pow(8)
}

/// Closed-form 𝒮 and 𝒯 in the basis {ρ, φ, κ₀, κ₁, κ₂}.
pub fn reference_sl2z(beta: &CycNum) -> (Matrix, Matrix) {
    let z = CycNum::zero;
    let h = CycNum::frac(1, 2);
    let i = CycNum::i();
    let b = projectivity_factor(beta);
    let mut s = vec![vec![z(); 5]; 5];
    s[1][0] = -&i;
    s[0][1] = i.clone();
    // columns κ₀, κ₁, κ₂
    let k = [[h.clone(), -&c(1), h.clone()], [-&h, z(), h.clone()], [h.clone(), c(1), h.clone()]];
    for (j, col) in k.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            s[2 + r][2 + j] = x.clone();
        }
    }
    let mut t = vec![vec![z(); 5]; 5];
    t[0][0] = b.clone();
    t[1][1] = b.clone();
    t[0][1] = -(&b * &i * beta.pow(2).inv().expect("β ≠ 0"));
    t[2][2] = -(&b * beta);
    t[3][3] = b.clone();
    t[4][4] = &b * beta;
    (s, t)
}

/// Conjugation P relating the actions at β and −β: κ₀↔κ₂, κ₁ ↦ −κ₁.
pub fn beta_flip_matrix() -> Matrix {
    let mut p = vec![vec![CycNum::zero(); 5]; 5];
    p[0][0] = c(1);
    p[1][1] = c(1);
    p[2][4] = c(1);
    p[4][2] = c(1);
    p[3][3] = c(-1);
    p
}

/// The 8-dimensional Hopf quotient Q/(K²−1) with Rst and trivial Φ.
pub fn quotient_q0() -> Result<QuasiHopfData, QhError> {
    let q = q_algebra();
    let (cop, cou, ant) = q_tables(&q);
    // representatives E^mF^nK^l with l ∈ {0,1}; the index in Q0 is 4m + 2n + l
    let reps: Vec<usize> = (0..8).map(|k| idx(k / 4, (k / 2) % 2, k % 2)).collect();
    let project = |i: usize| -> usize {
        let (m, n, l) = pbw(i);
        4 * m + 2 * n + (l % 2)
    };
    let proj_elem = |a: &Elem| -> Elem {
        let mut out = Elem::zero();
        for (i, c) in a.iter() {
            out.add_term(project(i), c);
        }
        out
    };
    let proj_tensor = |t: &TensorElem| -> TensorElem {
        let mut out = TensorElem::zero(t.legs());
        for (ix, c) in t.iter() {
            let p: Vec<usize> = ix.iter().map(|&i| project(i)).collect();
            out.add_indexed(&p, c);
        }
        out
    };
    let labels = reps.iter().map(|&r| pbw_label(r)).collect();
    let mult = reps.iter().map(|&a| reps.iter().map(|&b| proj_elem(&q.basis_product(a, b))).collect()).collect();
    let algebra = SuperAlgebra::new("uqsl2_q0", labels, vec![0; 8], mult, Elem::basis(0))?;
    let spec = QuasiHopfSpec {
        coproduct: reps.iter().map(|&r| proj_tensor(&cop[r])).collect(),
        counit: reps.iter().map(|&r| cou[r].clone()).collect(),
        antipode: reps.iter().map(|&r| proj_elem(&ant[r])).collect(),
        phi: algebra.tensor_unit(3),
        r: Some(proj_tensor(&build_rst(&q))),
        alpha: algebra.unit().clone(),
        beta_el: algebra.unit().clone(),
        sup: false,
        algebra,
    };
    QuasiHopfData::new(spec)
}

/// Image of a Q tensor in the quotient Q0 (K² ↦ 1).
pub fn project_to_q0(t: &TensorElem) -> TensorElem {
    let mut out = TensorElem::zero(t.legs());
    for (ix, c) in t.iter() {
        let p: Vec<usize> = ix
            .iter()
            .map(|&i| {
                let (m, n, l) = pbw(i);
                4 * m + 2 * n + (l % 2)
            })
            .collect();
        out.add_indexed(&p, c);
    }
    out
}

/// The (e₀⊗e₀)-block of R against Rst and R₂₁R against its closed form.
pub fn r_consistency(model: &QModel) -> Result<Vec<Check>, QhError> {
    let alg = model.alg();
    let h = &model.hopf;
    let r = h.r.as_ref().ok_or(QhError::MissingR)?;
    let p00 = alg.tensor(&[&model.el.e0, &model.el.e0]);
    Ok(vec![
        Check::compare("r_00_standard", &h.tmul(r, &p00), &h.tmul(&build_rst(alg), &p00)),
        Check::compare("monodromy_closed_form", &h.monodromy()?, &monodromy_closed_form(alg, &model.beta)),
    ])
}

/// Checks on the named elements, integrals and character images.
pub fn verify_appendix(model: &QModel) -> Result<Vec<Check>, QhError> {
    let alg = model.alg();
    let h = &model.hopf;
    let el = &model.el;
    let mut out = Vec::new();
    let mu_delta = (0..DIM)
        .map(|b| {
            let lhs = alg.contract(&h.delta(&Elem::basis(b)), 0, &model.mu).to_elem();
            Check::compare_elems("", &lhs, &alg.unit().scale(&model.mu[b]))
        })
        .collect();
    out.push(Check::all("right_integral", mu_delta));
    let coint = (0..DIM)
        .map(|b| {
            let x = Elem::basis(b);
            let eps_c = model.coint.scale(&h.counit[b]);
            Check::all(
                "",
                vec![
                    Check::compare_elems("", &alg.mul(&x, &model.coint), &eps_c),
                    Check::compare_elems("", &alg.mul(&model.coint, &x), &eps_c),
                ],
            )
        })
        .collect();
    out.push(Check::all("cointegral", coint));
    out.push(Check::compare_scalars("mu_of_c", &model.mu_of(&model.coint), &CycNum::one()));
    let mm = alg.contract(&alg.contract(&model.monodromy, 0, &model.mu), 0, &model.mu).to_scalar();
    out.push(Check::compare_scalars("mu_mu_M", &mm, &CycNum::one()));
    out.push(Check::compare("monodromy_closed_form", &model.monodromy, &monodromy_closed_form(alg, &model.beta)));
    out.push(Check::compare_elems("ribbon_decomposition", &model.v, &ribbon_v_decomposition(alg, &model.beta)));
    out.push(Check::compare_elems("ribbon_inverse", &alg.mul(&model.v, &theta_element(alg, &model.beta)), alg.unit()));
    let b2 = model.beta.pow(2);
    let expected_g = if b2 == CycNum::i() { el.k_inv.clone() } else { el.k.clone() };
    out.push(Check::compare_elems("balancing_g", &model.g, &expected_g));
    out.push(Check::compare("g_grouplike", &h.delta(&model.g), &alg.tensor(&[&model.g, &model.g])));
    let im = model.character_images()?;
    let four_c = el.casimir.scale(&c(4));
    let m4ck2 = alg.mul(&el.casimir, &word(alg, "K2")).scale(&c(-4));
    let (c2p, c2m) = if b2 == CycNum::i() { (four_c, m4ck2) } else { (m4ck2, four_c) };
    let chi_exp = [alg.unit().clone(), word(alg, "K2").neg(), c2p, c2m];
    let chi_checks = im.chi.iter().zip(chi_exp.iter()).map(|(a, b)| Check::compare_elems("", a, b)).collect();
    out.push(Check::all("drinfeld_images", chi_checks));
    let s4 = &b2 * &c(4) * CycNum::i().inv().expect("i ≠ 0");
    let phi_exp = [el.wp.scale(&s4), el.wm.scale(&s4), el.e1p.scale(&c(4)), el.e1m.scale(&c(-4))];
    let phi_checks = im.phi.iter().zip(phi_exp.iter()).map(|(a, b)| Check::compare_elems("", a, b)).collect();
    out.push(Check::all("radford_images", phi_checks));
    let mut qchars = Vec::new();
    for m in simple_modules() {
        qchars.push(Check::flag("", model.is_q_character(&model.qtrace(&m)?)));
    }
    out.push(Check::all("qtrace_in_ch", qchars));
    out.push(Check::flag("centre_dim_5", center(alg).len() == 5));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::all_betas;

    #[test]
    fn phi_forms_agree() {
        let alg = q_algebra();
        for b in all_betas() {
            assert_eq!(build_phi(&alg, &b), build_phi_factorised(&alg, &b));
        }
    }

    #[test]
    fn q_axioms_and_appendix_every_beta() {
        for b in all_betas() {
            let m = build_q(&b).expect("builds");
            for c in m
                .verify()
                .expect("verifies")
                .checks
                .iter()
                .chain(verify_appendix(&m).expect("appendix").iter())
                .chain(r_consistency(&m).expect("R present").iter())
            {
                assert!(c.pass, "{b}: {} at {:?}", c.name, c.first_failure);
            }
        }
    }

    #[test]
    fn sl2z_matches_reference_and_relations() {
        let actions: Vec<_> =
            all_betas().iter().map(|b| (b.clone(), build_q(b).expect("builds").sl2z_action().expect("action"))).collect();
        for (b, act) in &actions {
            for c in act.against_reference(b).into_iter().chain(act.relations()) {
                assert!(c.pass, "{b}: {}", c.name);
            }
            let (_, other) = actions.iter().find(|(o, _)| *o == -b).expect("−β present");
            assert!(act.conjugacy(other).pass, "{b}");
            assert!(!act.conjugacy(act).pass, "P must not commute with the action at {b}");
        }
    }

    #[test]
    fn simple_modules_are_modules() {
        let mods = simple_modules();
        assert_eq!(mods.iter().map(|m| m.dim).collect::<Vec<_>>(), vec![1, 1, 2, 2]);
        assert!(mods.iter().all(|m| m.relations_hold()));
    }

    #[test]
    fn phi_eps_and_rst() {
        let alg = q_algebra();
        let el = QElements::new(&alg);
        assert_eq!(build_phi_eps(&alg, 1), alg.tensor_unit(3));
        let want = alg.tensor_unit(3).sub(&alg.tensor(&[&el.e1, &el.e1, &el.e1]).scale(&c(2)));
        assert_eq!(build_phi_eps(&alg, -1), want);
        let q0 = quotient_q0().expect("q0");
        for c in q0.verify_axioms().checks {
            assert!(c.pass, "{}", c.name);
        }
        assert_eq!(project_to_q0(&build_rst(&alg)), q0.r.clone().expect("Rst"));
    }
}
