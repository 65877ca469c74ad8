//! Search for R-matrices: the linear intertwiner stage, hexagon constraints
//! as quadratic polynomials in the remaining parameters, and saturation by
//! linear elimination, square nullity and branching on factored quadratics.
//! Every branch records its substitutions so leaves can be replayed against
//! the original system.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::CycNum;
use crate::linalg::{self, SparseVec};
use crate::qhopf::{QhError, QuasiHopfData};
use crate::tensor::{pack, unpack, Elem, SuperAlgebra, TensorElem};
use crate::uqsl2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error(transparent)]
    Qh(#[from] QhError),
    #[error("linear stage is inconsistent")]
    Inconsistent,
    #[error("saturation exceeded {0} steps")]
    StepLimit(usize),
}

const NONE: u32 = u32::MAX;

/// A monomial of degree ≤ 2: (x, y) with x ≤ y; NONE marks a missing factor.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono(u32, u32);

impl Mono {
    pub const ONE: Mono = Mono(NONE, NONE);

    fn var(x: u32) -> Mono {
        Mono(x, NONE)
    }

    pub fn degree(self) -> usize {
        usize::from(self.0 != NONE) + usize::from(self.1 != NONE)
    }

    fn times(self, o: Mono) -> Mono {
        let mut f: Vec<u32> = [self.0, self.1, o.0, o.1].into_iter().filter(|&v| v != NONE).collect();
        assert!(f.len() <= 2, "degree above two");
        f.sort_unstable();
        match f.len() {
            0 => Mono::ONE,
            1 => Mono::var(f[0]),
            _ => Mono(f[0], f[1]),
        }
    }

    fn contains(self, x: u32) -> bool {
        self.0 == x || self.1 == x
    }
}

/// Polynomial of degree ≤ 2 over CycNum; terms sorted by monomial, no zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, CycNum)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: CycNum) -> Self {
        Self::from_map(std::iter::once((Mono::ONE, c)))
    }

    pub fn var(x: u32) -> Self {
        Poly { terms: vec![(Mono::var(x), CycNum::one())] }
    }

    fn from_map(it: impl IntoIterator<Item = (Mono, CycNum)>) -> Self {
        let mut m: BTreeMap<Mono, CycNum> = BTreeMap::new();
        for (k, c) in it {
            let e = m.entry(k).or_insert_with(CycNum::zero);
            *e = &*e + &c;
        }
        Poly { terms: m.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn terms(&self) -> &[(Mono, CycNum)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: Mono) -> CycNum {
        self.terms.binary_search_by(|(k, _)| k.cmp(&m)).map(|i| self.terms[i].1.clone()).unwrap_or_else(|_| CycNum::zero())
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<CycNum> {
        match self.terms.as_slice() {
            [] => Some(CycNum::zero()),
            [(Mono::ONE, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v: Vec<u32> =
            self.terms.iter().flat_map(|(m, _)| [m.0, m.1]).filter(|&x| x != NONE).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add(&self, o: &Poly) -> Poly {
        Self::from_map(self.terms.iter().chain(o.terms.iter()).cloned())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-CycNum::one()))
    }

    pub fn scale(&self, c: &CycNum) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        Self::from_map(self.terms.iter().flat_map(|(a, x)| o.terms.iter().map(move |(b, y)| (a.times(*b), x * y))))
    }

    /// Replace x by an affine polynomial.
    pub fn substitute(&self, x: u32, val: &Poly) -> Poly {
        if !self.terms.iter().any(|(m, _)| m.contains(x)) {
            return self.clone();
        }
        let mut out: Vec<(Mono, CycNum)> = Vec::new();
        for (m, c) in &self.terms {
            if !m.contains(x) {
                out.push((*m, c.clone()));
                continue;
            }
            let rest = if m.0 == x { m.1 } else { m.0 };
            let factor = if rest == x {
                val.mul(val)
            } else if rest == NONE {
                val.clone()
            } else {
                val.mul(&Poly::var(rest))
            };
            out.extend(factor.terms.into_iter().map(|(k, v)| (k, &v * c)));
        }
        Self::from_map(out)
    }

    pub fn eval(&self, values: &dyn Fn(u32) -> CycNum) -> CycNum {
        self.terms.iter().fold(CycNum::zero(), |acc, (m, c)| {
            let mut t = c.clone();
            for v in [m.0, m.1] {
                if v != NONE {
                    t = &t * &values(v);
                }
            }
            &acc + &t
        })
    }

    /// Scaled so that the first coefficient is 1.
    fn normalized(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero")),
        }
    }

    /// Linear in exactly the returned variable: coefficient and remainder.
    fn solve_for(&self, x: u32) -> Option<Poly> {
        if self.degree() != 1 {
            return None;
        }
        let c = self.coeff(Mono::var(x));
        let rest = Poly::from_map(self.terms.iter().filter(|(m, _)| *m != Mono::var(x)).cloned());
        Some(rest.scale(&-(c.inv().ok()?)))
    }

    /// x occurs only in the term c·x: x = −(rest)/c, possibly quadratic.
    fn solve_isolated(&self, x: u32) -> Option<Poly> {
        if self.terms.iter().any(|(m, _)| m.contains(x) && *m != Mono::var(x)) {
            return None;
        }
        let c = self.coeff(Mono::var(x));
        if c.is_zero() {
            return None;
        }
        let rest = Poly::from_map(self.terms.iter().filter(|(m, _)| *m != Mono::var(x)).cloned());
        Some(rest.scale(&-(c.inv().ok()?)))
    }

    /// c·(x−a)(y−b) with x ≠ y, or c·(x−a)(x−b): the two branch substitutions.
    fn binomial_roots(&self) -> Option<[(u32, CycNum); 2]> {
        if self.degree() != 2 {
            return None;
        }
        let quads: Vec<&(Mono, CycNum)> = self.terms.iter().filter(|(m, _)| m.degree() == 2).collect();
        if quads.len() != 1 {
            return None;
        }
        let (Mono(x, y), c) = quads[0].clone();
        let cinv = c.inv().ok()?;
        if x != y {
            let allowed = [Mono(x, y), Mono::var(x), Mono::var(y), Mono::ONE];
            if self.terms.iter().any(|(m, _)| !allowed.contains(m)) {
                return None;
            }
            // c(xy − bx − ay + ab)
            let b = -(&self.coeff(Mono::var(x)) * &cinv);
            let a = -(&self.coeff(Mono::var(y)) * &cinv);
            if &(&a * &b) * &c != self.coeff(Mono::ONE) {
                return None;
            }
            return Some([(x, a), (y, b)]);
        }
        if self.terms.iter().any(|(m, _)| !(m.contains(x) || *m == Mono::ONE)) {
            return None;
        }
        // x² + px + q with roots (−p ± √(p²−4q))/2
        let p = &self.coeff(Mono::var(x)) * &cinv;
        let q = &self.coeff(Mono::ONE) * &cinv;
        let disc = &(&p * &p) - &(&q * &CycNum::from_int(4));
        let s = cyc_sqrt(&disc)?;
        let half = CycNum::frac(1, 2);
        Some([(x, &(&-&p + &s) * &half), (x, &(&-&p - &s) * &half)])
    }
}

/// Exact square root in Q(ζ₂₄), if one exists. Clearing denominators makes the
/// root an algebraic integer, whose power-basis coordinates are integers; they
/// are located through the eight complex embeddings and then checked exactly.
fn cyc_sqrt(d: &CycNum) -> Option<CycNum> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    if d.is_zero() {
        return Some(CycNum::zero());
    }
    let m = d.rational_coeffs().iter().fold(num_bigint::BigInt::from(1), |acc, (_, q)| acc.lcm(q));
    let mc = CycNum::from_big_rationals(&std::array::from_fn(|k| {
        if k == 0 {
            (m.clone(), num_bigint::BigInt::from(1))
        } else {
            (num_bigint::BigInt::from(0), num_bigint::BigInt::from(1))
        }
    }))
    .ok()?;
    let target = &(d * &mc) * &mc;
    const UNITS: [i64; 8] = [1, 5, 7, 11, 13, 17, 19, 23];
    let roots: Vec<(f64, f64)> = UNITS
        .iter()
        .map(|&j| {
            let (re, im) = target.conj_gal(j).expect("unit").to_complex();
            let (r, th) = ((re * re + im * im).sqrt().sqrt(), im.atan2(re) / 2.0);
            (r * th.cos(), r * th.sin())
        })
        .collect();
    for signs in 0u32..128 {
        // Σ_k c_k ζ_j^k = ±√σ_j(target)
        let mut a: Vec<Vec<(f64, f64)>> = UNITS
            .iter()
            .enumerate()
            .map(|(row, &j)| {
                let mut v: Vec<(f64, f64)> = (0..8)
                    .map(|k| {
                        let ang = std::f64::consts::PI * (j * k) as f64 / 12.0;
                        (ang.cos(), ang.sin())
                    })
                    .collect();
                let sg = if row > 0 && signs >> (row - 1) & 1 == 1 { -1.0 } else { 1.0 };
                v.push((sg * roots[row].0, sg * roots[row].1));
                v
            })
            .collect();
        let c = complex_solve(&mut a)?;
        if c.iter().any(|z| z.1.abs() > 1e-6 || (z.0 - z.0.round()).abs() > 1e-6) {
            continue;
        }
        let ints: Vec<i64> = c.iter().map(|z| z.0.round().to_i64()).collect::<Option<_>>()?;
        let t = ints.iter().enumerate().fold(CycNum::zero(), |acc, (k, &n)| &acc + &(&CycNum::from_int(n) * &CycNum::zeta_pow(k as i64)));
        if &t * &t == target {
            return Some(&t * &mc.inv().ok()?);
        }
    }
    None
}

/// Gaussian elimination with partial pivoting on an augmented complex matrix.
fn complex_solve(a: &mut [Vec<(f64, f64)>]) -> Option<Vec<(f64, f64)>> {
    let n = a.len();
    let mul = |x: (f64, f64), y: (f64, f64)| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
    let norm = |x: (f64, f64)| x.0 * x.0 + x.1 * x.1;
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| norm(a[i][col]).total_cmp(&norm(a[j][col])))?;
        a.swap(col, p);
        let piv = a[col][col];
        let inv = (piv.0 / norm(piv), -piv.1 / norm(piv));
        for k in col..=n {
            a[col][k] = mul(a[col][k], inv);
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for k in col..=n {
                    let t = mul(f, a[col][k]);
                    a[i][k] = (a[i][k].0 - t.0, a[i][k].1 - t.1);
                }
            }
        }
    }
    Some(a.iter().map(|r| r[n]).collect())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|v| format!("p{v}"))
    }
}

impl Poly {
    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, name: &dyn Fn(u32) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for v in [m.0, m.1] {
                if v != NONE {
                    write!(f, "*{}", name(v))?;
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, names: &[String]) -> String {
        struct W<'a>(&'a Poly, &'a [String]);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, &|v| self.1[v as usize].clone())
            }
        }
        W(self, names).to_string()
    }
}

/// A tensor whose coefficients are polynomials in the parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTensor {
    pub legs: usize,
    pub terms: BTreeMap<u64, Poly>,
}

impl PTensor {
    pub fn zero(legs: usize) -> Self {
        PTensor { legs, terms: BTreeMap::new() }
    }

    pub fn from_tensor(t: &TensorElem) -> Self {
        let mut out = Self::zero(t.legs());
        for (k, c) in t.raw_terms() {
            out.terms.insert(k, Poly::constant(c.clone()));
        }
        out
    }

    fn add_poly(&mut self, key: u64, p: Poly) {
        if p.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e = e.add(&p);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn sub(&self, o: &PTensor) -> PTensor {
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.add_poly(*k, p.scale(&-CycNum::one()));
        }
        out
    }

    /// Substitute concrete values for every parameter.
    pub fn evaluate(&self, values: &dyn Fn(u32) -> CycNum) -> TensorElem {
        let mut out = TensorElem::zero(self.legs);
        for (k, p) in &self.terms {
            out.add_term(*k, &p.eval(values));
        }
        out
    }

    /// Product in A^{⊗n} without signs.
    pub fn mul(&self, o: &PTensor, alg: &SuperAlgebra) -> PTensor {
        let n = self.legs;
        let table = alg.mult_table();
        let chunks: Vec<BTreeMap<u64, Poly>> = self
            .terms
            .par_iter()
            .map(|(ka, pa)| {
                let ia = unpack(*ka, n);
                let mut acc: HashMap<u64, Poly> = HashMap::new();
                for (kb, pb) in &o.terms {
                    let ib = unpack(*kb, n);
                    let mut parts: Vec<(Vec<usize>, CycNum)> = vec![(Vec::with_capacity(n), CycNum::one())];
                    for l in 0..n {
                        let prod = &table[ia[l]][ib[l]];
                        if prod.is_zero() {
                            parts.clear();
                            break;
                        }
                        parts = parts
                            .into_iter()
                            .flat_map(|(ix, c)| {
                                prod.iter().map(move |(j, pc)| {
                                    let mut ix = ix.clone();
                                    ix.push(j);
                                    (ix, &c * pc)
                                })
                            })
                            .collect();
                    }
                    if parts.is_empty() {
                        continue;
                    }
                    let pp = pa.mul(pb);
                    for (ix, c) in parts {
                        let e = acc.entry(pack(&ix)).or_default();
                        *e = e.add(&pp.scale(&c));
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        let mut out = PTensor::zero(n);
        for ch in chunks {
            for (k, p) in ch {
                out.add_poly(k, p);
            }
        }
        out
    }

    /// Place legs into an n-leg tensor at `positions`, unit elsewhere.
    pub fn embed(&self, alg: &SuperAlgebra, n: usize, positions: &[usize]) -> PTensor {
        let unit: Vec<(usize, CycNum)> = alg.unit().iter().map(|(i, c)| (i, c.clone())).collect();
        let mut out = PTensor::zero(n);
        for (k, p) in &self.terms {
            let ix = unpack(*k, self.legs);
            let mut parts: Vec<(Vec<usize>, CycNum)> = vec![(vec![0; n], CycNum::one())];
            for slot in 0..n {
                if let Some(pos) = positions.iter().position(|&q| q == slot) {
                    for part in parts.iter_mut() {
                        part.0[slot] = ix[pos];
                    }
                } else {
                    parts = parts
                        .into_iter()
                        .flat_map(|(v, c)| {
                            unit.iter().map(move |(u, uc)| {
                                let mut v = v.clone();
                                v[slot] = *u;
                                (v, &c * uc)
                            })
                        })
                        .collect();
                }
            }
            for (v, c) in parts {
                out.add_poly(pack(&v), p.scale(&c));
            }
        }
        out
    }

    /// Apply Δ to one leg.
    pub fn delta_leg(&self, hopf: &QuasiHopfData, leg: usize) -> PTensor {
        let mut out = PTensor::zero(self.legs + 1);
        for (k, p) in &self.terms {
            let ix = unpack(*k, self.legs);
            let d = hopf.delta(&Elem::basis(ix[leg]));
            for (dix, c) in d.iter() {
                let mut v = ix[..leg].to_vec();
                v.extend(dix);
                v.extend_from_slice(&ix[leg + 1..]);
                out.add_poly(pack(&v), p.scale(c));
            }
        }
        out
    }
}

/// The affine space of R candidates from the linear conditions.
#[derive(Clone, Debug)]
pub struct AffineSpace {
    pub dim: usize,
    pub particular: TensorElem,
    pub directions: Vec<TensorElem>,
    /// Parameter names: the coefficient index each free parameter stands for.
    pub names: Vec<String>,
}

impl AffineSpace {
    /// The candidate R as a parametric tensor.
    pub fn candidate(&self) -> PTensor {
        let mut out = PTensor::from_tensor(&self.particular);
        for (v, d) in self.directions.iter().enumerate() {
            for (k, c) in d.raw_terms() {
                out.add_poly(k, Poly::var(v as u32).scale(c));
            }
        }
        out
    }

    /// Parameter values of a point in the space, if it lies there.
    pub fn coordinates_of(&self, r: &TensorElem) -> Option<Vec<CycNum>> {
        let basis: Vec<SparseVec> = self.directions.iter().map(linalg::tensor_to_sparse).collect();
        let target = linalg::tensor_to_sparse(&r.sub(&self.particular));
        if target.is_empty() {
            return Some(vec![CycNum::zero(); self.dim]);
        }
        linalg::coordinates(&basis, &target)
    }
}

/// R·Δ(a) = Δop(a)·R for every basis a, and (ε⊗id)R = 1 = (id⊗ε)R.
pub fn linear_stage(hopf: &QuasiHopfData) -> Result<AffineSpace, SolverError> {
    let alg = &hopf.algebra;
    let n = alg.dim();
    let unknowns = n * n;
    let mut rows: BTreeMap<(usize, u64), SparseVec> = BTreeMap::new();
    let mut rhs: BTreeMap<(usize, u64), CycNum> = BTreeMap::new();
    let cols: Vec<Vec<((usize, u64), CycNum)>> = (0..unknowns)
        .into_par_iter()
        .map(|u| {
            let bu = {
                let mut t = TensorElem::zero(2);
                t.add_term(pack(&[u / n, u % n]), &CycNum::one());
                t
            };
            let mut out = Vec::new();
            for a in 0..n {
                let ea = Elem::basis(a);
                let diff = hopf.tmul(&bu, &hopf.delta(&ea)).sub(&hopf.tmul(&hopf.delta_op(&ea), &bu));
                out.extend(diff.raw_terms().map(|(k, c)| ((a, k), c.clone())));
            }
            // counit rows
            let (x, y) = (u / n, u % n);
            let ex = hopf.counit_of(&Elem::basis(x));
            if !ex.is_zero() {
                out.push(((n, y as u64), ex));
            }
            let ey = hopf.counit_of(&Elem::basis(y));
            if !ey.is_zero() {
                out.push(((n + 1, x as u64), ey));
            }
            out
        })
        .collect();
    for (u, col) in cols.into_iter().enumerate() {
        for (key, c) in col {
            rows.entry(key).or_default().insert(u as u64, c);
        }
    }
    for (i, c) in alg.unit().iter() {
        rhs.insert((n, i as u64), c.clone());
        rhs.insert((n + 1, i as u64), c.clone());
        rows.entry((n, i as u64)).or_default();
        rows.entry((n + 1, i as u64)).or_default();
    }
    let keys: Vec<(usize, u64)> = rows.keys().cloned().collect();
    let b: Vec<CycNum> = keys.iter().map(|k| rhs.get(k).cloned().unwrap_or_else(CycNum::zero)).collect();
    let sol = linalg::solve(rows.into_values().collect(), b, unknowns).map_err(|_| SolverError::Inconsistent)?;
    let to_tensor = |v: &[CycNum]| {
        let mut t = TensorElem::zero(2);
        for (u, c) in v.iter().enumerate() {
            t.add_term(pack(&[u / n, u % n]), c);
        }
        t
    };
    let names = sol.free_cols.iter().map(|&u| format!("r[{},{}]", alg.label(u / n), alg.label(u % n))).collect();
    Ok(AffineSpace {
        dim: sol.kernel.len(),
        particular: to_tensor(&sol.particular),
        directions: sol.kernel.iter().map(|k| to_tensor(k)).collect(),
        names,
    })
}

/// Polynomial constraints in named parameters.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub params: Vec<String>,
    pub polys: Vec<Poly>,
}

impl ConstraintSystem {
    pub fn new(params: Vec<String>, polys: Vec<Poly>) -> Self {
        ConstraintSystem { params, polys: polys.into_iter().filter(|p| !p.is_zero()).collect() }
    }

    /// Σ c·polys[i] for a combination of original equations.
    pub fn combine(&self, combo: &[(usize, CycNum)]) -> Poly {
        combo.iter().fold(Poly::zero(), |acc, (i, c)| acc.add(&self.polys[*i].scale(c)))
    }
}

/// A working equation and the combination of original equations it came from.
#[derive(Clone, Debug)]
struct Constraint {
    combo: Vec<(usize, CycNum)>,
    poly: Poly,
}

fn is_central3(hopf: &QuasiHopfData, t: &TensorElem) -> bool {
    let alg = &hopf.algebra;
    (0..3).all(|leg| {
        (0..alg.dim()).all(|a| {
            let g = hopf.embed(&TensorElem::from_elem(&Elem::basis(a)), 3, &[leg]);
            hopf.tmul(&g, t) == hopf.tmul(t, &g)
        })
    })
}

/// Both hexagon identities, componentwise, for a parametric candidate and the
/// coassociator stored in `hopf`.
pub fn hexagon_constraints(hopf: &QuasiHopfData, candidate: &PTensor, params: &[String]) -> ConstraintSystem {
    let alg = &hopf.algebra;
    let phi = &hopf.phi;
    let phi_inv = &hopf.phi_inv;
    let r13 = candidate.embed(alg, 3, &[0, 2]);
    let r23 = candidate.embed(alg, 3, &[1, 2]);
    let r12 = candidate.embed(alg, 3, &[0, 1]);
    let c = |t: &TensorElem| PTensor::from_tensor(t);
    let f1 = [hopf.permute(phi_inv, &[1, 2, 0]), hopf.permute(phi, &[0, 2, 1]), phi_inv.clone()];
    let f2 = [hopf.permute(phi, &[2, 0, 1]), hopf.permute(phi_inv, &[1, 0, 2]), phi.clone()];
    let side = |f: &[TensorElem; 3], second: &PTensor| -> PTensor {
        if is_central3(hopf, phi) {
            let k = hopf.tmul_all(&[&f[0], &f[1], &f[2]]);
            r13.mul(second, alg).mul(&c(&k), alg)
        } else {
            c(&f[0]).mul(&r13, alg).mul(&c(&f[1]), alg).mul(second, alg).mul(&c(&f[2]), alg)
        }
    };
    let h1 = candidate.delta_leg(hopf, 0).sub(&side(&f1, &r23));
    let h2 = candidate.delta_leg(hopf, 1).sub(&side(&f2, &r12));
    let polys: Vec<Poly> = h1.terms.into_values().chain(h2.terms.into_values()).collect();
    ConstraintSystem::new(params.to_vec(), polys)
}

/// Which rule produced a substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Linear,
    SquareZero,
    Branch,
    /// x occurs once, linearly with a constant coefficient: the equation only fixes x.
    Isolated,
}

/// x := value, justified by a combination of the original equations.
#[derive(Clone, Debug, Serialize)]
pub struct Substitution {
    pub rule: Rule,
    pub var: String,
    pub value: String,
    /// Number of original equations combined into the justifying equation.
    pub support: usize,
    #[serde(skip)]
    pub index: u32,
    #[serde(skip)]
    pub affine: Poly,
    #[serde(skip)]
    pub combo: Vec<(usize, CycNum)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchEnd {
    Contradiction {
        constant: CycNum,
        support: usize,
        #[serde(skip)]
        combo: Vec<(usize, CycNum)>,
    },
    Split {
        factored: String,
        children: Vec<BranchNode>,
    },
    Sat {
        free: Vec<String>,
    },
    Indeterminate {
        residual: Vec<String>,
    },
}

/// One branch: substitutions in order, then how it ends.
#[derive(Clone, Debug, Serialize)]
pub struct BranchNode {
    pub events: Vec<Substitution>,
    pub end: BranchEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Sat,
    Unsat,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverOutcome {
    pub status: Status,
    pub steps: usize,
    pub leaves: usize,
    pub depth: usize,
    pub tree: BranchNode,
}

/// Step bound for saturation.
pub const STEP_LIMIT: usize = 100_000;

struct Ctx<'a> {
    names: &'a [String],
    steps: std::sync::atomic::AtomicUsize,
}

fn dedup(polys: Vec<Constraint>) -> Vec<Constraint> {
    let mut seen = HashSet::new();
    polys
        .into_iter()
        .filter(|c| !c.poly.is_zero())
        .filter(|c| seen.insert(c.poly.normalized()))
        .collect()
}

fn substitute_all(polys: &[Constraint], x: u32, val: &Poly) -> Vec<Constraint> {
    let out: Vec<Constraint> = polys
        .par_iter()
        .map(|c| Constraint { combo: c.combo.clone(), poly: c.poly.substitute(x, val) })
        .collect();
    dedup(out)
}

/// Column order for span reduction: quadratic monomials first, then linear, then 1.
fn mono_key(m: Mono) -> u64 {
    let class = 2 - m.degree() as u64;
    (class << 62) | (u64::from(m.0 & 0x7fff_ffff) << 31) | u64::from(m.1 & 0x7fff_ffff)
}

fn key_mono(k: u64) -> Mono {
    let (class, x, y) = (k >> 62, ((k >> 31) & 0x7fff_ffff) as u32, (k & 0x7fff_ffff) as u32);
    match class {
        0 => Mono(x, y),
        1 => Mono::var(x),
        _ => Mono::ONE,
    }
}

/// Row-reduce the span of the working equations. Returns a basis of the span
/// in reduced echelon form, each row with its combination of originals.
fn span_reduce(polys: &[Constraint]) -> Vec<Constraint> {
    let n = polys.len();
    let mut ech = linalg::Echelon::new(n);
    for (i, c) in polys.iter().enumerate() {
        let row: SparseVec = c.poly.terms().iter().map(|(m, v)| (mono_key(*m), v.clone())).collect();
        let mut aug = vec![CycNum::zero(); n];
        aug[i] = CycNum::one();
        ech.insert(row, aug);
    }
    ech.rref();
    ech.pivot_rows()
        .map(|(_, row, aug)| {
            let poly = Poly::from_map(row.iter().map(|(k, v)| (key_mono(*k), v.clone())));
            let mut combo: BTreeMap<usize, CycNum> = BTreeMap::new();
            for (a, c) in aug.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (i, w) in &polys[a].combo {
                    let e = combo.entry(*i).or_insert_with(CycNum::zero);
                    *e = &*e + &(c * w);
                }
            }
            Constraint { combo: combo.into_iter().filter(|(_, c)| !c.is_zero()).collect(), poly }
        })
        .collect()
}

fn square_var(p: &Poly) -> Option<u32> {
    match p.terms() {
        [(Mono(x, y), _)] if x == y && *x != NONE => Some(*x),
        _ => None,
    }
}

fn saturate_branch(ctx: &Ctx, mut polys: Vec<Constraint>, mut free: Vec<u32>) -> Result<BranchNode, SolverError> {
    let mut events = Vec::new();
    let record = |rule: Rule, x: u32, val: &Poly, c: &Constraint| Substitution {
        rule,
        var: ctx.names[x as usize].clone(),
        value: val.render(ctx.names),
        support: c.combo.len(),
        index: x,
        affine: val.clone(),
        combo: c.combo.clone(),
    };
    let mut reduced = false;
    loop {
        if ctx.steps.fetch_add(1, std::sync::atomic::Ordering::Relaxed) > STEP_LIMIT {
            return Err(SolverError::StepLimit(STEP_LIMIT));
        }
        if let Some(c) = polys.iter().find(|c| c.poly.as_constant().is_some_and(|k| !k.is_zero())) {
            let end = BranchEnd::Contradiction {
                constant: c.poly.as_constant().expect("constant"),
                support: c.combo.len(),
                combo: c.combo.clone(),
            };
            return Ok(BranchNode { events, end });
        }
        if polys.is_empty() {
            let free = free.iter().map(|&v| ctx.names[v as usize].clone()).collect();
            return Ok(BranchNode { events, end: BranchEnd::Sat { free } });
        }
        // occurrence counts
        let mut count: HashMap<u32, usize> = HashMap::new();
        for c in &polys {
            for v in c.poly.vars() {
                *count.entry(v).or_default() += 1;
            }
        }
        let count = &count;
        let linear = polys
            .iter()
            .enumerate()
            .filter(|(_, c)| c.poly.degree() == 1)
            .flat_map(|(i, c)| c.poly.vars().into_iter().map(move |v| (count[&v], v, c.poly.terms().len(), i, c)))
            .min_by_key(|(n, v, len, i, _)| (*n, *v, *len, *i));
        if let Some((_, x, _, _, c)) = linear {
            let val = c.poly.solve_for(x).expect("linear");
            events.push(record(Rule::Linear, x, &val, c));
            free.retain(|&v| v != x);
            polys = substitute_all(&polys, x, &val);
            reduced = false;
            continue;
        }
        if let Some((x, c)) = polys.iter().find_map(|c| square_var(&c.poly).map(|x| (x, c))) {
            events.push(record(Rule::SquareZero, x, &Poly::zero(), c));
            free.retain(|&v| v != x);
            polys = substitute_all(&polys, x, &Poly::zero());
            reduced = false;
            continue;
        }
        if !reduced {
            // linear consequences hidden in combinations of components
            polys = span_reduce(&polys);
            reduced = true;
            continue;
        }
        let split = polys.iter().find_map(|c| c.poly.binomial_roots().map(|r| (c, r)));
        if let Some((c, roots)) = split {
            let factored = c.poly.render(ctx.names);
            let run = |(x, a): &(u32, CycNum)| -> Result<BranchNode, SolverError> {
                let val = Poly::constant(a.clone());
                let mut node = saturate_branch(
                    ctx,
                    substitute_all(&polys, *x, &val),
                    free.iter().copied().filter(|v| v != x).collect(),
                )?;
                node.events.insert(0, record(Rule::Branch, *x, &val, c));
                Ok(node)
            };
            let (l, r) = rayon::join(|| run(&roots[0]), || run(&roots[1]));
            let end = BranchEnd::Split { factored, children: vec![l?, r?] };
            return Ok(BranchNode { events, end });
        }
        let isolated = polys.iter().enumerate().find_map(|(i, c)| {
            c.poly
                .vars()
                .into_iter()
                .filter(|v| count[v] == 1)
                .find_map(|x| c.poly.solve_isolated(x).map(|val| (i, x, val)))
        });
        if let Some((i, x, val)) = isolated {
            events.push(record(Rule::Isolated, x, &val, &polys[i]));
            free.retain(|&v| v != x);
            polys.remove(i);
            continue;
        }
        let residual = polys.iter().map(|c| c.poly.render(ctx.names)).collect();
        return Ok(BranchNode { events, end: BranchEnd::Indeterminate { residual } });
    }
}

fn summarize(node: &BranchNode) -> (bool, bool, usize, usize) {
    // (any sat, any indeterminate, leaves, depth)
    match &node.end {
        BranchEnd::Contradiction { .. } => (false, false, 1, 1),
        BranchEnd::Sat { .. } => (true, false, 1, 1),
        BranchEnd::Indeterminate { .. } => (false, true, 1, 1),
        BranchEnd::Split { children, .. } => children.iter().map(summarize).fold((false, false, 0, 0), |a, b| {
            (a.0 || b.0, a.1 || b.1, a.2 + b.2, a.3.max(b.3 + 1))
        }),
    }
}

/// Saturate until every branch ends.
pub fn saturate(cs: &ConstraintSystem) -> Result<SolverOutcome, SolverError> {
    let ctx = Ctx { names: &cs.params, steps: std::sync::atomic::AtomicUsize::new(0) };
    let free: Vec<u32> = (0..cs.params.len() as u32).collect();
    let start = cs
        .polys
        .iter()
        .enumerate()
        .map(|(i, p)| Constraint { combo: vec![(i, CycNum::one())], poly: p.clone() })
        .collect();
    let tree = saturate_branch(&ctx, dedup(start), free)?;
    let (sat, indet, leaves, depth) = summarize(&tree);
    let status = if sat {
        Status::Sat
    } else if indet {
        Status::Indeterminate
    } else {
        Status::Unsat
    };
    Ok(SolverOutcome { status, steps: ctx.steps.into_inner(), leaves, depth, tree })
}

/// Replays a certificate from the original equations alone: every
/// substitution must follow from its recorded combination under the earlier
/// substitutions, and every contradiction leaf must reduce to its nonzero
/// constant.
pub fn replay_leaves(cs: &ConstraintSystem, tree: &BranchNode) -> bool {
    fn reduce(cs: &ConstraintSystem, combo: &[(usize, CycNum)], path: &[(u32, Poly)]) -> Poly {
        path.iter().fold(cs.combine(combo), |acc, (x, v)| acc.substitute(*x, v))
    }
    fn justified(cs: &ConstraintSystem, e: &Substitution, path: &[(u32, Poly)]) -> bool {
        let p = reduce(cs, &e.combo, path);
        match e.rule {
            Rule::Linear => p.solve_for(e.index).is_some_and(|v| v == e.affine),
            Rule::Isolated => p.solve_isolated(e.index).is_some_and(|v| v == e.affine),
            Rule::SquareZero => square_var(&p) == Some(e.index),
            Rule::Branch => {
                let a = e.affine.as_constant();
                p.binomial_roots().is_some_and(|r| r.iter().any(|(x, b)| *x == e.index && Some(b) == a.as_ref()))
            }
        }
    }
    fn walk(cs: &ConstraintSystem, node: &BranchNode, path: &mut Vec<(u32, Poly)>) -> bool {
        let before = path.len();
        let mut ok = true;
        for e in &node.events {
            ok &= justified(cs, e, path);
            path.push((e.index, e.affine.clone()));
        }
        ok &= match &node.end {
            BranchEnd::Contradiction { constant, combo, .. } => {
                reduce(cs, combo, path).as_constant().is_some_and(|k| !k.is_zero() && &k == constant)
            }
            BranchEnd::Split { children, .. } => children.iter().all(|c| walk(cs, c, path)),
            BranchEnd::Sat { .. } => true,
            BranchEnd::Indeterminate { .. } => false,
        };
        path.truncate(before);
        ok
    }
    walk(cs, tree, &mut Vec::new())
}

/// Parameter values along the first SAT branch, with free parameters at `free_value`.
pub fn sat_assignment(tree: &BranchNode, nparams: usize, free_value: &dyn Fn(u32) -> CycNum) -> Option<Vec<CycNum>> {
    fn find(node: &BranchNode, path: &mut Vec<(u32, Poly)>) -> bool {
        let before = path.len();
        path.extend(node.events.iter().map(|e| (e.index, e.affine.clone())));
        let hit = match &node.end {
            BranchEnd::Sat { .. } => true,
            BranchEnd::Split { children, .. } => children.iter().any(|c| find(c, path)),
            _ => false,
        };
        if !hit {
            path.truncate(before);
        }
        hit
    }
    let mut path = Vec::new();
    if !find(tree, &mut path) {
        return None;
    }
    let mut values: Vec<Option<CycNum>> = vec![None; nparams];
    let fixed: HashSet<u32> = path.iter().map(|(x, _)| *x).collect();
    for v in 0..nparams as u32 {
        if !fixed.contains(&v) {
            values[v as usize] = Some(free_value(v));
        }
    }
    // later substitutions only mention parameters that are still free at that point
    for (x, val) in path.iter().rev() {
        let get = |v: u32| values[v as usize].clone().expect("resolved");
        values[*x as usize] = Some(val.eval(&get));
    }
    values.into_iter().collect()
}

/// Whether a parameter point satisfies every substitution on the first SAT branch.
pub fn sat_branch_contains(tree: &BranchNode, point: &[CycNum]) -> bool {
    fn walk(node: &BranchNode, point: &[CycNum]) -> Option<bool> {
        let ok = node.events.iter().all(|e| point[e.index as usize] == e.affine.eval(&|v| point[v as usize].clone()));
        match &node.end {
            BranchEnd::Sat { .. } => Some(ok),
            BranchEnd::Split { children, .. } => {
                if !ok {
                    return children.iter().find_map(|c| walk(c, point)).map(|_| false);
                }
                children.iter().filter_map(|c| walk(c, point)).fold(None, |acc, b| Some(acc.unwrap_or(false) || b))
            }
            _ => None,
        }
    }
    walk(tree, point).unwrap_or(false)
}

/// Outcome of the full non-existence procedure for one coassociator.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremRun {
    pub label: String,
    pub linear_dim: usize,
    pub equations: usize,
    pub outcome: SolverOutcome,
    pub certificate_replayed: bool,
}

/// Linear stage, hexagons and saturation for a quasi-bialgebra.
pub fn run_search(label: &str, hopf: &QuasiHopfData) -> Result<(AffineSpace, ConstraintSystem, TheoremRun), SolverError> {
    let space = linear_stage(hopf)?;
    let cs = hexagon_constraints(hopf, &space.candidate(), &space.names);
    let outcome = saturate(&cs)?;
    let certificate_replayed = outcome.status != Status::Unsat || replay_leaves(&cs, &outcome.tree);
    let run = TheoremRun {
        label: label.into(),
        linear_dim: space.dim,
        equations: cs.polys.len(),
        outcome,
        certificate_replayed,
    };
    Ok((space, cs, run))
}

/// Q with the standard coproduct and the coassociator Φ_ε, no R.
pub fn q_with_phi_eps(eps: i64) -> Result<QuasiHopfData, SolverError> {
    let mut spec = uqsl2::q_spec(&CycNum::zeta_pow(21));
    let el = uqsl2::QElements::new(&spec.algebra);
    spec.phi = uqsl2::build_phi_eps(&spec.algebra, eps);
    spec.r = None;
    spec.alpha = spec.algebra.unit().clone();
    spec.beta_el = el.e0.add(&el.e1.scale(&CycNum::from_int(eps)));
    Ok(QuasiHopfData::new(spec)?)
}

/// The quotient Q0 with trivial Φ: the search must find a family of R-matrices
/// containing Rst, and a witness from it must be a genuine R-matrix.
#[derive(Clone, Debug, Serialize)]
pub struct ControlRun {
    pub run: TheoremRun,
    pub contains_rst: bool,
    pub witness_verified: bool,
}

pub fn q0_control() -> Result<ControlRun, SolverError> {
    let q0 = uqsl2::quotient_q0()?;
    let (space, cs, run) = run_search("Q0, trivial coassociator", &q0)?;
    let rst = q0.r.clone().expect("Rst");
    let contains_rst =
        space.coordinates_of(&rst).is_some_and(|point| sat_branch_contains(&run.outcome.tree, &point));
    let witness_verified = match sat_assignment(&run.outcome.tree, cs.params.len(), &|_| CycNum::one()) {
        Some(vals) => {
            let r = space.candidate().evaluate(&|v| vals[v as usize].clone());
            let mut spec = q0.spec();
            spec.r = Some(r);
            QuasiHopfData::new(spec).is_ok_and(|w| {
                w.verify_r_intertwiner().is_ok_and(|c| c.pass)
                    && w.verify_hexagons().is_ok_and(|cs| cs.iter().all(|c| c.pass))
            })
        }
        None => false,
    };
    Ok(ControlRun { run, contains_rst, witness_verified })
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub runs: Vec<TheoremRun>,
    pub control: ControlRun,
}

impl Theorem1Report {
    /// Both coassociators UNSAT with replayed certificates, and the control holds.
    pub fn holds(&self) -> bool {
        self.runs.iter().all(|r| r.outcome.status == Status::Unsat && r.certificate_replayed)
            && self.control.run.outcome.status == Status::Sat
            && self.control.contains_rst
            && self.control.witness_verified
    }
}

/// Non-existence of an R-matrix for (Q, Φ_ε), ε = ±1, plus the Q0 control.
pub fn prove_theorem1() -> Result<Theorem1Report, SolverError> {
    let mut runs = Vec::new();
    for eps in [1, -1] {
        let q = q_with_phi_eps(eps)?;
        runs.push(run_search(&format!("Q, eps = {eps:+}"), &q)?.2);
    }
    Ok(Theorem1Report { runs, control: q0_control()? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SuperAlgebra;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> impl Strategy<Value = CycNum> {
        (-3i64..4, 0i64..24).prop_map(|(n, k)| &CycNum::from_int(n) * &CycNum::zeta_pow(k))
    }

    fn poly(nvars: u32) -> impl Strategy<Value = Poly> {
        let mono = (0..nvars + 1, 0..nvars + 1).prop_map(move |(a, b)| {
            let f = |v: u32| if v == nvars { NONE } else { v };
            let (x, y) = (f(a).min(f(b)), f(a).max(f(b)));
            Mono(x, y)
        });
        proptest::collection::vec((mono, small()), 0..6).prop_map(Poly::from_map)
    }

    fn affine(nvars: u32) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((0..nvars + 1, small()), 0..4).prop_map(move |ts| {
            Poly::from_map(ts.into_iter().map(|(v, c)| (if v == nvars { Mono::ONE } else { Mono::var(v) }, c)))
        })
    }

    proptest! {
        #[test]
        fn substitution_commutes_with_evaluation(p in poly(3), val in affine(3), pt in proptest::collection::vec(small(), 3)) {
            // substitute x0 := val, then evaluate; compare with evaluating at x0 = val(pt)
            let val = val.substitute(0, &Poly::zero());
            let v0 = val.eval(&|v| pt[v as usize].clone());
            let direct = p.eval(&|v| if v == 0 { v0.clone() } else { pt[v as usize].clone() });
            prop_assert_eq!(p.substitute(0, &val).eval(&|v| pt[v as usize].clone()), direct);
        }

        #[test]
        fn product_evaluates_to_product(a in affine(3), b in affine(3), pt in proptest::collection::vec(small(), 3)) {
            let at = |p: &Poly| p.eval(&|v| pt[v as usize].clone());
            prop_assert_eq!(at(&a.mul(&b)), &at(&a) * &at(&b));
        }

        #[test]
        fn binomial_roots_are_roots(c in small(), a in small(), b in small(), same in any::<bool>()) {
            prop_assume!(!c.is_zero());
            let y = if same { 0 } else { 1 };
            let p = Poly::var(0).sub(&Poly::constant(a.clone()))
                .mul(&Poly::var(y).sub(&Poly::constant(b.clone())))
                .scale(&c);
            let roots = p.binomial_roots().expect("factors");
            for (x, r) in roots {
                prop_assert!(p.substitute(x, &Poly::constant(r)).is_zero() || !same && p.substitute(x, &Poly::constant(a.clone())).is_zero());
            }
        }
    }

    #[test]
    fn square_root_in_field() {
        let d = &CycNum::from_int(9) * &CycNum::zeta_pow(6);
        let s = cyc_sqrt(&d).expect("root");
        assert_eq!(&s * &s, d);
        let two = cyc_sqrt(&CycNum::from_int(2)).expect("ζ³ + ζ⁻³");
        assert_eq!(&two * &two, CycNum::from_int(2));
        let r = cyc_sqrt(&CycNum::frac(-3, 4)).expect("root");
        assert_eq!(&r * &r, CycNum::frac(-3, 4));
        assert!(cyc_sqrt(&CycNum::from_int(5)).is_none());
    }

    fn random_tensor(rng: &mut ChaCha8Rng, dim: usize, legs: usize, terms: usize) -> TensorElem {
        let mut t = TensorElem::zero(legs);
        for _ in 0..terms {
            let ix: Vec<usize> = (0..legs).map(|_| rng.gen_range(0..dim)).collect();
            t.add_indexed(&ix, &CycNum::from_int(rng.gen_range(-3..4)));
        }
        t
    }

    /// Dense rank oracle for the intertwiner space.
    fn dense_affine_dim(hopf: &QuasiHopfData) -> usize {
        let n = hopf.algebra.dim();
        let el = uqsl2::QElements::new(&hopf.algebra);
        let gens = [el.k.clone(), el.e.clone(), el.f.clone()];
        let mut m: Vec<Vec<CycNum>> = Vec::new();
        for g in &gens {
            let (d, dop) = (hopf.delta(g), hopf.delta_op(g));
            let mut block = vec![vec![CycNum::zero(); n * n]; n * n];
            for u in 0..n * n {
                let mut bu = TensorElem::zero(2);
                bu.add_indexed(&[u / n, u % n], &CycNum::one());
                for (ix, c) in hopf.tmul(&bu, &d).sub(&hopf.tmul(&dop, &bu)).iter() {
                    block[ix[0] * n + ix[1]][u] = c.clone();
                }
            }
            m.extend(block);
        }
        // counit rows: (ε⊗id) and (id⊗ε), homogeneous part
        for leg in 0..2 {
            for out in 0..n {
                let row = (0..n * n)
                    .map(|u| {
                        let (a, b) = (u / n, u % n);
                        let (summed, kept) = if leg == 0 { (a, b) } else { (b, a) };
                        if kept == out { hopf.counit[summed].clone() } else { CycNum::zero() }
                    })
                    .collect();
                m.push(row);
            }
        }
        // the solution set is nonempty, so its dimension is the nullity
        linalg::nullspace(&m, n * n).len()
    }

    #[test]
    fn linear_stage_matches_dense_oracle_and_contains_true_r() {
        let beta = CycNum::zeta_pow(21);
        let q = uqsl2::build_q(&beta).unwrap().hopf;
        let sp = linear_stage(&q).unwrap();
        assert_eq!(sp.dim, dense_affine_dim(&q));
        assert_eq!(sp.dim, sp.names.len());
        let r = uqsl2::build_r(&q.algebra, &beta);
        assert!(sp.coordinates_of(&r).is_some());
        // a mutated R leaves the space
        let mut bad = r.clone();
        bad.add_indexed(&[1, 2], &CycNum::one());
        assert!(sp.coordinates_of(&bad).is_none());
    }

    #[test]
    fn q0_space_contains_rst() {
        let q0 = uqsl2::quotient_q0().unwrap();
        let sp = linear_stage(&q0).unwrap();
        assert!(sp.coordinates_of(q0.r.as_ref().unwrap()).is_some());
    }

    fn toy_group_algebra() -> QuasiHopfData {
        // C[Z2] with Δ(g) = g⊗g
        let mult = vec![vec![Elem::basis(0), Elem::basis(1)], vec![Elem::basis(1), Elem::basis(0)]];
        let alg = SuperAlgebra::new("z2", vec!["1".into(), "g".into()], vec![0, 0], mult, Elem::basis(0)).unwrap();
        let cop = (0..2)
            .map(|i| {
                let mut t = TensorElem::zero(2);
                t.add_indexed(&[i, i], &CycNum::one());
                t
            })
            .collect();
        QuasiHopfData::new(crate::qhopf::QuasiHopfSpec {
            phi: alg.tensor_unit(3),
            r: None,
            alpha: alg.unit().clone(),
            beta_el: alg.unit().clone(),
            coproduct: cop,
            counit: vec![CycNum::one(), CycNum::one()],
            antipode: vec![Elem::basis(0), Elem::basis(1)],
            sup: false,
            algebra: alg,
        })
        .unwrap()
    }

    #[test]
    fn commutative_toy_keeps_whole_intertwiner_space() {
        let h = toy_group_algebra();
        let sp = linear_stage(&h).unwrap();
        // every R intertwines; the two counit conditions share one equation
        assert_eq!(sp.dim, 4 - 3);
        assert!(sp.coordinates_of(&h.algebra.tensor_unit(2)).is_some());
    }

    #[test]
    fn true_r_zeroes_the_hexagon_system() {
        let beta = CycNum::zeta_pow(21);
        let q = uqsl2::build_q(&beta).unwrap().hopf;
        let cand = PTensor::from_tensor(q.r.as_ref().unwrap());
        assert!(hexagon_constraints(&q, &cand, &[]).polys.is_empty());
        let q0 = uqsl2::quotient_q0().unwrap();
        let cand = PTensor::from_tensor(q0.r.as_ref().unwrap());
        assert!(hexagon_constraints(&q0, &cand, &[]).polys.is_empty());
    }

    #[test]
    fn random_candidate_matches_direct_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for hopf in [q_with_phi_eps(-1).unwrap(), uqsl2::build_q(&CycNum::zeta_pow(5)).unwrap().hopf] {
            let r = random_tensor(&mut rng, 16, 2, 6);
            let cs = hexagon_constraints(&hopf, &PTensor::from_tensor(&r), &[]);
            let [(l1, r1), (l2, r2)] = hopf.hexagon_sides(&r);
            let (d1, d2) = (l1.sub(&r1), l2.sub(&r2));
            let mut expect: Vec<CycNum> = d1.raw_terms().chain(d2.raw_terms()).map(|(_, c)| c.clone()).collect();
            let mut got: Vec<CycNum> = cs.polys.iter().map(|p| p.as_constant().expect("constant")).collect();
            assert!(!got.is_empty());
            let key = |c: &CycNum| c.to_string();
            expect.sort_by_key(key);
            got.sort_by_key(key);
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn control_report_agrees() {
        let c = q0_control().unwrap();
        assert!(c.contains_rst && c.witness_verified);
        assert_eq!(c.run.outcome.status, Status::Sat);
    }

    #[test]
    fn q0_positive_control_is_sat_and_contains_rst() {
        let q0 = uqsl2::quotient_q0().unwrap();
        let (space, cs, run) = run_search("q0", &q0).unwrap();
        assert_eq!(run.outcome.status, Status::Sat);
        let rst = q0.r.clone().unwrap();
        let point = space.coordinates_of(&rst).unwrap();
        assert!(sat_branch_contains(&run.outcome.tree, &point));
        // witness with free parameters at 1 passes the hexagons and the intertwiner
        let vals = sat_assignment(&run.outcome.tree, cs.params.len(), &|_| CycNum::one()).unwrap();
        assert!(cs.polys.iter().all(|p| p.eval(&|v| vals[v as usize].clone()).is_zero()));
        let r = space.candidate().evaluate(&|v| vals[v as usize].clone());
        let mut spec = q0.spec();
        spec.r = Some(r);
        let witness = QuasiHopfData::new(spec).unwrap();
        assert!(witness.verify_r_intertwiner().unwrap().pass);
        assert!(witness.verify_hexagons().unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn theorem1_is_unsat_with_replayed_certificate() {
        for eps in [1, -1] {
            let q = q_with_phi_eps(eps).unwrap();
            let (_, cs, run) = run_search("q", &q).unwrap();
            assert_eq!(run.outcome.status, Status::Unsat, "eps {eps}");
            assert!(run.certificate_replayed);
            assert!(replay_leaves(&cs, &run.outcome.tree));
            // a tampered leaf constant is rejected
            let mut bad = run.outcome.tree.clone();
            fn bump(node: &mut BranchNode) {
                match &mut node.end {
                    BranchEnd::Split { children, .. } => bump(&mut children[0]),
                    BranchEnd::Contradiction { constant, .. } => *constant = &*constant + &CycNum::one(),
                    _ => {}
                }
            }
            bump(&mut bad);
            assert!(!replay_leaves(&cs, &bad));
            // so is a tampered substitution
            let mut bad = run.outcome.tree.clone();
            bad.events[0].affine = bad.events[0].affine.add(&Poly::constant(CycNum::one()));
            assert!(!replay_leaves(&cs, &bad));
        }
    }

    #[test]
    fn inconsistent_toy_system() {
        // x·y = 0, x = 1, y − 2 = 0
        let names = vec!["x".to_string(), "y".to_string()];
        let xy = Poly::var(0).mul(&Poly::var(1));
        let cs = ConstraintSystem::new(
            names,
            vec![xy, Poly::var(0).sub(&Poly::constant(CycNum::one())), Poly::var(1).sub(&Poly::constant(CycNum::from_int(2)))],
        );
        let out = saturate(&cs).unwrap();
        assert_eq!(out.status, Status::Unsat);
        assert!(replay_leaves(&cs, &out.tree));
    }

    #[test]
    fn branching_toy_system() {
        // (x − 1)(y − 2) = 0, x·x + y = 3 + x, y·y = 2y: both branches survive one way
        let names = vec!["x".to_string(), "y".to_string()];
        let one = |n: i64| Poly::constant(CycNum::from_int(n));
        let f = Poly::var(0).sub(&one(1)).mul(&Poly::var(1).sub(&one(2)));
        let g = Poly::var(0).mul(&Poly::var(1)).sub(&one(7));
        let cs = ConstraintSystem::new(names, vec![f, g]);
        let out = saturate(&cs).unwrap();
        // x = 1 forces y = 7; y = 2 forces x = 7/2
        assert_eq!(out.status, Status::Sat);
        assert_eq!(out.leaves, 2);
        assert!(replay_leaves(&cs, &out.tree));
    }
}
