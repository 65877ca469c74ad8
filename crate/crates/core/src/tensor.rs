//! Sparse elements of a finite-dimensional superalgebra A and of its tensor
//! powers A^{⊗n}, with Koszul signs applied termwise on homogeneous basis
//! vectors.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::CycNum;

/// Bits per leg in a packed multi-index.
pub const LEG_BITS: u32 = 8;
/// Largest supported leg count.
pub const MAX_LEGS: usize = 8;
/// Largest supported algebra dimension.
pub const MAX_DIM: usize = 1 << LEG_BITS;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("leg count mismatch: {0} vs {1}")]
    ShapeError(usize, usize),
    #[error("algebra dimension {0} exceeds the supported maximum")]
    TooLarge(usize),
    #[error("unit is not a two-sided identity at basis vector {0}")]
    BadUnit(String),
    #[error("multiplication is not associative on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("product {0}·{1} is not homogeneous of the expected parity")]
    ParityViolation(String, String),
    #[error("invalid leg permutation {0:?}")]
    BadPermutation(Vec<usize>),
    #[error("element is not invertible")]
    NotInvertible,
}

/// Sparse element of A: basis index to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Elem {
    coeffs: BTreeMap<usize, CycNum>,
}

impl Elem {
    pub fn zero() -> Self {
        Elem::default()
    }

    pub fn basis(i: usize) -> Self {
        Self::term(i, CycNum::one())
    }

    pub fn term(i: usize, c: CycNum) -> Self {
        let mut e = Elem::zero();
        e.add_term(i, &c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, CycNum)>>(it: I) -> Self {
        let mut e = Elem::zero();
        for (i, c) in it {
            e.add_term(i, &c);
        }
        e
    }

    /// Dense coordinate vector of length `dim`.
    pub fn from_dense(v: &[CycNum]) -> Self {
        Self::from_terms(v.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, dim: usize) -> Vec<CycNum> {
        let mut v = vec![CycNum::zero(); dim];
        for (i, c) in &self.coeffs {
            v[*i] = c.clone();
        }
        v
    }

    pub fn add_term(&mut self, i: usize, c: &CycNum) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(i).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn get(&self, i: usize) -> CycNum {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CycNum)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &CycNum) -> Elem {
        if c.is_zero() {
            return Elem::zero();
        }
        Elem { coeffs: self.coeffs.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn add(&self, other: &Elem) -> Elem {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_term(i, c);
        }
        out
    }

    pub fn sub(&self, other: &Elem) -> Elem {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_term(i, &-c);
        }
        out
    }

    pub fn neg(&self) -> Elem {
        self.scale(&-CycNum::one())
    }

    /// Apply a scalar map to every coefficient (used for Galois conjugation).
    pub fn map_coeffs(&self, f: impl Fn(&CycNum) -> CycNum) -> Elem {
        Elem::from_terms(self.iter().map(|(i, c)| (i, f(c))))
    }
}

/// Pack a multi-index, leg 0 most significant so that numeric order is lexicographic.
pub fn pack(idx: &[usize]) -> u64 {
    idx.iter().fold(0u64, |acc, &i| (acc << LEG_BITS) | i as u64)
}

pub fn unpack(key: u64, legs: usize) -> Vec<usize> {
    (0..legs).map(|k| leg_of(key, legs, k)).collect()
}

#[inline]
fn leg_of(key: u64, legs: usize, k: usize) -> usize {
    ((key >> (LEG_BITS as usize * (legs - 1 - k))) & ((1 << LEG_BITS) - 1)) as usize
}

/// Sparse element of A^{⊗n}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorElem {
    legs: usize,
    terms: BTreeMap<u64, CycNum>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub coeff: CycNum,
}

impl TensorElem {
    pub fn zero(legs: usize) -> Self {
        assert!(legs <= MAX_LEGS, "too many legs");
        TensorElem { legs, terms: BTreeMap::new() }
    }

    /// A 0-leg tensor, i.e. a scalar.
    pub fn scalar(c: CycNum) -> Self {
        let mut t = TensorElem::zero(0);
        t.add_term(0, &c);
        t
    }

    pub fn from_elem(e: &Elem) -> Self {
        let mut t = TensorElem::zero(1);
        for (i, c) in e.iter() {
            t.add_term(i as u64, c);
        }
        t
    }

    pub fn to_elem(&self) -> Elem {
        assert_eq!(self.legs, 1);
        Elem::from_terms(self.terms.iter().map(|(k, c)| (*k as usize, c.clone())))
    }

    /// Value of a 0-leg tensor.
    pub fn to_scalar(&self) -> CycNum {
        assert_eq!(self.legs, 0);
        self.terms.get(&0).cloned().unwrap_or_default()
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: u64, c: &CycNum) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_indexed(&mut self, idx: &[usize], c: &CycNum) {
        assert_eq!(idx.len(), self.legs);
        self.add_term(pack(idx), c);
    }

    pub fn get(&self, idx: &[usize]) -> CycNum {
        self.terms.get(&pack(idx)).cloned().unwrap_or_default()
    }

    pub fn get_key(&self, key: u64) -> CycNum {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn raw_terms(&self) -> impl Iterator<Item = (u64, &CycNum)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &CycNum)> {
        let legs = self.legs;
        self.terms.iter().map(move |(k, c)| (unpack(*k, legs), c))
    }

    pub fn from_map(legs: usize, map: HashMap<u64, CycNum>) -> Self {
        TensorElem { legs, terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        if c.is_zero() {
            return TensorElem::zero(self.legs);
        }
        TensorElem { legs: self.legs, terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-CycNum::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.legs, other.legs, "leg count mismatch in add");
        let mut out = self.clone();
        for (k, c) in other.raw_terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn map_coeffs(&self, f: impl Fn(&CycNum) -> CycNum) -> Self {
        let mut out = TensorElem::zero(self.legs);
        for (k, c) in self.raw_terms() {
            out.add_term(k, &f(c));
        }
        out
    }

    /// Lexicographically smallest multi-index where the two tensors differ,
    /// with the residual `self − other` there.
    pub fn first_difference(&self, other: &Self) -> Option<(Vec<usize>, CycNum)> {
        let d = self.sub(other);
        d.terms.iter().next().map(|(k, c)| (unpack(*k, self.legs), c.clone()))
    }

    /// Outer product, legs concatenated.
    pub fn outer(&self, other: &Self) -> Self {
        let shift = LEG_BITS as usize * other.legs;
        let mut out = TensorElem::zero(self.legs + other.legs);
        for (ka, ca) in self.raw_terms() {
            for (kb, cb) in other.raw_terms() {
                out.add_term((ka << shift) | kb, &(ca * cb));
            }
        }
        out
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.iter().map(|(indices, c)| TermJson { indices, coeff: c.clone() }).collect()
    }

    pub fn from_json_terms(legs: usize, terms: &[TermJson]) -> Result<Self, TensorError> {
        let mut t = TensorElem::zero(legs);
        for term in terms {
            if term.indices.len() != legs {
                return Err(TensorError::ShapeError(term.indices.len(), legs));
            }
            t.add_indexed(&term.indices, &term.coeff);
        }
        Ok(t)
    }
}

/// Table entry for a basis product with a fast path for ±1 coefficients.
#[derive(Clone, Debug)]
struct Entry {
    idx: usize,
    coeff: CycNum,
    unit_sign: i8,
}

/// Linear map applied to a single tensor leg: basis vector `i` ↦ `images[i]`,
/// a tensor with `out_legs` legs (0 for functionals, 2 for coproducts).
#[derive(Clone, Debug)]
pub struct LegMap {
    pub images: Vec<TensorElem>,
    pub out_legs: usize,
    pub odd: bool,
}

impl LegMap {
    pub fn from_elems(images: Vec<Elem>, odd: bool) -> Self {
        LegMap { images: images.iter().map(TensorElem::from_elem).collect(), out_legs: 1, odd }
    }

    pub fn from_functional(f: &[CycNum]) -> Self {
        LegMap { images: f.iter().cloned().map(TensorElem::scalar).collect(), out_legs: 0, odd: false }
    }

    pub fn from_tensors(images: Vec<TensorElem>) -> Self {
        let out_legs = images.first().map(|t| t.legs()).unwrap_or(1);
        LegMap { images, out_legs, odd: false }
    }
}

/// A finite-dimensional associative superalgebra given by structure constants.
#[derive(Clone, Debug)]
pub struct SuperAlgebra {
    name: String,
    labels: Vec<String>,
    parity: Vec<u8>,
    table: Vec<Vec<Entry>>,
    unit: Elem,
}

impl SuperAlgebra {
    /// Build and validate: unit, associativity on all basis triples, parity homogeneity.
    pub fn new(
        name: &str,
        labels: Vec<String>,
        parity: Vec<u8>,
        mult: Vec<Vec<Elem>>,
        unit: Elem,
    ) -> Result<Self, TensorError> {
        let alg = Self::new_unchecked(name, labels, parity, mult, unit)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Build without the associativity sweep; used for tables derived from a validated algebra.
    pub fn new_unchecked(
        name: &str,
        labels: Vec<String>,
        parity: Vec<u8>,
        mult: Vec<Vec<Elem>>,
        unit: Elem,
    ) -> Result<Self, TensorError> {
        let dim = labels.len();
        if dim > MAX_DIM {
            return Err(TensorError::TooLarge(dim));
        }
        if parity.len() != dim || mult.len() != dim || mult.iter().any(|r| r.len() != dim) {
            return Err(TensorError::ShapeError(mult.len(), dim));
        }
        let table = mult
            .into_iter()
            .flatten()
            .map(|e| {
                e.iter()
                    .map(|(idx, c)| {
                        let unit_sign = if c.is_one() {
                            1
                        } else if *c == -CycNum::one() {
                            -1
                        } else {
                            0
                        };
                        Entry { idx, coeff: c.clone(), unit_sign }
                    })
                    .collect()
            })
            .collect();
        Ok(SuperAlgebra { name: name.to_string(), labels, parity, table, unit })
    }

    fn validate(&self) -> Result<(), TensorError> {
        let dim = self.dim();
        for i in 0..dim {
            let b = Elem::basis(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(TensorError::BadUnit(self.labels[i].clone()));
            }
            for j in 0..dim {
                let want = self.parity[i] ^ self.parity[j];
                if self.table[i * dim + j].iter().any(|e| self.parity[e.idx] != want) {
                    return Err(TensorError::ParityViolation(self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        let bad = (0..dim).into_par_iter().find_map_any(|i| {
            for j in 0..dim {
                let ij = self.basis_product(i, j);
                for k in 0..dim {
                    let l = self.mul(&ij, &Elem::basis(k));
                    let r = self.mul(&Elem::basis(i), &self.basis_product(j, k));
                    if l != r {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        if let Some((i, j, k)) = bad {
            return Err(TensorError::NotAssociative(
                self.labels[i].clone(),
                self.labels[j].clone(),
                self.labels[k].clone(),
            ));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn parity(&self, i: usize) -> u8 {
        self.parity[i]
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }

    pub fn is_super(&self) -> bool {
        self.parity.contains(&1)
    }

    pub fn unit(&self) -> &Elem {
        &self.unit
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Elem {
        Elem::from_terms(self.table[i * self.dim() + j].iter().map(|e| (e.idx, e.coeff.clone())))
    }

    /// The full multiplication table as elements.
    pub fn mult_table(&self) -> Vec<Vec<Elem>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.basis_product(i, j)).collect()).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let dim = self.dim();
        let mut out = Elem::zero();
        for (i, ca) in a.iter() {
            for (j, cb) in b.iter() {
                let c = ca * cb;
                for e in &self.table[i * dim + j] {
                    out.add_term(e.idx, &(&c * &e.coeff));
                }
            }
        }
        out
    }

    /// Product of a sequence of elements, left to right.
    pub fn mul_all(&self, xs: &[&Elem]) -> Elem {
        xs.iter().fold(self.unit.clone(), |acc, x| self.mul(&acc, x))
    }

    pub fn pow(&self, a: &Elem, e: u32) -> Elem {
        (0..e).fold(self.unit.clone(), |acc, _| self.mul(&acc, a))
    }

    pub fn commutator(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    /// Parity of a homogeneous element, `None` when inhomogeneous or zero.
    pub fn elem_parity(&self, a: &Elem) -> Option<u8> {
        let mut p = None;
        for (i, _) in a.iter() {
            match p {
                None => p = Some(self.parity[i]),
                Some(q) if q != self.parity[i] => return None,
                _ => {}
            }
        }
        p
    }

    /// Matrix of left multiplication by `a`, column j = a·e_j.
    pub fn left_mult_matrix(&self, a: &Elem) -> Vec<Vec<CycNum>> {
        let dim = self.dim();
        let mut m = vec![vec![CycNum::zero(); dim]; dim];
        for j in 0..dim {
            for (i, c) in self.mul(a, &Elem::basis(j)).iter() {
                m[i][j] = c.clone();
            }
        }
        m
    }

    /// 1⊗…⊗1 with n legs.
    pub fn tensor_unit(&self, n: usize) -> TensorElem {
        let u = TensorElem::from_elem(&self.unit);
        (0..n).fold(TensorElem::scalar(CycNum::one()), |acc, _| acc.outer(&u))
    }

    /// Outer product of elements.
    pub fn tensor(&self, xs: &[&Elem]) -> TensorElem {
        xs.iter().fold(TensorElem::scalar(CycNum::one()), |acc, x| acc.outer(&TensorElem::from_elem(x)))
    }

    /// Product in A^{⊗n}; with `sup`, (a₁⊗a₂)(b₁⊗b₂) = (−1)^{|a₂||b₁|} a₁b₁⊗a₂b₂ extended to n legs.
    pub fn tmul(&self, a: &TensorElem, b: &TensorElem, sup: bool) -> Result<TensorElem, TensorError> {
        if a.legs != b.legs {
            return Err(TensorError::ShapeError(a.legs, b.legs));
        }
        let legs = a.legs;
        if legs == 0 {
            return Ok(TensorElem::scalar(a.to_scalar() * b.to_scalar()));
        }
        let sup = sup && self.is_super();
        let lhs: Vec<(u64, &CycNum)> = a.raw_terms().collect();
        let rhs: Vec<(u64, &CycNum)> = b.raw_terms().collect();
        let work = |chunk: &[(u64, &CycNum)]| -> HashMap<u64, CycNum> {
            let mut acc: HashMap<u64, CycNum> = HashMap::new();
            let mut entries: Vec<&[Entry]> = Vec::with_capacity(legs);
            for &(ka, ca) in chunk {
                for &(kb, cb) in &rhs {
                    entries.clear();
                    let mut sign = false;
                    let mut cum_b = 0u8;
                    let mut empty = false;
                    for l in 0..legs {
                        let ia = leg_of(ka, legs, l);
                        let ib = leg_of(kb, legs, l);
                        if sup {
                            sign ^= (self.parity[ia] & cum_b) == 1;
                            cum_b ^= self.parity[ib];
                        }
                        let e = &self.table[ia * self.dim() + ib];
                        if e.is_empty() {
                            empty = true;
                            break;
                        }
                        entries.push(e);
                    }
                    if empty {
                        continue;
                    }
                    let mut c = ca * cb;
                    if sign {
                        c = -c;
                    }
                    expand_into(&mut acc, &entries, 0, 0, &c);
                }
            }
            acc
        };
        let big = lhs.len() * rhs.len() > 20_000;
        let acc = if big {
            lhs.par_chunks(16)
                .map(work)
                .reduce(HashMap::new, |mut x, y| {
                    for (k, c) in y {
                        *x.entry(k).or_default() += &c;
                    }
                    x
                })
        } else {
            work(&lhs)
        };
        Ok(TensorElem::from_map(legs, acc))
    }

    /// Product of several tensors, left to right.
    pub fn tmul_all(&self, xs: &[&TensorElem], sup: bool) -> Result<TensorElem, TensorError> {
        let mut it = xs.iter();
        let first = it.next().expect("non-empty product");
        it.try_fold((*first).clone(), |acc, x| self.tmul(&acc, x, sup))
    }

    /// New leg k carries old leg `perm[k]`. With `sup`, each inversion of two odd entries contributes −1.
    pub fn permute_legs(&self, t: &TensorElem, perm: &[usize], sup: bool) -> Result<TensorElem, TensorError> {
        let legs = t.legs;
        let mut seen = vec![false; legs];
        if perm.len() != legs || perm.iter().any(|&p| p >= legs || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::BadPermutation(perm.to_vec()));
        }
        let sup = sup && self.is_super();
        let mut out = TensorElem::zero(legs);
        for (k, c) in t.raw_terms() {
            let old = unpack(k, legs);
            let new: Vec<usize> = perm.iter().map(|&p| old[p]).collect();
            let mut neg = false;
            if sup {
                for x in 0..legs {
                    for y in (x + 1)..legs {
                        if perm[x] > perm[y] && self.parity[new[x]] == 1 && self.parity[new[y]] == 1 {
                            neg = !neg;
                        }
                    }
                }
            }
            out.add_term(pack(&new), &if neg { -c } else { c.clone() });
        }
        Ok(out)
    }

    /// Place the legs of `t` at `positions` inside an n-leg tensor, units elsewhere.
    pub fn embed(&self, t: &TensorElem, n: usize, positions: &[usize]) -> TensorElem {
        assert_eq!(positions.len(), t.legs);
        let mut rest: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
        let padded = t.outer(&self.tensor_unit(n - t.legs));
        // padded leg j sits at target position order[j]
        let mut order = positions.to_vec();
        order.append(&mut rest);
        let mut perm = vec![0; n];
        for (j, &p) in order.iter().enumerate() {
            perm[p] = j;
        }
        // units are even, and t's legs keep their relative order only if positions is increasing
        let sorted = positions.windows(2).all(|w| w[0] < w[1]);
        self.permute_legs(&padded, &perm, !sorted).expect("valid embedding")
    }

    /// Apply a linear map to one leg. With `sup` and an odd map, the Koszul sign
    /// (−1)^{Σ parities of legs left of the target} is applied termwise.
    pub fn apply_on_leg(&self, t: &TensorElem, leg: usize, f: &LegMap, sup: bool) -> TensorElem {
        let legs = t.legs;
        assert!(leg < legs);
        let sup = sup && f.odd && self.is_super();
        let out_legs = legs - 1 + f.out_legs;
        let right_legs = legs - 1 - leg;
        let right_shift = LEG_BITS as usize * right_legs;
        let mut out = TensorElem::zero(out_legs);
        for (k, c) in t.raw_terms() {
            let idx = leg_of(k, legs, leg);
            let left = k >> (right_shift + LEG_BITS as usize);
            let right = k & ((1u64 << right_shift) - 1);
            let mut c = c.clone();
            if sup {
                let p: u8 = (0..leg).map(|l| self.parity[leg_of(k, legs, l)]).fold(0, |a, b| a ^ b);
                if p == 1 {
                    c = -c;
                }
            }
            for (ki, ci) in f.images[idx].raw_terms() {
                let key = (((left << (LEG_BITS as usize * f.out_legs)) | ki) << right_shift) | right;
                out.add_term(key, &(&c * ci));
            }
        }
        out
    }

    /// Contract one leg against a dense functional.
    pub fn contract(&self, t: &TensorElem, leg: usize, f: &[CycNum]) -> TensorElem {
        self.apply_on_leg(t, leg, &LegMap::from_functional(f), false)
    }

    /// Apply an even linear map given by basis images to an element.
    pub fn apply_map(&self, a: &Elem, images: &[Elem]) -> Elem {
        let mut out = Elem::zero();
        for (i, c) in a.iter() {
            out = out.add(&images[i].scale(c));
        }
        out
    }

    /// Inverse of a tensor in A^{⊗n} by a linear-dependency search on its powers.
    pub fn tinv(&self, t: &TensorElem, sup: bool) -> Result<TensorElem, TensorError> {
        let one = self.tensor_unit(t.legs);
        let mul = |a: &TensorElem, b: &TensorElem| self.tmul(a, b, sup).expect("same shape");
        let inv = crate::linalg::inverse_by_powers(t, &one, mul).ok_or(TensorError::NotInvertible)?;
        if self.tmul(t, &inv, sup)? != one || self.tmul(&inv, t, sup)? != one {
            return Err(TensorError::NotInvertible);
        }
        Ok(inv)
    }

    /// Inverse of an element of A.
    pub fn inv(&self, a: &Elem) -> Result<Elem, TensorError> {
        Ok(self.tinv(&TensorElem::from_elem(a), false)?.to_elem())
    }
}

/// Expand the cartesian product of per-leg table entries into `acc`.
fn expand_into(acc: &mut HashMap<u64, CycNum>, entries: &[&[Entry]], leg: usize, key: u64, c: &CycNum) {
    if leg == entries.len() {
        let slot = acc.entry(key).or_default();
        *slot += c;
        return;
    }
    for e in entries[leg] {
        let k = (key << LEG_BITS) | e.idx as u64;
        match e.unit_sign {
            1 => expand_into(acc, entries, leg + 1, k, c),
            -1 => expand_into(acc, entries, leg + 1, k, &-c),
            _ => expand_into(acc, entries, leg + 1, k, &(c * &e.coeff)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exterior algebra on two odd generators a, b: basis 1, a, b, ab.
    fn grassmann2() -> SuperAlgebra {
        let labels = ["1", "a", "b", "ab"].map(String::from).to_vec();
        let parity = vec![0, 1, 1, 0];
        let z = Elem::zero;
        let e = Elem::basis;
        let m = |c: i64, i: usize| Elem::term(i, CycNum::from_int(c));
        let mult = vec![
            vec![e(0), e(1), e(2), e(3)],
            vec![e(1), z(), e(3), z()],
            vec![e(2), m(-1, 3), z(), z()],
            vec![e(3), z(), z(), z()],
        ];
        SuperAlgebra::new("grassmann2", labels, parity, mult, e(0)).unwrap()
    }

    #[test]
    fn packing_is_lexicographic() {
        assert!(pack(&[0, 5, 1]) < pack(&[1, 0, 0]));
        assert_eq!(unpack(pack(&[3, 7, 2, 9]), 4), vec![3, 7, 2, 9]);
    }

    #[test]
    fn koszul_rule_on_two_legs() {
        let g = grassmann2();
        let a = Elem::basis(1);
        let one = Elem::basis(0);
        let a1 = g.tensor(&[&a, &one]);
        let one_a = g.tensor(&[&one, &a]);
        let aa = g.tensor(&[&a, &a]);
        assert_eq!(g.tmul(&a1, &one_a, true).unwrap(), aa);
        assert_eq!(g.tmul(&one_a, &a1, true).unwrap(), aa.neg());
        assert_eq!(g.tmul(&one_a, &a1, false).unwrap(), aa);
        assert!(matches!(g.tmul(&a1, &g.tensor_unit(3), true), Err(TensorError::ShapeError(2, 3))));
    }

    #[test]
    fn unit_tensor_and_outer_support() {
        let g = grassmann2();
        let u3 = g.tensor_unit(3);
        assert_eq!(u3.len(), 1);
        assert_eq!(u3.get(&[0, 0, 0]), CycNum::one());
        let t = g.tensor(&[&Elem::basis(3), &Elem::basis(3)]);
        assert_eq!(t.iter().map(|(i, _)| i).collect::<Vec<_>>(), vec![vec![3, 3]]);
    }

    #[test]
    fn super_swap_of_odd_legs() {
        let g = grassmann2();
        let ab = g.tensor(&[&Elem::basis(1), &Elem::basis(2)]);
        let ba = g.tensor(&[&Elem::basis(2), &Elem::basis(1)]);
        assert_eq!(g.permute_legs(&ab, &[1, 0], true).unwrap(), ba.neg());
        assert_eq!(g.permute_legs(&ab, &[1, 0], false).unwrap(), ba);
        assert_eq!(g.permute_legs(&ab, &[0, 1], true).unwrap(), ab);
        assert!(g.permute_legs(&ab, &[0, 0], true).is_err());
    }

    #[test]
    fn embedding_and_contraction() {
        let g = grassmann2();
        let t = g.tensor(&[&Elem::basis(1), &Elem::basis(2)]);
        let t13 = g.embed(&t, 3, &[0, 2]);
        assert_eq!(t13, g.tensor(&[&Elem::basis(1), &Elem::basis(0), &Elem::basis(2)]));
        let t31 = g.embed(&t, 3, &[2, 0]);
        assert_eq!(t31, g.tensor(&[&Elem::basis(2), &Elem::basis(0), &Elem::basis(1)]).neg());
        let eps = vec![CycNum::one(), CycNum::zero(), CycNum::zero(), CycNum::zero()];
        let u = g.tensor_unit(2);
        assert_eq!(g.contract(&u, 0, &eps), g.tensor_unit(1));
        assert_eq!(g.contract(&g.contract(&u, 0, &eps), 0, &eps).to_scalar(), CycNum::one());
    }

    #[test]
    fn odd_leg_map_picks_up_sign() {
        let g = grassmann2();
        // left multiplication by a, an odd map
        let la = LegMap::from_elems((0..4).map(|j| g.mul(&Elem::basis(1), &Elem::basis(j))).collect(), true);
        let t = g.tensor(&[&Elem::basis(2), &Elem::basis(0)]);
        let got = g.apply_on_leg(&t, 1, &la, true);
        assert_eq!(got, g.tensor(&[&Elem::basis(2), &Elem::basis(1)]).neg());
        let got0 = g.apply_on_leg(&t, 0, &la, true);
        assert_eq!(got0, g.tensor(&[&Elem::basis(3), &Elem::basis(0)]));
    }

    #[test]
    fn inverse_of_unipotent_tensor() {
        let g = grassmann2();
        let t = g.tensor_unit(2).add(&g.tensor(&[&Elem::basis(1), &Elem::basis(2)]));
        let ti = g.tinv(&t, true).unwrap();
        assert_eq!(g.tmul(&t, &ti, true).unwrap(), g.tensor_unit(2));
        let n = g.tensor(&[&Elem::basis(1), &Elem::basis(2)]);
        assert_eq!(g.tinv(&n, true), Err(TensorError::NotInvertible));
    }

    #[test]
    fn rejects_non_associative_table() {
        let labels = ["1", "x"].map(String::from).to_vec();
        let e = Elem::basis;
        // x·x = 1 + x is associative; use a broken unit instead
        let mult = vec![vec![e(0), e(1)], vec![e(1), e(1).add(&e(0))]];
        assert!(SuperAlgebra::new("ok", labels.clone(), vec![0, 0], mult, e(0)).is_ok());
        let bad = vec![vec![e(0), e(0)], vec![e(1), e(1)]];
        assert!(matches!(SuperAlgebra::new("bad", labels, vec![0, 0], bad, e(0)), Err(TensorError::BadUnit(_))));
    }

    fn arb_t3() -> impl Strategy<Value = TensorElem> {
        proptest::collection::vec(((0usize..4, 0usize..4, 0usize..4), -3i64..4), 0..6).prop_map(|v| {
            let mut t = TensorElem::zero(3);
            for ((a, b, c), x) in v {
                t.add_indexed(&[a, b, c], &CycNum::from_int(x));
            }
            t
        })
    }

    fn arb_perm3() -> impl Strategy<Value = Vec<usize>> {
        Just(vec![0usize, 1, 2]).prop_shuffle()
    }

    proptest! {
        #[test]
        fn super_product_is_associative(a in arb_t3(), b in arb_t3(), c in arb_t3()) {
            let g = grassmann2();
            let l = g.tmul(&g.tmul(&a, &b, true).unwrap(), &c, true).unwrap();
            let r = g.tmul(&a, &g.tmul(&b, &c, true).unwrap(), true).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn permutations_compose(t in arb_t3(), p in arb_perm3(), q in arb_perm3()) {
            let g = grassmann2();
            let step = g.permute_legs(&g.permute_legs(&t, &p, true).unwrap(), &q, true).unwrap();
            let comp: Vec<usize> = q.iter().map(|&k| p[k]).collect();
            prop_assert_eq!(step, g.permute_legs(&t, &comp, true).unwrap());
        }

        #[test]
        fn even_tensors_ignore_super_flag(v in proptest::collection::vec(((0usize..2, 0usize..2), -3i64..4), 0..5),
                                          w in proptest::collection::vec(((0usize..2, 0usize..2), -3i64..4), 0..5)) {
            // restrict to the even basis vectors 1 and ab
            let g = grassmann2();
            let build = |v: &Vec<((usize, usize), i64)>| {
                let mut t = TensorElem::zero(2);
                for ((a, b), x) in v {
                    t.add_indexed(&[a * 3, b * 3], &CycNum::from_int(*x));
                }
                t
            };
            let (a, b) = (build(&v), build(&w));
            prop_assert_eq!(g.tmul(&a, &b, true).unwrap(), g.tmul(&a, &b, false).unwrap());
            prop_assert_eq!(g.permute_legs(&a, &[1, 0], true).unwrap(), g.permute_legs(&a, &[1, 0], false).unwrap());
        }
    }
}
