//! Super modules over S with homogeneous bases, and the vector-level
//! operations used by the transport identities: the super action of
//! S-tensors with Koszul signs, plain Q-actions through the functor
//! G (K ↦ z·ω, f± ↦ x±), leg maps, super flips and leg merging.
//!
//! Multi-leg vectors are [`TensorElem`]s whose leg k indexes the basis of
//! the k-th module in a slice of modules.

use crate::cyclo::CycNum;
use crate::salg::{self, smono, SElements};
use crate::tensor::{pack, Elem, SuperAlgebra, TensorElem};
use crate::uqsl2::{self, idx, pbw};

/// Parity of an S basis monomial.
pub fn s_parity(k: usize) -> u8 {
    let (a, b, _) = smono(k);
    ((a + b) % 2) as u8
}

/// An S-module with a homogeneous basis. `s_action` is empty for a bare
/// super vector space.
#[derive(Clone, Debug)]
pub struct GradedModuleMap {
    pub name: String,
    pub parity: Vec<u8>,
    /// `s_action[k][j]` is the image of basis vector j under S basis element k.
    pub s_action: Vec<Vec<Elem>>,
}

impl GradedModuleMap {
    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    /// Bare super vector space with the given parities.
    pub fn plain(name: &str, parity: Vec<u8>) -> Self {
        GradedModuleMap { name: name.into(), parity, s_action: Vec::new() }
    }

    /// Left regular module of S.
    pub fn s_regular(alg: &SuperAlgebra) -> Self {
        let s_action = (0..salg::DIM).map(|k| (0..salg::DIM).map(|j| alg.basis_product(k, j)).collect()).collect();
        GradedModuleMap { name: "S".into(), parity: (0..salg::DIM).map(s_parity).collect(), s_action }
    }

    /// Module spanned by `basis` ⊂ S under left multiplication; `basis` must span a left ideal.
    pub fn s_ideal(alg: &SuperAlgebra, name: &str, basis: &[Elem]) -> Option<Self> {
        let sparse: Vec<_> = basis.iter().map(|b| crate::linalg::dense_to_sparse(&b.to_dense(salg::DIM))).collect();
        let mut s_action = Vec::with_capacity(salg::DIM);
        for k in 0..salg::DIM {
            let mut row = Vec::with_capacity(basis.len());
            for b in basis {
                let img = alg.mul(&Elem::basis(k), b);
                let coords = crate::linalg::coordinates(&sparse, &crate::linalg::dense_to_sparse(&img.to_dense(salg::DIM)))?;
                row.push(Elem::from_dense(&coords));
            }
            s_action.push(row);
        }
        let parity = basis.iter().map(|b| alg.elem_parity(b)).collect::<Option<Vec<u8>>>()?;
        Some(GradedModuleMap { name: name.into(), parity, s_action })
    }

    /// B = span{b, c}.
    pub fn b_module(alg: &SuperAlgebra) -> Self {
        let el = SElements::new(alg);
        Self::s_ideal(alg, "B", &[el.b, el.c]).expect("B is a left ideal")
    }

    /// S₀ = e₀S with basis e₀, x⁺e₀, x⁻e₀, x⁺x⁻e₀.
    pub fn s0_module(alg: &SuperAlgebra) -> Self {
        Self::s_ideal(alg, "S0", &s0_basis(alg)).expect("S₀ is a left ideal")
    }

    /// X ⊗ V with S acting on X only; index x·dim(V) + v.
    pub fn act_first(&self, v: &GradedModuleMap) -> Self {
        let (dx, dv) = (self.dim(), v.dim());
        let parity = (0..dx * dv).map(|k| self.parity[k / dv] ^ v.parity[k % dv]).collect();
        let s_action = self
            .s_action
            .iter()
            .map(|row| {
                (0..dx * dv)
                    .map(|k| Elem::from_terms(row[k / dv].iter().map(|(x, c)| (x * dv + k % dv, c.clone()))))
                    .collect()
            })
            .collect();
        GradedModuleMap { name: format!("{}⊗{}", self.name, v.name), parity, s_action }
    }

    /// Restriction to the span of a subset of basis vectors, which must be invariant.
    pub fn restrict(&self, name: &str, keep: &[usize]) -> Option<Self> {
        let pos = |j: usize| keep.iter().position(|&k| k == j);
        let mut s_action = Vec::with_capacity(self.s_action.len());
        for row in &self.s_action {
            let mut new = Vec::with_capacity(keep.len());
            for &j in keep {
                let mut e = Elem::zero();
                for (t, c) in row[j].iter() {
                    e.add_term(pos(t)?, c);
                }
                new.push(e);
            }
            s_action.push(new);
        }
        Some(GradedModuleMap { name: name.into(), parity: keep.iter().map(|&j| self.parity[j]).collect(), s_action })
    }

    /// Action of an S element on a vector.
    pub fn act(&self, s: &Elem, v: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (k, sc) in s.iter() {
            for (j, vc) in v.iter() {
                out = out.add(&self.s_action[k][j].scale(&(sc * vc)));
            }
        }
        out
    }

    pub fn omega(&self, v: &Elem) -> Elem {
        Elem::from_terms(v.iter().map(|(j, c)| (j, if self.parity[j] == 1 { -c } else { c.clone() })))
    }

    /// ρ(st) = ρ(s)ρ(t) on all basis pairs and ρ(1) = id.
    pub fn is_module(&self, alg: &SuperAlgebra) -> bool {
        let n = self.dim();
        let unit_ok = (0..n).all(|j| self.act(alg.unit(), &Elem::basis(j)) == Elem::basis(j));
        unit_ok
            && (0..salg::DIM).all(|s| {
                (0..salg::DIM).all(|t| {
                    let st = alg.basis_product(s, t);
                    (0..n).all(|j| {
                        self.act(&st, &Elem::basis(j)) == self.act(&Elem::basis(s), &self.s_action[t][j])
                    })
                })
            })
    }

    /// Odd basis elements of S flip parity, even ones preserve it.
    pub fn respects_grading(&self) -> bool {
        self.s_action.iter().enumerate().all(|(k, row)| {
            row.iter().enumerate().all(|(j, img)| img.iter().all(|(t, _)| self.parity[t] == self.parity[j] ^ s_parity(k)))
        })
    }

    /// Images of basis vectors under the PBW basis of Q acting on G(X).
    pub fn q_rep(&self, alg: &SuperAlgebra) -> QRep {
        let el = SElements::new(alg);
        let i = CycNum::i();
        let k_map = |v: &Elem| self.omega(&self.act(&el.z, v));
        let f_map = |v: &Elem| self.act(&el.xp, v).scale(&i);
        let e_map = |v: &Elem| self.act(&el.xm, &k_map(v));
        let images = (0..uqsl2::DIM)
            .map(|q| {
                let (m, n, l) = pbw(q);
                (0..self.dim())
                    .map(|j| {
                        let mut v = Elem::basis(j);
                        for _ in 0..l {
                            v = k_map(&v);
                        }
                        if n == 1 {
                            v = f_map(&v);
                        }
                        if m == 1 {
                            v = e_map(&v);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        QRep { images }
    }
}

/// Q acting on a module: `images[q][j]` is the image of basis vector j under PBW element q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRep {
    pub images: Vec<Vec<Elem>>,
}

impl QRep {
    pub fn dim(&self) -> usize {
        self.images[0].len()
    }

    pub fn act(&self, q: &Elem, v: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (k, qc) in q.iter() {
            for (j, vc) in v.iter() {
                out = out.add(&self.images[k][j].scale(&(qc * vc)));
            }
        }
        out
    }

    /// The defining relations of Q hold on this representation.
    pub fn is_q_module(&self, qalg: &SuperAlgebra) -> bool {
        let n = self.dim();
        (0..uqsl2::DIM).all(|a| {
            (0..uqsl2::DIM).all(|b| {
                let ab = qalg.basis_product(a, b);
                (0..n).all(|j| self.act(&ab, &Elem::basis(j)) == self.act(&Elem::basis(a), &self.images[b][j]))
            })
        })
    }
}

/// Basis e₀, x⁺e₀, x⁻e₀, x⁺x⁻e₀ of S₀.
pub fn s0_basis(alg: &SuperAlgebra) -> Vec<Elem> {
    let el = SElements::new(alg);
    ["1", "p", "m", "pm"].iter().map(|w| alg.mul(&salg::sword(alg, w), &el.e0)).collect()
}

/// ι: S → Q, x± ↦ f±, L ↦ K².
pub fn iota(salg_alg: &SuperAlgebra, qalg: &SuperAlgebra, s: &Elem) -> Elem {
    let _ = salg_alg;
    let qe = uqsl2::QElements::new(qalg);
    let mut out = Elem::zero();
    for (k, c) in s.iter() {
        let (a, b, l) = smono(k);
        let mut e = qalg.unit().clone();
        if a == 1 {
            e = qalg.mul(&e, &qe.fp);
        }
        if b == 1 {
            e = qalg.mul(&e, &qe.fm);
        }
        if l == 1 {
            e = qalg.mul(&e, &Elem::basis(idx(0, 0, 2)));
        }
        out = out.add(&e.scale(c));
    }
    out
}

/// The regular Q-module Q̂ in the homogeneous basis E^mF^nP_j, where P_j is the
/// idempotent with K = i^j; index 4(2m+n) + j.
#[derive(Clone, Debug)]
pub struct QHat {
    pub module: GradedModuleMap,
    pub q_rep: QRep,
    /// PBW coordinates of each homogeneous basis vector.
    pub from_hat: Vec<Elem>,
    /// Homogeneous coordinates of each PBW basis vector.
    pub to_hat: Vec<Elem>,
}

impl QHat {
    pub fn new(salg_alg: &SuperAlgebra, qalg: &SuperAlgebra) -> Self {
        let i = CycNum::i();
        let quarter = CycNum::frac(1, 4);
        let hat = |m: usize, n: usize, j: usize| 4 * (2 * m + n) + j;
        let mut from_hat = vec![Elem::zero(); 16];
        let mut to_hat = vec![Elem::zero(); 16];
        for m in 0..2 {
            for n in 0..2 {
                for j in 0..4 {
                    from_hat[hat(m, n, j)] =
                        Elem::from_terms((0..4).map(|k| (idx(m, n, k), &quarter * &i.pow(((4 - j) * k % 4) as u32))));
                    // E^mF^nK^j = Σ_t i^{tj} E^mF^nP_t
                    to_hat[idx(m, n, j)] = Elem::from_terms((0..4).map(|t| (hat(m, n, t), i.pow((t * j % 4) as u32))));
                }
            }
        }
        let conv = |e: &Elem, table: &[Elem]| {
            e.iter().fold(Elem::zero(), |acc, (k, c)| acc.add(&table[k].scale(c)))
        };
        let left = |x: &Elem| -> Vec<Elem> {
            (0..16).map(|h| conv(&qalg.mul(x, &from_hat[h]), &to_hat)).collect()
        };
        let s_action = (0..salg::DIM).map(|k| left(&iota(salg_alg, qalg, &Elem::basis(k)))).collect();
        let parity = (0..16).map(|h| (((h / 8) + (h / 4) % 2 + usize::from(h % 4 >= 2)) % 2) as u8).collect();
        let q_rep = QRep { images: (0..uqsl2::DIM).map(|q| left(&Elem::basis(q))).collect() };
        QHat { module: GradedModuleMap { name: "Qhat".into(), parity, s_action }, q_rep, from_hat, to_hat }
    }

    /// Homogeneous coordinates of an element of Q.
    pub fn hat_of(&self, e: &Elem) -> Elem {
        e.iter().fold(Elem::zero(), |acc, (k, c)| acc.add(&self.to_hat[k].scale(c)))
    }

    /// Convert every leg of a vector from homogeneous to PBW coordinates.
    pub fn to_pbw(&self, v: &TensorElem) -> TensorElem {
        map_all_legs(v, &self.from_hat)
    }

    pub fn to_hat_tensor(&self, v: &TensorElem) -> TensorElem {
        map_all_legs(v, &self.to_hat)
    }

    /// e_s Q̂ (s = 0, 1) as a submodule.
    pub fn sector(&self, s: usize) -> GradedModuleMap {
        let keep: Vec<usize> = (0..16).filter(|h| (h % 4) % 2 == s).collect();
        self.module.restrict(&format!("Qhat{s}"), &keep).expect("sector is invariant")
    }

    pub fn sector_indices(s: usize) -> Vec<usize> {
        (0..16).filter(|h| (h % 4) % 2 == s).collect()
    }
}

fn map_all_legs(v: &TensorElem, table: &[Elem]) -> TensorElem {
    let mut out = v.clone();
    for leg in 0..v.legs() {
        out = map_leg_images(&out, leg, |j| table[j].clone());
    }
    out
}

/// Apply a linear map on one leg, no signs.
pub fn map_leg_images(v: &TensorElem, leg: usize, f: impl Fn(usize) -> Elem) -> TensorElem {
    let mut out = TensorElem::zero(v.legs());
    for (ix, c) in v.iter() {
        let img = f(ix[leg]);
        for (t, tc) in img.iter() {
            let mut n = ix.clone();
            n[leg] = t;
            out.add_term(pack(&n), &(c * tc));
        }
    }
    out
}

/// Apply a map on one leg; an odd map picks up (−1)^{Σ parities of earlier legs}.
pub fn map_leg(v: &TensorElem, leg: usize, f: impl Fn(usize) -> Elem, odd: bool, mods: &[&GradedModuleMap]) -> TensorElem {
    let mut out = TensorElem::zero(v.legs());
    for (ix, c) in v.iter() {
        let before: u8 = (0..leg).fold(0, |p, a| p ^ mods[a].parity[ix[a]]);
        let c = if odd && before == 1 { -c } else { c.clone() };
        for (t, tc) in f(ix[leg]).iter() {
            let mut n = ix.clone();
            n[leg] = t;
            out.add_term(pack(&n), &(&c * tc));
        }
    }
    out
}

/// Add Π images[a] into `out` at legs first.., keeping the other indices.
fn push_product(out: &mut TensorElem, ix: &mut Vec<usize>, first: usize, imgs: &[&Elem], coef: &CycNum) {
    if imgs.is_empty() {
        out.add_term(pack(ix), coef);
        return;
    }
    for (t, c) in imgs[0].iter() {
        let old = ix[first];
        ix[first] = t;
        push_product(out, ix, first + 1, &imgs[1..], &(coef * c));
        ix[first] = old;
    }
}

/// Super action of an S-tensor `t` on legs first..first+t.legs() of `v`:
/// (a₁⊗…⊗a_k).(u₁⊗…⊗u_k) = (−1)^{Σ_{x<y}|a_y||u_x|} a₁.u₁⊗…⊗a_k.u_k.
pub fn hat_act(t: &TensorElem, v: &TensorElem, first: usize, mods: &[&GradedModuleMap]) -> TensorElem {
    let k = t.legs();
    let mut out = TensorElem::zero(v.legs());
    let tt: Vec<(Vec<usize>, CycNum)> = t.iter().map(|(i, c)| (i, c.clone())).collect();
    for (vi, vc) in v.iter() {
        for (ti, tc) in &tt {
            let mut neg = false;
            let mut seen = 0u8;
            for a in 0..k {
                neg ^= (s_parity(ti[a]) & seen) == 1;
                seen ^= mods[first + a].parity[vi[first + a]];
            }
            let imgs: Vec<&Elem> = (0..k).map(|a| &mods[first + a].s_action[ti[a]][vi[first + a]]).collect();
            if imgs.iter().any(|e| e.is_zero()) {
                continue;
            }
            let coef = vc * tc;
            let coef = if neg { -coef } else { coef };
            let mut ix = vi.clone();
            push_product(&mut out, &mut ix, first, &imgs, &coef);
        }
    }
    out
}

/// Plain action of a Q-tensor on legs first.. of `v` (no signs).
pub fn q_act(t: &TensorElem, v: &TensorElem, first: usize, reps: &[&QRep]) -> TensorElem {
    let k = t.legs();
    let mut out = TensorElem::zero(v.legs());
    let tt: Vec<(Vec<usize>, CycNum)> = t.iter().map(|(i, c)| (i, c.clone())).collect();
    for (vi, vc) in v.iter() {
        for (ti, tc) in &tt {
            let imgs: Vec<&Elem> = (0..k).map(|a| &reps[first + a].images[ti[a]][vi[first + a]]).collect();
            if imgs.iter().any(|e| e.is_zero()) {
                continue;
            }
            let mut ix = vi.clone();
            push_product(&mut out, &mut ix, first, &imgs, &(vc * tc));
        }
    }
    out
}

/// New leg k carries old leg perm[k]; each crossing of two odd vectors gives −1.
pub fn sflip(v: &TensorElem, perm: &[usize], mods: &[&GradedModuleMap]) -> TensorElem {
    let legs = v.legs();
    let mut out = TensorElem::zero(legs);
    for (ix, c) in v.iter() {
        let mut neg = false;
        for x in 0..legs {
            for y in (x + 1)..legs {
                if perm[x] > perm[y] && mods[perm[x]].parity[ix[perm[x]]] == 1 && mods[perm[y]].parity[ix[perm[y]]] == 1
                {
                    neg = !neg;
                }
            }
        }
        let n: Vec<usize> = perm.iter().map(|&p| ix[p]).collect();
        out.add_term(pack(&n), &if neg { -c } else { c.clone() });
    }
    out
}

/// Reorder a module list the same way as [`sflip`] reorders legs.
pub fn permuted<'a>(mods: &[&'a GradedModuleMap], perm: &[usize]) -> Vec<&'a GradedModuleMap> {
    perm.iter().map(|&p| mods[p]).collect()
}

/// Fuse legs k, k+1 into one leg with index x·dim₂ + y.
pub fn fuse(v: &TensorElem, k: usize, dim2: usize) -> TensorElem {
    let mut out = TensorElem::zero(v.legs() - 1);
    for (ix, c) in v.iter() {
        let mut n = ix[..k].to_vec();
        n.push(ix[k] * dim2 + ix[k + 1]);
        n.extend_from_slice(&ix[k + 2..]);
        out.add_term(pack(&n), c);
    }
    out
}

/// Inverse of [`fuse`].
pub fn split(v: &TensorElem, k: usize, dim2: usize) -> TensorElem {
    let mut out = TensorElem::zero(v.legs() + 1);
    for (ix, c) in v.iter() {
        let mut n = ix[..k].to_vec();
        n.push(ix[k] / dim2);
        n.push(ix[k] % dim2);
        n.extend_from_slice(&ix[k + 1..]);
        out.add_term(pack(&n), c);
    }
    out
}

/// ρ: the S leg k (regular module) acts on leg k+1; legs merge (an even map).
pub fn rho_merge(v: &TensorElem, k: usize, target: &GradedModuleMap) -> TensorElem {
    let mut out = TensorElem::zero(v.legs() - 1);
    for (ix, c) in v.iter() {
        for (t, tc) in target.s_action[ix[k]][ix[k + 1]].iter() {
            let mut n = ix[..k].to_vec();
            n.push(t);
            n.extend_from_slice(&ix[k + 2..]);
            out.add_term(pack(&n), &(c * tc));
        }
    }
    out
}

/// Basis vector u₁⊗…⊗u_n.
pub fn basis_vec(ix: &[usize]) -> TensorElem {
    let mut t = TensorElem::zero(ix.len());
    t.add_term(pack(ix), &CycNum::one());
    t
}

/// All multi-indices of the given dimensions, last index fastest.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out.into_iter().flat_map(|p| (0..d).map(move |j| [p.clone(), vec![j]].concat())).collect();
    }
    out
}

/// Stack per-input results under a leading leg carrying the input number.
pub fn stack(parts: &[TensorElem]) -> TensorElem {
    let legs = parts.first().map(|p| p.legs()).unwrap_or(0);
    let mut out = TensorElem::zero(legs + 1);
    for (n, p) in parts.iter().enumerate() {
        for (ix, c) in p.iter() {
            let mut k = vec![n];
            k.extend(ix);
            out.add_term(pack(&k), c);
        }
    }
    out
}
