//! Exact sparse Gaussian elimination over Q(ζ₂₄).

use std::collections::BTreeMap;
use std::ops::Bound;

use thiserror::Error;

use crate::cyclo::CycNum;
use crate::tensor::TensorElem;

pub type SparseVec = BTreeMap<u64, CycNum>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, Debug)]
struct Row {
    main: SparseVec,
    aug: Vec<CycNum>,
}

/// Incremental row echelon form with an augmented dense tail per row.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivot_of: BTreeMap<u64, usize>,
    aug_len: usize,
}

fn axpy(dst: &mut SparseVec, f: &CycNum, src: &SparseVec) {
    for (k, c) in src {
        let v = f * c;
        let slot = dst.entry(*k).or_default();
        *slot += &v;
        if slot.is_zero() {
            dst.remove(k);
        }
    }
}

impl Echelon {
    pub fn new(aug_len: usize) -> Self {
        Echelon { rows: Vec::new(), pivot_of: BTreeMap::new(), aug_len }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = u64> + '_ {
        self.pivot_of.keys().copied()
    }

    fn reduce_row(&self, row: &mut Row) {
        let mut cursor: Option<u64> = None;
        loop {
            let lower = match cursor {
                Some(c) => Bound::Excluded(c),
                None => Bound::Unbounded,
            };
            let hit = row
                .main
                .range((lower, Bound::Unbounded))
                .find(|(k, _)| self.pivot_of.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = hit else { break };
            let pr = &self.rows[self.pivot_of[&k]];
            // pivot rows are normalised to a leading 1
            let f = -c;
            axpy(&mut row.main, &f, &pr.main);
            for (a, b) in row.aug.iter_mut().zip(pr.aug.iter()) {
                *a += &(&f * b);
            }
            cursor = Some(k);
        }
    }

    /// Reduce a vector; returns the augmented tail if it reduces to zero,
    /// otherwise records it as a new pivot row and returns `None`.
    pub fn insert(&mut self, main: SparseVec, aug: Vec<CycNum>) -> Option<Vec<CycNum>> {
        assert_eq!(aug.len(), self.aug_len);
        let mut row = Row { main, aug };
        self.reduce_row(&mut row);
        let Some((&p, lead)) = row.main.iter().next() else {
            return Some(row.aug);
        };
        let inv = lead.inv().expect("nonzero pivot");
        for v in row.main.values_mut() {
            *v = &*v * &inv;
        }
        for v in row.aug.iter_mut() {
            *v = &*v * &inv;
        }
        self.pivot_of.insert(p, self.rows.len());
        self.rows.push(row);
        None
    }

    /// Back-substitute so every pivot column has a single nonzero entry.
    pub fn rref(&mut self) {
        let order: Vec<(u64, usize)> = self.pivot_of.iter().rev().map(|(k, r)| (*k, *r)).collect();
        for (k, r) in order {
            let src = self.rows[r].clone();
            for (other_k, other_r) in self.pivot_of.iter() {
                if *other_k >= k {
                    break;
                }
                let row = &mut self.rows[*other_r];
                if let Some(c) = row.main.get(&k).cloned() {
                    let f = -c;
                    axpy(&mut row.main, &f, &src.main);
                    for (a, b) in row.aug.iter_mut().zip(src.aug.iter()) {
                        *a += &(&f * b);
                    }
                }
            }
        }
    }

    /// Pivot rows keyed by their pivot column.
    pub fn pivot_rows(&self) -> impl Iterator<Item = (u64, &SparseVec, &[CycNum])> {
        self.pivot_of.iter().map(move |(k, r)| (*k, &self.rows[*r].main, self.rows[*r].aug.as_slice()))
    }
}

/// Solution set x₀ + span(kernel) of a linear system.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Vec<CycNum>,
    pub kernel: Vec<Vec<CycNum>>,
    pub free_cols: Vec<usize>,
}

impl AffineSolution {
    pub fn dim(&self) -> usize {
        self.kernel.len()
    }
}

/// Solve A·x = b over `ncols` unknowns, rows given sparsely.
pub fn solve(rows: Vec<SparseVec>, rhs: Vec<CycNum>, ncols: usize) -> Result<AffineSolution, LinalgError> {
    assert_eq!(rows.len(), rhs.len());
    let mut ech = Echelon::new(1);
    for (r, b) in rows.into_iter().zip(rhs) {
        if let Some(rest) = ech.insert(r, vec![b]) {
            if !rest[0].is_zero() {
                return Err(LinalgError::Inconsistent);
            }
        }
    }
    ech.rref();
    let mut particular = vec![CycNum::zero(); ncols];
    let pivots: Vec<u64> = ech.pivots().collect();
    for (p, _, aug) in ech.pivot_rows() {
        particular[p as usize] = aug[0].clone();
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(&(*c as u64))).collect();
    let mut kernel = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let mut v = vec![CycNum::zero(); ncols];
        v[f] = CycNum::one();
        for (p, row, _) in ech.pivot_rows() {
            if let Some(c) = row.get(&(f as u64)) {
                v[p as usize] = -c;
            }
        }
        kernel.push(v);
    }
    Ok(AffineSolution { particular, kernel, free_cols })
}

/// Nullspace of a dense matrix (rows × cols).
pub fn nullspace(m: &[Vec<CycNum>], ncols: usize) -> Vec<Vec<CycNum>> {
    let rows: Vec<SparseVec> = m.iter().map(|r| dense_to_sparse(r)).collect();
    let rhs = vec![CycNum::zero(); rows.len()];
    solve(rows, rhs, ncols).expect("homogeneous system").kernel
}

pub fn dense_to_sparse(v: &[CycNum]) -> SparseVec {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as u64, c.clone())).collect()
}

/// Rank of a set of sparse vectors.
pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut ech = Echelon::new(0);
    for v in vectors {
        ech.insert(v.clone(), vec![]);
    }
    ech.rank()
}

/// Express `target` in the span of `basis`; `None` if it is not in the span.
pub fn coordinates(basis: &[SparseVec], target: &SparseVec) -> Option<Vec<CycNum>> {
    let n = basis.len();
    let mut ech = Echelon::new(n + 1);
    for (j, b) in basis.iter().enumerate() {
        let mut aug = vec![CycNum::zero(); n + 1];
        aug[j] = CycNum::one();
        ech.insert(b.clone(), aug);
    }
    let mut aug = vec![CycNum::zero(); n + 1];
    aug[n] = CycNum::one();
    let rest = ech.insert(target.clone(), aug)?;
    // rest·(basis, target) = 0 with target coefficient rest[n]
    let t = rest[n].clone();
    if t.is_zero() {
        return None;
    }
    let inv = t.inv().ok()?;
    Some(rest[..n].iter().map(|c| -(c * &inv)).collect())
}

pub fn tensor_to_sparse(t: &TensorElem) -> SparseVec {
    t.raw_terms().map(|(k, c)| (k, c.clone())).collect()
}

/// Inverse of `t` from the first linear dependency among 1, t, t², ….
/// Returns `None` when that minimal relation has zero constant term.
pub fn inverse_by_powers(
    t: &TensorElem,
    one: &TensorElem,
    mul: impl Fn(&TensorElem, &TensorElem) -> TensorElem,
) -> Option<TensorElem> {
    const MAX_DEGREE: usize = 256;
    let mut powers = vec![one.clone()];
    let mut ech = Echelon::new(MAX_DEGREE + 1);
    let unit_aug = |j: usize| {
        let mut a = vec![CycNum::zero(); MAX_DEGREE + 1];
        a[j] = CycNum::one();
        a
    };
    if ech.insert(tensor_to_sparse(one), unit_aug(0)).is_some() {
        return None;
    }
    for j in 1..=MAX_DEGREE {
        let next = mul(powers.last().expect("non-empty"), t);
        if let Some(rel) = ech.insert(tensor_to_sparse(&next), unit_aug(j)) {
            // Σ rel[k] t^k = 0
            let a0 = rel[0].clone();
            if a0.is_zero() {
                return None;
            }
            let f = -a0.inv().ok()?;
            let mut inv = TensorElem::zero(t.legs());
            for (k, p) in powers.iter().enumerate() {
                let c = &rel[k + 1];
                if !c.is_zero() {
                    inv = inv.add(&p.scale(&(c * &f)));
                }
            }
            return Some(inv);
        }
        powers.push(next);
    }
    None
}

/// Dense square matrices over Q(ζ₂₄).
pub type Matrix = Vec<Vec<CycNum>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { CycNum::one() } else { CycNum::zero() }).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| &a[i][l] * &b[l][j]).sum()).collect())
        .collect()
}

pub fn mat_scale(a: &Matrix, c: &CycNum) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn mat_inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    let n = a.len();
    let mut ech = Echelon::new(n);
    for (i, row) in a.iter().enumerate() {
        let mut aug = vec![CycNum::zero(); n];
        aug[i] = CycNum::one();
        if ech.insert(dense_to_sparse(row), aug).is_some() {
            return Err(LinalgError::Singular);
        }
    }
    ech.rref();
    // row p of the reduced system reads e_p = Σ aug[i]·(row i of a), so aug rows form A⁻¹ read by pivot
    let mut inv = vec![vec![CycNum::zero(); n]; n];
    for (p, _, aug) in ech.pivot_rows() {
        inv[p as usize] = aug.to_vec();
    }
    // rows of `inv` combine rows of A into unit rows: inv·A = 1
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> CycNum {
        CycNum::from_int(n)
    }

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1
        let rows = vec![dense_to_sparse(&[c(1), c(1)]), dense_to_sparse(&[c(1), c(-1)])];
        let s = solve(rows, vec![c(3), c(1)], 2).unwrap();
        assert_eq!(s.particular, vec![c(2), c(1)]);
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn kernel_and_inconsistency() {
        let rows = vec![dense_to_sparse(&[c(1), c(2), c(3)])];
        let s = solve(rows.clone(), vec![c(0)], 3).unwrap();
        assert_eq!(s.dim(), 2);
        for v in &s.kernel {
            let dot: CycNum = v.iter().zip([c(1), c(2), c(3)].iter()).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        let bad = vec![dense_to_sparse(&[c(1), c(1)]), dense_to_sparse(&[c(2), c(2)])];
        assert_eq!(solve(bad, vec![c(1), c(3)], 2).unwrap_err(), LinalgError::Inconsistent);
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let i = CycNum::i();
        let a = vec![vec![c(1), i.clone(), c(0)], vec![c(0), c(2), c(1)], vec![i.clone(), c(0), c(1)]];
        let inv = mat_inverse(&a).unwrap();
        assert_eq!(mat_mul(&inv, &a), identity(3));
        assert_eq!(mat_mul(&a, &inv), identity(3));
        let sing = vec![vec![c(1), c(2)], vec![c(2), c(4)]];
        assert_eq!(mat_inverse(&sing).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn coordinates_in_span() {
        let b = vec![dense_to_sparse(&[c(1), c(1), c(0)]), dense_to_sparse(&[c(0), c(1), c(1)])];
        let t = dense_to_sparse(&[c(2), c(5), c(3)]);
        assert_eq!(coordinates(&b, &t).unwrap(), vec![c(2), c(3)]);
        assert!(coordinates(&b, &dense_to_sparse(&[c(1), c(0), c(0)])).is_none());
        assert_eq!(rank(&b), 2);
    }
}
