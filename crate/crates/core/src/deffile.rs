//! Plain-text algebra definition files.
//!
//! One term per line, `<section> <labels...> : <coeff>`. Blank lines and
//! `#` comments are ignored. The grammar is documented in `docs/deffile.md`.
//!
//! ```text
//! field cyclotomic-24
//! name uqsl2
//! super false
//! basis 1 0
//! basis K 0
//! unit 1 : 1
//! mult K K -> K2 : 1
//! coproduct K -> K K : 1
//! counit K : 1
//! antipode K -> K3 : 1
//! phi 1 1 1 : 1
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::cyclo::CycNum;
use crate::qhopf::{Check, Mismatch, QuasiHopfSpec};
use crate::tensor::{Elem, SuperAlgebra, TensorElem};

pub const FIELD: &str = "cyclotomic-24";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undeclared basis label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: bad coefficient `{text}`")]
    Coefficient { line: usize, text: String },
    #[error("line {line}: duplicate entry")]
    Duplicate { line: usize },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("unsupported field `{0}`")]
    Field(String),
    #[error("{0}")]
    Build(String),
}

/// Term table keyed by basis-index tuples. Zero coefficients are never stored.
pub type Terms = BTreeMap<Vec<usize>, CycNum>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraDefFile {
    pub name: String,
    pub sup: bool,
    pub labels: Vec<String>,
    pub parity: Vec<u8>,
    pub unit: Terms,
    /// keys `[a, b, c]`: coefficient of c in a·b
    pub mult: Terms,
    /// keys `[a, b, c]`: coefficient of b⊗c in Δ(a)
    pub coproduct: Terms,
    pub counit: Terms,
    /// keys `[a, b]`: coefficient of b in S(a)
    pub antipode: Terms,
    pub phi: Option<Terms>,
    pub r: Option<Terms>,
    pub alpha: Option<Terms>,
    pub beta: Option<Terms>,
    pub ribbon: Option<Terms>,
}

// (keyword, number of labels before `->`, after `->`)
const SECTIONS: [(&str, usize, usize); 10] = [
    ("unit", 1, 0),
    ("mult", 2, 1),
    ("coproduct", 1, 2),
    ("counit", 1, 0),
    ("antipode", 1, 1),
    ("phi", 3, 0),
    ("r", 2, 0),
    ("alpha", 1, 0),
    ("beta", 1, 0),
    ("ribbon", 1, 0),
];
// sections from here on are optional
const FIRST_OPTIONAL: usize = 5;

fn elem_terms<'a>(e: &'a Elem, prefix: &[usize]) -> impl Iterator<Item = (Vec<usize>, CycNum)> + 'a {
    let prefix = prefix.to_vec();
    e.iter().map(move |(i, c)| {
        let mut k = prefix.clone();
        k.push(i);
        (k, c.clone())
    })
}

fn tensor_terms(t: &TensorElem, prefix: &[usize]) -> Terms {
    t.iter()
        .map(|(idx, c)| {
            let mut k = prefix.to_vec();
            k.extend(idx);
            (k, c.clone())
        })
        .collect()
}

fn to_elem(t: &Terms) -> Elem {
    Elem::from_terms(t.iter().map(|(k, c)| (k[0], c.clone())))
}

fn to_tensor(legs: usize, t: &Terms) -> TensorElem {
    let mut out = TensorElem::zero(legs);
    for (k, c) in t {
        out.add_indexed(k, c);
    }
    out
}

/// Rows of a table split by their leading index.
fn rows(t: &Terms, dim: usize) -> Vec<Terms> {
    let mut out = vec![Terms::new(); dim];
    for (k, c) in t {
        out[k[0]].insert(k[1..].to_vec(), c.clone());
    }
    out
}

impl AlgebraDefFile {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn from_spec(spec: &QuasiHopfSpec, ribbon: Option<&Elem>) -> Self {
        let alg = &spec.algebra;
        let dim = alg.dim();
        let mut mult = Terms::new();
        for a in 0..dim {
            for b in 0..dim {
                mult.extend(elem_terms(&alg.basis_product(a, b), &[a, b]));
            }
        }
        let mut coproduct = Terms::new();
        for (a, t) in spec.coproduct.iter().enumerate() {
            coproduct.extend(tensor_terms(t, &[a]));
        }
        let mut antipode = Terms::new();
        for (a, e) in spec.antipode.iter().enumerate() {
            antipode.extend(elem_terms(e, &[a]));
        }
        let counit = spec
            .counit
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| (vec![a], c.clone()))
            .collect();
        let el = |e: &Elem| elem_terms(e, &[]).collect::<Terms>();
        AlgebraDefFile {
            name: alg.name().to_string(),
            sup: spec.sup,
            labels: alg.labels().to_vec(),
            parity: alg.parities().to_vec(),
            unit: el(alg.unit()),
            mult,
            coproduct,
            counit,
            antipode,
            phi: Some(tensor_terms(&spec.phi, &[])),
            r: spec.r.as_ref().map(|r| tensor_terms(r, &[])),
            alpha: Some(el(&spec.alpha)),
            beta: Some(el(&spec.beta_el)),
            ribbon: ribbon.map(el),
        }
    }

    /// The algebra without the associativity sweep, so a broken table still loads
    /// and shows up as a failing [`associativity_check`].
    pub fn algebra(&self) -> Result<SuperAlgebra, DefError> {
        let dim = self.dim();
        let mut mult = vec![vec![Elem::zero(); dim]; dim];
        for (k, c) in &self.mult {
            mult[k[0]][k[1]].add_term(k[2], c);
        }
        SuperAlgebra::new_unchecked(&self.name, self.labels.clone(), self.parity.clone(), mult, to_elem(&self.unit))
            .map_err(|e| DefError::Build(e.to_string()))
    }

    /// Missing Φ, α, β default to 1⊗1⊗1, 1, 1.
    pub fn to_spec(&self) -> Result<QuasiHopfSpec, DefError> {
        let algebra = self.algebra()?;
        let dim = self.dim();
        let coproduct = rows(&self.coproduct, dim).iter().map(|r| to_tensor(2, r)).collect();
        let antipode = rows(&self.antipode, dim).iter().map(to_elem).collect();
        let mut counit = vec![CycNum::zero(); dim];
        for (k, c) in &self.counit {
            counit[k[0]] = c.clone();
        }
        let unit = algebra.unit().clone();
        Ok(QuasiHopfSpec {
            phi: self.phi.as_ref().map(|t| to_tensor(3, t)).unwrap_or_else(|| algebra.tensor_unit(3)),
            r: self.r.as_ref().map(|t| to_tensor(2, t)),
            alpha: self.alpha.as_ref().map(to_elem).unwrap_or_else(|| unit.clone()),
            beta_el: self.beta.as_ref().map(to_elem).unwrap_or(unit),
            algebra,
            sup: self.sup,
            coproduct,
            counit,
            antipode,
        })
    }

    pub fn ribbon_elem(&self) -> Option<Elem> {
        self.ribbon.as_ref().map(to_elem)
    }

    fn table(&self, key: &str) -> Option<&Terms> {
        match key {
            "unit" => Some(&self.unit),
            "mult" => Some(&self.mult),
            "coproduct" => Some(&self.coproduct),
            "counit" => Some(&self.counit),
            "antipode" => Some(&self.antipode),
            "phi" => self.phi.as_ref(),
            "r" => self.r.as_ref(),
            "alpha" => self.alpha.as_ref(),
            "beta" => self.beta.as_ref(),
            "ribbon" => self.ribbon.as_ref(),
            _ => None,
        }
    }

    fn table_mut(&mut self, key: &str) -> &mut Terms {
        match key {
            "unit" => &mut self.unit,
            "mult" => &mut self.mult,
            "coproduct" => &mut self.coproduct,
            "counit" => &mut self.counit,
            "antipode" => &mut self.antipode,
            "phi" => self.phi.get_or_insert_with(Terms::new),
            "r" => self.r.get_or_insert_with(Terms::new),
            "alpha" => self.alpha.get_or_insert_with(Terms::new),
            "beta" => self.beta.get_or_insert_with(Terms::new),
            _ => self.ribbon.get_or_insert_with(Terms::new),
        }
    }
}

fn parse_bool(s: &str, line: usize) -> Result<bool, DefError> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(DefError::Syntax { line, msg: format!("expected true or false, found `{s}`") }),
    }
}

impl FromStr for AlgebraDefFile {
    type Err = DefError;

    fn from_str(src: &str) -> Result<Self, DefError> {
        let mut def = AlgebraDefFile::default();
        let mut field = None;
        let mut named = false;
        let mut index: HashMap<String, usize> = HashMap::new();
        for (n, raw) in src.lines().enumerate() {
            let line = n + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let syntax = |msg: String| DefError::Syntax { line, msg };
            let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
            let rest = rest.trim();
            match head {
                "field" => field = Some(rest.to_string()),
                "name" => {
                    def.name = rest.to_string();
                    named = true;
                }
                "super" => def.sup = parse_bool(rest, line)?,
                "basis" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [label, parity] = parts[..] else {
                        return Err(syntax("expected `basis <label> <parity>`".into()));
                    };
                    let p = match parity {
                        "0" => 0,
                        "1" => 1,
                        _ => return Err(syntax(format!("parity must be 0 or 1, found `{parity}`"))),
                    };
                    if label.contains(':') || label == "->" || index.contains_key(label) {
                        return Err(syntax(format!("bad or repeated label `{label}`")));
                    }
                    index.insert(label.to_string(), def.labels.len());
                    def.labels.push(label.to_string());
                    def.parity.push(p);
                }
                _ => {
                    let Some(&(key, before, after)) = SECTIONS.iter().find(|s| s.0 == head) else {
                        return Err(syntax(format!("unknown keyword `{head}`")));
                    };
                    let (lhs, coeff) =
                        rest.split_once(':').ok_or_else(|| syntax("expected `: <coeff>`".into()))?;
                    let coeff = coeff.trim();
                    let c: CycNum = coeff
                        .parse()
                        .map_err(|_| DefError::Coefficient { line, text: coeff.to_string() })?;
                    let words: Vec<&str> = lhs.split_whitespace().collect();
                    let expected: Vec<&str> = if after > 0 {
                        if words.len() != before + after + 1 || words[before] != "->" {
                            return Err(syntax(format!("`{key}` expects {before} label(s), `->`, {after} label(s)")));
                        }
                        words.iter().enumerate().filter(|(i, _)| *i != before).map(|(_, w)| *w).collect()
                    } else {
                        if words.len() != before {
                            return Err(syntax(format!("`{key}` expects {before} label(s)")));
                        }
                        words
                    };
                    let mut k = Vec::with_capacity(expected.len());
                    for w in expected {
                        let i = *index
                            .get(w)
                            .ok_or_else(|| DefError::UnknownLabel { line, label: w.to_string() })?;
                        k.push(i);
                    }
                    let table = def.table_mut(key);
                    if table.contains_key(&k) {
                        return Err(DefError::Duplicate { line });
                    }
                    if !c.is_zero() {
                        table.insert(k, c);
                    }
                }
            }
        }
        match field {
            None => return Err(DefError::Missing("field")),
            Some(f) if f != FIELD => return Err(DefError::Field(f)),
            _ => {}
        }
        if !named {
            return Err(DefError::Missing("name"));
        }
        if def.labels.is_empty() {
            return Err(DefError::Missing("basis"));
        }
        if def.unit.is_empty() {
            return Err(DefError::Missing("unit"));
        }
        Ok(def)
    }
}

impl fmt::Display for AlgebraDefFile {
    /// Canonical form: sections in fixed order, entries sorted by index tuple.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {FIELD}")?;
        writeln!(f, "name {}", self.name)?;
        writeln!(f, "super {}", self.sup)?;
        for (l, p) in self.labels.iter().zip(&self.parity) {
            writeln!(f, "basis {l} {p}")?;
        }
        for (n, &(key, before, after)) in SECTIONS.iter().enumerate() {
            let Some(t) = self.table(key) else { continue };
            if t.is_empty() && n >= FIRST_OPTIONAL {
                // a present but zero block is written as one zero term
                let first = vec![self.labels[0].as_str(); before];
                writeln!(f, "{key} {} : 0", first.join(" "))?;
                continue;
            }
            for (k, c) in t {
                let labels: Vec<&str> = k.iter().map(|&i| self.labels[i].as_str()).collect();
                if after > 0 {
                    writeln!(f, "{key} {} -> {} : {c}", labels[..before].join(" "), labels[before..].join(" "))?;
                } else {
                    writeln!(f, "{key} {} : {c}", labels.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

/// (eᵢeⱼ)eₖ = eᵢ(eⱼeₖ) on all basis triples and 1·eᵢ = eᵢ = eᵢ·1.
pub fn associativity_check(alg: &SuperAlgebra) -> Check {
    let dim = alg.dim();
    let bad = (0..dim).into_par_iter().find_map_first(|i| {
        for j in 0..dim {
            let ij = alg.basis_product(i, j);
            for k in 0..dim {
                let d = alg.mul(&ij, &Elem::basis(k)).sub(&alg.mul(&Elem::basis(i), &alg.basis_product(j, k)));
                let first = d.iter().next().map(|(l, c)| (l, c.clone()));
                if let Some((l, residual)) = first {
                    return Some(Mismatch { indices: vec![i, j, k, l], residual });
                }
            }
        }
        None
    });
    Check { name: "associativity".into(), pass: bad.is_none(), first_failure: bad }
}

pub fn unit_check(alg: &SuperAlgebra) -> Check {
    let parts = (0..alg.dim())
        .flat_map(|i| {
            let b = Elem::basis(i);
            [
                Check::compare_elems("", &alg.mul(alg.unit(), &b), &b),
                Check::compare_elems("", &alg.mul(&b, alg.unit()), &b),
            ]
        })
        .collect();
    Check::all("unit", parts)
}
