use std::sync::Arc;

use super::{for_each_tuple, FiniteAlgebra, ValidationReport, Violation};
use crate::error::{Error, Result};

/// Anything with a total element table between two algebras.
pub trait ElementMap {
    fn dom(&self) -> &Arc<FiniteAlgebra>;
    fn cod(&self) -> &Arc<FiniteAlgebra>;
    fn table(&self) -> &[usize];

    #[inline]
    fn apply(&self, x: usize) -> usize {
        self.table()[x]
    }
}

pub(crate) fn same_algebra(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_total(dom: &FiniteAlgebra, cod: &FiniteAlgebra, map: &[usize]) -> Result<()> {
    if map.len() != dom.size() {
        return Err(Error::Structural {
            symbol: "map".into(),
            detail: format!("expected {} entries, got {}", dom.size(), map.len()),
        });
    }
    if let Some(&bad) = map.iter().find(|&&v| v >= cod.size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: cod.size(),
        });
    }
    Ok(())
}

/// Checks that `map` preserves the constant and every operation.
pub fn validate_homomorphism(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    map: &[usize],
) -> Result<ValidationReport> {
    check_total(dom, cod, map)?;
    if !dom.signature().same_operations(cod.signature()) {
        return Err(Error::SignatureMismatch(format!(
            "`{}` and `{}` have different operations",
            dom.name(),
            cod.name()
        )));
    }
    let mut report = ValidationReport::default();
    if map[dom.zero()] != cod.zero() {
        report.violations.push(Violation {
            law: "constant not preserved".into(),
            witness: vec![dom.zero()],
            detail: format!(
                "{} ↦ {} ≠ {}",
                dom.label(dom.zero()),
                cod.label(map[dom.zero()]),
                cod.label(cod.zero())
            ),
        });
    }
    let n = dom.size();
    let m = cod.size();
    for ((symbol, arity, table), (_, _, cod_table)) in dom.operations().zip(cod.operations()) {
        let mut witness = None;
        let mut image = vec![0usize; arity];
        for_each_tuple(n, arity, |args| {
            for (slot, &a) in image.iter_mut().zip(args) {
                *slot = map[a];
            }
            let lhs = map[table[index(n, args)]];
            let rhs = cod_table[index(m, &image)];
            if lhs != rhs {
                witness = Some(args.to_vec());
                return false;
            }
            true
        });
        if let Some(w) = witness {
            let labels: Vec<&str> = w.iter().map(|&x| dom.label(x)).collect();
            report.violations.push(Violation {
                law: format!("operation `{symbol}` not preserved"),
                witness: w,
                detail: format!("at ({})", labels.join(", ")),
            });
        }
    }
    Ok(report)
}

#[inline]
fn index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// A structure-preserving map between algebras of the same signature.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    dom: Arc<FiniteAlgebra>,
    cod: Arc<FiniteAlgebra>,
    map: Vec<usize>,
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
            && same_algebra(&self.dom, &other.dom)
            && same_algebra(&self.cod, &other.cod)
    }
}

impl Eq for Homomorphism {}

impl Homomorphism {
    pub fn new(dom: Arc<FiniteAlgebra>, cod: Arc<FiniteAlgebra>, map: Vec<usize>) -> Result<Self> {
        let report = validate_homomorphism(&dom, &cod, &map)?;
        if !report.is_ok() {
            return Err(Error::NotAHomomorphism(report));
        }
        Ok(Homomorphism { dom, cod, map })
    }

    /// For maps produced by constructions that preserve structure by design.
    pub(crate) fn trusted(dom: Arc<FiniteAlgebra>, cod: Arc<FiniteAlgebra>, map: Vec<usize>) -> Self {
        debug_assert!(validate_homomorphism(&dom, &cod, &map)
            .map(|r| r.is_ok())
            .unwrap_or(false));
        Homomorphism { dom, cod, map }
    }

    pub fn identity(a: Arc<FiniteAlgebra>) -> Self {
        let map = (0..a.size()).collect();
        Homomorphism {
            dom: a.clone(),
            cod: a,
            map,
        }
    }

    /// The constant map onto the distinguished constant.
    pub fn zero(dom: Arc<FiniteAlgebra>, cod: Arc<FiniteAlgebra>) -> Result<Self> {
        let map = vec![cod.zero(); dom.size()];
        Homomorphism::new(dom, cod, map)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Homomorphism) -> Result<Homomorphism> {
        if !same_algebra(&inner.cod, &self.dom) {
            return Err(Error::Mismatch(format!(
                "cannot compose `{}`→`{}` after `{}`→`{}`",
                self.dom.name(),
                self.cod.name(),
                inner.dom.name(),
                inner.cod.name()
            )));
        }
        Ok(Homomorphism {
            dom: inner.dom.clone(),
            cod: self.cod.clone(),
            map: inner.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        same_algebra(&self.dom, &self.cod) && self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        self.map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        for &v in &self.map {
            seen[v] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn image(&self) -> Vec<usize> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img.dedup();
        img
    }

    pub fn as_set_map(&self) -> SetMap {
        SetMap {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            map: self.map.clone(),
        }
    }
}

impl ElementMap for Homomorphism {
    fn dom(&self) -> &Arc<FiniteAlgebra> {
        &self.dom
    }
    fn cod(&self) -> &Arc<FiniteAlgebra> {
        &self.cod
    }
    fn table(&self) -> &[usize] {
        &self.map
    }
}

/// A bare function between carriers; no preservation required.
///
/// Also the carrier of imaginary morphisms `X ⇸ Y`: a morphism out of the
/// free algebra on `X` is determined by its values on one-letter words.
#[derive(Clone, Debug)]
pub struct SetMap {
    dom: Arc<FiniteAlgebra>,
    cod: Arc<FiniteAlgebra>,
    map: Vec<usize>,
}

impl PartialEq for SetMap {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
            && same_algebra(&self.dom, &other.dom)
            && same_algebra(&self.cod, &other.cod)
    }
}

impl Eq for SetMap {}

impl SetMap {
    pub fn new(dom: Arc<FiniteAlgebra>, cod: Arc<FiniteAlgebra>, map: Vec<usize>) -> Result<Self> {
        check_total(&dom, &cod, &map)?;
        Ok(SetMap { dom, cod, map })
    }

    pub fn identity(a: Arc<FiniteAlgebra>) -> Self {
        Homomorphism::identity(a).as_set_map()
    }

    pub fn from_fn(
        dom: Arc<FiniteAlgebra>,
        cod: Arc<FiniteAlgebra>,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let map = (0..dom.size()).map(f).collect();
        SetMap::new(dom, cod, map)
    }

    /// `self ∘ inner` as plain function composition.
    pub fn after(&self, inner: &impl ElementMap) -> Result<SetMap> {
        if !same_algebra(inner.cod(), &self.dom) {
            return Err(Error::Mismatch(format!(
                "cannot compose `{}`→`{}` after `{}`→`{}`",
                self.dom.name(),
                self.cod.name(),
                inner.dom().name(),
                inner.cod().name()
            )));
        }
        Ok(SetMap {
            dom: inner.dom().clone(),
            cod: self.cod.clone(),
            map: inner.table().iter().map(|&x| self.map[x]).collect(),
        })
    }

    /// Promotes to a homomorphism if the table preserves structure.
    pub fn to_homomorphism(&self) -> Result<Homomorphism> {
        Homomorphism::new(self.dom.clone(), self.cod.clone(), self.map.clone())
    }

    pub fn set(&mut self, x: usize, y: usize) -> Result<()> {
        if x >= self.dom.size() || y >= self.cod.size() {
            return Err(Error::IndexOutOfRange {
                index: x.max(y),
                size: self.dom.size().min(self.cod.size()),
            });
        }
        self.map[x] = y;
        Ok(())
    }
}

impl From<&Homomorphism> for SetMap {
    fn from(h: &Homomorphism) -> Self {
        h.as_set_map()
    }
}

impl ElementMap for SetMap {
    fn dom(&self) -> &Arc<FiniteAlgebra> {
        &self.dom
    }
    fn cod(&self) -> &Arc<FiniteAlgebra> {
        &self.cod
    }
    fn table(&self) -> &[usize] {
        &self.map
    }
}

/// A subset of a parent algebra containing the constant and closed under
/// every operation, materialized as an algebra of its own.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    parent: Arc<FiniteAlgebra>,
    members: Vec<usize>,
    embedding: Homomorphism,
}

impl Subalgebra {
    /// `members` must be closed; they are sorted and deduplicated here.
    pub fn from_members(parent: Arc<FiniteAlgebra>, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&m| m >= parent.size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: parent.size(),
            });
        }
        let n = parent.size();
        let mut position = vec![usize::MAX; n];
        for (i, &m) in members.iter().enumerate() {
            position[m] = i;
        }
        if position[parent.zero()] == usize::MAX {
            return Err(Error::Precondition(format!(
                "subset of `{}` does not contain the constant",
                parent.name()
            )));
        }
        let k = members.len();
        let mut tables = Vec::new();
        for (symbol, arity, table) in parent.operations() {
            let mut sub = Vec::with_capacity(k.pow(arity as u32));
            let mut failure = None;
            let mut args = vec![0; arity];
            for_each_tuple(k, arity, |t| {
                for (slot, &i) in args.iter_mut().zip(t) {
                    *slot = members[i];
                }
                let r = table[index(n, &args)];
                if position[r] == usize::MAX {
                    failure = Some(r);
                    return false;
                }
                sub.push(position[r]);
                true
            });
            if let Some(r) = failure {
                return Err(Error::Precondition(format!(
                    "subset of `{}` is not closed under `{symbol}` (reaches `{}`)",
                    parent.name(),
                    parent.label(r)
                )));
            }
            tables.push(sub);
        }
        let jt = tables.remove(0);
        let algebra = FiniteAlgebra::new(
            format!("{}|{}", parent.name(), k),
            parent.signature().clone(),
            members.iter().map(|&m| parent.label(m).to_string()).collect(),
            position[parent.zero()],
            jt,
            tables,
        )?;
        let embedding = Homomorphism::trusted(Arc::new(algebra), parent.clone(), members.clone());
        Ok(Subalgebra {
            parent,
            members,
            embedding,
        })
    }

    pub fn parent(&self) -> &Arc<FiniteAlgebra> {
        &self.parent
    }

    /// Sorted member indices in the parent.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Position of a parent element inside the materialized subalgebra.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.members.binary_search(&x).ok()
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        self.embedding.dom()
    }

    pub fn embedding(&self) -> &Homomorphism {
        &self.embedding
    }

    pub fn is_everything(&self) -> bool {
        self.members.len() == self.parent.size()
    }

    pub fn labels(&self) -> Vec<String> {
        self.members
            .iter()
            .map(|&m| self.parent.label(m).to_string())
            .collect()
    }
}
