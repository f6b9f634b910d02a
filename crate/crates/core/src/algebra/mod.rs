//! Finite pointed algebras given by full operation tables.
//!
//! Every algebra has a distinguished constant (`zero`) and a distinguished
//! binary operation (the Jónsson–Tarski operation, written `+` in terms) for
//! which the constant is a two-sided unit. Extra operations of any arity may
//! be attached; which laws are enforced is selected by the
//! [`EquationalClass`] of the signature.
//!
//! Elements are dense indices `0..n`; labels are only for presentation.

mod enumerate;
mod limits;
mod maps;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{canonical_table, enumerate_algebras, Catalog, homomorphisms, homomorphisms_with};
pub use limits::{
    equalizer, kernel, product, product_map, pullback, subalgebra_generated, Product, Pullback,
};
pub(crate) use maps::same_algebra;
pub use maps::{validate_homomorphism, ElementMap, Homomorphism, SetMap, Subalgebra};

/// Which laws `validate_algebra` enforces on top of the unit laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationalClass {
    UnitaryMagma,
    Monoid,
    CommutativeMonoid,
    Group,
    HeytingSemilattice,
    Custom,
}

impl EquationalClass {
    pub const ALL: [EquationalClass; 6] = [
        EquationalClass::UnitaryMagma,
        EquationalClass::Monoid,
        EquationalClass::CommutativeMonoid,
        EquationalClass::Group,
        EquationalClass::HeytingSemilattice,
        EquationalClass::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquationalClass::UnitaryMagma => "unitary-magma",
            EquationalClass::Monoid => "monoid",
            EquationalClass::CommutativeMonoid => "commutative-monoid",
            EquationalClass::Group => "group",
            EquationalClass::HeytingSemilattice => "heyting-semilattice",
            EquationalClass::Custom => "custom",
        }
    }

    /// True when every algebra of class `self` also satisfies the laws of `other`.
    pub fn is_within(self, other: EquationalClass) -> bool {
        use EquationalClass::*;
        if self == other {
            return true;
        }
        match other {
            // unit laws only
            UnitaryMagma | Custom => true,
            Monoid => matches!(self, CommutativeMonoid | Group | HeytingSemilattice),
            CommutativeMonoid => self == HeytingSemilattice,
            Group | HeytingSemilattice => false,
        }
    }

    /// The strongest class whose laws both `self` and `other` satisfy.
    pub fn meet(self, other: EquationalClass) -> EquationalClass {
        use EquationalClass::*;
        if self == Custom || other == Custom {
            return Custom;
        }
        [HeytingSemilattice, Group, CommutativeMonoid, Monoid, UnitaryMagma]
            .into_iter()
            .find(|c| self.is_within(*c) && other.is_within(*c))
            .unwrap_or(UnitaryMagma)
    }
}

impl fmt::Display for EquationalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquationalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EquationalClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "equational class",
                name: s.to_string(),
            })
    }
}

/// Operation symbols of a pointed Jónsson–Tarski-style signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub name: String,
    pub constant: String,
    pub jt_operation: String,
    pub extra_operations: Vec<(String, usize)>,
    pub class: EquationalClass,
}

/// Symbol of the group inverse.
pub const INVERSE: &str = "inv";
/// Symbol of the Heyting implication.
pub const IMPLICATION: &str = "->";

impl Signature {
    pub fn new(
        name: impl Into<String>,
        constant: impl Into<String>,
        jt_operation: impl Into<String>,
        extra_operations: Vec<(String, usize)>,
        class: EquationalClass,
    ) -> Result<Self> {
        let sig = Signature {
            name: name.into(),
            constant: constant.into(),
            jt_operation: jt_operation.into(),
            extra_operations,
            class,
        };
        if sig.constant == sig.jt_operation {
            return Err(Error::InvalidSignature(
                "constant and jt_operation share a symbol".into(),
            ));
        }
        for (i, (sym, _)) in sig.extra_operations.iter().enumerate() {
            if sym == &sig.constant || sym == &sig.jt_operation || sym == "+" {
                return Err(Error::InvalidSignature(format!(
                    "extra operation `{sym}` clashes with a distinguished symbol"
                )));
            }
            if sig.extra_operations[..i].iter().any(|(s, _)| s == sym) {
                return Err(Error::InvalidSignature(format!("duplicate operation `{sym}`")));
            }
        }
        let required: &[(&str, usize)] = match class {
            EquationalClass::Group => &[(INVERSE, 1)],
            EquationalClass::HeytingSemilattice => &[(IMPLICATION, 2)],
            _ => &[],
        };
        for (sym, arity) in required {
            if !sig.extra_operations.iter().any(|(s, a)| s == sym && a == arity) {
                return Err(Error::InvalidSignature(format!(
                    "class {class} requires operation `{sym}` of arity {arity}"
                )));
            }
        }
        Ok(sig)
    }

    /// The default signature for a class: `(0, +)` for the monoid family,
    /// `(0, +, inv)` for groups, `(top, meet, ->)` for Heyting semilattices.
    pub fn standard(class: EquationalClass) -> Signature {
        let (constant, jt, extras): (&str, &str, Vec<(String, usize)>) = match class {
            EquationalClass::Group => ("0", "+", vec![(INVERSE.into(), 1)]),
            EquationalClass::HeytingSemilattice => ("top", "meet", vec![(IMPLICATION.into(), 2)]),
            _ => ("0", "+", vec![]),
        };
        Signature {
            name: class.name().to_string(),
            constant: constant.into(),
            jt_operation: jt.into(),
            extra_operations: extras,
            class,
        }
    }

    /// Same operation symbols and arities (the class and name may differ).
    pub fn same_operations(&self, other: &Signature) -> bool {
        self.extra_operations == other.extra_operations
    }
}

/// A total operation table of fixed arity, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operation {
    pub symbol: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    pub fn apply(&self, n: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        let idx = args.iter().fold(0, |acc, &a| acc * n + a);
        self.table[idx]
    }
}

/// Calls `visit` on every tuple in `0..n` of length `arity`, in lexicographic order.
pub(crate) fn for_each_tuple(n: usize, arity: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    let mut tuple = vec![0usize; arity];
    if arity > 0 && n == 0 {
        return;
    }
    loop {
        if !visit(&tuple) {
            return;
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// A finite algebra over a pointed signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    elements: Vec<String>,
    zero: usize,
    jt: Vec<usize>,
    extras: Vec<Operation>,
}

impl FiniteAlgebra {
    /// Builds an algebra after structural checks (dimensions, index ranges,
    /// distinct labels). Laws are not checked here; see [`validate_algebra`].
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        elements: Vec<String>,
        zero: usize,
        jt: Vec<usize>,
        extras: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::Structural {
                symbol: signature.constant.clone(),
                detail: "empty carrier".into(),
            });
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::Structural {
                    symbol: "elements".into(),
                    detail: format!("duplicate label `{e}`"),
                });
            }
        }
        if zero >= n {
            return Err(Error::IndexOutOfRange { index: zero, size: n });
        }
        check_table(&signature.jt_operation, 2, n, &jt)?;
        if extras.len() != signature.extra_operations.len() {
            return Err(Error::Structural {
                symbol: "tables".into(),
                detail: format!(
                    "expected {} extra tables, got {}",
                    signature.extra_operations.len(),
                    extras.len()
                ),
            });
        }
        let extras = signature
            .extra_operations
            .iter()
            .zip(extras)
            .map(|((symbol, arity), table)| {
                check_table(symbol, *arity, n, &table)?;
                Ok(Operation {
                    symbol: symbol.clone(),
                    arity: *arity,
                    table,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteAlgebra {
            name: name.into(),
            signature,
            elements,
            zero,
            jt,
            extras,
        })
    }

    /// Builds and validates against the signature's class.
    pub fn validated(
        name: impl Into<String>,
        signature: Signature,
        elements: Vec<String>,
        zero: usize,
        jt: Vec<usize>,
        extras: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let alg = FiniteAlgebra::new(name, signature, elements, zero, jt, extras)?;
        let report = validate_algebra(&alg);
        if report.is_ok() {
            Ok(alg)
        } else {
            Err(Error::LawViolation(report))
        }
    }

    /// Convenience constructor for a `(0, +)` algebra with numeric labels.
    pub fn from_rows(
        name: impl Into<String>,
        class: EquationalClass,
        rows: &[&[usize]],
    ) -> Result<Self> {
        if class == EquationalClass::HeytingSemilattice {
            return Err(Error::InvalidSignature(
                "heyting semilattices need an implication table".into(),
            ));
        }
        let n = rows.len();
        let base = FiniteAlgebra::new(
            name,
            Signature::standard(EquationalClass::UnitaryMagma),
            (0..n).map(|i| i.to_string()).collect(),
            0,
            rows.iter().flat_map(|r| r.iter().copied()).collect(),
            vec![],
        )?;
        base.with_class(class)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size() {
            return Err(Error::Structural {
                symbol: "elements".into(),
                detail: "label count differs from carrier size".into(),
            });
        }
        self.elements = labels;
        Ok(self)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn class(&self) -> EquationalClass {
        self.signature.class
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn label(&self, x: usize) -> &str {
        &self.elements[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// The Jónsson–Tarski operation.
    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.jt[x * self.size() + y]
    }

    pub fn jt_table(&self) -> &[usize] {
        &self.jt
    }

    pub fn extras(&self) -> &[Operation] {
        &self.extras
    }

    pub fn extra(&self, symbol: &str) -> Option<&Operation> {
        self.extras.iter().find(|op| op.symbol == symbol)
    }

    /// Applies the operation named `symbol`; `+` always denotes the
    /// Jónsson–Tarski operation.
    pub fn apply(&self, symbol: &str, args: &[usize]) -> Result<usize> {
        if symbol == "+" || symbol == self.signature.jt_operation {
            if args.len() != 2 {
                return Err(Error::Term(format!("`{symbol}` expects 2 arguments")));
            }
            return Ok(self.add(args[0], args[1]));
        }
        let op = self.extra(symbol).ok_or_else(|| {
            Error::Term(format!(
                "operation `{symbol}` is not in the signature of `{}`",
                self.name
            ))
        })?;
        if op.arity != args.len() {
            return Err(Error::Term(format!(
                "`{symbol}` expects {} arguments, got {}",
                op.arity,
                args.len()
            )));
        }
        Ok(op.apply(self.size(), args))
    }

    /// All operations (jt first) as `(symbol, arity, table)` triples.
    pub fn operations(&self) -> impl Iterator<Item = (&str, usize, &[usize])> {
        std::iter::once((self.signature.jt_operation.as_str(), 2, self.jt.as_slice())).chain(
            self.extras
                .iter()
                .map(|op| (op.symbol.as_str(), op.arity, op.table.as_slice())),
        )
    }

    /// Re-tags the algebra with another class, adjusting the extra
    /// operations: the group inverse is computed from `+` when moving into
    /// `group` and dropped when leaving it. The result is validated.
    pub fn with_class(&self, class: EquationalClass) -> Result<FiniteAlgebra> {
        let n = self.size();
        let mut sig = self.signature.clone();
        let mut extras: Vec<Vec<usize>> = self.extras.iter().map(|o| o.table.clone()).collect();
        if class == EquationalClass::Group && self.extra(INVERSE).is_none() {
            let inv = (0..n)
                .map(|x| {
                    (0..n)
                        .find(|&y| self.add(x, y) == self.zero && self.add(y, x) == self.zero)
                        .ok_or_else(|| {
                            Error::ClassMismatch(format!(
                                "`{}` has no inverse for `{}`",
                                self.name,
                                self.label(x)
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            sig.extra_operations.push((INVERSE.into(), 1));
            extras.push(inv);
        }
        if class != EquationalClass::Group && self.class() == EquationalClass::Group {
            if let Some(pos) = sig.extra_operations.iter().position(|(s, _)| s == INVERSE) {
                sig.extra_operations.remove(pos);
                extras.remove(pos);
            }
        }
        sig.class = class;
        if sig.name == self.class().name() {
            sig.name = class.name().to_string();
        }
        FiniteAlgebra::validated(
            self.name.clone(),
            sig,
            self.elements.clone(),
            self.zero,
            self.jt.clone(),
            extras,
        )
    }

    /// The one-element algebra in the same signature.
    pub fn trivial_like(&self) -> FiniteAlgebra {
        FiniteAlgebra {
            name: "1".into(),
            signature: self.signature.clone(),
            elements: vec![self.elements[self.zero].clone()],
            zero: 0,
            jt: vec![0],
            extras: self
                .extras
                .iter()
                .map(|op| Operation {
                    symbol: op.symbol.clone(),
                    arity: op.arity,
                    table: vec![0],
                })
                .collect(),
        }
    }

    /// Equal tables, constant and operations; names and labels ignored.
    pub fn same_structure(&self, other: &FiniteAlgebra) -> bool {
        self.zero == other.zero
            && self.jt == other.jt
            && self.extras == other.extras
            && self.signature.same_operations(&other.signature)
    }

    pub fn is_associative(&self) -> bool {
        first_associativity_failure(self).is_none()
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} [{}] zero={}",
            self.name,
            self.class(),
            self.label(self.zero)
        )?;
        let n = self.size();
        write!(f, "{:>6} |", self.signature.jt_operation)?;
        for e in &self.elements {
            write!(f, " {e:>6}")?;
        }
        writeln!(f)?;
        for x in 0..n {
            write!(f, "{:>6} |", self.label(x))?;
            for y in 0..n {
                write!(f, " {:>6}", self.label(self.add(x, y)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check_table(symbol: &str, arity: usize, n: usize, table: &[usize]) -> Result<()> {
    let expected = n.pow(arity as u32);
    if table.len() != expected {
        return Err(Error::Structural {
            symbol: symbol.to_string(),
            detail: format!("expected {expected} entries, got {}", table.len()),
        });
    }
    if let Some(&bad) = table.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { index: bad, size: n });
    }
    Ok(())
}

/// A violated law with the witnessing tuple of element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: String,
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_law(&self, law: &str) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    fn push(&mut self, law: &str, witness: Vec<usize>, detail: String) {
        self.violations.push(Violation {
            law: law.to_string(),
            witness,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{} ({})", v.law, v.detail))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

fn first_associativity_failure(a: &FiniteAlgebra) -> Option<[usize; 3]> {
    let n = a.size();
    for x in 0..n {
        for y in 0..n {
            let xy = a.add(x, y);
            for z in 0..n {
                if a.add(xy, z) != a.add(x, a.add(y, z)) {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

/// Checks every law of the algebra's declared class by exhaustive scan.
/// Each violated law is reported once, with its lexicographically first witness.
pub fn validate_algebra(a: &FiniteAlgebra) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = a.size();
    let z = a.zero();
    let l = |x: usize| a.label(x).to_string();

    if let Some(x) = (0..n).find(|&x| a.add(x, z) != x) {
        report.push("right unit", vec![x], format!("{} + 0 ≠ {}", l(x), l(x)));
    }
    if let Some(x) = (0..n).find(|&x| a.add(z, x) != x) {
        report.push("left unit", vec![x], format!("0 + {} ≠ {}", l(x), l(x)));
    }

    let class = a.class();
    if class.is_within(EquationalClass::Monoid) {
        if let Some([x, y, w]) = first_associativity_failure(a) {
            report.push(
                "associativity",
                vec![x, y, w],
                format!(
                    "({}+{})+{} = {} but {}+({}+{}) = {}",
                    l(x),
                    l(y),
                    l(w),
                    l(a.add(a.add(x, y), w)),
                    l(x),
                    l(y),
                    l(w),
                    l(a.add(x, a.add(y, w)))
                ),
            );
        }
    }
    if class.is_within(EquationalClass::CommutativeMonoid) {
        if let Some((x, y)) = pairs(n).find(|&(x, y)| a.add(x, y) != a.add(y, x)) {
            report.push(
                "commutativity",
                vec![x, y],
                format!("{}+{} ≠ {}+{}", l(x), l(y), l(y), l(x)),
            );
        }
    }
    if class == EquationalClass::Group {
        match a.extra(INVERSE) {
            Some(inv) => {
                if let Some(x) = (0..n).find(|&x| {
                    let i = inv.table[x];
                    a.add(x, i) != z || a.add(i, x) != z
                }) {
                    report.push(
                        "inverse",
                        vec![x],
                        format!("inv({}) is not a two-sided inverse", l(x)),
                    );
                }
            }
            None => report.push("inverse", vec![], "missing `inv` table".into()),
        }
    }
    if class == EquationalClass::HeytingSemilattice {
        if let Some(x) = (0..n).find(|&x| a.add(x, x) != x) {
            report.push("idempotence", vec![x], format!("{0}∧{0} ≠ {0}", l(x)));
        }
        match a.extra(IMPLICATION) {
            Some(imp) => heyting_axioms(a, imp, &mut report),
            None => report.push("implication", vec![], "missing `->` table".into()),
        }
    }
    report
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

fn heyting_axioms(a: &FiniteAlgebra, imp: &Operation, report: &mut ValidationReport) {
    let n = a.size();
    let top = a.zero();
    let i = |x: usize, y: usize| imp.apply(n, &[x, y]);
    let l = |x: usize| a.label(x).to_string();
    if let Some(x) = (0..n).find(|&x| i(x, x) != top) {
        report.push("x->x = top", vec![x], format!("{0}->{0} ≠ top", l(x)));
    }
    if let Some((x, y)) = pairs(n).find(|&(x, y)| a.add(x, i(x, y)) != a.add(x, y)) {
        report.push(
            "x∧(x->y) = x∧y",
            vec![x, y],
            format!("fails at x={}, y={}", l(x), l(y)),
        );
    }
    if let Some((x, y)) = pairs(n).find(|&(x, y)| a.add(y, i(x, y)) != y) {
        report.push(
            "y∧(x->y) = y",
            vec![x, y],
            format!("fails at x={}, y={}", l(x), l(y)),
        );
    }
    let mut witness = None;
    for_each_tuple(n, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        if i(x, a.add(y, z)) != a.add(i(x, y), i(x, z)) {
            witness = Some(vec![x, y, z]);
            return false;
        }
        true
    });
    if let Some(w) = witness {
        let detail = format!("fails at x={}, y={}, z={}", l(w[0]), l(w[1]), l(w[2]));
        report.push("x->(y∧z) = (x->y)∧(x->z)", w, detail);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn magma_x(class: EquationalClass) -> FiniteAlgebra {
        let sig = Signature::standard(class);
        FiniteAlgebra::new(
            "X",
            sig,
            vec!["0".into(), "a".into(), "b".into()],
            0,
            vec![0, 1, 2, 1, 0, 0, 2, 0, 0],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn c2_is_a_monoid() {
        let c2 = FiniteAlgebra::from_rows("C2", EquationalClass::Monoid, &[&[0, 1], &[1, 0]]);
        assert!(c2.is_ok());
    }

    #[test]
    fn magma_x_fails_associativity_with_witness() {
        let report = validate_algebra(&magma_x(EquationalClass::Monoid));
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].law, "associativity");
        assert_eq!(report.violations[0].witness, vec![1, 1, 2]);
    }

    #[test]
    fn magma_x_is_a_unitary_magma() {
        assert!(validate_algebra(&magma_x(EquationalClass::UnitaryMagma)).is_ok());
    }

    #[test]
    fn structural_errors_are_distinct_from_law_violations() {
        let err = FiniteAlgebra::new(
            "bad",
            Signature::standard(EquationalClass::Monoid),
            vec!["0".into(), "1".into()],
            0,
            vec![0, 1, 1],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structural { .. }));
        let err = FiniteAlgebra::new(
            "bad",
            Signature::standard(EquationalClass::Monoid),
            vec!["0".into(), "1".into()],
            0,
            vec![0, 1, 1, 7],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 7, size: 2 }));
    }

    #[test]
    fn class_lattice() {
        use EquationalClass::*;
        assert!(Group.is_within(Monoid));
        assert!(HeytingSemilattice.is_within(CommutativeMonoid));
        assert!(!Monoid.is_within(Group));
        assert_eq!(Group.meet(CommutativeMonoid), Monoid);
        assert_eq!(Monoid.meet(UnitaryMagma), UnitaryMagma);
        assert_eq!(Group.meet(Group), Group);
    }

    #[test]
    fn signature_rejects_duplicates_and_missing_required_ops() {
        assert!(Signature::new("s", "0", "+", vec![("f".into(), 1), ("f".into(), 2)], EquationalClass::Custom).is_err());
        assert!(Signature::new("s", "0", "+", vec![], EquationalClass::Group).is_err());
        assert!(Signature::new("s", "0", "0", vec![], EquationalClass::Custom).is_err());
    }

    #[test]
    fn group_class_computes_inverses() {
        let c4 = FiniteAlgebra::from_rows(
            "C4",
            EquationalClass::Group,
            &[&[0, 1, 2, 3], &[1, 2, 3, 0], &[2, 3, 0, 1], &[3, 0, 1, 2]],
        )
        .unwrap();
        assert_eq!(c4.extra(INVERSE).unwrap().table, vec![0, 3, 2, 1]);
        let back = c4.with_class(EquationalClass::Monoid).unwrap();
        assert!(back.extras().is_empty());
    }
}
