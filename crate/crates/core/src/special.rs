//! s-special objects, loop structures, bounded protomodularity, and the
//! builtin example catalog.
//!
//! An object `X` is s-special when its diagonal point
//! `(π₂, ⟨1,1⟩) : X × X ⇄ X` is Schreier. The retraction of that point
//! is then a right loop subtraction `x − y = q(x, y)`; with the twisted
//! template it gives a left division `−x + y`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{
    product, validate_algebra, Catalog, EquationalClass, FiniteAlgebra, Homomorphism,
    Signature, Subalgebra, ValidationReport, Violation,
};
use crate::error::{Error, Result};
use crate::points::{
    enumerate_points_over, identity_point, is_stably_strong, make_point, points_isomorphic,
    probes_into, Point, Probe, StableStrongness,
};
use crate::schreier::{
    classify_point, intrinsic_schreier_check, DecompositionFailure, Homogeneity, Retraction,
    Verdict,
};
use crate::terms::{template_library, verify_splitting_identity, DIRECT, TWISTED};

/// `(π₂, ⟨1,1⟩)` on `X × X`. The kernel is `X × {0}`, and its `i`-th
/// element is `(i, 0)`.
pub fn diagonal_point(x: &Arc<FiniteAlgebra>) -> Result<Point> {
    let p = product(x, x)?;
    let id = Homomorphism::identity(x.clone());
    let delta = p.pair(&id, &id)?;
    make_point(p.second, delta)
}

/// Intrinsic check of the diagonal point.
pub fn is_s_special(x: &Arc<FiniteAlgebra>, t: &crate::terms::SplittingTemplate) -> Result<Verdict> {
    intrinsic_schreier_check(&diagonal_point(x)?, t)
}

/// A right subtraction `x − y` or a left division `−x + y` on a base algebra.
type Law<'a> = (&'static str, Box<dyn Fn(usize, usize) -> bool + 'a>);

/// Both loop axioms are verified on construction.
#[derive(Clone, Debug)]
pub struct LoopStructure {
    base: Arc<FiniteAlgebra>,
    handedness: Homogeneity,
    table: Vec<usize>,
}

impl LoopStructure {
    pub fn new(base: Arc<FiniteAlgebra>, handedness: Homogeneity, table: Vec<usize>) -> Result<Self> {
        let n = base.size();
        if table.len() != n * n {
            return Err(Error::Structural {
                symbol: "loop".into(),
                detail: format!("expected {} entries, got {}", n * n, table.len()),
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= n) {
            return Err(Error::IndexOutOfRange { index: bad, size: n });
        }
        let l = LoopStructure {
            base,
            handedness,
            table,
        };
        let report = l.check_axioms();
        if report.is_ok() {
            Ok(l)
        } else {
            Err(Error::LawViolation(report))
        }
    }

    fn check_axioms(&self) -> ValidationReport {
        let a = &self.base;
        let n = a.size();
        let op = |x: usize, y: usize| self.table[x * n + y];
        let laws: [Law<'_>; 2] = match self.handedness {
            Homogeneity::Right => [
                ("(x−y)+y = x", Box::new(|x, y| a.add(op(x, y), y) == x)),
                ("(x+y)−y = x", Box::new(|x, y| op(a.add(x, y), y) == x)),
            ],
            Homogeneity::Left => [
                ("x+(−x+y) = y", Box::new(|x, y| a.add(x, op(x, y)) == y)),
                ("−x+(x+y) = y", Box::new(|x, y| op(x, a.add(x, y)) == y)),
            ],
        };
        let mut report = ValidationReport::default();
        for (law, holds) in laws {
            let witness = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).find(|&(x, y)| !holds(x, y));
            if let Some((x, y)) = witness {
                report.violations.push(Violation {
                    law: law.to_string(),
                    witness: vec![x, y],
                    detail: format!("fails at x={}, y={}", a.label(x), a.label(y)),
                });
            }
        }
        report
    }

    pub fn base(&self) -> &Arc<FiniteAlgebra> {
        &self.base
    }

    pub fn handedness(&self) -> Homogeneity {
        self.handedness
    }

    /// Row-major `x − y` (right) or `−x + y` (left).
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.base.size() + y]
    }

    /// The retraction of the diagonal point this loop determines:
    /// `q(x, y) = x − y`, or `q(x, y) = −y + x` for a left loop.
    pub fn to_retraction(&self) -> Result<Retraction> {
        let p = diagonal_point(&self.base)?;
        let n = self.base.size();
        let table = (0..n * n)
            .map(|idx| {
                let (x1, x2) = (idx / n, idx % n);
                let a = match self.handedness {
                    Homogeneity::Right => self.op(x1, x2),
                    Homogeneity::Left => self.op(x2, x1),
                };
                p.kernel().position(a * n + self.base.zero()).expect("(a, 0) lies in the kernel")
            })
            .collect();
        Retraction::candidate(p, table)
    }
}

impl fmt::Display for LoopStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.base;
        let head = match self.handedness {
            Homogeneity::Right => "x−y",
            Homogeneity::Left => "−x+y",
        };
        let width = a.elements().iter().map(|e| e.chars().count()).max().unwrap_or(1).max(head.chars().count());
        write!(f, "{head:>width$} |")?;
        for y in 0..a.size() {
            write!(f, " {:>width$}", a.label(y))?;
        }
        writeln!(f)?;
        for x in 0..a.size() {
            write!(f, "{:>width$} |", a.label(x))?;
            for y in 0..a.size() {
                write!(f, " {:>width$}", a.label(self.op(x, y)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum LoopExtraction {
    Loop(LoopStructure),
    NotSpecial(DecompositionFailure),
}

impl LoopExtraction {
    pub fn loop_structure(&self) -> Option<&LoopStructure> {
        match self {
            LoopExtraction::Loop(l) => Some(l),
            LoopExtraction::NotSpecial(_) => None,
        }
    }
}

/// Reads a loop off the diagonal retraction: direct template for a right
/// loop (`x − y = q(x, y)`), twisted for a left one (`−x + y = q(y, x)`).
pub fn extract_loop(x: &Arc<FiniteAlgebra>, hand: Homogeneity) -> Result<LoopExtraction> {
    let t = template_library(match hand {
        Homogeneity::Right => DIRECT,
        Homogeneity::Left => TWISTED,
    })?;
    let r = match is_s_special(x, &t)? {
        Verdict::Schreier(r) => r,
        Verdict::NotSchreier(d) => return Ok(LoopExtraction::NotSpecial(d)),
    };
    let n = x.size();
    // k(q(x1, x2)) = (a, 0), so a is the first coordinate
    let first = |idx: usize| r.apply_in_x(idx) / n;
    let table = (0..n * n)
        .map(|idx| {
            let (u, v) = (idx / n, idx % n);
            match hand {
                Homogeneity::Right => first(u * n + v),
                Homogeneity::Left => first(v * n + u),
            }
        })
        .collect();
    match LoopStructure::new(x.clone(), hand, table) {
        Ok(l) => Ok(LoopExtraction::Loop(l)),
        Err(Error::LawViolation(report)) => Err(Error::Inconsistency(format!(
            "diagonal retraction of `{}` is not a loop: {report}",
            x.name()
        ))),
        Err(e) => Err(e),
    }
}

/// Two-sided inverse scan. Non-associative input is rejected.
pub fn is_group(m: &FiniteAlgebra) -> Result<bool> {
    if !m.is_associative() {
        return Err(Error::Precondition(format!("`{}` is not associative", m.name())));
    }
    let z = m.zero();
    Ok((0..m.size()).all(|x| (0..m.size()).any(|y| m.add(x, y) == z && m.add(y, x) == z)))
}

#[derive(Clone, Debug)]
pub enum ProtomodularResult {
    AllStablyStrong {
        points: usize,
        probes: usize,
    },
    Counterexample {
        point: Box<Point>,
        probe: Probe,
        /// The pullback along `probe` that fails to be strong.
        pulled_back: Box<Point>,
        /// The proper subalgebra generated by its kernel and section.
        witness: Subalgebra,
    },
}

#[derive(Clone, Debug)]
pub struct ProtomodularVerdict {
    pub object: Arc<FiniteAlgebra>,
    pub bound: String,
    pub result: ProtomodularResult,
}

impl ProtomodularVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.result, ProtomodularResult::AllStablyStrong { .. })
    }
}

/// Checks that every point over `y` with carrier in `catalog` is strong
/// after pulling back along every probe from `probe_catalog`. Certifies
/// only within that bound.
pub fn protomodular_object_check(
    y: &Arc<FiniteAlgebra>,
    catalog: &Catalog,
    probe_catalog: &Catalog,
) -> Result<ProtomodularVerdict> {
    if let Some(bad) = catalog
        .algebras
        .iter()
        .chain(&probe_catalog.algebras)
        .find(|a| !a.signature().same_operations(y.signature()))
    {
        return Err(Error::SignatureMismatch(format!(
            "catalog algebra `{}` is not in the signature of `{}`",
            bad.name(),
            y.name()
        )));
    }
    let bound = format!(
        "carriers: {}; probes: {}",
        catalog.description, probe_catalog.description
    );
    let probes = probes_into(y, &probe_catalog.algebras);
    let points = enumerate_points_over(y, &catalog.algebras);
    for p in &points {
        if let StableStrongness::Counterexample {
            probe,
            pulled_back,
            witness,
        } = is_stably_strong(p, &probes)?
        {
            return Ok(ProtomodularVerdict {
                object: y.clone(),
                bound,
                result: ProtomodularResult::Counterexample {
                    point: Box::new(p.clone()),
                    probe: probes[probe].clone(),
                    pulled_back,
                    witness,
                },
            });
        }
    }
    Ok(ProtomodularVerdict {
        object: y.clone(),
        bound,
        result: ProtomodularResult::AllStablyStrong {
            points: points.len(),
            probes: probes.len(),
        },
    })
}

/// Heyting semilattice on a finite lattice given by its order. Meets are
/// greatest lower bounds; `x → y` is the largest `z` with `z ∧ x ≤ y`.
pub fn heyting_from_order(
    name: &str,
    labels: &[&str],
    leq: impl Fn(usize, usize) -> bool,
) -> Result<FiniteAlgebra> {
    let n = labels.len();
    let not_lattice = |detail: String| Error::Structural {
        symbol: "meet".into(),
        detail,
    };
    let greatest = |set: &dyn Fn(usize) -> bool| {
        (0..n).find(|&z| set(z) && (0..n).all(|w| !set(w) || leq(w, z)))
    };
    let top = greatest(&|_| true).ok_or_else(|| not_lattice("no top element".into()))?;
    let mut meet = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            meet[x * n + y] = greatest(&|z| leq(z, x) && leq(z, y))
                .ok_or_else(|| not_lattice(format!("no meet for {} and {}", labels[x], labels[y])))?;
        }
    }
    let mut imp = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            imp[x * n + y] = greatest(&|z| leq(meet[z * n + x], y)).ok_or_else(|| {
                not_lattice(format!("no implication for {} and {}", labels[x], labels[y]))
            })?;
        }
    }
    FiniteAlgebra::validated(
        name,
        Signature::standard(EquationalClass::HeytingSemilattice),
        labels.iter().map(|l| l.to_string()).collect(),
        top,
        meet,
        vec![imp],
    )
}

/// The chain `top > … > bot` with `len` elements, top at index 0.
pub fn heyting_chain(len: usize) -> Result<FiniteAlgebra> {
    let labels: Vec<String> = match len {
        0 => return Err(Error::Precondition("a chain needs at least one element".into())),
        1 => vec!["top".into()],
        2 => vec!["top".into(), "bot".into()],
        3 => vec!["top".into(), "mid".into(), "bot".into()],
        _ => std::iter::once("top".to_string())
            .chain((1..len - 1).map(|i| format!("m{i}")))
            .chain(std::iter::once("bot".to_string()))
            .collect(),
    };
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    heyting_from_order(&format!("chain{len}"), &refs, |x, y| x >= y)
}

/// The four-element Boolean lattice.
pub fn heyting_diamond() -> Result<FiniteAlgebra> {
    // subsets of {a, b} as bitmasks
    let masks = [0b11u8, 0b01, 0b10, 0b00];
    heyting_from_order("diamond", &["top", "a", "b", "bot"], |x, y| masks[x] & !masks[y] == 0)
}

/// Chains of length 1 to 4 and the diamond.
pub fn heyting_catalog() -> Result<Catalog> {
    let mut algebras = (1..=4).map(|n| heyting_chain(n).map(Arc::new)).collect::<Result<Vec<_>>>()?;
    algebras.push(Arc::new(heyting_diamond()?));
    Ok(Catalog::curated(
        "heyting semilattices: chains of length 1–4 and the diamond",
        algebras,
    ))
}

fn cyclic(n: usize) -> Result<FiniteAlgebra> {
    let rows: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    let refs: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
    FiniteAlgebra::from_rows(format!("C{n}"), EquationalClass::Group, &refs)
}

fn klein() -> Result<FiniteAlgebra> {
    let c2 = Arc::new(cyclic(2)?);
    let p = product(&c2, &c2)?;
    (*p.algebra)
        .clone()
        .renamed("Klein")
        .with_labels(vec!["0".into(), "a".into(), "b".into(), "c".into()])
}

fn s3() -> Result<FiniteAlgebra> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let labels = ["e", "(23)", "(12)", "(123)", "(132)", "(13)"];
    let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("closed");
    // x + y = x ∘ y
    let rows: Vec<Vec<usize>> = perms
        .iter()
        .map(|x| perms.iter().map(|y| index([x[y[0]], x[y[1]], x[y[2]]])).collect())
        .collect();
    let refs: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
    FiniteAlgebra::from_rows("S3", EquationalClass::Group, &refs)?
        .with_labels(labels.iter().map(|l| l.to_string()).collect())
}

fn magma_x() -> Result<FiniteAlgebra> {
    FiniteAlgebra::validated(
        "X",
        Signature::standard(EquationalClass::UnitaryMagma),
        vec!["0".into(), "a".into(), "b".into()],
        0,
        vec![0, 1, 2, 1, 0, 0, 2, 0, 0],
        vec![],
    )
}

fn magma_point() -> Result<Point> {
    let x = Arc::new(magma_x()?);
    let y = Arc::new(cyclic(2)?.with_class(EquationalClass::UnitaryMagma)?);
    let f = Homomorphism::new(x.clone(), y.clone(), vec![0, 1, 1])?;
    let s = Homomorphism::new(y, x, vec![0, 1])?;
    make_point(f, s)
}

#[derive(Clone, Debug)]
pub enum BuiltinObject {
    Algebra(Arc<FiniteAlgebra>),
    Point(Point),
}

/// Which catalog a bounded protomodular expectation runs over; probes use the same one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogChoice {
    Enumerated(EquationalClass, usize),
    Heyting,
}

impl CatalogChoice {
    pub fn build(self) -> Result<Catalog> {
        match self {
            CatalogChoice::Enumerated(class, n) => Catalog::enumerated(class, n),
            CatalogChoice::Heyting => heyting_catalog(),
        }
    }
}

/// One checkable claim about a builtin object.
#[derive(Clone, Debug)]
pub enum Expectation {
    Validates(EquationalClass),
    ViolatesLaw {
        class: EquationalClass,
        law: &'static str,
    },
    /// `diagnostic` is the label of the first element of `X × X` with `|D(x)| ≠ 1`.
    SSpecial {
        template: &'static str,
        holds: bool,
        diagnostic: Option<&'static str>,
    },
    /// The outcome is computed and recorded, not asserted.
    SSpecialRecorded { template: &'static str },
    /// `None` means the input is rejected as non-associative.
    Group(Option<bool>),
    /// The right loop is `x + inv(y)` and the left loop is `inv(x) + y`.
    GroupLoops,
    SplittingIdentity(&'static str),
    Homogeneous { right: bool, left: bool },
    /// Labels of `k(q(x))` in carrier order.
    RightRetraction(Vec<&'static str>),
    Strong {
        holds: bool,
        generated: Vec<&'static str>,
    },
    /// `counterexample` names a builtin point the counterexample must be isomorphic to.
    Protomodular {
        catalog: CatalogChoice,
        holds: bool,
        counterexample: Option<&'static str>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Recorded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub example: String,
    pub claim: String,
    pub status: Status,
    pub observed: String,
}

#[derive(Clone, Debug)]
pub struct BuiltinExample {
    pub name: &'static str,
    pub summary: &'static str,
    pub object: BuiltinObject,
    pub expectations: Vec<Expectation>,
}

impl BuiltinExample {
    pub fn algebra(&self) -> Option<&Arc<FiniteAlgebra>> {
        match &self.object {
            BuiltinObject::Algebra(a) => Some(a),
            BuiltinObject::Point(_) => None,
        }
    }

    pub fn point(&self) -> Option<&Point> {
        match &self.object {
            BuiltinObject::Point(p) => Some(p),
            BuiltinObject::Algebra(_) => None,
        }
    }

    pub fn run(&self) -> Result<Vec<Outcome>> {
        self.expectations.iter().map(|e| self.check(e)).collect()
    }

    fn check(&self, e: &Expectation) -> Result<Outcome> {
        let outcome = |claim: String, passed: bool, observed: String| Outcome {
            example: self.name.to_string(),
            claim,
            status: if passed { Status::Pass } else { Status::Fail },
            observed,
        };
        let need_algebra = || {
            self.algebra()
                .ok_or_else(|| Error::Precondition(format!("`{}` is not an algebra", self.name)))
        };
        let need_point = || {
            self.point()
                .ok_or_else(|| Error::Precondition(format!("`{}` is not a point", self.name)))
        };
        Ok(match e {
            Expectation::Validates(class) => {
                let a = need_algebra()?;
                let report = validate_algebra(&retagged(a, *class));
                outcome(format!("validates as {class}"), report.is_ok(), report.to_string())
            }
            Expectation::ViolatesLaw { class, law } => {
                let a = need_algebra()?;
                let report = validate_algebra(&retagged(a, *class));
                outcome(format!("violates `{law}` as {class}"), report.has_law(law), report.to_string())
            }
            Expectation::SSpecial {
                template,
                holds,
                diagnostic,
            } => {
                let a = need_algebra()?;
                let v = is_s_special(a, &template_library(template)?)?;
                let observed = describe_diagonal_verdict(a, &v);
                let mut ok = v.is_schreier() == *holds;
                if let (Some(want), Some(d)) = (diagonal_label(a, &v), diagnostic) {
                    ok &= want == *d;
                }
                let claim = match diagnostic {
                    Some(d) => format!("{}s-special ({template}), diagnostic {d}", if *holds { "" } else { "not " }),
                    None => format!("{}s-special ({template})", if *holds { "" } else { "not " }),
                };
                outcome(claim, ok, observed)
            }
            Expectation::SSpecialRecorded { template } => {
                let a = need_algebra()?;
                let v = is_s_special(a, &template_library(template)?)?;
                Outcome {
                    example: self.name.to_string(),
                    claim: format!("s-special ({template}): computed"),
                    status: Status::Recorded,
                    observed: describe_diagonal_verdict(a, &v),
                }
            }
            Expectation::Group(expected) => {
                let a = need_algebra()?;
                let got = match is_group(a) {
                    Ok(b) => Some(b),
                    Err(Error::Precondition(_)) => None,
                    Err(e) => return Err(e),
                };
                let show = |g: Option<bool>| match g {
                    Some(true) => "group",
                    Some(false) => "monoid, not a group",
                    None => "rejected: not associative",
                };
                outcome(show(*expected).to_string(), got == *expected, show(got).to_string())
            }
            Expectation::GroupLoops => {
                let a = need_algebra()?;
                let inv = |x: usize| a.apply(crate::algebra::INVERSE, &[x]);
                let mut ok = true;
                let mut seen = Vec::new();
                for hand in [Homogeneity::Right, Homogeneity::Left] {
                    match extract_loop(a, hand)? {
                        LoopExtraction::Loop(l) => {
                            for x in 0..a.size() {
                                for y in 0..a.size() {
                                    let want = match hand {
                                        Homogeneity::Right => a.add(x, inv(y)?),
                                        Homogeneity::Left => a.add(inv(x)?, y),
                                    };
                                    ok &= l.op(x, y) == want;
                                }
                            }
                            seen.push(format!("{hand:?} loop found"));
                        }
                        LoopExtraction::NotSpecial(_) => {
                            ok = false;
                            seen.push(format!("no {hand:?} loop"));
                        }
                    }
                }
                outcome("loops are group subtraction and division".into(), ok, seen.join(", "))
            }
            Expectation::SplittingIdentity(template) => {
                let a = need_algebra()?;
                let r = verify_splitting_identity(&template_library(template)?, a, a)?;
                outcome(
                    format!("splitting identity for {template} on ({0}, {0})", a.name()),
                    r.is_ok(),
                    format!("{} pairs, {} failures", r.pairs_checked, r.failures.len()),
                )
            }
            Expectation::Homogeneous { right, left } => {
                let p = need_point()?;
                let an = classify_point(p, &[])?;
                let (r, l) = (an.right_homogeneous.is_schreier(), an.left_homogeneous.is_schreier());
                outcome(
                    format!("right homogeneous {right}, left homogeneous {left}"),
                    (r, l) == (*right, *left),
                    format!("right {r}, left {l}"),
                )
            }
            Expectation::RightRetraction(want) => {
                let p = need_point()?;
                let v = intrinsic_schreier_check(p, &template_library(DIRECT)?)?;
                match v.retraction() {
                    Some(r) => {
                        let got: Vec<&str> = r.table_in_x().iter().map(|&e| p.x().label(e)).collect();
                        outcome(format!("retraction {}", want.join(" ")), got == *want, got.join(" "))
                    }
                    None => outcome(format!("retraction {}", want.join(" ")), false, "no retraction".into()),
                }
            }
            Expectation::Strong { holds, generated } => {
                let p = need_point()?;
                let st = crate::points::is_strong_point(p);
                let labels: Vec<String> = st.generated.members().iter().map(|&m| p.x().label(m).to_string()).collect();
                let ok = st.strong == *holds && labels.iter().map(String::as_str).eq(generated.iter().copied());
                outcome(
                    format!("{}strong, generated {{{}}}", if *holds { "" } else { "not " }, generated.join(", ")),
                    ok,
                    format!("{}strong, generated {{{}}}", if st.strong { "" } else { "not " }, labels.join(", ")),
                )
            }
            Expectation::Protomodular {
                catalog,
                holds,
                counterexample,
            } => {
                let a = need_algebra()?;
                let cat = catalog.build()?;
                let class = match catalog {
                    CatalogChoice::Enumerated(c, _) => *c,
                    CatalogChoice::Heyting => EquationalClass::HeytingSemilattice,
                };
                let y = Arc::new(retagged(a, class));
                let v = protomodular_object_check(&y, &cat, &cat)?;
                let mut ok = v.holds() == *holds;
                let observed = match &v.result {
                    ProtomodularResult::AllStablyStrong { points, probes } => {
                        format!("{points} points, {probes} probes, all stably strong")
                    }
                    ProtomodularResult::Counterexample { point, .. } => {
                        if let Some(name) = counterexample {
                            let want = builtin_example(name)?;
                            let want = want.point().ok_or_else(|| Error::Precondition(format!("`{name}` is not a point")))?;
                            ok &= points_isomorphic(point, want);
                        }
                        format!("counterexample {}", point.describe())
                    }
                };
                let claim = match (holds, counterexample) {
                    (true, _) => format!("protomodular within {}", cat.description),
                    (false, Some(c)) => format!("counterexample `{c}` within {}", cat.description),
                    (false, None) => format!("not protomodular within {}", cat.description),
                };
                outcome(claim, ok, observed)
            }
        })
    }
}

/// The algebra re-tagged with `class`, keeping tables; falls back to the
/// input when the class change is impossible (validation then reports why).
fn retagged(a: &Arc<FiniteAlgebra>, class: EquationalClass) -> FiniteAlgebra {
    if a.class() == class {
        return (**a).clone();
    }
    a.with_class(class).unwrap_or_else(|_| {
        let mut sig = a.signature().clone();
        sig.class = class;
        let extras = a.extras().iter().map(|o| o.table.clone()).collect();
        FiniteAlgebra::new(a.name(), sig, a.elements().to_vec(), a.zero(), a.jt_table().to_vec(), extras)
            .unwrap_or_else(|_| (**a).clone())
    })
}

fn diagonal_label(a: &FiniteAlgebra, v: &Verdict) -> Option<String> {
    v.failure().map(|d| {
        let n = a.size();
        format!("({},{})", a.label(d.element / n), a.label(d.element % n))
    })
}

fn describe_diagonal_verdict(a: &FiniteAlgebra, v: &Verdict) -> String {
    match v {
        Verdict::Schreier(_) => "s-special".into(),
        Verdict::NotSchreier(d) => format!(
            "not s-special: |D{}| = {}",
            diagonal_label(a, v).unwrap_or_default(),
            d.candidates.len()
        ),
    }
}

/// Every builtin, in a fixed order.
pub fn builtin_examples() -> Result<Vec<BuiltinExample>> {
    use EquationalClass::*;
    let c2 = Arc::new(cyclic(2)?);
    let c4 = Arc::new(cyclic(4)?);
    let klein = Arc::new(klein()?);
    let s3 = Arc::new(s3()?);
    let chain = Arc::new(heyting_chain(3)?);
    let magma = Arc::new(magma_x()?);
    let absorbing = Arc::new(FiniteAlgebra::from_rows("M2", Monoid, &[&[0, 1], &[1, 1]])?);
    let group = |name, summary, a: &Arc<FiniteAlgebra>| BuiltinExample {
        name,
        summary,
        object: BuiltinObject::Algebra(a.clone()),
        expectations: vec![
            Expectation::Validates(Group),
            Expectation::Group(Some(true)),
            Expectation::SSpecial {
                template: DIRECT,
                holds: true,
                diagnostic: None,
            },
            Expectation::GroupLoops,
            Expectation::SplittingIdentity(crate::terms::GROUP_CONJUGATION),
        ],
    };
    let mut c2_example = group("c2", "cyclic group of order 2", &c2);
    c2_example.expectations.extend([
        Expectation::Protomodular {
            catalog: CatalogChoice::Enumerated(UnitaryMagma, 3),
            holds: false,
            counterexample: Some("mag-counterexample-point"),
        },
        Expectation::Protomodular {
            catalog: CatalogChoice::Enumerated(Monoid, 4),
            holds: true,
            counterexample: None,
        },
    ]);
    Ok(vec![
        c2_example,
        BuiltinExample {
            name: "mag-counterexample",
            summary: "three-element unitary magma {0, a, b} with x + y = 0 for x, y ≠ 0",
            object: BuiltinObject::Algebra(magma.clone()),
            expectations: vec![
                Expectation::Validates(UnitaryMagma),
                Expectation::ViolatesLaw {
                    class: Monoid,
                    law: "associativity",
                },
                Expectation::Group(None),
                Expectation::SSpecialRecorded { template: DIRECT },
            ],
        },
        BuiltinExample {
            name: "mag-counterexample-point",
            summary: "the point X ⇄ C2 with f(a) = f(b) = 1 and s(1) = a",
            object: BuiltinObject::Point(magma_point()?),
            expectations: vec![
                Expectation::Strong {
                    holds: false,
                    generated: vec!["0", "a"],
                },
                Expectation::Homogeneous {
                    right: false,
                    left: false,
                },
            ],
        },
        BuiltinExample {
            name: "heyting-3-chain",
            summary: "the chain bot < mid < top with meet and implication",
            object: BuiltinObject::Algebra(chain.clone()),
            expectations: vec![
                Expectation::Validates(HeytingSemilattice),
                Expectation::SSpecial {
                    template: DIRECT,
                    holds: false,
                    diagnostic: Some("(top,mid)"),
                },
                Expectation::Protomodular {
                    catalog: CatalogChoice::Heyting,
                    holds: true,
                    counterexample: None,
                },
            ],
        },
        BuiltinExample {
            name: "c2-diagonal",
            summary: "the diagonal point of C2",
            object: BuiltinObject::Point(diagonal_point(&c2)?),
            expectations: vec![
                Expectation::RightRetraction(vec!["(0,0)", "(1,0)", "(1,0)", "(0,0)"]),
                Expectation::Homogeneous {
                    right: true,
                    left: true,
                },
                Expectation::Strong {
                    holds: true,
                    generated: vec!["(0,0)", "(0,1)", "(1,0)", "(1,1)"],
                },
            ],
        },
        BuiltinExample {
            name: "c2-identity",
            summary: "the identity point of C2",
            object: BuiltinObject::Point(identity_point(c2.clone())),
            expectations: vec![
                Expectation::RightRetraction(vec!["0", "0"]),
                Expectation::Homogeneous {
                    right: true,
                    left: true,
                },
            ],
        },
        BuiltinExample {
            name: "m2",
            summary: "two-element monoid with 1 + 1 = 1",
            object: BuiltinObject::Algebra(absorbing),
            expectations: vec![
                Expectation::Validates(CommutativeMonoid),
                Expectation::Group(Some(false)),
                Expectation::SSpecial {
                    template: DIRECT,
                    holds: false,
                    diagnostic: None,
                },
            ],
        },
        group("c4", "cyclic group of order 4", &c4),
        group("klein", "Klein four-group", &klein),
        group("s3", "symmetric group on three letters", &s3),
    ])
}

pub fn builtin_example(name: &str) -> Result<BuiltinExample> {
    builtin_examples()?
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Unknown {
            kind: "builtin example",
            name: name.to_string(),
        })
}

/// A builtin algebra by name (`c2`, `c4`, `klein`, `s3`, `heyting-3-chain`, ...).
pub fn builtin_algebra(name: &str) -> Result<Arc<FiniteAlgebra>> {
    let e = builtin_example(name)?;
    e.algebra().cloned().ok_or_else(|| Error::Unknown {
        kind: "builtin algebra",
        name: name.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Arc<FiniteAlgebra> {
        builtin_algebra("c2").unwrap()
    }

    #[test]
    fn diagonal_of_c2() {
        let p = diagonal_point(&c2()).unwrap();
        assert_eq!(p.x().size(), 4);
        let labels: Vec<&str> = p.kernel().members().iter().map(|&m| p.x().label(m)).collect();
        assert_eq!(labels, ["(0,0)", "(1,0)"]);
    }

    #[test]
    fn diagonal_of_trivial_is_identity() {
        let one = Arc::new(c2().trivial_like());
        let p = diagonal_point(&one).unwrap();
        assert_eq!(p.x().size(), 1);
        assert!(p.f().is_identity() || p.f().is_injective());
    }

    #[test]
    fn c2_right_loop_is_xor() {
        let l = extract_loop(&c2(), Homogeneity::Right).unwrap();
        let l = l.loop_structure().unwrap();
        assert_eq!(l.table(), &[0, 1, 1, 0]);
        let r = l.to_retraction().unwrap();
        let direct = is_s_special(&c2(), &template_library(DIRECT).unwrap()).unwrap();
        assert!(&r == direct.retraction().unwrap());
    }

    #[test]
    fn heyting_chain_is_not_special() {
        let chain = Arc::new(heyting_chain(3).unwrap());
        let v = is_s_special(&chain, &template_library(DIRECT).unwrap()).unwrap();
        let d = v.failure().unwrap();
        assert_eq!(diagonal_label(&chain, &v).unwrap(), "(top,mid)");
        assert!(d.candidates.is_empty());
        assert!(extract_loop(&chain, Homogeneity::Right).unwrap().loop_structure().is_none());
    }

    #[test]
    fn heyting_tables() {
        let chain = heyting_chain(3).unwrap();
        let (top, mid, bot) = (0, 1, 2);
        assert_eq!(chain.add(mid, bot), bot);
        assert_eq!(chain.apply("->", &[mid, bot]).unwrap(), bot);
        assert_eq!(chain.apply("->", &[bot, mid]).unwrap(), top);
        let d = heyting_diamond().unwrap();
        // a → b = ¬a ∨ b = b
        assert_eq!(d.apply("->", &[1, 2]).unwrap(), 2);
        assert_eq!(heyting_catalog().unwrap().algebras.len(), 5);
    }

    #[test]
    fn group_detection() {
        assert!(is_group(&c2()).unwrap());
        let m2 = builtin_algebra("m2").unwrap();
        assert!(!is_group(&m2).unwrap());
        let x = builtin_algebra("mag-counterexample").unwrap();
        assert!(matches!(is_group(&x), Err(Error::Precondition(_))));
    }

    #[test]
    fn loops_reject_bad_tables() {
        let c2 = c2();
        assert!(matches!(
            LoopStructure::new(c2.clone(), Homogeneity::Right, vec![0, 0, 0, 0]),
            Err(Error::LawViolation(_))
        ));
        assert!(LoopStructure::new(c2, Homogeneity::Left, vec![0, 1, 1, 0]).is_ok());
    }

    #[test]
    fn s3_left_and_right_loops_differ() {
        let s3 = builtin_algebra("s3").unwrap();
        let r = extract_loop(&s3, Homogeneity::Right).unwrap();
        let l = extract_loop(&s3, Homogeneity::Left).unwrap();
        assert_ne!(r.loop_structure().unwrap().table(), l.loop_structure().unwrap().table());
    }

    #[test]
    fn every_builtin_expectation_holds() {
        for e in builtin_examples().unwrap() {
            for o in e.run().unwrap() {
                assert_ne!(o.status, Status::Fail, "{}: {} (observed {})", o.example, o.claim, o.observed);
            }
        }
    }
}
