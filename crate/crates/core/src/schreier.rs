//! Classification of points as (intrinsic) Schreier points.
//!
//! For a template `t` and a point `K ↣ X ⇄ Y`, the decomposition set of
//! `x ∈ X` is
//!
//! ```text
//! D(x) = { a ∈ K : [k, s](t(a, f(x))) = x }
//! ```
//!
//! The point is intrinsic Schreier for `t` iff every `D(x)` is a singleton,
//! and the retraction sends `x` to that element. For the direct template
//! this is the unique decomposition `x = k(a) + s(f(x))`; for the twisted
//! one it is `x = s(f(x)) + k(a)`.
//!
//! Every retraction found this way is re-verified against the generator
//! level forms of iS1 and iS2. A disagreement is an [`Error::Inconsistency`].

use serde::Serialize;

use crate::algebra::{ElementMap, SetMap};
use crate::error::{Error, Result};
use crate::points::{is_strong_point, Point, PointMorphism, Strongness};
use crate::terms::{
    fold_coproduct, template_library, verify_splitting_identity, SplittingTemplate, DIRECT,
    TWISTED,
};

/// Candidate search spaces above this size are refused.
pub const UNIQUENESS_WORK_BOUND: u64 = 1 << 24;

/// A set map `q : X → K` attached to a point.
#[derive(Clone, Debug)]
pub struct Retraction {
    point: Point,
    q: SetMap,
}

impl Retraction {
    /// Wraps an arbitrary table `X → K` (indices into the materialized
    /// kernel). Only totality is checked; see the axiom suites for the rest.
    pub fn candidate(point: Point, table: Vec<usize>) -> Result<Self> {
        let q = SetMap::new(point.x().clone(), point.k_algebra().clone(), table)?;
        Ok(Retraction { point, q })
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn q(&self) -> &SetMap {
        &self.q
    }

    /// `q(x)` as a kernel index.
    pub fn apply(&self, x: usize) -> usize {
        self.q.apply(x)
    }

    /// `k(q(x))`, i.e. `q(x)` seen inside `X`.
    pub fn apply_in_x(&self, x: usize) -> usize {
        self.point.k().apply(self.q.apply(x))
    }

    /// Values of `k ∘ q` on every element of `X`.
    pub fn table_in_x(&self) -> Vec<usize> {
        (0..self.point.x().size()).map(|x| self.apply_in_x(x)).collect()
    }

    /// `(x, q(x))` label pairs.
    pub fn labelled(&self) -> Vec<(String, String)> {
        let x = self.point.x();
        (0..x.size())
            .map(|e| (x.label(e).to_string(), x.label(self.apply_in_x(e)).to_string()))
            .collect()
    }
}

impl PartialEq for Retraction {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

/// The first element whose decomposition set is not a singleton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionFailure {
    pub element: usize,
    /// `D(element)` as kernel indices.
    pub candidates: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Schreier(Retraction),
    NotSchreier(DecompositionFailure),
}

impl Verdict {
    pub fn is_schreier(&self) -> bool {
        matches!(self, Verdict::Schreier(_))
    }

    pub fn retraction(&self) -> Option<&Retraction> {
        match self {
            Verdict::Schreier(r) => Some(r),
            Verdict::NotSchreier(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&DecompositionFailure> {
        match self {
            Verdict::Schreier(_) => None,
            Verdict::NotSchreier(d) => Some(d),
        }
    }
}

fn check_template(p: &Point, t: &SplittingTemplate) -> Result<()> {
    t.check_algebra(p.x())?;
    t.check_algebra(p.y())?;
    t.check_algebra(p.k_algebra())?;
    let report = verify_splitting_identity(t, p.k_algebra(), p.y())?;
    if !report.is_ok() {
        let detail = match report.failures.first() {
            Some(&(a, b, ra, rb)) => format!(
                "t({a}, {b}) recovers ({ra}, {rb}) on ({}, {})",
                p.k_algebra().name(),
                p.y().name()
            ),
            None => "t_{A,0} is not the counit".to_string(),
        };
        return Err(Error::SplittingIdentity {
            template: t.name.clone(),
            detail,
        });
    }
    Ok(())
}

/// `D(x)` for every `x ∈ X`, as kernel indices.
pub fn decomposition_sets(p: &Point, t: &SplittingTemplate) -> Result<Vec<Vec<usize>>> {
    check_template(p, t)?;
    let x_alg = p.x();
    let k = p.k();
    let s = p.s();
    let mut sets = Vec::with_capacity(x_alg.size());
    for x in 0..x_alg.size() {
        let y = p.f().apply(x);
        let mut d = Vec::new();
        for a in 0..p.k_algebra().size() {
            if t.fold_with(x_alg, a, y, |u| k.apply(u), |v| s.apply(v))? == x {
                d.push(a);
            }
        }
        sets.push(d);
    }
    Ok(sets)
}

/// Decides whether `p` is intrinsic Schreier for `t` and returns the retraction.
pub fn intrinsic_schreier_check(p: &Point, t: &SplittingTemplate) -> Result<Verdict> {
    let sets = decomposition_sets(p, t)?;
    if let Some((element, d)) = sets.iter().enumerate().find(|(_, d)| d.len() != 1) {
        return Ok(Verdict::NotSchreier(DecompositionFailure {
            element,
            candidates: d.clone(),
        }));
    }
    let r = Retraction::candidate(p.clone(), sets.iter().map(|d| d[0]).collect())?;
    if let Some(x) = first_is1_failure(&r, t)? {
        return Err(Error::Inconsistency(format!(
            "decomposition retraction violates iS1 at `{}` for template `{}`",
            p.x().label(x),
            t.name
        )));
    }
    if let Some((a, y)) = first_is2_failure(&r, t)? {
        return Err(Error::Inconsistency(format!(
            "decomposition retraction violates iS2 at ({}, {}) for template `{}`",
            p.k_algebra().label(a),
            p.y().label(y),
            t.name
        )));
    }
    Ok(Verdict::Schreier(r))
}

/// iS1 on generators: `[k∘q, s∘f](t(x, x)) = x`.
fn first_is1_failure(r: &Retraction, t: &SplittingTemplate) -> Result<Option<usize>> {
    let p = r.point();
    let kq = SetMap::from(p.k()).after(r.q())?;
    let sf = SetMap::from(p.s()).after(p.f())?;
    for x in 0..p.x().size() {
        if fold_coproduct(&t.instantiate(x, x), &kq, &sf)? != x {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// iS2 on generators: `q([k, s](t(a, y))) = a`.
fn first_is2_failure(r: &Retraction, t: &SplittingTemplate) -> Result<Option<(usize, usize)>> {
    let p = r.point();
    for a in 0..p.k_algebra().size() {
        for y in 0..p.y().size() {
            let x = fold_coproduct(&t.instantiate(a, y), p.k(), p.s())?;
            if r.apply(x) != a {
                return Ok(Some((a, y)));
            }
        }
    }
    Ok(None)
}

/// Which side the section term sits on in the decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Homogeneity {
    /// `x = k(a) + s(f(x))`
    Right,
    /// `x = s(f(x)) + k(a)`
    Left,
}

/// Unique decomposition computed straight from the `+` table, without templates.
pub fn elementwise_decomposition(p: &Point, side: Homogeneity) -> Result<Verdict> {
    let x_alg = p.x();
    let mut table = Vec::with_capacity(x_alg.size());
    for x in 0..x_alg.size() {
        let sfx = p.s().apply(p.f().apply(x));
        let d: Vec<usize> = (0..p.k_algebra().size())
            .filter(|&a| {
                let ka = p.k().apply(a);
                let sum = match side {
                    Homogeneity::Right => x_alg.add(ka, sfx),
                    Homogeneity::Left => x_alg.add(sfx, ka),
                };
                sum == x
            })
            .collect();
        if d.len() != 1 {
            return Ok(Verdict::NotSchreier(DecompositionFailure {
                element: x,
                candidates: d,
            }));
        }
        table.push(d[0]);
    }
    Ok(Verdict::Schreier(Retraction::candidate(p.clone(), table)?))
}

/// Everything known about one point.
#[derive(Clone, Debug)]
pub struct SchreierAnalysis {
    pub point: Point,
    /// Intrinsic check with the direct template.
    pub right_homogeneous: Verdict,
    /// Intrinsic check with the twisted template.
    pub left_homogeneous: Verdict,
    pub homogeneous: bool,
    pub strong: Strongness,
    pub per_template: Vec<(String, Verdict)>,
}

pub fn classify_point(p: &Point, extra_templates: &[SplittingTemplate]) -> Result<SchreierAnalysis> {
    let right = intrinsic_schreier_check(p, &template_library(DIRECT)?)?;
    let left = intrinsic_schreier_check(p, &template_library(TWISTED)?)?;
    let per_template = extra_templates
        .iter()
        .map(|t| Ok((t.name.clone(), intrinsic_schreier_check(p, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchreierAnalysis {
        point: p.clone(),
        homogeneous: right.is_schreier() && left.is_schreier(),
        right_homogeneous: right,
        left_homogeneous: left,
        strong: is_strong_point(p),
        per_template,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    /// First failing tuple: an element of `X` or a pair `(a, y)`.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    fn record(&mut self, axiom: &str, witness: Option<Vec<usize>>) {
        self.checks.push(AxiomCheck {
            axiom: axiom.to_string(),
            passed: witness.is_none(),
            witness,
        });
    }
}

fn first_pair(na: usize, ny: usize, mut fails: impl FnMut(usize, usize) -> bool) -> Option<Vec<usize>> {
    (0..na)
        .flat_map(|a| (0..ny).map(move |y| (a, y)))
        .find(|&(a, y)| fails(a, y))
        .map(|(a, y)| vec![a, y])
}

/// S1–S6, element-wise, using only the `+` table.
pub fn verify_s_axioms(r: &Retraction) -> AxiomReport {
    let p = r.point();
    let x = p.x();
    let (k, s, f) = (p.k(), p.s(), p.f());
    let nk = p.k_algebra().size();
    let ny = p.y().size();
    let zero_k = p.k_algebra().zero();
    let mut report = AxiomReport::default();

    let s1 = (0..x.size()).find(|&e| x.add(k.apply(r.apply(e)), s.apply(f.apply(e))) != e);
    report.record("S1", s1.map(|e| vec![e]));
    let s2 = first_pair(nk, ny, |a, y| r.apply(x.add(k.apply(a), s.apply(y))) != a);
    report.record("S2", s2);
    let s3 = (0..nk).find(|&a| r.apply(k.apply(a)) != a);
    report.record("S3", s3.map(|a| vec![a]));
    let s4 = (0..ny).find(|&y| r.apply(s.apply(y)) != zero_k);
    report.record("S4", s4.map(|y| vec![y]));
    report.record("S5", (r.apply(x.zero()) != zero_k).then(|| vec![x.zero()]));
    let s6 = first_pair(nk, ny, |a, y| {
        let sk = x.add(s.apply(y), k.apply(a));
        x.add(k.apply(r.apply(sk)), s.apply(y)) != sk
    });
    report.record("S6", s6);
    report
}

/// iS1–iS6 on generators for an arbitrary template.
///
/// iS6 is checked in its template form: with `u = [s, k](t(y, a))`,
/// `[k, s](t(q(u), y)) = u`. For the direct template this is S6.
pub fn verify_is_axioms(r: &Retraction, t: &SplittingTemplate) -> Result<AxiomReport> {
    let p = r.point();
    check_template(p, t)?;
    let x = p.x();
    let (k, s) = (p.k(), p.s());
    let nk = p.k_algebra().size();
    let ny = p.y().size();
    let zero_k = p.k_algebra().zero();
    let mut report = AxiomReport::default();

    report.record("iS1", first_is1_failure(r, t)?.map(|e| vec![e]));
    report.record("iS2", first_is2_failure(r, t)?.map(|(a, y)| vec![a, y]));
    let is3 = (0..nk).find(|&a| r.apply(k.apply(a)) != a);
    report.record("iS3", is3.map(|a| vec![a]));
    let is4 = (0..ny).find(|&y| r.apply(s.apply(y)) != zero_k);
    report.record("iS4", is4.map(|y| vec![y]));
    report.record("iS5", (r.apply(x.zero()) != zero_k).then(|| vec![x.zero()]));
    let mut is6 = None;
    'outer: for a in 0..nk {
        for y in 0..ny {
            let u = t.fold_with(x, y, a, |v| s.apply(v), |b| k.apply(b))?;
            let back = t.fold_with(x, r.apply(u), y, |b| k.apply(b), |v| s.apply(v))?;
            if back != u {
                is6 = Some(vec![a, y]);
                break 'outer;
            }
        }
    }
    report.record("iS6", is6);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    /// `|K|^|X|` before pruning.
    pub search_space: u64,
    /// Candidates left after restricting each `q(x)` to `D(x)`.
    pub pruned_candidates: u64,
    /// Tables (kernel indices) satisfying iS1 and iS2.
    pub retractions: Vec<Vec<usize>>,
}

impl UniquenessReport {
    pub fn unique(&self) -> bool {
        self.retractions.len() == 1
    }
}

/// Exhaustive search for all set maps `X → K` satisfying iS1 and iS2.
/// iS1 at `x` is exactly `q(x) ∈ D(x)`, so candidates range over the
/// product of the decomposition sets; iS2 is then checked on each.
pub fn retraction_uniqueness_check(p: &Point, t: &SplittingTemplate) -> Result<UniquenessReport> {
    let nk = p.k_algebra().size() as u64;
    let nx = p.x().size() as u32;
    let search_space = nk.checked_pow(nx).filter(|&v| v <= UNIQUENESS_WORK_BOUND).ok_or_else(|| {
        Error::WorkBound(format!(
            "|K|^|X| = {nk}^{nx} exceeds {UNIQUENESS_WORK_BOUND} candidates"
        ))
    })?;
    let sets = decomposition_sets(p, t)?;
    let pruned_candidates = sets.iter().map(|d| d.len() as u64).product();
    let mut retractions = Vec::new();
    if pruned_candidates > 0 {
        let mut choice = vec![0usize; sets.len()];
        loop {
            let table: Vec<usize> = choice.iter().zip(&sets).map(|(&i, d)| d[i]).collect();
            let r = Retraction::candidate(p.clone(), table.clone())?;
            if first_is1_failure(&r, t)?.is_none() && first_is2_failure(&r, t)?.is_none() {
                retractions.push(table);
            }
            let mut pos = choice.len();
            let done = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < sets[pos].len() {
                    break false;
                }
                choice[pos] = 0;
            };
            if done {
                break;
            }
        }
    }
    Ok(UniquenessReport {
        search_space,
        pruned_candidates,
        retractions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub compatible: bool,
    /// First `x` with `g̃(q(x)) ≠ q'(g(x))`.
    pub witness: Option<usize>,
}

/// Checks `g̃ ∘ q = q' ∘ g` on every element of the source carrier.
pub fn retraction_compatibility(m: &PointMorphism, t: &SplittingTemplate) -> Result<CompatibilityReport> {
    let source = intrinsic_schreier_check(m.source(), t)?;
    let target = intrinsic_schreier_check(m.target(), t)?;
    let (Some(q), Some(q2)) = (source.retraction(), target.retraction()) else {
        return Err(Error::Precondition(format!(
            "both ends must be intrinsic Schreier for `{}`",
            t.name
        )));
    };
    Ok(compatibility_of(m, q, q2))
}

pub(crate) fn compatibility_of(m: &PointMorphism, q: &Retraction, q2: &Retraction) -> CompatibilityReport {
    let witness = (0..m.source().x().size())
        .find(|&x| m.induced_kernel_map().apply(q.apply(x)) != q2.apply(m.g().apply(x)));
    CompatibilityReport {
        compatible: witness.is_none(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{EquationalClass, FiniteAlgebra, Homomorphism, Signature};
    use crate::points::{identity_point, make_point, product_projection_point, terminal_point};
    use crate::special::diagonal_point;

    fn c2() -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::from_rows("C2", EquationalClass::Monoid, &[&[0, 1], &[1, 0]]).unwrap())
    }

    fn magma_point() -> Point {
        let x = Arc::new(
            FiniteAlgebra::validated(
                "X",
                Signature::standard(EquationalClass::UnitaryMagma),
                vec!["0".into(), "a".into(), "b".into()],
                0,
                vec![0, 1, 2, 1, 0, 0, 2, 0, 0],
                vec![],
            )
            .unwrap(),
        );
        let y = Arc::new(c2().with_class(EquationalClass::UnitaryMagma).unwrap());
        let f = Homomorphism::new(x.clone(), y.clone(), vec![0, 1, 1]).unwrap();
        let s = Homomorphism::new(y, x, vec![0, 1]).unwrap();
        make_point(f, s).unwrap()
    }

    fn direct() -> SplittingTemplate {
        template_library(DIRECT).unwrap()
    }

    #[test]
    fn c2_diagonal_retraction() {
        let p = diagonal_point(&c2()).unwrap();
        let r = intrinsic_schreier_check(&p, &direct()).unwrap();
        let r = r.retraction().unwrap();
        // carrier (x, y) at index 2x + y; kernel {(0,0), (1,0)}
        let first: Vec<usize> = r.table_in_x().iter().map(|&e| e / 2).collect();
        assert_eq!(first, vec![0, 1, 1, 0]);
        assert!(verify_s_axioms(r).all_passed());
        assert!(verify_is_axioms(r, &direct()).unwrap().all_passed());
    }

    #[test]
    fn product_projection_retraction_is_the_first_projection() {
        let c2 = c2();
        let p = product_projection_point(&c2, &c2).unwrap();
        let r = intrinsic_schreier_check(&p, &direct()).unwrap();
        let r = r.retraction().unwrap();
        assert_eq!(r.table_in_x(), vec![0, 0, 2, 2]);
        assert!(verify_s_axioms(r).all_passed());
    }

    #[test]
    fn magma_point_fails_at_b() {
        let v = intrinsic_schreier_check(&magma_point(), &direct()).unwrap();
        let d = v.failure().unwrap();
        assert_eq!(d.element, 2);
        assert!(d.candidates.is_empty());
    }

    #[test]
    fn corrupted_retraction_fails_s1() {
        let p = diagonal_point(&c2()).unwrap();
        let good = intrinsic_schreier_check(&p, &direct()).unwrap();
        let mut table = good.retraction().unwrap().q().table().to_vec();
        // (1,0) is carrier index 2
        table[2] = p.k_algebra().zero();
        let bad = Retraction::candidate(p.clone(), table).unwrap();
        let report = verify_s_axioms(&bad);
        assert_eq!(report.get("S1").unwrap().witness, Some(vec![2]));
    }

    #[test]
    fn corrupted_retraction_on_terminal_point_fails_is3() {
        let p = terminal_point(c2());
        let bad = Retraction::candidate(p.clone(), vec![0, 0]).unwrap();
        let report = verify_is_axioms(&bad, &direct()).unwrap();
        assert!(!report.get("iS3").unwrap().passed);
    }

    #[test]
    fn uniqueness_examples() {
        let c2 = c2();
        for p in [
            diagonal_point(&c2).unwrap(),
            identity_point(c2.clone()),
            product_projection_point(&c2, &c2).unwrap(),
        ] {
            let u = retraction_uniqueness_check(&p, &direct()).unwrap();
            assert!(u.unique(), "{}", p.describe());
        }
        let u = retraction_uniqueness_check(&product_projection_point(&c2, &c2).unwrap(), &direct()).unwrap();
        assert_eq!((u.search_space, u.pruned_candidates), (16, 1));
    }

    #[test]
    fn uniqueness_refuses_large_spaces() {
        let c2 = c2();
        let k4 = crate::algebra::product(&c2, &c2).unwrap().algebra;
        let k16 = crate::algebra::product(&k4, &k4).unwrap().algebra;
        let big = crate::algebra::product(&k16, &k4).unwrap().algebra;
        let p = terminal_point(big);
        assert!(matches!(retraction_uniqueness_check(&p, &direct()), Err(Error::WorkBound(_))));
    }

    #[test]
    fn compatibility_of_identity_morphism() {
        let p = diagonal_point(&c2()).unwrap();
        let m = PointMorphism::identity(&p);
        assert!(retraction_compatibility(&m, &direct()).unwrap().compatible);
        let bad = PointMorphism::identity(&magma_point());
        assert!(matches!(retraction_compatibility(&bad, &direct()), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_point_into_diagonal_point() {
        // g = ⟨1,1⟩ : C2 → C2×C2, h = 1
        let c2 = c2();
        let id = identity_point(c2.clone());
        let diag = diagonal_point(&c2).unwrap();
        let g = diag.s().clone();
        let m = PointMorphism::new(id, diag, g, Homomorphism::identity(c2)).unwrap();
        assert!(retraction_compatibility(&m, &direct()).unwrap().compatible);
    }
}
