//! Points (split epimorphisms with a chosen section), point morphisms,
//! strongness, and the point-level limits: pullback, product, equalizer.

use std::sync::Arc;

use crate::algebra::{
    equalizer, homomorphisms, same_algebra, homomorphisms_with, kernel, product, product_map, pullback,
    subalgebra_generated, ElementMap, FiniteAlgebra, Homomorphism, Subalgebra,
};
use crate::error::{Error, Result};

/// `K ↣ X ⇄ Y` with `f ∘ s = 1_Y`; the kernel is always recomputed.
#[derive(Clone, Debug)]
pub struct Point {
    f: Homomorphism,
    s: Homomorphism,
    kernel: Subalgebra,
}

impl Point {
    pub fn f(&self) -> &Homomorphism {
        &self.f
    }

    pub fn s(&self) -> &Homomorphism {
        &self.s
    }

    /// Kernel embedding `k : K → X`.
    pub fn k(&self) -> &Homomorphism {
        self.kernel.embedding()
    }

    pub fn kernel(&self) -> &Subalgebra {
        &self.kernel
    }

    /// The carrier `X`.
    pub fn x(&self) -> &Arc<FiniteAlgebra> {
        self.f.dom()
    }

    /// The base `Y`.
    pub fn y(&self) -> &Arc<FiniteAlgebra> {
        self.f.cod()
    }

    /// The materialized kernel `K`.
    pub fn k_algebra(&self) -> &Arc<FiniteAlgebra> {
        self.kernel.algebra()
    }

    pub fn describe(&self) -> String {
        let x = self.x();
        let y = self.y();
        let f: Vec<String> = (0..x.size())
            .map(|i| format!("{}↦{}", x.label(i), y.label(self.f.apply(i))))
            .collect();
        let s: Vec<String> = (0..y.size())
            .map(|i| format!("{}↦{}", y.label(i), x.label(self.s.apply(i))))
            .collect();
        format!(
            "{} ⇄ {}  f: {{{}}}  s: {{{}}}",
            x.name(),
            y.name(),
            f.join(", "),
            s.join(", ")
        )
    }
}

/// Validates `f ∘ s = 1` and computes the kernel.
pub fn make_point(f: Homomorphism, s: Homomorphism) -> Result<Point> {
    if !same_algebra(s.dom(), f.cod()) || !same_algebra(s.cod(), f.dom()) {
        return Err(Error::Mismatch(
            "the section must go from the codomain of f back to its domain".into(),
        ));
    }
    if let Some(y) = (0..f.cod().size()).find(|&y| f.apply(s.apply(y)) != y) {
        return Err(Error::NotASection {
            witness: f.cod().label(y).to_string(),
        });
    }
    debug_assert!(f.is_surjective());
    let kernel = kernel(&f);
    Ok(Point { f, s, kernel })
}

/// `1_X` split by `1_X`; kernel `{0}`.
pub fn identity_point(x: Arc<FiniteAlgebra>) -> Point {
    let id = Homomorphism::identity(x);
    make_point(id.clone(), id).expect("identity is split")
}

/// `X → 1` split by `0`; kernel `X`.
pub fn terminal_point(x: Arc<FiniteAlgebra>) -> Point {
    let one = Arc::new(x.trivial_like());
    let f = Homomorphism::zero(x.clone(), one.clone()).expect("maps into 1 are homomorphisms");
    let s = Homomorphism::zero(one, x).expect("the zero map out of 1 is a homomorphism");
    make_point(f, s).expect("terminal map is split")
}

/// `(π_Y, ⟨0, 1⟩)` on `X × Y`; kernel `X × {0}`.
pub fn product_projection_point(x: &Arc<FiniteAlgebra>, y: &Arc<FiniteAlgebra>) -> Result<Point> {
    let p = product(x, y)?;
    let zero = Homomorphism::zero(y.clone(), x.clone())?;
    let s = p.pair(&zero, &Homomorphism::identity(y.clone()))?;
    make_point(p.second.clone(), s)
}

/// Result of the strongness test.
#[derive(Clone, Debug)]
pub struct Strongness {
    pub strong: bool,
    /// Subalgebra generated by the images of `k` and `s`; a proper one is
    /// the witness through which both factor.
    pub generated: Subalgebra,
}

/// `(k, s)` is jointly extremal-epimorphic iff their images generate `X`.
pub fn is_strong_point(p: &Point) -> Strongness {
    let mut seed: Vec<usize> = p.kernel.members().to_vec();
    seed.extend(p.s.image());
    let generated = subalgebra_generated(p.x(), &seed).expect("indices come from the point");
    Strongness {
        strong: generated.is_everything(),
        generated,
    }
}

/// A morphism `g : Z → Y` along which to pull a point back.
#[derive(Clone, Debug)]
pub struct Probe {
    pub g: Homomorphism,
}

/// All homomorphisms into `y` from the algebras of `catalog`, identity first
/// when `y` itself is not in the catalog.
pub fn probes_into(y: &Arc<FiniteAlgebra>, catalog: &[Arc<FiniteAlgebra>]) -> Vec<Probe> {
    let mut probes = vec![Probe {
        g: Homomorphism::identity(y.clone()),
    }];
    for z in catalog {
        for g in homomorphisms(z, y) {
            if g.is_identity() {
                continue;
            }
            probes.push(Probe { g });
        }
    }
    probes
}

/// Outcome of a bounded stably-strong check.
#[derive(Clone, Debug)]
pub enum StableStrongness {
    StrongUnderAllProbes { probes: usize },
    Counterexample { probe: usize, pulled_back: Box<Point>, witness: Subalgebra },
}

impl StableStrongness {
    pub fn holds(&self) -> bool {
        matches!(self, StableStrongness::StrongUnderAllProbes { .. })
    }
}

/// Pulls `p` back along every probe and tests strongness. Certifies only the
/// supplied probes.
pub fn is_stably_strong(p: &Point, probes: &[Probe]) -> Result<StableStrongness> {
    for (i, probe) in probes.iter().enumerate() {
        let (q, _) = pullback_point(p, &probe.g)?;
        let st = is_strong_point(&q);
        if !st.strong {
            return Ok(StableStrongness::Counterexample {
                probe: i,
                pulled_back: Box::new(q),
                witness: st.generated,
            });
        }
    }
    Ok(StableStrongness::StrongUnderAllProbes {
        probes: probes.len(),
    })
}

/// A commuting map of points: `f'g = hf`, `gs = s'h`.
#[derive(Clone, Debug)]
pub struct PointMorphism {
    source: Point,
    target: Point,
    g: Homomorphism,
    h: Homomorphism,
    induced_kernel_map: Homomorphism,
}

impl PointMorphism {
    pub fn new(source: Point, target: Point, g: Homomorphism, h: Homomorphism) -> Result<Self> {
        if !same_algebra(g.dom(), source.x())
            || !same_algebra(g.cod(), target.x())
            || !same_algebra(h.dom(), source.y())
            || !same_algebra(h.cod(), target.y())
        {
            return Err(Error::Mismatch("point morphism legs do not match the points".into()));
        }
        let x = source.x();
        if let Some(e) = (0..x.size()).find(|&e| target.f.apply(g.apply(e)) != h.apply(source.f.apply(e))) {
            return Err(Error::NotAPointMorphism(format!(
                "f'g ≠ hf at `{}`",
                x.label(e)
            )));
        }
        let y = source.y();
        if let Some(e) = (0..y.size()).find(|&e| g.apply(source.s.apply(e)) != target.s.apply(h.apply(e))) {
            return Err(Error::NotAPointMorphism(format!(
                "gs ≠ s'h at `{}`",
                y.label(e)
            )));
        }
        let map = source
            .kernel
            .members()
            .iter()
            .map(|&m| {
                target
                    .kernel
                    .position(g.apply(m))
                    .expect("g maps kernel into kernel once f'g = hf")
            })
            .collect();
        let induced_kernel_map = Homomorphism::new(
            source.k_algebra().clone(),
            target.k_algebra().clone(),
            map,
        )?;
        Ok(PointMorphism {
            source,
            target,
            g,
            h,
            induced_kernel_map,
        })
    }

    pub fn identity(p: &Point) -> Self {
        PointMorphism::new(
            p.clone(),
            p.clone(),
            Homomorphism::identity(p.x().clone()),
            Homomorphism::identity(p.y().clone()),
        )
        .expect("identity commutes")
    }

    pub fn source(&self) -> &Point {
        &self.source
    }

    pub fn target(&self) -> &Point {
        &self.target
    }

    pub fn g(&self) -> &Homomorphism {
        &self.g
    }

    pub fn h(&self) -> &Homomorphism {
        &self.h
    }

    pub fn induced_kernel_map(&self) -> &Homomorphism {
        &self.induced_kernel_map
    }
}

/// `(π_Z, ⟨1_Z, s∘g⟩)` on `Z ×_Y X`, with the comparison morphism `(π_X, g)`.
pub fn pullback_point(p: &Point, g: &Homomorphism) -> Result<(Point, PointMorphism)> {
    if !same_algebra(g.cod(), p.y()) {
        return Err(Error::Mismatch(format!(
            "probe lands in `{}`, point lies over `{}`",
            g.cod().name(),
            p.y().name()
        )));
    }
    let pb = pullback(&p.f, g)?;
    let z = g.dom();
    let section = pb.pair(&Homomorphism::identity(z.clone()), &p.s.after(g)?)?;
    let q = make_point(pb.to_z.clone(), section)?;
    // kernel is {(0, k(a))}
    debug_assert!(q
        .kernel
        .members()
        .iter()
        .all(|&m| pb.pairs[m].0 == z.zero() && p.kernel.contains(pb.pairs[m].1)));
    debug_assert_eq!(q.kernel.members().len(), p.kernel.members().len());
    let comparison = PointMorphism::new(q.clone(), p.clone(), pb.to_x.clone(), g.clone())?;
    Ok((q, comparison))
}

/// `(f × f', s × s')` over `Y × Y'`.
pub fn product_points(p1: &Point, p2: &Point) -> Result<Point> {
    let xs = product(p1.x(), p2.x())?;
    let ys = product(p1.y(), p2.y())?;
    let f = product_map(&p1.f, &p2.f, &xs, &ys)?;
    let s = product_map(&p1.s, &p2.s, &ys, &xs)?;
    make_point(f, s)
}

/// Equalizer of two parallel point morphisms, with its embedding `(e, w)`.
/// Asserts that the kernel of the result is the equalizer of the induced
/// kernel maps.
pub fn equalizer_points(m1: &PointMorphism, m2: &PointMorphism) -> Result<(Point, PointMorphism)> {
    let parallel = same_algebra(m1.source.x(), m2.source.x())
        && same_algebra(m1.source.y(), m2.source.y())
        && same_algebra(m1.target.x(), m2.target.x())
        && same_algebra(m1.target.y(), m2.target.y())
        && m1.source.f == m2.source.f
        && m1.source.s == m2.source.s
        && m1.target.f == m2.target.f
        && m1.target.s == m2.target.s;
    if !parallel {
        return Err(Error::Mismatch("equalizer of non-parallel point morphisms".into()));
    }
    let e = equalizer(&m1.g, &m2.g)?;
    let w = equalizer(&m1.h, &m2.h)?;
    let src = &m1.source;
    let phi_map = e
        .members()
        .iter()
        .map(|&x| w.position(src.f.apply(x)).expect("f maps E into W"))
        .collect();
    let sigma_map = w
        .members()
        .iter()
        .map(|&y| e.position(src.s.apply(y)).expect("s maps W into E"))
        .collect();
    let phi = Homomorphism::new(e.algebra().clone(), w.algebra().clone(), phi_map)?;
    let sigma = Homomorphism::new(w.algebra().clone(), e.algebra().clone(), sigma_map)?;
    let point = make_point(phi, sigma)?;

    let l = equalizer(&m1.induced_kernel_map, &m2.induced_kernel_map)?;
    let kernel_in_x: Vec<usize> = point.kernel.members().iter().map(|&i| e.members()[i]).collect();
    let l_in_x: Vec<usize> = l.members().iter().map(|&i| src.kernel.members()[i]).collect();
    if kernel_in_x != l_in_x {
        return Err(Error::Inconsistency(
            "kernel of the equalizer point differs from the equalizer of kernel maps".into(),
        ));
    }
    let embedding = PointMorphism::new(
        point.clone(),
        src.clone(),
        e.embedding().clone(),
        w.embedding().clone(),
    )?;
    Ok((point, embedding))
}

/// Every point over `y` whose carrier is drawn from `catalog`.
/// Sections are enumerated first, then `f` is completed with `f(s(y)) = y` fixed.
pub fn enumerate_points_over(y: &Arc<FiniteAlgebra>, catalog: &[Arc<FiniteAlgebra>]) -> Vec<Point> {
    let mut out = Vec::new();
    for x in catalog {
        if x.size() < y.size() || !x.signature().same_operations(y.signature()) {
            continue;
        }
        for s in homomorphisms(y, x) {
            if !s.is_injective() {
                continue;
            }
            let mut fixed = vec![None; x.size()];
            for e in 0..y.size() {
                fixed[s.apply(e)] = Some(e);
            }
            for f in homomorphisms_with(x, y, &fixed) {
                out.push(make_point(f, s.clone()).expect("section fixed by construction"));
            }
        }
    }
    out
}

/// All point morphisms `source → target`.
pub fn point_morphisms(source: &Point, target: &Point) -> Vec<PointMorphism> {
    let mut out = Vec::new();
    for h in homomorphisms(source.y(), target.y()) {
        let mut fixed = vec![None; source.x().size()];
        let mut clash = false;
        for e in 0..source.y().size() {
            let v = target.s.apply(h.apply(e));
            let slot = &mut fixed[source.s.apply(e)];
            match *slot {
                Some(old) if old != v => clash = true,
                _ => *slot = Some(v),
            }
        }
        if clash {
            continue;
        }
        for g in homomorphisms_with(source.x(), target.x(), &fixed) {
            if let Ok(m) = PointMorphism::new(source.clone(), target.clone(), g, h.clone()) {
                out.push(m);
            }
        }
    }
    out
}

/// Brute-force search for a carrier isomorphism `X → X'` commuting with
/// `f` and `s` (both points over the same base, up to relabelling).
pub fn points_isomorphic(p: &Point, q: &Point) -> bool {
    if !p.y().same_structure(q.y()) || p.x().size() != q.x().size() {
        return false;
    }
    let mut fixed = vec![None; p.x().size()];
    for e in 0..p.y().size() {
        fixed[p.s.apply(e)] = Some(q.s.apply(e));
    }
    homomorphisms_with(p.x(), q.x(), &fixed)
        .into_iter()
        .any(|g| g.is_injective() && (0..p.x().size()).all(|e| q.f.apply(g.apply(e)) == p.f.apply(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{EquationalClass, Signature};

    fn c2() -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::from_rows("C2", EquationalClass::UnitaryMagma, &[&[0, 1], &[1, 0]]).unwrap())
    }

    fn magma_x() -> Arc<FiniteAlgebra> {
        Arc::new(
            FiniteAlgebra::validated(
                "X",
                Signature::standard(EquationalClass::UnitaryMagma),
                vec!["0".into(), "a".into(), "b".into()],
                0,
                vec![0, 1, 2, 1, 0, 0, 2, 0, 0],
                vec![],
            )
            .unwrap(),
        )
    }

    fn magma_point() -> Point {
        let x = magma_x();
        let y = c2();
        let f = Homomorphism::new(x.clone(), y.clone(), vec![0, 1, 1]).unwrap();
        let s = Homomorphism::new(y, x, vec![0, 1]).unwrap();
        make_point(f, s).unwrap()
    }

    #[test]
    fn kernels_of_standard_points() {
        let c2 = c2();
        assert_eq!(identity_point(c2.clone()).kernel().members(), &[0]);
        assert_eq!(terminal_point(c2.clone()).kernel().members(), &[0, 1]);
        assert_eq!(magma_point().kernel().members(), &[0]);
    }

    #[test]
    fn non_section_is_rejected_with_witness() {
        let c2 = c2();
        let id = Homomorphism::identity(c2.clone());
        let zero = Homomorphism::zero(c2.clone(), c2.clone()).unwrap();
        match make_point(id, zero) {
            Err(Error::NotASection { witness }) => assert_eq!(witness, "1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn magma_point_is_not_strong() {
        let st = is_strong_point(&magma_point());
        assert!(!st.strong);
        assert_eq!(st.generated.members(), &[0, 1]);
    }

    #[test]
    fn strong_examples() {
        let c2 = c2();
        assert!(is_strong_point(&identity_point(c2.clone())).strong);
        assert!(is_strong_point(&product_projection_point(&c2, &c2).unwrap()).strong);
    }

    #[test]
    fn stably_strong_examples() {
        let p = magma_point();
        let probes = probes_into(p.y(), &[]);
        match is_stably_strong(&p, &probes).unwrap() {
            StableStrongness::Counterexample { probe, .. } => assert_eq!(probe, 0),
            other => panic!("{other:?}"),
        }
        let id = identity_point(c2());
        let probes = probes_into(id.y(), &[c2(), magma_x()]);
        assert!(is_stably_strong(&id, &probes).unwrap().holds());
    }

    #[test]
    fn pullback_along_identity_and_zero() {
        let p = magma_point();
        let (q, m) = pullback_point(&p, &Homomorphism::identity(p.y().clone())).unwrap();
        assert!(points_isomorphic(&q, &p));
        assert_eq!(m.g().dom().size(), 3);
        let one = Arc::new(p.y().trivial_like());
        let zero = Homomorphism::zero(one, p.y().clone()).unwrap();
        let (q, _) = pullback_point(&p, &zero).unwrap();
        assert_eq!(q.x().size(), p.kernel().members().len());
        assert_eq!(q.kernel().members().len(), q.x().size());
    }

    #[test]
    fn product_of_points() {
        let c2 = c2();
        let i = identity_point(c2.clone());
        let ii = product_points(&i, &i).unwrap();
        assert_eq!(ii.kernel().members().len(), 1);
        assert!(ii.f().is_injective());
        let t = terminal_point(c2.clone());
        let tp = product_points(&t, &i).unwrap();
        assert_eq!(tp.kernel().members().len(), 2);
        assert_eq!(tp.x().size(), 4);
    }

    #[test]
    fn equalizer_of_equal_morphisms_is_the_source() {
        let c2 = c2();
        let p = product_projection_point(&c2, &c2).unwrap();
        let id = PointMorphism::identity(&p);
        let (e, _) = equalizer_points(&id, &id).unwrap();
        assert!(points_isomorphic(&e, &p));
    }

    #[test]
    fn enumerate_points_over_c2() {
        let y = c2();
        let pts = enumerate_points_over(&y, std::slice::from_ref(&y));
        assert_eq!(pts.len(), 1);
        let pts = enumerate_points_over(&y, &[magma_x()]);
        let sections: Vec<usize> = pts.iter().map(|p| p.s().apply(1)).collect();
        assert!(sections.contains(&1) && sections.contains(&2));
        let one = Arc::new(y.trivial_like());
        let pts = enumerate_points_over(&one, &[y.clone(), magma_x()]);
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.kernel().is_everything()));
    }
}
