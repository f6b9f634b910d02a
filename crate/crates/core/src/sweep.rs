//! Catalog-wide invariant sweeps.
//!
//! Work is split per point (and per pair of points) across the current rayon
//! pool; results are merged in enumeration order, so the summary does not
//! depend on the number of workers.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Catalog, ElementMap, EquationalClass, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::points::{
    enumerate_points_over, equalizer_points, is_stably_strong, is_strong_point, point_morphisms,
    probes_into, product_points, pullback_point, Point, Probe,
};
use crate::schreier::{
    compatibility_of, elementwise_decomposition, intrinsic_schreier_check,
    retraction_uniqueness_check, verify_is_axioms, verify_s_axioms, Homogeneity, Retraction,
    Verdict,
};
use crate::special::{extract_loop, heyting_catalog, is_group, is_s_special};
use crate::terms::{template_library, SplittingTemplate, DIRECT, TWISTED};

/// Largest catalog size accepted per class.
pub fn size_limit(class: EquationalClass) -> Option<usize> {
    match class {
        EquationalClass::UnitaryMagma => Some(3),
        EquationalClass::Monoid | EquationalClass::CommutativeMonoid => Some(4),
        EquationalClass::Group => Some(5),
        EquationalClass::HeytingSemilattice => Some(4),
        EquationalClass::Custom => None,
    }
}

/// Default catalog size per class.
pub fn default_size(class: EquationalClass) -> usize {
    match class {
        EquationalClass::UnitaryMagma => 3,
        _ => 4,
    }
}

/// Algebras of the class with at most `max_size` elements; Heyting
/// semilattices come from the curated list.
pub fn catalog_for(class: EquationalClass, max_size: usize) -> Result<Catalog> {
    let limit = size_limit(class)
        .ok_or_else(|| Error::Precondition(format!("no catalog is available for class {class}")))?;
    if max_size == 0 || max_size > limit {
        return Err(Error::Precondition(format!(
            "catalog size for {class} must be between 1 and {limit}; \
             larger catalogs are out of reach for exhaustive point enumeration"
        )));
    }
    match class {
        EquationalClass::HeytingSemilattice => Ok(heyting_catalog()?.truncated(max_size)),
        _ => Catalog::enumerated(class, max_size),
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub class: EquationalClass,
    pub max_size: usize,
    /// Probe algebras have at most this many elements.
    pub probe_size: usize,
    /// Products, morphisms and equalizers are checked between points whose
    /// carriers have at most this many elements.
    pub pair_size: usize,
}

impl SweepConfig {
    pub fn new(class: EquationalClass, max_size: usize, probe_size: usize) -> Self {
        SweepConfig {
            class,
            max_size,
            probe_size,
            pair_size: max_size,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Inv {
    RightAgreement,
    LeftAgreement,
    Soundness,
    Axioms,
    SchreierStrong,
    StablyStrong,
    Pullback,
    Uniqueness,
    Product,
    Compatibility,
    Equalizer,
    LoopRoundTrip,
    SpecialIffGroup,
}

const ALL_INVARIANTS: [Inv; 13] = [
    Inv::RightAgreement,
    Inv::LeftAgreement,
    Inv::Soundness,
    Inv::Axioms,
    Inv::SchreierStrong,
    Inv::StablyStrong,
    Inv::Pullback,
    Inv::Uniqueness,
    Inv::Product,
    Inv::Compatibility,
    Inv::Equalizer,
    Inv::LoopRoundTrip,
    Inv::SpecialIffGroup,
];

impl Inv {
    fn name(self) -> &'static str {
        match self {
            Inv::RightAgreement => "intrinsic (direct) agrees with right decomposition",
            Inv::LeftAgreement => "intrinsic (twisted) agrees with left decomposition",
            Inv::Soundness => "f ∘ [k, s] ∘ t = second projection",
            Inv::Axioms => "S1–S6 and iS1–iS6 hold for computed retractions",
            Inv::SchreierStrong => "Schreier ⇒ strong",
            Inv::StablyStrong => "Schreier ⇒ stably strong under probes",
            Inv::Pullback => "pullbacks of Schreier points are Schreier with q ∘ π_X",
            Inv::Uniqueness => "retraction is unique",
            Inv::Product => "products of Schreier points are Schreier with q × q'",
            Inv::Compatibility => "point morphisms respect retractions",
            Inv::Equalizer => "equalizers of Schreier points are Schreier with restricted q",
            Inv::LoopRoundTrip => "loop extraction ⟺ s-special, loop ↔ retraction",
            Inv::SpecialIffGroup => "s-special ⟺ group",
        }
    }
}

#[derive(Clone, Debug)]
struct Event {
    inv: Inv,
    /// `None` for a check that held, `Some(description)` for a violation.
    violation: Option<String>,
    skipped: bool,
}

fn check(inv: Inv, holds: bool, describe: impl FnOnce() -> String) -> Event {
    Event {
        inv,
        violation: (!holds).then(describe),
        skipped: false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub invariant: String,
    pub checked: u64,
    pub skipped: u64,
    pub violations: u64,
    pub first_counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub catalog: String,
    pub probe_catalog: String,
    pub algebras: usize,
    pub points: usize,
    pub right_homogeneous: usize,
    pub left_homogeneous: usize,
    pub strong: usize,
    pub first_non_strong: Option<String>,
    pub pair_size: usize,
    pub tallies: Vec<Tally>,
}

impl SweepSummary {
    pub fn violations(&self) -> u64 {
        self.tallies.iter().map(|t| t.violations).sum()
    }
}

/// Two verdicts agree when both fail or both succeed with the same table.
pub fn verdicts_agree(a: &Verdict, b: &Verdict) -> bool {
    match (a, b) {
        (Verdict::Schreier(x), Verdict::Schreier(y)) => x == y,
        (Verdict::NotSchreier(_), Verdict::NotSchreier(_)) => true,
        _ => false,
    }
}

struct Templates {
    direct: SplittingTemplate,
    twisted: SplittingTemplate,
}

struct PointResult {
    events: Vec<Event>,
    right: Option<Retraction>,
    left: bool,
    strong: bool,
}

fn sweep_point(p: &Point, probes: &[Probe], t: &Templates) -> Result<PointResult> {
    let mut events = Vec::new();
    let right = intrinsic_schreier_check(p, &t.direct)?;
    let left = intrinsic_schreier_check(p, &t.twisted)?;
    let right_oracle = elementwise_decomposition(p, Homogeneity::Right)?;
    let left_oracle = elementwise_decomposition(p, Homogeneity::Left)?;
    events.push(check(Inv::RightAgreement, verdicts_agree(&right, &right_oracle), || p.describe()));
    events.push(check(Inv::LeftAgreement, verdicts_agree(&left, &left_oracle), || p.describe()));

    for tpl in [&t.direct, &t.twisted] {
        let sound = (0..p.k_algebra().size()).all(|a| {
            (0..p.y().size()).all(|y| {
                tpl.fold_with(p.x(), a, y, |u| p.k().apply(u), |v| p.s().apply(v))
                    .map(|x| p.f().apply(x) == y)
                    .unwrap_or(false)
            })
        });
        events.push(check(Inv::Soundness, sound, || format!("{} with {}", p.describe(), tpl.name)));
    }

    let strong = is_strong_point(p).strong;
    for (verdict, tpl) in [(&right, &t.direct), (&left, &t.twisted)] {
        let Some(r) = verdict.retraction() else { continue };
        let mut axioms_ok = verify_is_axioms(r, tpl)?.all_passed();
        if tpl.name == DIRECT {
            axioms_ok &= verify_s_axioms(r).all_passed();
        }
        events.push(check(Inv::Axioms, axioms_ok, || format!("{} with {}", p.describe(), tpl.name)));
        events.push(check(Inv::SchreierStrong, strong, || p.describe()));
        match retraction_uniqueness_check(p, tpl) {
            Ok(u) => events.push(check(Inv::Uniqueness, u.unique(), || {
                format!("{}: {} retractions", p.describe(), u.retractions.len())
            })),
            Err(Error::WorkBound(_)) => events.push(Event {
                inv: Inv::Uniqueness,
                violation: None,
                skipped: true,
            }),
            Err(e) => return Err(e),
        }
    }

    if let Some(q) = right.retraction() {
        let stable = is_stably_strong(p, probes)?;
        events.push(check(Inv::StablyStrong, stable.holds(), || p.describe()));
        for probe in probes {
            let (pb, m) = pullback_point(p, &probe.g)?;
            let holds = match intrinsic_schreier_check(&pb, &t.direct)? {
                Verdict::Schreier(q2) => compatibility_of(&m, &q2, q).compatible,
                Verdict::NotSchreier(_) => false,
            };
            events.push(check(Inv::Pullback, holds, || {
                format!("{} along {}", p.describe(), probe.g.dom().name())
            }));
        }
    }

    Ok(PointResult {
        events,
        right: right.retraction().cloned(),
        left: left.is_schreier(),
        strong,
    })
}

/// Product of two Schreier points and its expected retraction `(q(x), q'(x'))`.
fn product_event(a: &Retraction, b: &Retraction, direct: &SplittingTemplate) -> Result<Event> {
    let (p1, p2) = (a.point(), b.point());
    let prod = product_points(p1, p2)?;
    let m = p2.x().size();
    let holds = match intrinsic_schreier_check(&prod, direct)? {
        Verdict::Schreier(r) => (0..prod.x().size()).all(|w| {
            let expected = a.apply_in_x(w / m) * m + b.apply_in_x(w % m);
            r.apply_in_x(w) == expected
        }),
        Verdict::NotSchreier(_) => false,
    };
    Ok(check(Inv::Product, holds, || format!("{} × {}", p1.describe(), p2.describe())))
}

fn morphism_events(a: &Retraction, b: &Retraction, direct: &SplittingTemplate) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    let morphisms = point_morphisms(a.point(), b.point());
    for m in &morphisms {
        events.push(check(Inv::Compatibility, compatibility_of(m, a, b).compatible, || {
            format!("{} → {}", a.point().describe(), b.point().describe())
        }));
    }
    for (i, m1) in morphisms.iter().enumerate() {
        for m2 in &morphisms[i + 1..] {
            let (e, emb) = equalizer_points(m1, m2)?;
            let holds = match intrinsic_schreier_check(&e, direct)? {
                Verdict::Schreier(qe) => compatibility_of(&emb, &qe, a).compatible,
                Verdict::NotSchreier(_) => false,
            };
            events.push(check(Inv::Equalizer, holds, || {
                format!("{} ⇉ {}", a.point().describe(), b.point().describe())
            }));
        }
    }
    Ok(events)
}

fn algebra_events(a: &Arc<FiniteAlgebra>, t: &Templates) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    for (hand, tpl) in [(Homogeneity::Right, &t.direct), (Homogeneity::Left, &t.twisted)] {
        let verdict = is_s_special(a, tpl)?;
        let extraction = extract_loop(a, hand)?;
        let holds = match (extraction.loop_structure(), verdict.retraction()) {
            (Some(l), Some(r)) => l.to_retraction()? == *r,
            (None, None) => true,
            _ => false,
        };
        events.push(check(Inv::LoopRoundTrip, holds, || format!("{} ({hand:?})", a.name())));
    }
    if a.is_associative() {
        let special = is_s_special(a, &t.direct)?.is_schreier();
        let group = is_group(a)?;
        events.push(check(Inv::SpecialIffGroup, special == group, || {
            format!("{}: s-special {special}, group {group}", a.name())
        }));
    }
    Ok(events)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    let catalog = catalog_for(cfg.class, cfg.max_size)?;
    let probe_catalog = catalog_for(cfg.class, cfg.probe_size)?;
    let t = Templates {
        direct: template_library(DIRECT)?,
        twisted: template_library(TWISTED)?,
    };

    let per_base: Vec<(Vec<Point>, Vec<Probe>)> = catalog
        .algebras
        .par_iter()
        .map(|y| (enumerate_points_over(y, &catalog.algebras), probes_into(y, &probe_catalog.algebras)))
        .collect();
    let jobs: Vec<(&Point, &[Probe])> = per_base
        .iter()
        .flat_map(|(pts, probes)| pts.iter().map(move |p| (p, probes.as_slice())))
        .collect();
    let results: Vec<PointResult> = jobs
        .par_iter()
        .map(|(p, probes)| sweep_point(p, probes, &t))
        .collect::<Result<_>>()?;

    let mut events: Vec<Event> = Vec::new();
    let mut first_non_strong = None;
    for ((p, _), r) in jobs.iter().zip(&results) {
        if !r.strong && first_non_strong.is_none() {
            first_non_strong = Some(p.describe());
        }
    }
    events.extend(results.iter().flat_map(|r| r.events.iter().cloned()));

    let schreier: Vec<&Retraction> = results
        .iter()
        .filter_map(|r| r.right.as_ref())
        .filter(|r| r.point().x().size() <= cfg.pair_size)
        .collect();
    let pair_events: Vec<Vec<Event>> = (0..schreier.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..schreier.len() {
                out.push(product_event(schreier[i], schreier[j], &t.direct)?);
                out.extend(morphism_events(schreier[i], schreier[j], &t.direct)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    events.extend(pair_events.into_iter().flatten());

    let alg_events: Vec<Vec<Event>> = catalog
        .algebras
        .par_iter()
        .map(|a| algebra_events(a, &t))
        .collect::<Result<_>>()?;
    events.extend(alg_events.into_iter().flatten());

    let tallies = ALL_INVARIANTS
        .iter()
        .filter(|&&inv| inv != Inv::SpecialIffGroup || cfg.class.is_within(EquationalClass::Monoid))
        .map(|&inv| {
            let mine = events.iter().filter(|e| e.inv == inv);
            let mut tally = Tally {
                invariant: inv.name().to_string(),
                checked: 0,
                skipped: 0,
                violations: 0,
                first_counterexample: None,
            };
            for e in mine {
                if e.skipped {
                    tally.skipped += 1;
                    continue;
                }
                tally.checked += 1;
                if let Some(v) = &e.violation {
                    tally.violations += 1;
                    tally.first_counterexample.get_or_insert_with(|| v.clone());
                }
            }
            tally
        })
        .collect();

    Ok(SweepSummary {
        catalog: catalog.description.clone(),
        probe_catalog: probe_catalog.description.clone(),
        algebras: catalog.algebras.len(),
        points: jobs.len(),
        right_homogeneous: results.iter().filter(|r| r.right.is_some()).count(),
        left_homogeneous: results.iter().filter(|r| r.left).count(),
        strong: results.iter().filter(|r| r.strong).count(),
        first_non_strong,
        pair_size: cfg.pair_size,
        tallies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monoid_sweep_size_two() {
        let s = run_sweep(&SweepConfig::new(EquationalClass::Monoid, 2, 2)).unwrap();
        assert_eq!(s.algebras, 3);
        assert_eq!(s.violations(), 0, "{:#?}", s.tallies);
        assert!(s.tallies.iter().all(|t| t.checked > 0 || t.skipped > 0), "{:#?}", s.tallies);
    }

    #[test]
    fn magma_sweep_finds_non_strong_point_over_c2() {
        let s = run_sweep(&SweepConfig::new(EquationalClass::UnitaryMagma, 3, 2)).unwrap();
        assert_eq!(s.violations(), 0, "{:#?}", s.tallies);
        assert!(s.first_non_strong.is_some());
        assert!(s.strong < s.points);
    }

    #[test]
    fn refuses_bad_bounds() {
        assert!(catalog_for(EquationalClass::Monoid, 0).is_err());
        assert!(catalog_for(EquationalClass::UnitaryMagma, 4).is_err());
        assert!(catalog_for(EquationalClass::Custom, 2).is_err());
    }

    #[test]
    fn sweep_is_independent_of_pool_size() {
        let cfg = SweepConfig::new(EquationalClass::Monoid, 3, 2);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_sweep(&cfg)).unwrap();
        let b = four.install(|| run_sweep(&cfg)).unwrap();
        assert_eq!(a, b);
    }
}
