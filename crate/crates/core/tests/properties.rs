use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::sample::Index;

use schreier::algebra::{
    equalizer, homomorphisms, kernel, product, pullback, subalgebra_generated, validate_algebra, Catalog,
    ElementMap, EquationalClass, FiniteAlgebra, Homomorphism, SetMap,
};
use schreier::files::{parse_algebra, AlgebraFile, Source};
use schreier::points::{
    enumerate_points_over, is_stably_strong, is_strong_point, points_isomorphic, probes_into, pullback_point,
    Point,
};
use schreier::schreier::{intrinsic_schreier_check, Homogeneity};
use schreier::special::{builtin_algebra, heyting_catalog, LoopStructure};
use schreier::terms::{
    cokleisli_compose, counit, evaluate_term, extend, template_library, verify_splitting_identity, Slot,
    SplittingTemplate, Term,
};

fn monoids() -> &'static [Arc<FiniteAlgebra>] {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    &CAT.get_or_init(|| Catalog::enumerated(EquationalClass::Monoid, 3).unwrap())
        .algebras
}

fn groups() -> &'static [Arc<FiniteAlgebra>] {
    static GROUPS: OnceLock<Vec<Arc<FiniteAlgebra>>> = OnceLock::new();
    GROUPS.get_or_init(|| ["c2", "c4", "klein", "s3"].map(|n| builtin_algebra(n).unwrap()).to_vec())
}

fn points() -> &'static [Point] {
    static POINTS: OnceLock<Vec<Point>> = OnceLock::new();
    POINTS.get_or_init(|| monoids().iter().flat_map(|y| enumerate_points_over(y, monoids())).collect())
}

fn pick<T>(items: &[T], i: Index) -> &T {
    &items[i.index(items.len())]
}

fn homs(dom: &Arc<FiniteAlgebra>, cod: &Arc<FiniteAlgebra>) -> Vec<Homomorphism> {
    homomorphisms(dom, cod)
}

fn closed(a: &FiniteAlgebra, members: &[usize]) -> bool {
    members.contains(&a.zero())
        && members
            .iter()
            .all(|&x| members.iter().all(|&y| members.contains(&a.add(x, y))))
}

fn term(vars: usize) -> impl Strategy<Value = Term<usize>> {
    let leaf = prop_oneof![(0..vars).prop_map(Term::Leaf), Just(Term::Constant)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Term::add(l, r))
    })
}

fn shape() -> impl Strategy<Value = Term<Slot>> {
    let leaf = prop_oneof![Just(Term::Leaf(Slot::A)), Just(Term::Leaf(Slot::B)), Just(Term::Constant)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Term::add(l, r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generation_is_idempotent_and_minimal(a in any::<Index>(), seed in prop::collection::vec(any::<Index>(), 0..3)) {
        let a = pick(monoids(), a);
        let seed: Vec<usize> = seed.iter().map(|i| i.index(a.size())).collect();
        let s = subalgebra_generated(a, &seed).unwrap();
        prop_assert!(closed(a, s.members()));
        prop_assert!(seed.iter().all(|x| s.contains(*x)));
        let again = subalgebra_generated(a, s.members()).unwrap();
        prop_assert_eq!(again.members(), s.members());
        // minimal: equal to the naive fixed point grown from the seed
        let mut naive: Vec<usize> = seed.clone();
        naive.push(a.zero());
        naive.sort_unstable();
        naive.dedup();
        loop {
            let next: Vec<usize> = (0..a.size())
                .filter(|&z| naive.contains(&z) || naive.iter().any(|&x| naive.iter().any(|&y| a.add(x, y) == z)))
                .collect();
            if next.len() == naive.len() {
                break;
            }
            naive = next;
        }
        prop_assert_eq!(s.members(), &naive[..]);
    }

    #[test]
    fn kernels_are_subalgebras_killed_by_f(d in any::<Index>(), c in any::<Index>(), h in any::<Index>()) {
        let (dom, cod) = (pick(monoids(), d), pick(monoids(), c));
        let hs = homs(dom, cod);
        let f = pick(&hs, h);
        let k = kernel(f);
        prop_assert!(closed(dom, k.members()));
        let fk = f.after(k.embedding()).unwrap();
        prop_assert!(fk.table().iter().all(|&v| v == cod.zero()));
    }

    #[test]
    fn limits_are_algebras(
        a in any::<Index>(), b in any::<Index>(), c in any::<Index>(),
        g in any::<Index>(), h in any::<Index>(), g2 in any::<Index>(),
    ) {
        let (a, b, c) = (pick(monoids(), a), pick(monoids(), b), pick(monoids(), c));
        prop_assert!(validate_algebra(&product(a, b).unwrap().algebra).is_ok());
        let (ga, gb) = (homs(a, c), homs(b, c));
        let (g, h) = (pick(&ga, g), pick(&gb, h));
        prop_assert!(validate_algebra(&pullback(g, h).unwrap().algebra).is_ok());
        let e = equalizer(g, pick(&ga, g2)).unwrap();
        prop_assert!(validate_algebra(e.algebra()).is_ok());
    }

    #[test]
    fn extension_is_a_homomorphism(
        m in any::<Index>(), n in any::<Index>(), h in any::<Index>(),
        w in term(3), vals in prop::collection::vec(any::<Index>(), 3),
    ) {
        let (m, n) = (pick(monoids(), m), pick(monoids(), n));
        let hs = homs(m, n);
        let h = pick(&hs, h);
        let vars = Arc::new(FiniteAlgebra::from_rows("V", EquationalClass::UnitaryMagma, &[&[0, 1, 2], &[1, 0, 0], &[2, 0, 0]]).unwrap());
        let fbar = SetMap::new(vars, m.clone(), vals.iter().map(|i| i.index(m.size())).collect()).unwrap();
        let direct = evaluate_term(m, &w, fbar.table()).unwrap();
        prop_assert_eq!(extend(&fbar, &w).unwrap(), direct);
        let pushed = h.as_set_map().after(&fbar).unwrap();
        prop_assert_eq!(extend(&pushed, &w).unwrap(), h.apply(direct));
    }

    #[test]
    fn cokleisli_laws(
        a in any::<Index>(), b in any::<Index>(), c in any::<Index>(), d in any::<Index>(),
        t1 in prop::collection::vec(any::<Index>(), 3), t2 in prop::collection::vec(any::<Index>(), 3),
        t3 in prop::collection::vec(any::<Index>(), 3),
    ) {
        let (a, b, c, d) = (pick(monoids(), a), pick(monoids(), b), pick(monoids(), c), pick(monoids(), d));
        let map = |dom: &Arc<FiniteAlgebra>, cod: &Arc<FiniteAlgebra>, t: &[Index]| {
            SetMap::new(dom.clone(), cod.clone(), (0..dom.size()).map(|i| t[i].index(cod.size())).collect()).unwrap()
        };
        let (f, g, h) = (map(a, b, &t1), map(b, c, &t2), map(c, d, &t3));
        prop_assert_eq!(cokleisli_compose(&counit(a.clone()), &f).unwrap(), f.clone());
        prop_assert_eq!(cokleisli_compose(&f, &counit(b.clone())).unwrap(), f.clone());
        let left = cokleisli_compose(&cokleisli_compose(&f, &g).unwrap(), &h).unwrap();
        let right = cokleisli_compose(&f, &cokleisli_compose(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn valid_templates_are_natural_and_project(
        s in shape(), a in any::<Index>(), b in any::<Index>(),
        a2 in any::<Index>(), b2 in any::<Index>(), u in any::<Index>(), v in any::<Index>(),
        x in any::<Index>(), y in any::<Index>(),
    ) {
        let t = SplittingTemplate::new("random", EquationalClass::UnitaryMagma, s);
        let (a, b, a2, b2) = (pick(monoids(), a), pick(monoids(), b), pick(monoids(), a2), pick(monoids(), b2));
        let (x, y) = (x.index(a.size()), y.index(b.size()));
        let p2 = product(a2, b2).unwrap();
        let (us, vs) = (homs(a, a2), homs(b, b2));
        let (u, v) = (pick(&us, u), pick(&vs, v));
        // (u + v) ∘ t = t ∘ P(u × v), folded into A' × B'
        let lhs = t.fold_with(&p2.algebra, x, y, |e| p2.index(u.apply(e), a2.zero()), |e| p2.index(b2.zero(), v.apply(e))).unwrap();
        let rhs = t.fold_with(&p2.algebra, u.apply(x), v.apply(y), |e| p2.index(e, a2.zero()), |e| p2.index(b2.zero(), e)).unwrap();
        prop_assert_eq!(lhs, rhs);
        if verify_splitting_identity(&t, a, b).unwrap().is_ok() {
            prop_assert_eq!(t.fold_with(a, x, y, |e| e, |_| a.zero()).unwrap(), x);
            prop_assert_eq!(t.fold_with(b, x, y, |_| b.zero(), |e| e).unwrap(), y);
        }
    }

    #[test]
    fn group_templates_project(a in any::<Index>(), b in any::<Index>(), x in any::<Index>(), y in any::<Index>()) {
        let t = template_library("group-conjugation").unwrap();
        let (a, b) = (pick(groups(), a), pick(groups(), b));
        let (x, y) = (x.index(a.size()), y.index(b.size()));
        prop_assert_eq!(t.fold_with(a, x, y, |e| e, |_| a.zero()).unwrap(), x);
        prop_assert_eq!(t.fold_with(b, x, y, |_| b.zero(), |e| e).unwrap(), y);
    }

    #[test]
    fn decomposition_lands_over_y(p in any::<Index>(), side in any::<bool>(), a in any::<Index>(), y in any::<Index>()) {
        let p = pick(points(), p);
        let t = template_library(if side { "direct" } else { "twisted" }).unwrap();
        let (a, y) = (a.index(p.k_algebra().size()), y.index(p.y().size()));
        let x = t.fold_with(p.x(), a, y, |u| p.k().apply(u), |v| p.s().apply(v)).unwrap();
        prop_assert_eq!(p.f().apply(x), y);
    }

    #[test]
    fn pullbacks_compose(p in any::<Index>(), z in any::<Index>(), w in any::<Index>(), g in any::<Index>(), g2 in any::<Index>()) {
        let p = pick(points(), p);
        let (z, w) = (pick(monoids(), z), pick(monoids(), w));
        let (gs, g2s) = (homs(z, p.y()), homs(w, z));
        let (g, g2) = (pick(&gs, g), pick(&g2s, g2));
        let (once, cmp) = pullback_point(p, g).unwrap();
        // both squares of the comparison commute
        for e in 0..once.x().size() {
            prop_assert_eq!(p.f().apply(cmp.g().apply(e)), cmp.h().apply(once.f().apply(e)));
        }
        for e in 0..once.y().size() {
            prop_assert_eq!(cmp.g().apply(once.s().apply(e)), p.s().apply(cmp.h().apply(e)));
        }
        let (twice, _) = pullback_point(&once, g2).unwrap();
        let (direct, _) = pullback_point(p, &g.after(g2).unwrap()).unwrap();
        prop_assert!(points_isomorphic(&twice, &direct));
    }

    #[test]
    fn schreier_points_are_stably_strong(p in any::<Index>(), side in any::<bool>()) {
        let p = pick(points(), p);
        let side = if side { Homogeneity::Right } else { Homogeneity::Left };
        let t = template_library(if side == Homogeneity::Right { "direct" } else { "twisted" }).unwrap();
        if intrinsic_schreier_check(p, &t).unwrap().is_schreier() {
            prop_assert!(is_strong_point(p).strong);
            let probes = probes_into(p.y(), monoids());
            prop_assert!(is_stably_strong(p, &probes).unwrap().holds());
        }
    }

    #[test]
    fn loop_tables_are_accepted_iff_lawful(a in any::<Index>(), cells in prop::collection::vec(any::<Index>(), 16), left in any::<bool>()) {
        let mut pool: Vec<Arc<FiniteAlgebra>> = monoids().to_vec();
        pool.extend(groups().iter().take(3).cloned());
        let a = pick(&pool, a);
        let n = a.size();
        let hand = if left { Homogeneity::Left } else { Homogeneity::Right };
        // half the time use the genuine division table when it exists
        let division: Option<Vec<usize>> = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                (0..n).find(|&d| if left { a.add(x, d) == y } else { a.add(d, y) == x })
            })
            .collect();
        let table: Vec<usize> = match division {
            Some(d) if cells[0].index(2) == 0 => d,
            _ => (0..n * n).map(|i| cells[i].index(n)).collect(),
        };
        let op = |x: usize, y: usize| table[x * n + y];
        let lawful = (0..n).all(|x| (0..n).all(|y| if left {
            a.add(x, op(x, y)) == y && op(x, a.add(x, y)) == y
        } else {
            a.add(op(x, y), y) == x && op(a.add(x, y), y) == x
        }));
        prop_assert_eq!(LoopStructure::new(a.clone(), hand, table.clone()).is_ok(), lawful);
    }

    #[test]
    fn algebra_files_round_trip(i in any::<Index>()) {
        let mut pool: Vec<Arc<FiniteAlgebra>> = Catalog::enumerated(EquationalClass::UnitaryMagma, 2).unwrap().algebras;
        pool.extend(monoids().iter().cloned());
        pool.extend(groups().iter().cloned());
        pool.extend(heyting_catalog().unwrap().algebras);
        let a = pick(&pool, i);
        let text = serde_json::to_string_pretty(&AlgebraFile::from_algebra(a)).unwrap();
        let back = parse_algebra(&Source::inline("round-trip", text)).unwrap();
        prop_assert!(back.same_structure(a));
        prop_assert_eq!(back.elements(), a.elements());
        prop_assert_eq!(back.class(), a.class());
        prop_assert_eq!(back.name(), a.name());
    }

    #[test]
    fn reports_are_deterministic(i in any::<Index>(), machine in any::<bool>()) {
        let names = ["c2", "c2-diagonal", "mag-counterexample-point", "heyting-3-chain", "m2"];
        let name = *pick(&names, i);
        let fmt = if machine { "machine" } else { "human" };
        let args = ["schreier", "--format", fmt, "examples", name];
        prop_assert_eq!(schreier::cli::run_args(args), schreier::cli::run_args(args));
    }
}
