use std::sync::Arc;

use itertools::Itertools;

use super::{for_each_tuple, EquationalClass, FiniteAlgebra, Homomorphism, Signature};
use crate::error::{Error, Result};

/// Every `(0, +)` table of size `n` in the given class, with `0` as unit.
///
/// Supported classes: unitary magmas, monoids, commutative monoids and
/// groups. With `up_to_iso`, only tables equal to their canonical form
/// (lexicographically least over permutations fixing `0`) are kept.
/// Output order is lexicographic in the free cells.
pub fn enumerate_algebras(
    class: EquationalClass,
    n: usize,
    up_to_iso: bool,
) -> Result<Vec<FiniteAlgebra>> {
    if n == 0 {
        return Err(Error::Precondition("carrier size must be at least 1".into()));
    }
    let base = match class {
        EquationalClass::UnitaryMagma => EquationalClass::UnitaryMagma,
        EquationalClass::Monoid | EquationalClass::CommutativeMonoid | EquationalClass::Group => {
            EquationalClass::Monoid
        }
        other => {
            return Err(Error::Precondition(format!(
                "enumeration is not available for class {other}"
            )))
        }
    };
    let mut table = vec![usize::MAX; n * n];
    for x in 0..n {
        table[x] = x;
        table[x * n] = x;
    }
    let cells: Vec<usize> = (1..n)
        .flat_map(|i| (1..n).map(move |j| i * n + j))
        .collect();
    let mut tables = Vec::new();
    fill(&mut table, n, &cells, 0, base == EquationalClass::Monoid, &mut tables);

    let prefix = match class {
        EquationalClass::UnitaryMagma => "mag",
        EquationalClass::Monoid => "mon",
        EquationalClass::CommutativeMonoid => "cmon",
        EquationalClass::Group => "grp",
        _ => unreachable!(),
    };
    let mut out = Vec::new();
    for t in tables {
        if class == EquationalClass::CommutativeMonoid
            && !(0..n).all(|x| (0..n).all(|y| t[x * n + y] == t[y * n + x]))
        {
            continue;
        }
        if class == EquationalClass::Group
            && !(0..n).all(|x| (0..n).any(|y| t[x * n + y] == 0 && t[y * n + x] == 0))
        {
            continue;
        }
        if up_to_iso && canonical_table(&t, n) != t {
            continue;
        }
        let alg = FiniteAlgebra::new(
            format!("{prefix}{n}-{}", out.len()),
            Signature::standard(base),
            (0..n).map(|i| i.to_string()).collect(),
            0,
            t,
            vec![],
        )?;
        let alg = if class == base { alg } else { alg.with_class(class)? };
        out.push(alg);
    }
    Ok(out)
}

fn fill(
    table: &mut [usize],
    n: usize,
    cells: &[usize],
    depth: usize,
    associative: bool,
    out: &mut Vec<Vec<usize>>,
) {
    if depth == cells.len() {
        out.push(table.to_vec());
        return;
    }
    let cell = cells[depth];
    for v in 0..n {
        table[cell] = v;
        if !associative || partial_associative(table, n) {
            fill(table, n, cells, depth + 1, associative, out);
        }
    }
    table[cell] = usize::MAX;
}

fn partial_associative(t: &[usize], n: usize) -> bool {
    let get = |x: usize, y: usize| {
        let v = t[x * n + y];
        (v != usize::MAX).then_some(v)
    };
    for x in 1..n {
        for y in 1..n {
            let Some(xy) = get(x, y) else { continue };
            for z in 1..n {
                let (Some(l), Some(yz)) = (get(xy, z), get(y, z)) else { continue };
                if let Some(r) = get(x, yz) {
                    if l != r {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A bounded list of algebras together with a description of the bound.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub description: String,
    pub algebras: Vec<Arc<FiniteAlgebra>>,
}

impl Catalog {
    /// All algebras of the class with `1 ..= max_size` elements, up to isomorphism.
    pub fn enumerated(class: EquationalClass, max_size: usize) -> Result<Catalog> {
        let mut algebras = Vec::new();
        for n in 1..=max_size {
            algebras.extend(enumerate_algebras(class, n, true)?.into_iter().map(Arc::new));
        }
        Ok(Catalog {
            description: format!("{class} algebras of size ≤ {max_size}, up to isomorphism"),
            algebras,
        })
    }

    pub fn curated(description: impl Into<String>, algebras: Vec<Arc<FiniteAlgebra>>) -> Catalog {
        Catalog {
            description: description.into(),
            algebras,
        }
    }

    /// Members with at most `max_size` elements.
    pub fn truncated(&self, max_size: usize) -> Catalog {
        Catalog {
            description: format!("{} (size ≤ {max_size})", self.description),
            algebras: self.algebras.iter().filter(|a| a.size() <= max_size).cloned().collect(),
        }
    }
}

/// Lexicographically least relabelling of a binary table over permutations fixing `0`.
pub fn canonical_table(table: &[usize], n: usize) -> Vec<usize> {
    let mut best = table.to_vec();
    let mut candidate = vec![0; n * n];
    for perm in (1..n).permutations(n.saturating_sub(1)) {
        // p maps old labels to new labels
        let mut p = vec![0; n];
        for (i, &v) in perm.iter().enumerate() {
            p[i + 1] = v;
        }
        for x in 0..n {
            for y in 0..n {
                candidate[p[x] * n + p[y]] = p[table[x * n + y]];
            }
        }
        if candidate < best {
            best.copy_from_slice(&candidate);
        }
    }
    best
}

/// All homomorphisms `dom → cod`.
pub fn homomorphisms(dom: &Arc<FiniteAlgebra>, cod: &Arc<FiniteAlgebra>) -> Vec<Homomorphism> {
    homomorphisms_with(dom, cod, &vec![None; dom.size()])
}

/// All homomorphisms `dom → cod` agreeing with the partial assignment `fixed`.
/// Backtracks in index order, checking every operation tuple whose
/// arguments and result are already assigned.
pub fn homomorphisms_with(
    dom: &Arc<FiniteAlgebra>,
    cod: &Arc<FiniteAlgebra>,
    fixed: &[Option<usize>],
) -> Vec<Homomorphism> {
    if !dom.signature().same_operations(cod.signature()) || fixed.len() != dom.size() {
        return Vec::new();
    }
    let mut fixed = fixed.to_vec();
    match fixed[dom.zero()] {
        Some(v) if v != cod.zero() => return Vec::new(),
        _ => fixed[dom.zero()] = Some(cod.zero()),
    }
    let ops: Vec<_> = dom.operations().zip(cod.operations()).collect();
    let mut map = vec![usize::MAX; dom.size()];
    let mut out = Vec::new();
    search(dom, cod, &ops, &fixed, &mut map, 0, &mut out);
    out
}

type OpPair<'a> = ((&'a str, usize, &'a [usize]), (&'a str, usize, &'a [usize]));

fn search(
    dom: &Arc<FiniteAlgebra>,
    cod: &Arc<FiniteAlgebra>,
    ops: &[OpPair<'_>],
    fixed: &[Option<usize>],
    map: &mut Vec<usize>,
    x: usize,
    out: &mut Vec<Homomorphism>,
) {
    let n = dom.size();
    if x == n {
        out.push(Homomorphism::trusted(dom.clone(), cod.clone(), map.clone()));
        return;
    }
    let choices: Vec<usize> = match fixed[x] {
        Some(v) => vec![v],
        None => (0..cod.size()).collect(),
    };
    for v in choices {
        map[x] = v;
        if consistent(n, cod.size(), ops, map, x) {
            search(dom, cod, ops, fixed, map, x + 1, out);
        }
    }
    map[x] = usize::MAX;
}

/// Checks tuples over `0..=last` that mention `last` as an argument or result.
fn consistent(n: usize, m: usize, ops: &[OpPair<'_>], map: &[usize], last: usize) -> bool {
    let assigned = last + 1;
    let mut image = Vec::new();
    for &((_, arity, dt), (_, _, ct)) in ops {
        let mut ok = true;
        image.resize(arity, 0);
        for_each_tuple(assigned, arity, |args| {
            let r = dt[args.iter().fold(0, |acc, &a| acc * n + a)];
            if r > last || (r != last && !args.contains(&last)) {
                return true;
            }
            for (slot, &a) in image.iter_mut().zip(args) {
                *slot = map[a];
            }
            let expected = ct[image.iter().fold(0, |acc, &a| acc * m + a)];
            if map[r] != expected {
                ok = false;
                return false;
            }
            true
        });
        if !ok {
            return false;
        }
    }
    true
}
