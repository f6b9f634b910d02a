use std::sync::Arc;

use super::maps::same_algebra;
use super::{ElementMap, FiniteAlgebra, Homomorphism, Subalgebra};
use crate::error::{Error, Result};

/// Binary product with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub algebra: Arc<FiniteAlgebra>,
    pub first: Homomorphism,
    pub second: Homomorphism,
}

impl Product {
    /// Index of the pair `(a, b)`; the carrier is row-major over `A × B`.
    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.second.cod().size() + b
    }

    /// `⟨u, v⟩ : Z → A × B`.
    pub fn pair(&self, u: &Homomorphism, v: &Homomorphism) -> Result<Homomorphism> {
        if !same_algebra(u.dom(), v.dom())
            || !same_algebra(u.cod(), self.first.cod())
            || !same_algebra(v.cod(), self.second.cod())
        {
            return Err(Error::Mismatch("pairing legs do not match the product".into()));
        }
        let map = (0..u.dom().size())
            .map(|z| self.index(u.apply(z), v.apply(z)))
            .collect();
        Ok(Homomorphism::trusted(u.dom().clone(), self.algebra.clone(), map))
    }
}

fn check_signatures(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<()> {
    if a.signature().same_operations(b.signature()) {
        Ok(())
    } else {
        Err(Error::SignatureMismatch(format!(
            "`{}` and `{}` have different operations",
            a.name(),
            b.name()
        )))
    }
}

/// Componentwise product; the class is the meet of the two classes.
pub fn product(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Product> {
    check_signatures(a, b)?;
    let (n, m) = (a.size(), b.size());
    let elements = (0..n)
        .flat_map(|x| (0..m).map(move |y| (x, y)))
        .map(|(x, y)| format!("({},{})", a.label(x), b.label(y)))
        .collect();
    let mut sig = a.signature().clone();
    sig.class = a.class().meet(b.class());
    let mut tables = Vec::new();
    for ((_, arity, ta), (_, _, tb)) in a.operations().zip(b.operations()) {
        let size = (n * m).pow(arity as u32);
        let mut table = Vec::with_capacity(size);
        super::for_each_tuple(n * m, arity, |args| {
            let ia = args.iter().fold(0, |acc, &p| acc * n + p / m);
            let ib = args.iter().fold(0, |acc, &p| acc * m + p % m);
            table.push(ta[ia] * m + tb[ib]);
            true
        });
        tables.push(table);
    }
    let jt = tables.remove(0);
    let algebra = Arc::new(FiniteAlgebra::new(
        format!("{}×{}", a.name(), b.name()),
        sig,
        elements,
        a.zero() * m + b.zero(),
        jt,
        tables,
    )?);
    let first = Homomorphism::trusted(
        algebra.clone(),
        a.clone(),
        (0..n * m).map(|p| p / m).collect(),
    );
    let second = Homomorphism::trusted(
        algebra.clone(),
        b.clone(),
        (0..n * m).map(|p| p % m).collect(),
    );
    Ok(Product {
        algebra,
        first,
        second,
    })
}

/// `u × v : A × B → C × D` between two products.
pub fn product_map(
    u: &Homomorphism,
    v: &Homomorphism,
    source: &Product,
    target: &Product,
) -> Result<Homomorphism> {
    let left = u.after(&source.first)?;
    let right = v.after(&source.second)?;
    target.pair(&left, &right)
}

/// Least subalgebra containing `seed`, by saturation to a fixed point.
pub fn subalgebra_generated(a: &Arc<FiniteAlgebra>, seed: &[usize]) -> Result<Subalgebra> {
    let n = a.size();
    if let Some(&bad) = seed.iter().find(|&&x| x >= n) {
        return Err(Error::IndexOutOfRange { index: bad, size: n });
    }
    let mut inside = vec![false; n];
    let mut members = Vec::new();
    for &x in std::iter::once(&a.zero()).chain(seed) {
        if !std::mem::replace(&mut inside[x], true) {
            members.push(x);
        }
    }
    let ops: Vec<_> = a.operations().collect();
    loop {
        let mut fresh = Vec::new();
        for &(_, arity, table) in &ops {
            super::for_each_tuple(members.len(), arity, |t| {
                let idx = t.iter().fold(0, |acc, &i| acc * n + members[i]);
                let r = table[idx];
                if !inside[r] {
                    inside[r] = true;
                    fresh.push(r);
                }
                true
            });
        }
        if fresh.is_empty() {
            break;
        }
        members.extend(fresh);
    }
    Subalgebra::from_members(a.clone(), members)
}

/// Preimage of the constant.
pub fn kernel(f: &Homomorphism) -> Subalgebra {
    let zero = f.cod().zero();
    let members = (0..f.dom().size()).filter(|&x| f.apply(x) == zero).collect();
    Subalgebra::from_members(f.dom().clone(), members).expect("kernels are subalgebras")
}

/// `{ x : g(x) = h(x) }`.
pub fn equalizer(g: &Homomorphism, h: &Homomorphism) -> Result<Subalgebra> {
    if !same_algebra(g.dom(), h.dom()) || !same_algebra(g.cod(), h.cod()) {
        return Err(Error::Mismatch("equalizer of non-parallel maps".into()));
    }
    let members = (0..g.dom().size())
        .filter(|&x| g.apply(x) == h.apply(x))
        .collect();
    Subalgebra::from_members(g.dom().clone(), members)
}

/// `Z ×_Y X` for `f : X → Y` and `g : Z → Y`, materialized inside `Z × X`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub algebra: Arc<FiniteAlgebra>,
    /// Projection to `Z`.
    pub to_z: Homomorphism,
    /// Projection to `X`.
    pub to_x: Homomorphism,
    /// Pairs `(z, x)` in carrier order.
    pub pairs: Vec<(usize, usize)>,
}

impl Pullback {
    pub fn index_of(&self, z: usize, x: usize) -> Option<usize> {
        self.pairs.binary_search(&(z, x)).ok()
    }

    /// Universal map from a commuting cospan cone `u : W → Z`, `v : W → X`.
    pub fn pair(&self, u: &Homomorphism, v: &Homomorphism) -> Result<Homomorphism> {
        if !same_algebra(u.dom(), v.dom()) {
            return Err(Error::Mismatch("pairing legs have different domains".into()));
        }
        let map = (0..u.dom().size())
            .map(|w| {
                self.index_of(u.apply(w), v.apply(w)).ok_or_else(|| {
                    Error::Precondition(format!(
                        "cone does not commute at `{}`",
                        u.dom().label(w)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism::trusted(u.dom().clone(), self.algebra.clone(), map))
    }
}

pub fn pullback(f: &Homomorphism, g: &Homomorphism) -> Result<Pullback> {
    if !same_algebra(f.cod(), g.cod()) {
        return Err(Error::Mismatch(format!(
            "pullback needs a common codomain (`{}` vs `{}`)",
            f.cod().name(),
            g.cod().name()
        )));
    }
    let x = f.dom();
    let z = g.dom();
    let prod = product(z, x)?;
    let members: Vec<usize> = (0..z.size())
        .flat_map(|zi| (0..x.size()).map(move |xi| (zi, xi)))
        .filter(|&(zi, xi)| g.apply(zi) == f.apply(xi))
        .map(|(zi, xi)| prod.index(zi, xi))
        .collect();
    let sub = Subalgebra::from_members(prod.algebra.clone(), members)?;
    let algebra = Arc::new(
        (**sub.algebra())
            .clone()
            .renamed(format!("{}×_{}{}", z.name(), f.cod().name(), x.name())),
    );
    let pairs: Vec<(usize, usize)> = sub
        .members()
        .iter()
        .map(|&p| (p / x.size(), p % x.size()))
        .collect();
    let to_z = Homomorphism::trusted(algebra.clone(), z.clone(), pairs.iter().map(|p| p.0).collect());
    let to_x = Homomorphism::trusted(algebra.clone(), x.clone(), pairs.iter().map(|p| p.1).collect());
    Ok(Pullback {
        algebra,
        to_z,
        to_x,
        pairs,
    })
}
