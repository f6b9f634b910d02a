//! Terms over a signature, formal coproduct words, splitting templates and
//! imaginary morphisms.
//!
//! An imaginary morphism `X ⇸ Y` is a homomorphism out of the free algebra
//! on `X`; it is stored as its values on one-letter words (a [`SetMap`]) and
//! extended to arbitrary words by term evaluation.
//!
//! A natural imaginary splitting of `A + B → A × B` is represented by a
//! fixed term shape with two leaf kinds, [`Slot::A`] and [`Slot::B`]. Since
//! homomorphisms commute with term evaluation, such shapes are natural
//! automatically; coproduct elements are never normalized, only folded.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{ElementMap, EquationalClass, FiniteAlgebra, Homomorphism, SetMap, INVERSE};
use crate::error::{Error, Result};

/// A term tree. Leaves carry `L`: variable indices, template slots, or
/// tagged coproduct generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term<L> {
    Leaf(L),
    Constant,
    Apply(String, Vec<Term<L>>),
}

impl<L> Term<L> {
    pub fn leaf(l: L) -> Self {
        Term::Leaf(l)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(lhs: Term<L>, rhs: Term<L>) -> Self {
        Term::Apply("+".into(), vec![lhs, rhs])
    }

    pub fn inv(t: Term<L>) -> Self {
        Term::Apply(INVERSE.into(), vec![t])
    }

    pub fn map_leaves<M>(&self, f: &impl Fn(&L) -> M) -> Term<M> {
        match self {
            Term::Leaf(l) => Term::Leaf(f(l)),
            Term::Constant => Term::Constant,
            Term::Apply(s, args) => Term::Apply(s.clone(), args.iter().map(|a| a.map_leaves(f)).collect()),
        }
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a L>) {
        match self {
            Term::Leaf(l) => out.push(l),
            Term::Constant => {}
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_leaves(out)),
        }
    }

    /// Structural fold through the tables of `alg`.
    pub fn fold_in(
        &self,
        alg: &FiniteAlgebra,
        leaf: &mut impl FnMut(&L) -> Result<usize>,
    ) -> Result<usize> {
        match self {
            Term::Leaf(l) => {
                let v = leaf(l)?;
                if v >= alg.size() {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        size: alg.size(),
                    });
                }
                Ok(v)
            }
            Term::Constant => Ok(alg.zero()),
            Term::Apply(symbol, args) => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(a.fold_in(alg, leaf)?);
                }
                alg.apply(symbol, &values)
            }
        }
    }

    /// Checks arities against the signature of `alg`.
    pub fn check_arity(&self, alg: &FiniteAlgebra) -> Result<()> {
        if let Term::Apply(symbol, args) = self {
            let arity = if symbol == "+" || *symbol == alg.signature().jt_operation {
                2
            } else {
                alg.extra(symbol)
                    .map(|op| op.arity)
                    .ok_or_else(|| Error::Term(format!("foreign operation symbol `{symbol}`")))?
            };
            if arity != args.len() {
                return Err(Error::Term(format!(
                    "`{symbol}` applied to {} arguments, expected {arity}",
                    args.len()
                )));
            }
            args.iter().try_for_each(|a| a.check_arity(alg))?;
        }
        Ok(())
    }

    pub fn uses_symbol(&self, symbol: &str) -> bool {
        match self {
            Term::Apply(s, args) => s == symbol || args.iter().any(|a| a.uses_symbol(symbol)),
            _ => false,
        }
    }
}

impl<L: fmt::Display> fmt::Display for Term<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Leaf(l) => write!(f, "{l}"),
            Term::Constant => f.write_str("0"),
            Term::Apply(s, args) => {
                write!(f, "({s}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Evaluates a term with variables `x_i := assignment[i]`.
pub fn evaluate_term(alg: &FiniteAlgebra, term: &Term<usize>, assignment: &[usize]) -> Result<usize> {
    term.fold_in(alg, &mut |&v| {
        assignment
            .get(v)
            .copied()
            .ok_or_else(|| Error::Term(format!("variable x{v} is unassigned")))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Slot {
    A,
    B,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::A => "SlotA",
            Slot::B => "SlotB",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A generator of `A + B`: `(Left, a)` is `ι_A(a)`, `(Right, b)` is `ι_B(b)`.
pub type Generator = (Side, usize);

/// A formal element of a coproduct, only ever folded through a copairing.
pub type CoproductWord = Term<Generator>;

/// Replaces each left leaf by `left(a)` and each right leaf by `right(b)`,
/// then evaluates in the common codomain.
pub fn fold_coproduct(
    word: &CoproductWord,
    left: &impl ElementMap,
    right: &impl ElementMap,
) -> Result<usize> {
    let cod = left.cod();
    if !std::sync::Arc::ptr_eq(cod, right.cod()) && **cod != **right.cod() {
        return Err(Error::Mismatch("copairing legs must share a codomain".into()));
    }
    word.fold_in(cod, &mut |&(side, i)| {
        let (leg, name): (&dyn Fn(usize) -> usize, usize) = match side {
            Side::Left => (&|x| left.apply(x), left.dom().size()),
            Side::Right => (&|x| right.apply(x), right.dom().size()),
        };
        if i >= name {
            return Err(Error::IndexOutOfRange { index: i, size: name });
        }
        Ok(leg(i))
    })
}

/// A natural imaginary splitting `t`, given by one term shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplittingTemplate {
    pub name: String,
    pub required_class: EquationalClass,
    pub shape: Term<Slot>,
}

impl SplittingTemplate {
    pub fn new(name: impl Into<String>, required_class: EquationalClass, shape: Term<Slot>) -> Self {
        SplittingTemplate {
            name: name.into(),
            required_class,
            shape,
        }
    }

    /// `t_{A,B}([(a, b)])` as a formal word.
    pub fn instantiate(&self, a: usize, b: usize) -> CoproductWord {
        self.shape.map_leaves(&|slot| match slot {
            Slot::A => (Side::Left, a),
            Slot::B => (Side::Right, b),
        })
    }

    /// Folds `t(a, b)` through `[left, right]` without materializing the word.
    /// Both legs must land in `cod`.
    #[inline]
    pub fn fold_with(
        &self,
        cod: &FiniteAlgebra,
        a: usize,
        b: usize,
        left: impl Fn(usize) -> usize,
        right: impl Fn(usize) -> usize,
    ) -> Result<usize> {
        self.shape.fold_in(cod, &mut |slot| {
            Ok(match slot {
                Slot::A => left(a),
                Slot::B => right(b),
            })
        })
    }

    /// Rejects algebras outside the template's class or missing a symbol the shape uses.
    pub fn check_algebra(&self, alg: &FiniteAlgebra) -> Result<()> {
        if !alg.class().is_within(self.required_class) {
            return Err(Error::ClassMismatch(format!(
                "template `{}` requires class {}, but `{}` is {}",
                self.name,
                self.required_class,
                alg.name(),
                alg.class()
            )));
        }
        self.shape.check_arity(alg)
    }
}

impl fmt::Display for SplittingTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {}", self.name, self.required_class, self.shape)
    }
}

pub const DIRECT: &str = "direct";
pub const TWISTED: &str = "twisted";
pub const GROUP_CONJUGATION: &str = "group-conjugation";

/// The named templates: `direct = A + B`, `twisted = B + A`, and the group
/// splitting `(a, b) ↦ a⁻¹ b a²` written `(A⁻¹ + B) + (A + A)`.
pub fn template_library(name: &str) -> Result<SplittingTemplate> {
    let a = || Term::Leaf(Slot::A);
    let b = || Term::Leaf(Slot::B);
    match name {
        DIRECT => Ok(SplittingTemplate::new(DIRECT, EquationalClass::UnitaryMagma, Term::add(a(), b()))),
        TWISTED => Ok(SplittingTemplate::new(TWISTED, EquationalClass::UnitaryMagma, Term::add(b(), a()))),
        GROUP_CONJUGATION => Ok(SplittingTemplate::new(
            GROUP_CONJUGATION,
            EquationalClass::Group,
            Term::add(Term::add(Term::inv(a()), b()), Term::add(a(), a())),
        )),
        other => Err(Error::Unknown {
            kind: "template",
            name: other.to_string(),
        }),
    }
}

/// Parses a prefix expression such as `(+ (inv SlotA) SlotB)`. Atoms are
/// `SlotA`, `SlotB` and `0` (the constant); any other head is an operation symbol.
pub fn parse_shape(src: &str) -> Result<Term<Slot>> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let term = parse_expr(src, &tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(shape_error(src, tokens[pos].0, "trailing input"));
    }
    Ok(term)
}

impl FromStr for Term<Slot> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_shape(s)
    }
}

fn tokenize(src: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in src.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &src[s..i]));
            }
            if !c.is_whitespace() {
                out.push((i, &src[i..i + 1]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &src[s..]));
    }
    out
}

fn shape_error(src: &str, offset: usize, message: &str) -> Error {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
    Error::Parse {
        source_name: "shape".into(),
        line,
        column,
        message: message.into(),
    }
}

fn parse_expr(src: &str, tokens: &[(usize, &str)], pos: &mut usize) -> Result<Term<Slot>> {
    let Some(&(offset, tok)) = tokens.get(*pos) else {
        return Err(shape_error(src, src.len(), "unexpected end of input"));
    };
    *pos += 1;
    match tok {
        "SlotA" => Ok(Term::Leaf(Slot::A)),
        "SlotB" => Ok(Term::Leaf(Slot::B)),
        "0" => Ok(Term::Constant),
        ")" => Err(shape_error(src, offset, "unexpected `)`")),
        "(" => {
            let Some(&(head_off, head)) = tokens.get(*pos) else {
                return Err(shape_error(src, src.len(), "unexpected end of input"));
            };
            if head == "(" || head == ")" {
                return Err(shape_error(src, head_off, "expected an operation symbol"));
            }
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(&(_, ")")) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_expr(src, tokens, pos)?),
                    None => return Err(shape_error(src, src.len(), "missing `)`")),
                }
            }
            if args.is_empty() {
                return Err(shape_error(src, head_off, "operation without arguments"));
            }
            Ok(Term::Apply(head.to_string(), args))
        }
        other => Err(shape_error(
            src,
            offset,
            &format!("unknown atom `{other}` (expected SlotA, SlotB or 0)"),
        )),
    }
}

/// Result of checking `r ∘ t = ε` on all pairs of `A × B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub pairs_checked: usize,
    /// `(a, b, recovered_a, recovered_b)` for each failing pair.
    pub failures: Vec<(usize, usize, usize, usize)>,
    /// Elements `a` of `A` for which `t_{A,0}` does not act as the counit.
    pub degenerate_failures: Vec<usize>,
}

impl SplittingReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty() && self.degenerate_failures.is_empty()
    }
}

/// Folds `t(a, b)` through `⟨1,0⟩ : A → A×B` and `⟨0,1⟩ : B → A×B` for every
/// pair and checks that `(a, b)` comes back; also checks that `t_{A,0}`
/// acts as the counit of `A`.
pub fn verify_splitting_identity(
    t: &SplittingTemplate,
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
) -> Result<SplittingReport> {
    t.check_algebra(a)?;
    t.check_algebra(b)?;
    let mut report = SplittingReport::default();
    for x in 0..a.size() {
        for y in 0..b.size() {
            // The fold into A×B is componentwise, so compute each projection.
            let first = t.fold_with(a, x, y, |u| u, |_| a.zero())?;
            let second = t.fold_with(b, x, y, |_| b.zero(), |v| v)?;
            report.pairs_checked += 1;
            if (first, second) != (x, y) {
                report.failures.push((x, y, first, second));
            }
        }
    }
    for x in 0..a.size() {
        if t.fold_with(a, x, 0, |u| u, |_| a.zero())? != x {
            report.degenerate_failures.push(x);
        }
    }
    Ok(report)
}

/// An imaginary morphism `X ⇸ Y`, stored by its values on generators.
pub type ImaginaryMorphism = SetMap;

/// The counit `ε_X`, the co-Kleisli identity.
pub fn counit(x: std::sync::Arc<FiniteAlgebra>) -> ImaginaryMorphism {
    SetMap::identity(x)
}

/// A real morphism seen as imaginary: `f ∘ ε`.
pub fn coerce(f: &Homomorphism) -> ImaginaryMorphism {
    f.as_set_map()
}

/// Co-Kleisli composite `gbar ∘ fbar`. On generators this is function composition.
pub fn cokleisli_compose(fbar: &ImaginaryMorphism, gbar: &ImaginaryMorphism) -> Result<ImaginaryMorphism> {
    gbar.after(fbar)
}

/// `g ∘ fbar` for a real `g` after an imaginary `fbar`.
pub fn real_after_imaginary(g: &Homomorphism, fbar: &ImaginaryMorphism) -> Result<ImaginaryMorphism> {
    g.as_set_map().after(fbar)
}

/// `gbar ∘ f` for an imaginary `gbar` after a real `f`, i.e. `gbar ∘ P(f)`.
pub fn imaginary_after_real(gbar: &ImaginaryMorphism, f: &Homomorphism) -> Result<ImaginaryMorphism> {
    gbar.after(f)
}

/// Extends an imaginary morphism to a word over its domain's generators.
pub fn extend(fbar: &ImaginaryMorphism, word: &Term<usize>) -> Result<usize> {
    word.fold_in(fbar.cod(), &mut |&x| {
        if x >= fbar.dom().size() {
            return Err(Error::IndexOutOfRange {
                index: x,
                size: fbar.dom().size(),
            });
        }
        Ok(fbar.apply(x))
    })
}

/// A reduced alternating word in `ℕ + ℕ`: blocks of positive integers
/// alternating between the two summands.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AlternatingWord(pub Vec<(Side, u32)>);

impl AlternatingWord {
    /// Image under the comparison `ℕ + ℕ → ℕ × ℕ`.
    pub fn comparison(&self) -> (u32, u32) {
        self.0.iter().fold((0, 0), |(l, r), &(side, v)| match side {
            Side::Left => (l + v, r),
            Side::Right => (l, r + v),
        })
    }
}

impl fmt::Display for AlternatingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(side, v) in &self.0 {
            // combining low line / macron mark the summand
            let mark = match side {
                Side::Left => '\u{0332}',
                Side::Right => '\u{0304}',
            };
            for c in v.to_string().chars() {
                write!(f, "{c}{mark}")?;
            }
        }
        Ok(())
    }
}

/// All alternating words with at most `max_len` blocks mapping to `(1, 1)`.
///
/// Block values range over `1..=max_len`; branches whose running sum on a
/// side exceeds 1 are pruned.
pub fn enumerate_splittings_at_generator(max_len: usize) -> Vec<AlternatingWord> {
    let mut out = Vec::new();
    let bound = max_len as u32;
    for start in [Side::Left, Side::Right] {
        let mut blocks = Vec::new();
        extend_words(start, bound, max_len, (0, 0), &mut blocks, &mut out);
    }
    out.sort();
    out
}

fn extend_words(
    side: Side,
    bound: u32,
    max_len: usize,
    sums: (u32, u32),
    blocks: &mut Vec<(Side, u32)>,
    out: &mut Vec<AlternatingWord>,
) {
    if !blocks.is_empty() && sums == (1, 1) {
        out.push(AlternatingWord(blocks.clone()));
    }
    if blocks.len() == max_len {
        return;
    }
    for v in 1..=bound {
        let next = match side {
            Side::Left => (sums.0 + v, sums.1),
            Side::Right => (sums.0, sums.1 + v),
        };
        if next.0 > 1 || next.1 > 1 {
            continue;
        }
        blocks.push((side, v));
        let other = match side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
        extend_words(other, bound, max_len, next, blocks, out);
        blocks.pop();
    }
}
