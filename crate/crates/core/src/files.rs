//! JSON file formats for algebras, homomorphisms, points and templates.
//!
//! Wherever an algebra or homomorphism is referenced, the value may be a
//! builtin name, a path (relative to the referencing file), or an inline
//! object. Unknown fields are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{
    EquationalClass, FiniteAlgebra, Homomorphism, Signature, ValidationReport, Violation, INVERSE,
};
use crate::error::{Error, Result};
use crate::points::{make_point, Point};
use crate::special::builtin_example;
use crate::terms::{parse_shape, template_library, SplittingTemplate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub class: EquationalClass,
    pub elements: Vec<String>,
    /// Label of the distinguished constant.
    pub constant: String,
    /// Operation symbol to nested row-major table of labels
    /// (a flat list for unary operations, a list of rows for binary ones).
    pub tables: BTreeMap<String, Value>,
    /// Symbol of the binary operation with the constant as unit. Defaults to
    /// `meet` for Heyting semilattices and `+` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jt: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Named(String),
    Inline(Box<AlgebraFile>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomFile {
    pub dom: AlgebraRef,
    pub cod: AlgebraRef,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HomRef {
    Path(String),
    Inline(Box<HomFile>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub f: HomRef,
    pub s: HomRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateFile {
    pub name: String,
    pub class: EquationalClass,
    pub shape: String,
}

/// What a JSON document describes, judged by its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Algebra,
    Homomorphism,
    Point,
    Template,
}

/// Raw text plus where it came from.
#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub text: String,
    dir: PathBuf,
}

impl Source {
    pub fn read(path: &Path) -> Result<Source> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Source {
            name: path.display().to_string(),
            text,
            dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn inline(name: impl Into<String>, text: impl Into<String>) -> Source {
        Source {
            name: name.into(),
            text: text.into(),
            dir: PathBuf::from("."),
        }
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        serde_json::from_str(&self.text).map_err(|e| Error::Parse {
            source_name: self.name.clone(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn kind(&self) -> Result<FileKind> {
        let v: Value = self.parse()?;
        let has = |k: &str| v.get(k).is_some();
        if has("elements") {
            Ok(FileKind::Algebra)
        } else if has("map") {
            Ok(FileKind::Homomorphism)
        } else if has("f") || has("s") {
            Ok(FileKind::Point)
        } else if has("shape") {
            Ok(FileKind::Template)
        } else {
            Err(Error::Parse {
                source_name: self.name.clone(),
                line: 1,
                column: 1,
                message: "cannot tell which kind of file this is".into(),
            })
        }
    }

    fn resolve(&self, reference: &str) -> PathBuf {
        let p = Path::new(reference);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }
}

fn structural(source: &str, detail: impl Into<String>) -> Error {
    Error::Structural {
        symbol: source.to_string(),
        detail: detail.into(),
    }
}

fn flatten_table(
    value: &Value,
    depth: usize,
    n: usize,
    index: &dyn Fn(&str) -> Result<usize>,
    out: &mut Vec<usize>,
) -> Result<()> {
    if depth == 0 {
        let label = value
            .as_str()
            .ok_or_else(|| Error::Term(format!("expected an element label, found {value}")))?;
        out.push(index(label)?);
        return Ok(());
    }
    let items = value
        .as_array()
        .ok_or_else(|| Error::Term(format!("expected a list, found {value}")))?;
    if items.len() != n {
        return Err(Error::Term(format!("expected {n} entries, found {}", items.len())));
    }
    for item in items {
        flatten_table(item, depth - 1, n, index, out)?;
    }
    Ok(())
}

fn arity_of(value: &Value) -> usize {
    match value {
        Value::Array(items) => 1 + items.first().map(arity_of).unwrap_or(0),
        _ => 0,
    }
}

impl AlgebraFile {
    /// Builds the algebra after structural checks only; laws are left to
    /// [`crate::algebra::validate_algebra`]. A missing group inverse is
    /// computed, and its absence is a law violation.
    pub fn build(&self) -> Result<FiniteAlgebra> {
        let n = self.elements.len();
        let index = |label: &str| {
            self.elements
                .iter()
                .position(|e| e == label)
                .ok_or_else(|| structural(&self.name, format!("unknown element `{label}`")))
        };
        let zero = index(&self.constant)?;
        let (default_constant, default_jt) = match self.class {
            EquationalClass::HeytingSemilattice => ("top", "meet"),
            _ => ("0", "+"),
        };
        let jt_symbol = self.jt.clone().unwrap_or_else(|| default_jt.to_string());
        let mut jt = None;
        let mut extras = Vec::new();
        let mut extra_tables = Vec::new();
        for (symbol, value) in &self.tables {
            let arity = arity_of(value);
            let mut table = Vec::with_capacity(n.pow(arity as u32));
            flatten_table(value, arity, n, &index, &mut table).map_err(|e| {
                structural(&self.name, format!("table `{symbol}`: {e}"))
            })?;
            if *symbol == jt_symbol {
                if arity != 2 {
                    return Err(structural(&self.name, format!("`{symbol}` must be binary")));
                }
                jt = Some(table);
            } else {
                extras.push((symbol.clone(), arity));
                extra_tables.push(table);
            }
        }
        let jt = jt.ok_or_else(|| structural(&self.name, format!("missing table for `{jt_symbol}`")))?;
        let computed_inverse = self.class == EquationalClass::Group && !self.tables.contains_key(INVERSE);
        if computed_inverse {
            let inv = (0..n)
                .map(|x| {
                    (0..n).find(|&y| jt[x * n + y] == zero && jt[y * n + x] == zero).ok_or(x)
                })
                .collect::<std::result::Result<Vec<_>, usize>>();
            match inv {
                Ok(inv) => {
                    extras.push((INVERSE.to_string(), 1));
                    extra_tables.push(inv);
                }
                Err(x) => {
                    return Err(Error::LawViolation(ValidationReport {
                        violations: vec![Violation {
                            law: "inverse".into(),
                            witness: vec![x],
                            detail: format!("`{}` has no two-sided inverse", self.elements[x]),
                        }],
                    }))
                }
            }
        }
        let signature = Signature::new(
            self.class.name(),
            default_constant,
            jt_symbol,
            extras,
            self.class,
        )?;
        FiniteAlgebra::new(
            self.name.clone(),
            signature,
            self.elements.clone(),
            zero,
            jt,
            extra_tables,
        )
    }

    /// The file form of an algebra; round-trips through [`AlgebraFile::build`].
    pub fn from_algebra(a: &FiniteAlgebra) -> AlgebraFile {
        let n = a.size();
        let mut tables = BTreeMap::new();
        for (symbol, arity, table) in a.operations() {
            tables.insert(symbol.to_string(), nest(a, table, arity, n));
        }
        let default_jt = match a.class() {
            EquationalClass::HeytingSemilattice => "meet",
            _ => "+",
        };
        let jt = &a.signature().jt_operation;
        AlgebraFile {
            name: a.name().to_string(),
            class: a.class(),
            elements: a.elements().to_vec(),
            constant: a.label(a.zero()).to_string(),
            tables,
            jt: (jt != default_jt).then(|| jt.clone()),
        }
    }
}

fn nest(a: &FiniteAlgebra, table: &[usize], arity: usize, n: usize) -> Value {
    if arity == 0 {
        return Value::String(a.label(table[0]).to_string());
    }
    let stride = n.pow(arity as u32 - 1);
    Value::Array(
        (0..n)
            .map(|i| nest(a, &table[i * stride..(i + 1) * stride], arity - 1, n))
            .collect(),
    )
}

pub fn parse_algebra(src: &Source) -> Result<FiniteAlgebra> {
    src.parse::<AlgebraFile>()?.build()
}

/// A builtin name, a path, or an inline object.
pub fn resolve_algebra(reference: &AlgebraRef, src: &Source) -> Result<Arc<FiniteAlgebra>> {
    match reference {
        AlgebraRef::Inline(file) => Ok(Arc::new(file.build()?)),
        AlgebraRef::Named(name) => load_algebra_ref(name, Some(src)),
    }
}

/// Loads an algebra from a builtin name or a file path.
pub fn load_algebra(reference: &str) -> Result<Arc<FiniteAlgebra>> {
    load_algebra_ref(reference, None)
}

fn load_algebra_ref(reference: &str, relative_to: Option<&Source>) -> Result<Arc<FiniteAlgebra>> {
    let path = relative_to.map(|s| s.resolve(reference)).unwrap_or_else(|| PathBuf::from(reference));
    if path.exists() {
        return Ok(Arc::new(parse_algebra(&Source::read(&path)?)?));
    }
    match builtin_example(reference) {
        Ok(e) => e.algebra().cloned().ok_or_else(|| Error::Unknown {
            kind: "algebra",
            name: reference.to_string(),
        }),
        Err(_) => Err(Error::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or builtin"),
        }),
    }
}

/// The pieces of a homomorphism file, before checking preservation.
#[derive(Clone, Debug)]
pub struct HomParts {
    pub dom: Arc<FiniteAlgebra>,
    pub cod: Arc<FiniteAlgebra>,
    pub map: Vec<usize>,
}

impl HomParts {
    pub fn into_homomorphism(self) -> Result<Homomorphism> {
        Homomorphism::new(self.dom, self.cod, self.map)
    }
}

fn hom_parts(file: &HomFile, src: &Source) -> Result<HomParts> {
    let dom = resolve_algebra(&file.dom, src)?;
    let cod = resolve_algebra(&file.cod, src)?;
    let mut map = vec![usize::MAX; dom.size()];
    for (from, to) in &file.map {
        let x = dom
            .index_of(from)
            .ok_or_else(|| structural("map", format!("`{from}` is not an element of `{}`", dom.name())))?;
        let y = cod
            .index_of(to)
            .ok_or_else(|| structural("map", format!("`{to}` is not an element of `{}`", cod.name())))?;
        map[x] = y;
    }
    if let Some(x) = map.iter().position(|&v| v == usize::MAX) {
        return Err(structural("map", format!("no image given for `{}`", dom.label(x))));
    }
    Ok(HomParts { dom, cod, map })
}

pub fn parse_hom_parts(src: &Source) -> Result<HomParts> {
    hom_parts(&src.parse::<HomFile>()?, src)
}

fn resolve_hom(reference: &HomRef, src: &Source) -> Result<Homomorphism> {
    match reference {
        HomRef::Inline(file) => hom_parts(file, src)?.into_homomorphism(),
        HomRef::Path(p) => parse_hom_parts(&Source::read(&src.resolve(p))?)?.into_homomorphism(),
    }
}

pub fn parse_point(src: &Source) -> Result<Point> {
    let file: PointFile = src.parse()?;
    let f = resolve_hom(&file.f, src)?;
    let s = resolve_hom(&file.s, src)?;
    make_point(f, s)
}

/// Loads a point from a file path or a builtin point name.
pub fn load_point(reference: &str) -> Result<Point> {
    let path = Path::new(reference);
    if path.exists() {
        return parse_point(&Source::read(path)?);
    }
    match builtin_example(reference) {
        Ok(e) => e.point().cloned().ok_or_else(|| Error::Unknown {
            kind: "point",
            name: reference.to_string(),
        }),
        Err(_) => Err(Error::Io {
            path: reference.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or builtin"),
        }),
    }
}

pub fn parse_template(src: &Source) -> Result<SplittingTemplate> {
    let file: TemplateFile = src.parse()?;
    let shape = parse_shape(&file.shape).map_err(|e| match e {
        Error::Parse {
            line,
            column,
            message,
            ..
        } => Error::Parse {
            source_name: format!("{} (shape)", src.name),
            line,
            column,
            message,
        },
        other => other,
    })?;
    Ok(SplittingTemplate::new(file.name, file.class, shape))
}

/// A library template name or a template file path.
pub fn load_template(reference: &str) -> Result<SplittingTemplate> {
    match template_library(reference) {
        Ok(t) => Ok(t),
        Err(_) => parse_template(&Source::read(Path::new(reference))?),
    }
}
