//! Command-line front end.
//!
//! Every verb builds a [`RunReport`]; the exit code is 0 on success, 1 for
//! unusable input, 2 when a checked property fails, and 3 when two
//! independent computations disagree.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{validate_algebra, validate_homomorphism, ElementMap, EquationalClass, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::files::{
    load_algebra, load_point, load_template, parse_algebra, parse_hom_parts, parse_point,
    parse_template, AlgebraFile, FileKind, Source,
};
use crate::points::{is_stably_strong, probes_into, Point, StableStrongness};
use crate::report::{CheckStatus, Input, RunReport, Section};
use crate::schreier::{
    classify_point, verify_is_axioms, verify_s_axioms, Homogeneity, Retraction, Verdict,
};
use crate::special::{
    builtin_example, builtin_examples, diagonal_point, extract_loop, is_s_special,
    protomodular_object_check, BuiltinObject, LoopExtraction, ProtomodularResult, Status,
};
use crate::sweep::{catalog_for, default_size, run_sweep, size_limit, SweepConfig};
use crate::terms::{
    enumerate_splittings_at_generator, template_library, SplittingTemplate, DIRECT, TWISTED,
};

/// Longest word length `words` accepts.
pub const MAX_WORD_LEN: usize = 6;
/// Probe catalog size when `--probes` is not given.
pub const DEFAULT_PROBES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Hand {
    Right,
    Left,
}

#[derive(Debug, Parser)]
#[command(name = "schreier", version, about = "Schreier points, s-special objects and loops in finite pointed algebras")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Largest probe algebra for stably-strong checks.
    #[arg(long, global = true)]
    pub probes: Option<usize>,
    /// Largest catalog algebra (default: 3 for unitary magmas, 4 otherwise).
    #[arg(long = "catalog-size", global = true)]
    pub catalog_size: Option<usize>,
    /// Add elapsed time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check algebra, homomorphism, point or template files.
    Validate {
        #[arg(required = true)]
        paths: Vec<String>,
    },
    /// Classify a point (file or builtin name) with the direct, twisted and extra templates.
    Classify {
        #[arg(long)]
        point: String,
        /// Extra template: library name or file. Repeatable.
        #[arg(long = "template")]
        templates: Vec<String>,
    },
    /// Enumerate a catalog and check every catalog-wide invariant.
    Sweep {
        #[arg(long, default_value = "monoid")]
        class: String,
    },
    /// Alternating words in ℕ + ℕ over (1, 1).
    Words {
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Is the diagonal point of an algebra Schreier for a template?
    Special {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value = DIRECT)]
        template: String,
    },
    /// Extract a right or left loop structure.
    Loop {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum)]
        hand: Hand,
    },
    /// Bounded check that every point over the algebra is stably strong.
    Protomodular {
        #[arg(long)]
        algebra: String,
    },
    /// List the builtin examples, or check their expected verdicts.
    Examples {
        /// Check every expectation of every builtin.
        #[arg(long)]
        run_all: bool,
        /// Check a single builtin.
        name: Option<String>,
    },
}

/// Parses `args` (including the program name), runs, and returns the
/// rendered report with the exit code.
pub fn run_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return (e.render().to_string(), code);
        }
    };
    let echo = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let report = run(&cli, echo);
    let text = match cli.format {
        Format::Human => report.to_human(),
        Format::Machine => report.to_json(),
    };
    (text, report.exit_code)
}

pub fn run(cli: &Cli, command: Vec<String>) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(command);
    let outcome = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start {n} workers: {e}")))
            .and_then(|pool| pool.install(|| dispatch(cli, &mut report))),
        None => dispatch(cli, &mut report),
    };
    report.exit_code = match outcome {
        Ok(()) if report.failures() > 0 => 2,
        Ok(()) => 0,
        Err(e) => {
            report.error = Some(e.to_string());
            e.exit_code()
        }
    };
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

fn dispatch(cli: &Cli, report: &mut RunReport) -> Result<()> {
    match &cli.command {
        Command::Validate { paths } => cmd_validate(paths, report),
        Command::Classify { point, templates } => cmd_classify(cli, point, templates, report),
        Command::Sweep { class } => cmd_sweep(cli, class, report),
        Command::Words { max_len } => cmd_words(*max_len, report),
        Command::Special { algebra, template } => cmd_special(algebra, template, report),
        Command::Loop { algebra, hand } => cmd_loop(algebra, *hand, report),
        Command::Protomodular { algebra } => cmd_protomodular(cli, algebra, report),
        Command::Examples { run_all, name } => cmd_examples(*run_all, name.as_deref(), report),
    }
}

/// Records the hash of a file, or of the canonical form of a builtin.
fn record_input(report: &mut RunReport, reference: &str) {
    let path = Path::new(reference);
    if let Ok(bytes) = std::fs::read(path) {
        report.inputs.push(Input::new(reference, &bytes));
        return;
    }
    if let Ok(t) = template_library(reference) {
        report.inputs.push(Input::new(format!("builtin:{reference}"), t.to_string().as_bytes()));
        return;
    }
    if let Ok(e) = builtin_example(reference) {
        let canonical = match &e.object {
            BuiltinObject::Algebra(a) => {
                serde_json::to_string(&AlgebraFile::from_algebra(a)).expect("serializable")
            }
            BuiltinObject::Point(p) => p.describe(),
        };
        report.inputs.push(Input::new(format!("builtin:{reference}"), canonical.as_bytes()));
    }
}

fn labels(a: &FiniteAlgebra, xs: impl IntoIterator<Item = usize>) -> Vec<String> {
    xs.into_iter().map(|x| a.label(x).to_string()).collect()
}

fn cmd_validate(paths: &[String], report: &mut RunReport) -> Result<()> {
    for path in paths {
        record_input(report, path);
        let src = Source::read(Path::new(path))?;
        let kind = src.kind()?;
        let mut section = Section::new(format!("{path} ({})", serde_json::to_value(kind).expect("kind")
            .as_str()
            .unwrap_or_default()));
        match kind {
            FileKind::Algebra => {
                let a = match parse_algebra(&src) {
                    Ok(a) => a,
                    Err(Error::LawViolation(r)) => {
                        for v in &r.violations {
                            section.expect(&v.law, false, &v.detail);
                        }
                        report.push(section);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let r = validate_algebra(&a);
                section.expect(
                    format!("`{}` is a {}", a.name(), a.class()),
                    r.is_ok(),
                    format!("{} elements", a.size()),
                );
                for v in &r.violations {
                    section.expect(&v.law, false, &v.detail).with_witness(labels(&a, v.witness.iter().copied()));
                }
            }
            FileKind::Homomorphism => {
                let parts = parse_hom_parts(&src)?;
                for alg in [&parts.dom, &parts.cod] {
                    let r = validate_algebra(alg);
                    section.expect(format!("`{}` is a {}", alg.name(), alg.class()), r.is_ok(), r.to_string());
                }
                let r = validate_homomorphism(&parts.dom, &parts.cod, &parts.map)?;
                section.expect(
                    format!("homomorphism {} → {}", parts.dom.name(), parts.cod.name()),
                    r.is_ok(),
                    r.to_string(),
                );
                for v in &r.violations {
                    section.expect(&v.law, false, &v.detail).with_witness(labels(&parts.dom, v.witness.iter().copied()));
                }
            }
            FileKind::Point => match parse_point(&src) {
                Ok(p) => {
                    section.expect("f ∘ s = 1", true, p.describe());
                    section.info("kernel", format!("{{{}}}", labels(p.x(), p.kernel().members().iter().copied()).join(", ")));
                }
                Err(Error::NotASection { witness }) => {
                    section.expect("f ∘ s = 1", false, "s is not a section of f").with_witness(vec![witness]);
                }
                Err(e) => return Err(e),
            },
            FileKind::Template => {
                let t = parse_template(&src)?;
                section.expect(format!("template `{}`", t.name), true, t.to_string());
            }
        }
        report.push(section);
    }
    Ok(())
}

fn probe_catalog_for(cli: &Cli, y: &FiniteAlgebra) -> Result<Option<crate::algebra::Catalog>> {
    let class = y.class();
    let Some(limit) = size_limit(class) else { return Ok(None) };
    let size = cli.probes.unwrap_or(DEFAULT_PROBES.min(limit));
    catalog_for(class, size).map(Some)
}

fn retraction_table(r: &Retraction) -> Vec<Vec<String>> {
    let x = r.point().x();
    (0..x.size())
        .map(|e| vec![x.label(e).to_string(), x.label(r.apply_in_x(e)).to_string()])
        .collect()
}

fn verdict_section(p: &Point, t: &SplittingTemplate, v: &Verdict) -> Result<Section> {
    let mut s = Section::new(format!("template {}", t.name));
    match v {
        Verdict::Schreier(r) => {
            s.info("intrinsic Schreier", "yes");
            s.table(
                "retraction (k ∘ q)",
                vec!["x".into(), "q(x)".into()],
                retraction_table(r),
            );
            let mut suites = vec![verify_is_axioms(r, t)?];
            if t.name == DIRECT {
                suites.insert(0, verify_s_axioms(r));
            }
            for c in suites.iter().flat_map(|s| &s.checks) {
                let detail = if c.passed { "holds" } else { "fails" };
                let witness = c.witness.clone().unwrap_or_default();
                s.expect(&c.axiom, c.passed, detail).with_witness(witness_labels(p, &c.axiom, &witness));
            }
        }
        Verdict::NotSchreier(d) => {
            let x = p.x();
            s.info(
                "intrinsic Schreier",
                format!("no: |D({})| = {}", x.label(d.element), d.candidates.len()),
            )
            .with_witness(labels(p.k_algebra(), d.candidates.iter().copied()));
        }
    }
    Ok(s)
}

/// Axiom witnesses are elements of `X`, `K` or `Y`, or pairs `(a, y)`.
fn witness_labels(p: &Point, axiom: &str, w: &[usize]) -> Vec<String> {
    match (axiom.trim_start_matches('i'), w) {
        ("S1", [x]) => vec![p.x().label(*x).to_string()],
        ("S3", [a]) => vec![p.k_algebra().label(*a).to_string()],
        ("S4", [y]) => vec![p.y().label(*y).to_string()],
        ("S5", [x]) => vec![p.x().label(*x).to_string()],
        (_, [a, y]) => vec![p.k_algebra().label(*a).to_string(), p.y().label(*y).to_string()],
        _ => w.iter().map(|i| i.to_string()).collect(),
    }
}

fn cmd_classify(cli: &Cli, point: &str, templates: &[String], report: &mut RunReport) -> Result<()> {
    record_input(report, point);
    for t in templates {
        record_input(report, t);
    }
    let p = load_point(point)?;
    let extra = templates.iter().map(|t| load_template(t)).collect::<Result<Vec<_>>>()?;
    let analysis = classify_point(&p, &extra)?;

    let mut summary = Section::new("point");
    summary.info("point", p.describe());
    summary.info("kernel", format!("{{{}}}", labels(p.x(), p.kernel().members().iter().copied()).join(", ")));
    let yes = |b: bool| if b { "yes" } else { "no" };
    summary.info("right homogeneous", yes(analysis.right_homogeneous.is_schreier()));
    summary.info("left homogeneous", yes(analysis.left_homogeneous.is_schreier()));
    summary.info("homogeneous", yes(analysis.homogeneous));
    let generated = labels(p.x(), analysis.strong.generated.members().iter().copied());
    if analysis.strong.strong {
        summary.info("strong", "yes");
    } else {
        summary
            .info("strong", "no: kernel and section generate a proper subalgebra")
            .with_witness(generated);
    }
    let any_schreier = analysis.right_homogeneous.is_schreier()
        || analysis.left_homogeneous.is_schreier()
        || analysis.per_template.iter().any(|(_, v)| v.is_schreier());
    if any_schreier {
        summary.expect("Schreier ⇒ strong", analysis.strong.strong, "");
    }
    if let Some(catalog) = probe_catalog_for(cli, p.y())? {
        let probes = probes_into(p.y(), &catalog.algebras);
        let stable = is_stably_strong(&p, &probes)?;
        let detail = match &stable {
            StableStrongness::StrongUnderAllProbes { probes } => format!("yes ({probes} probes from {})", catalog.description),
            StableStrongness::Counterexample { probe, .. } => {
                format!("no: pullback along probe {} ({}) is not strong", probe, probes[*probe].g.dom().name())
            }
        };
        if analysis.right_homogeneous.is_schreier() {
            summary.expect("stably strong", stable.holds(), detail);
        } else {
            summary.info("stably strong", detail);
        }
    }
    report.push(summary);

    report.push(verdict_section(&p, &template_library(DIRECT)?, &analysis.right_homogeneous)?);
    report.push(verdict_section(&p, &template_library(TWISTED)?, &analysis.left_homogeneous)?);
    for (t, (_, v)) in extra.iter().zip(&analysis.per_template) {
        report.push(verdict_section(&p, t, v)?);
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, class: &str, report: &mut RunReport) -> Result<()> {
    let class: EquationalClass = class.parse()?;
    let size = cli.catalog_size.unwrap_or_else(|| default_size(class));
    let probes = cli.probes.unwrap_or(DEFAULT_PROBES.min(size));
    let summary = run_sweep(&SweepConfig::new(class, size, probes))?;
    let mut s = Section::new(format!("sweep over {}", summary.catalog));
    s.info("probes", summary.probe_catalog.clone());
    s.info("algebras", summary.algebras.to_string());
    s.info("points", summary.points.to_string());
    s.info("right homogeneous", summary.right_homogeneous.to_string());
    s.info("left homogeneous", summary.left_homogeneous.to_string());
    s.info("strong", summary.strong.to_string());
    if let Some(p) = &summary.first_non_strong {
        s.info("first non-strong point", p.clone());
    }
    for t in &summary.tallies {
        let detail = format!("{} checked, {} skipped, {} violations", t.checked, t.skipped, t.violations);
        let c = s.expect(&t.invariant, t.violations == 0, detail);
        if let Some(w) = &t.first_counterexample {
            c.with_witness(vec![w.clone()]);
        }
    }
    s.note(format!(
        "products, morphisms and equalizers are checked between Schreier points with at most {} elements",
        summary.pair_size
    ));
    report.push(s);
    Ok(())
}

fn cmd_words(max_len: usize, report: &mut RunReport) -> Result<()> {
    if max_len == 0 || max_len > MAX_WORD_LEN {
        return Err(Error::Precondition(format!(
            "--max-len must be between 1 and {MAX_WORD_LEN}"
        )));
    }
    let words = enumerate_splittings_at_generator(max_len);
    let mut s = Section::new(format!("alternating words over (1, 1), length ≤ {max_len}"));
    let shown: Vec<String> = words.iter().map(ToString::to_string).collect();
    let expected = if max_len >= 2 { 2 } else { 0 };
    s.expect(format!("exactly {expected} words"), words.len() == expected, shown.join(" "));
    s.table(
        "words",
        vec!["word".into(), "blocks".into(), "comparison".into()],
        words
            .iter()
            .map(|w| {
                let (l, r) = w.comparison();
                vec![w.to_string(), w.0.len().to_string(), format!("({l}, {r})")]
            })
            .collect(),
    );
    report.push(s);
    Ok(())
}

fn pair_label(a: &FiniteAlgebra, idx: usize) -> String {
    let n = a.size();
    format!("({},{})", a.label(idx / n), a.label(idx % n))
}

fn cmd_special(algebra: &str, template: &str, report: &mut RunReport) -> Result<()> {
    record_input(report, algebra);
    record_input(report, template);
    let a = load_algebra(algebra)?;
    let t = load_template(template)?;
    let verdict = is_s_special(&a, &t)?;
    let p = diagonal_point(&a)?;
    let mut s = Section::new(format!("diagonal point of `{}`, template {}", a.name(), t.name));
    match &verdict {
        Verdict::Schreier(r) => {
            s.info("s-special", "yes");
            s.table(
                "retraction q(x, y), first coordinate",
                vec!["(x,y)".into(), "q".into()],
                (0..p.x().size())
                    .map(|e| vec![pair_label(&a, e), a.label(r.apply_in_x(e) / a.size()).to_string()])
                    .collect(),
            );
        }
        Verdict::NotSchreier(d) => {
            s.info(
                "s-special",
                format!("no: |D{}| = {}", pair_label(&a, d.element), d.candidates.len()),
            )
            .with_witness(vec![pair_label(&a, d.element)]);
        }
    }
    report.push(s);
    if verdict.is_schreier() && (t.name == DIRECT || t.name == TWISTED) {
        let hand = if t.name == DIRECT { Hand::Right } else { Hand::Left };
        loop_section(&a, hand, report)?;
    }
    Ok(())
}

fn loop_section(a: &Arc<FiniteAlgebra>, hand: Hand, report: &mut RunReport) -> Result<()> {
    let h = match hand {
        Hand::Right => Homogeneity::Right,
        Hand::Left => Homogeneity::Left,
    };
    let mut s = Section::new(format!("{} loop on `{}`", format!("{h:?}").to_lowercase(), a.name()));
    match extract_loop(a, h)? {
        LoopExtraction::Loop(l) => {
            let (name, laws) = match h {
                Homogeneity::Right => ("x−y", ["(x−y)+y = x", "(x+y)−y = x"]),
                Homogeneity::Left => ("−x+y", ["x+(−x+y) = y", "−x+(x+y) = y"]),
            };
            for law in laws {
                s.expect(law, true, "verified on all pairs");
            }
            let round_trip = l.to_retraction()?;
            let direct = is_s_special(a, &template_library(if h == Homogeneity::Right { DIRECT } else { TWISTED })?)?;
            s.expect(
                "loop → retraction reproduces the diagonal retraction",
                direct.retraction() == Some(&round_trip),
                "",
            );
            let mut header = vec![name.to_string()];
            header.extend(labels(a, 0..a.size()));
            let rows = (0..a.size())
                .map(|x| {
                    let mut row = vec![a.label(x).to_string()];
                    row.extend((0..a.size()).map(|y| a.label(l.op(x, y)).to_string()));
                    row
                })
                .collect();
            s.table(format!("{name} (row x, column y)"), header, rows);
        }
        LoopExtraction::NotSpecial(d) => {
            s.info(
                "loop",
                format!("none: diagonal point fails at {} with {} candidates", pair_label(a, d.element), d.candidates.len()),
            )
            .with_witness(vec![pair_label(a, d.element)]);
        }
    }
    report.push(s);
    Ok(())
}

fn cmd_loop(algebra: &str, hand: Hand, report: &mut RunReport) -> Result<()> {
    record_input(report, algebra);
    let a = load_algebra(algebra)?;
    loop_section(&a, hand, report)
}

fn cmd_protomodular(cli: &Cli, algebra: &str, report: &mut RunReport) -> Result<()> {
    record_input(report, algebra);
    let y = load_algebra(algebra)?;
    let class = y.class();
    let size = cli.catalog_size.unwrap_or_else(|| default_size(class));
    let catalog = catalog_for(class, size)?;
    let probe_catalog = catalog_for(class, cli.probes.unwrap_or(DEFAULT_PROBES.min(size)))?;
    let v = protomodular_object_check(&y, &catalog, &probe_catalog)?;
    let mut s = Section::new(format!("protomodular check for `{}`", y.name()));
    s.info("bound", v.bound.clone());
    match &v.result {
        ProtomodularResult::AllStablyStrong { points, probes } => {
            s.info("verdict", format!("all {points} points stably strong under {probes} probes"));
        }
        ProtomodularResult::Counterexample {
            point,
            probe,
            pulled_back,
            witness,
        } => {
            s.info("verdict", "counterexample found");
            s.info("point", point.describe());
            s.info("probe", format!("{} → {}", probe.g.dom().name(), probe.g.cod().name()));
            s.info("pulled back", pulled_back.describe()).with_witness(labels(
                pulled_back.x(),
                witness.members().iter().copied(),
            ));
        }
    }
    report.push(s);
    Ok(())
}

fn cmd_examples(run_all: bool, name: Option<&str>, report: &mut RunReport) -> Result<()> {
    let examples = match name {
        Some(n) => vec![builtin_example(n)?],
        None => builtin_examples()?,
    };
    if !run_all && name.is_none() {
        let mut s = Section::new("builtin examples");
        s.table(
            "builtins",
            vec!["name".into(), "kind".into(), "summary".into()],
            examples
                .iter()
                .map(|e| {
                    let kind = match e.object {
                        BuiltinObject::Algebra(_) => "algebra",
                        BuiltinObject::Point(_) => "point",
                    };
                    vec![e.name.to_string(), kind.to_string(), e.summary.to_string()]
                })
                .collect(),
        );
        report.push(s);
        return Ok(());
    }
    for e in &examples {
        let mut s = Section::new(format!("{}: {}", e.name, e.summary));
        for o in e.run()? {
            let status = match o.status {
                Status::Pass => CheckStatus::Pass,
                Status::Fail => CheckStatus::Fail,
                Status::Recorded => CheckStatus::Info,
            };
            s.check(o.claim, status, o.observed);
        }
        report.push(s);
    }
    Ok(())
}
