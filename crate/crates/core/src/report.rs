//! Run reports. The human and machine renderings are produced from the
//! same structure, so they carry the same fields.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A computed fact that is neither expected nor forbidden.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            ..Section::default()
        }
    }

    pub fn check(&mut self, name: impl Into<String>, status: CheckStatus, detail: impl Into<String>) -> &mut Check {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
            witness: Vec::new(),
        });
        self.checks.last_mut().expect("just pushed")
    }

    /// Pass when `ok`, Fail otherwise.
    pub fn expect(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> &mut Check {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.check(name, status, detail)
    }

    pub fn info(&mut self, name: impl Into<String>, detail: impl Into<String>) -> &mut Check {
        self.check(name, CheckStatus::Info, detail)
    }

    pub fn table(&mut self, title: impl Into<String>, header: Vec<String>, rows: Vec<Vec<String>>) {
        self.tables.push(Table {
            title: title.into(),
            header,
            rows,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

impl Check {
    pub fn with_witness(&mut self, witness: Vec<String>) -> &mut Self {
        self.witness = witness;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Input {
    pub name: String,
    pub sha256: String,
}

impl Input {
    pub fn new(name: impl Into<String>, content: &[u8]) -> Self {
        Input {
            name: name.into(),
            sha256: hex::encode(Sha256::digest(content)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<Input>,
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
    /// Only present with `--timing`, so that default reports are reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            ..RunReport::default()
        }
    }

    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn failures(&self) -> usize {
        self.sections
            .iter()
            .flat_map(|s| &s.checks)
            .filter(|c| c.status == CheckStatus::Fail)
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "$ {}", self.command.join(" "));
        for input in &self.inputs {
            let _ = writeln!(out, "input {}  sha256:{}", input.name, input.sha256);
        }
        for section in &self.sections {
            let _ = writeln!(out, "\n== {} ==", section.title);
            for c in &section.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Info => "    ",
                };
                let _ = write!(out, "[{tag}] {}", c.name);
                if !c.detail.is_empty() {
                    let _ = write!(out, ": {}", c.detail);
                }
                if !c.witness.is_empty() {
                    let _ = write!(out, "  witness: {}", c.witness.join(" "));
                }
                out.push('\n');
            }
            for t in &section.tables {
                out.push('\n');
                render_table(&mut out, t);
            }
            for n in &section.notes {
                let _ = writeln!(out, "note: {n}");
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "\nerror: {e}");
        }
        let _ = writeln!(out, "\nexit code {}", self.exit_code);
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "elapsed {ms} ms");
        }
        out
    }
}

fn render_table(out: &mut String, t: &Table) {
    let cols = t.header.len();
    let width = |i: usize| {
        std::iter::once(&t.header)
            .chain(&t.rows)
            .filter_map(|r| r.get(i))
            .map(|c| c.chars().count())
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..cols).map(width).collect();
    let line = |out: &mut String, row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "  {}", cells.join("  ").trim_end());
    };
    let _ = writeln!(out, "  {}", t.title);
    line(out, &t.header);
    for r in &t.rows {
        line(out, r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings_share_content() {
        let mut r = RunReport::new(vec!["schreier".into(), "words".into()]);
        r.inputs.push(Input::new("x", b"abc"));
        let mut s = Section::new("words");
        s.expect("two words", true, "1̲1̄ 1̄1̲").with_witness(vec!["w".into()]);
        s.table("t", vec!["a".into(), "b".into()], vec![vec!["1".into(), "22".into()]]);
        r.push(s);
        assert_eq!(
            r.inputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let human = r.to_human();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(human.contains("[PASS] two words"));
        assert_eq!(json["sections"][0]["checks"][0]["status"], "pass");
        assert_eq!(json["sections"][0]["tables"][0]["rows"][0][1], "22");
        assert_eq!(r.failures(), 0);
    }
}
