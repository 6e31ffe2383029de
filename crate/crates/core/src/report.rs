//! Running problem files and reporting the outcome.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::Serialize;

use crate::ellipsis::{Counts, Failure, Resolution};
use crate::scope::enumerate_derivations;
use crate::syntax::{parse_problem, render, ProblemFile};
use crate::unify::SearchBudget;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// No expected readings were given.
    Unchecked,
    Exploratory,
    Mismatch,
    EngineError,
    ParseError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Unchecked | Status::Exploratory => 0,
            Status::Mismatch => 1,
            Status::EngineError => 2,
            Status::ParseError => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Unchecked => "unchecked",
            Status::Exploratory => "exploratory",
            Status::Mismatch => "mismatch",
            Status::EngineError => "engine-error",
            Status::ParseError => "parse-error",
        }
    }
}

/// Command-line overrides of the settings in a problem file.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub linking: Option<bool>,
    pub max_depth: Option<usize>,
    pub max_solutions: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReadingReport {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub branch: String,
    pub bindings: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountsReport {
    pub raw: usize,
    pub primary: usize,
    pub linking: usize,
}

impl From<Counts> for CountsReport {
    fn from(c: Counts) -> CountsReport {
        CountsReport {
            raw: c.raw,
            primary: c.primary,
            linking: c.linking,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureReport {
    pub branch: String,
    pub unknown: Option<String>,
    pub kind: String,
    pub detail: String,
}

impl From<&Failure> for FailureReport {
    fn from(f: &Failure) -> FailureReport {
        FailureReport {
            branch: f.branch.clone(),
            unknown: f.unknown.as_ref().map(|u| u.to_string()),
            kind: f.kind.as_str().to_string(),
            detail: f.detail.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub file: String,
    pub linking: bool,
    pub status: Status,
    pub readings: Vec<ReadingReport>,
    pub counts: CountsReport,
    pub failures: Vec<FailureReport>,
    /// Expected readings that were not found.
    pub missing: Vec<String>,
    /// Readings found but not expected.
    pub unexpected: Vec<String>,
    /// Expected branch failures that did not occur.
    pub missing_failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    fn empty(problem: &str, file: &str, linking: bool, status: Status, error: String) -> RunReport {
        RunReport {
            problem: problem.to_string(),
            file: file.to_string(),
            linking,
            status,
            readings: Vec::new(),
            counts: CountsReport {
                raw: 0,
                primary: 0,
                linking: 0,
            },
            failures: Vec::new(),
            missing: Vec::new(),
            unexpected: Vec::new(),
            missing_failures: Vec::new(),
            error: Some(error),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} ({}): {} [linking {}]",
            self.problem,
            self.file,
            self.status.as_str(),
            if self.linking { "on" } else { "off" }
        );
        if let Some(e) = &self.error {
            let _ = writeln!(s, "  error: {e}");
        }
        let c = &self.counts;
        let _ = writeln!(s, "  counts: raw {} / primary {} / linking {}", c.raw, c.primary, c.linking);
        for r in &self.readings {
            let label = r.label.as_deref().map(|l| format!("({l}) ")).unwrap_or_default();
            let _ = writeln!(s, "  reading {label}{}", r.text);
            let _ = writeln!(s, "    branch: {}", r.branch);
            for (k, v) in &r.bindings {
                let _ = writeln!(s, "    {k} = {v}");
            }
        }
        for f in &self.failures {
            let _ = writeln!(
                s,
                "  failure {} {}: {} ({})",
                f.unknown.as_deref().unwrap_or("-"),
                f.kind,
                f.detail,
                f.branch
            );
        }
        for m in &self.missing {
            let _ = writeln!(s, "  missing {m}");
        }
        for u in &self.unexpected {
            let _ = writeln!(s, "  unexpected {u}");
        }
        for m in &self.missing_failures {
            let _ = writeln!(s, "  missing failure {m}");
        }
        s
    }
}

/// Runs a parsed problem and compares against its expectations.
pub fn run(file: &ProblemFile, path: &str, opts: &RunOptions) -> RunReport {
    let linking = opts.linking.unwrap_or(file.linking);
    let budget = SearchBudget {
        max_depth: opts.max_depth.unwrap_or(file.budget.max_depth),
        max_solutions: opts.max_solutions.unwrap_or(file.budget.max_solutions),
    };
    let res = match enumerate_derivations(&file.problem, &budget, linking) {
        Ok(r) => r,
        Err(e) => return RunReport::empty(&file.name, path, linking, Status::EngineError, e.to_string()),
    };
    report(file, path, linking, &res)
}

fn report(file: &ProblemFile, path: &str, linking: bool, res: &Resolution) -> RunReport {
    let expectation = file.expectation(linking);
    let label_of = |t: &crate::term::Term| {
        expectation
            .and_then(|e| e.readings.iter().find(|x| x.term == *t))
            .and_then(|x| x.label.clone())
    };
    let readings: Vec<ReadingReport> = res
        .readings
        .iter()
        .map(|r| ReadingReport {
            text: render(&r.term),
            label: label_of(&r.term),
            branch: r.branch.clone(),
            bindings: r.bindings.iter().map(|(k, v)| (k.to_string(), render(v))).collect(),
        })
        .collect();

    let mut missing = Vec::new();
    let mut unexpected = Vec::new();
    if let Some(e) = expectation {
        for x in &e.readings {
            if !res.readings.iter().any(|r| r.term == x.term) {
                missing.push(match &x.label {
                    Some(l) => format!("({l}) {}", render(&x.term)),
                    None => render(&x.term),
                });
            }
        }
        if e.exact {
            for r in &res.readings {
                if !e.readings.iter().any(|x| x.term == r.term) {
                    unexpected.push(render(&r.term));
                }
            }
        }
    }
    let missing_failures: Vec<String> = file
        .expected_failures
        .iter()
        .filter(|(u, k)| !res.failures.iter().any(|f| f.unknown.as_ref() == Some(u) && f.kind == *k))
        .map(|(u, k)| format!("{u} {}", k.as_str()))
        .collect();

    let status = if file.exploratory {
        Status::Exploratory
    } else if !missing.is_empty() || !unexpected.is_empty() || !missing_failures.is_empty() {
        Status::Mismatch
    } else if expectation.is_none() && file.expected_failures.is_empty() {
        Status::Unchecked
    } else {
        Status::Pass
    };
    RunReport {
        problem: file.name.clone(),
        file: path.to_string(),
        linking,
        status,
        readings,
        counts: res.counts.into(),
        failures: res.failures.iter().map(FailureReport::from).collect(),
        missing,
        unexpected,
        missing_failures,
        error: None,
    }
}

/// Parses and runs problem text. `path` is used for naming and reporting only.
pub fn run_text(text: &str, path: &str, opts: &RunOptions) -> RunReport {
    let stem = Path::new(path)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(path);
    match parse_problem(text, stem) {
        Ok(file) => run(&file, path, opts),
        Err(e) => RunReport::empty(stem, path, opts.linking.unwrap_or(false), Status::ParseError, e.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub status: Status,
    pub runs: Vec<RunReport>,
}

impl CorpusReport {
    pub fn new(runs: Vec<RunReport>) -> CorpusReport {
        let status = runs
            .iter()
            .map(|r| r.status)
            .filter(|s| s.exit_code() != 0)
            .max()
            .unwrap_or(Status::Pass);
        CorpusReport { status, runs }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s: String = self.runs.iter().map(RunReport::to_text).collect();
        let _ = writeln!(s, "corpus: {}", self.status.as_str());
        s
    }
}

/// Runs every `.ell` file in `dir`, in file-name order.
pub fn run_corpus(dir: &Path, opts: &RunOptions) -> std::io::Result<CorpusReport> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ell"))
        .collect();
    files.sort();
    let mut runs = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f)?;
        let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        runs.push(run_text(&text, &name, opts));
    }
    Ok(CorpusReport::new(runs))
}
