use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use vxcheck::elemprop::{replay_chain, ElemConfig, GenConfig, TripleInstance};
use vxcheck::expansion::{expand_on_window, identity_lhs, prove_identity, Identity, Var, Window};
use vxcheck::valg::{
    all_reports, borcherds_family, check_axiom, matrix_from_reports, mutants, Axiom, CheckParams, PropertyReport,
    RowStatus, StructureConfig, ValgError, Verdict, VertexStructure,
};
use vxcheck::vmod::{all_module_reports, main_theorem_harness, module_family, module_mutants, ModuleConfig};

use crate::report::{Report, Status};

/// A command that could not run. Bad input exits 3; an internal inconsistency exits 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Inconsistent(String),
}

impl From<ValgError> for CliError {
    fn from(e: ValgError) -> Self {
        match e {
            ValgError::Invalid(_) | ValgError::Refused(_) | ValgError::NoVacuum(_) => CliError::Config(e.to_string()),
            _ => CliError::Inconsistent(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

const DELTA_WINDOW: i64 = 6;

pub fn prove_deltas(rep: &mut Report) -> Result<()> {
    let window = Window::cube(["x0", "x1", "x2"].map(Var::named), DELTA_WINDOW);
    for which in [Identity::TwoTerm, Identity::ThreeTerm] {
        let start = Instant::now();
        let id = format!("delta.{}", which.name());
        let lhs = identity_lhs(which);
        let on_window = expand_on_window(&lhs, &window).map_err(|e| CliError::Inconsistent(e.to_string()))?;
        match prove_identity(which) {
            Ok(trace) => {
                rep.note(format!("{id}: {}", trace.lhs));
                for (i, t) in trace.expanded.iter().enumerate() {
                    rep.note(format!("  [{}] {t}", i + 1));
                }
                for s in &trace.steps {
                    rep.note(format!("  {}  {} -> {}", s.rule, &s.before[..12], &s.after[..12]));
                }
                rep.note(format!("  = {}", trace.residual));
                let verdict = if on_window.is_empty() { Verdict::Pass } else { Verdict::Fail };
                if verdict == Verdict::Fail {
                    rep.raise(Status::Violation);
                }
                let witness = json!({
                    "pairs": trace.pairs,
                    "steps": trace.steps,
                    "residual": trace.residual,
                    "window": DELTA_WINDOW,
                    "window_nonzero": on_window.len(),
                });
                rep.push("delta", &id, &trace.lhs, verdict, witness, start);
            }
            Err(e) => {
                rep.raise(Status::Violation);
                rep.push("delta", &id, &lhs.to_string(), Verdict::Fail, json!({ "error": e.to_string() }), start);
            }
        }
    }
    Ok(())
}

const CHAIN_ANCHOR: &str =
    "(x1-x2)^m f(x1,x2) = (x1-x2)^m g(x2,x1), (x0+x2)^m f(x0+x2,x2) = (x0+x2)^m h(x2,x0), (x1-x0)^m g(-x0+x1,x1) = (x1-x0)^m h(x1-x0,x0)";

pub fn replay_elem(rep: &mut Report, n: u64, params: &CheckParams) -> Result<()> {
    let mut cfg = ElemConfig::default();
    if let Some(w) = params.window {
        cfg.window = w;
    }
    if let Some(m) = params.m_max {
        cfg.m_max = m;
    }
    let gen = GenConfig::default();
    let seeds: Vec<u64> = (0..n).map(|i| rep.seed.wrapping_add(i)).collect();
    let runs: Vec<_> = seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            let r = TripleInstance::generate(seed, &gen, &cfg).and_then(|t| replay_chain(&t, &cfg));
            (seed, r, start)
        })
        .collect();
    for (seed, r, start) in runs {
        let r = r.map_err(|e| CliError::Inconsistent(format!("instance {seed}: {e}")))?;
        let pole = r.poles.0.max(r.poles.1).max(r.poles.2);
        let closes = r.closes(pole + 2);
        if !closes {
            rep.raise(Status::Violation);
        }
        let witness = json!({
            "poles": [r.poles.0, r.poles.1, r.poles.2],
            "premises_hold": r.premises_hold,
            "a_holds": r.a_holds,
            "witnesses": r.witnesses,
            "reconstructions": r.reconstructions,
        });
        let verdict = if closes { Verdict::Pass } else { Verdict::Fail };
        rep.push(&format!("instance-{seed}"), "elem.chain", CHAIN_ANCHOR, verdict, witness, start);
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "structure".into())
}

pub fn load_structure(path: &Path) -> Result<VertexStructure> {
    let cfg = StructureConfig::parse(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.build(&stem(path)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_module(path: &Path) -> Result<vxcheck::vmod::ModuleStructure> {
    let cfg = ModuleConfig::parse(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.build(&stem(path)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Every `.cfg` or `.json` file under `dir`, in path order.
fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = fs::read_dir(&d).map_err(|e| CliError::Config(format!("{}: {e}", d.display())))?;
        for e in entries {
            let p = e.map_err(|e| CliError::Config(e.to_string()))?.path();
            if p.is_dir() {
                stack.push(p);
            } else if matches!(p.extension().and_then(|x| x.to_str()), Some("cfg" | "json")) {
                out.push(p);
            }
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(CliError::Config(format!("no .cfg files under {}", dir.display())));
    }
    Ok(out)
}

fn push_property<A: vxcheck::valg::Checkable + serde::Serialize>(
    rep: &mut Report,
    subject: &str,
    r: &PropertyReport<A>,
    start: Instant,
) {
    if r.verdict == Verdict::Fail {
        rep.raise(Status::Fail);
    }
    rep.push(subject, r.axiom.id(), &r.anchor, r.verdict, &r.witness, start);
}

pub fn check(rep: &mut Report, path: &Path, axioms: &[Axiom], params: &CheckParams) -> Result<()> {
    let s = load_structure(path)?;
    let axioms: Vec<Axiom> = if axioms.is_empty() { Axiom::ALL.to_vec() } else { axioms.to_vec() };
    let reports: Vec<_> = axioms
        .par_iter()
        .map(|&a| {
            let start = Instant::now();
            let r = if a.needs_vacuum() && s.vacuum().is_none() {
                Ok(na_report(a))
            } else {
                check_axiom(&s, a, params)
            };
            (r, start)
        })
        .collect();
    for (r, start) in reports {
        push_property(rep, &s.name, &r?, start);
    }
    Ok(())
}

fn na_report(a: Axiom) -> PropertyReport {
    PropertyReport {
        axiom: a,
        anchor: vxcheck::valg::Checkable::anchor(a).to_string(),
        verdict: Verdict::NotApplicable,
        witness: None,
        window: None,
        m_max: None,
    }
}

pub fn check_module(rep: &mut Report, path: &Path, params: &CheckParams) -> Result<()> {
    let m = load_module(path)?;
    let start = Instant::now();
    for r in all_module_reports(&m, params)?.values() {
        push_property(rep, &m.name, r, start);
    }
    Ok(())
}

pub fn implication_matrix(rep: &mut Report, dir: &Path, params: &CheckParams) -> Result<()> {
    let corpus: Vec<VertexStructure> = corpus_files(dir)?.iter().map(|p| load_structure(p)).collect::<Result<_>>()?;
    let start = Instant::now();
    let reports: Vec<(String, BTreeMap<Axiom, PropertyReport>)> = corpus
        .par_iter()
        .map(|s| all_reports(s, params).map(|r| (s.name.clone(), r)))
        .collect::<std::result::Result<_, _>>()?;
    for (name, rs) in &reports {
        for r in rs.values() {
            rep.push(name, r.axiom.id(), &r.anchor, r.verdict, &r.witness, start);
        }
    }
    let matrix = matrix_from_reports(&reports);
    for row in &matrix.rows {
        if row.status == RowStatus::Violated {
            rep.raise(Status::Violation);
        }
        let witness = json!({ "exercised_by": row.exercised_by, "violations": row.violations });
        rep.push("corpus", &row.id, &row.anchor, row.status, witness, start);
    }
    rep.note(format!("{} members, {} rows, {} violations", corpus.len(), matrix.rows.len(), matrix.violations()));
    Ok(())
}

pub fn main_theorem(rep: &mut Report, dir: &Path, params: &CheckParams) -> Result<()> {
    let corpus = corpus_files(dir)?.iter().map(|p| load_module(p)).collect::<Result<Vec<_>>>()?;
    let start = Instant::now();
    let h = main_theorem_harness(&corpus, params)?;
    for m in &h.members {
        for r in m.reports.values() {
            rep.push(&m.member, r.axiom.id(), &r.anchor, r.verdict, &r.witness, start);
        }
    }
    for row in &h.rows {
        if row.status == RowStatus::Violated {
            rep.raise(Status::Violation);
        }
        let witness = json!({
            "exercised_by": row.exercised_by,
            "violations": row.violations,
            "counterexamples": row.counterexamples,
        });
        rep.push("corpus", &row.id, &row.anchor, row.status, witness, start);
    }
    rep.note(format!("{} members, {} rows, {} violations", h.members.len(), h.rows.len(), h.violations()));
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Config(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Writes `structures/`, `structures/mutants/`, `modules/` and `modules/mutants/` under `out`.
pub fn emit_examples(rep: &mut Report, out: &Path) -> Result<()> {
    let start = Instant::now();
    let mut files = Vec::new();
    for s in borcherds_family() {
        files.push((out.join("structures").join(format!("{}.cfg", s.name)), StructureConfig::of(&s).to_json()));
    }
    for (m, s) in mutants() {
        files.push((out.join("structures/mutants").join(format!("{}.cfg", m.name)), StructureConfig::of(&s).to_json()));
    }
    for m in module_family() {
        files.push((out.join("modules").join(format!("{}.cfg", m.name)), ModuleConfig::of(&m).to_json()));
    }
    for (mm, m) in module_mutants() {
        files.push((out.join("modules/mutants").join(format!("{}.cfg", mm.name)), ModuleConfig::of(&m).to_json()));
    }
    for (path, text) in &files {
        write(path, &format!("{text}\n"))?;
        let rel = path.strip_prefix(out).unwrap_or(path).display().to_string();
        rep.push(&rel, "examples.emit", "config", "WRITTEN", serde_json::Value::Null, start);
    }
    Ok(())
}
