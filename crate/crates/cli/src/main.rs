//! Command-line frontend for the exact Cech-Dolbeault engine.
//!
//! Every command loads a bundle (a builtin spec such as `torus:2`, a
//! bundle file, or a bundle directory), runs library checks over it, and
//! prints one deterministic report. Exit codes: 0 all checks passed,
//! 1 a checked property failed (the report names the witness), 2 the
//! input could not be read or parsed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cechdol::{
    assemble_les, blowup_decomposition, builtin_bundle, builtin_bundle_names, bundle_to_string,
    cech_cohomology, check_relative_injectivity, compare_forms_currents, load_bundle,
    load_bundle_dir, relative_complex, relative_vs_cone_iso, save_bundle, save_bundle_dir,
    ses_of_pair, total_complex_full, BlowupOutcome, CoverDiagram, Error, ModelBundle,
    MorphismPairings, Report, ReportSection, Result,
};

#[derive(Parser)]
#[command(
    name = "cechdol",
    version,
    about = "Exact Cech-Dolbeault cohomology checks"
)]
struct Cli {
    /// Emit sorted `key = value` lines instead of a table.
    #[arg(long, global = true)]
    structured: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every structural validation the bundle supports.
    Validate {
        /// Builtin spec (torus:N, sheets:K, blowup:I, random:SEED,
        /// nilpotent), bundle file, or bundle directory.
        bundle: String,
    },
    /// Cohomology dimensions of every diagram in the bundle.
    Cohomology {
        bundle: String,
        /// Only this form degree.
        #[arg(long)]
        p: Option<i32>,
        /// Only this antiholomorphic degree.
        #[arg(long)]
        q: Option<i32>,
    },
    /// Relative cohomology of each two-set diagram, cross-checked
    /// against the mapping cone of the restriction.
    Relative {
        bundle: String,
        /// Label of the omitted set (defaults to the first label).
        #[arg(long)]
        omit: Option<String>,
    },
    /// Long exact sequence of each two-set pair, with rank witnesses.
    Les {
        bundle: String,
        #[arg(long)]
        p: Option<i32>,
        #[arg(long)]
        omit: Option<String>,
    },
    /// Compare the form-side and current-side relative sequences.
    DualCompare {
        bundle: String,
        #[arg(long)]
        omit: Option<String>,
    },
    /// Degree, projection identity, and injectivity certificates for
    /// every morphism with pairing data.
    MorphismCheck {
        bundle: String,
        #[arg(long)]
        omit: Option<String>,
    },
    /// Blow-up style decomposition check for every morphism.
    Blowup {
        bundle: String,
        #[arg(long)]
        omit: Option<String>,
    },
    /// Write a bundle to a file or directory, or print it.
    EmitBundle {
        bundle: String,
        /// Write one bundle file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a bundle directory here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, true)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok((text, false)) => {
            print!("{text}");
            ExitCode::from(1)
        }
        Err(e @ (Error::Parse { .. } | Error::Io { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("check failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    match &cli.command {
        Command::Validate { bundle } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_validate(&b);
            Ok((report.render(cli.structured), pass))
        }
        Command::Cohomology { bundle, p, q } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_cohomology(&b, *p, *q);
            Ok((report.render(cli.structured), pass))
        }
        Command::Relative { bundle, omit } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_relative(&b, omit.as_deref());
            Ok((report.render(cli.structured), pass))
        }
        Command::Les { bundle, p, omit } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_les(&b, *p, omit.as_deref());
            Ok((report.render(cli.structured), pass))
        }
        Command::DualCompare { bundle, omit } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_dual_compare(&b, omit.as_deref());
            Ok((report.render(cli.structured), pass))
        }
        Command::MorphismCheck { bundle, omit } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_morphism_check(&b, omit.as_deref());
            Ok((report.render(cli.structured), pass))
        }
        Command::Blowup { bundle, omit } => {
            let b = load_input(bundle)?;
            let (report, pass) = cmd_blowup(&b, omit.as_deref());
            Ok((report.render(cli.structured), pass))
        }
        Command::EmitBundle {
            bundle,
            out,
            out_dir,
        } => {
            let b = load_input(bundle)?;
            let mut wrote = Vec::new();
            if let Some(path) = out {
                save_bundle(path, &b)?;
                wrote.push(format!("wrote {}\n", path.display()));
            }
            if let Some(dir) = out_dir {
                save_bundle_dir(dir, &b)?;
                wrote.push(format!("wrote {}\n", dir.display()));
            }
            if wrote.is_empty() {
                Ok((bundle_to_string(&b), true))
            } else {
                Ok((wrote.concat(), true))
            }
        }
    }
}

/// A bundle argument is a path when one exists on disk, otherwise a
/// builtin spec. Anything with a path separator must exist as a file.
fn load_input(arg: &str) -> Result<ModelBundle> {
    let path = Path::new(arg);
    if path.is_dir() {
        load_bundle_dir(path)
    } else if path.exists() {
        load_bundle(path)
    } else if arg.contains(['/', '\\']) {
        Err(Error::Io {
            path: arg.to_string(),
            message: "no such file or directory".into(),
        })
    } else {
        builtin_bundle(arg).map_err(|e| match e {
            Error::Parse {
                file,
                line,
                message,
            } => Error::Parse {
                file,
                line,
                message: format!(
                    "{message}; builtin bundles: {}",
                    builtin_bundle_names().join(", ")
                ),
            },
            other => other,
        })
    }
}

fn omit_label<'a>(d: &'a CoverDiagram, flag: Option<&'a str>) -> &'a str {
    flag.unwrap_or(&d.index_set[0])
}

/// Record a failed check in the section and clear the pass flag.
fn fail(sec: &mut ReportSection, pass: &mut bool, e: &Error) {
    sec.row("status", format!("failed: {e}"));
    *pass = false;
}

fn cmd_validate(b: &ModelBundle) -> (Report, bool) {
    let mut report = Report::new(format!("validate {}", b.name));
    let mut pass = true;
    for (name, d) in &b.diagrams {
        let mut sec = ReportSection::new(format!("diagram {name}"));
        match d.check().and_then(|()| total_complex_full(d)) {
            Ok(total) => {
                sec.row("pieces", d.simplices().count());
                sec.row("total dimension", total.complex.total_dim());
                sec.row("status", "ok");
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    for (name, m) in &b.models {
        let mut sec = ReportSection::new(format!("model {name}"));
        match m.check() {
            Ok(()) => {
                sec.row("status", "ok");
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    for (name, set) in &b.pairings {
        let mut sec = ReportSection::new(format!("pairings {name}"));
        let bad = set
            .iter()
            .find_map(|(s, pd)| pd.verify().err().map(|e| (s, e)));
        match bad {
            None => {
                sec.row("pieces", set.len());
                sec.row("status", "ok");
            }
            Some((s, e)) => {
                sec.row("piece", s.key());
                fail(&mut sec, &mut pass, &e);
            }
        }
        report.push(sec);
    }
    for (name, m) in &b.morphisms {
        let mut sec = ReportSection::new(format!("morphism {name}"));
        match m.check() {
            Ok(()) => {
                sec.row("source", &m.source.name);
                sec.row("target", &m.target.name);
                sec.row("status", "ok");
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    (report, pass)
}

fn cmd_cohomology(b: &ModelBundle, p: Option<i32>, q: Option<i32>) -> (Report, bool) {
    let mut report = Report::new(format!("cohomology {}", b.name));
    let mut pass = true;
    for (name, d) in &b.diagrams {
        let mut sec = ReportSection::new(format!("diagram {name}"));
        let support = match total_complex_full(d) {
            Ok(total) => total.complex.support(),
            Err(e) => {
                fail(&mut sec, &mut pass, &e);
                report.push(sec);
                continue;
            }
        };
        for at in support {
            if p.is_some_and(|v| v != at.p) || q.is_some_and(|v| v != at.q) {
                continue;
            }
            match cech_cohomology(d, at.p, at.q) {
                Ok(h) => {
                    sec.row(format!("h {} {}", at.p, at.q), h.dim);
                    if let Some(want) = b.expected.get(&format!("h.{}.{}", at.p, at.q)) {
                        if want != &h.dim.to_string() {
                            sec.row(
                                format!("h {} {} expected", at.p, at.q),
                                format!("{want} (mismatch)"),
                            );
                            pass = false;
                        }
                    }
                }
                Err(e) => fail(&mut sec, &mut pass, &e),
            }
        }
        report.push(sec);
    }
    (report, pass)
}

fn cmd_relative(b: &ModelBundle, omit: Option<&str>) -> (Report, bool) {
    let mut report = Report::new(format!("relative {}", b.name));
    let mut pass = true;
    for (name, d) in &b.diagrams {
        let mut sec = ReportSection::new(format!("diagram {name}"));
        if d.index_set.len() != 2 {
            sec.row("status", "skipped: not a two-set cover");
            report.push(sec);
            continue;
        }
        let omit = omit_label(d, omit);
        let outcome = relative_complex(d, omit).and_then(|rel| {
            relative_vs_cone_iso(d, omit)?;
            Ok(rel)
        });
        match outcome {
            Ok(rel) => {
                sec.row("omitted", rel.omitted.key());
                for at in rel.complex.support() {
                    match rel.complex.cohomology(at) {
                        Ok(h) => {
                            sec.row(format!("relative h {} {}", at.p, at.q), h.dim);
                        }
                        Err(e) => fail(&mut sec, &mut pass, &e),
                    }
                }
                sec.row("cone comparison", "isomorphic");
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    (report, pass)
}

fn cmd_les(b: &ModelBundle, p: Option<i32>, omit: Option<&str>) -> (Report, bool) {
    let mut report = Report::new(format!("les {}", b.name));
    let mut pass = true;
    for (name, d) in &b.diagrams {
        if d.index_set.len() != 2 {
            let mut sec = ReportSection::new(format!("diagram {name}"));
            sec.row("status", "skipped: not a two-set cover");
            report.push(sec);
            continue;
        }
        let omit = omit_label(d, omit);
        let ses = match ses_of_pair(d, omit) {
            Ok(ses) => ses,
            Err(e) => {
                let mut sec = ReportSection::new(format!("diagram {name}"));
                fail(&mut sec, &mut pass, &e);
                report.push(sec);
                continue;
            }
        };
        let mut ps: Vec<i32> = ses.mid.support().iter().map(|at| at.p).collect();
        ps.dedup();
        for column in ps {
            if p.is_some_and(|v| v != column) {
                continue;
            }
            let mut sec = ReportSection::new(format!("diagram {name} column {column}"));
            match assemble_les(&ses, column) {
                Ok(les) => {
                    for node in &les.nodes {
                        sec.row(
                            &node.label,
                            format!(
                                "dim {} incoming rank {} outgoing kernel {}{}",
                                node.space_dim,
                                node.incoming_rank,
                                node.outgoing_kernel_dim,
                                if node.is_exact() { "" } else { " NOT EXACT" }
                            ),
                        );
                    }
                    sec.row("exact", les.is_exact());
                    pass &= les.is_exact();
                }
                Err(e) => fail(&mut sec, &mut pass, &e),
            }
            report.push(sec);
        }
    }
    (report, pass)
}

fn cmd_dual_compare(b: &ModelBundle, omit: Option<&str>) -> (Report, bool) {
    let mut report = Report::new(format!("dual-compare {}", b.name));
    let mut pass = true;
    for (name, d) in &b.diagrams {
        let mut sec = ReportSection::new(format!("diagram {name}"));
        let Some(pairings) = b.pairings.get(name) else {
            sec.row("status", "skipped: no pairings in the bundle");
            report.push(sec);
            continue;
        };
        if d.index_set.len() != 2 {
            sec.row("status", "skipped: not a two-set cover");
            report.push(sec);
            continue;
        }
        let omit = omit_label(d, omit);
        match compare_forms_currents(d, pairings, omit) {
            Ok(rep) => {
                for (at, forms, currents, iso) in &rep.relative_pairs {
                    sec.row(
                        format!("relative {} {}", at.p, at.q),
                        format!(
                            "forms {forms} currents {currents}{}",
                            if *iso { "" } else { " NOT ISOMORPHIC" }
                        ),
                    );
                }
                sec.row("ladder squares", rep.ladders.iter().all(|l| l.all_ok()));
                sec.row("equivalence", rep.equivalence_holds());
                pass &= rep.equivalence_holds();
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    (report, pass)
}

fn cmd_morphism_check(b: &ModelBundle, omit: Option<&str>) -> (Report, bool) {
    let mut report = Report::new(format!("morphism-check {}", b.name));
    let mut pass = true;
    for (name, m) in &b.morphisms {
        let mut sec = ReportSection::new(format!("morphism {name}"));
        let (Some(src), Some(tgt)) = (
            b.pairings.get(&m.source.name),
            b.pairings.get(&m.target.name),
        ) else {
            sec.row("status", "skipped: no pairings in the bundle");
            report.push(sec);
            continue;
        };
        let pairings = MorphismPairings {
            source: src.clone(),
            target: tgt.clone(),
        };
        let omit = omit_label(&m.target, omit);
        match check_relative_injectivity(m, &pairings, omit) {
            Ok(cert) => {
                sec.row("degree", &cert.degree);
                if let Some(want) = b.expected.get("degree") {
                    if want != &cert.degree.to_string() {
                        sec.row("degree expected", format!("{want} (mismatch)"));
                        pass = false;
                    }
                }
                sec.row("projection identity", "holds");
                for entry in &cert.entries {
                    sec.row(
                        format!("relative pullback {} {}", entry.at.p, entry.at.q),
                        format!(
                            "rank {} of {}{}",
                            entry.rank,
                            entry.domain_dim,
                            if entry.injective() {
                                ""
                            } else {
                                " NOT INJECTIVE"
                            }
                        ),
                    );
                }
                sec.row("injective", cert.all_injective());
                pass &= cert.all_injective();
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    (report, pass)
}

fn cmd_blowup(b: &ModelBundle, omit: Option<&str>) -> (Report, bool) {
    let mut report = Report::new(format!("blowup {}", b.name));
    let mut pass = true;
    for (name, m) in &b.morphisms {
        let mut sec = ReportSection::new(format!("morphism {name}"));
        let omit = omit_label(&m.target, omit);
        match blowup_decomposition(m, omit) {
            Ok(BlowupOutcome::Certified { entries }) => {
                for entry in &entries {
                    sec.row(
                        format!("decomposition {} {}", entry.at.p, entry.at.q),
                        format!(
                            "source {} = target {} + quotient {}",
                            entry.global_source,
                            entry.global_target,
                            entry.quotient_dim()
                        ),
                    );
                    let key = format!("quotient.{}.{}", entry.at.p, entry.at.q);
                    if let Some(want) = b.expected.get(&key) {
                        if want != &entry.quotient_dim().to_string() {
                            sec.row(format!("{key} expected"), format!("{want} (mismatch)"));
                            pass = false;
                        }
                    }
                }
                sec.row("status", "certified");
            }
            Ok(BlowupOutcome::Rejected { witnesses }) => {
                for (i, w) in witnesses.iter().enumerate() {
                    sec.row(format!("witness {i}"), w);
                }
                sec.row("status", "rejected");
                pass = false;
            }
            Err(e) => fail(&mut sec, &mut pass, &e),
        }
        report.push(sec);
    }
    (report, pass)
}
