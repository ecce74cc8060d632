//! Command-line surface over the delpezzo library.
//!
//! Exit codes: 0 on success / accepted verification, 1 on verification
//! failure or an unsatisfied search, 2 on input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use delpezzo::certify::{self, Certificate, SearchMode};
use delpezzo::corpus::{self, CorpusSource};
use delpezzo::curves::dynkin_type;
use delpezzo::elliptic::{
    elliptic_nonbig_identity, enumerate_assignments, FiberAssignment, KodairaTag,
};
use delpezzo::fibration::{pencil, pencil_from_line, reducible_members, vmrt_class, PencilSpec};
use delpezzo::hierarchy::classification_report;
use delpezzo::num::format_rat;
use delpezzo::orbifold::orbifold_invariants;
use delpezzo::picard::{Basis, BubbleConfig, DivisorClass, SurfaceModel};

#[derive(Parser)]
#[command(
    name = "delpezzo",
    version,
    about = "Negative curves, VMRT classes, and bigness certificates for weak del Pezzo surfaces"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory with configs/ and certs/ overriding the embedded corpus.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Degree, canonical class, negative curves, and ADE type of a surface.
    Analyze(AnalyzeArgs),
    /// Pencil class, reducible members, and the total dual VMRT class.
    Vmrt(VmrtArgs),
    /// Verify or search certificates.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Kodaira fiber enumeration and non-bigness identities.
    #[command(subcommand)]
    Elliptic(EllipticCmd),
    /// Orbifold Chern numbers of the anticanonical model.
    Orbifold(SurfaceArg),
    /// Specialization hierarchies and classification reports.
    #[command(subcommand)]
    Hierarchy(HierarchyCmd),
    /// Validate every fixture and certificate in the corpus.
    Suite,
}

#[derive(Args)]
struct SurfaceArg {
    /// Fixture name or path to a configuration file.
    surface: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    surface: String,
    /// Append the VMRT computation of a pencil: line:P | conic:A,B,C,D | from-line:C0,C1,...
    #[arg(long)]
    vmrt: Option<String>,
}

#[derive(Args)]
struct VmrtArgs {
    surface: String,
    /// Pencil spec: line:P | conic:A,B,C,D | from-line:C0,C1,...
    #[arg(long)]
    pencil: String,
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Check a certificate file against a surface; exit 0 iff accepted.
    Verify {
        surface: String,
        certificate: PathBuf,
    },
    /// Search for a certificate; writes it to --out when found.
    Search {
        surface: String,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Big,
    Nonbig,
}

#[derive(Subcommand)]
enum EllipticCmd {
    /// Enumerate singular-fiber multisets by Euler total.
    Enum {
        #[arg(long, default_value_t = 12)]
        euler: u32,
        #[arg(long, default_value_t = 2)]
        min_nonreduced: usize,
    },
    /// Produce and verify the identity k Y = k zeta + Pi*(effective).
    Identity {
        /// Comma-separated fiber tags, e.g. "I0*,I0*" or "I1*,I4,I1".
        #[arg(long)]
        fibers: String,
        #[arg(long, default_value_t = 1)]
        halphen: u32,
    },
}

#[derive(Subcommand)]
enum HierarchyCmd {
    /// Propagate the verified seeds and compare with the classification.
    Report {
        #[arg(long)]
        degree: u8,
    },
    /// Dump a built-in hierarchy graph as JSON.
    Dag {
        /// degree4 | degree3 | cross-degree
        name: String,
    },
}

fn main() -> ExitCode {
    // Die quietly on closed pipes instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let source = CorpusSource::from_dir(cli.corpus.as_deref());
    match run(&cli.command, cli.format, &source) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Loads a surface from a fixture name or a file path.
fn load_surface(source: &CorpusSource, arg: &str) -> anyhow::Result<SurfaceModel> {
    let path = Path::new(arg);
    let config = if path.exists() {
        let text = std::fs::read_to_string(path)?;
        BubbleConfig::from_json(&text)?
    } else if corpus::fixture_names().contains(&arg) {
        corpus::load_config(source, arg)?
    } else {
        anyhow::bail!("no file or fixture named {arg}");
    };
    Ok(SurfaceModel::build(config)?)
}

fn parse_pencil(s: &SurfaceModel, spec: &str) -> anyhow::Result<delpezzo::fibration::PencilClass> {
    if let Some(p) = spec.strip_prefix("line:") {
        let id: usize = p.parse()?;
        return Ok(pencil(s, &PencilSpec::LineThrough(id))?);
    }
    if let Some(ids) = spec.strip_prefix("conic:") {
        let ids: Vec<usize> = ids
            .split(',')
            .map(|v| v.trim().parse())
            .collect::<Result<_, _>>()?;
        return Ok(pencil(s, &PencilSpec::ConicThrough(ids))?);
    }
    if let Some(coords) = spec.strip_prefix("from-line:") {
        let coords: Vec<i64> = coords
            .split(',')
            .map(|v| v.trim().parse())
            .collect::<Result<_, _>>()?;
        return Ok(pencil_from_line(s, &DivisorClass::total_i64(&coords))?);
    }
    anyhow::bail!("pencil spec must be line:P, conic:A,B,C,D, or from-line:C0,C1,...")
}

fn class_json(s: &SurfaceModel, c: &DivisorClass) -> serde_json::Value {
    let total = s.to_total(c);
    let strict = s.to_strict(c);
    json!({
        "total": total.coords().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "strict": strict.coords().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })
}

fn vmrt_json(
    s: &SurfaceModel,
    p: &delpezzo::fibration::PencilClass,
) -> anyhow::Result<serde_json::Value> {
    let members = reducible_members(s, p)?;
    let v = vmrt_class(s, p)?;
    Ok(json!({
        "pencil": class_json(s, &p.class),
        "members": members.iter().map(|m| {
            m.components.iter().map(|(c, mult)| json!({
                "class": class_json(s, c),
                "multiplicity": mult,
            })).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "vmrt": {
            "zeta": format_rat(&v.zeta),
            "base": class_json(s, &v.base),
            "text": {
                "total": v.display(s, Basis::Total),
                "strict": v.display(s, Basis::Strict),
            },
        },
    }))
}

fn print_vmrt_text(s: &SurfaceModel, p: &delpezzo::fibration::PencilClass) -> anyhow::Result<()> {
    println!(
        "pencil F = {}  (strict {})",
        p.class.display(),
        s.to_strict(&p.class).display()
    );
    let members = reducible_members(s, p)?;
    for m in &members {
        let parts: Vec<String> = m
            .components
            .iter()
            .map(|(c, mult)| {
                if *mult == 1 {
                    format!("({})", c.display())
                } else {
                    format!("{mult}({})", c.display())
                }
            })
            .collect();
        println!("member: {}", parts.join(" + "));
    }
    let v = vmrt_class(s, p)?;
    println!("vmrt (total):  {}", v.display(s, Basis::Total));
    println!("vmrt (strict): {}", v.display(s, Basis::Strict));
    Ok(())
}

fn run(command: &Command, format: Format, source: &CorpusSource) -> anyhow::Result<ExitCode> {
    match command {
        Command::Analyze(args) => {
            let s = load_surface(source, &args.surface)?;
            let report = dynkin_type(&s)?;
            if format == Format::Json {
                let mut obj = json!({
                    "name": s.name(),
                    "degree": s.degree(),
                    "canonical": class_json(&s, &s.canonical_class(Basis::Total)),
                    "minus2": s.irreducible_minus2().iter().map(|c| class_json(&s, c)).collect::<Vec<_>>(),
                    "lines": s.lines().iter().map(|c| class_json(&s, c)).collect::<Vec<_>>(),
                    "line_count": s.lines().len(),
                    "dynkin": report.label(),
                    "components": report.components.iter().map(|c| c.kind.label()).collect::<Vec<_>>(),
                });
                if let Some(spec) = &args.vmrt {
                    let p = parse_pencil(&s, spec)?;
                    obj["vmrt"] = vmrt_json(&s, &p)?;
                }
                println!("{}", serde_json::to_string_pretty(&obj)?);
            } else {
                println!("surface {}  (degree {})", s.name(), s.degree());
                println!(
                    "K = {}  (strict {})",
                    s.canonical_class(Basis::Total).display(),
                    s.canonical_class(Basis::Strict).display()
                );
                println!(
                    "(-2)-curves ({}), type {}:",
                    s.irreducible_minus2().len(),
                    report.label()
                );
                for c in s.irreducible_minus2() {
                    println!("  {}  (strict {})", c.display(), s.to_strict(c).display());
                }
                println!("lines ({}):", s.lines().len());
                for c in s.lines() {
                    println!("  {}  (strict {})", c.display(), s.to_strict(c).display());
                }
                if let Some(spec) = &args.vmrt {
                    let p = parse_pencil(&s, spec)?;
                    print_vmrt_text(&s, &p)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Vmrt(args) => {
            let s = load_surface(source, &args.surface)?;
            let p = parse_pencil(&s, &args.pencil)?;
            if format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&vmrt_json(&s, &p)?)?);
            } else {
                print_vmrt_text(&s, &p)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify(cmd) => match cmd {
            CertifyCmd::Verify {
                surface,
                certificate,
            } => {
                let s = load_surface(source, surface)?;
                let text = std::fs::read_to_string(certificate)?;
                let cert = Certificate::from_json(&text)?;
                let verdict = certify::verify(&s, &cert)?;
                let accepted = verdict.is_accept();
                if format == Format::Json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "kind": cert.kind.as_str(),
                            "surface": s.name(),
                            "accepted": accepted,
                            "reason": verdict.reason(),
                        }))?
                    );
                } else if accepted {
                    println!(
                        "accepted: {} certificate for {}",
                        cert.kind.as_str(),
                        s.name()
                    );
                } else {
                    println!(
                        "rejected: {}",
                        verdict.reason().unwrap_or("unspecified condition failed")
                    );
                }
                Ok(if accepted {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                })
            }
            CertifyCmd::Search { surface, mode, out } => {
                let s = load_surface(source, surface)?;
                let mode = match mode {
                    Mode::Big => SearchMode::Big,
                    Mode::Nonbig => SearchMode::NonBig,
                };
                match certify::search_certificate(&s, mode, None)? {
                    Some(cert) => {
                        let json = cert.to_json();
                        if let Some(path) = out {
                            std::fs::write(path, &json)?;
                        }
                        if format == Format::Json {
                            println!("{json}");
                        } else {
                            println!(
                                "found {} certificate with {} = {}",
                                cert.kind.as_str(),
                                if cert.kind == certify::CertKind::NonBig {
                                    "k"
                                } else {
                                    "m"
                                },
                                format_rat(&cert.k_or_m)
                            );
                        }
                        Ok(ExitCode::SUCCESS)
                    }
                    None => {
                        if format == Format::Json {
                            println!("{}", json!({ "found": false }));
                        } else {
                            println!("none");
                        }
                        Ok(ExitCode::from(1))
                    }
                }
            }
        },
        Command::Elliptic(cmd) => match cmd {
            EllipticCmd::Enum {
                euler,
                min_nonreduced,
            } => {
                let found = enumerate_assignments(*euler, *min_nonreduced);
                if format == Format::Json {
                    let list: Vec<Vec<String>> = found
                        .iter()
                        .map(|tags| tags.iter().map(ToString::to_string).collect())
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&list)?);
                } else {
                    for tags in &found {
                        let parts: Vec<String> = tags.iter().map(ToString::to_string).collect();
                        println!("{}", parts.join(" + "));
                    }
                    println!("{} assignments", found.len());
                }
                Ok(ExitCode::SUCCESS)
            }
            EllipticCmd::Identity { fibers, halphen } => {
                let tags: Vec<KodairaTag> = fibers
                    .split(',')
                    .map(KodairaTag::parse)
                    .collect::<Result<_, _>>()?;
                let a = FiberAssignment::new(&tags, *halphen)?;
                let identity = elliptic_nonbig_identity(&a)?;
                if format == Format::Json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "fibers": a.label(),
                            "halphen_multiplicity": halphen,
                            "k": identity.k,
                            "identity": identity.render(&a),
                        }))?
                    );
                } else {
                    println!("{}", identity.render(&a));
                }
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Orbifold(args) => {
            let s = load_surface(source, &args.surface)?;
            let inv = orbifold_invariants(&s)?;
            if format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "surface": s.name(),
                        "c1_sq": format_rat(&inv.c1_sq),
                        "c2": format_rat(&inv.c2),
                        "s2": format_rat(&inv.s2),
                    }))?
                );
            } else {
                println!("c1^2 = {}", format_rat(&inv.c1_sq));
                println!("c2   = {}", format_rat(&inv.c2));
                println!("s2   = {}", format_rat(&inv.s2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Hierarchy(HierarchyCmd::Dag { name }) => {
            let dag = delpezzo::hierarchy::load_dag(delpezzo::hierarchy::DagName::parse(name)?)?;
            println!("{}", dag.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Hierarchy(HierarchyCmd::Report { degree }) => {
            let seeds = corpus::classification_seeds(source, *degree)?;
            let report = classification_report(*degree, &seeds)?;
            let ok = report.matches_expectation();
            if format == Format::Json {
                let labels: serde_json::Map<String, serde_json::Value> = report
                    .labeling
                    .labels
                    .iter()
                    .map(|(node, (status, _))| {
                        (
                            node.clone(),
                            json!({
                                "status": format!("{status:?}"),
                                "chain": report.labeling.chain(node),
                            }),
                        )
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "degree": degree,
                        "matches_expectation": ok,
                        "discrepancies": report.discrepancies,
                        "labels": labels,
                    }))?
                );
            } else {
                let dag = delpezzo::hierarchy::load_dag(match degree {
                    4 => delpezzo::hierarchy::DagName::Degree4,
                    _ => delpezzo::hierarchy::DagName::Degree3,
                })?;
                for node in &dag.nodes {
                    let status = report
                        .labeling
                        .status(&node.id)
                        .map_or("Undetermined".to_string(), |s| format!("{s:?}"));
                    println!("{:10} {}", status, report.labeling.chain(&node.id));
                }
                if ok {
                    println!("report matches the published degree-{degree} classification");
                } else {
                    for d in &report.discrepancies {
                        println!("DISCREPANCY: {d}");
                    }
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Suite => {
            let report = corpus::run_suite(source);
            if format == Format::Json {
                println!("{}", report.to_json());
            } else {
                for check in &report.checks {
                    println!(
                        "{} {:40} {}",
                        if check.ok { "ok  " } else { "FAIL" },
                        check.name,
                        check.detail
                    );
                }
                let failed = report.checks.iter().filter(|c| !c.ok).count();
                println!("{} checks, {} failed", report.checks.len(), failed);
            }
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
