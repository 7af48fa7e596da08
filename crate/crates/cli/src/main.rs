//! `sepwidth`: exact width parameters, tangles, cloud/flow dichotomy and
//! the proof auditors behind one reproducible command-line surface.
//!
//! Exit codes: 0 success; 1 a verified property was violated (the headline
//! finding of `experiment`/`audit`); 2 usage or parse errors; 3 capability
//! errors (inputs beyond the exact-computation caps).

mod render;

use clap::{Parser, Subcommand, ValueEnum};
use sepwidth_core::cloud::{check_cloud, CheckMode, CloudParams, WCloud};
use sepwidth_core::flow::{tame_cloud_or_skewed, CloudOrSeparation};
use sepwidth_core::graph::{parse_edge_list, Graph, VertexSet};
use sepwidth_core::harness::{
    audit_constants, audit_refinement, generate, ratio_experiment, FamilySpec,
};
use sepwidth_core::rational::{format_rat, parse_rat};
use sepwidth_core::tangle::tangle_number_exact;
use sepwidth_core::width::{
    min_balanced_separation, separation_number_exact, treewidth_exact, ExactLimits, WidthWitness,
};
use sepwidth_core::{Error, ErrorKind};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sepwidth", version, about = "Balanced separations, treewidth, tangles, W-clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum CloudCheckArg {
    Tame,
    StronglyTame,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditKind {
    Constants,
    Refinement,
}

#[derive(Subcommand)]
enum Command {
    /// Exact treewidth with an elimination-order witness
    Tw {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact separation number with a worst-subgraph witness
    Sn {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact tangle number (tiny graphs)
    Tn {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Minimum-order balanced separation
    Minsep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a cloud witness document for (strong) tameness
    Cloud {
        #[arg(long = "in")]
        input: PathBuf,
        /// Cloud witness JSON produced by `pipeline`
        #[arg(long)]
        cloud: PathBuf,
        /// Mass threshold as p/q
        #[arg(long)]
        s: String,
        /// Terminal fraction as p/q
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value_t = CloudCheckArg::Tame)]
        mode: CloudCheckArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the tame-cloud-or-skewed-separation dichotomy
    Pipeline {
        #[arg(long = "in")]
        input: PathBuf,
        /// Terminals, comma separated: 0,1,2
        #[arg(long)]
        w: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Generate a family instance as canonical edge-list text
    Gen {
        /// One family spec: path:N, cycle:N, grid:RxC, complete:N, tree:N, gnp:N:p/q
        #[arg(long)]
        families: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Width-ratio experiment over a family list
    Experiment {
        /// Comma-separated family specs
        #[arg(long)]
        families: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the exact-computation vertex cap for this run
        #[arg(long)]
        nmax: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also emit an SVG bar chart of the ratios
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Arithmetic / refinement audits
    Audit {
        #[arg(long, value_enum, default_value_t = AuditKind::Constants)]
        kind: AuditKind,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
        /// Separator-order budget; defaults to the exact separation number
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(match err.kind() {
                ErrorKind::Parse | ErrorKind::Domain => 2,
                ErrorKind::Capability => 3,
                ErrorKind::Contract => 1,
            })
        }
    }
}

/// Exact-computation caps: the environment override applies to both
/// parameters uniformly.
fn exact_limits() -> Result<ExactLimits, Error> {
    match std::env::var("SEPWIDTH_EXACT_CAP") {
        Ok(text) => {
            let cap: u32 = text
                .parse()
                .map_err(|_| Error::parse(format!("bad SEPWIDTH_EXACT_CAP value {text:?}")))?;
            Ok(ExactLimits::uniform(cap))
        }
        Err(_) => Ok(ExactLimits::default()),
    }
}

fn read_graph(path: &Path) -> Result<Graph, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_edge_list(&text)
}

fn parse_terminals(text: &str, g: &Graph) -> Result<VertexSet, Error> {
    let mut w = VertexSet::new();
    for part in text.split(',') {
        let v: u32 = part
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad vertex id {part:?} in terminal list")))?;
        if v >= g.n() {
            return Err(Error::domain(format!(
                "terminal {v} outside graph with {} vertices",
                g.n()
            )));
        }
        w.insert(v);
    }
    Ok(w)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::parse(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Renders a JSON document in the requested format. CSV is reserved for
/// the experiment table, which has its own mirror.
fn emit(doc: &Value, format: Format, out: Option<&Path>) -> Result<(), Error> {
    let text = match format {
        Format::Json => render::json_bytes(doc),
        Format::Text => render::text_of(doc),
        Format::Csv => {
            return Err(Error::parse(
                "csv format is only available for experiment reports",
            ))
        }
    };
    write_text(out, &text)
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Tw { input, out, format } => {
            let g = read_graph(&input)?;
            let r = treewidth_exact(&g, &exact_limits()?)?;
            let WidthWitness::Elimination(order) = &r.witness else {
                unreachable!("treewidth witnesses are elimination orders");
            };
            let doc = json!({"tw": r.value, "exact": r.exact, "witness": order});
            emit(&doc, format, out.as_deref())?;
            Ok(0)
        }
        Command::Sn { input, out, format } => {
            let g = read_graph(&input)?;
            let r = separation_number_exact(&g, &exact_limits()?)?;
            let WidthWitness::WorstSubset { subset, separation } = &r.witness else {
                unreachable!("sn witnesses are worst subsets");
            };
            let doc = json!({
                "sn": r.value,
                "exact": r.exact,
                "witness": {
                    "subset": render::ids(subset),
                    "A": render::ids(&separation.a),
                    "B": render::ids(&separation.b),
                },
            });
            emit(&doc, format, out.as_deref())?;
            Ok(0)
        }
        Command::Tn { input, out, format } => {
            let g = read_graph(&input)?;
            let tn = tangle_number_exact(&g)?;
            emit(&json!({"tn": tn}), format, out.as_deref())?;
            Ok(0)
        }
        Command::Minsep { input, out, format } => {
            let g = read_graph(&input)?;
            let (order, sep) = min_balanced_separation(&g);
            let doc = json!({
                "order": order,
                "A": render::ids(&sep.a),
                "B": render::ids(&sep.b),
            });
            emit(&doc, format, out.as_deref())?;
            Ok(0)
        }
        Command::Cloud {
            input,
            cloud,
            s,
            eps,
            mode,
            out,
            format,
        } => {
            let g = read_graph(&input)?;
            let s = parse_rat(&s)?;
            let eps = parse_rat(&eps)?;
            let text = std::fs::read_to_string(&cloud)
                .map_err(|e| Error::parse(format!("cannot read {}: {e}", cloud.display())))?;
            let doc: Value = serde_json::from_str(&text)
                .map_err(|e| Error::parse(format!("bad witness JSON: {e}")))?;
            if doc.get("kind").and_then(Value::as_str) != Some("cloud") {
                return Err(Error::parse("witness document is not of kind \"cloud\""));
            }
            let comp_obj = doc
                .get("components")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::parse("witness lacks a components object"))?;
            let mut comp: BTreeMap<u32, VertexSet> = BTreeMap::new();
            for (key, list) in comp_obj {
                let w: u32 = key
                    .parse()
                    .map_err(|_| Error::parse(format!("bad terminal id {key:?}")))?;
                let verts = list
                    .as_array()
                    .ok_or_else(|| Error::parse("component must be an id array"))?
                    .iter()
                    .map(|v| {
                        v.as_u64()
                            .map(|x| x as u32)
                            .ok_or_else(|| Error::parse("component ids must be naturals"))
                    })
                    .collect::<Result<VertexSet, Error>>()?;
                comp.insert(w, verts);
            }
            let report = match WCloud::from_components(g, comp.clone()) {
                Ok(cloud) => {
                    let params = CloudParams::new(s, eps, comp.len())?;
                    let mode = match mode {
                        CloudCheckArg::Tame => CheckMode::Tame,
                        CloudCheckArg::StronglyTame => CheckMode::StronglyTame,
                    };
                    let rep = check_cloud(&cloud, &params, mode)?;
                    json!({
                        "valid_cloud": rep.valid_cloud,
                        "holds": rep.holds,
                        "worst_U": rep.worst_u.as_ref().map(render::ids),
                        "margin": rep.margin.map(format_rat),
                    })
                }
                // A witness that fails the cloud invariants is a result,
                // not a crash.
                Err(e) if e.kind() == ErrorKind::Domain => json!({
                    "valid_cloud": false,
                    "holds": Value::Null,
                    "worst_U": Value::Null,
                    "margin": Value::Null,
                    "reason": e.message(),
                }),
                Err(e) => return Err(e),
            };
            emit(&report, format, out.as_deref())?;
            Ok(0)
        }
        Command::Pipeline {
            input,
            w,
            s,
            eps,
            out,
            format,
        } => {
            let g = read_graph(&input)?;
            let w = parse_terminals(&w, &g)?;
            let s = parse_rat(&s)?;
            let eps = parse_rat(&eps)?;
            let doc = match tame_cloud_or_skewed(&g, &w, s, eps)? {
                CloudOrSeparation::Tame(cloud) => render::cloud_witness(&cloud, s, eps),
                CloudOrSeparation::Skewed(sep) => render::separation_witness(&sep, &w, s, eps),
            };
            emit(&doc, format, out.as_deref())?;
            Ok(0)
        }
        Command::Gen {
            families,
            seed,
            out,
        } => {
            let spec = FamilySpec::parse(&families, seed)?;
            let g = generate(&spec)?;
            write_text(out.as_deref(), &g.serialize())?;
            Ok(0)
        }
        Command::Experiment {
            families,
            seed,
            nmax,
            out,
            format,
            svg,
        } => {
            let mut specs = Vec::new();
            for part in families.split(',') {
                specs.push(FamilySpec::parse(part, seed)?);
            }
            let limits = match nmax {
                Some(cap) => ExactLimits::uniform(cap),
                None => exact_limits()?,
            };
            let report = ratio_experiment(&specs, &limits);
            let text = match format {
                Format::Json => render::json_bytes(&render::experiment_json(&report)),
                Format::Csv => render::experiment_csv(&report),
                Format::Text => render::text_of(&render::experiment_json(&report)),
            };
            write_text(out.as_deref(), &text)?;
            if let Some(svg_path) = svg {
                write_text(Some(&svg_path), &render::experiment_svg(&report))?;
            }
            Ok(if report.violations.is_empty() { 0 } else { 1 })
        }
        Command::Audit {
            kind,
            input,
            rounds,
            a,
            out,
            format,
        } => {
            let report = match kind {
                AuditKind::Constants => audit_constants(),
                AuditKind::Refinement => {
                    let input = input.ok_or_else(|| {
                        Error::parse("audit --kind refinement needs --in <graph>")
                    })?;
                    let g = read_graph(&input)?;
                    let a = match a {
                        Some(a) => a,
                        None => separation_number_exact(&g, &exact_limits()?)?.value,
                    };
                    let v = g.vertex_set();
                    audit_refinement(&g, &v, &v, a, rounds)?
                }
            };
            let overall = report.overall;
            emit(&render::audit_json(&report), format, out.as_deref())?;
            Ok(if overall { 0 } else { 1 })
        }
    }
}
