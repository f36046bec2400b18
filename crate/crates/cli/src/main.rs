use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use afkit_core::dimension::{
    diagram_to_system, ehs_realize, ehs_realize_with_endo, multimatrix_dims, telescope, to_dot, validate_diagram,
    validate_endomorphism, verify_certificate, BratteliDiagram,
};
use afkit_core::eplag::{
    divisibility_fingerprint, fingerprint_counts, is_p_divisible_sample, tree_to_eplag, EplagGroup, Membership,
};
use afkit_core::invariants::{
    crossed_product_invariant, d_p_absorbing, group_to_invariant, kp_isomorphic, o_infty_st_absorbing, pipeline,
    FingerprintBounds, GroupDescriptor, PipelineOptions,
};
use afkit_core::json::*;
use afkit_core::rordam::{rordam_pair, rordam_verify, shift_columns_are_elementary};
use afkit_core::schreier::{schreier_generators, transversal, KernelOracle};
use afkit_core::Error;

#[derive(Parser)]
#[command(name = "afkit", version, about = "Exact computations with staged groups, Bratteli diagrams and invariants")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads for independent verifications.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
    /// Search bound (Shen search, word length, exponent bound, by subcommand).
    #[arg(long, global = true)]
    bound: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form of a finitely presented abelian group.
    Group { file: PathBuf },
    /// Inspect a staged system: its limit group and optional element comparison.
    Limits {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// JSON file with {"a": element, "b": element}.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Schreier generators of the kernel of F_r -> target.
    Schreier {
        /// JSON file with {"target": group, "images": [[...], ...]}.
        file: PathBuf,
    },
    /// Build and verify the shift automorphism with prescribed cokernel.
    Rordam {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 6)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Bratteli diagram utilities.
    Diagram {
        #[command(subcommand)]
        action: DiagramCommand,
    },
    /// Realise an ordered staged system (and endomorphism) as a diagram.
    Ehs {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        endo: Option<PathBuf>,
    },
    /// Groups of prime-labelled graphs.
    Eplag {
        #[command(subcommand)]
        action: EplagCommand,
    },
    /// The full chain from a group to its invariant with all checks.
    Pipeline {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long)]
        emit_diagram: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Invariant of a group with absorption flags and optional comparison.
    Invariant {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        compare: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DiagramCommand {
    /// Check the diagram conditions; exit 1 on any violation.
    Validate { files: Vec<PathBuf> },
    /// Multimatrix dimensions and the limit group when finitely generated.
    K0 {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Graphviz rendering.
    Dot { file: PathBuf },
    /// Contract to the given levels.
    Telescope {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cuts: Vec<usize>,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Graph JSON, or a tree JSON ({"children": [...]}) labelled automatically.
    file: PathBuf,
    /// Divisibility primes for trees.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
}

#[derive(Subcommand)]
enum EplagCommand {
    /// Label a tree and print the resulting graph.
    Tree {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Membership of a rational vector, with a certificate.
    Member {
        #[command(flatten)]
        input: GraphInput,
        /// JSON file with a list of rationals such as ["1/15", "0"].
        #[arg(long)]
        element: PathBuf,
    },
    /// Divisibility fingerprint and sampled P-divisibility.
    Fingerprint {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 20)]
        prime_bound: u64,
        #[arg(long, default_value_t = 4)]
        exp_bound: u32,
    },
}

/// A finished command: the report and whether every check passed.
struct Outcome {
    report: Value,
    pass: bool,
    text: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, pass: true, text: None }
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ShenDepthExceeded(_) | Error::NotFinitelyGenerated { .. } => 3,
        Error::Parse(_)
        | Error::InvalidInput(_)
        | Error::DimensionMismatch(_)
        | Error::NotPrime(_)
        | Error::WidthTooSmall { .. }
        | Error::InvalidDiagram(_)
        | Error::InvalidStage(_) => 2,
        Error::EndomorphismNotPositive(_) | Error::UndecidableUnitClass(_) => 1,
    }
}

fn graph_input(input: &GraphInput) -> Result<EplagGroup, Error> {
    let v = read_json(&input.file)?;
    if v.get("children").is_some() {
        let primes: BTreeSet<u64> = input.primes.iter().copied().collect();
        tree_to_eplag(&tree_from_json(&v)?, &primes)
    } else {
        Ok(EplagGroup::new(graph_from_json(&v)?))
    }
}

fn bool_json(b: bool) -> Value {
    json!(b)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Group { file } => {
            let g = group_from_json(&read_json(file)?)?;
            Ok(Outcome::ok(group_summary_json(&g)))
        }
        Command::Limits { file, depth, compare } => {
            let sys = system_from_json(&read_json(file)?)?;
            let limit = match sys.build_limit_group(*depth) {
                Ok(g) => json!({"finitely_generated": true, "group": group_summary_json(&g)}),
                Err(Error::NotFinitelyGenerated { depth }) => {
                    json!({"finitely_generated": false, "depth": depth})
                }
                Err(e) => return Err(e),
            };
            let mut report = json!({
                "system": system_to_json(&sys),
                "stationary": sys.is_stationary(),
                "limit": limit,
            });
            if let Some(path) = compare {
                let v = read_json(path)?;
                let a = element_from_json(v.get("a").unwrap_or(&Value::Null), "a")?;
                let b = element_from_json(v.get("b").unwrap_or(&Value::Null), "b")?;
                let t = sys.limit_equal(&a, &b, *depth)?;
                report["equal"] = truth_to_json(t);
            }
            Ok(Outcome::ok(report))
        }
        Command::Schreier { file } => {
            let v = read_json(file)?;
            let target = group_from_json(v.get("target").ok_or_else(|| Error::Parse("missing field 'target'".into()))?)?;
            let images = v
                .get("images")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("missing list 'images'".into()))?
                .iter()
                .enumerate()
                .map(|(i, x)| vector_from_json(x, &format!("images[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let rank = images.len();
            let oracle = KernelOracle::new(target.clone(), images)?;
            let order = target.order();
            let word_bound = cli.bound.unwrap_or_else(|| {
                order.as_ref().and_then(|o| usize::try_from(o.clone()).ok()).unwrap_or(4).clamp(1, 6)
            });
            let gens = schreier_generators(&oracle, word_bound, rank);
            let reps = transversal(&oracle, word_bound, rank);
            let mut report = json!({
                "rank": rank,
                "word_bound": word_bound,
                "transversal": reps.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "generators": gens.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "count": gens.len(),
            });
            let mut pass = true;
            if let Some(o) = order.as_ref().and_then(|o| usize::try_from(o.clone()).ok()) {
                // Index of the kernel when the map is onto.
                if reps.len() == o {
                    let expected = o * rank.saturating_sub(1) + 1;
                    report["expected_count"] = json!(expected);
                    pass = gens.len() == expected;
                }
            }
            report["pass"] = bool_json(pass);
            Ok(Outcome { report, pass, text: None })
        }
        Command::Rordam { group, width, depth } => {
            let g = group_from_json(&read_json(group)?)?;
            let pair = rordam_pair(&g, *width)?;
            let r = rordam_verify(&pair, &g, *depth)?;
            let report = json!({
                "group": group_summary_json(&g),
                "width": width,
                "depth": depth,
                "rank": pair.rank(),
                "delta": matrix_to_json(pair.delta()),
                "beta": matrix_to_json(pair.beta()),
                "kernel_data": pair.kernel_data_check(),
                "shift_columns_elementary": shift_columns_are_elementary(&pair),
                "expected": vector_to_json(&r.expected),
                "observed": r.observed.iter().map(|o| vector_to_json(o)).collect::<Vec<_>>(),
                "pass": r.pass,
            });
            Ok(Outcome { report, pass: r.pass, text: None })
        }
        Command::Diagram { action } => run_diagram(cli, action),
        Command::Ehs { system, depth, endo } => {
            let d = ordered_from_json(&read_json(system)?)?;
            let bound = cli.bound.unwrap_or(64);
            let positives = d.enumerate_positives(*depth);
            match endo {
                None => {
                    let r = ehs_realize(&d, &positives, *depth, bound)?;
                    let mut certs = true;
                    for (c, input) in r.certificates.iter().zip(&r.shen_inputs) {
                        certs &= verify_certificate(&d, input, c)?.ok();
                    }
                    let valid = validate_diagram(&r.diagram).is_empty();
                    let covered = r.coverage.iter().all(|c| c.verified);
                    let pass = valid && certs && covered;
                    Ok(Outcome {
                        report: json!({
                            "diagram": diagram_to_json(&r.diagram),
                            "theta": r.theta.iter().map(|t| t.iter().map(element_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                            "diagram_valid": valid,
                            "certificates_verified": certs,
                            "coverage_verified": covered,
                            "pass": pass,
                        }),
                        pass,
                        text: None,
                    })
                }
                Some(path) => {
                    let phi = endo_from_json(&read_json(path)?)?;
                    let r = ehs_realize_with_endo(&d, &phi, &positives, *depth, bound)?;
                    let mut certs = true;
                    for ((c1, c2), (i1, i2)) in r.certificates.iter().zip(&r.shen_inputs) {
                        certs &= verify_certificate(&d, i1, c1)?.ok() && verify_certificate(&d, i2, c2)?.ok();
                    }
                    let valid = validate_diagram(&r.diagram).is_empty();
                    let endo_valid = validate_endomorphism(&r.diagram, &r.endomorphism)?;
                    let pass = valid && endo_valid && certs;
                    Ok(Outcome {
                        report: json!({
                            "diagram": diagram_to_json(&r.diagram),
                            "endomorphism": diagram_endo_to_json(&r.endomorphism),
                            "diagram_valid": valid,
                            "endomorphism_valid": endo_valid,
                            "certificates_verified": certs,
                            "pass": pass,
                        }),
                        pass,
                        text: None,
                    })
                }
            }
        }
        Command::Eplag { action } => run_eplag(cli, action),
        Command::Pipeline { group, prime, depth, width, emit_diagram, dot } => {
            let g = group_from_json(&read_json(group)?)?;
            let opts = PipelineOptions { width: *width, search_bound: cli.bound.unwrap_or(64) };
            let r = pipeline(&g, *prime, *depth, opts)?;
            if let Some(path) = emit_diagram {
                let doc = json!({
                    "diagram": diagram_to_json(&r.diagram),
                    "endomorphism": diagram_endo_to_json(&r.endomorphism),
                });
                write_file(path, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")))?;
            }
            if let Some(path) = dot {
                write_file(path, &to_dot(&r.diagram))?;
            }
            Ok(Outcome { report: pipeline_report_to_json(&r), pass: r.pass(), text: None })
        }
        Command::Invariant { group, prime, compare } => {
            let g = group_from_json(&read_json(group)?)?;
            let inv = group_to_invariant(GroupDescriptor::Fg(g.clone()));
            let mut report = json!({
                "invariant": invariant_to_json(&inv),
                "o_infty_st_absorbing": o_infty_st_absorbing(&inv)?,
            });
            if let Some(p) = prime {
                let cross = crossed_product_invariant(&inv, *p)?;
                report["prime"] = json!(p.to_string());
                report["d_p_absorbing"] = json!(d_p_absorbing(&g, *p)?);
                report["crossed_product"] = invariant_to_json(&cross);
            }
            if let Some(path) = compare {
                let other = group_to_invariant(GroupDescriptor::Fg(group_from_json(&read_json(path)?)?));
                report["isomorphic"] = truth_to_json(kp_isomorphic(&inv, &other, FingerprintBounds::default())?);
            }
            Ok(Outcome::ok(report))
        }
    }
}

fn validate_file(path: &Path) -> Result<Value, Error> {
    let d = diagram_from_json(&read_json(path)?)?;
    let violations = validate_diagram(&d);
    Ok(json!({
        "file": path.display().to_string(),
        "valid": violations.is_empty(),
        "violations": violations.iter().map(|v| json!({
            "level": v.level, "condition": v.condition, "message": v.message,
        })).collect::<Vec<_>>(),
    }))
}

fn run_diagram(cli: &Cli, action: &DiagramCommand) -> Result<Outcome, Error> {
    match action {
        DiagramCommand::Validate { files } => {
            if files.is_empty() {
                return Err(Error::InvalidInput("no diagram files given".into()));
            }
            let jobs = cli.jobs.max(1);
            let mut results: Vec<Option<Result<Value, Error>>> = vec![None; files.len()];
            for chunk in (0..files.len()).collect::<Vec<_>>().chunks(jobs) {
                let done: Vec<(usize, Result<Value, Error>)> = std::thread::scope(|s| {
                    let handles: Vec<_> =
                        chunk.iter().map(|&i| (i, s.spawn(move || validate_file(&files[i])))).collect();
                    handles.into_iter().map(|(i, h)| (i, h.join().expect("validation thread"))).collect()
                });
                for (i, r) in done {
                    results[i] = Some(r);
                }
            }
            let reports = results.into_iter().map(|r| r.expect("every file ran")).collect::<Result<Vec<_>, _>>()?;
            let pass = reports.iter().all(|r| r["valid"] == json!(true));
            let lines: Vec<String> = reports
                .iter()
                .flat_map(|r| {
                    let file = r["file"].as_str().unwrap_or_default().to_string();
                    let vs = r["violations"].as_array().cloned().unwrap_or_default();
                    if vs.is_empty() {
                        vec![format!("{file}: valid")]
                    } else {
                        vs.iter()
                            .map(|v| {
                                format!(
                                    "{file}: condition {} at level {}: {}",
                                    v["condition"],
                                    v["level"],
                                    v["message"].as_str().unwrap_or_default()
                                )
                            })
                            .collect()
                    }
                })
                .collect();
            let report = if reports.len() == 1 {
                reports.into_iter().next().expect("one report")
            } else {
                json!({"diagrams": reports, "valid": pass})
            };
            Ok(Outcome { report, pass, text: Some(lines.join("\n")) })
        }
        DiagramCommand::K0 { file, depth } => {
            let d = diagram_from_json(&read_json(file)?)?;
            let sys = diagram_to_system(&d)?;
            let dims = (0..d.levels.len())
                .map(|n| multimatrix_dims(&d, n).map(|v| vector_to_json(&v)))
                .collect::<Result<Vec<_>, _>>()?;
            let limit = match sys.system.build_limit_group(*depth) {
                Ok(g) => json!({"finitely_generated": true, "group": group_summary_json(&g)}),
                Err(Error::NotFinitelyGenerated { depth }) => json!({"finitely_generated": false, "depth": depth}),
                Err(e) => return Err(e),
            };
            Ok(Outcome::ok(json!({
                "multimatrix_dims": dims,
                "ordered_system": ordered_to_json(&sys),
                "limit": limit,
            })))
        }
        DiagramCommand::Dot { file } => {
            let d = diagram_from_json(&read_json(file)?)?;
            let dot = to_dot(&d);
            Ok(Outcome { report: json!({"dot": dot}), pass: true, text: Some(dot.trim_end().to_string()) })
        }
        DiagramCommand::Telescope { file, cuts } => {
            let d: BratteliDiagram = diagram_from_json(&read_json(file)?)?;
            let t = telescope(&d, cuts)?;
            Ok(Outcome::ok(diagram_to_json(&t)))
        }
    }
}

fn run_eplag(cli: &Cli, action: &EplagCommand) -> Result<Outcome, Error> {
    match action {
        EplagCommand::Tree { input } => {
            let g = graph_input(input)?;
            Ok(Outcome::ok(graph_to_json(&g.graph)))
        }
        EplagCommand::Member { input, element } => {
            let g = graph_input(input)?;
            let x = qvector_from_json(&read_json(element)?, "element")?;
            if x.len() != g.graph.num_vertices() {
                return Err(Error::InvalidInput(format!(
                    "element has {} coordinates for {} vertices",
                    x.len(),
                    g.graph.num_vertices()
                )));
            }
            let bound = u32::try_from(cli.bound.unwrap_or(4).max(1)).unwrap_or(u32::MAX);
            let report = match g.membership(&x, bound)? {
                Membership::Member { certificate } => json!({
                    "member": true,
                    "bound": bound,
                    "certificate": certificate.iter().map(|(gen, k)| json!({
                        "support": gen.support.iter().map(|&i| g.graph.vertices[i].clone()).collect::<Vec<_>>(),
                        "denominator": int_to_json(&gen.denominator),
                        "coefficient": int_to_json(k),
                    })).collect::<Vec<_>>(),
                }),
                Membership::NonmemberAtBound(b) => json!({"member": false, "nonmember_at_bound": b}),
            };
            Ok(Outcome::ok(report))
        }
        EplagCommand::Fingerprint { input, prime_bound, exp_bound } => {
            let g = graph_input(input)?;
            let fp = divisibility_fingerprint(&g, *prime_bound, *exp_bound)?;
            let counts: Vec<Value> = fingerprint_counts(&fp)
                .into_iter()
                .map(|(primes, n)| {
                    json!({"primes": primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "vertices": n})
                })
                .collect();
            let divisible = is_p_divisible_sample(&g, *exp_bound)?;
            Ok(Outcome {
                report: json!({
                    "prime_bound": prime_bound.to_string(),
                    "exp_bound": exp_bound,
                    "fingerprint": counts,
                    "p_divisible_sample": divisible,
                }),
                pass: divisible,
                text: None,
            })
        }
    }
}

/// Flattens a report into `path: value` lines.
fn to_text(v: &Value, prefix: &str, out: &mut Vec<String>) {
    let scalar = |x: &Value| match x {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                to_text(x, &p, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            out.push(format!("{prefix}: [{}]", parts.join(", ")));
        }
        Value::Array(a) if a.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) => {
            let rows: Vec<String> = a
                .iter()
                .map(|r| format!("[{}]", r.as_array().expect("row").iter().map(scalar).collect::<Vec<_>>().join(", ")))
                .collect();
            out.push(format!("{prefix}: [{}]", rows.join(", ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                to_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        other => out.push(format!("{prefix}: {}", scalar(other))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.report).expect("json"),
                Format::Text => out.text.clone().unwrap_or_else(|| {
                    let mut lines = Vec::new();
                    to_text(&out.report, "", &mut lines);
                    lines.join("\n")
                }),
            };
            println!("{body}");
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
