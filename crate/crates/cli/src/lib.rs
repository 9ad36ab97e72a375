//! `superchar` command line: build, classify, verify and export supercharacter data.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use superchar_core::aftower::{convergence_report, fsc_diagnostic, plancherel_profile, FieldTower, TowerLabel};
use superchar_core::caps::Caps;
use superchar_core::dualspace::{dual_canonical_fast, enumerate_dual_orbits};
use superchar_core::exactfield::FiniteField;
use superchar_core::nilalg::{algebra_order, NilMatrix};
use superchar_core::sctheory::{
    build_table, plancherel, rational_string, verify_orthogonality, verify_theory, SupercharacterTable, Validation,
};
use superchar_core::setpartitions::{parse_colours, SetPartition};
use superchar_core::superclasses::{canonical_form_with_caps, enumerate_superclasses, SuperclassLabel};
use superchar_core::Error;

#[derive(Parser, Debug)]
#[command(name = "superchar", version, about = "Exact supercharacter tables of U_n(F_q)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Matrix size n of U_n.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Field characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Field degree m, so q = p^m.
    #[arg(long, default_value_t = 1)]
    degree: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Closed-formula cross-check against orbit sums (default: full for |A| <= 4096, else spot).
    #[arg(long, value_enum)]
    validation: Option<ValidationMode>,
    /// Enumeration cap for field sizes and orbit sizes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    cap: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ValidationMode {
    Full,
    Spot,
    Off,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OrbitKind {
    Superclass,
    Dual,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Report {
    Convergence,
    Fsc,
    Profile,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and verify the supercharacter table.
    Table(Common),
    /// Canonical label of a matrix (superclass, or dual orbit with --dual).
    Classify {
        #[command(flatten)]
        common: Common,
        /// Entries such as "a12=1,a13=[0,1]".
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        dual: bool,
    },
    /// List superclasses or dual orbits with sizes.
    Orbits {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = OrbitKind::Superclass)]
        kind: OrbitKind,
    },
    /// Theory axioms, orthogonality and the super-Plancherel identity.
    Verify(Common),
    /// Super-Plancherel weights and identity check.
    Plancherel(Common),
    /// Level-by-level data along a field tower.
    Tower {
        #[command(flatten)]
        common: Common,
        /// Divisor chain of degrees.
        #[arg(long, value_delimiter = ',', default_value = "1,2,6")]
        degrees: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Report::Convergence)]
        report: Report,
        /// Dual label partition, e.g. "1,4/2/3".
        #[arg(long)]
        pi: Option<String>,
        /// Arc colours of the dual label, e.g. "1,4=1".
        #[arg(long, default_value = "")]
        colours: String,
        /// Tower level at which --colours are given.
        #[arg(long, default_value_t = 1)]
        colour_level: usize,
        /// Superclass partition, e.g. "1/2,3/4".
        #[arg(long)]
        superclass: Option<String>,
        #[arg(long, default_value = "")]
        superclass_colours: String,
        #[arg(long, default_value_t = 1)]
        superclass_level: usize,
        /// Highest level reported (default: top of the tower).
        #[arg(long)]
        max_level: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::NotClosed(_) => Failure::Check(e.to_string()),
            Error::CapExceeded { .. } => Failure::Usage(format!("{e} (raise it with --cap or SUPERCHAR_CAP)")),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("csv error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn caps_of(c: &Common) -> Caps {
    match c.cap {
        Some(v) => Caps { elements: v, orbit: v },
        None => Caps::from_env(),
    }
}

fn field_of(c: &Common, caps: &Caps) -> std::result::Result<FiniteField, Failure> {
    Ok(FiniteField::with_caps(c.p, c.degree, caps)?)
}

fn validation_of(c: &Common, field: &FiniteField) -> Validation {
    match c.validation {
        Some(ValidationMode::Full) => Validation::Full,
        Some(ValidationMode::Spot) => Validation::Spot(64),
        Some(ValidationMode::Off) => Validation::Off,
        None => Validation::default_for(algebra_order(c.n, field)),
    }
}

/// Output sink honouring `--output`.
fn emit(c: &Common, out: &mut dyn Write, bytes: &[u8]) -> Outcome {
    match &c.output {
        Some(path) => std::fs::write(path, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> std::result::Result<Vec<u8>, Failure> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Failure::Usage(e.to_string()))
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Table(c) => table(&c, out),
        Command::Classify { common, matrix, dual } => classify(&common, &matrix, dual, out),
        Command::Orbits { common, kind } => orbits(&common, kind, out),
        Command::Verify(c) => verify(&c, out),
        Command::Plancherel(c) => plancherel_cmd(&c, out),
        Command::Tower {
            common,
            degrees,
            report,
            pi,
            colours,
            colour_level,
            superclass,
            superclass_colours,
            superclass_level,
            max_level,
        } => {
            let args = TowerArgs {
                degrees,
                report,
                pi,
                colours,
                colour_level,
                superclass,
                superclass_colours,
                superclass_level,
                max_level,
            };
            tower(&common, &args, out)
        }
    }
}

fn built_table(c: &Common) -> std::result::Result<(SupercharacterTable, Caps), Failure> {
    let caps = caps_of(c);
    let field = field_of(c, &caps)?;
    let t = build_table(c.n, &field, &caps, Some(validation_of(c, &field)))?;
    Ok((t, caps))
}

fn table(c: &Common, out: &mut dyn Write) -> Outcome {
    let (t, caps) = built_table(c)?;
    let report = verify_theory(&t, &caps);
    if let Some(f) = report.failures().first() {
        return Err(Failure::Check(format!("{}: {}", f.name, f.detail)));
    }
    let bytes = match c.format {
        Format::Json => json_bytes(&serde_json::to_value(t.to_json()).expect("serializable")),
        Format::Csv => {
            let mut header = strings(["supercharacter", "size", "weight"]);
            header.extend(t.cols.iter().map(|k| k.label.render(&t.field)));
            let mut rows: Vec<Vec<String>> = t
                .rows
                .iter()
                .zip(&t.values)
                .map(|(r, vals)| {
                    let mut line = vec![r.label.render(&t.field), r.size.to_string(), rational_string(&r.weight)];
                    line.extend(vals.iter().map(|v| v.basis_string()));
                    line
                })
                .collect();
            let mut sizes = vec!["class size".to_string(), String::new(), String::new()];
            sizes.extend(t.cols.iter().map(|k| k.size.to_string()));
            rows.push(sizes);
            csv_bytes(&header, &rows)?
        }
    };
    emit(c, out, &bytes)
}

fn classify(c: &Common, matrix: &str, dual: bool, out: &mut dyn Write) -> Outcome {
    let caps = caps_of(c);
    let field = field_of(c, &caps)?;
    let a = NilMatrix::parse(matrix, c.n, &field)?;
    let (kind, label, rendered) = if dual {
        let l = dual_canonical_fast(&a, &caps)?;
        (
            "dual",
            serde_json::to_value(l.to_json(&field)).expect("serializable"),
            l.render(&field),
        )
    } else {
        let l = canonical_form_with_caps(&a, &caps)?;
        (
            "superclass",
            serde_json::to_value(l.to_json(&field)).expect("serializable"),
            l.render(&field),
        )
    };
    let bytes = match c.format {
        Format::Json => json_bytes(&json!({
            "n": c.n,
            "field": field.spec(),
            "kind": kind,
            "matrix": a.to_string(),
            "label": label,
            "rendered": rendered,
        })),
        Format::Csv => csv_bytes(
            &strings(["kind", "matrix", "label"]),
            &[vec![kind.into(), a.to_string(), rendered]],
        )?,
    };
    emit(c, out, &bytes)
}

fn orbits(c: &Common, kind: OrbitKind, out: &mut dyn Write) -> Outcome {
    let caps = caps_of(c);
    let field = field_of(c, &caps)?;
    let items: Vec<(String, Value, u64, String)> = match kind {
        OrbitKind::Superclass => enumerate_superclasses(c.n, &field, &caps)?
            .into_iter()
            .map(|s| {
                let j = serde_json::to_value(s.canonical.to_json(&field)).expect("serializable");
                (s.canonical.render(&field), j, s.size, s.rep.to_string())
            })
            .collect(),
        OrbitKind::Dual => enumerate_dual_orbits(c.n, &field, &caps)?
            .into_iter()
            .map(|o| {
                let j = serde_json::to_value(o.canonical.to_json(&field)).expect("serializable");
                (o.canonical.render(&field), j, o.size, o.rep.to_string())
            })
            .collect(),
    };
    let kind_name = match kind {
        OrbitKind::Superclass => "superclass",
        OrbitKind::Dual => "dual",
    };
    let bytes = match c.format {
        Format::Json => json_bytes(&json!({
            "n": c.n,
            "field": field.spec(),
            "kind": kind_name,
            "orbits": items.iter().map(|(r, j, s, rep)| json!({"label": j, "rendered": r, "size": s, "representative": rep})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = items
                .into_iter()
                .map(|(r, _, s, rep)| vec![r, s.to_string(), rep])
                .collect();
            csv_bytes(&strings(["label", "size", "representative"]), &rows)?
        }
    };
    emit(c, out, &bytes)
}

fn verify(c: &Common, out: &mut dyn Write) -> Outcome {
    let (t, caps) = built_table(c)?;
    let mut checks: Vec<(String, bool, String)> = vec![(
        "route-agreement".into(),
        true,
        format!(
            "{} of {} pairs cross-checked",
            t.validated_pairs,
            t.rows.len() * t.cols.len()
        ),
    )];
    let report = verify_theory(&t, &caps);
    checks.extend(
        report
            .checks
            .iter()
            .map(|k| (k.name.clone(), k.passed, k.detail.clone())),
    );
    match verify_orthogonality(&t) {
        Ok(()) => checks.push(("orthogonality".into(), true, format!("{} rows", t.rows.len()))),
        Err(e) => checks.push(("orthogonality".into(), false, e)),
    }
    match plancherel(&t) {
        Ok(_) => checks.push(("super-plancherel".into(), true, "delta at the identity".into())),
        Err(e) => checks.push(("super-plancherel".into(), false, e.to_string())),
    }
    let passed = checks.iter().all(|k| k.1);
    let bytes = match c.format {
        Format::Json => json_bytes(&json!({
            "n": c.n,
            "field": t.field.spec(),
            "passed": passed,
            "checks": checks.iter().map(|(n, p, d)| json!({"name": n, "passed": p, "detail": d})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|(n, p, d)| vec![n.clone(), p.to_string(), d.clone()])
                .collect();
            csv_bytes(&strings(["check", "passed", "detail"]), &rows)?
        }
    };
    emit(c, out, &bytes)?;
    match checks.iter().find(|k| !k.1) {
        Some((name, _, detail)) => Err(Failure::Check(format!("{name}: {detail}"))),
        None => Ok(()),
    }
}

fn plancherel_cmd(c: &Common, out: &mut dyn Write) -> Outcome {
    let (t, _) = built_table(c)?;
    let rep = plancherel(&t)?;
    let bytes = match c.format {
        Format::Json => json_bytes(&json!({
            "n": c.n,
            "field": t.field.spec(),
            "holds": rep.holds,
            "weights": rep.weights.iter().map(|(l, w)| json!({"label": l.to_json(&t.field), "rendered": l.render(&t.field), "weight": rational_string(w)})).collect::<Vec<_>>(),
            "sums": rep.sums.iter().map(|(l, v)| json!({"superclass": l.to_json(&t.field), "rendered": l.render(&t.field), "value": v})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = rep
                .weights
                .iter()
                .map(|(l, w)| vec![l.render(&t.field), rational_string(w)])
                .collect();
            csv_bytes(&strings(["supercharacter", "weight"]), &rows)?
        }
    };
    emit(c, out, &bytes)
}

struct TowerArgs {
    degrees: Vec<u32>,
    report: Report,
    pi: Option<String>,
    colours: String,
    colour_level: usize,
    superclass: Option<String>,
    superclass_colours: String,
    superclass_level: usize,
    max_level: Option<usize>,
}

fn tower(c: &Common, a: &TowerArgs, out: &mut dyn Write) -> Outcome {
    let caps = caps_of(c);
    let tower = FieldTower::new(c.p, &a.degrees, &caps)?;
    let header = json!({"n": c.n, "p": c.p, "degrees": a.degrees});
    let bytes = match a.report {
        Report::Convergence => {
            let pi =
                a.pi.as_deref()
                    .ok_or_else(|| Failure::Usage("--pi is required for the convergence report".into()))?;
            let sc = a
                .superclass
                .as_deref()
                .ok_or_else(|| Failure::Usage("--superclass is required for the convergence report".into()))?;
            let colours = parse_colours(&a.colours, tower.field(a.colour_level)?)?;
            let label = TowerLabel::from_level(&tower, SetPartition::parse(pi, c.n)?, a.colour_level, &colours)?;
            let class_field = tower.field(a.superclass_level)?;
            let class = SuperclassLabel::new(
                SetPartition::parse(sc, c.n)?,
                parse_colours(&a.superclass_colours, class_field)?,
            )?;
            let rep = convergence_report(
                &tower,
                &label,
                &class,
                a.superclass_level,
                a.max_level.unwrap_or(tower.levels()),
            )?;
            match c.format {
                Format::Json => {
                    let mut v = header;
                    v["report"] = json!("convergence");
                    v["pi"] = json!(label.partition().to_string());
                    v["m0"] = json!(label.m0());
                    let mut colour_map = serde_json::Map::new();
                    for (&(i, j), t) in label.colours() {
                        let betas = t
                            .betas()
                            .iter()
                            .enumerate()
                            .map(|(k, &b)| Ok(json!(tower.field(k + 1)?.render(b))))
                            .collect::<std::result::Result<Vec<_>, Error>>()?;
                        colour_map.insert(format!("{i},{j}"), Value::Array(betas));
                    }
                    v["colours"] = Value::Object(colour_map);
                    v["superclass"] = json!(class.render(class_field));
                    v["superclass_level"] = json!(a.superclass_level);
                    v["levels"] = serde_json::to_value(&rep.levels).expect("serializable");
                    v["limit"] = serde_json::to_value(&rep.limit).expect("serializable");
                    v["nest"] = json!(rep.nest);
                    v["first_defined_level"] = json!(rep.first_defined_level);
                    v["verdict"] = json!(rep.verdict.to_string());
                    json_bytes(&v)
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rep
                        .levels
                        .iter()
                        .map(|l| {
                            vec![
                                l.level.to_string(),
                                l.degree.to_string(),
                                l.q.to_string(),
                                l.value.as_ref().map(|v| v.basis_string()).unwrap_or_default(),
                                l.magnitude
                                    .clone()
                                    .or_else(|| l.norm_squared.as_ref().map(|n| format!("sqrt({n})")))
                                    .unwrap_or_default(),
                            ]
                        })
                        .collect();
                    csv_bytes(&strings(["level", "degree", "q", "value", "magnitude"]), &rows)?
                }
            }
        }
        Report::Fsc => {
            let rep = fsc_diagnostic(c.n, &tower, &caps)?;
            let bytes = match c.format {
                Format::Json => {
                    let mut v = header;
                    v["report"] = json!("fsc");
                    v["result"] = serde_json::to_value(&rep).expect("serializable");
                    json_bytes(&v)
                }
                Format::Csv => {
                    let line = |kind: &str, e: &superchar_core::aftower::FscEntry| {
                        let sizes: Vec<String> = e.sizes.iter().map(u64::to_string).collect();
                        vec![
                            kind.to_string(),
                            e.label.clone(),
                            sizes.join(";"),
                            if e.stable { "stable" } else { "growing" }.to_string(),
                        ]
                    };
                    let rows: Vec<Vec<String>> = rep
                        .superclasses
                        .iter()
                        .map(|e| line("superclass", e))
                        .chain(rep.dual_orbits.iter().map(|e| line("dual", e)))
                        .collect();
                    csv_bytes(&strings(["kind", "label", "sizes", "class"]), &rows)?
                }
            };
            if !rep.passed() {
                emit(c, out, &bytes)?;
                return Err(Failure::Check(
                    "level-stable labels do not match the centre / superdiagonal description".into(),
                ));
            }
            bytes
        }
        Report::Profile => {
            let rep = plancherel_profile(c.n, &tower, &caps)?;
            let bytes = match c.format {
                Format::Json => {
                    let mut v = header;
                    v["report"] = json!("profile");
                    v["result"] = serde_json::to_value(&rep).expect("serializable");
                    json_bytes(&v)
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rep
                        .levels
                        .iter()
                        .map(|l| {
                            vec![
                                l.level.to_string(),
                                l.q.to_string(),
                                l.weight.clone(),
                                l.qualifying.join(" | "),
                            ]
                        })
                        .collect();
                    csv_bytes(&strings(["level", "q", "weight", "supercharacters"]), &rows)?
                }
            };
            if !(rep.nondecreasing && rep.bounded_by_one) {
                emit(c, out, &bytes)?;
                return Err(Failure::Check(format!(
                    "weights {:?} do not increase toward 1",
                    rep.weights
                )));
            }
            bytes
        }
    };
    emit(c, out, &bytes)
}
