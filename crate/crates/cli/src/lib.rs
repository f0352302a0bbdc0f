//! Batch command surface over model files.
//!
//! [`run_command`] parses an argument vector, runs one subcommand and returns the report
//! text with an exit code: 0 when every invoked check passes, 1 when a well-formed input
//! fails verification, 2 for unreadable input or bad flags.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use twisted_core::applications::{
    bundle_model, free_loop_model, loop_product_table, path_space_model, untwisted_loop_model,
    BundleVariant, ModelHomology,
};
use twisted_core::connection_builder::{build_power_series_connection, PowerSeriesConnection};
use twisted_core::graded_core::format_q;
use twisted_core::homotopy_structures::{check_ainf, check_cinfty, check_cyclic};
use twisted_core::twisted_builders::{build_twisted_algebra, derivation_defects};
use twisted_core::twisting::check_maurer_cartan;
use twisted_core::{
    parse_model_file, ActionKind, AppError, Lin, LoadedModel, ManifoldModel, ModelError,
    StructureFamily, TensorKey, TruncationPolicy,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "twisted", about = "Twisted tensor products of homology models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every checker on a model.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Print the power series connection of a CDGA model.
    Connection {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Betti numbers of the based path space model.
    PathBetti {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Action::Left)]
        action: Action,
    },
    /// Betti numbers of the free loop space model.
    LoopBetti {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Action::Conjugation)]
        action: Action,
        /// Use the untwisted tensor product instead.
        #[arg(long)]
        untwisted: bool,
    },
    /// Loop product table on the homology of the free loop space model.
    LoopProduct {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Action::Conjugation)]
        action: Action,
    },
    /// Betti numbers of the total space of a principal bundle.
    BundleBetti {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Action::Left)]
        action: Action,
        #[arg(long, value_enum, default_value_t = Variant::Homology)]
        variant: Variant,
    },
}

#[derive(Args, Debug)]
struct Common {
    model: PathBuf,
    #[arg(long, default_value_t = 8)]
    max_degree: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Action {
    Left,
    Bracket,
    Conjugation,
}

impl From<Action> for ActionKind {
    fn from(a: Action) -> Self {
        match a {
            Action::Left => ActionKind::LeftMult,
            Action::Bracket => ActionKind::Bracket,
            Action::Conjugation => ActionKind::Conjugation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Homology,
    Cohomology,
}

enum Failure {
    Input(String),
    Model(ModelError),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Model(e)
    }
}

impl From<AppError> for Failure {
    fn from(e: AppError) -> Self {
        Failure::Model(ModelError::Verification(e))
    }
}

struct Report {
    text: String,
    passed: bool,
}

impl Report {
    fn pass(text: String) -> Self {
        Report { text, passed: true }
    }
}

/// Runs one command. `argv[0]` is the program name.
pub fn run_command<I, S>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (e.render().to_string(), code);
        }
    };
    match dispatch(cli.command) {
        Ok(r) => {
            let code = if r.passed { EXIT_OK } else { EXIT_VERIFICATION };
            (r.text, code)
        }
        Err(Failure::Input(msg)) => (format!("error: {msg}\n"), EXIT_INPUT),
        Err(Failure::Model(e)) => {
            let code = if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_VERIFICATION
            };
            (format!("error: {e}\n"), code)
        }
    }
}

fn dispatch(cmd: Command) -> Result<Report, Failure> {
    match cmd {
        Command::Verify { common, max_length } => verify(&common, max_length),
        Command::Connection { common, max_length } => connection(&common, max_length),
        Command::PathBetti { common, action } => {
            require(action, &[Action::Left], "path-betti")?;
            let m = load(&common)?;
            let mh = path_space_model(&m.manifold, common.max_degree)?;
            Ok(Report::pass(betti_report(
                &common,
                "path-betti",
                "left",
                &mh,
                &m.manifold,
            )))
        }
        Command::LoopBetti {
            common,
            action,
            untwisted,
        } => {
            require(
                action,
                &[Action::Bracket, Action::Conjugation],
                "loop-betti",
            )?;
            let m = load(&common)?;
            let (mh, label) = if untwisted {
                (
                    untwisted_loop_model(&m.manifold, common.max_degree)?,
                    "untwisted",
                )
            } else if action == Action::Conjugation {
                (
                    free_loop_model(&m.manifold, common.max_degree)?,
                    "conjugation",
                )
            } else {
                let tc = m
                    .manifold
                    .twisted_family(ActionKind::Bracket, common.max_degree)?;
                let complex =
                    twisted_core::homology_engine::assemble_complex(&tc, common.max_degree)
                        .map_err(AppError::from)?;
                let result = twisted_core::homology_engine::homology(&complex);
                (ModelHomology { complex, result }, "bracket")
            };
            Ok(Report::pass(betti_report(
                &common,
                "loop-betti",
                label,
                &mh,
                &m.manifold,
            )))
        }
        Command::LoopProduct { common, action } => {
            require(action, &[Action::Conjugation], "loop-product")?;
            let m = load(&common)?;
            loop_product(&common, &m.manifold)
        }
        Command::BundleBetti {
            common,
            action,
            variant,
        } => {
            require(action, &[Action::Left], "bundle-betti")?;
            let m = load(&common)?;
            let b = m
                .bundle
                .as_ref()
                .ok_or_else(|| Failure::Input("the model has no bundle block".into()))?;
            let v = match variant {
                Variant::Homology => BundleVariant::Homology,
                Variant::Cohomology => BundleVariant::Cohomology,
            };
            let report = bundle_model(b, common.max_degree, v)?;
            let dual_ok = report.dual.as_ref().is_none_or(|(_, r)| r.passes());
            let label = match variant {
                Variant::Homology => "homology",
                Variant::Cohomology => "cohomology",
            };
            let text = if common.json {
                let mut v = json!({
                    "model": m.manifold.name,
                    "command": "bundle-betti",
                    "variant": label,
                    "max_degree": common.max_degree,
                    "betti": report.betti,
                });
                if let Some((_, r)) = &report.dual {
                    v["dual_ainf"] = json!({ "checked": r.checked, "defects": r.defects.len() });
                }
                to_json(&v)
            } else {
                let mut out = header(&m.manifold.name, "bundle-betti", common.max_degree);
                let _ = writeln!(out, "variant {label}");
                out.push_str(&betti_table(&report.betti));
                if let Some((_, r)) = &report.dual {
                    let _ = writeln!(
                        out,
                        "dual A-infinity {} ({} checked)",
                        verdict(r.passes()),
                        r.checked
                    );
                }
                out
            };
            Ok(Report {
                text,
                passed: dual_ok,
            })
        }
    }
}

fn require(action: Action, allowed: &[Action], cmd: &str) -> Result<(), Failure> {
    if allowed.contains(&action) {
        return Ok(());
    }
    let names: Vec<&str> = allowed
        .iter()
        .map(|&a| ActionKind::from(a).label())
        .collect();
    Err(Failure::Input(format!(
        "{cmd} does not accept --action {}; allowed: {}",
        ActionKind::from(action).label(),
        names.join(", ")
    )))
}

fn load(common: &Common) -> Result<LoadedModel, Failure> {
    Ok(parse_model_file(&common.model)?)
}

fn header(name: &str, command: &str, max_degree: usize) -> String {
    format!("model {name}\ncommand {command}\nmax-degree {max_degree}\n")
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn betti_table(betti: &[usize]) -> String {
    let mut out = String::from("degree betti\n");
    for (k, b) in betti.iter().enumerate() {
        let _ = writeln!(out, "{k} {b}");
    }
    let row: Vec<String> = betti.iter().map(|b| b.to_string()).collect();
    let _ = writeln!(out, "betti {}", row.join(" "));
    out
}

fn chain_text(x: &Lin<TensorKey>, m: &ManifoldModel) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = x
        .iter()
        .map(|((b, w), c)| {
            format!(
                "{} {}⊗{}",
                format_q(c),
                m.homology.element_name(*b),
                m.lie.word_name(w)
            )
        })
        .collect();
    terms.join(" + ")
}

fn chain_json(x: &Lin<TensorKey>, m: &ManifoldModel) -> Value {
    Value::Array(
        x.iter()
            .map(|((b, w), c)| {
                json!({
                    "base": m.homology.element_name(*b),
                    "word": w.iter().map(|&i| m.lie.generators.element_name(i)).collect::<Vec<_>>(),
                    "coeff": format_q(c),
                })
            })
            .collect(),
    )
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn betti_report(
    common: &Common,
    command: &str,
    action: &str,
    mh: &ModelHomology,
    m: &ManifoldModel,
) -> String {
    betti_report_for(common, command, action, mh, m, false)
}

fn betti_report_for(
    common: &Common,
    command: &str,
    action: &str,
    mh: &ModelHomology,
    m: &ManifoldModel,
    classes: bool,
) -> String {
    let r = &mh.result;
    if common.json {
        return to_json(&json!({
            "model": m.name,
            "command": command,
            "action": action,
            "max_degree": common.max_degree,
            "betti": r.betti,
            "representatives": representatives_json(mh, m),
            "top_cycles": r.top_cycles,
            "truncated_euler": r.truncated_euler(),
        }));
    }
    let mut out = header(&m.name, command, common.max_degree);
    let _ = writeln!(out, "action {action}");
    out.push_str(&betti_table(&r.betti));
    if classes {
        for (k, reps) in r.representatives.iter().enumerate() {
            for (i, x) in reps.iter().enumerate() {
                let _ = writeln!(out, "class {k}.{i} = {}", chain_text(x, m));
            }
        }
    }
    out
}

fn representatives_json(mh: &ModelHomology, m: &ManifoldModel) -> Value {
    Value::Array(
        mh.result
            .representatives
            .iter()
            .map(|reps| Value::Array(reps.iter().map(|x| chain_json(x, m)).collect()))
            .collect(),
    )
}

fn loop_product(common: &Common, m: &ManifoldModel) -> Result<Report, Failure> {
    let (mh, table) = loop_product_table(m, common.max_degree)?;
    let r = &mh.result;
    if common.json {
        let products: Vec<Value> = table
            .entries
            .iter()
            .map(|(&(p, i, q, j), coords)| {
                json!({
                    "left": [p, i],
                    "right": [q, j],
                    "degree": p as i64 + q as i64 - table.dimension,
                    "coordinates": coords.iter().map(format_q).collect::<Vec<_>>(),
                })
            })
            .collect();
        return Ok(Report::pass(to_json(&json!({
            "model": m.name,
            "command": "loop-product",
            "max_degree": common.max_degree,
            "dimension": table.dimension,
            "betti": r.betti,
            "representatives": representatives_json(&mh, m),
            "products": products,
        }))));
    }
    let mut out = betti_report_for(common, "loop-product", "conjugation", &mh, m, true);
    let _ = writeln!(out, "products (degree p+q-{})", table.dimension);
    for (&(p, i, q, j), coords) in &table.entries {
        let r = (p as i64 + q as i64 - table.dimension) as usize;
        let terms: Vec<String> = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| format_q(c) != "0")
            .map(|(k, c)| format!("{} [{r}.{k}]", format_q(c)))
            .collect();
        let rhs = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        let _ = writeln!(out, "[{p}.{i}] * [{q}.{j}] = {rhs}");
    }
    Ok(Report::pass(out))
}

fn connection(common: &Common, max_length: Option<usize>) -> Result<Report, Failure> {
    let m = load(common)?;
    let (model, file_len) = m
        .cdga
        .as_ref()
        .ok_or_else(|| Failure::Input("the model has no cdga block".into()))?;
    let len = max_length.unwrap_or(*file_len);
    let psc = build_power_series_connection(model, len).map_err(AppError::from)?;
    let flat = psc.defect(model, len).is_zero();
    let square = psc.square_defect(len).iter().all(|v| v.is_zero());
    if common.json {
        let v = json!({
            "model": m.manifold.name,
            "command": "connection",
            "max_length": len,
            "generators": (0..psc.generators.dim())
                .map(|i| json!({ "name": psc.generators.element_name(i), "degree": psc.generators.degree(i) }))
                .collect::<Vec<_>>(),
            "differential": psc.differential.iter().enumerate()
                .map(|(i, v)| json!({ "generator": psc.generators.element_name(i), "terms": word_terms(&psc, v) }))
                .collect::<Vec<_>>(),
            "connection": psc.omega.iter()
                .map(|((a, w), c)| json!({
                    "form": model.space.element_name(*a),
                    "word": w.iter().map(|&i| psc.generators.element_name(i)).collect::<Vec<_>>(),
                    "coeff": format_q(c),
                }))
                .collect::<Vec<_>>(),
            "flat": flat,
            "square_zero": square,
        });
        return Ok(Report {
            text: to_json(&v),
            passed: flat && square,
        });
    }
    let mut out = format!(
        "model {}\ncommand connection\nmax-length {len}\n",
        m.manifold.name
    );
    out.push_str("generators\n");
    for i in 0..psc.generators.dim() {
        let _ = writeln!(
            out,
            "  {} degree {}",
            psc.generators.element_name(i),
            psc.generators.degree(i)
        );
    }
    out.push_str("differential\n");
    for (i, v) in psc.differential.iter().enumerate() {
        let _ = writeln!(
            out,
            "  d {} = {}",
            psc.generators.element_name(i),
            word_text(&psc, v)
        );
    }
    out.push_str("connection\n");
    for ((a, w), c) in psc.omega.iter() {
        let _ = writeln!(
            out,
            "  {} {}⊗{}",
            format_q(c),
            model.space.element_name(*a),
            psc.generators.word_name(w)
        );
    }
    let _ = writeln!(out, "flatness {} (length {len})", verdict(flat));
    let _ = writeln!(out, "square-zero {}", verdict(square));
    Ok(Report {
        text: out,
        passed: flat && square,
    })
}

fn word_text(psc: &PowerSeriesConnection, v: &Lin<Vec<usize>>) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = v
        .iter()
        .map(|(w, c)| format!("{} {}", format_q(c), psc.generators.word_name(w)))
        .collect();
    terms.join(" + ")
}

fn word_terms(psc: &PowerSeriesConnection, v: &Lin<Vec<usize>>) -> Vec<Value> {
    v.iter()
        .map(|(w, c)| {
            json!({
                "word": w.iter().map(|&i| psc.generators.element_name(i)).collect::<Vec<_>>(),
                "coeff": format_q(c),
            })
        })
        .collect()
}

struct Check {
    name: String,
    passed: bool,
    checked: usize,
}

fn verify(common: &Common, max_length: Option<usize>) -> Result<Report, Failure> {
    let m = load(common)?;
    let man = &m.manifold;
    let d = common.max_degree;
    let mut checks = Vec::new();
    let dim = man.dimension();
    let base_policy =
        TruncationPolicy::new(dim + 1, man.coalgebra.max_arity().max(2) + 1).expect("valid policy");
    let r = check_ainf(&man.coalgebra, &base_policy).map_err(AppError::from)?;
    checks.push(Check {
        name: "coalgebra A-infinity".into(),
        passed: r.passes(),
        checked: r.checked,
    });
    let r = check_cinfty(&man.coalgebra, &base_policy);
    checks.push(Check {
        name: "coalgebra C-infinity".into(),
        passed: r.passes(),
        checked: r.checked,
    });
    let r = check_cyclic(&man.coalgebra, &man.pairing).map_err(AppError::from)?;
    checks.push(Check {
        name: "cyclic pairing".into(),
        passed: r.passes(),
        checked: r.checked,
    });
    let r = check_maurer_cartan(&man.tau, &man.coalgebra, &man.lie, &base_policy)
        .map_err(AppError::from)?;
    checks.push(Check {
        name: "Maurer-Cartan".into(),
        passed: r.passes(),
        checked: r.entries.len(),
    });
    for action in [
        ActionKind::LeftMult,
        ActionKind::Bracket,
        ActionKind::Conjugation,
    ] {
        let tc = man.twisted_family(action, d)?;
        let r = check_ainf(&tc, &tc.policy).map_err(AppError::from)?;
        checks.push(Check {
            name: format!("twisted family ({}) A-infinity", action.label()),
            passed: r.passes(),
            checked: r.checked,
        });
    }
    let policy = TruncationPolicy::new(d as i64, d.max(1)).expect("valid policy");
    let alg = build_twisted_algebra(
        &man.coalgebra,
        &man.pairing,
        &man.lie,
        &man.tau,
        ActionKind::Conjugation,
        &policy,
    )
    .map_err(AppError::from)?;
    let r = derivation_defects(&alg, &policy);
    checks.push(Check {
        name: "loop product derivation".into(),
        passed: r.passes(),
        checked: r.checked,
    });
    if let Some((model, file_len)) = &m.cdga {
        let len = max_length.unwrap_or(*file_len);
        let psc = build_power_series_connection(model, len).map_err(AppError::from)?;
        let flat = psc.defect(model, len);
        checks.push(Check {
            name: "connection flatness".into(),
            passed: flat.is_zero(),
            checked: len,
        });
        let sq = psc.square_defect(len);
        checks.push(Check {
            name: "connection square-zero".into(),
            passed: sq.iter().all(|v| v.is_zero()),
            checked: sq.len(),
        });
    }
    if let Some(b) = &m.bundle {
        let h = b.group_homology()?;
        let tau = b.twisting_cochain()?;
        let r =
            check_maurer_cartan(&tau, &man.coalgebra, &h, &base_policy).map_err(AppError::from)?;
        checks.push(Check {
            name: "bundle Maurer-Cartan".into(),
            passed: r.passes(),
            checked: r.entries.len(),
        });
        let tc = b.family(ActionKind::LeftMult, d)?;
        let r = check_ainf(&tc, &tc.policy).map_err(AppError::from)?;
        checks.push(Check {
            name: "bundle family A-infinity".into(),
            passed: r.passes(),
            checked: r.checked,
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    let text = if common.json {
        to_json(&json!({
            "model": man.name,
            "command": "verify",
            "max_degree": d,
            "checks": checks.iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "checked": c.checked }))
                .collect::<Vec<_>>(),
            "passed": passed,
        }))
    } else {
        let mut out = header(&man.name, "verify", d);
        for c in &checks {
            let _ = writeln!(
                out,
                "{} {} ({} checked)",
                verdict(c.passed),
                c.name,
                c.checked
            );
        }
        let _ = writeln!(out, "result {}", verdict(passed));
        out
    };
    Ok(Report { text, passed })
}
