//! `nestfold`: check declarations, derive Agda, evaluate folds, run the
//! property suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nestfold_core::analysis::{classify, group_pos, GroupSchema};
use nestfold_core::derive::{derive, DeriveOptions};
use nestfold_core::emit::{emit_agda, EmitModule};
use nestfold_core::runtime::algebra::{by_name, CATALOGUE};
use nestfold_core::runtime::direct::{identity_continuation, sum_aux};
use nestfold_core::runtime::{
    eval_hfold_via_nfold, eval_ind, eval_nfold, eval_nfold_prime, run_suite, typecheck_value, DepAlgebra, EvalError,
    RuntimeResult, SuiteConfig,
};
use nestfold_core::{parse_program, parse_value_file, well_formed, Classification, Diagnostic, Program, Severity};

#[derive(Parser)]
#[command(
    name = "nestfold",
    version,
    about = "Folds and induction principles for nested data types"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a declaration file and print the classification of each group.
    Check { file: PathBuf },
    /// Write one Agda module per group.
    Derive {
        file: PathBuf,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        /// Render the index type as `Nat` for single unary declarations.
        #[arg(long)]
        nat_index: bool,
        #[arg(long, value_enum, default_value_t = Backend::Agda)]
        backend: Backend,
    },
    /// Fold the values in a value file with a catalogue algebra.
    Eval {
        decls: PathBuf,
        values: PathBuf,
        /// One of sum, length, depth, trace, or sumAux (bush-shaped types).
        #[arg(long, default_value = "sum")]
        algebra: String,
        #[arg(long, value_enum, default_value_t = Route::Nfold)]
        via: Route,
    },
    /// Exhaustively check the fold equations on small values.
    Test {
        file: PathBuf,
        #[arg(long, default_value_t = 6, value_parser = positive)]
        max_size: usize,
        /// Deepest index to enumerate at (default 3 for unary types, 1 otherwise).
        #[arg(long)]
        index_depth: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Agda,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Nfold,
    NfoldPrime,
    Ind,
}

/// Outcome of a command: exit status 1 for domain failures, 2 for usage
/// and I/O.
enum Failure {
    Domain,
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { file } => check(&file),
        Command::Derive {
            file,
            out,
            nat_index,
            backend: Backend::Agda,
        } => derive_cmd(&file, &out, nat_index),
        Command::Eval {
            decls,
            values,
            algebra,
            via,
        } => eval(&decls, &values, &algebra, via),
        Command::Test {
            file,
            max_size,
            index_depth,
        } => test(&file, max_size, index_depth),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("nestfold: {msg}");
            ExitCode::from(2)
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn report(path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}:{d}", path.display());
    }
}

/// Parses and validates a declaration file and builds every group schema.
fn load(path: &Path) -> Result<(Program, Vec<GroupSchema>), Failure> {
    let text = read(path)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let program = parse_program(&text, &name).map_err(|ds| {
        report(path, &ds);
        Failure::Domain
    })?;
    let diags = well_formed(&program);
    report(path, &diags);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(Failure::Domain);
    }
    let mut schemas = Vec::new();
    let mut errors = Vec::new();
    for g in classify(&program) {
        match GroupSchema::build(&program, &g) {
            Ok(s) => schemas.push(s),
            Err(e) => errors.push(Diagnostic::error(group_pos(&program, &g), e.to_string())),
        }
    }
    if !errors.is_empty() {
        report(path, &errors);
        return Err(Failure::Domain);
    }
    Ok((program, schemas))
}

fn check(path: &Path) -> Outcome {
    let (_, schemas) = load(path)?;
    for s in &schemas {
        let g = &s.group;
        let mut line = format!("{}: {}", g.decls.join(", "), g.classification);
        if g.decls.len() > 1 {
            line.push_str(", mutual");
        }
        if g.classification == Classification::Nested && s.is_unary_singleton() {
            line.push_str(", index \u{2245} Nat");
        }
        println!("{line}");
        let apps: Vec<String> = s.spec.app_ctors.iter().map(|(c, n)| format!("{c}/{n}")).collect();
        println!(
            "  index type {}: {}; {}",
            s.spec.name,
            s.spec.var_ctors.join(", "),
            apps.join(", ")
        );
    }
    Ok(())
}

fn derive_cmd(path: &Path, out: &Path, nat_index: bool) -> Outcome {
    let (_, schemas) = load(path)?;
    let source = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", out.display())))?;
    let mut failed = false;
    for s in &schemas {
        if nat_index && !s.is_unary_singleton() {
            println!(
                "note: {} has no Nat-indexed form; using {}",
                s.group.decls.join(", "),
                s.spec.name
            );
        }
        let d = match derive(s, DeriveOptions { nat_index }) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("{}: error: {}: {e}", path.display(), s.group.module_name());
                failed = true;
                continue;
            }
        };
        let text = match emit_agda(&EmitModule::from_derivation(&d, &source)) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{}: error: {}: {e}", path.display(), d.module);
                failed = true;
                continue;
            }
        };
        let file = out.join(format!("{}.agda", d.module));
        fs::write(&file, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", file.display())))?;
        let names: Vec<&str> = d.defs.iter().map(|def| def.name.as_str()).collect();
        println!("wrote {}: {}", file.display(), names.join(", "));
        for (what, why) in &d.skipped {
            println!("note: skipped {what}: {why}");
        }
    }
    if failed {
        Err(Failure::Domain)
    } else {
        Ok(())
    }
}

fn eval(decls: &Path, values: &Path, algebra: &str, via: Route) -> Outcome {
    let (program, _) = load(decls)?;
    let text = read(values)?;
    let bindings = parse_value_file(&text, &program).map_err(|d| {
        report(values, &[d]);
        Failure::Domain
    })?;
    let mut lines = Vec::new();
    let mut failed = false;
    for b in &bindings {
        let diags: Vec<Diagnostic> = typecheck_value(&b.schema, &b.value_type.index, &b.value_type.bases, &b.value)
            .into_iter()
            .map(|mut d| {
                d.pos = b.pos;
                d
            })
            .collect();
        if !diags.is_empty() {
            report(values, &diags);
            failed = true;
            continue;
        }
        let result = if algebra == "sumAux" {
            if via != Route::Nfold {
                return Err(Failure::Usage("sumAux only runs through the higher-order fold".into()));
            }
            if b.schema.bush_shape().is_none() || b.value_type.index.depth() != 1 {
                return Err(Failure::Usage(format!(
                    "sumAux needs a value of a bush-shaped type at `{} Nat`",
                    b.schema.decls[0].name
                )));
            }
            eval_hfold_via_nfold(&b.schema, &sum_aux(), &b.value).and_then(|r| r.apply(identity_continuation()))
        } else {
            let Some(alg) = by_name(&b.schema, algebra) else {
                return Err(Failure::Usage(format!(
                    "unknown algebra `{algebra}` (expected one of {}, sumAux)",
                    CATALOGUE.join(", ")
                )));
            };
            let idx = &b.value_type.index;
            match via {
                Route::Nfold => eval_nfold(&b.schema, &alg, idx, &b.value),
                Route::NfoldPrime => eval_nfold_prime(&b.schema, &alg, idx, &b.value),
                Route::Ind => eval_ind(&b.schema, &DepAlgebra::from_algebra(&alg), idx, &b.value),
            }
        };
        match result.and_then(|r| show(&r)) {
            Ok(s) => lines.push((b.name.clone(), s)),
            Err(e) => {
                eprintln!("{}:{}: error: {e}", values.display(), b.pos);
                failed = true;
            }
        }
    }
    if lines.len() == 1 && bindings.len() == 1 {
        println!("{}", lines[0].1);
    } else {
        for (name, s) in lines {
            println!("{} = {s}", name.as_deref().unwrap_or("it"));
        }
    }
    if failed {
        Err(Failure::Domain)
    } else {
        Ok(())
    }
}

fn show(r: &RuntimeResult) -> Result<String, EvalError> {
    Ok(r.observe()?.to_string())
}

fn test(path: &Path, max_size: usize, index_depth: Option<usize>) -> Outcome {
    let (_, schemas) = load(path)?;
    let mut failed = false;
    for s in &schemas {
        let mut cfg = SuiteConfig::new(s, max_size);
        if let Some(d) = index_depth {
            cfg.index_depth = d;
        }
        println!(
            "{} (max size {}, index depth {}, bases 0..{})",
            s.group.decls.join(", "),
            cfg.max_size,
            cfg.index_depth,
            cfg.bases.len()
        );
        let mut total = 0;
        for r in run_suite(s, &cfg) {
            total += r.cases;
            let status = if r.passed() { "ok  " } else { "FAIL" };
            println!("  {status} {}: {} cases over {} values", r.name, r.cases, r.values);
            if let Some(c) = &r.failure {
                failed = true;
                println!("       counterexample : {} = {}", c.index, c.value);
                println!("       with {}: {} /= {}", c.algebra, c.left, c.right);
            }
        }
        println!("  {total} cases");
    }
    if failed {
        Err(Failure::Domain)
    } else {
        Ok(())
    }
}
