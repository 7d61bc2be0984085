use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tripos_core::category::{Budget, Obj};
use tripos_core::completions::{Kind, Pipeline};
use tripos_core::doctrine::{doctrine_battery, BatteryConfig};
use tripos_core::export::{fragment, render_human, stage_fragment, trace_pipeline, Fragment, RunRecord, Trace};
use tripos_core::registry::{BuildContext, Built, Model, ModelSpec, Registry};
use tripos_core::report::{Battery, Outcome, ValidationReport};
use tripos_core::{Error, Result};

#[derive(Parser)]
#[command(name = "tripos", version, about = "Finite-model checker for triposes, their completions and the toposes they induce")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the doctrine battery on a model.
    Verify(Common),
    /// Run completion stages, write a trace and check the topos when asked.
    Pipeline {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of c,q,e,l,topos, in that order.
        #[arg(long, default_value = "c,q,e,l,topos")]
        stages: String,
    },
    /// Write DOT and fragment exports from the trace in the output directory.
    Export {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    /// Model spec (TOML) or a bare algebra document.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    max_size: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

/// A run that ends with a message and an outcome instead of a report.
struct Failure {
    outcome: Outcome,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            outcome: Outcome::of_error(&e),
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        outcome: Outcome::InputError,
        message: message.into(),
    }
}

fn read_spec(path: &Path) -> std::result::Result<ModelSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|x| x == "toml") {
        toml::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
    } else {
        Ok(ModelSpec::h_valued(&text))
    }
}

/// Either a model or the failing validation of its algebra.
fn load(common: &Common) -> std::result::Result<(ModelSpec, std::result::Result<Model, ValidationReport>), Failure> {
    let spec = read_spec(&common.model)?;
    let ctx = BuildContext {
        base_dir: common.model.parent().map(Path::to_path_buf),
        max_size: common.max_size as usize,
        budget: Budget::new(common.budget),
    };
    let inlined = spec.inlined(ctx.base_dir.as_deref())?;
    let built = match Registry::builtin().build(&inlined, &ctx)? {
        Built::Model(m) => Ok(m),
        Built::InvalidAlgebra(r) => Err(r),
    };
    Ok((inlined, built))
}

fn write_out(dir: &Path, name: &str, contents: &str) -> std::result::Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn json(b: &Battery) -> String {
    let mut s = serde_json::to_string_pretty(b).expect("battery serializes");
    s.push('\n');
    s
}

fn verify(common: &Common) -> std::result::Result<Outcome, Failure> {
    let (_, built) = load(common)?;
    let bat = match built {
        Ok(m) => {
            let cfg = BatteryConfig {
                objects: m.objects.clone(),
                max_projection_carrier: (common.max_size * common.max_size) as usize,
                budget: Budget::new(common.budget),
            };
            doctrine_battery(m.doctrine.as_ref(), &cfg)?
        }
        Err(r) => {
            let mut b = Battery::new("algebra");
            b.push(r);
            b
        }
    };
    let rendered = match common.format {
        Format::Human => bat.to_string(),
        Format::Structured => json(&bat),
    };
    print!("{rendered}");
    if let Some(dir) = &common.out {
        let name = match common.format {
            Format::Human => "verify.txt",
            Format::Structured => "verify.json",
        };
        write_out(dir, name, &rendered)?;
    }
    Ok(Outcome::of_checks(bat.passed()))
}

/// Parses the stage list and enforces the pipeline order.
fn parse_stages(list: &str) -> std::result::Result<(Vec<Kind>, bool), Failure> {
    let registry = Registry::builtin();
    let order = ["c", "q", "e", "l", "topos"];
    let mut last = None;
    let mut kinds = Vec::new();
    let mut topos = false;
    for s in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let pos = order.iter().position(|o| *o == s).ok_or_else(|| input_error(format!("unknown stage `{s}`")))?;
        if last.is_some_and(|l| pos <= l) {
            return Err(input_error(format!("stage `{s}` out of order; stages run as c,q,e,l,topos")));
        }
        last = Some(pos);
        if s == "topos" {
            topos = true;
        } else {
            kinds.push(registry.completion(s)?.kind());
        }
    }
    Ok((kinds, topos))
}

fn pipeline(common: &Common, stages: &str) -> std::result::Result<Outcome, Failure> {
    let (kinds, topos) = parse_stages(stages)?;
    let (spec, built) = load(common)?;
    let m = match built {
        Ok(m) => m,
        Err(r) => {
            println!("{r}");
            return Ok(Outcome::CheckFailed);
        }
    };
    if !m.tripos {
        return Err(input_error(format!("model `{}` is not a tripos", spec.kind)));
    }
    let budget = Budget::new(common.budget);
    let run = RunRecord {
        model: common.model.display().to_string(),
        spec,
        stages: stages.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        max_size: common.max_size as usize,
        budget: common.budget,
    };
    let (_, trace) = trace_pipeline(m.doctrine.clone(), &m.objects, &kinds, topos, run, &budget)?;
    let rendered = match common.format {
        Format::Human => render_human(&trace),
        Format::Structured => trace.to_json(),
    };
    print!("{rendered}");
    if let Some(dir) = &common.out {
        write_out(dir, "trace.json", &trace.to_json())?;
        if common.format == Format::Human {
            write_out(dir, "trace.txt", &rendered)?;
        }
    }
    Ok(Outcome::of_checks(trace.passed()))
}

fn render_fragment(f: &Fragment) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "category {}", f.category);
    for o in &f.objects {
        let _ = writeln!(s, "object {} = {}", o.label, o.object);
    }
    for h in &f.homs {
        let _ = writeln!(s, "hom({},{}) : {}", h.from, h.to, h.morphisms.len());
        for m in &h.morphisms {
            let _ = writeln!(s, "  {m}");
        }
    }
    s
}

fn export(out: &Path, format: Format) -> std::result::Result<Outcome, Failure> {
    let path = out.join("trace.json");
    let text = fs::read_to_string(&path)
        .map_err(|_| input_error(format!("no trace at {}; run `tripos pipeline --out` first", path.display())))?;
    let trace: Trace =
        serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let run = &trace.run;
    let ctx = BuildContext {
        base_dir: None,
        max_size: run.max_size,
        budget: Budget::new(run.budget),
    };
    let m = match Registry::builtin().build(&run.spec, &ctx)? {
        Built::Model(m) => m,
        Built::InvalidAlgebra(r) => return Err(input_error(format!("trace model no longer validates: {r}"))),
    };
    let stages: Vec<&str> = run.stages.iter().map(String::as_str).filter(|s| *s != "topos").collect();
    let p = Registry::builtin().pipeline(m.doctrine.clone(), &stages)?;
    let frag = final_fragment(&p, &m.objects)?;
    let out_doctrine = p.output();
    let f = fragment(out_doctrine.as_ref(), &frag, &ctx.budget)?;
    write_out(out, "fragment.dot", &f.to_dot())?;
    match format {
        Format::Human => write_out(out, "fragment.txt", &render_fragment(&f))?,
        Format::Structured => write_out(out, "fragment.json", &f.to_json())?,
    }
    println!("exported {} objects from {}", f.objects.len(), f.category);
    Ok(Outcome::Pass)
}

fn final_fragment(p: &Pipeline, base: &[Obj]) -> Result<Vec<(String, Obj)>> {
    stage_fragment(p, base, p.stages.len())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Outcome::InputError.code() as u8 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify(common) => verify(common),
        Command::Pipeline { common, stages } => pipeline(common, stages),
        Command::Export { out, format } => export(out, *format),
    };
    let outcome = result.unwrap_or_else(|f| {
        eprintln!("error: {}", f.message);
        f.outcome
    });
    ExitCode::from(outcome.code() as u8)
}
