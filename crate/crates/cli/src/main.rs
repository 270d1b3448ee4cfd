use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use pffb::adversary::{
    adversary_sum_cj, adversary_sum_fj, compare_with_reference, default_eps, full_batch_family,
    never_wait_tightness_instance, play_threshold_game, AdversaryError,
};
use pffb::bounds::{lower_bound_matrix, simple_lower_bound, sung_bound};
use pffb::compare::{compare, to_csv, to_json, CompareError};
use pffb::engine::simulate_instance;
use pffb::gantt::{gantt_chart, render_ascii, render_svg};
use pffb::oracle::{
    optimal_permutation_schedule, optimal_schedule_all_orders, OracleError, DEFAULT_CAP,
};
use pffb::time::{parse_rational, Rational};
use pffb::{
    evaluate_objective, validate_instance, Instance, ObjectiveKind, Schedule, StrategyKind,
};

const CAP_ENV: &str = "PFFB_ORACLE_CAP";

#[derive(Parser)]
#[command(
    name = "pffb",
    version,
    about = "Online scheduling of proportionate flexible flow shops of batching machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Completion-time lower bounds of an instance.
    Bound {
        instance: PathBuf,
        /// Also compute the bound for single-machine, zero-release instances.
        #[arg(long)]
        sung: bool,
        /// Closed-form bound for stage I and job J (both 1-based).
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        simple: Option<Vec<usize>>,
    },
    /// Simulate an online strategy on an instance.
    Run {
        instance: PathBuf,
        #[arg(long, value_parser = parse_strategy)]
        strategy: StrategyKind,
        /// Write the schedule JSON here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the full event trace JSON here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Offline optimum by exhaustive search.
    Oracle {
        instance: PathBuf,
        #[arg(long, value_parser = parse_objective)]
        objective: ObjectiveKind,
        /// Search over every job order, not only release order.
        #[arg(long)]
        all_orders: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Play an adversarial family against a strategy.
    Adversary {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_parser = parse_strategy)]
        strategy: StrategyKind,
        #[arg(long, default_value_t = 10)]
        b1: usize,
        /// Rational α; an integer for the full-batch family.
        #[arg(long, value_parser = parse_rational_arg)]
        alpha: Option<Rational>,
        #[arg(long, default_value_t = 1)]
        m1: usize,
        /// Reaction delay of the threshold adversaries; defaults to 1/(10·b1).
        #[arg(long, value_parser = parse_rational_arg)]
        eps: Option<Rational>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Table of strategies against the optimum or the lower bound.
    Compare {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_strategy, required = true)]
        strategies: Vec<StrategyKind>,
        #[arg(long, value_parser = parse_objective)]
        objective: ObjectiveKind,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        /// Compare against the lower bound only, skipping the oracle.
        #[arg(long)]
        bound_only: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Render a schedule as a job-oriented Gantt chart.
    Gantt {
        schedule: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ChartFormat::Ascii)]
        format: ChartFormat,
        /// Columns (ascii) for the whole horizon.
        #[arg(long, default_value_t = 80)]
        width: usize,
        /// Pixels per time unit (svg).
        #[arg(long, default_value_t = 20.0)]
        scale: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Sumcj,
    Sumfj,
    NwTight,
    FullBatch,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartFormat {
    Ascii,
    Svg,
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse()
}

fn parse_objective(s: &str) -> Result<ObjectiveKind, String> {
    s.parse::<ObjectiveKind>().map_err(|e| e.to_string())
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn oracle_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{CAP_ENV} must be a nonnegative integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    validate_instance(&inst).with_context(|| format!("invalid instance {}", path.display()))?;
    Ok(inst)
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Schedule::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn objectives(inst: &Instance, sched: &Schedule) -> Result<Value> {
    if inst.num_jobs() == 0 {
        return Ok(Value::Null);
    }
    let mut map = Map::new();
    for kind in ObjectiveKind::ALL {
        map.insert(
            kind.code().into(),
            json!(evaluate_objective(inst, sched, kind)?),
        );
    }
    Ok(Value::Object(map))
}

fn cmd_bound(path: &Path, sung: bool, simple: Option<Vec<usize>>) -> Result<Value> {
    let inst = load_instance(path)?;
    let bm = lower_bound_matrix(&inst);
    let mut out = json!({ "bounds": bm, "makespan_bound": bm.makespan_bound() });
    if sung {
        out["sung"] = json!(sung_bound(&inst)?);
    }
    if let Some(ij) = simple {
        let (i, j) = (ij[0], ij[1]);
        if i == 0 || i > inst.num_stages() || j == 0 || j > inst.num_jobs() {
            bail!(
                "--simple {i} {j} is outside {} stages and {} jobs",
                inst.num_stages(),
                inst.num_jobs()
            );
        }
        out["simple"] = json!({
            "stage": i,
            "job": j,
            "value": simple_lower_bound(&inst, i - 1, j - 1),
        });
    }
    Ok(out)
}

fn cmd_run(
    path: &Path,
    kind: StrategyKind,
    output: Option<&Path>,
    trace_path: Option<&Path>,
) -> Result<Value> {
    let inst = load_instance(path)?;
    let trace = simulate_instance(&inst, kind.build().as_mut())?;
    if let Some(p) = output {
        fs::write(p, trace.schedule.to_json())
            .with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = trace_path {
        fs::write(p, trace.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(json!({
        "strategy": kind.name(),
        "schedule": trace.schedule,
        "objectives": objectives(&inst, &trace.schedule)?,
    }))
}

fn cmd_oracle(
    path: &Path,
    kind: ObjectiveKind,
    all_orders: bool,
    cap: Option<usize>,
) -> Result<Value> {
    let inst = load_instance(path)?;
    let cap = oracle_cap(cap)?;
    if all_orders {
        let value = optimal_schedule_all_orders(&inst, kind, cap)?;
        return Ok(json!({ "objective": kind, "all_orders": true, "optimum": value }));
    }
    let (schedule, value) = optimal_permutation_schedule(&inst, kind, cap)?;
    Ok(json!({ "objective": kind, "all_orders": false, "optimum": value, "schedule": schedule }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_adversary(
    family: Family,
    kind: StrategyKind,
    b1: usize,
    alpha: Option<Rational>,
    m1: usize,
    eps: Option<Rational>,
    cap: Option<usize>,
) -> Result<Value> {
    let mut strategy = kind.build();
    match family {
        Family::Sumcj | Family::Sumfj => {
            let eps = eps.unwrap_or_else(|| default_eps(b1.max(1)));
            let mut adv = match family {
                Family::Sumcj => adversary_sum_cj(b1, eps)?,
                _ => adversary_sum_fj(b1, eps)?,
            };
            // The realized instances have a single stage and at most b1 jobs,
            // well within reach of the pruned search.
            let cap = cap.unwrap_or(b1.max(oracle_cap(None)?));
            let report = play_threshold_game(&mut adv, strategy.as_mut(), cap)?;
            Ok(json!({
                "family": family_name(family),
                "strategy": kind.name(),
                "instance": report.realized,
                "trace": report.trace,
                "objective": report.ratio.objective,
                "value": report.ratio.value,
                "optimum": report.ratio.optimum,
                "ratio": report.ratio.ratio,
            }))
        }
        Family::NwTight => {
            let alpha = alpha.unwrap_or_else(|| Rational::new(1.into(), 2.into()));
            let t = never_wait_tightness_instance(&alpha, m1)?;
            let (trace, ratios) =
                compare_with_reference(&t.instance, &t.reference, strategy.as_mut())?;
            Ok(json!({
                "family": family_name(family),
                "strategy": kind.name(),
                "instance": t.instance,
                "reference": t.reference,
                "trace": trace,
                "ratios": ratios,
            }))
        }
        Family::FullBatch => {
            let alpha = alpha.unwrap_or_else(|| Rational::from_integer(1.into()));
            if !alpha.is_integer() {
                bail!("the full-batch family needs an integer alpha, got {alpha}");
            }
            let alpha: usize = alpha
                .to_integer()
                .try_into()
                .context("alpha out of range")?;
            let fam = full_batch_family(alpha)?;
            let (trace, ratios) =
                compare_with_reference(&fam.instance, &fam.reference, strategy.as_mut())?;
            Ok(json!({
                "family": family_name(family),
                "strategy": kind.name(),
                "instance": fam.instance,
                "reference": fam.reference,
                "trace": trace,
                "ratios": ratios,
            }))
        }
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Sumcj => "sumcj",
        Family::Sumfj => "sumfj",
        Family::NwTight => "nw-tight",
        Family::FullBatch => "full-batch",
    }
}

fn run(cli: Cli) -> Result<String> {
    let value = match cli.command {
        Command::Bound {
            instance,
            sung,
            simple,
        } => cmd_bound(&instance, sung, simple)?,
        Command::Run {
            instance,
            strategy,
            output,
            trace,
        } => cmd_run(&instance, strategy, output.as_deref(), trace.as_deref())?,
        Command::Oracle {
            instance,
            objective,
            all_orders,
            cap,
        } => cmd_oracle(&instance, objective, all_orders, cap)?,
        Command::Adversary {
            family,
            strategy,
            b1,
            alpha,
            m1,
            eps,
            cap,
        } => cmd_adversary(family, strategy, b1, alpha, m1, eps, cap)?,
        Command::Compare {
            instance,
            strategies,
            objective,
            format,
            bound_only,
            cap,
        } => {
            let inst = load_instance(&instance)?;
            let cap = oracle_cap(cap)?;
            let rows = compare(&inst, &strategies, objective, cap, bound_only)?;
            return Ok(match format {
                TableFormat::Csv => to_csv(&rows),
                TableFormat::Json => to_json(&rows) + "\n",
            });
        }
        Command::Gantt {
            schedule,
            instance,
            format,
            width,
            scale,
        } => {
            let inst = load_instance(&instance)?;
            let sched = load_schedule(&schedule)?;
            let chart = gantt_chart(&inst, &sched)?;
            return Ok(match format {
                ChartFormat::Ascii => render_ascii(&chart, width.max(1)),
                ChartFormat::Svg => render_svg(&chart, scale),
            });
        }
    };
    Ok(serde_json::to_string(&value)? + "\n")
}

fn is_size_cap(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(
            e.downcast_ref::<OracleError>(),
            Some(OracleError::SizeCap { .. })
        ) || matches!(
            e.downcast_ref::<CompareError>(),
            Some(CompareError::Oracle(OracleError::SizeCap { .. }))
        ) || matches!(
            e.downcast_ref::<AdversaryError>(),
            Some(AdversaryError::Oracle(OracleError::SizeCap { .. }))
        )
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_size_cap(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
