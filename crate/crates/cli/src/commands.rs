use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use inspectrank_core::costmodel::CostConfig;
use inspectrank_core::error::{Error, Result};
use inspectrank_core::inventory::{
    generate_inventory, inventory_to_string, load_inventory, SynthesisConfig,
    ValidationGrid,
};
use inspectrank_core::money::Money;
use inspectrank_core::simulation::{
    budget_sweep, cost_cdf, default_budget_grid, pareto_front, scenario, select_budgets,
    BudgetSweep, BuildingCosts, NamedBudgets, SweepConfig,
};

use crate::config::load_run;
use crate::output::{
    write_bytes, write_json, CsvOut, CDF_SCHEMA, CURVES_SCHEMA, DECISIONS_SCHEMA,
    INVENTORY_SCHEMA, SAMPLES_SCHEMA, SCENARIO_SCHEMA, SWEEP_SCHEMA,
};

// ── prioritize ───────────────────────────────────────────────────────────

#[derive(Args)]
pub struct PrioritizeArgs {
    /// Run configuration TOML
    #[arg(short, long)]
    config: PathBuf,
    /// Ground-motion intensity of the anticipated event
    #[arg(short = 'x', long)]
    intensity: f64,
    /// Years until the event
    #[arg(short, long, default_value_t = 0.0)]
    time: f64,
    /// Inspection budget, dollars
    #[arg(short, long)]
    budget: f64,
    /// Write artifacts here instead of the configured output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct LevelCounts {
    level: u8,
    inspected: usize,
    preclassified: usize,
}

#[derive(Serialize)]
struct PrioritizeSummary {
    intensity: f64,
    time: f64,
    budget: f64,
    inventory_size: usize,
    inspected: usize,
    spent: f64,
    avoided_expected_cost: f64,
    residual_expected_cost: f64,
    counts: Vec<LevelCounts>,
}

/// Orders by descending expected-cost-per-fee ratio without dividing:
/// compares c_a/w_a against c_b/w_b via exact cross products.
fn ratio_desc(c_a: Money, w_a: Money, c_b: Money, w_b: Money) -> Ordering {
    let left = c_a.cents() as i128 * w_b.cents() as i128;
    let right = c_b.cents() as i128 * w_a.cents() as i128;
    right.cmp(&left)
}

pub fn prioritize(args: PrioritizeArgs) -> Result<()> {
    let run = load_run(&args.config, args.out_dir.as_deref())?;
    let costs = BuildingCosts::new(&run.buildings, &run.costs)?;
    let report = scenario(
        &run.buildings,
        &costs,
        &run.config.rates,
        args.time,
        args.intensity,
        Money::from_dollars(args.budget)?,
        run.config.sweep.granularity_money()?,
        run.config.sweep.cell_limit,
    )?;

    // Inspected buildings first, in priority order (highest expected cost
    // per inspection dollar first); the pre-classified tail keeps the same
    // ordering so the file doubles as a waiting list.
    let mut order: Vec<usize> = (0..run.buildings.len()).collect();
    order.sort_by(|&a, &b| {
        report.selection.z[b]
            .cmp(&report.selection.z[a])
            .then_with(|| {
                ratio_desc(
                    report.decisions[a].c_star,
                    costs.weights()[a],
                    report.decisions[b].c_star,
                    costs.weights()[b],
                )
            })
            .then_with(|| run.buildings[a].id.cmp(&run.buildings[b].id))
    });

    let mut csv = CsvOut::new(DECISIONS_SCHEMA);
    csv.row(["id", "x", "p1", "p2", "p3", "d_star", "c_star", "w", "inspect_flag"])?;
    for &i in &order {
        let b = &run.buildings[i];
        let p = b.state_probabilities(args.intensity)?.as_array();
        csv.row([
            b.id.clone(),
            format!("{}", args.intensity),
            format!("{}", p[0]),
            format!("{}", p[1]),
            format!("{}", p[2]),
            format!("{}", report.decisions[i].d_star),
            format!("{}", report.decisions[i].c_star),
            format!("{}", costs.weights()[i]),
            format!("{}", report.selection.z[i]),
        ])?;
    }
    csv.save(&run.out_dir.join("decisions.csv"))?;

    let summary = PrioritizeSummary {
        intensity: args.intensity,
        time: args.time,
        budget: args.budget,
        inventory_size: run.buildings.len(),
        inspected: report.selection.z.iter().filter(|z| **z).count(),
        spent: report.selection.total_weight.as_dollars(),
        avoided_expected_cost: report.selection.total_value.as_dollars(),
        residual_expected_cost: report.selection.residual_cost.as_dollars(),
        counts: level_counts(&report.counts),
    };
    write_json(&run.out_dir.join("prioritize-summary.json"), &summary)
}

fn level_counts(counts: &[[usize; 2]; 3]) -> Vec<LevelCounts> {
    counts
        .iter()
        .enumerate()
        .map(|(i, row)| LevelCounts {
            level: i as u8 + 1,
            inspected: row[0],
            preclassified: row[1],
        })
        .collect()
}

// ── sweep ────────────────────────────────────────────────────────────────

#[derive(Args)]
pub struct SweepArgs {
    /// Run configuration TOML
    #[arg(short, long)]
    config: PathBuf,
    /// Override the configured sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write artifacts here instead of the configured output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepLevel {
    budget: f64,
    mean: f64,
    std: f64,
    mean_std_ratio: Option<f64>,
    pareto: bool,
}

#[derive(Serialize)]
struct NamedBudget {
    index: usize,
    budget: f64,
    mean: f64,
    std: f64,
}

#[derive(Serialize)]
struct NamedBudgetsSummary {
    unprepared: NamedBudget,
    risk_neutral: NamedBudget,
    min_variance: NamedBudget,
    risk_averse: NamedBudget,
    extremely_risk_averse: NamedBudget,
}

#[derive(Serialize)]
struct SweepSummary {
    inventory_size: usize,
    full_inspection_cost: f64,
    samples: usize,
    seed: u64,
    common_random_numbers: bool,
    granularity: f64,
    budget_cap: Option<f64>,
    levels: Vec<SweepLevel>,
    named_budgets: NamedBudgetsSummary,
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let run = load_run(&args.config, args.out_dir.as_deref())?;
    let section = &run.config.sweep;
    if section.budget_levels < 2 {
        return Err(Error::config(format!(
            "budget_levels must be at least 2, got {}",
            section.budget_levels
        )));
    }
    let costs = BuildingCosts::new(&run.buildings, &run.costs)?;
    let sweep_config = SweepConfig {
        budgets: default_budget_grid(costs.total_weight(), section.budget_levels),
        samples: args.samples.unwrap_or(section.samples),
        seed: args.seed.unwrap_or(section.seed),
        common_random_numbers: section.common_random_numbers,
        granularity: section.granularity_money()?,
        cell_limit: section.cell_limit,
    };
    let sweep = budget_sweep(
        &run.buildings,
        &run.config.hazard,
        &run.config.rates,
        &run.costs,
        &sweep_config,
    )?;
    let named = select_budgets(&sweep, section.budget_cap_money()?)?;

    write_sweep_csv(&sweep, &run.out_dir.join("sweep.csv"))?;
    write_samples_csv(&sweep, &run.out_dir.join("samples.csv"))?;
    write_cdf_csv(&sweep, &named, &run.out_dir.join("cdf.csv"))?;

    let ratios = sweep.ratios();
    let summary = SweepSummary {
        inventory_size: run.buildings.len(),
        full_inspection_cost: costs.total_weight().as_dollars(),
        samples: sweep_config.samples,
        seed: sweep_config.seed,
        common_random_numbers: sweep_config.common_random_numbers,
        granularity: sweep_config.granularity.as_dollars(),
        budget_cap: section.budget_cap,
        levels: (0..sweep.budgets.len())
            .map(|k| SweepLevel {
                budget: sweep.budgets[k].as_dollars(),
                mean: sweep.means[k],
                std: sweep.stds[k],
                mean_std_ratio: ratios[k],
                pareto: sweep.pareto[k],
            })
            .collect(),
        named_budgets: named_summary(&sweep, &named),
    };
    write_json(&run.out_dir.join("sweep-summary.json"), &summary)
}

fn named_summary(sweep: &BudgetSweep, named: &NamedBudgets) -> NamedBudgetsSummary {
    let at = |index: usize| NamedBudget {
        index,
        budget: sweep.budgets[index].as_dollars(),
        mean: sweep.means[index],
        std: sweep.stds[index],
    };
    NamedBudgetsSummary {
        unprepared: at(named.unprepared),
        risk_neutral: at(named.risk_neutral),
        min_variance: at(named.min_variance),
        risk_averse: at(named.risk_averse),
        extremely_risk_averse: at(named.extremely_risk_averse),
    }
}

fn write_sweep_csv(sweep: &BudgetSweep, path: &Path) -> Result<()> {
    let mut csv = CsvOut::new(SWEEP_SCHEMA);
    csv.row(["budget", "mean", "std", "pareto"])?;
    for k in 0..sweep.budgets.len() {
        csv.row([
            format!("{}", sweep.budgets[k]),
            format!("{}", sweep.means[k]),
            format!("{}", sweep.stds[k]),
            format!("{}", sweep.pareto[k]),
        ])?;
    }
    csv.save(path)
}

fn write_samples_csv(sweep: &BudgetSweep, path: &Path) -> Result<()> {
    let mut csv = CsvOut::new(SAMPLES_SCHEMA);
    csv.row(["budget", "sample", "t", "x", "discounted_cost"])?;
    for (k, row) in sweep.outcomes.iter().enumerate() {
        for (m, outcome) in row.iter().enumerate() {
            csv.row([
                format!("{}", sweep.budgets[k]),
                format!("{m}"),
                format!("{}", outcome.t),
                format!("{}", outcome.x),
                format!("{}", outcome.discounted),
            ])?;
        }
    }
    csv.save(path)
}

fn write_cdf_csv(sweep: &BudgetSweep, named: &NamedBudgets, path: &Path) -> Result<()> {
    let communities = [
        ("unprepared", named.unprepared),
        ("risk_neutral", named.risk_neutral),
        ("risk_averse", named.risk_averse),
        ("extremely_risk_averse", named.extremely_risk_averse),
    ];
    let mut csv = CsvOut::new(CDF_SCHEMA);
    csv.row(["community", "budget", "cost", "probability"])?;
    for (name, index) in communities {
        let samples: Vec<Money> = sweep.outcomes[index].iter().map(|o| o.discounted).collect();
        for (cost, probability) in cost_cdf(&samples) {
            csv.row([
                name.to_string(),
                format!("{}", sweep.budgets[index]),
                format!("{cost}"),
                format!("{probability}"),
            ])?;
        }
    }
    csv.save(path)
}

// ── pareto ───────────────────────────────────────────────────────────────

#[derive(Args)]
pub struct ParetoArgs {
    /// A sweep.csv produced by the sweep command
    #[arg(short, long)]
    input: PathBuf,
    /// Output path (default: pareto.csv next to the input)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

pub fn pareto(args: ParetoArgs) -> Result<()> {
    let file = std::fs::File::open(&args.input).map_err(|source| Error::Io {
        path: args.input.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| Error::parse(0, format!("{}: {e}", args.input.display())))?;
    if header != *&["budget", "mean", "std", "pareto"][..] {
        return Err(Error::parse(
            0,
            format!("expected header budget,mean,std,pareto, got {header:?}"),
        ));
    }

    let mut budgets: Vec<String> = Vec::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::parse(row, e.to_string()))?;
        if record.len() != 4 {
            return Err(Error::parse(row, format!("expected 4 fields, got {}", record.len())));
        }
        let mean: f64 = record[1]
            .parse()
            .map_err(|e| Error::parse(row, format!("mean: {e}")))?;
        let std: f64 = record[2]
            .parse()
            .map_err(|e| Error::parse(row, format!("std: {e}")))?;
        budgets.push(record[0].to_string());
        points.push((mean, std));
    }
    let flags = pareto_front(&points);

    let mut csv = CsvOut::new(SWEEP_SCHEMA);
    csv.row(["budget", "mean", "std", "pareto"])?;
    for i in 0..points.len() {
        csv.row([
            budgets[i].clone(),
            format!("{}", points[i].0),
            format!("{}", points[i].1),
            format!("{}", flags[i]),
        ])?;
    }
    let out = args
        .out
        .unwrap_or_else(|| args.input.with_file_name("pareto.csv"));
    csv.save(&out)
}

// ── simulate ─────────────────────────────────────────────────────────────

#[derive(Args)]
pub struct SimulateArgs {
    /// Run configuration TOML
    #[arg(short, long)]
    config: PathBuf,
    /// Intensity level to evaluate (repeat for several scenarios)
    #[arg(short = 'x', long = "intensity", required = true)]
    intensities: Vec<f64>,
    /// Years until the event
    #[arg(short, long, default_value_t = 0.0)]
    time: f64,
    /// Inspection budget, dollars
    #[arg(short, long, default_value_t = 0.0)]
    budget: f64,
    /// Write artifacts here instead of the configured output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let run = load_run(&args.config, args.out_dir.as_deref())?;
    let costs = BuildingCosts::new(&run.buildings, &run.costs)?;
    let mut csv = CsvOut::new(SCENARIO_SCHEMA);
    csv.row(["intensity", "time", "budget", "level", "inspected", "preclassified"])?;
    for &x in &args.intensities {
        let report = scenario(
            &run.buildings,
            &costs,
            &run.config.rates,
            args.time,
            x,
            Money::from_dollars(args.budget)?,
            run.config.sweep.granularity_money()?,
            run.config.sweep.cell_limit,
        )?;
        for (level, row) in report.counts.iter().enumerate() {
            csv.row([
                format!("{x}"),
                format!("{}", args.time),
                format!("{}", args.budget),
                format!("{}", level + 1),
                format!("{}", row[0]),
                format!("{}", row[1]),
            ])?;
        }
    }
    csv.save(&run.out_dir.join("scenario.csv"))
}

// ── gen-inventory ────────────────────────────────────────────────────────

#[derive(Args)]
pub struct GenInventoryArgs {
    /// Number of buildings to draw from the default marginals
    #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
    total: Option<usize>,
    /// Synthesis spec TOML (marginals or explicit cells)
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path
    #[arg(short, long)]
    out: PathBuf,
}

pub fn gen_inventory(args: GenInventoryArgs) -> Result<()> {
    let spec = match (&args.spec, args.total) {
        (Some(path), _) => SynthesisConfig::load(path)?,
        (None, total) => {
            let spec = SynthesisConfig {
                total,
                ..SynthesisConfig::default()
            };
            spec.validate()?;
            spec
        }
    };
    let buildings = generate_inventory(&spec, args.seed)?;
    let mut text = format!("# {INVENTORY_SCHEMA}\n");
    text.push_str(&inventory_to_string(&buildings));
    write_bytes(&args.out, text.as_bytes())
}

// ── cost-config ──────────────────────────────────────────────────────────

#[derive(Args)]
pub struct CostConfigArgs {
    /// Emit the cost model as TOML
    #[arg(long, required = true)]
    dump: bool,
    /// Use this hourly-demand multiplier instead of the default
    #[arg(long)]
    demand_multiplier: Option<f64>,
    /// Write to a file instead of stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

pub fn cost_config(args: CostConfigArgs) -> Result<()> {
    let mut config = CostConfig::default();
    if let Some(demand) = args.demand_multiplier {
        config.inspection.demand_multiplier = demand;
    }
    config.validate()?;
    let text = config.to_toml_string();
    match &args.out {
        Some(path) => write_bytes(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ── curves ───────────────────────────────────────────────────────────────

#[derive(Args)]
pub struct CurvesArgs {
    /// Inventory CSV
    #[arg(short, long)]
    inventory: PathBuf,
    /// Smallest tabulated intensity
    #[arg(long, default_value_t = 1e-3)]
    min: f64,
    /// Largest tabulated intensity
    #[arg(long, default_value_t = 10.0)]
    max: f64,
    /// Number of grid points (log-spaced)
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output CSV path
    #[arg(short, long, default_value = "curves.csv")]
    out: PathBuf,
}

pub fn curves(args: CurvesArgs) -> Result<()> {
    let grid = ValidationGrid {
        min: args.min,
        max: args.max,
        points: args.points,
    };
    grid.validate()?;
    let buildings = load_inventory(&args.inventory, &grid)?;
    let xs = grid.points();
    let mut csv = CsvOut::new(CURVES_SCHEMA);
    csv.row(["id", "x", "p_beyond_usable", "p_beyond_restricted", "p1", "p2", "p3"])?;
    for b in &buildings {
        for &x in &xs {
            let p = b.state_probabilities(x)?.as_array();
            csv.row([
                b.id.clone(),
                format!("{x}"),
                format!("{}", b.curve0.evaluate(x)?),
                format!("{}", b.curve1.evaluate(x)?),
                format!("{}", p[0]),
                format!("{}", p[1]),
                format!("{}", p[2]),
            ])?;
        }
    }
    csv.save(&args.out)
}
