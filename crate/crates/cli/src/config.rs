//! Run configuration: one TOML file naming the inventory and cost model
//! plus hazard, rate, and sweep settings. Relative paths inside the file
//! resolve against the file's own directory, so a run directory is
//! self-contained.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use inspectrank_core::costmodel::CostConfig;
use inspectrank_core::error::{Error, Result};
use inspectrank_core::inventory::{
    apply_usage_scaling, load_inventory, Building, ScalingSpec, ValidationGrid,
};
use inspectrank_core::knapsack::DEFAULT_CELL_LIMIT;
use inspectrank_core::money::Money;
use inspectrank_core::simulation::{default_granularity, HazardModel, Rates, DEFAULT_BUDGET_LEVELS};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Inventory CSV path.
    pub inventory: PathBuf,
    /// Cost model TOML; the built-in tables apply when absent.
    #[serde(default)]
    pub cost_config: Option<PathBuf>,
    /// Where artifacts go; created on demand. `--out-dir` overrides it.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub hazard: HazardModel,
    #[serde(default)]
    pub rates: Rates,
    #[serde(default)]
    pub sweep: SweepSection,
    /// Optional usage-class fragility scaling applied after loading, for
    /// inventories whose curves are stored unscaled.
    #[serde(default)]
    pub fragility_scaling: Option<ScalingSpec>,
    /// Intensity grid used to validate curve ordering at load time.
    #[serde(default)]
    pub validation: ValidationGrid,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Evenly spaced budget levels from 0 to the full-inspection cost.
    pub budget_levels: usize,
    /// Monte Carlo samples per budget.
    pub samples: usize,
    pub seed: u64,
    /// Reuse the same event draws at every budget level.
    pub common_random_numbers: bool,
    /// Knapsack weight quantization, dollars.
    pub granularity: f64,
    /// Spending cap for the risk-averse community, dollars.
    pub budget_cap: Option<f64>,
    /// Ceiling on knapsack table cells.
    pub cell_limit: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            budget_levels: DEFAULT_BUDGET_LEVELS,
            samples: 1000,
            seed: 42,
            common_random_numbers: true,
            granularity: default_granularity().as_dollars(),
            budget_cap: None,
            cell_limit: DEFAULT_CELL_LIMIT,
        }
    }
}

impl SweepSection {
    pub fn granularity_money(&self) -> Result<Money> {
        Money::from_dollars(self.granularity)
    }

    pub fn budget_cap_money(&self) -> Result<Option<Money>> {
        self.budget_cap.map(Money::from_dollars).transpose()
    }
}

/// A run config resolved against the file system: inventory loaded and
/// validated (scaled if requested), cost tables in hand, output directory
/// created.
pub struct LoadedRun {
    pub config: RunConfig,
    pub buildings: Vec<Building>,
    pub costs: CostConfig,
    pub out_dir: PathBuf,
}

pub fn load_run(config_path: &Path, out_dir_override: Option<&Path>) -> Result<LoadedRun> {
    let text = std::fs::read_to_string(config_path).map_err(|source| Error::Io {
        path: config_path.to_path_buf(),
        source,
    })?;
    let config: RunConfig = toml::from_str(&text)
        .map_err(|e| Error::config(format!("{}: {e}", config_path.display())))?;
    config.validation.validate()?;

    let base = config_path.parent().unwrap_or_else(|| Path::new("."));
    let mut buildings = load_inventory(resolve(base, &config.inventory), &config.validation)?;
    if let Some(scaling) = &config.fragility_scaling {
        if scaling.enabled {
            apply_usage_scaling(&mut buildings, &scaling.coefficients, &config.validation)?;
        }
    }
    let costs = match &config.cost_config {
        Some(path) => CostConfig::load(resolve(base, path))?,
        None => CostConfig::default(),
    };
    let out_dir = match out_dir_override {
        Some(dir) => dir.to_path_buf(),
        None => resolve(base, &config.output_dir),
    };
    std::fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
        path: out_dir.clone(),
        source,
    })?;
    Ok(LoadedRun {
        config,
        buildings,
        costs,
        out_dir,
    })
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
