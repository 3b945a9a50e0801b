//! Monte Carlo engine over earthquake events: samples (occurrence time,
//! intensity, building states), prices each realization under the
//! predetermined-safety-level policy with optimal inspection selection, and
//! sweeps inspection budgets to trace the mean–variance cost frontier.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costmodel::{CostConfig, CostMatrix};
use crate::decision::{optimal_decision, Decision};
use crate::error::{Error, Result};
use crate::fragility::SafetyLevel;
use crate::inventory::Building;
use crate::knapsack::{solve, DpTable, InspectionSelection, KnapsackInstance, DEFAULT_CELL_LIMIT};
use crate::money::Money;

/// Number of budget levels in the default sweep grid.
pub const DEFAULT_BUDGET_LEVELS: usize = 41;

/// Default weight-quantization unit for budget sweeps: $1,000 keeps the DP
/// table near 10^4–10^5 columns for city-scale inspection budgets.
pub fn default_granularity() -> Money {
    Money::from_cents(100_000)
}

/// Distribution of the next event: lognormal intensity and exponential
/// occurrence time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHazard", into = "RawHazard")]
pub struct HazardModel {
    ln_x_mean: f64,
    ln_x_std: f64,
    occurrence_mean: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawHazard {
    ln_x_mean: f64,
    ln_x_std: f64,
    occurrence_mean: f64,
}

impl Default for RawHazard {
    fn default() -> RawHazard {
        RawHazard {
            ln_x_mean: -0.8,
            ln_x_std: 0.3,
            occurrence_mean: 300.0,
        }
    }
}

impl TryFrom<RawHazard> for HazardModel {
    type Error = Error;

    fn try_from(raw: RawHazard) -> Result<HazardModel> {
        HazardModel::new(raw.ln_x_mean, raw.ln_x_std, raw.occurrence_mean)
    }
}

impl From<HazardModel> for RawHazard {
    fn from(h: HazardModel) -> RawHazard {
        RawHazard {
            ln_x_mean: h.ln_x_mean,
            ln_x_std: h.ln_x_std,
            occurrence_mean: h.occurrence_mean,
        }
    }
}

impl HazardModel {
    /// `ln X ~ Normal(ln_x_mean, ln_x_std²)`, `T ~ Exponential` with mean
    /// `occurrence_mean` years. A zero `ln_x_std` pins the intensity at
    /// `exp(ln_x_mean)`, which is handy for controlled experiments.
    pub fn new(ln_x_mean: f64, ln_x_std: f64, occurrence_mean: f64) -> Result<HazardModel> {
        if !ln_x_mean.is_finite() {
            return Err(Error::validation(format!(
                "ln_x_mean must be finite, got {ln_x_mean}"
            )));
        }
        if !ln_x_std.is_finite() || ln_x_std < 0.0 {
            return Err(Error::validation(format!(
                "ln_x_std must be finite and nonnegative, got {ln_x_std}"
            )));
        }
        if !occurrence_mean.is_finite() || occurrence_mean <= 0.0 {
            return Err(Error::validation(format!(
                "occurrence_mean must be positive, got {occurrence_mean}"
            )));
        }
        Ok(HazardModel {
            ln_x_mean,
            ln_x_std,
            occurrence_mean,
        })
    }

    pub fn ln_x_mean(&self) -> f64 {
        self.ln_x_mean
    }

    pub fn ln_x_std(&self) -> f64 {
        self.ln_x_std
    }

    pub fn occurrence_mean(&self) -> f64 {
        self.occurrence_mean
    }
}

impl Default for HazardModel {
    fn default() -> HazardModel {
        HazardModel {
            ln_x_mean: -0.8,
            ln_x_std: 0.3,
            occurrence_mean: 300.0,
        }
    }
}

/// Continuous-compounding rates per year: `alpha` is the return earned on
/// the reserved budget, `gamma` the inflation of costs, `beta` the discount
/// rate for present values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRates", into = "RawRates")]
pub struct Rates {
    alpha: f64,
    gamma: f64,
    beta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawRates {
    alpha: f64,
    gamma: f64,
    beta: f64,
}

impl Default for RawRates {
    fn default() -> RawRates {
        RawRates {
            alpha: 0.03,
            gamma: 0.03,
            beta: 0.03,
        }
    }
}

impl TryFrom<RawRates> for Rates {
    type Error = Error;

    fn try_from(raw: RawRates) -> Result<Rates> {
        Rates::new(raw.alpha, raw.gamma, raw.beta)
    }
}

impl From<Rates> for RawRates {
    fn from(r: Rates) -> RawRates {
        RawRates {
            alpha: r.alpha,
            gamma: r.gamma,
            beta: r.beta,
        }
    }
}

impl Rates {
    pub fn new(alpha: f64, gamma: f64, beta: f64) -> Result<Rates> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::validation(format!(
                "return rate alpha must be finite and >= 0, got {alpha}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::validation(format!(
                "inflation rate gamma must be finite and > 0, got {gamma}"
            )));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::validation(format!(
                "discount rate beta must be finite and > 0, got {beta}"
            )));
        }
        Ok(Rates { alpha, gamma, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for Rates {
    fn default() -> Rates {
        Rates {
            alpha: 0.03,
            gamma: 0.03,
            beta: 0.03,
        }
    }
}

/// One sampled event: occurrence time in years, ground-motion intensity,
/// and the realized safety state of every building.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSample {
    pub t: f64,
    pub x: f64,
    pub states: Vec<SafetyLevel>,
}

/// Draws one event. The draw order is fixed (time, intensity, then one
/// state per building in inventory order) so a given stream always yields
/// the same sample.
pub fn sample_event(
    hazard: &HazardModel,
    buildings: &[Building],
    rng: &mut impl Rng,
) -> Result<EventSample> {
    // Inverse-CDF exponential: u in [0, 1) keeps the argument of ln positive.
    let u: f64 = rng.random();
    let t = -hazard.occurrence_mean * (1.0 - u).ln();

    let x = if hazard.ln_x_std == 0.0 {
        hazard.ln_x_mean.exp()
    } else {
        let z: f64 = rng.sample(StandardNormal);
        (hazard.ln_x_mean + hazard.ln_x_std * z).exp()
    };

    let mut states = Vec::with_capacity(buildings.len());
    for building in buildings {
        let probs = building.state_probabilities(x)?;
        states.push(probs.sample(rng.random()));
    }
    Ok(EventSample { t, x, states })
}

/// Per-building cost data precomputed once per run: inspection fees and
/// effective misprediction tables, index-aligned with the inventory slice
/// they were built from.
#[derive(Debug, Clone)]
pub struct BuildingCosts {
    weights: Vec<Money>,
    matrices: Vec<CostMatrix>,
    total_weight: Money,
}

impl BuildingCosts {
    pub fn new(buildings: &[Building], config: &CostConfig) -> Result<BuildingCosts> {
        config.validate()?;
        let weights: Vec<Money> = buildings.iter().map(|b| config.inspection_cost(b)).collect();
        if let Some(i) = weights.iter().position(|w| w.cents() <= 0) {
            return Err(Error::validation(format!(
                "inspection cost for building {} is not positive",
                buildings[i].id
            )));
        }
        let matrices = buildings.iter().map(|b| config.effective_matrix(b)).collect();
        let total_weight = weights.iter().copied().sum();
        Ok(BuildingCosts {
            weights,
            matrices,
            total_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Money] {
        &self.weights
    }

    pub fn matrix(&self, i: usize) -> &CostMatrix {
        &self.matrices[i]
    }

    /// Cost of inspecting every building; the top of the budget range.
    pub fn total_weight(&self) -> Money {
        self.total_weight
    }

    /// Optimal predetermined decisions for every building at intensity `x`.
    /// `buildings` must be the slice this table was built from.
    pub fn decisions_at(&self, buildings: &[Building], x: f64) -> Result<Vec<Decision>> {
        assert_eq!(
            buildings.len(),
            self.weights.len(),
            "building slice does not match the cost table"
        );
        buildings
            .iter()
            .zip(&self.matrices)
            .map(|(b, m)| Ok(optimal_decision(&b.state_probabilities(x)?, m)))
            .collect()
    }
}

/// Cost of one realization, as of event time (`nominal`) and discounted to
/// present value (`discounted`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizedCost {
    /// Inspection spend at time-0 prices: sum of fees over inspected
    /// buildings.
    pub inspection: Money,
    /// Realized misprediction cost at time-0 prices: sum over uninspected
    /// buildings of the cost of decision d* against the sampled state.
    pub misprediction: Money,
    /// `(inspection + misprediction) * e^(gamma t)`.
    pub nominal: Money,
    /// `(inspection + misprediction) * e^((gamma - beta) t)`.
    pub discounted: Money,
}

/// Prices one event realization under a fixed inspection selection and
/// predetermined decisions. The inner sum is exact in cents; inflation and
/// discounting each round once at the end.
pub fn realized_cost(
    sample: &EventSample,
    selection: &InspectionSelection,
    decisions: &[Decision],
    costs: &BuildingCosts,
    rates: &Rates,
) -> RealizedCost {
    let n = costs.len();
    assert_eq!(sample.states.len(), n, "event sample does not match the cost table");
    assert_eq!(selection.z.len(), n, "selection does not match the cost table");
    assert_eq!(decisions.len(), n, "decisions do not match the cost table");

    let mut inspection = Money::ZERO;
    let mut misprediction = Money::ZERO;
    for i in 0..n {
        if selection.z[i] {
            inspection += costs.weights[i];
        } else {
            misprediction += costs.matrices[i].cost(decisions[i].d_star, sample.states[i]);
        }
    }
    let inner = (inspection + misprediction).cents() as f64;
    let nominal = Money::from_cents((inner * (rates.gamma * sample.t).exp()).round() as i64);
    let discounted =
        Money::from_cents((inner * ((rates.gamma - rates.beta) * sample.t).exp()).round() as i64);
    RealizedCost {
        inspection,
        misprediction,
        nominal,
        discounted,
    }
}

/// Budget sweep parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Strictly increasing budgets from 0 to the full-inspection cost.
    pub budgets: Vec<Money>,
    /// Monte Carlo samples per budget (at least 2).
    pub samples: usize,
    pub seed: u64,
    /// Reuse the same event samples across budgets (default). This removes
    /// sampling noise from budget-to-budget comparisons, so the frontier
    /// shape reflects the policy, not the draws.
    pub common_random_numbers: bool,
    pub granularity: Money,
    pub cell_limit: usize,
}

impl SweepConfig {
    pub fn new(budgets: Vec<Money>, samples: usize, seed: u64) -> SweepConfig {
        SweepConfig {
            budgets,
            samples,
            seed,
            common_random_numbers: true,
            granularity: default_granularity(),
            cell_limit: DEFAULT_CELL_LIMIT,
        }
    }
}

/// `levels` budgets evenly spaced from 0 to `total` inclusive.
pub fn default_budget_grid(total: Money, levels: usize) -> Vec<Money> {
    assert!(levels >= 2, "a budget grid needs at least two levels");
    let span = total.cents() as i128;
    let last = (levels - 1) as i128;
    (0..levels as i128)
        .map(|k| Money::from_cents(((span * k + last / 2) / last) as i64))
        .collect()
}

/// One Monte Carlo outcome at one budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOutcome {
    pub t: f64,
    pub x: f64,
    pub discounted: Money,
}

/// Results of a budget sweep: per-budget sample outcomes, their mean and
/// (unbiased) standard deviation in dollars, and Pareto-efficiency flags
/// over the (mean, std) points.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSweep {
    pub budgets: Vec<Money>,
    /// `outcomes[k][m]` is sample `m` at budget `k`.
    pub outcomes: Vec<Vec<SampleOutcome>>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub pareto: Vec<bool>,
}

impl BudgetSweep {
    /// Mean-to-std ratio per budget (the risk-adjusted cost statistic);
    /// `None` where the cost is deterministic.
    pub fn ratios(&self) -> Vec<Option<f64>> {
        self.means
            .iter()
            .zip(&self.stds)
            .map(|(m, s)| if *s > 0.0 { Some(m / s) } else { None })
            .collect()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Budget available at event time, expressed at time-0 prices: the reserve
/// grows at `alpha` while inspection fees inflate at `gamma`, so a budget
/// `r` buys `e^((alpha - gamma) t) * r` worth of time-0 fees. Rounded down
/// (never overspends) and clamped at the full-inspection cost.
fn effective_capacity(budget: Money, growth: f64, total_weight: Money) -> Money {
    let scaled = budget.cents() as f64 * growth;
    if scaled >= total_weight.cents() as f64 {
        total_weight
    } else {
        Money::from_cents(scaled.floor() as i64)
    }
}

/// Mean and standard deviation, in dollars, of a cent-valued sample set.
/// Sums are exact in 128-bit integers (order-independent by construction);
/// on the astronomically unlikely overflow the estimate falls back to a
/// sequential two-pass float computation.
fn mean_std_dollars(samples: &[Money]) -> (f64, f64) {
    let m = samples.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let mut sum: i128 = 0;
    for s in samples {
        sum += s.cents() as i128;
    }
    let mean_dollars = sum as f64 / m as f64 / 100.0;
    if m == 1 {
        return (mean_dollars, 0.0);
    }

    let mut sum_sq: Option<i128> = Some(0);
    for s in samples {
        let c = s.cents() as i128;
        sum_sq = sum_sq.and_then(|acc| c.checked_mul(c).and_then(|sq| acc.checked_add(sq)));
    }
    let numerator = sum_sq.and_then(|sq| {
        sq.checked_mul(m as i128)
            .and_then(|ms| sum.checked_mul(sum).and_then(|s2| ms.checked_sub(s2)))
    });
    let var_cents2 = match numerator {
        Some(num) => num as f64 / (m as f64 * (m - 1) as f64),
        None => {
            let mean_cents = sum as f64 / m as f64;
            samples
                .iter()
                .map(|s| {
                    let d = s.cents() as f64 - mean_cents;
                    d * d
                })
                .sum::<f64>()
                / (m - 1) as f64
        }
    };
    (mean_dollars, var_cents2.max(0.0).sqrt() / 100.0)
}

fn validate_sweep_config(config: &SweepConfig, total_weight: Money) -> Result<()> {
    if config.samples < 2 {
        return Err(Error::config(format!(
            "need at least 2 samples per budget, got {}",
            config.samples
        )));
    }
    if config.samples as u64 > u32::MAX as u64 {
        return Err(Error::config(format!(
            "sample count {} exceeds the supported maximum",
            config.samples
        )));
    }
    let budgets = &config.budgets;
    if budgets.is_empty() {
        return Err(Error::config("budget grid is empty".to_string()));
    }
    if budgets[0] != Money::ZERO {
        return Err(Error::config(format!(
            "budget grid must start at 0, got {}",
            budgets[0]
        )));
    }
    if *budgets.last().unwrap() != total_weight {
        return Err(Error::config(format!(
            "budget grid must end at the full-inspection cost {total_weight}, got {}",
            budgets.last().unwrap()
        )));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) && budgets.len() > 1 {
        return Err(Error::config("budgets must be strictly increasing".to_string()));
    }
    if config.granularity.cents() <= 0 {
        return Err(Error::config(format!(
            "granularity must be positive, got {}",
            config.granularity
        )));
    }
    Ok(())
}

/// Runs the Monte Carlo budget sweep.
///
/// With common random numbers the work is parallel over samples: each
/// sample draws its event from stream `m`, computes decisions once for its
/// intensity, builds one DP table, and reuses it for every budget (the
/// table is capacity-independent up to its maximum). Without common random
/// numbers the work is parallel over (budget, sample) pairs on stream
/// `k << 32 | m`. Either way outcomes are collected in index order, so the
/// result is a pure function of the inputs, independent of thread count.
pub fn budget_sweep(
    buildings: &[Building],
    hazard: &HazardModel,
    rates: &Rates,
    cost_config: &CostConfig,
    config: &SweepConfig,
) -> Result<BudgetSweep> {
    let costs = BuildingCosts::new(buildings, cost_config)?;
    validate_sweep_config(config, costs.total_weight())?;
    let n_budgets = config.budgets.len();
    let n_samples = config.samples;

    let mut outcomes: Vec<Vec<SampleOutcome>> =
        vec![Vec::with_capacity(n_samples); n_budgets];
    if config.common_random_numbers {
        let per_sample: Vec<Result<Vec<SampleOutcome>>> = (0..n_samples)
            .into_par_iter()
            .map(|m| {
                let mut rng = stream_rng(config.seed, m as u64);
                let sample = sample_event(hazard, buildings, &mut rng)?;
                let decisions = costs.decisions_at(buildings, sample.x)?;
                let values: Vec<Money> = decisions.iter().map(|d| d.c_star).collect();
                let growth = ((rates.alpha - rates.gamma) * sample.t).exp();
                let capacities: Vec<Money> = config
                    .budgets
                    .iter()
                    .map(|b| effective_capacity(*b, growth, costs.total_weight()))
                    .collect();
                let table = DpTable::build(
                    &values,
                    costs.weights(),
                    *capacities.last().unwrap(),
                    config.granularity,
                    config.cell_limit,
                )?;
                capacities
                    .iter()
                    .map(|cap| {
                        let selection = table.extract(*cap)?;
                        let cost = realized_cost(&sample, &selection, &decisions, &costs, rates);
                        Ok(SampleOutcome {
                            t: sample.t,
                            x: sample.x,
                            discounted: cost.discounted,
                        })
                    })
                    .collect()
            })
            .collect();
        for row in per_sample {
            for (k, outcome) in row?.into_iter().enumerate() {
                outcomes[k].push(outcome);
            }
        }
    } else {
        let per_pair: Vec<Result<SampleOutcome>> = (0..n_budgets * n_samples)
            .into_par_iter()
            .map(|idx| {
                let (k, m) = (idx / n_samples, idx % n_samples);
                let mut rng = stream_rng(config.seed, (k as u64) << 32 | m as u64);
                let sample = sample_event(hazard, buildings, &mut rng)?;
                let decisions = costs.decisions_at(buildings, sample.x)?;
                let values: Vec<Money> = decisions.iter().map(|d| d.c_star).collect();
                let growth = ((rates.alpha - rates.gamma) * sample.t).exp();
                let capacity =
                    effective_capacity(config.budgets[k], growth, costs.total_weight());
                let instance =
                    KnapsackInstance::new(values, costs.weights().to_vec(), capacity, config.granularity)?
                        .with_cell_limit(config.cell_limit);
                let selection = solve(&instance)?;
                let cost = realized_cost(&sample, &selection, &decisions, &costs, rates);
                Ok(SampleOutcome {
                    t: sample.t,
                    x: sample.x,
                    discounted: cost.discounted,
                })
            })
            .collect();
        let mut it = per_pair.into_iter();
        for k in 0..n_budgets {
            for _ in 0..n_samples {
                outcomes[k].push(it.next().unwrap()?);
            }
        }
    }

    let mut means = Vec::with_capacity(n_budgets);
    let mut stds = Vec::with_capacity(n_budgets);
    for row in &outcomes {
        let costs_only: Vec<Money> = row.iter().map(|o| o.discounted).collect();
        let (mean, std) = mean_std_dollars(&costs_only);
        means.push(mean);
        stds.push(std);
    }
    let points: Vec<(f64, f64)> = means.iter().copied().zip(stds.iter().copied()).collect();
    let pareto = pareto_front(&points);

    Ok(BudgetSweep {
        budgets: config.budgets.clone(),
        outcomes,
        means,
        stds,
        pareto,
    })
}

/// Flags the non-dominated (mean, std) points: a point is kept unless some
/// other point is at most as large in both coordinates and strictly smaller
/// in one. Identical points are all kept.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<bool> {
    let n = points.len();
    // Normalize -0.0 to 0.0 so grouping by == matches the sort order.
    let norm: Vec<(f64, f64)> = points.iter().map(|(m, s)| (m + 0.0, s + 0.0)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| {
        norm[*a]
            .0
            .total_cmp(&norm[*b].0)
            .then(norm[*a].1.total_cmp(&norm[*b].1))
    });

    let mut flags = vec![false; n];
    // Sweep mean groups in ascending order; a point survives iff its std is
    // minimal within its mean group and strictly below every smaller-mean
    // group's minimum.
    let mut best_smaller_std = f64::INFINITY;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && norm[order[j]].0 == norm[order[i]].0 {
            j += 1;
        }
        let group_min = norm[order[i]].1; // sorted, so the first is minimal
        for &idx in &order[i..j] {
            flags[idx] = norm[idx].1 == group_min && norm[idx].1 < best_smaller_std;
        }
        best_smaller_std = best_smaller_std.min(group_min);
        i = j;
    }
    flags
}

/// Indices into a sweep's budget grid for the named example communities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedBudgets {
    /// No inspection budget at all: the first grid point (always 0).
    pub unprepared: usize,
    /// Minimum expected cost.
    pub risk_neutral: usize,
    /// Minimum cost standard deviation.
    pub min_variance: usize,
    /// Minimum expected cost among Pareto-efficient budgets within the cap.
    pub risk_averse: usize,
    /// Full-inspection budget: the last grid point.
    pub extremely_risk_averse: usize,
}

/// Picks the named budgets. Ties on the mean break toward the smaller
/// standard deviation and then the smaller budget, so the risk-neutral pick
/// is always Pareto-efficient; ties on the standard deviation break toward
/// the smaller budget.
pub fn select_budgets(sweep: &BudgetSweep, budget_cap: Option<Money>) -> Result<NamedBudgets> {
    let n = sweep.budgets.len();
    assert!(n > 0, "sweep has no budgets");

    let risk_neutral = (0..n)
        .min_by(|a, b| {
            sweep.means[*a]
                .total_cmp(&sweep.means[*b])
                .then(sweep.stds[*a].total_cmp(&sweep.stds[*b]))
        })
        .unwrap();
    let min_variance = (0..n)
        .min_by(|a, b| sweep.stds[*a].total_cmp(&sweep.stds[*b]))
        .unwrap();

    let cap = budget_cap.unwrap_or(*sweep.budgets.last().unwrap());
    if cap < sweep.budgets[0] {
        return Err(Error::config(format!(
            "budget cap {cap} is below the smallest budget {}",
            sweep.budgets[0]
        )));
    }
    let capped_min_mean = |require_pareto: bool| {
        (0..n)
            .filter(|i| sweep.budgets[*i] <= cap && (!require_pareto || sweep.pareto[*i]))
            .min_by(|a, b| {
                sweep.means[*a]
                    .total_cmp(&sweep.means[*b])
                    .then(sweep.stds[*a].total_cmp(&sweep.stds[*b]))
            })
    };
    // Every Pareto-efficient budget can sit above the cap; fall back to the
    // best affordable point (efficient within the affordable subset).
    let risk_averse = capped_min_mean(true)
        .or_else(|| capped_min_mean(false))
        .unwrap();

    Ok(NamedBudgets {
        unprepared: 0,
        risk_neutral,
        min_variance,
        risk_averse,
        extremely_risk_averse: n - 1,
    })
}

/// Empirical non-exceedance CDF: sorted `(cost, k/M)` pairs.
pub fn cost_cdf(samples: &[Money]) -> Vec<(Money, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort();
    let m = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, (i + 1) as f64 / m))
        .collect()
}

/// Decision and inspection breakdown for one fixed (time, intensity)
/// scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub t: f64,
    pub x: f64,
    pub budget: Money,
    pub decisions: Vec<Decision>,
    pub selection: InspectionSelection,
    /// `counts[level][0]` = inspected buildings whose predetermined level is
    /// `level + 1`; `counts[level][1]` = pre-classified ones.
    pub counts: [[usize; 2]; 3],
}

/// Evaluates the policy for a fixed event instead of sampling one: computes
/// every building's predetermined level at intensity `x`, solves the
/// inspection selection at the given budget, and tallies the
/// inspected/pre-classified split per level.
pub fn scenario(
    buildings: &[Building],
    costs: &BuildingCosts,
    rates: &Rates,
    t: f64,
    x: f64,
    budget: Money,
    granularity: Money,
    cell_limit: usize,
) -> Result<ScenarioReport> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!("time must be finite and >= 0, got {t}")));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!(
            "intensity must be finite and positive, got {x}"
        )));
    }
    let decisions = costs.decisions_at(buildings, x)?;
    let values: Vec<Money> = decisions.iter().map(|d| d.c_star).collect();
    let growth = ((rates.alpha - rates.gamma) * t).exp();
    let capacity = effective_capacity(budget, growth, costs.total_weight());
    let instance = KnapsackInstance::new(values, costs.weights().to_vec(), capacity, granularity)?
        .with_cell_limit(cell_limit);
    let selection = solve(&instance)?;

    let mut counts = [[0usize; 2]; 3];
    for (d, z) in decisions.iter().zip(&selection.z) {
        counts[d.d_star.index()][if *z { 0 } else { 1 }] += 1;
    }
    Ok(ScenarioReport {
        t,
        x,
        budget,
        decisions,
        selection,
        counts,
    })
}
