//! Misprediction cost tables and the field-inspection fee model.
//!
//! A building pre-classified at safety level `d` that an event actually
//! leaves in state `s` incurs the matrix entry `(s, d)` for its usage class,
//! optionally scaled by its floor-area category. Inspecting instead of
//! pre-classifying costs a per-building fee driven by area category, story
//! count, and a post-event demand surcharge.

use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fragility::SafetyLevel;
use crate::inventory::{Building, UsageClass};
use crate::money::Money;

/// A 3x3 misprediction cost table: rows are the actual state `s`, columns
/// the predetermined decision `d`. The diagonal is exactly zero (correct
/// predictions cost nothing) and off-diagonal entries are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct CostMatrix {
    entries: [[Money; 3]; 3],
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: [[f64; 3]; 3],
}

impl TryFrom<RawMatrix> for CostMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<CostMatrix> {
        let mut entries = [[Money::ZERO; 3]; 3];
        for (s, row) in raw.rows.iter().enumerate() {
            for (d, dollars) in row.iter().enumerate() {
                entries[s][d] = Money::from_dollars(*dollars)?;
            }
        }
        CostMatrix::new(entries)
    }
}

impl Serialize for CostMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<f64>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|m| m.as_dollars()).collect())
            .collect();
        let mut st = serializer.serialize_struct("CostMatrix", 1)?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

impl CostMatrix {
    /// Validates and wraps entries indexed `[actual state][decision]`.
    pub fn new(entries: [[Money; 3]; 3]) -> Result<CostMatrix> {
        for (s, row) in entries.iter().enumerate() {
            for (d, cost) in row.iter().enumerate() {
                if s == d && !cost.is_zero() {
                    return Err(Error::validation(format!(
                        "cost matrix diagonal must be zero; entry ({}, {}) is {cost}",
                        s + 1,
                        d + 1
                    )));
                }
                if cost.cents() < 0 {
                    return Err(Error::validation(format!(
                        "cost matrix entries must be nonnegative; entry ({}, {}) is {cost}",
                        s + 1,
                        d + 1
                    )));
                }
            }
        }
        Ok(CostMatrix { entries })
    }

    pub fn from_dollar_rows(rows: [[f64; 3]; 3]) -> Result<CostMatrix> {
        CostMatrix::try_from(RawMatrix { rows })
    }

    /// Cost of having predetermined `d` when the event leaves the building
    /// in state `s`.
    pub fn cost(&self, d: SafetyLevel, s: SafetyLevel) -> Money {
        self.entries[s.index()][d.index()]
    }

    /// The table with every entry multiplied by an integer factor (used for
    /// floor-area scaling). Zero diagonal and nonnegativity are preserved.
    pub fn scaled(&self, factor: i64) -> CostMatrix {
        let mut entries = self.entries;
        for row in entries.iter_mut() {
            for cost in row.iter_mut() {
                *cost = *cost * factor;
            }
        }
        CostMatrix { entries }
    }
}

/// Per-building field-inspection fee:
///
/// ```text
/// w = (base_rate + increment * (area_category - 1))
///       * demand_multiplier
///       * stories            (when per_story is set)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InspectionCostModel {
    pub base_rate: Money,
    pub increment: Money,
    pub demand_multiplier: f64,
    pub per_story: bool,
}

impl Default for InspectionCostModel {
    fn default() -> Self {
        InspectionCostModel {
            base_rate: Money::from_cents(500_00),
            increment: Money::from_cents(500_00),
            demand_multiplier: 10.0,
            per_story: true,
        }
    }
}

impl InspectionCostModel {
    pub fn validate(&self) -> Result<()> {
        if self.base_rate.cents() <= 0 {
            return Err(Error::validation(format!(
                "inspection base rate must be positive, got {}",
                self.base_rate
            )));
        }
        if self.increment.cents() < 0 {
            return Err(Error::validation(format!(
                "inspection increment must be nonnegative, got {}",
                self.increment
            )));
        }
        if !(self.demand_multiplier >= 1.0 && self.demand_multiplier.is_finite()) {
            return Err(Error::validation(format!(
                "demand multiplier must be at least 1, got {}",
                self.demand_multiplier
            )));
        }
        Ok(())
    }

    /// Inspection fee for one building, rounded to the nearest cent.
    pub fn cost(&self, building: &Building) -> Money {
        let per_unit =
            self.base_rate + self.increment * (building.area_category.index() as i64 - 1);
        let units = if self.per_story {
            building.stories as i64
        } else {
            1
        };
        let cents = (per_unit.cents() * units) as f64 * self.demand_multiplier;
        Money::from_cents(cents.round() as i64)
    }
}

fn default_multiply_by_category() -> bool {
    true
}

/// The complete cost model: one misprediction table per usage class, the
/// inspection fee model, and the switch that scales misprediction costs by
/// floor-area category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    #[serde(default = "default_multiply_by_category")]
    pub multiply_by_category: bool,
    #[serde(default)]
    pub inspection: InspectionCostModel,
    pub matrices: UsageMatrices,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsageMatrices {
    pub residential: CostMatrix,
    pub commercial: CostMatrix,
    pub critical: CostMatrix,
}

impl Default for CostConfig {
    /// Built-in tables for ordinary residential, commercial, and critical
    /// buildings (importance weighting already folded in).
    fn default() -> Self {
        let residential = CostMatrix::from_dollar_rows([
            [0.0, 350_000.0, 750_000.0],
            [3_750_000.0, 0.0, 500_000.0],
            [7_250_000.0, 3_600_000.0, 0.0],
        ])
        .expect("built-in residential table is valid");
        let commercial = CostMatrix::from_dollar_rows([
            [0.0, 3_000_000.0, 5_500_000.0],
            [89_000_000.0, 0.0, 4_000_000.0],
            [14_500_000.0, 7_200_000.0, 0.0],
        ])
        .expect("built-in commercial table is valid");
        let critical = CostMatrix::from_dollar_rows([
            [0.0, 7_750_000.0, 15_000_000.0],
            [25_750_000.0, 0.0, 10_000_000.0],
            [36_250_000.0, 18_000_000.0, 0.0],
        ])
        .expect("built-in critical table is valid");
        CostConfig {
            multiply_by_category: true,
            inspection: InspectionCostModel::default(),
            matrices: UsageMatrices {
                residential,
                commercial,
                critical,
            },
        }
    }
}

impl CostConfig {
    pub fn matrix_for(&self, usage: UsageClass) -> &CostMatrix {
        match usage {
            UsageClass::Residential => &self.matrices.residential,
            UsageClass::Commercial => &self.matrices.commercial,
            UsageClass::Critical => &self.matrices.critical,
        }
    }

    /// Raw table lookup (no floor-area scaling).
    pub fn misprediction_cost(&self, usage: UsageClass, d: SafetyLevel, s: SafetyLevel) -> Money {
        self.matrix_for(usage).cost(d, s)
    }

    /// The misprediction table a specific building faces: its usage-class
    /// table, scaled by floor-area category when the switch is on.
    pub fn effective_matrix(&self, building: &Building) -> CostMatrix {
        let base = self.matrix_for(building.usage);
        if self.multiply_by_category {
            base.scaled(building.area_category.index() as i64)
        } else {
            *base
        }
    }

    /// Inspection fee for one building.
    pub fn inspection_cost(&self, building: &Building) -> Money {
        self.inspection.cost(building)
    }

    /// Cost of inspecting the entire portfolio: the largest budget worth
    /// considering.
    pub fn total_inspection_cost(&self, buildings: &[Building]) -> Money {
        buildings.iter().map(|b| self.inspection.cost(b)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.inspection.validate()
    }

    pub fn from_toml_str(text: &str) -> Result<CostConfig> {
        let config: CostConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("cost config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CostConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        CostConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("cost config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragility::FragilityCurve;
    use crate::inventory::{ConstructionClass, FloorAreaCategory};

    fn building(usage: UsageClass, category: u8, stories: u32) -> Building {
        Building {
            id: "t1".into(),
            construction: ConstructionClass::RC,
            stories,
            area_category: FloorAreaCategory::from_index(category).unwrap(),
            usage,
            curve0: FragilityCurve::new(0.5, 0.6).unwrap(),
            curve1: FragilityCurve::new(1.0, 0.6).unwrap(),
        }
    }

    #[test]
    fn default_tables_match_reference_values() {
        let cfg = CostConfig::default();
        let expected: [(UsageClass, [[f64; 3]; 3]); 3] = [
            (
                UsageClass::Residential,
                [
                    [0.0, 350_000.0, 750_000.0],
                    [3_750_000.0, 0.0, 500_000.0],
                    [7_250_000.0, 3_600_000.0, 0.0],
                ],
            ),
            (
                UsageClass::Commercial,
                [
                    [0.0, 3_000_000.0, 5_500_000.0],
                    [89_000_000.0, 0.0, 4_000_000.0],
                    [14_500_000.0, 7_200_000.0, 0.0],
                ],
            ),
            (
                UsageClass::Critical,
                [
                    [0.0, 7_750_000.0, 15_000_000.0],
                    [25_750_000.0, 0.0, 10_000_000.0],
                    [36_250_000.0, 18_000_000.0, 0.0],
                ],
            ),
        ];
        for (usage, rows) in expected {
            for s in SafetyLevel::ALL {
                for d in SafetyLevel::ALL {
                    assert_eq!(
                        cfg.misprediction_cost(usage, d, s),
                        Money::from_dollars(rows[s.index()][d.index()]).unwrap(),
                        "{usage} (s={s}, d={d})"
                    );
                }
            }
        }
    }

    #[test]
    fn spot_lookups_match_documented_cases() {
        let cfg = CostConfig::default();
        assert_eq!(
            cfg.misprediction_cost(UsageClass::Residential, SafetyLevel::Usable, SafetyLevel::Unsafe),
            Money::from_dollars(7_250_000.0).unwrap()
        );
        assert_eq!(
            cfg.misprediction_cost(UsageClass::Commercial, SafetyLevel::Unsafe, SafetyLevel::Usable),
            Money::from_dollars(5_500_000.0).unwrap()
        );
        for usage in UsageClass::ALL {
            for level in SafetyLevel::ALL {
                assert!(cfg.misprediction_cost(usage, level, level).is_zero());
            }
        }
    }

    #[test]
    fn matrix_validation_rejects_bad_tables() {
        let nonzero_diagonal = CostMatrix::from_dollar_rows([
            [1.0, 350_000.0, 750_000.0],
            [3_750_000.0, 0.0, 500_000.0],
            [7_250_000.0, 3_600_000.0, 0.0],
        ]);
        assert!(nonzero_diagonal.is_err());
        let negative = CostMatrix::from_dollar_rows([
            [0.0, -350_000.0, 750_000.0],
            [3_750_000.0, 0.0, 500_000.0],
            [7_250_000.0, 3_600_000.0, 0.0],
        ]);
        assert!(negative.is_err());
    }

    #[test]
    fn inspection_fee_follows_the_documented_formula() {
        let model = InspectionCostModel::default();
        // Category 1, single story: 500 * 10.
        assert_eq!(
            model.cost(&building(UsageClass::Residential, 1, 1)),
            Money::from_dollars(5_000.0).unwrap()
        );
        // Category 3, two stories: (500 + 500*2) * 10 * 2.
        assert_eq!(
            model.cost(&building(UsageClass::Residential, 3, 2)),
            Money::from_dollars(30_000.0).unwrap()
        );
        // Story count ignored when per_story is off.
        let flat = InspectionCostModel {
            per_story: false,
            ..InspectionCostModel::default()
        };
        assert_eq!(
            flat.cost(&building(UsageClass::Residential, 3, 2)),
            Money::from_dollars(15_000.0).unwrap()
        );
        // Fractional demand multipliers round to the cent.
        let surge = InspectionCostModel {
            demand_multiplier: 1.5,
            ..InspectionCostModel::default()
        };
        assert_eq!(
            surge.cost(&building(UsageClass::Residential, 1, 1)),
            Money::from_dollars(750.0).unwrap()
        );
    }

    #[test]
    fn inspection_model_validation() {
        let mut model = InspectionCostModel::default();
        assert!(model.validate().is_ok());
        model.demand_multiplier = 0.5;
        assert!(model.validate().is_err());
        model.demand_multiplier = 10.0;
        model.base_rate = Money::ZERO;
        assert!(model.validate().is_err());
        model.base_rate = Money::from_cents(1);
        model.increment = Money::from_cents(-1);
        assert!(model.validate().is_err());
    }

    #[test]
    fn effective_matrix_scales_with_area_category() {
        let cfg = CostConfig::default();
        let b = building(UsageClass::Residential, 4, 1);
        let eff = cfg.effective_matrix(&b);
        assert_eq!(
            eff.cost(SafetyLevel::Usable, SafetyLevel::Unsafe),
            Money::from_dollars(4.0 * 7_250_000.0).unwrap()
        );
        for level in SafetyLevel::ALL {
            assert!(eff.cost(level, level).is_zero());
        }
        let unscaled = CostConfig {
            multiply_by_category: false,
            ..CostConfig::default()
        };
        assert_eq!(
            unscaled.effective_matrix(&b).cost(SafetyLevel::Usable, SafetyLevel::Unsafe),
            Money::from_dollars(7_250_000.0).unwrap()
        );
    }

    #[test]
    fn total_inspection_cost_sums_per_building_fees() {
        let cfg = CostConfig::default();
        let portfolio = vec![
            building(UsageClass::Residential, 1, 1), // 5,000
            building(UsageClass::Commercial, 3, 2),  // 30,000
            building(UsageClass::Critical, 2, 4),    // (500+500)*10*4 = 40,000
        ];
        assert_eq!(
            cfg.total_inspection_cost(&portfolio),
            Money::from_dollars(75_000.0).unwrap()
        );
        assert_eq!(cfg.total_inspection_cost(&[]), Money::ZERO);
    }

    #[test]
    fn toml_round_trip_preserves_the_config() {
        let cfg = CostConfig::default();
        let text = cfg.to_toml_string();
        let parsed = CostConfig::from_toml_str(&text).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn toml_rejects_invalid_tables() {
        let cfg = CostConfig::default();
        let mut text = cfg.to_toml_string();
        text = text.replace("demand_multiplier = 10.0", "demand_multiplier = 0.25");
        assert!(CostConfig::from_toml_str(&text).is_err());
    }
}
