//! Building inventory: record types, CSV load/store, validation, and a
//! deterministic synthetic-inventory generator.
//!
//! The on-disk format is a UTF-8 CSV with header
//! `id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1`.
//! Lines starting with `#` are comments. The floor-area category accepts
//! either the numeric index 1–12 or the legacy cadastral letter A–R.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fragility::{state_probabilities, FragilityCurve, StateProbabilities};

pub const INVENTORY_HEADER: [&str; 9] = [
    "id",
    "construction",
    "stories",
    "area_category",
    "usage",
    "mu0",
    "sigma0",
    "mu1",
    "sigma1",
];

/// Structural system of a building.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructionClass {
    /// Unreinforced masonry.
    M,
    /// Reinforced-concrete frame.
    RC,
    /// Reinforced-concrete frame with significant torsional irregularity.
    RCT,
    /// Reinforced concrete with shear walls.
    RCS,
    /// Reinforced concrete with shear walls and torsional irregularity.
    RCST,
}

impl ConstructionClass {
    pub const ALL: [ConstructionClass; 5] = [
        ConstructionClass::M,
        ConstructionClass::RC,
        ConstructionClass::RCT,
        ConstructionClass::RCS,
        ConstructionClass::RCST,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ConstructionClass::M => "M",
            ConstructionClass::RC => "RC",
            ConstructionClass::RCT => "RCT",
            ConstructionClass::RCS => "RCS",
            ConstructionClass::RCST => "RCST",
        }
    }
}

impl fmt::Display for ConstructionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ConstructionClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<ConstructionClass> {
        ConstructionClass::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown construction class {s:?} (expected M, RC, RCT, RCS, or RCST)"
                ))
            })
    }
}

/// Occupancy class; drives both the cost tables and curve scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UsageClass {
    Residential,
    Commercial,
    /// Hospitals, schools, civil-protection facilities and the like.
    Critical,
}

impl UsageClass {
    pub const ALL: [UsageClass; 3] = [
        UsageClass::Residential,
        UsageClass::Commercial,
        UsageClass::Critical,
    ];

    pub fn token(self) -> &'static str {
        match self {
            UsageClass::Residential => "Residential",
            UsageClass::Commercial => "Commercial",
            UsageClass::Critical => "Critical",
        }
    }
}

impl fmt::Display for UsageClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for UsageClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<UsageClass> {
        UsageClass::ALL
            .into_iter()
            .find(|u| u.token() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown usage class {s:?} (expected Residential, Commercial, or Critical)"
                ))
            })
    }
}

/// Floor-area category, an ordinal index 1–12 that scales misprediction
/// costs. Letter codes map as A–C -> 1, D–E -> 2, F–G -> 3, then H through R
/// (J and K unused) -> 4 through 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FloorAreaCategory(u8);

impl FloorAreaCategory {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 12;

    pub fn from_index(index: u8) -> Result<FloorAreaCategory> {
        if (Self::MIN..=Self::MAX).contains(&index) {
            Ok(FloorAreaCategory(index))
        } else {
            Err(Error::domain(format!(
                "floor-area category index must be 1..=12, got {index}"
            )))
        }
    }

    pub fn from_letter(letter: char) -> Result<FloorAreaCategory> {
        let index = match letter.to_ascii_uppercase() {
            'A' | 'B' | 'C' => 1,
            'D' | 'E' => 2,
            'F' | 'G' => 3,
            'H' => 4,
            'I' => 5,
            'L' => 6,
            'M' => 7,
            'N' => 8,
            'O' => 9,
            'P' => 10,
            'Q' => 11,
            'R' => 12,
            other => {
                return Err(Error::domain(format!(
                    "unknown floor-area letter {other:?}"
                )))
            }
        };
        Ok(FloorAreaCategory(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

impl FromStr for FloorAreaCategory {
    type Err = Error;
    fn from_str(s: &str) -> Result<FloorAreaCategory> {
        if let Ok(index) = s.parse::<u8>() {
            return FloorAreaCategory::from_index(index);
        }
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => FloorAreaCategory::from_letter(c),
            _ => Err(Error::domain(format!(
                "floor-area category must be an index 1..=12 or a letter, got {s:?}"
            ))),
        }
    }
}

impl Serialize for FloorAreaCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for FloorAreaCategory {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<FloorAreaCategory, D::Error> {
        let index = u8::deserialize(deserializer)?;
        FloorAreaCategory::from_index(index).map_err(serde::de::Error::custom)
    }
}

/// One building of the portfolio.
#[derive(Debug, Clone, PartialEq)]
pub struct Building {
    pub id: String,
    pub construction: ConstructionClass,
    pub stories: u32,
    pub area_category: FloorAreaCategory,
    pub usage: UsageClass,
    /// Exceedance curve for leaving level 1 (usable -> restricted).
    pub curve0: FragilityCurve,
    /// Exceedance curve for reaching level 3 (restricted -> unsafe).
    pub curve1: FragilityCurve,
}

impl Building {
    /// Safety-state probabilities for this building at intensity `x`.
    pub fn state_probabilities(&self, x: f64) -> Result<StateProbabilities> {
        state_probabilities(&self.curve0, &self.curve1, x)
    }

    /// Checks the curve-ordering invariant `curve1(x) <= curve0(x)` at every
    /// grid intensity.
    pub fn validate(&self, grid: &ValidationGrid) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::validation("building id must be nonempty"));
        }
        if self.stories == 0 {
            return Err(Error::validation(format!(
                "building {}: stories must be at least 1",
                self.id
            )));
        }
        for x in grid.points() {
            let f0 = self.curve0.evaluate(x)?;
            let f1 = self.curve1.evaluate(x)?;
            if f1 > f0 {
                return Err(Error::validation(format!(
                    "building {}: level-2 exceedance curve lies above the level-1 curve \
                     at intensity {x} ({f1} > {f0})",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// Intensity grid on which curve ordering is checked: log-spaced points
/// covering the plausible shaking range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        ValidationGrid {
            min: 1e-3,
            max: 10.0,
            points: 200,
        }
    }
}

impl ValidationGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.min.is_finite()) || !(self.max > self.min) || !self.max.is_finite() {
            return Err(Error::config(format!(
                "validation grid needs 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::config("validation grid needs at least 2 points"));
        }
        Ok(())
    }

    /// The grid intensities, log-spaced from `min` to `max` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let n = self.points;
        (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

// ── CSV load and store ──────────────────────────────────────────────────

/// Parses and validates an inventory file.
pub fn load_inventory(path: impl AsRef<Path>, grid: &ValidationGrid) -> Result<Vec<Building>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_inventory(file, grid)
}

/// Like [`load_inventory`] but from any reader; handy for tests and pipes.
pub fn read_inventory(reader: impl Read, grid: &ValidationGrid) -> Result<Vec<Building>> {
    grid.validate()?;
    let mut csv_reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| Error::parse(0, format!("cannot read header: {e}")))?;
    let expected: Vec<&str> = INVENTORY_HEADER.to_vec();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(
            0,
            format!(
                "header must be {:?}, got {:?}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut buildings = Vec::new();
    let mut seen_ids = HashSet::new();
    for (i, record) in csv_reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::parse(row, e.to_string()))?;
        let building = parse_row(&record, row)?;
        if !seen_ids.insert(building.id.clone()) {
            return Err(Error::validation(format!(
                "duplicate building id {:?} at row {row}",
                building.id
            )));
        }
        building.validate(grid)?;
        buildings.push(building);
    }
    Ok(buildings)
}

fn parse_row(record: &csv::StringRecord, row: usize) -> Result<Building> {
    let field = |idx: usize, name: &str| -> Result<&str> {
        record
            .get(idx)
            .ok_or_else(|| Error::parse(row, format!("missing field {name}")))
    };
    let ctx = |name: &str, e: Error| Error::parse(row, format!("{name}: {e}"));

    let id = field(0, "id")?.to_string();
    if id.is_empty() {
        return Err(Error::parse(row, "id must be nonempty"));
    }
    let construction = field(1, "construction")?
        .parse::<ConstructionClass>()
        .map_err(|e| ctx("construction", e))?;
    let stories: u32 = field(2, "stories")?
        .parse()
        .map_err(|e| Error::parse(row, format!("stories: {e}")))?;
    if stories == 0 {
        return Err(Error::parse(row, "stories must be at least 1"));
    }
    let area_category = field(3, "area_category")?
        .parse::<FloorAreaCategory>()
        .map_err(|e| ctx("area_category", e))?;
    let usage = field(4, "usage")?
        .parse::<UsageClass>()
        .map_err(|e| ctx("usage", e))?;

    let float = |idx: usize, name: &str| -> Result<f64> {
        field(idx, name)?
            .parse::<f64>()
            .map_err(|e| Error::parse(row, format!("{name}: {e}")))
    };
    let curve0 = FragilityCurve::new(float(5, "mu0")?, float(6, "sigma0")?)
        .map_err(|e| ctx("curve0", e))?;
    let curve1 = FragilityCurve::new(float(7, "mu1")?, float(8, "sigma1")?)
        .map_err(|e| ctx("curve1", e))?;

    Ok(Building {
        id,
        construction,
        stories,
        area_category,
        usage,
        curve0,
        curve1,
    })
}

/// Writes the canonical CSV form: numeric area categories and
/// shortest-round-trip floats, so `load(serialize(inv)) == inv`.
pub fn serialize_inventory(buildings: &[Building], mut writer: impl Write) -> std::io::Result<()> {
    writeln!(writer, "{}", INVENTORY_HEADER.join(","))?;
    for b in buildings {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{}",
            b.id,
            b.construction,
            b.stories,
            b.area_category.index(),
            b.usage,
            b.curve0.mu(),
            b.curve0.sigma(),
            b.curve1.mu(),
            b.curve1.sigma(),
        )?;
    }
    Ok(())
}

pub fn inventory_to_string(buildings: &[Building]) -> String {
    let mut out = Vec::new();
    serialize_inventory(buildings, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("inventory CSV is valid UTF-8")
}

// ── Usage-class curve scaling ───────────────────────────────────────────

/// Multipliers applied to both fragility parameters per usage class, used
/// to strengthen curves for code-conforming or critical construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCoefficients {
    pub residential: f64,
    pub commercial: f64,
    pub critical: f64,
}

impl Default for ScalingCoefficients {
    fn default() -> Self {
        ScalingCoefficients {
            residential: 2.5,
            commercial: 3.0,
            critical: 3.5,
        }
    }
}

impl ScalingCoefficients {
    pub fn coefficient(&self, usage: UsageClass) -> f64 {
        match usage {
            UsageClass::Residential => self.residential,
            UsageClass::Commercial => self.commercial,
            UsageClass::Critical => self.critical,
        }
    }
}

/// Scales every building's curves by its usage-class coefficient and
/// re-checks curve ordering on the grid.
pub fn apply_usage_scaling(
    buildings: &mut [Building],
    coefficients: &ScalingCoefficients,
    grid: &ValidationGrid,
) -> Result<()> {
    for b in buildings.iter_mut() {
        let c = coefficients.coefficient(b.usage);
        b.curve0 = b.curve0.scaled(c)?;
        b.curve1 = b.curve1.scaled(c)?;
    }
    for b in buildings.iter() {
        b.validate(grid)?;
    }
    Ok(())
}

// ── Synthetic inventory generation ──────────────────────────────────────

/// Fragility parameters a construction class contributes to generated
/// buildings (before any usage-class scaling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCurves {
    pub mu0: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

impl ClassCurves {
    fn curves(&self) -> Result<(FragilityCurve, FragilityCurve)> {
        Ok((
            FragilityCurve::new(self.mu0, self.sigma0)?,
            FragilityCurve::new(self.mu1, self.sigma1)?,
        ))
    }
}

/// Per-class fragility parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTable {
    #[serde(rename = "M")]
    pub m: ClassCurves,
    #[serde(rename = "RC")]
    pub rc: ClassCurves,
    #[serde(rename = "RCT")]
    pub rct: ClassCurves,
    #[serde(rename = "RCS")]
    pub rcs: ClassCurves,
    #[serde(rename = "RCST")]
    pub rcst: ClassCurves,
}

impl ClassTable {
    pub fn curves_for(&self, class: ConstructionClass) -> &ClassCurves {
        match class {
            ConstructionClass::M => &self.m,
            ConstructionClass::RC => &self.rc,
            ConstructionClass::RCT => &self.rct,
            ConstructionClass::RCS => &self.rcs,
            ConstructionClass::RCST => &self.rcst,
        }
    }
}

impl Default for ClassTable {
    /// Illustrative parameters: moment frames and masonry are fragile at
    /// moderate shaking; shear-wall systems are markedly more robust. Equal
    /// dispersion within a class keeps the two curves ordered everywhere.
    fn default() -> Self {
        ClassTable {
            m: ClassCurves { mu0: 0.16, sigma0: 0.60, mu1: 0.34, sigma1: 0.60 },
            rc: ClassCurves { mu0: 0.20, sigma0: 0.55, mu1: 0.42, sigma1: 0.55 },
            rct: ClassCurves { mu0: 0.17, sigma0: 0.58, mu1: 0.36, sigma1: 0.58 },
            rcs: ClassCurves { mu0: 2.40, sigma0: 0.30, mu1: 4.80, sigma1: 0.30 },
            rcst: ClassCurves { mu0: 2.00, sigma0: 0.32, mu1: 4.00, sigma1: 0.32 },
        }
    }
}

/// Exact building counts per usage class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageCounts {
    pub residential: usize,
    pub commercial: usize,
    pub critical: usize,
}

impl UsageCounts {
    pub fn total(&self) -> usize {
        self.residential + self.commercial + self.critical
    }
}

/// Sampling weights over construction classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionWeights {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "RC")]
    pub rc: f64,
    #[serde(rename = "RCT")]
    pub rct: f64,
    #[serde(rename = "RCS")]
    pub rcs: f64,
    #[serde(rename = "RCST")]
    pub rcst: f64,
}

impl Default for ConstructionWeights {
    fn default() -> Self {
        ConstructionWeights {
            m: 0.42,
            rc: 0.34,
            rct: 0.12,
            rcs: 0.08,
            rcst: 0.04,
        }
    }
}

impl ConstructionWeights {
    fn as_array(&self) -> [f64; 5] {
        [self.m, self.rc, self.rct, self.rcs, self.rcst]
    }
}

/// Uniform story-count range for generated buildings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryRange {
    pub min: u32,
    pub max: u32,
}

impl Default for StoryRange {
    fn default() -> Self {
        StoryRange { min: 1, max: 6 }
    }
}

/// One fully specified stratum of buildings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub construction: String,
    pub usage: String,
    pub stories: u32,
    pub area_category: FloorAreaCategory,
    pub count: usize,
}

/// Scaling block of the synthesis config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub enabled: bool,
    #[serde(flatten)]
    pub coefficients: ScalingCoefficients,
}

impl Default for ScalingSpec {
    fn default() -> Self {
        ScalingSpec {
            enabled: true,
            coefficients: ScalingCoefficients::default(),
        }
    }
}

fn default_area_weights() -> Vec<f64> {
    // Small homes dominate; large categories taper off.
    vec![0.28, 0.22, 0.16, 0.10, 0.07, 0.05, 0.04, 0.03, 0.02, 0.015, 0.01, 0.005]
}

/// Declarative description of a synthetic inventory. Either give `total`
/// (optionally with exact `usage_counts`) and marginal distributions, or
/// enumerate exact `cells`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfig {
    #[serde(default)]
    pub total: Option<usize>,
    #[serde(default)]
    pub usage_counts: Option<UsageCounts>,
    #[serde(default)]
    pub construction_weights: ConstructionWeights,
    #[serde(default)]
    pub stories: StoryRange,
    #[serde(default = "default_area_weights")]
    pub area_weights: Vec<f64>,
    #[serde(default)]
    pub cells: Option<Vec<CellSpec>>,
    #[serde(default)]
    pub fragility: ClassTable,
    #[serde(default)]
    pub scaling: ScalingSpec,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            total: None,
            usage_counts: None,
            construction_weights: ConstructionWeights::default(),
            stories: StoryRange::default(),
            area_weights: default_area_weights(),
            cells: None,
            fragility: ClassTable::default(),
            scaling: ScalingSpec::default(),
        }
    }
}

impl SynthesisConfig {
    pub fn from_toml_str(text: &str) -> Result<SynthesisConfig> {
        let config: SynthesisConfig = toml::from_str(text)
            .map_err(|e| Error::config(format!("synthesis config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SynthesisConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        SynthesisConfig::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_some() && (self.total.is_some() || self.usage_counts.is_some()) {
            return Err(Error::config(
                "give either explicit cells or total/usage_counts, not both",
            ));
        }
        if self.cells.is_none() && self.total.is_none() && self.usage_counts.is_none() {
            return Err(Error::config(
                "synthesis needs a total, usage counts, or explicit cells",
            ));
        }
        if let (Some(total), Some(counts)) = (self.total, &self.usage_counts) {
            if counts.total() != total {
                return Err(Error::config(format!(
                    "usage counts sum to {} but total is {total}",
                    counts.total()
                )));
            }
        }
        if self.stories.min == 0 || self.stories.min > self.stories.max {
            return Err(Error::config(format!(
                "story range needs 1 <= min <= max, got {}..={}",
                self.stories.min, self.stories.max
            )));
        }
        if self.area_weights.len() != FloorAreaCategory::MAX as usize {
            return Err(Error::config(format!(
                "area_weights needs exactly {} entries, got {}",
                FloorAreaCategory::MAX,
                self.area_weights.len()
            )));
        }
        check_weights("area_weights", &self.area_weights)?;
        check_weights("construction_weights", &self.construction_weights.as_array())?;
        for class in ConstructionClass::ALL {
            let spec = self.fragility.curves_for(class);
            let (c0, c1) = spec
                .curves()
                .map_err(|e| Error::config(format!("fragility table for {class}: {e}")))?;
            // A quick ordering sanity check; generated buildings are each
            // validated on the full grid as well.
            if c1.mu() < c0.mu() {
                return Err(Error::config(format!(
                    "fragility table for {class}: level-2 median {} below level-1 median {}",
                    c1.mu(),
                    c0.mu()
                )));
            }
        }
        if let Some(cells) = &self.cells {
            for (i, cell) in cells.iter().enumerate() {
                cell.construction
                    .parse::<ConstructionClass>()
                    .map_err(|e| Error::config(format!("cells[{i}]: {e}")))?;
                cell.usage
                    .parse::<UsageClass>()
                    .map_err(|e| Error::config(format!("cells[{i}]: {e}")))?;
                if cell.stories == 0 {
                    return Err(Error::config(format!("cells[{i}]: stories must be >= 1")));
                }
            }
        }
        let scaling = &self.scaling.coefficients;
        for (name, c) in [
            ("residential", scaling.residential),
            ("commercial", scaling.commercial),
            ("critical", scaling.critical),
        ] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::config(format!(
                    "scaling coefficient {name} must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }
}

fn check_weights(name: &str, weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::config(format!(
            "{name} must be nonnegative finite numbers"
        )));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::config(format!("{name} must not sum to zero")));
    }
    Ok(())
}

/// Draws an index proportional to `weights` (validated nonnegative, positive
/// sum).
fn pick_weighted(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// In-place Fisher-Yates shuffle driven by the generator's own stream, so
/// results do not depend on library shuffle internals.
fn shuffle<T>(rng: &mut impl Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// Splits `total` across usage classes proportionally to the historical mix
/// when exact counts are not given (largest-remainder apportionment).
fn apportion_usages(total: usize) -> UsageCounts {
    const WEIGHTS: [f64; 3] = [0.95, 0.04, 0.01];
    let mut counts = [0usize; 3];
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(3);
    let mut assigned = 0;
    for i in 0..3 {
        let exact = WEIGHTS[i] * total as f64;
        counts[i] = exact.floor() as usize;
        assigned += counts[i];
        remainders.push((i, exact - exact.floor()));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in remainders.into_iter().take(total - assigned) {
        counts[i] += 1;
    }
    UsageCounts {
        residential: counts[0],
        commercial: counts[1],
        critical: counts[2],
    }
}

/// Generates a synthetic inventory. Deterministic: the same `(spec, seed)`
/// pair always yields the same buildings, so serialized output is
/// byte-identical across runs and machines.
pub fn generate_inventory(spec: &SynthesisConfig, seed: u64) -> Result<Vec<Building>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut rows: Vec<(ConstructionClass, UsageClass, u32, FloorAreaCategory)> = Vec::new();
    if let Some(cells) = &spec.cells {
        for cell in cells {
            let construction: ConstructionClass = cell.construction.parse()?;
            let usage: UsageClass = cell.usage.parse()?;
            for _ in 0..cell.count {
                rows.push((construction, usage, cell.stories, cell.area_category));
            }
        }
    } else {
        let counts = match (&spec.usage_counts, spec.total) {
            (Some(counts), _) => *counts,
            (None, Some(total)) => apportion_usages(total),
            (None, None) => unreachable!("validated above"),
        };
        let mut usages = Vec::with_capacity(counts.total());
        usages.extend(std::iter::repeat(UsageClass::Residential).take(counts.residential));
        usages.extend(std::iter::repeat(UsageClass::Commercial).take(counts.commercial));
        usages.extend(std::iter::repeat(UsageClass::Critical).take(counts.critical));
        shuffle(&mut rng, &mut usages);

        let construction_weights = spec.construction_weights.as_array();
        for usage in usages {
            let construction = ConstructionClass::ALL[pick_weighted(&mut rng, &construction_weights)];
            let stories = rng.random_range(spec.stories.min..=spec.stories.max);
            let area = FloorAreaCategory::from_index(
                pick_weighted(&mut rng, &spec.area_weights) as u8 + 1,
            )?;
            rows.push((construction, usage, stories, area));
        }
    }

    let width = rows.len().to_string().len().max(4);
    let grid = ValidationGrid::default();
    let mut buildings = Vec::with_capacity(rows.len());
    for (i, (construction, usage, stories, area_category)) in rows.into_iter().enumerate() {
        let params = spec.fragility.curves_for(construction);
        let (mut curve0, mut curve1) = params.curves()?;
        if spec.scaling.enabled {
            let c = spec.scaling.coefficients.coefficient(usage);
            curve0 = curve0.scaled(c)?;
            curve1 = curve1.scaled(c)?;
        }
        let building = Building {
            id: format!("b{:0width$}", i + 1),
            construction,
            stories,
            area_category,
            usage,
            curve0,
            curve1,
        };
        building.validate(&grid)?;
        buildings.push(building);
    }
    Ok(buildings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_csv() -> &'static str {
        "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
         b1,M,2,C,Residential,0.4,0.6,0.85,0.6\n\
         b2,RC,5,4,Commercial,0.6,0.55,1.26,0.55\n\
         b3,RCS,3,A,Critical,8.4,1.05,16.8,1.05\n"
    }

    #[test]
    fn loads_letters_and_indices() {
        let grid = ValidationGrid::default();
        let inv = read_inventory(sample_csv().as_bytes(), &grid).unwrap();
        assert_eq!(inv.len(), 3);
        assert_eq!(inv[0].area_category.index(), 1);
        assert_eq!(inv[1].area_category.index(), 4);
        assert_eq!(inv[0].construction, ConstructionClass::M);
        assert_eq!(inv[2].usage, UsageClass::Critical);
        assert_eq!(inv[1].stories, 5);
        assert_eq!(inv[2].curve0.mu(), 8.4);
    }

    #[test]
    fn letter_mapping_matches_cadastral_groups() {
        let expect = [
            ('A', 1), ('B', 1), ('C', 1), ('D', 2), ('E', 2), ('F', 3), ('G', 3),
            ('H', 4), ('I', 5), ('L', 6), ('M', 7), ('N', 8), ('O', 9), ('P', 10),
            ('Q', 11), ('R', 12),
        ];
        for (letter, index) in expect {
            assert_eq!(FloorAreaCategory::from_letter(letter).unwrap().index(), index);
        }
        assert!(FloorAreaCategory::from_letter('J').is_err());
        assert!(FloorAreaCategory::from_letter('K').is_err());
        assert!(FloorAreaCategory::from_letter('Z').is_err());
        assert!(FloorAreaCategory::from_index(0).is_err());
        assert!(FloorAreaCategory::from_index(13).is_err());
        assert_eq!("12".parse::<FloorAreaCategory>().unwrap().index(), 12);
    }

    #[test]
    fn round_trips_through_canonical_csv() {
        let grid = ValidationGrid::default();
        let inv = read_inventory(sample_csv().as_bytes(), &grid).unwrap();
        let text = inventory_to_string(&inv);
        let again = read_inventory(text.as_bytes(), &grid).unwrap();
        assert_eq!(inv, again);
        // Canonical form is stable: serializing again is byte-identical.
        assert_eq!(text, inventory_to_string(&again));
    }

    #[test]
    fn skips_comment_lines() {
        let text = format!("# inventory schema comment\n{}", sample_csv());
        let inv = read_inventory(text.as_bytes(), &ValidationGrid::default()).unwrap();
        assert_eq!(inv.len(), 3);
    }

    #[test]
    fn header_only_file_is_an_empty_inventory() {
        let text = "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n";
        let inv = read_inventory(text.as_bytes(), &ValidationGrid::default()).unwrap();
        assert!(inv.is_empty());
    }

    #[test]
    fn rejects_malformed_rows() {
        let grid = ValidationGrid::default();
        let cases = [
            // wrong header
            ("id,construction,stories\nb1,M,2\n", "header"),
            // unknown construction token
            (
                "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
                 b1,XX,2,C,Residential,0.4,0.6,0.85,0.6\n",
                "construction",
            ),
            // zero stories
            (
                "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
                 b1,M,0,C,Residential,0.4,0.6,0.85,0.6\n",
                "stories",
            ),
            // nonpositive median
            (
                "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
                 b1,M,2,C,Residential,-0.4,0.6,0.85,0.6\n",
                "curve0",
            ),
            // bad area letter
            (
                "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
                 b1,M,2,J,Residential,0.4,0.6,0.85,0.6\n",
                "area_category",
            ),
        ];
        for (text, what) in cases {
            let err = read_inventory(text.as_bytes(), &grid).unwrap_err();
            let msg = err.to_string();
            assert!(
                msg.contains(what),
                "expected error about {what}, got: {msg}"
            );
        }
    }

    #[test]
    fn rejects_duplicate_ids() {
        let text = "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
                    b1,M,2,C,Residential,0.4,0.6,0.85,0.6\n\
                    b1,RC,3,D,Commercial,0.6,0.55,1.26,0.55\n";
        let err = read_inventory(text.as_bytes(), &ValidationGrid::default()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "got {err}");
    }

    #[test]
    fn rejects_misordered_curves() {
        // Level-2 curve strictly above level-1 (smaller median, same
        // dispersion) must fail grid validation.
        let text = "id,construction,stories,area_category,usage,mu0,sigma0,mu1,sigma1\n\
                    b1,M,2,C,Residential,0.9,0.5,0.6,0.5\n";
        let err = read_inventory(text.as_bytes(), &ValidationGrid::default()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "got {err}");
    }

    #[test]
    fn validation_grid_is_log_spaced_and_inclusive() {
        let grid = ValidationGrid::default();
        let pts = grid.points();
        assert_eq!(pts.len(), 200);
        assert!((pts[0] - 1e-3).abs() < 1e-15);
        assert!((pts[199] - 10.0).abs() < 1e-12);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        // Log spacing: constant ratio between neighbors.
        let r0 = pts[1] / pts[0];
        let r1 = pts[150] / pts[149];
        assert!((r0 - r1).abs() < 1e-9);
    }

    #[test]
    fn usage_scaling_multiplies_both_parameters() {
        let grid = ValidationGrid::default();
        let mut inv = read_inventory(sample_csv().as_bytes(), &grid).unwrap();
        let unscaled = inv.clone();
        apply_usage_scaling(&mut inv, &ScalingCoefficients::default(), &grid).unwrap();
        assert_eq!(inv[0].curve0.mu(), unscaled[0].curve0.mu() * 2.5);
        assert_eq!(inv[0].curve0.sigma(), unscaled[0].curve0.sigma() * 2.5);
        assert_eq!(inv[1].curve1.mu(), unscaled[1].curve1.mu() * 3.0);
        assert_eq!(inv[2].curve1.sigma(), unscaled[2].curve1.sigma() * 3.5);
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let spec = SynthesisConfig {
            total: Some(30),
            ..SynthesisConfig::default()
        };
        let a = generate_inventory(&spec, 7).unwrap();
        let b = generate_inventory(&spec, 7).unwrap();
        assert_eq!(inventory_to_string(&a), inventory_to_string(&b));
        let c = generate_inventory(&spec, 8).unwrap();
        assert_ne!(inventory_to_string(&a), inventory_to_string(&c));
    }

    #[test]
    fn generator_honors_exact_usage_counts() {
        let spec = SynthesisConfig {
            usage_counts: Some(UsageCounts {
                residential: 21,
                commercial: 6,
                critical: 3,
            }),
            ..SynthesisConfig::default()
        };
        let inv = generate_inventory(&spec, 3).unwrap();
        assert_eq!(inv.len(), 30);
        let count = |u: UsageClass| inv.iter().filter(|b| b.usage == u).count();
        assert_eq!(count(UsageClass::Residential), 21);
        assert_eq!(count(UsageClass::Commercial), 6);
        assert_eq!(count(UsageClass::Critical), 3);
        // All ids unique and sequential-width.
        let ids: HashSet<_> = inv.iter().map(|b| b.id.clone()).collect();
        assert_eq!(ids.len(), 30);
    }

    #[test]
    fn generator_applies_usage_scaling_to_class_curves() {
        let spec = SynthesisConfig {
            usage_counts: Some(UsageCounts {
                residential: 4,
                commercial: 0,
                critical: 0,
            }),
            ..SynthesisConfig::default()
        };
        let inv = generate_inventory(&spec, 11).unwrap();
        for b in &inv {
            let base = spec.fragility.curves_for(b.construction);
            assert!((b.curve0.mu() - base.mu0 * 2.5).abs() < 1e-12);
            assert!((b.curve1.sigma() - base.sigma1 * 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_expands_explicit_cells() {
        let spec = SynthesisConfig {
            cells: Some(vec![
                CellSpec {
                    construction: "RC".into(),
                    usage: "Commercial".into(),
                    stories: 4,
                    area_category: FloorAreaCategory::from_index(5).unwrap(),
                    count: 3,
                },
                CellSpec {
                    construction: "M".into(),
                    usage: "Residential".into(),
                    stories: 2,
                    area_category: FloorAreaCategory::from_index(1).unwrap(),
                    count: 2,
                },
            ]),
            ..SynthesisConfig::default()
        };
        let inv = generate_inventory(&spec, 0).unwrap();
        assert_eq!(inv.len(), 5);
        assert!(inv[..3]
            .iter()
            .all(|b| b.construction == ConstructionClass::RC && b.stories == 4));
        assert!(inv[3..]
            .iter()
            .all(|b| b.usage == UsageClass::Residential && b.area_category.index() == 1));
    }

    #[test]
    fn empty_total_gives_empty_inventory() {
        let spec = SynthesisConfig {
            total: Some(0),
            ..SynthesisConfig::default()
        };
        let inv = generate_inventory(&spec, 0).unwrap();
        assert!(inv.is_empty());
        assert_eq!(
            inventory_to_string(&inv),
            format!("{}\n", INVENTORY_HEADER.join(","))
        );
    }

    #[test]
    fn underspecified_or_contradictory_configs_are_rejected() {
        let empty = SynthesisConfig::default();
        assert!(matches!(generate_inventory(&empty, 0), Err(Error::Config(_))));

        let contradictory = SynthesisConfig {
            total: Some(10),
            usage_counts: Some(UsageCounts {
                residential: 5,
                commercial: 0,
                critical: 0,
            }),
            ..SynthesisConfig::default()
        };
        assert!(matches!(
            generate_inventory(&contradictory, 0),
            Err(Error::Config(_))
        ));

        let both_modes = SynthesisConfig {
            total: Some(10),
            cells: Some(vec![]),
            ..SynthesisConfig::default()
        };
        assert!(matches!(
            generate_inventory(&both_modes, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn synthesis_config_parses_from_toml() {
        let text = r#"
            total = 12
            [stories]
            min = 1
            max = 3
            [scaling]
            enabled = false
            residential = 2.5
            commercial = 3.0
            critical = 3.5
        "#;
        let spec = SynthesisConfig::from_toml_str(text).unwrap();
        assert_eq!(spec.total, Some(12));
        assert!(!spec.scaling.enabled);
        let inv = generate_inventory(&spec, 5).unwrap();
        assert_eq!(inv.len(), 12);
        assert!(inv.iter().all(|b| b.stories <= 3));
    }

    fn building_strategy() -> impl Strategy<Value = Building> {
        (
            0usize..5,
            0usize..3,
            1u32..40,
            1u8..=12,
            0.05f64..5.0,
            0.1f64..1.5,
            1.05f64..4.0,
        )
            .prop_map(|(c, u, stories, area, mu0, sigma, spread)| Building {
                id: String::new(), // filled by the caller with a unique id
                construction: ConstructionClass::ALL[c],
                usage: UsageClass::ALL[u],
                stories,
                area_category: FloorAreaCategory::from_index(area).unwrap(),
                curve0: FragilityCurve::new(mu0, sigma).unwrap(),
                curve1: FragilityCurve::new(mu0 * spread, sigma).unwrap(),
            })
    }

    proptest! {
        #[test]
        fn arbitrary_inventories_round_trip(
            mut buildings in proptest::collection::vec(building_strategy(), 0..20)
        ) {
            for (i, b) in buildings.iter_mut().enumerate() {
                b.id = format!("b{i:03}");
            }
            let grid = ValidationGrid::default();
            let text = inventory_to_string(&buildings);
            let loaded = read_inventory(text.as_bytes(), &grid).unwrap();
            prop_assert_eq!(loaded, buildings);
        }
    }
}
