//! Lognormal fragility curves and the three-state safety classification
//! they induce.
//!
//! A building carries two exceedance curves over ground-motion intensity:
//! curve 0 separates "fully usable" from "restricted use", curve 1 separates
//! "restricted use" from "unsafe". Evaluating both at an intensity `x` and
//! differencing yields the probability of landing in each safety state.

use crate::error::{Error, Result};

/// The three post-event safety states a building can be assigned to.
///
/// Levels are ordered from least to most restrictive; the numeric level
/// (1, 2, 3) is what appears in input/output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SafetyLevel {
    /// Level 1: building remains fully usable.
    Usable,
    /// Level 2: use is restricted pending repairs.
    Restricted,
    /// Level 3: building is unsafe to occupy.
    Unsafe,
}

impl SafetyLevel {
    pub const ALL: [SafetyLevel; 3] = [
        SafetyLevel::Usable,
        SafetyLevel::Restricted,
        SafetyLevel::Unsafe,
    ];

    /// Numeric level, 1 through 3.
    pub fn level(self) -> u8 {
        match self {
            SafetyLevel::Usable => 1,
            SafetyLevel::Restricted => 2,
            SafetyLevel::Unsafe => 3,
        }
    }

    /// Zero-based index, handy for array lookups.
    pub fn index(self) -> usize {
        self.level() as usize - 1
    }

    pub fn from_level(level: u8) -> Result<SafetyLevel> {
        match level {
            1 => Ok(SafetyLevel::Usable),
            2 => Ok(SafetyLevel::Restricted),
            3 => Ok(SafetyLevel::Unsafe),
            other => Err(Error::domain(format!(
                "safety level must be 1, 2, or 3, got {other}"
            ))),
        }
    }
}

impl std::fmt::Display for SafetyLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.level())
    }
}

/// Standard normal CDF, computed as `erfc(-z/sqrt(2)) / 2`.
///
/// The complementary form stays accurate deep in the lower tail, where
/// `1 - erf(...)` would cancel catastrophically.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// A lognormal exceedance curve parameterized by its median intensity `mu`
/// and log-space dispersion `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragilityCurve {
    mu: f64,
    sigma: f64,
}

impl FragilityCurve {
    pub fn new(mu: f64, sigma: f64) -> Result<FragilityCurve> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!(
                "fragility median must be a positive finite intensity, got {mu}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!(
                "fragility dispersion must be positive and finite, got {sigma}"
            )));
        }
        Ok(FragilityCurve { mu, sigma })
    }

    /// Median intensity: the x at which the curve evaluates to 1/2.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Log-space dispersion.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Exceedance probability at intensity `x`: the lognormal CDF
    /// `Phi((ln x - ln mu) / sigma)`, with `evaluate(0) == 0`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!(
                "intensity must be nonnegative, got {x}"
            )));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(std_normal_cdf((x.ln() - self.mu.ln()) / self.sigma))
    }

    /// Returns the curve with both parameters multiplied by `coefficient`,
    /// the standard way to stand in for a stronger (or weaker) design code.
    pub fn scaled(&self, coefficient: f64) -> Result<FragilityCurve> {
        if !(coefficient > 0.0 && coefficient.is_finite()) {
            return Err(Error::domain(format!(
                "scaling coefficient must be positive and finite, got {coefficient}"
            )));
        }
        FragilityCurve::new(self.mu * coefficient, self.sigma * coefficient)
    }
}

/// Probability of each safety state at a fixed intensity. Always sums to 1
/// (within floating-point accumulation error).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateProbabilities {
    p: [f64; 3],
}

impl StateProbabilities {
    /// Builds from explicit per-state probabilities. Each entry must lie in
    /// [0, 1] and the three must sum to 1 within 1e-12.
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<StateProbabilities> {
        for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        let sum = p1 + p2 + p3;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "state probabilities must sum to 1, got {sum}"
            )));
        }
        Ok(StateProbabilities { p: [p1, p2, p3] })
    }

    /// Assembles raw differenced probabilities, absorbing floating-point
    /// noise: a slightly negative middle probability is clamped to zero and
    /// the remainder renormalized. Anything beyond noise level points at
    /// mis-ordered curves that slipped past grid validation, and is loudly
    /// reported before being clamped the same way.
    fn from_raw(p1: f64, p2: f64, p3: f64) -> StateProbabilities {
        if p2 < 0.0 {
            if p2 <= -1e-12 {
                log::warn!(
                    "middle-state probability {p2:e} is negative beyond rounding noise; \
                     exceedance curves cross between validation grid points"
                );
            } else {
                log::debug!("clamping middle-state probability {p2:e} to 0");
            }
            let sum = p1 + p3;
            return StateProbabilities {
                p: [p1 / sum, 0.0, p3 / sum],
            };
        }
        StateProbabilities { p: [p1, p2, p3] }
    }

    /// Probability of remaining fully usable (level 1).
    pub fn p1(&self) -> f64 {
        self.p[0]
    }

    /// Probability of restricted use (level 2).
    pub fn p2(&self) -> f64 {
        self.p[1]
    }

    /// Probability of being unsafe (level 3).
    pub fn p3(&self) -> f64 {
        self.p[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.p
    }

    pub fn probability(&self, level: SafetyLevel) -> f64 {
        self.p[level.index()]
    }

    /// Maps a uniform draw in [0, 1) to a safety state by inverse CDF:
    /// `u < p1` gives level 1, `u < p1 + p2` level 2, anything else level 3.
    pub fn sample(&self, u: f64) -> SafetyLevel {
        if u < self.p[0] {
            SafetyLevel::Usable
        } else if u < self.p[0] + self.p[1] {
            SafetyLevel::Restricted
        } else {
            SafetyLevel::Unsafe
        }
    }
}

/// Safety-state probabilities at intensity `x` for a building whose
/// exceedance curves are `curve0` (level 1 -> 2 threshold) and `curve1`
/// (level 2 -> 3 threshold):
///
/// ```text
/// p1 = 1 - F0(x)        still fully usable
/// p2 = F0(x) - F1(x)    restricted use
/// p3 = F1(x)            unsafe
/// ```
pub fn state_probabilities(
    curve0: &FragilityCurve,
    curve1: &FragilityCurve,
    x: f64,
) -> Result<StateProbabilities> {
    let f0 = curve0.evaluate(x)?;
    let f1 = curve1.evaluate(x)?;
    Ok(StateProbabilities::from_raw(1.0 - f0, f0 - f1, f1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Adaptive Simpson quadrature of the lognormal density, used as an
    /// independent route to the CDF values the closed form must reproduce.
    mod quadrature {
        fn lognormal_pdf(y: f64, mu: f64, sigma: f64) -> f64 {
            let z = (y.ln() - mu.ln()) / sigma;
            (-0.5 * z * z).exp() / (y * sigma * (2.0 * std::f64::consts::PI).sqrt())
        }

        fn simpson(f: &impl Fn(f64) -> f64, a: f64, m: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
        }

        fn adaptive(
            f: &impl Fn(f64) -> f64,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, 0.5 * (a + m), m);
            let right = simpson(f, m, 0.5 * (m + b), b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                adaptive(f, a, m, left, tol / 2.0, depth - 1)
                    + adaptive(f, m, b, right, tol / 2.0, depth - 1)
            }
        }

        /// Integrates the lognormal density from (effectively) zero to `x`.
        pub fn lognormal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
            // Mass below mu * exp(-12 sigma) is Phi(-12) ~ 1.8e-33: ignorable.
            let lo = mu * (-12.0 * sigma).exp();
            if x <= lo {
                return 0.0;
            }
            let f = |y: f64| lognormal_pdf(y, mu, sigma);
            adaptive(&f, lo, x, simpson(&f, lo, 0.5 * (lo + x), x), 1e-13, 48)
        }
    }

    #[test]
    fn matches_numerically_integrated_lognormal_density() {
        let curve = FragilityCurve::new(1.0, 0.5).unwrap();
        // Reference values from 40-digit quadrature of the density.
        let cases = [
            (0.5, 0.08282851900169848535),
            (1.0, 0.5),
            (2.0, 0.91717148099830151465),
        ];
        for (x, expected) in cases {
            let got = curve.evaluate(x).unwrap();
            assert!(
                (got - expected).abs() <= 1e-9,
                "evaluate({x}) = {got}, expected {expected}"
            );
            let integrated = quadrature::lognormal_cdf(x, 1.0, 0.5);
            assert!(
                (got - integrated).abs() <= 1e-9,
                "evaluate({x}) = {got}, quadrature gave {integrated}"
            );
        }
    }

    #[test]
    fn quadrature_agrees_for_assorted_parameters() {
        let cases = [(0.45, 0.8, 0.75), (0.45, 1.6, 0.75), (3.0, 0.9, 0.4)];
        for (x, mu, sigma) in cases {
            let curve = FragilityCurve::new(mu, sigma).unwrap();
            let got = curve.evaluate(x).unwrap();
            let integrated = quadrature::lognormal_cdf(x, mu, sigma);
            assert!(
                (got - integrated).abs() <= 1e-9,
                "evaluate({x}; {mu}, {sigma}) = {got} vs quadrature {integrated}"
            );
        }
    }

    #[test]
    fn normal_cdf_spot_values() {
        // Reference values computed at 40-digit precision.
        let cases = [
            (0.0, 0.5),
            (1.0, 0.84134474606854294859),
            (-1.0, 0.15865525393145705141),
            (2.5, 0.99379033467422386483),
            (0.3, 0.61791142218895263731),
            (-8.0, 6.2209605742717841235e-16),
            (8.0, 0.9999999999999993779),
        ];
        for (z, expected) in cases {
            let got = std_normal_cdf(z);
            assert!(
                (got - expected).abs() <= 1e-15,
                "Phi({z}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn zero_intensity_is_certainly_safe() {
        let curve = FragilityCurve::new(0.7, 0.3).unwrap();
        assert_eq!(curve.evaluate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_or_nan_intensity_is_rejected() {
        let curve = FragilityCurve::new(0.7, 0.3).unwrap();
        assert!(curve.evaluate(-0.1).is_err());
        assert!(curve.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        assert!(FragilityCurve::new(0.0, 0.5).is_err());
        assert!(FragilityCurve::new(-1.0, 0.5).is_err());
        assert!(FragilityCurve::new(1.0, 0.0).is_err());
        assert!(FragilityCurve::new(f64::NAN, 0.5).is_err());
        assert!(FragilityCurve::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn scaling_moves_the_median() {
        let curve = FragilityCurve::new(0.4, 0.6).unwrap();
        let scaled = curve.scaled(2.5).unwrap();
        assert_eq!(scaled.mu(), 1.0);
        assert_eq!(scaled.sigma(), 1.5);
        // The median property: F(mu) = 1/2 before and after.
        assert!((scaled.evaluate(scaled.mu()).unwrap() - 0.5).abs() < 1e-15);
        assert!(curve.scaled(0.0).is_err());
        assert!(curve.scaled(-2.0).is_err());
    }

    #[test]
    fn middle_state_noise_is_clamped_and_renormalized() {
        let p = StateProbabilities::from_raw(0.6, -1e-13, 0.4 + 1e-13);
        assert_eq!(p.p2(), 0.0);
        assert!((p.p1() + p.p2() + p.p3() - 1.0).abs() <= 1e-12);
        assert!(p.p1() > 0.0 && p.p3() > 0.0);
    }

    #[test]
    fn explicit_probabilities_are_validated() {
        assert!(StateProbabilities::new(0.2, 0.5, 0.3).is_ok());
        assert!(StateProbabilities::new(0.2, 0.5, 0.4).is_err());
        assert!(StateProbabilities::new(-0.1, 0.6, 0.5).is_err());
    }

    #[test]
    fn inverse_cdf_sampling_hits_every_state() {
        let p = StateProbabilities::new(0.2, 0.5, 0.3).unwrap();
        assert_eq!(p.sample(0.0), SafetyLevel::Usable);
        assert_eq!(p.sample(0.1999), SafetyLevel::Usable);
        assert_eq!(p.sample(0.2), SafetyLevel::Restricted);
        assert_eq!(p.sample(0.6999), SafetyLevel::Restricted);
        assert_eq!(p.sample(0.7), SafetyLevel::Unsafe);
        assert_eq!(p.sample(0.9999), SafetyLevel::Unsafe);
    }

    #[test]
    fn safety_levels_round_trip_numeric_form() {
        for level in SafetyLevel::ALL {
            assert_eq!(SafetyLevel::from_level(level.level()).unwrap(), level);
        }
        assert!(SafetyLevel::from_level(0).is_err());
        assert!(SafetyLevel::from_level(4).is_err());
    }

    fn curve_params() -> impl Strategy<Value = (f64, f64)> {
        (0.05f64..20.0, 0.05f64..3.0)
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_in_intensity(
            (mu, sigma) in curve_params(),
            x1 in 1e-6f64..50.0,
            step in 1e-6f64..10.0,
        ) {
            let curve = FragilityCurve::new(mu, sigma).unwrap();
            let lo = curve.evaluate(x1).unwrap();
            let hi = curve.evaluate(x1 + step).unwrap();
            prop_assert!(lo <= hi);
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!((0.0..=1.0).contains(&hi));
        }

        #[test]
        fn probabilities_sum_to_one(
            (mu0, sigma) in curve_params(),
            spread in 1.0f64..4.0,
            x in 0.0f64..50.0,
        ) {
            // Equal dispersions with a larger level-2 median keep the curves
            // ordered for every intensity.
            let curve0 = FragilityCurve::new(mu0, sigma).unwrap();
            let curve1 = FragilityCurve::new(mu0 * spread, sigma).unwrap();
            let p = state_probabilities(&curve0, &curve1, x).unwrap();
            prop_assert!((p.p1() + p.p2() + p.p3() - 1.0).abs() <= 1e-12);
            prop_assert!(p.p1() >= 0.0 && p.p2() >= 0.0 && p.p3() >= 0.0);
        }

        #[test]
        fn scaling_composes_multiplicatively(
            (mu, sigma) in curve_params(),
            a in 0.1f64..5.0,
            b in 0.1f64..5.0,
        ) {
            let curve = FragilityCurve::new(mu, sigma).unwrap();
            let twice = curve.scaled(a).unwrap().scaled(b).unwrap();
            let once = curve.scaled(a * b).unwrap();
            prop_assert!((twice.mu() - once.mu()).abs() <= 1e-15 * once.mu());
            prop_assert!((twice.sigma() - once.sigma()).abs() <= 1e-15 * once.sigma());
        }

        #[test]
        fn more_intense_shaking_is_never_safer(
            (mu0, sigma) in curve_params(),
            spread in 1.0f64..4.0,
            x1 in 0.0f64..20.0,
            step in 0.0f64..20.0,
        ) {
            let curve0 = FragilityCurve::new(mu0, sigma).unwrap();
            let curve1 = FragilityCurve::new(mu0 * spread, sigma).unwrap();
            let before = state_probabilities(&curve0, &curve1, x1).unwrap();
            let after = state_probabilities(&curve0, &curve1, x1 + step).unwrap();
            prop_assert!(after.p1() <= before.p1());
            prop_assert!(after.p3() >= before.p3());
        }
    }
}
