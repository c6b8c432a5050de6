//! Scenario configuration: one flat key-value document per run.
//!
//! Presets cover the standard experiment grid: three control policies
//! (zero / total / random distribution), the proportional planner without
//! distortion, and proportional runs tilted toward consumption or industry,
//! each also in a doubled-duration variant, plus high-failure variants of
//! the pro-industry pair.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adapt::AdaptationParams;
use crate::error::SimError;
use crate::planner::{DistributionPolicy, PolicyParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub seed: u64,
    /// Simulated horizon in months.
    pub months: u32,
    /// Leading months excluded from yearly reporting.
    pub warmup_months: u32,
    pub n_firms: usize,

    pub policy: DistributionPolicy,
    pub order_distortion: f64,
    pub duration_multiplier: u32,
    pub failure_probability: f64,
    pub order_floor_share: f64,
    /// Expected order flow per sector as a fraction of aggregate capacity
    /// at full class sizing.
    pub flow_capacity_ratio: f64,
    pub purchase_noise: f64,

    /// Capital tolerance band half-width.
    pub tolerance: f64,
    pub useful_life_years: u32,
    pub ticks_per_year: u32,
    /// Wage per worker per tick.
    pub wage: f64,
    /// Annual cost of capital; charged per tick as `rate / ticks_per_year`.
    pub annual_capital_rate: f64,
    /// Initial firm sizes are drawn from the class ranges, then scaled down
    /// by this factor so firms grow into shape during the start-up phase.
    pub undersizing: f64,

    /// Optional TOML file overriding the built-in class catalog.
    pub catalog_path: Option<PathBuf>,
    /// Output directory for CSVs and the summary.
    pub out_dir: PathBuf,
    /// Firms whose per-tick events are dumped to a trace CSV.
    pub trace_firms: Vec<usize>,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: "custom".into(),
            seed: 42,
            months: 144,
            warmup_months: 24,
            n_firms: 10_000,
            policy: DistributionPolicy::Proportional,
            order_distortion: 0.0,
            duration_multiplier: 1,
            failure_probability: 0.05,
            order_floor_share: 0.5,
            flow_capacity_ratio: 0.85,
            purchase_noise: 0.1,
            tolerance: 0.1,
            useful_life_years: 12,
            ticks_per_year: 12,
            wage: 1.0,
            annual_capital_rate: 0.10,
            undersizing: 0.9,
            catalog_path: None,
            out_dir: PathBuf::from("out"),
            trace_firms: Vec::new(),
            threads: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn policy_params(&self) -> PolicyParams {
        PolicyParams {
            distribution: self.policy,
            order_distortion: self.order_distortion,
            duration_multiplier: self.duration_multiplier,
            failure_probability: self.failure_probability,
            order_floor_share: self.order_floor_share,
            flow_capacity_ratio: self.flow_capacity_ratio,
            purchase_noise: self.purchase_noise,
        }
    }

    pub fn adaptation_params(&self) -> AdaptationParams {
        AdaptationParams {
            tolerance: self.tolerance,
            useful_life_years: self.useful_life_years,
            ticks_per_year: self.ticks_per_year,
        }
    }

    pub fn capital_rate_per_tick(&self) -> f64 {
        self.annual_capital_rate / self.ticks_per_year as f64
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.months == 0 || self.months <= self.warmup_months {
            return Err(SimError::Config(format!(
                "months ({}) must exceed warmup_months ({})",
                self.months, self.warmup_months
            )));
        }
        if self.n_firms < 8 {
            return Err(SimError::Config(format!(
                "n_firms must be at least 8 (one per class), got {}",
                self.n_firms
            )));
        }
        if self.ticks_per_year == 0 || self.useful_life_years == 0 {
            return Err(SimError::Config("ticks_per_year and useful_life_years must be positive".into()));
        }
        if self.tolerance <= 0.0 {
            return Err(SimError::Config("tolerance must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.undersizing) || self.undersizing == 0.0 {
            return Err(SimError::Config(format!(
                "undersizing must lie in (0, 1], got {}",
                self.undersizing
            )));
        }
        if self.wage <= 0.0 || self.annual_capital_rate < 0.0 {
            return Err(SimError::Config("wage must be positive, capital rate non-negative".into()));
        }
        self.policy_params().validate()
    }

    pub fn from_toml_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)?;
        let config: ScenarioConfig =
            toml::from_str(&text).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }
}

/// Names of the built-in scenario presets, in the canonical order.
pub fn preset_names() -> &'static [&'static str] {
    &[
        "planner-zero",
        "planner-total",
        "planner-random",
        "prop-regular",
        "prop-regular-2x",
        "prop-min-inv",
        "prop-min-inv-2x",
        "prop-max-inv",
        "prop-max-inv-2x",
        "prop-max-inv-fail10",
        "prop-max-inv-2x-fail10",
    ]
}

/// Build the configuration for a named preset.
pub fn preset(name: &str) -> Result<ScenarioConfig, SimError> {
    let mut config = ScenarioConfig {
        scenario: name.to_string(),
        ..ScenarioConfig::default()
    };
    // The pro-consumption tilt removes the investment order flow entirely:
    // anything milder leaves the planner enough stock to keep capital near
    // its desired level, and the economy settles instead of collapsing.
    // The pro-industry tilt of +0.5 shifts half the investment flow's worth
    // of consumption orders into investment ones.
    const PRO_CONSUMPTION: f64 = -1.0;
    const PRO_INDUSTRY: f64 = 0.5;
    match name {
        "planner-zero" => config.policy = DistributionPolicy::Zero,
        "planner-total" => config.policy = DistributionPolicy::Total,
        "planner-random" => config.policy = DistributionPolicy::Random,
        "prop-regular" => {}
        "prop-regular-2x" => config.duration_multiplier = 2,
        "prop-min-inv" => config.order_distortion = PRO_CONSUMPTION,
        "prop-min-inv-2x" => {
            config.order_distortion = PRO_CONSUMPTION;
            config.duration_multiplier = 2;
        }
        "prop-max-inv" => config.order_distortion = PRO_INDUSTRY,
        "prop-max-inv-2x" => {
            config.order_distortion = PRO_INDUSTRY;
            config.duration_multiplier = 2;
        }
        "prop-max-inv-fail10" => {
            config.order_distortion = PRO_INDUSTRY;
            config.failure_probability = 0.10;
        }
        "prop-max-inv-2x-fail10" => {
            config.order_distortion = PRO_INDUSTRY;
            config.duration_multiplier = 2;
            config.failure_probability = 0.10;
        }
        other => return Err(SimError::UnknownPreset(other.to_string())),
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build_and_validate() {
        for name in preset_names() {
            let config = preset(name).unwrap();
            config.validate().unwrap();
            assert_eq!(config.scenario, *name);
        }
        assert!(matches!(preset("bogus"), Err(SimError::UnknownPreset(_))));
    }

    #[test]
    fn validation_rejects_horizon_inside_warmup() {
        let config = ScenarioConfig {
            months: 24,
            warmup_months: 24,
            ..Default::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn validation_rejects_degenerate_floor_share() {
        let config = ScenarioConfig {
            order_floor_share: 1.0,
            ..Default::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_roundtrips_through_flat_toml() {
        let config = preset("prop-max-inv-2x").unwrap();
        let text = toml::to_string(&config).unwrap();
        let parsed: ScenarioConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed.scenario, "prop-max-inv-2x");
        assert_eq!(parsed.duration_multiplier, 2);
        assert_eq!(parsed.order_distortion, 0.5);
    }
}
