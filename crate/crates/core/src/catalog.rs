//! Firm classes: the parameter bundles firms are instantiated from.
//!
//! The built-in catalog holds eight classes whose size structure follows the
//! Eurostat distribution of European firms by employment (micro firms
//! dominate), split between consumption-goods and investment-goods
//! producers. Experiments can override it from a TOML file.

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// What a firm produces. Consumption goods are retired from the economy when
/// the planner buys them; investment goods return to firms as productive
/// capital through the planner's distribution step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Consumption,
    Investment,
}

/// One firm archetype.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirmClass {
    /// Fraction of the firm population drawn from this class.
    pub share: f64,
    pub labor_min: u32,
    pub labor_max: u32,
    /// Initial capital endowment range, in money.
    pub capital_min: f64,
    pub capital_max: f64,
    /// Order duration range, in ticks (months).
    pub duration_min: u32,
    pub duration_max: u32,
    /// Capital value required per worker: the production recipe K/L.
    pub recipe: f64,
    /// Output quantity per worker per tick.
    pub labor_productivity: f64,
    /// Upper bound for a single order's quantity.
    pub max_order_quantity: f64,
    /// Useful life of productive assets, in years.
    pub useful_life_years: u32,
    /// Markup applied when valuing finished goods over accrued cost.
    pub markup: f64,
    /// Range of the interval (ticks) at which the firm reviews its order
    /// history and adjusts labor.
    pub obs_interval_min: u32,
    pub obs_interval_max: u32,
    pub sector: Sector,
}

impl FirmClass {
    /// Mean order quantity when orders are drawn uniformly from
    /// `[floor_share * max, max)`.
    pub fn mean_order_quantity(&self, floor_share: f64) -> f64 {
        (1.0 + floor_share) / 2.0 * self.max_order_quantity
    }

    /// Mean order duration before any duration multiplier.
    pub fn mean_duration(&self) -> f64 {
        (self.duration_min + self.duration_max) as f64 / 2.0
    }
}

/// The built-in eight-class catalog.
pub fn builtin_catalog() -> Vec<FirmClass> {
    let class = |share,
                 labor_min,
                 labor_max,
                 capital_min,
                 capital_max,
                 duration_min,
                 duration_max,
                 recipe,
                 labor_productivity,
                 max_order_quantity,
                 markup,
                 obs_interval_min,
                 obs_interval_max,
                 sector| FirmClass {
        share,
        labor_min,
        labor_max,
        capital_min,
        capital_max,
        duration_min,
        duration_max,
        recipe,
        labor_productivity,
        max_order_quantity,
        useful_life_years: 12,
        markup,
        obs_interval_min,
        obs_interval_max,
        sector,
    };
    use Sector::{Consumption, Investment};
    vec![
        class(0.843, 1, 9, 100.0, 450.0, 1, 1, 50.0, 0.6, 6.0, 0.10, 5, 10, Consumption),
        class(0.094, 1, 9, 100.0, 450.0, 2, 4, 50.0, 0.6, 6.0, 0.10, 5, 10, Investment),
        class(0.034, 10, 49, 1200.0, 2400.0, 1, 1, 50.0, 0.7, 50.0, 0.30, 5, 10, Consumption),
        class(0.017, 10, 49, 1200.0, 2400.0, 2, 4, 50.0, 0.7, 50.0, 0.30, 5, 10, Investment),
        class(0.003, 50, 249, 8000.0, 16000.0, 2, 4, 70.0, 0.7, 250.0, 0.20, 10, 15, Consumption),
        class(0.003, 50, 249, 8000.0, 16000.0, 4, 8, 70.0, 0.7, 250.0, 0.20, 10, 15, Investment),
        class(0.003, 250, 1000, 30000.0, 70000.0, 6, 12, 80.0, 0.8, 500.0, 0.30, 15, 20, Consumption),
        class(0.003, 250, 1000, 30000.0, 70000.0, 12, 24, 80.0, 0.8, 500.0, 0.30, 15, 20, Investment),
    ]
}

/// Check catalog consistency: shares sum to one, ranges are ordered, rates
/// are positive.
pub fn validate_catalog(classes: &[FirmClass]) -> Result<(), SimError> {
    if classes.is_empty() {
        return Err(SimError::Catalog("catalog has no classes".into()));
    }
    let share_sum: f64 = classes.iter().map(|c| c.share).sum();
    if (share_sum - 1.0).abs() > 1e-9 {
        return Err(SimError::Catalog(format!(
            "class shares sum to {share_sum}, expected 1.0"
        )));
    }
    for (i, c) in classes.iter().enumerate() {
        let fail = |what: &str| Err(SimError::Catalog(format!("class {i}: {what}")));
        if c.share < 0.0 {
            return fail("negative share");
        }
        if c.labor_min > c.labor_max {
            return fail("labor_min > labor_max");
        }
        if c.capital_min > c.capital_max {
            return fail("capital_min > capital_max");
        }
        if c.duration_min > c.duration_max || c.duration_min == 0 {
            return fail("bad duration range");
        }
        if c.obs_interval_min > c.obs_interval_max || c.obs_interval_min == 0 {
            return fail("bad observation interval range");
        }
        if c.labor_productivity <= 0.0 || c.recipe <= 0.0 || c.max_order_quantity <= 0.0 {
            return fail("labor_productivity, recipe and max_order_quantity must be positive");
        }
        if c.useful_life_years == 0 {
            return fail("useful_life_years must be at least 1");
        }
    }
    Ok(())
}

/// Load a catalog override from a TOML file with a `[[classes]]` array.
pub fn load_catalog(path: &std::path::Path) -> Result<Vec<FirmClass>, SimError> {
    #[derive(Deserialize)]
    struct File {
        classes: Vec<FirmClass>,
    }
    let text = std::fs::read_to_string(path)?;
    let file: File =
        toml::from_str(&text).map_err(|e| SimError::Catalog(format!("{}: {e}", path.display())))?;
    validate_catalog(&file.classes)?;
    Ok(file.classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_matches_class_parameters() {
        let cat = builtin_catalog();
        assert_eq!(cat.len(), 8);

        let c1 = &cat[0];
        assert_eq!(c1.share, 0.843);
        assert_eq!(c1.labor_max, 9);
        assert_eq!(c1.duration_min, 1);
        assert_eq!(c1.duration_max, 1);
        assert_eq!(c1.recipe, 50.0);
        assert_eq!(c1.labor_productivity, 0.6);
        assert_eq!(c1.sector, Sector::Consumption);

        let c8 = &cat[7];
        assert_eq!(c8.duration_min, 12);
        assert_eq!(c8.duration_max, 24);
        assert_eq!(c8.sector, Sector::Investment);
        assert_eq!(c8.max_order_quantity, 500.0);
    }

    #[test]
    fn shares_sum_to_one() {
        // 0.843 + 0.094 + 0.034 + 0.017 + 4 * 0.003 = 1.000, added by hand.
        let sum: f64 = builtin_catalog().iter().map(|c| c.share).sum();
        assert!((sum - 1.0).abs() < 1e-12, "share sum {sum}");
        assert!(validate_catalog(&builtin_catalog()).is_ok());
    }

    #[test]
    fn validation_rejects_bad_shares() {
        let mut cat = builtin_catalog();
        cat[0].share = 0.5;
        assert!(matches!(validate_catalog(&cat), Err(SimError::Catalog(_))));
    }

    #[test]
    fn validation_rejects_inverted_ranges() {
        let mut cat = builtin_catalog();
        cat[2].labor_min = 100;
        assert!(validate_catalog(&cat).is_err());
    }

    #[test]
    fn catalog_roundtrips_through_toml() {
        let cat = builtin_catalog();
        let text = toml::to_string(&serde_json::json!({ "classes": cat })).unwrap();
        let dir = std::env::temp_dir().join("planecon-catalog-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("catalog.toml");
        std::fs::write(&path, text).unwrap();
        let loaded = load_catalog(&path).unwrap();
        assert_eq!(loaded.len(), 8);
        assert_eq!(loaded[7].max_order_quantity, 500.0);
    }
}
