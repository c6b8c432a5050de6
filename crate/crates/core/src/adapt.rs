//! Periodic labor adjustment and the per-tick capital adaptation rule.
//!
//! Labor follows demand: every firm reviews the orders it received over its
//! observation window and resizes the workforce to the implied parallel
//! workload. Capital follows labor through the recipe, but only by asking
//! the planner for deliveries: obsolescence is the only way down, purchases
//! the only way up. The firm tolerates a band of `±tolerance` around its
//! current capital quantity; inside the band it merely replaces obsolescence
//! losses, above it it asks for an increment on top, and below it it lets
//! part or all of the replacement lapse.

use serde::Serialize;

use crate::catalog::FirmClass;

#[derive(Debug, Clone, Copy)]
pub struct AdaptationParams {
    /// Half-width of the capital tolerance band, as a fraction.
    pub tolerance: f64,
    pub useful_life_years: u32,
    pub ticks_per_year: u32,
}

impl AdaptationParams {
    /// Per-tick obsolescence divisor: capital loses `1/(u*n)` of itself each
    /// tick, where `u` is the asset life in years and `n` the ticks per year.
    pub fn obsolescence_divisor(&self) -> f64 {
        (self.useful_life_years as f64) * (self.ticks_per_year as f64)
    }
}

/// What a firm asks the planner for in one tick: replacement of obsolescence
/// losses (substitutions) plus, when the desired stock exceeds the tolerance
/// band, an increment. Values are quantities priced at the firm's current
/// capital price.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct InvestmentRequest {
    pub firm: usize,
    pub substitution_qty: f64,
    pub increment_qty: f64,
    pub substitution_value: f64,
    pub increment_value: f64,
}

impl InvestmentRequest {
    pub fn total_qty(&self) -> f64 {
        self.substitution_qty + self.increment_qty
    }

    pub fn total_value(&self) -> f64 {
        self.substitution_value + self.increment_value
    }
}

/// Per-tick obsolescence of productive capital, returned as
/// `(value_loss, quantity_loss)`. Value and quantity are reduced
/// independently so the embedded mean price is untouched.
pub fn obsolescence(
    capital_value: f64,
    capital_qty: f64,
    params: &AdaptationParams,
) -> (f64, f64) {
    let divisor = params.obsolescence_divisor();
    (capital_value / divisor, capital_qty / divisor)
}

/// Round up, tolerating float dust from the division just below an integer.
fn ceil_snapped(x: f64) -> f64 {
    let rounded = x.round();
    if (x - rounded).abs() < 1e-9 {
        rounded
    } else {
        x.ceil()
    }
}

/// Desired workforce from the windowed order statistics: `mean_qty` is the
/// average quantity per received order, `mean_parallel` the average number
/// of orders that would run side by side if all received orders were
/// produced. Their product is the reference workload, converted to workers
/// through labor productivity and clamped to the class range.
pub fn desired_labor(mean_qty: f64, mean_parallel: f64, class: &FirmClass) -> u32 {
    let reference_qty = mean_qty * mean_parallel;
    let raw = ceil_snapped(reference_qty / class.labor_productivity);
    let clamped = raw.clamp(class.labor_min as f64, class.labor_max as f64);
    clamped as u32
}

/// Desired capital quantity implied by a workforce: the recipe converts
/// workers to capital value, the current capital price converts value to
/// quantity. The current price is the best available estimate of the price
/// the planner will deliver at.
pub fn desired_capital_qty(recipe: f64, labor: f64, capital_price: f64) -> f64 {
    recipe * labor / capital_price
}

/// Position of the desired capital quantity relative to the tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandPosition {
    BelowBand,
    WithinBand,
    AboveBand,
}

/// One tick of the capital adaptation rule, in quantity terms.
///
/// With `a = -obsolescence_qty` and the band
/// `[k_qty / (1 + tol), k_qty * (1 + tol)]` around the current stock:
///
/// * desired below the band: the wanted reduction `b = desired - band_min`
///   (negative) absorbs obsolescence first; substitutions only make up the
///   part of the loss the reduction does not cover.
/// * desired within the band: substitutions replace the full loss.
/// * desired above the band: full substitutions plus an increment up to the
///   band top.
pub fn plan_capital(
    k_qty: f64,
    desired_qty: f64,
    obsolescence_qty: f64,
    tolerance: f64,
) -> (f64, f64, BandPosition) {
    let band_min = k_qty / (1.0 + tolerance);
    let band_max = k_qty * (1.0 + tolerance);
    let a = -obsolescence_qty;
    if desired_qty < band_min {
        let b = desired_qty - band_min;
        let substitution = if b <= a { 0.0 } else { a.abs() - b.abs() };
        (substitution, 0.0, BandPosition::BelowBand)
    } else if desired_qty <= band_max {
        (a.abs(), 0.0, BandPosition::WithinBand)
    } else {
        (a.abs(), desired_qty - band_max, BandPosition::AboveBand)
    }
}
