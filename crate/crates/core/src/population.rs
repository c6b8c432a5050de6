//! Initial firm population and economy-wide calibration constants.

use rand::Rng;

use crate::catalog::{FirmClass, Sector};
use crate::config::ScenarioConfig;
use crate::firm::Firm;
use crate::planner::FlowTargets;
use crate::rng;

/// Initial price of capital goods: the share-weighted unit production cost
/// of the investment-goods classes (wages plus per-tick capital compensation
/// per unit of output) uplifted by their markup.
pub fn initial_capital_price(
    classes: &[FirmClass],
    wage: f64,
    capital_rate_per_tick: f64,
) -> f64 {
    let mut weighted = 0.0;
    let mut share_sum = 0.0;
    for class in classes.iter().filter(|c| c.sector == Sector::Investment) {
        let unit_cost = (wage + class.recipe * capital_rate_per_tick) / class.labor_productivity;
        weighted += class.share * unit_cost * (1.0 + class.markup);
        share_sum += class.share;
    }
    if share_sum > 0.0 {
        weighted / share_sum
    } else {
        1.0
    }
}

/// Firm counts per class: largest-remainder apportionment of the shares,
/// then every class is guaranteed at least one firm (taken from the largest
/// class) so small populations still cover the catalog.
pub fn class_counts(classes: &[FirmClass], n_firms: usize) -> Vec<usize> {
    if n_firms == 0 {
        return vec![0; classes.len()];
    }
    let mut counts: Vec<usize> = classes
        .iter()
        .map(|c| (c.share * n_firms as f64).floor() as usize)
        .collect();
    let assigned: usize = counts.iter().sum();
    let mut remainders: Vec<(usize, f64)> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.share * n_firms as f64 - counts[i] as f64))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..n_firms.saturating_sub(assigned) {
        counts[remainders[k % remainders.len()].0] += 1;
    }
    // Force every class to be represented while it fits.
    if n_firms >= classes.len() {
        for i in 0..counts.len() {
            while counts[i] == 0 {
                let donor = counts
                    .iter()
                    .enumerate()
                    .max_by_key(|(_, &c)| c)
                    .map(|(j, _)| j)
                    .unwrap();
                if counts[donor] <= 1 {
                    break;
                }
                counts[donor] -= 1;
                counts[i] += 1;
            }
        }
    }
    counts
}

/// Expected order flow per sector: a configurable fraction of the sector's
/// aggregate output capacity with every firm at its class maximum, plus the
/// mean order quantity of each sector's class mix (used to convert flows to
/// order counts).
pub fn flow_targets(
    classes: &[FirmClass],
    counts: &[usize],
    flow_capacity_ratio: f64,
    order_floor_share: f64,
) -> FlowTargets {
    let mut targets = FlowTargets::default();
    let mut firms = [0usize; 2];
    let mut qty_sum = [0.0f64; 2];
    for (class, &count) in classes.iter().zip(counts) {
        let sector = match class.sector {
            Sector::Consumption => 0,
            Sector::Investment => 1,
        };
        let capacity = count as f64 * class.labor_max as f64 * class.labor_productivity;
        match sector {
            0 => targets.consumption += capacity,
            _ => targets.investment += capacity,
        }
        firms[sector] += count;
        qty_sum[sector] += count as f64 * class.mean_order_quantity(order_floor_share);
    }
    targets.consumption *= flow_capacity_ratio;
    targets.investment *= flow_capacity_ratio;
    if firms[0] > 0 {
        targets.mean_qty_consumption = qty_sum[0] / firms[0] as f64;
    }
    if firms[1] > 0 {
        targets.mean_qty_investment = qty_sum[1] / firms[1] as f64;
    }
    targets
}

/// Build the firm population: class counts by largest remainder, sizes drawn
/// uniformly from the class ranges and scaled down by the undersizing
/// factor, capital quantity converted at the initial capital price.
pub fn build_population(
    config: &ScenarioConfig,
    classes: &[FirmClass],
    initial_price: f64,
) -> Vec<Firm> {
    let counts = class_counts(classes, config.n_firms);
    let mut firms = Vec::with_capacity(config.n_firms);
    for (class_idx, (class, &count)) in classes.iter().zip(&counts).enumerate() {
        let recipe_qty = class.recipe / initial_price;
        for _ in 0..count {
            let id = firms.len();
            let mut r = rng::stream(config.seed, id as u64, rng::BUILD_TICK);
            let labor_draw = r.random_range(class.labor_min..=class.labor_max) as f64;
            let labor = (config.undersizing * labor_draw).round().max(1.0);
            let capital_draw =
                class.capital_min + r.random::<f64>() * (class.capital_max - class.capital_min);
            let capital_value = config.undersizing * capital_draw;
            let capital_qty = capital_value / initial_price;
            let obs_interval = r.random_range(class.obs_interval_min..=class.obs_interval_max);
            firms.push(Firm::new(
                id,
                class_idx,
                class,
                recipe_qty,
                labor,
                capital_value,
                capital_qty,
                obs_interval,
            ));
        }
    }
    firms
}
