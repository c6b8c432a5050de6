//! The central planner: the entire demand side of the economy.
//!
//! Each cycle the planner diffuses production orders to both sectors at a
//! constant expected total flow (a policy distortion can tilt the mix
//! between investment and consumption without changing the total), buys
//! firms' finished goods, and hands investment goods back to firms under
//! one of four distribution policies. Investment goods bought in one cycle
//! become distributable stock the next cycle.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::adapt::InvestmentRequest;
use crate::catalog::{FirmClass, Sector};
use crate::error::SimError;
use crate::firm::Order;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionPolicy {
    /// Nothing is distributed, whatever firms ask for.
    Zero,
    /// Every request is served in full, importing whatever the stock lacks.
    Total,
    /// Each request is served a uniform random fraction, ignoring the stock.
    Random,
    /// Requests are scaled down so the total never exceeds the stock.
    Proportional,
}

impl std::str::FromStr for DistributionPolicy {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "zero" => Ok(Self::Zero),
            "total" => Ok(Self::Total),
            "random" => Ok(Self::Random),
            "proportional" => Ok(Self::Proportional),
            other => Err(SimError::Config(format!(
                "unknown policy `{other}` (expected zero|total|random|proportional)"
            ))),
        }
    }
}

/// Per-scenario planner behavior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyParams {
    pub distribution: DistributionPolicy,
    /// Signed tilt of the order flow: the investment-sector flow is scaled
    /// by `1 + distortion` and the consumption flow rescaled so the total is
    /// unchanged. Positive favors industry, negative favors consumption.
    pub order_distortion: f64,
    /// Multiplies every drawn order duration.
    pub duration_multiplier: u32,
    /// Per-process, per-tick failure hazard.
    pub failure_probability: f64,
    /// Orders are drawn uniformly from `[floor_share * max, max)` of the
    /// target class.
    pub order_floor_share: f64,
    /// Expected order flow per sector, as a fraction of the sector's
    /// aggregate capacity at full class sizing.
    pub flow_capacity_ratio: f64,
    /// Half-width of the uniform purchase fluctuation.
    pub purchase_noise: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            distribution: DistributionPolicy::Proportional,
            order_distortion: 0.0,
            duration_multiplier: 1,
            failure_probability: 0.05,
            order_floor_share: 0.5,
            flow_capacity_ratio: 0.85,
            purchase_noise: 0.1,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.order_floor_share > 0.0 && self.order_floor_share < 1.0) {
            return Err(SimError::Config(format!(
                "order_floor_share must lie in (0, 1), got {}",
                self.order_floor_share
            )));
        }
        if !(0.0..=1.0).contains(&self.failure_probability) {
            return Err(SimError::Config(format!(
                "failure_probability must lie in [0, 1], got {}",
                self.failure_probability
            )));
        }
        if self.duration_multiplier == 0 {
            return Err(SimError::Config("duration_multiplier must be at least 1".into()));
        }
        if self.order_distortion < -1.0 {
            return Err(SimError::Config(format!(
                "order_distortion must be >= -1, got {}",
                self.order_distortion
            )));
        }
        if self.flow_capacity_ratio <= 0.0 {
            return Err(SimError::Config("flow_capacity_ratio must be positive".into()));
        }
        if self.purchase_noise < 0.0 || self.purchase_noise >= 1.0 {
            return Err(SimError::Config(format!(
                "purchase_noise must lie in [0, 1), got {}",
                self.purchase_noise
            )));
        }
        Ok(())
    }
}

/// Expected order flows per sector, fixed at population build time.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlowTargets {
    /// Quantity per tick directed at consumption-goods producers.
    pub consumption: f64,
    /// Quantity per tick directed at investment-goods producers.
    pub investment: f64,
    /// Mean order quantity over the consumption firm mix.
    pub mean_qty_consumption: f64,
    /// Mean order quantity over the investment firm mix.
    pub mean_qty_investment: f64,
}

impl FlowTargets {
    /// Sector flows after the distortion tilt; the total is preserved.
    pub fn distorted(&self, distortion: f64) -> (f64, f64) {
        let investment = self.investment * (1.0 + distortion);
        let consumption = self.consumption - distortion * self.investment;
        (consumption.max(0.0), investment.max(0.0))
    }
}

/// Planner state carried across ticks.
#[derive(Debug, Clone)]
pub struct Planner {
    /// Investment goods bought last cycle and not yet distributed.
    pub stock_qty: f64,
    pub stock_value: f64,
    /// Unit price of the last goods that entered the stock; used to value
    /// deliveries when the stock is empty (imports).
    pub last_stock_price: f64,
    /// Cumulative value of firm investment requests the planner left
    /// unsatisfied.
    pub gross_inv_expected_value: f64,
    /// Cumulative value of deliveries conjured beyond the stock under the
    /// Total and Random policies.
    pub imports_value: f64,
    pub next_order_id: u64,
    pub flows: FlowTargets,
}

impl Planner {
    pub fn new(initial_price: f64, flows: FlowTargets) -> Self {
        Planner {
            stock_qty: 0.0,
            stock_value: 0.0,
            last_stock_price: initial_price,
            gross_inv_expected_value: 0.0,
            imports_value: 0.0,
            next_order_id: 0,
            flows,
        }
    }

    pub fn stock_price(&self) -> f64 {
        if self.stock_qty > 1e-12 {
            self.stock_value / self.stock_qty
        } else {
            self.last_stock_price
        }
    }

    /// Book a purchase of investment goods into next cycle's stock.
    pub fn buy_investment_goods(&mut self, qty: f64, value: f64) {
        if qty <= 0.0 {
            return;
        }
        self.stock_qty += qty;
        self.stock_value += value;
        self.last_stock_price = self.stock_value / self.stock_qty;
    }
}

/// Draw one order quantity, uniform on `[floor_share * max, max)`.
pub fn draw_order_quantity(class: &FirmClass, floor_share: f64, rng: &mut ChaCha8Rng) -> f64 {
    let max = class.max_order_quantity;
    let lo = floor_share * max;
    lo + rng.random::<f64>() * (max - lo)
}

/// Draw one order duration: integer uniform over the class range, then
/// stretched by the scenario multiplier.
pub fn draw_order_duration(
    class: &FirmClass,
    duration_multiplier: u32,
    rng: &mut ChaCha8Rng,
) -> u32 {
    rng.random_range(class.duration_min..=class.duration_max) * duration_multiplier
}

/// Generate one cycle of production orders.
///
/// The number of orders per sector is Poisson with mean chosen so the
/// expected quantity flow hits the (possibly distorted) sector target; each
/// order goes to a firm picked uniformly within the sector and is sized by
/// that firm's class.
pub fn generate_cycle_orders(
    planner: &mut Planner,
    classes: &[FirmClass],
    firm_classes: &[usize],
    firms_by_sector: &[Vec<usize>; 2],
    policy: &PolicyParams,
    tick: u64,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, Order)> {
    let (flow_c, flow_i) = planner.flows.distorted(policy.order_distortion);
    let mut orders = Vec::new();
    for (sector_idx, (flow, mean_qty)) in [
        (flow_c, planner.flows.mean_qty_consumption),
        (flow_i, planner.flows.mean_qty_investment),
    ]
    .into_iter()
    .enumerate()
    {
        let firms = &firms_by_sector[sector_idx];
        if firms.is_empty() || flow <= 0.0 || mean_qty <= 0.0 {
            continue;
        }
        let sector = if sector_idx == 0 { Sector::Consumption } else { Sector::Investment };
        let expected_orders = flow / mean_qty;
        let count = Poisson::new(expected_orders)
            .map(|p| p.sample(rng))
            .unwrap_or(0.0) as u64;
        for _ in 0..count {
            let firm = firms[rng.random_range(0..firms.len())];
            let class = &classes[firm_classes[firm]];
            let order = Order {
                id: planner.next_order_id,
                quantity: draw_order_quantity(class, policy.order_floor_share, rng),
                duration: draw_order_duration(class, policy.duration_multiplier, rng),
                sector,
                issued_tick: tick,
            };
            planner.next_order_id += 1;
            orders.push((firm, order));
        }
    }
    orders
}

/// Outcome of one distribution round.
#[derive(Debug, Clone, Default)]
pub struct DistributionOutcome {
    /// Quantity allocated per request, same order as the input slice.
    pub allocations: Vec<f64>,
    /// Quantity drawn from the stock.
    pub from_stock_qty: f64,
    pub from_stock_value: f64,
    /// Quantity conjured beyond the stock (Total/Random policies).
    pub imported_qty: f64,
    pub imported_value: f64,
    /// Value of requests left unsatisfied this tick.
    pub unsatisfied_value: f64,
}

/// Allocate investment goods to firm requests under the active policy.
///
/// Proportional never exceeds the stock at hand; Total and Random ignore it,
/// flooring the stock at zero and booking the shortfall as imports.
pub fn distribute_investment_goods(
    planner: &mut Planner,
    requests: &[InvestmentRequest],
    policy: DistributionPolicy,
    rng: &mut ChaCha8Rng,
) -> Result<DistributionOutcome, SimError> {
    let mut total_requested = 0.0;
    for r in requests {
        if r.substitution_qty < 0.0 || r.increment_qty < 0.0 {
            return Err(SimError::NegativeRequest {
                firm: r.firm,
                quantity: r.total_qty(),
            });
        }
        total_requested += r.total_qty();
    }

    let price = planner.stock_price();
    let mut allocations = Vec::with_capacity(requests.len());
    match policy {
        DistributionPolicy::Zero => {
            allocations.resize(requests.len(), 0.0);
        }
        DistributionPolicy::Total => {
            allocations.extend(requests.iter().map(|r| r.total_qty()));
        }
        DistributionPolicy::Random => {
            allocations.extend(requests.iter().map(|r| rng.random::<f64>() * r.total_qty()));
        }
        DistributionPolicy::Proportional => {
            let scale = if total_requested > 0.0 {
                (planner.stock_qty / total_requested).min(1.0)
            } else {
                0.0
            };
            let mut remaining = planner.stock_qty;
            allocations.extend(requests.iter().map(|r| {
                let alloc = (r.total_qty() * scale).min(remaining);
                remaining -= alloc;
                alloc
            }));
        }
    }

    let mut outcome = DistributionOutcome {
        allocations,
        ..Default::default()
    };
    let mut unsatisfied = 0.0;
    for (r, &alloc) in requests.iter().zip(&outcome.allocations) {
        let requested = r.total_qty();
        if requested > alloc {
            // Value the shortfall at the price the firm planned with.
            let request_price = if requested > 0.0 {
                r.total_value() / requested
            } else {
                0.0
            };
            unsatisfied += (requested - alloc) * request_price;
        }
        let from_stock = alloc.min(planner.stock_qty);
        planner.stock_qty -= from_stock;
        planner.stock_value -= from_stock * price;
        outcome.from_stock_qty += from_stock;
        outcome.from_stock_value += from_stock * price;
        let imported = alloc - from_stock;
        if imported > 0.0 {
            outcome.imported_qty += imported;
            outcome.imported_value += imported * price;
        }
    }
    if planner.stock_qty < 1e-9 {
        planner.stock_qty = 0.0;
        planner.stock_value = 0.0;
    }
    outcome.unsatisfied_value = unsatisfied;
    planner.gross_inv_expected_value += unsatisfied;
    planner.imports_value += outcome.imported_value;
    Ok(outcome)
}
