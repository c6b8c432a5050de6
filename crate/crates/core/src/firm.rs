//! Firm-side production.
//!
//! A firm's output capacity is bounded by whichever factor binds: workers
//! times labor productivity, or the worker-equivalents its capital stock can
//! equip through the recipe. Orders whose quantity exceeds total capacity
//! are rejected outright; accepted orders start immediately when enough
//! factors are free and otherwise wait in a FIFO queue. Running processes
//! lock factors in proportion to their output rate, so several orders of
//! different durations overlap within one firm.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adapt::{self, AdaptationParams, InvestmentRequest};
use crate::catalog::{FirmClass, Sector};

/// Slack for float comparisons on factor locks.
const LOCK_EPS: f64 = 1e-9;

/// A production task diffused by the planner.
#[derive(Debug, Clone, Serialize)]
pub struct Order {
    pub id: u64,
    pub quantity: f64,
    pub duration: u32,
    pub sector: Sector,
    pub issued_tick: u64,
}

/// A running order: factors locked, cost accruing tick by tick.
#[derive(Debug, Clone)]
pub struct Process {
    pub order_id: u64,
    pub quantity: f64,
    pub remaining: u32,
    pub labor_locked: f64,
    pub capital_qty_locked: f64,
    pub cost_accrued: f64,
}

/// Order intake outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intake {
    Started,
    Queued,
    Rejected,
}

/// An entry of the received-order history used for factor adaptation.
#[derive(Debug, Clone, Copy)]
pub struct ReceivedOrder {
    pub tick: u64,
    pub quantity: f64,
    pub duration: u32,
}

/// Cumulative income-statement accumulators.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct IncomeTotals {
    pub wages: f64,
    pub capital_compensation: f64,
    pub substitutions: f64,
    pub revenues: f64,
    pub write_offs: f64,
    pub profit: f64,
}

/// One tick's income-statement line items.
#[derive(Debug, Clone, Copy, Default)]
pub struct Statement {
    pub wages: f64,
    pub capital_compensation: f64,
    pub substitutions: f64,
    pub write_offs: f64,
    pub revenues: f64,
    pub profit: f64,
}

/// Per-tick stock-flow atoms. Both sides of the national-accounts identity
/// are computed from these same numbers, so the identity holds to float
/// regrouping error.
#[derive(Debug, Clone, Copy, Default)]
pub struct TickFlows {
    /// Cost accrued into work in progress this tick.
    pub accrued: f64,
    /// Valuation gain when finished goods enter inventory above cost.
    pub markup_gain: f64,
    /// WIP written off by process failures.
    pub write_off: f64,
    /// Inventory value released to the planner.
    pub released_value: f64,
    /// What the planner paid for it.
    pub revenue: f64,
    /// Substitution cost booked on delivery of investment goods.
    pub substitution_value: f64,
    /// Value of investment goods delivered to this firm.
    pub delivered_value: f64,
    pub sold_qty: f64,
    pub concluded_qty: f64,
    pub accepted: u32,
    pub rejected: u32,
    pub failures: u32,
    pub completions: u32,
}

impl TickFlows {
    /// The firm's value added this tick: sales premium over released
    /// inventory, plus inventory build-up at valuation, net of write-offs.
    pub fn value_added(&self) -> f64 {
        self.revenue - self.released_value + self.markup_gain + self.accrued - self.write_off
    }
}

#[derive(Debug, Clone)]
pub struct Firm {
    pub id: usize,
    pub class_idx: usize,
    pub sector: Sector,
    // Class constants copied out for hot access.
    pub labor_productivity: f64,
    /// Capital value per worker (recipe).
    pub recipe: f64,
    /// Capital quantity per worker: recipe converted at the economy's
    /// initial capital price.
    pub recipe_qty: f64,
    pub markup: f64,

    /// Whole workers on payroll. Process locks may use fractions of them.
    pub labor: f64,
    pub capital_value: f64,
    pub capital_qty: f64,

    pub queue: VecDeque<Order>,
    pub running: Vec<Process>,

    pub finished_value: f64,
    pub finished_qty: f64,
    pub wip_value: f64,

    pub received: VecDeque<ReceivedOrder>,
    /// Ticks between labor reviews, drawn once per firm.
    pub obs_interval: u32,

    pub income: IncomeTotals,
    /// Substitution quantity requested this tick, consumed by delivery.
    pub pending_substitution_qty: f64,
    /// This tick's flow atoms; reset at tick start.
    pub flows: TickFlows,
}

impl Firm {
    pub fn new(
        id: usize,
        class_idx: usize,
        class: &FirmClass,
        recipe_qty: f64,
        labor: f64,
        capital_value: f64,
        capital_qty: f64,
        obs_interval: u32,
    ) -> Self {
        Firm {
            id,
            class_idx,
            sector: class.sector,
            labor_productivity: class.labor_productivity,
            recipe: class.recipe,
            recipe_qty,
            markup: class.markup,
            labor,
            capital_value,
            capital_qty,
            queue: VecDeque::new(),
            running: Vec::new(),
            finished_value: 0.0,
            finished_qty: 0.0,
            wip_value: 0.0,
            received: VecDeque::new(),
            obs_interval,
            income: IncomeTotals::default(),
            pending_substitution_qty: 0.0,
            flows: TickFlows::default(),
        }
    }

    pub fn locked_labor(&self) -> f64 {
        self.running.iter().map(|p| p.labor_locked).sum()
    }

    pub fn locked_capital_qty(&self) -> f64 {
        self.running.iter().map(|p| p.capital_qty_locked).sum()
    }

    /// Output quantity per tick the firm can sustain: labor and capital are
    /// mutually required, so the scarcer factor caps the rate.
    pub fn capacity(&self) -> f64 {
        let worker_equivalents = self.labor.min(self.capital_qty / self.recipe_qty);
        self.labor_productivity * worker_equivalents
    }

    /// Implicit mean price of the capital stock, when there is one.
    pub fn capital_price(&self) -> Option<f64> {
        if self.capital_qty > 1e-12 {
            Some(self.capital_value / self.capital_qty)
        } else {
            None
        }
    }

    pub fn reset_tick(&mut self) {
        self.flows = TickFlows::default();
    }

    /// Take in one order: record it, then reject it if its quantity exceeds
    /// total capacity, start it if enough factors are free, queue it
    /// otherwise.
    pub fn receive_order(&mut self, order: Order, tick: u64) -> Intake {
        self.received.push_back(ReceivedOrder {
            tick,
            quantity: order.quantity,
            duration: order.duration,
        });
        if order.quantity > self.capacity() {
            self.flows.rejected += 1;
            return Intake::Rejected;
        }
        self.flows.accepted += 1;
        if self.try_start(&order) {
            Intake::Started
        } else {
            self.queue.push_back(order);
            Intake::Queued
        }
    }

    /// Start an order if the free factors cover its rate; locks are
    /// proportional so the recipe binds per process.
    fn try_start(&mut self, order: &Order) -> bool {
        let labor_need = order.quantity / (order.duration as f64 * self.labor_productivity);
        let capital_need = labor_need * self.recipe_qty;
        let free_labor = self.labor - self.locked_labor();
        let free_capital = self.capital_qty - self.locked_capital_qty();
        if labor_need <= free_labor + LOCK_EPS && capital_need <= free_capital + LOCK_EPS {
            self.running.push(Process {
                order_id: order.id,
                quantity: order.quantity,
                remaining: order.duration,
                labor_locked: labor_need,
                capital_qty_locked: capital_need,
                cost_accrued: 0.0,
            });
            true
        } else {
            false
        }
    }

    /// Start queued orders in FIFO discipline; the head blocks.
    pub fn advance_queue(&mut self) -> u32 {
        let mut started = 0;
        while let Some(front) = self.queue.front() {
            let order = front.clone();
            if self.try_start(&order) {
                self.queue.pop_front();
                started += 1;
            } else {
                break;
            }
        }
        started
    }

    /// One tick for every running process: accrue the cost of the locked
    /// factors, roll the failure hazard, count down. Failed processes free
    /// their factors and write their WIP off.
    pub fn step_processes(
        &mut self,
        failure_probability: f64,
        wage: f64,
        capital_rate_per_tick: f64,
        rng: &mut ChaCha8Rng,
    ) {
        let price = self.capital_price().unwrap_or(0.0);
        let mut i = 0;
        while i < self.running.len() {
            let p = &mut self.running[i];
            let tick_cost =
                wage * p.labor_locked + capital_rate_per_tick * (p.capital_qty_locked * price);
            p.cost_accrued += tick_cost;
            self.wip_value += tick_cost;
            self.flows.accrued += tick_cost;

            let failed = rng.random::<f64>() < failure_probability;
            if failed {
                let p = self.running.swap_remove(i);
                self.wip_value -= p.cost_accrued;
                self.flows.write_off += p.cost_accrued;
                self.flows.failures += 1;
            } else {
                p.remaining = p.remaining.saturating_sub(1);
                i += 1;
            }
        }
        if self.wip_value < 0.0 {
            self.wip_value = 0.0;
        }
    }

    /// Move completed processes into finished-goods inventory, valued at
    /// accrued cost plus the class markup, then let the queue advance into
    /// the freed factors.
    pub fn conclude_production(&mut self) {
        let mut i = 0;
        while i < self.running.len() {
            if self.running[i].remaining == 0 {
                let p = self.running.swap_remove(i);
                let value = p.cost_accrued * (1.0 + self.markup);
                self.finished_qty += p.quantity;
                self.finished_value += value;
                self.wip_value -= p.cost_accrued;
                self.flows.markup_gain += value - p.cost_accrued;
                self.flows.concluded_qty += p.quantity;
                self.flows.completions += 1;
            } else {
                i += 1;
            }
        }
        if self.wip_value < 0.0 {
            self.wip_value = 0.0;
        }
        self.advance_queue();
    }

    /// Windowed statistics of received orders: mean quantity per order and
    /// the mean number of orders that would run in parallel had all of them
    /// been produced. `None` when the window saw no orders.
    pub fn order_signal(&mut self, tick: u64) -> Option<(f64, f64)> {
        let window = self.obs_interval as u64;
        while let Some(front) = self.received.front() {
            if front.tick + window <= tick {
                self.received.pop_front();
            } else {
                break;
            }
        }
        if self.received.is_empty() {
            return None;
        }
        let count = self.received.len() as f64;
        let qty_sum: f64 = self.received.iter().map(|r| r.quantity).sum();
        let duration_sum: f64 = self.received.iter().map(|r| r.duration as f64).sum();
        Some((qty_sum / count, duration_sum / window as f64))
    }

    /// Set the workforce, never firing workers that are locked in running
    /// processes.
    pub fn adjust_labor(&mut self, desired: u32) {
        let floor = self.locked_labor().ceil();
        self.labor = (desired as f64).max(floor);
    }

    /// One tick of capital adaptation: compute obsolescence on the current
    /// stock, classify the desired stock against the tolerance band, then
    /// apply the obsolescence loss. Returns the investment request handed to
    /// the planner.
    pub fn adapt_capital(
        &mut self,
        params: &AdaptationParams,
        fallback_price: f64,
    ) -> InvestmentRequest {
        let (value_loss, qty_loss) =
            adapt::obsolescence(self.capital_value, self.capital_qty, params);
        let price = self.capital_price().unwrap_or(fallback_price);
        let desired_qty = adapt::desired_capital_qty(self.recipe, self.labor, price);
        let (substitution_qty, increment_qty, _) =
            adapt::plan_capital(self.capital_qty, desired_qty, qty_loss, params.tolerance);

        self.capital_value = (self.capital_value - value_loss).max(0.0);
        self.capital_qty = (self.capital_qty - qty_loss).max(0.0);
        // Capital in use deteriorates like idle capital; shrink the locks so
        // they keep fitting inside the stock.
        let factor = 1.0 - 1.0 / params.obsolescence_divisor();
        for p in &mut self.running {
            p.capital_qty_locked *= factor;
        }

        self.pending_substitution_qty = substitution_qty;
        InvestmentRequest {
            firm: self.id,
            substitution_qty,
            increment_qty,
            substitution_value: substitution_qty * price,
            increment_value: increment_qty * price,
        }
    }

    /// Book a delivery of investment goods: quantity and value join the
    /// stock (the implicit price blends in), substitutions are covered
    /// before increments, and only the substitution part is a current cost.
    pub fn apply_delivery(&mut self, qty: f64, price: f64) {
        if qty <= 0.0 {
            return;
        }
        self.capital_qty += qty;
        self.capital_value += qty * price;
        let substitution_part = qty.min(self.pending_substitution_qty);
        self.pending_substitution_qty -= substitution_part;
        self.flows.substitution_value += substitution_part * price;
        self.flows.delivered_value += qty * price;
    }

    /// Sell finished goods to the planner. The paid value carries the
    /// fluctuation `1 + noise`; the quantity handed over is clamped to the
    /// inventory. Returns `(quantity, paid_value)`.
    pub fn sell_finished(&mut self, noise: f64) -> (f64, f64) {
        if self.finished_qty <= 0.0 {
            return (0.0, 0.0);
        }
        let factor = 1.0 + noise;
        let paid = self.finished_value * factor;
        let qty = (self.finished_qty * factor).min(self.finished_qty);
        let released = if qty >= self.finished_qty {
            self.finished_value
        } else {
            self.finished_value * factor
        };
        self.finished_qty -= qty;
        self.finished_value -= released;
        if self.finished_qty < 1e-12 {
            self.finished_qty = 0.0;
        }
        if self.finished_value < 1e-12 {
            self.finished_value = 0.0;
        }
        self.flows.revenue += paid;
        self.flows.released_value += released;
        self.flows.sold_qty += qty;
        (qty, paid)
    }

    /// Close the tick's income statement and fold it into the cumulative
    /// totals.
    pub fn close_statement(&mut self, wage: f64, capital_rate_per_tick: f64) -> Statement {
        let statement = Statement {
            wages: self.labor * wage,
            capital_compensation: self.capital_value * capital_rate_per_tick,
            substitutions: self.flows.substitution_value,
            write_offs: self.flows.write_off,
            revenues: self.flows.revenue,
            profit: 0.0,
        };
        let profit = statement.revenues
            - statement.wages
            - statement.capital_compensation
            - statement.substitutions
            - statement.write_offs;
        self.income.wages += statement.wages;
        self.income.capital_compensation += statement.capital_compensation;
        self.income.substitutions += statement.substitutions;
        self.income.revenues += statement.revenues;
        self.income.write_offs += statement.write_offs;
        self.income.profit += profit;
        Statement { profit, ..statement }
    }

    /// Debug sweep of the module invariants.
    pub fn check_invariants(&self) -> Result<(), String> {
        let tol = 1e-6;
        if self.labor < 0.0 || self.capital_value < -tol || self.capital_qty < -tol {
            return Err(format!("firm {}: negative factor stock", self.id));
        }
        if let Some(price) = self.capital_price() {
            if !price.is_finite() || price <= 0.0 {
                return Err(format!("firm {}: bad capital price {price}", self.id));
            }
        }
        let locked_l = self.locked_labor();
        if locked_l > self.labor + tol {
            return Err(format!(
                "firm {}: locked labor {locked_l} exceeds workforce {}",
                self.id, self.labor
            ));
        }
        let locked_k = self.locked_capital_qty();
        if locked_k > self.capital_qty + tol.max(self.capital_qty * 1e-9) {
            return Err(format!(
                "firm {}: locked capital {locked_k} exceeds stock {}",
                self.id, self.capital_qty
            ));
        }
        let wip: f64 = self.running.iter().map(|p| p.cost_accrued).sum();
        if (wip - self.wip_value).abs() > tol.max(wip * 1e-9) {
            return Err(format!(
                "firm {}: WIP ledger {} != accrued {}",
                self.id, self.wip_value, wip
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;
    use crate::rng;

    fn test_firm(class_idx: usize, labor: f64, capital_value: f64, price: f64) -> Firm {
        let cat = builtin_catalog();
        let class = &cat[class_idx];
        Firm::new(
            0,
            class_idx,
            class,
            class.recipe / price,
            labor,
            capital_value,
            capital_value / price,
            class.obs_interval_min,
        )
    }

    fn order(id: u64, quantity: f64, duration: u32) -> Order {
        Order {
            id,
            quantity,
            duration,
            sector: Sector::Consumption,
            issued_tick: 0,
        }
    }

    #[test]
    fn capacity_is_min_of_factors() {
        // Class 3 productivity 0.7; ample capital leaves labor binding.
        let firm = test_firm(2, 10.0, 1e9, 1.0);
        assert!((firm.capacity() - 7.0).abs() < 1e-9);

        // No capital: labor alone is useless.
        let mut broke = test_firm(2, 10.0, 0.0, 1.0);
        broke.capital_qty = 0.0;
        assert_eq!(broke.capacity(), 0.0);

        // No labor.
        let idle = test_firm(2, 0.0, 1e9, 1.0);
        assert_eq!(idle.capacity(), 0.0);
    }

    #[test]
    fn oversized_orders_are_rejected() {
        let mut firm = test_firm(0, 9.0, 1e9, 1.0); // capacity 5.4
        assert_eq!(firm.receive_order(order(1, 5.0, 1), 0), Intake::Started);
        assert_eq!(firm.receive_order(order(2, 5.5, 1), 0), Intake::Rejected);
        assert_eq!(firm.flows.accepted, 1);
        assert_eq!(firm.flows.rejected, 1);
        // Rejected orders still enter the received history.
        assert_eq!(firm.received.len(), 2);
    }

    #[test]
    fn orders_queue_when_factors_are_busy() {
        let mut firm = test_firm(0, 9.0, 1e9, 1.0);
        // Saturate: 5.4 quantity at duration 1 locks all 9 workers.
        assert_eq!(firm.receive_order(order(1, 5.4, 1), 0), Intake::Started);
        assert_eq!(firm.receive_order(order(2, 3.0, 1), 0), Intake::Queued);
        assert_eq!(firm.queue.len(), 1);

        // Completing the first order lets the queue advance.
        let mut r = rng::stream(1, 0, 0);
        firm.step_processes(0.0, 1.0, 0.1 / 12.0, &mut r);
        firm.conclude_production();
        assert!(firm.queue.is_empty());
        assert_eq!(firm.running.len(), 1);
    }

    #[test]
    fn processes_overlap_within_capacity() {
        let mut firm = test_firm(7, 1000.0, 8e4, 1.0); // class 8
        for i in 0..3 {
            assert_eq!(firm.receive_order(order(i, 400.0, 20), 0), Intake::Started);
        }
        assert_eq!(firm.running.len(), 3);
        assert!(firm.locked_labor() <= firm.labor);
    }

    #[test]
    fn failure_probability_zero_never_fails() {
        let mut firm = test_firm(0, 9.0, 1e9, 1.0);
        firm.receive_order(order(1, 3.0, 3), 0);
        let mut r = rng::stream(1, 0, 0);
        for _ in 0..3 {
            firm.step_processes(0.0, 1.0, 0.1 / 12.0, &mut r);
        }
        assert_eq!(firm.flows.failures, 0);
        firm.conclude_production();
        assert_eq!(firm.flows.completions, 1);
    }

    #[test]
    fn failure_probability_one_fails_on_first_tick() {
        let mut firm = test_firm(0, 9.0, 1e9, 1.0);
        firm.receive_order(order(1, 3.0, 3), 0);
        let mut r = rng::stream(1, 0, 0);
        firm.step_processes(1.0, 1.0, 0.1 / 12.0, &mut r);
        assert_eq!(firm.flows.failures, 1);
        assert!(firm.running.is_empty());
        assert_eq!(firm.wip_value, 0.0);
        assert!(firm.flows.write_off > 0.0);
    }

    #[test]
    fn conclusion_values_output_at_cost_plus_markup() {
        // Class 1 markup 0.10; 1-tick order of quantity 3.
        let mut firm = test_firm(0, 9.0, 450.0, 1.0);
        firm.receive_order(order(1, 3.0, 1), 0);
        let mut r = rng::stream(1, 0, 0);
        firm.step_processes(0.0, 1.0, 0.1 / 12.0, &mut r);
        let cost = firm.wip_value;
        assert!(cost > 0.0);
        firm.conclude_production();
        assert_eq!(firm.finished_qty, 3.0);
        assert!((firm.finished_value - cost * 1.10).abs() < 1e-12);
        assert_eq!(firm.wip_value, 0.0);

        // Zero markup leaves inventory exactly at accrued cost.
        let mut plain = test_firm(0, 9.0, 450.0, 1.0);
        plain.markup = 0.0;
        plain.receive_order(order(1, 3.0, 1), 0);
        let mut r = rng::stream(1, 0, 1);
        plain.step_processes(0.0, 1.0, 0.1 / 12.0, &mut r);
        let cost = plain.wip_value;
        plain.conclude_production();
        assert!((plain.finished_value - cost).abs() < 1e-12);
    }

    #[test]
    fn failed_process_contributes_nothing_to_finished_goods() {
        // Two-tick process failed on the second tick: the write-off equals
        // everything accrued so far.
        let mut firm = test_firm(0, 9.0, 450.0, 1.0);
        firm.receive_order(order(1, 3.0, 2), 0);
        let mut r = rng::stream(1, 0, 0);
        firm.step_processes(0.0, 1.0, 0.1 / 12.0, &mut r);
        let after_one = firm.wip_value;
        firm.step_processes(1.0, 1.0, 0.1 / 12.0, &mut r);
        firm.conclude_production();
        assert_eq!(firm.finished_qty, 0.0);
        assert!(firm.flows.write_off > after_one);
        assert_eq!(firm.wip_value, 0.0);
    }

    #[test]
    fn selling_with_no_noise_empties_inventory() {
        let mut firm = test_firm(0, 9.0, 450.0, 1.0);
        firm.finished_qty = 3.0;
        firm.finished_value = 9.0;
        let (qty, paid) = firm.sell_finished(0.0);
        assert_eq!(qty, 3.0);
        assert_eq!(paid, 9.0);
        assert_eq!(firm.finished_qty, 0.0);
        assert_eq!(firm.finished_value, 0.0);
    }

    #[test]
    fn selling_empty_inventory_is_a_no_op() {
        let mut firm = test_firm(0, 9.0, 450.0, 1.0);
        assert_eq!(firm.sell_finished(0.05), (0.0, 0.0));
        assert_eq!(firm.flows.revenue, 0.0);
    }

    #[test]
    fn positive_noise_pays_a_premium_on_the_full_inventory() {
        let mut firm = test_firm(0, 9.0, 450.0, 1.0);
        firm.finished_qty = 3.0;
        firm.finished_value = 9.0;
        let (qty, paid) = firm.sell_finished(0.1);
        assert_eq!(qty, 3.0);
        assert!((paid - 9.9).abs() < 1e-12);
        // Only the book value leaves inventory; the premium is firm revenue.
        assert_eq!(firm.flows.released_value, 9.0);
    }

    #[test]
    fn negative_noise_buys_a_fraction() {
        let mut firm = test_firm(0, 9.0, 450.0, 1.0);
        firm.finished_qty = 3.0;
        firm.finished_value = 9.0;
        let (qty, paid) = firm.sell_finished(-0.1);
        assert!((qty - 2.7).abs() < 1e-12);
        assert!((paid - 8.1).abs() < 1e-12);
        assert!((firm.finished_qty - 0.3).abs() < 1e-12);
    }

    #[test]
    fn delivery_blends_the_capital_price() {
        let mut firm = test_firm(0, 9.0, 100.0, 1.0);
        assert_eq!(firm.capital_qty, 100.0);
        firm.apply_delivery(100.0, 2.0);
        assert_eq!(firm.capital_value, 300.0);
        assert_eq!(firm.capital_qty, 200.0);
        assert_eq!(firm.capital_price(), Some(1.5));
    }

    #[test]
    fn delivery_covers_substitutions_before_increments() {
        let mut firm = test_firm(0, 9.0, 100.0, 1.0);
        firm.pending_substitution_qty = 2.0;
        firm.apply_delivery(2.0, 1.0);
        assert_eq!(firm.flows.substitution_value, 2.0);
        assert_eq!(firm.flows.delivered_value, 2.0);
        assert_eq!(firm.pending_substitution_qty, 0.0);

        firm.apply_delivery(3.0, 1.0);
        // Nothing pending: all increment, no further substitution cost.
        assert_eq!(firm.flows.substitution_value, 2.0);
        assert_eq!(firm.flows.delivered_value, 5.0);
    }

    #[test]
    fn idle_firm_statement_shows_pure_costs() {
        let mut firm = test_firm(0, 1.0, 120.0, 1.0);
        let statement = firm.close_statement(1.0, 0.10 / 12.0);
        assert_eq!(statement.wages, 1.0);
        assert!((statement.capital_compensation - 1.0).abs() < 1e-12);
        assert_eq!(statement.revenues, 0.0);
        assert!((statement.profit + 2.0).abs() < 1e-12);
    }

    #[test]
    fn labor_adjustment_spares_locked_workers() {
        let mut firm = test_firm(0, 9.0, 1e9, 1.0);
        firm.receive_order(order(1, 4.8, 2), 0); // locks 4 workers
        firm.adjust_labor(2);
        assert_eq!(firm.labor, 4.0);
        firm.adjust_labor(8);
        assert_eq!(firm.labor, 8.0);
    }

    #[test]
    fn order_signal_uses_the_observation_window() {
        let mut firm = test_firm(0, 9.0, 1e9, 1.0);
        firm.obs_interval = 5;
        for tick in 0..10u64 {
            firm.receive_order(order(tick, 3.0, 2), tick);
        }
        let (mean_qty, mean_parallel) = firm.order_signal(9).unwrap();
        assert_eq!(mean_qty, 3.0);
        // Window holds ticks 5..=9: five orders of duration 2 over 5 ticks.
        assert_eq!(mean_parallel, 2.0);
        assert_eq!(firm.received.len(), 5);

        // Far in the future the window is empty: no signal.
        assert!(firm.order_signal(100).is_none());
    }

    #[test]
    fn wip_ledger_matches_process_costs() {
        let mut firm = test_firm(7, 1000.0, 8e4, 1.0);
        let mut r = rng::stream(3, 0, 0);
        for i in 0..4 {
            firm.receive_order(order(i, 300.0, 10), 0);
        }
        for _ in 0..5 {
            firm.step_processes(0.02, 1.0, 0.1 / 12.0, &mut r);
            firm.check_invariants().unwrap();
        }
        let sum: f64 = firm.running.iter().map(|p| p.cost_accrued).sum();
        assert!((sum - firm.wip_value).abs() < 1e-9);
    }
}
