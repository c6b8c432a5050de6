//! National accounts: aggregation of firm results with stock-flow checks.
//!
//! Consumption is what the planner pays for consumption goods; gross
//! investment is the value of investment goods delivered to firms out of
//! the domestic stock (imported deliveries are tracked separately and stay
//! out of GDP); the inventory term covers firm finished goods, work in
//! progress and the planner's undistributed stock. Both GDP and the sum of
//! firm value added are built from the same per-tick flow atoms, so the
//! identity `gdp = consumption + investment + inventory_change` must hold to
//! float regrouping error; a larger gap means a stock-flow leak and aborts
//! the run.

use serde::Serialize;

use crate::error::SimError;
use crate::firm::TickFlows;

/// Relative tolerance for the yearly accounting identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// One year of national accounts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NationalAccounts {
    pub year: u32,
    pub consumption: f64,
    pub gross_investment: f64,
    pub inventory_change: f64,
    pub gdp: f64,
}

/// Flow accumulator for the year in progress.
#[derive(Debug, Clone, Copy, Default)]
pub struct YearAccumulator {
    pub consumption: f64,
    /// Deliveries out of the domestic stock.
    pub investment_domestic: f64,
    /// Substitution part of the deliveries (at booking value).
    pub investment_substitutions: f64,
    pub accrued: f64,
    pub markup_gain: f64,
    pub write_offs: f64,
    pub released: f64,
    pub revenue_consumption: f64,
    pub revenue_investment: f64,
    pub value_added: f64,
    /// Change in the planner's investment-goods stock.
    pub planner_stock_delta: f64,
    pub imports: f64,
}

impl YearAccumulator {
    /// Fold one firm's tick flows in. `is_consumption` routes the revenue to
    /// the right demand component.
    pub fn add_firm_tick(&mut self, flows: &TickFlows, is_consumption: bool) {
        self.accrued += flows.accrued;
        self.markup_gain += flows.markup_gain;
        self.write_offs += flows.write_off;
        self.released += flows.released_value;
        if is_consumption {
            self.consumption += flows.revenue;
            self.revenue_consumption += flows.revenue;
        } else {
            self.revenue_investment += flows.revenue;
        }
        self.value_added += flows.value_added();
    }

    /// Fold one planner distribution round in.
    pub fn add_distribution(&mut self, from_stock_value: f64, imported_value: f64) {
        self.investment_domestic += from_stock_value;
        self.planner_stock_delta -= from_stock_value;
        self.imports += imported_value;
    }

    /// Fold one planner purchase round in: investment goods bought move into
    /// the planner's stock.
    pub fn add_stock_purchase(&mut self, value: f64) {
        self.planner_stock_delta += value;
    }

    /// Change of all inventories: firm finished goods and WIP, plus the
    /// planner's stock.
    pub fn inventory_change(&self) -> f64 {
        // Firm inventories grow by accruals and valuation gains and shrink
        // by write-offs and releases to the planner.
        let firm_delta = self.accrued + self.markup_gain - self.write_offs - self.released;
        firm_delta + self.planner_stock_delta
    }

    /// Close the year: compute the accounts and enforce the identity against
    /// the independently accumulated value added.
    pub fn close(&self, year: u32) -> Result<NationalAccounts, SimError> {
        let consumption = self.consumption;
        let gross_investment = self.investment_domestic;
        let inventory_change = self.inventory_change();
        let gdp = consumption + gross_investment + inventory_change;

        let scale = gdp.abs().max(self.value_added.abs()).max(1.0);
        let relative_error = (gdp - self.value_added).abs() / scale;
        if relative_error > IDENTITY_TOLERANCE {
            return Err(SimError::IdentityViolation {
                year,
                gdp,
                value_added: self.value_added,
                relative_error,
            });
        }
        Ok(NationalAccounts {
            year,
            consumption,
            gross_investment,
            inventory_change,
            gdp,
        })
    }
}

/// One tick of the planner-facing monthly series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonthlyRow {
    pub tick: u64,
    /// Cumulative value of unsatisfied investment requests.
    pub gross_inv_expected: f64,
    /// Investment goods bought by the planner this tick, in quantity.
    pub inv_goods_bought: f64,
    /// Investment goods still in producer inventories after the purchases.
    pub inv_goods_inventories: f64,
    /// Investment goods delivered to firms this tick, in quantity.
    pub gross_inv_q: f64,
    /// The same deliveries in value.
    pub gross_inv_q_value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flows(revenue: f64, released: f64, accrued: f64, markup: f64, wo: f64) -> TickFlows {
        TickFlows {
            accrued,
            markup_gain: markup,
            write_off: wo,
            released_value: released,
            revenue,
            ..Default::default()
        }
    }

    #[test]
    fn no_activity_closes_to_zeros() {
        let acc = YearAccumulator::default();
        let na = acc.close(1).unwrap();
        assert_eq!(na.consumption, 0.0);
        assert_eq!(na.gross_investment, 0.0);
        assert_eq!(na.inventory_change, 0.0);
        assert_eq!(na.gdp, 0.0);
    }

    #[test]
    fn value_added_when_everything_sells() {
        // Produce at cost 10, mark up to 11, sell at 11: value added is the
        // full production value.
        let mut acc = YearAccumulator::default();
        acc.add_firm_tick(&flows(11.0, 11.0, 10.0, 1.0, 0.0), true);
        let na = acc.close(1).unwrap();
        assert!((na.gdp - 11.0).abs() < 1e-12);
        assert!((na.consumption - 11.0).abs() < 1e-12);
        assert!((na.inventory_change - 0.0).abs() < 1e-12);
    }

    #[test]
    fn value_added_when_nothing_sells() {
        // Unsold production shows up as inventory change.
        let mut acc = YearAccumulator::default();
        acc.add_firm_tick(&flows(0.0, 0.0, 10.0, 1.0, 0.0), true);
        let na = acc.close(1).unwrap();
        assert!((na.gdp - 11.0).abs() < 1e-12);
        assert_eq!(na.consumption, 0.0);
        assert!((na.inventory_change - 11.0).abs() < 1e-12);
    }

    #[test]
    fn write_offs_reduce_value_added() {
        let mut acc = YearAccumulator::default();
        acc.add_firm_tick(&flows(0.0, 0.0, 10.0, 0.0, 4.0), true);
        let na = acc.close(1).unwrap();
        assert!((na.gdp - 6.0).abs() < 1e-12);
    }

    #[test]
    fn identity_violation_is_a_hard_failure() {
        let mut acc = YearAccumulator::default();
        acc.add_firm_tick(&flows(11.0, 11.0, 10.0, 1.0, 0.0), true);
        acc.value_added += 0.5; // simulate a leak
        assert!(matches!(acc.close(3), Err(SimError::IdentityViolation { year: 3, .. })));
    }

    #[test]
    fn two_firm_ledger_walk() {
        // A consumption firm and an investment firm over three ticks,
        // double-entry by hand.
        let mut acc = YearAccumulator::default();

        // Tick 1: both accrue 6 of cost; nothing finishes.
        acc.add_firm_tick(&flows(0.0, 0.0, 6.0, 0.0, 0.0), true);
        acc.add_firm_tick(&flows(0.0, 0.0, 6.0, 0.0, 0.0), false);

        // Tick 2: both conclude (markup 0.1 on 12 of cost -> gain 1.2 total),
        // consumption firm sells 6.6 at book, investment firm sells 6.6 and
        // the planner stocks it.
        acc.add_firm_tick(&flows(6.6, 6.6, 6.0, 0.6, 0.0), true);
        acc.add_firm_tick(&flows(6.6, 6.6, 6.0, 0.6, 0.0), false);
        acc.add_stock_purchase(6.6);

        // Tick 3: planner delivers 4.0 of the stock to firms.
        acc.add_distribution(4.0, 0.0);

        // Hand totals: C = 6.6; I = 4.0;
        // firm inventories: accrued 24 + markup 1.2 - released 13.2 = 12.0;
        // planner stock: +6.6 - 4.0 = 2.6; inventory change = 14.6;
        // GDP = 6.6 + 4.0 + 14.6 = 25.2;
        // value added = revenues 13.2 - released 13.2 + markup 1.2 + accrued 24 = 25.2.
        let na = acc.close(1).unwrap();
        assert!((na.gdp - 25.2).abs() < 1e-12);
        assert!((na.consumption - 6.6).abs() < 1e-12);
        assert!((na.gross_investment - 4.0).abs() < 1e-12);
        assert!((na.inventory_change - 14.6).abs() < 1e-12);
    }
}
