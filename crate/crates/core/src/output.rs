//! Run outputs: the two CSV series, the JSON summary, optional firm traces.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::SimError;
use crate::sim::RunOutput;

/// `planner_monthly.csv`: the planner-facing monthly series.
pub fn planner_monthly_csv(output: &RunOutput) -> String {
    let mut s = String::from(
        "tick,grossInvExpected,inv_goods_bought,inv_goods_inventories,grossInvQ,grossInvQ_value\n",
    );
    for row in &output.monthly {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.tick,
            row.gross_inv_expected,
            row.inv_goods_bought,
            row.inv_goods_inventories,
            row.gross_inv_q,
            row.gross_inv_q_value
        ));
    }
    s
}

/// `national_accounts_yearly.csv`: post-warm-up years.
pub fn national_accounts_csv(output: &RunOutput) -> String {
    let mut s = String::from("year,consumption,gross_investment,inventory_change,gdp\n");
    for na in &output.yearly {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            na.year, na.consumption, na.gross_investment, na.inventory_change, na.gdp
        ));
    }
    s
}

/// `firm_trace.csv`: per-tick state rows for the traced firms.
pub fn trace_csv(output: &RunOutput) -> String {
    let mut s = String::from(
        "tick,firm,accepted,rejected,failures,completions,running,queued,labor,capital_qty,finished_qty\n",
    );
    for row in &output.trace {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.tick,
            row.firm,
            row.accepted,
            row.rejected,
            row.failures,
            row.completions,
            row.running,
            row.queued,
            row.labor,
            row.capital_qty,
            row.finished_qty
        ));
    }
    s
}

/// Write every output file into the configured directory.
pub fn write_outputs(output: &RunOutput, dir: &Path) -> Result<(), SimError> {
    fs::create_dir_all(dir)?;
    let mut write = |name: &str, content: String| -> Result<(), SimError> {
        let mut file = fs::File::create(dir.join(name))?;
        file.write_all(content.as_bytes())?;
        Ok(())
    };
    write("planner_monthly.csv", planner_monthly_csv(output))?;
    write("national_accounts_yearly.csv", national_accounts_csv(output))?;
    write(
        "summary.json",
        serde_json::to_string_pretty(&output.summary).expect("summary serializes") + "\n",
    )?;
    if !output.trace.is_empty() {
        write("firm_trace.csv", trace_csv(output))?;
    }
    Ok(())
}
