//! CSV and gnuplot emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{QemError, Result};

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| QemError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)
}

/// Log-log plot of median error against ε, one curve per order, for the
/// medians CSV (columns model, epsilon, lambda, order, median_abs_error, instances).
pub fn fig1_gnuplot(csv: &Path, max_order: usize) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset logscale xy\nset key top left\n");
    s.push_str("set xlabel 'epsilon'\nset ylabel 'median |E* - E^n|'\n");
    let curves: Vec<String> = (0..=max_order)
        .map(|n| format!("'{}' using ($4=={n} ? $2 : 1/0):5 every ::1 with linespoints title 'n={n}'", csv.display()))
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s
}

/// Histograms of δ and δ₀ from the PEC CSV.
pub fn fig2_gnuplot(csv: &Path) -> String {
    format!(
        "set datafile separator ','\nset multiplot layout 1,2\nbin(x) = 0.01*floor(x/0.01)\n\
         set xlabel 'delta'\nplot '{0}' every ::1 using (bin($5)):(1.0) smooth freq with boxes title 'mitigated'\n\
         set xlabel 'delta0'\nplot '{0}' every ::1 using (bin($6)):(1.0) smooth freq with boxes title 'unmitigated'\n\
         unset multiplot\n",
        csv.display()
    )
}
