use std::io::Write;

use growth_distance::{growth_distance_traced, Config, DifferencePair, GrowthError, IterationTrace};

use crate::records::format_float;

/// Per-iteration `(k, βˡ, βᵘ, gap)` of one solve, starting after initialization.
pub fn trace_convergence(pair: &DifferencePair<'_, 3>, config: &Config) -> Result<Vec<IterationTrace>, GrowthError> {
    let mut rows = Vec::new();
    growth_distance_traced(pair, config, None, &mut |t| rows.push(*t))?;
    Ok(rows)
}

pub fn write_trace_csv<W: Write>(out: W, rows: &[IterationTrace]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "beta_lower", "beta_upper", "gap"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            format_float(r.beta_lower),
            format_float(r.beta_upper),
            format_float(r.gap),
        ])?;
    }
    w.flush()?;
    Ok(())
}
