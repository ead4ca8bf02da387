//! CSV emission. Floats use Rust's shortest round-trip formatting (plain
//! decimals for moderate magnitudes, exponent form otherwise), so equal
//! values always produce equal bytes.

use crate::error::Result;
use crate::spectrum::Spectrum;
use rabi_core::analysis::SweepResult;
use rabi_core::ObservableSeries;
use std::io::Write;

pub const SERIES_HEADER: [&str; 10] = [
    "t",
    "tau",
    "n_mean",
    "sigma_z",
    "q",
    "p_e",
    "quanta",
    "energy",
    "trace_err",
    "top_pop",
];

/// Extra per-row columns appended after the standard series columns.
pub enum Extra<'a> {
    None,
    /// `g·t`.
    CouplingTime(f64),
    /// Jump times up to each sample, semicolon-joined.
    Jumps(&'a [f64]),
}

pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

pub fn write_series<W: Write>(out: W, series: &ObservableSeries, extra: Extra<'_>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = SERIES_HEADER.to_vec();
    match extra {
        Extra::None => {}
        Extra::CouplingTime(_) => header.push("gt"),
        Extra::Jumps(_) => header.push("jumps"),
    }
    w.write_record(&header)?;
    let mut prev_t = f64::NEG_INFINITY;
    for r in series.iter() {
        let mut row = vec![
            f(r.t),
            f(r.tau),
            f(r.n_mean),
            f(r.sigma_z_mean),
            r.mandel_q.map(f).unwrap_or_default(),
            f(r.p_e),
            f(r.quanta_mean),
            f(r.energy_mean),
            f(r.trace_error),
            f(r.top_level_pop),
        ];
        match extra {
            Extra::None => {}
            Extra::CouplingTime(g) => row.push(f(g * r.t)),
            Extra::Jumps(times) => {
                let js: Vec<String> = times
                    .iter()
                    .filter(|&&tj| tj > prev_t && tj <= r.t)
                    .map(|&tj| f(tj))
                    .collect();
                row.push(js.join(";"));
            }
        }
        prev_t = r.t;
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, res: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis_value", "beta", "r_squared", "flag"])?;
    for i in 0..res.values.len() {
        w.write_record([
            f(res.values[i]),
            res.betas[i].map(f).unwrap_or_default(),
            res.r_squared[i].map(f).unwrap_or_default(),
            res.flags[i].to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_spectrum<W: Write>(out: W, s: &Spectrum) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["nu", "magnitude"])?;
    for (nu, m) in s.nu.iter().zip(&s.magnitude) {
        w.write_record([f(*nu), f(*m)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
