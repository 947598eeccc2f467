//! CSV emission and parsing for every table the tool writes.
//!
//! Floats are rendered with 17 significant digits (`{:.16e}`), which is
//! enough for an exact `f64` round trip through the text form. Each writer
//! here has a matching reader so emitted files stay machine-checkable.

use std::io::{BufRead, Write};

use crate::analysis::ConvergenceRow;
use crate::error::{Error, Result};
use crate::solver::StepReport;

/// 17-significant-digit rendering; parses back to the identical `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| {
        Error::InvalidParam(format!("bad {what} value `{field}` in CSV: {e}"))
    })
}

fn parse_usize(field: &str, what: &str) -> Result<usize> {
    field.trim().parse::<usize>().map_err(|e| {
        Error::InvalidParam(format!("bad {what} value `{field}` in CSV: {e}"))
    })
}

pub const ENERGY_HEADER: &str =
    "step,time,E_total,E_interface,E_doublewell,E_nonlocal,E_penalty,volume_residual,step_change";

/// Streaming energy-history writer; emits the header before the first row.
pub struct EnergyLog<W: Write> {
    sink: W,
    header_written: bool,
}

impl<W: Write> EnergyLog<W> {
    pub fn new(sink: W) -> Self {
        Self {
            sink,
            header_written: false,
        }
    }

    pub fn append(&mut self, r: &StepReport) -> std::io::Result<()> {
        if !self.header_written {
            writeln!(self.sink, "{ENERGY_HEADER}")?;
            self.header_written = true;
        }
        writeln!(
            self.sink,
            "{},{},{},{},{},{},{},{},{}",
            r.step,
            format_f64(r.time),
            format_f64(r.energy.total),
            format_f64(r.energy.interface),
            format_f64(r.energy.doublewell),
            format_f64(r.energy.nonlocal),
            format_f64(r.energy.penalty),
            format_f64(r.energy.volume_residual),
            format_f64(r.step_change),
        )
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.sink.flush()
    }
}

/// One parsed row of an energy log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub step: usize,
    pub time: f64,
    pub e_total: f64,
    pub e_interface: f64,
    pub e_doublewell: f64,
    pub e_nonlocal: f64,
    pub e_penalty: f64,
    pub volume_residual: f64,
    pub step_change: f64,
}

pub fn read_energy_log(reader: impl BufRead) -> Result<Vec<EnergyRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != ENERGY_HEADER {
                return Err(Error::InvalidParam(format!(
                    "unexpected energy log header: `{line}`"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(Error::InvalidParam(format!(
                "energy log row has {} fields, expected 9",
                parts.len()
            )));
        }
        rows.push(EnergyRow {
            step: parse_usize(parts[0], "step")?,
            time: parse_f64(parts[1], "time")?,
            e_total: parse_f64(parts[2], "E_total")?,
            e_interface: parse_f64(parts[3], "E_interface")?,
            e_doublewell: parse_f64(parts[4], "E_doublewell")?,
            e_nonlocal: parse_f64(parts[5], "E_nonlocal")?,
            e_penalty: parse_f64(parts[6], "E_penalty")?,
            volume_residual: parse_f64(parts[7], "volume_residual")?,
            step_change: parse_f64(parts[8], "step_change")?,
        });
    }
    Ok(rows)
}

pub fn write_convergence_csv(rows: &[ConvergenceRow], mut sink: impl Write) -> std::io::Result<()> {
    writeln!(sink, "tau,error,rate")?;
    for r in rows {
        let rate = r.rate.map(format_f64).unwrap_or_default();
        writeln!(sink, "{},{},{}", format_f64(r.tau), format_f64(r.error), rate)?;
    }
    Ok(())
}

pub fn read_convergence_csv(reader: impl BufRead) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParam(format!(
                "convergence row has {} fields, expected 3",
                parts.len()
            )));
        }
        let rate = if parts[2].trim().is_empty() {
            None
        } else {
            Some(parse_f64(parts[2], "rate")?)
        };
        rows.push(ConvergenceRow {
            tau: parse_f64(parts[0], "tau")?,
            error: parse_f64(parts[1], "error")?,
            rate,
        });
    }
    Ok(rows)
}

pub fn write_bubbles_csv(
    outcomes: &[crate::analysis::SweepOutcome],
    mut sink: impl Write,
) -> std::io::Result<()> {
    writeln!(sink, "gamma,seed,count")?;
    for o in outcomes {
        writeln!(sink, "{},{},{}", format_f64(o.gamma), o.seed, o.count)?;
    }
    Ok(())
}

pub fn read_bubbles_csv(reader: impl BufRead) -> Result<Vec<(f64, u64, usize)>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParam(format!(
                "bubbles row has {} fields, expected 3",
                parts.len()
            )));
        }
        let seed = parts[1].trim().parse::<u64>().map_err(|e| {
            Error::InvalidParam(format!("bad seed `{}` in CSV: {e}", parts[1]))
        })?;
        rows.push((
            parse_f64(parts[0], "gamma")?,
            seed,
            parse_usize(parts[2], "count")?,
        ));
    }
    Ok(rows)
}

/// Cross-section of the state and the three forces along `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcesRow {
    pub x: f64,
    pub phi: f64,
    pub tension: f64,
    pub nonlocal: f64,
    pub volume: f64,
    pub sum: f64,
}

pub fn write_forces_csv(rows: &[ForcesRow], mut sink: impl Write) -> std::io::Result<()> {
    writeln!(sink, "x,phi,tension,nonlocal,volume,sum")?;
    for r in rows {
        writeln!(
            sink,
            "{},{},{},{},{},{}",
            format_f64(r.x),
            format_f64(r.phi),
            format_f64(r.tension),
            format_f64(r.nonlocal),
            format_f64(r.volume),
            format_f64(r.sum),
        )?;
    }
    Ok(())
}

pub fn read_forces_csv(reader: impl BufRead) -> Result<Vec<ForcesRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(Error::InvalidParam(format!(
                "forces row has {} fields, expected 6",
                parts.len()
            )));
        }
        rows.push(ForcesRow {
            x: parse_f64(parts[0], "x")?,
            phi: parse_f64(parts[1], "phi")?,
            tension: parse_f64(parts[2], "tension")?,
            nonlocal: parse_f64(parts[3], "nonlocal")?,
            volume: parse_f64(parts[4], "volume")?,
            sum: parse_f64(parts[5], "sum")?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EnergyBreakdown;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn report(step: usize, scale: f64) -> StepReport {
        let (interface, doublewell, nonlocal, penalty) =
            (0.4 * scale, 0.3 * scale, 0.2 * scale, 0.1 * scale);
        StepReport {
            step,
            time: step as f64 * 1e-3,
            energy: EnergyBreakdown {
                interface,
                doublewell,
                nonlocal,
                penalty,
                // same association order as the energy constructor
                total: interface + doublewell + nonlocal + penalty,
                volume_residual: -1e-4,
            },
            step_change: 0.5,
            converged: false,
        }
    }

    #[test]
    fn header_then_rows_and_total_is_sum_of_columns() {
        let mut buf = Vec::new();
        {
            let mut log = EnergyLog::new(&mut buf);
            log.append(&report(1, 8.0)).unwrap();
            log.append(&report(2, 4.0)).unwrap();
        }
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(ENERGY_HEADER));
        assert_eq!(text.lines().count(), 3);

        let rows = read_energy_log(&buf[..]).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            let sum = r.e_interface + r.e_doublewell + r.e_nonlocal + r.e_penalty;
            assert_eq!(r.e_total, sum);
        }
    }

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let exp = rng.random_range(-300.0..300.0);
            let v: f64 = rng.random_range(-1.0..1.0) * 10f64.powf(exp);
            let back: f64 = format_f64(v).parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "value {v}");
        }
        for v in [0.0, -0.0, f64::MIN_POSITIVE, f64::MAX, 1.0 / 3.0] {
            let back: f64 = format_f64(v).parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits());
        }
    }

    #[test]
    fn convergence_csv_round_trip() {
        let rows = vec![
            ConvergenceRow { tau: 0.1, error: 1.9791, rate: None },
            ConvergenceRow { tau: 0.05, error: 1.3012, rate: Some(0.605) },
        ];
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf).unwrap();
        let back = read_convergence_csv(&buf[..]).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn bubbles_and_forces_round_trip() {
        let outcomes = vec![crate::analysis::SweepOutcome {
            gamma: 200.0,
            seed: 3,
            count: 2,
            converged: true,
        }];
        let mut buf = Vec::new();
        write_bubbles_csv(&outcomes, &mut buf).unwrap();
        let back = read_bubbles_csv(&buf[..]).unwrap();
        assert_eq!(back, vec![(200.0, 3, 2)]);

        let rows = vec![ForcesRow {
            x: -1.0,
            phi: 0.1,
            tension: 0.2,
            nonlocal: -0.3,
            volume: 0.05,
            sum: -0.05,
        }];
        let mut buf = Vec::new();
        write_forces_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_forces_csv(&buf[..]).unwrap(), rows);
    }
}
