//! CSV forms: `t_ms,ax,ay,az` for traces, `t_ms,a` for reduced signals and
//! `t_ms,duty` for PWM schedules.

use std::io::{Read, Write};

use super::{AccelTrace, PwmSchedule, ReducedSignal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::schema("csv", e.to_string())
}

fn t_ms(i: usize, rate: u32) -> f64 {
    i as f64 * 1000.0 / f64::from(rate)
}

fn write_rows<W: Write, S: Scalar>(
    out: W,
    header: &[&str],
    rate: u32,
    rows: impl Iterator<Item = Vec<S>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(io_err)?;
    for (i, row) in rows.enumerate() {
        let mut rec = vec![t_ms(i, rate).to_string()];
        rec.extend(row.iter().map(|v| v.as_f64().to_string()));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn write_accel_csv<W: Write, S: Scalar>(out: W, trace: &AccelTrace<S>) -> Result<()> {
    write_rows(
        out,
        &["t_ms", "ax", "ay", "az"],
        trace.sample_rate(),
        trace.samples().iter().map(|s| s.to_vec()),
    )
}

pub fn write_reduced_csv<W: Write, S: Scalar>(out: W, sig: &ReducedSignal<S>) -> Result<()> {
    write_rows(
        out,
        &["t_ms", "a"],
        sig.sample_rate,
        sig.values.iter().map(|&v| vec![v]),
    )
}

pub fn write_pwm_csv<W: Write, S: Scalar>(out: W, pwm: &PwmSchedule<S>) -> Result<()> {
    write_rows(
        out,
        &["t_ms", "duty"],
        pwm.update_rate_hz,
        pwm.duties.iter().map(|&d| vec![d]),
    )
}

/// Reads a headed CSV whose first column is `t_ms`, returning the sample
/// rate inferred from the (uniform) timestamp spacing and the value columns.
pub fn read_csv_trace<R: Read>(input: R, header: &[&str]) -> Result<(u32, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r
        .headers()
        .map_err(io_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if got != header {
        return Err(Error::schema(
            "header",
            format!("expected `{}`, got `{}`", header.join(","), got.join(",")),
        ));
    }
    let mut times = Vec::new();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::schema(format!("row {}", line + 2), e.to_string()))?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::schema(
                format!("row {}", line + 2),
                "non-finite value",
            ));
        }
        times.push(vals[0]);
        rows.push(vals[1..].to_vec());
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("csv has no data rows"));
    }
    let rate = if times.len() < 2 {
        super::DEFAULT_SAMPLE_RATE
    } else {
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::schema("t_ms", "timestamps must increase"));
        }
        let rate = (1000.0 / dt).round();
        for (i, &t) in times.iter().enumerate() {
            let expected = times[0] + i as f64 * 1000.0 / rate;
            if (t - expected).abs() > 1e-6 * (1.0 + expected.abs()) {
                return Err(Error::schema(
                    format!("row {}", i + 2),
                    "t_ms is not uniformly spaced",
                ));
            }
        }
        rate as u32
    };
    Ok((rate, rows))
}

pub fn read_accel_csv<R: Read>(input: R) -> Result<AccelTrace<f64>> {
    let (rate, rows) = read_csv_trace(input, &["t_ms", "ax", "ay", "az"])?;
    AccelTrace::new(rate, rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
}
