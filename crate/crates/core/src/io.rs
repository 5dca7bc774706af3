//! Plain-text interchange: trajectory dumps and estimate tables as CSV.
//!
//! Floats are written in Rust's shortest round-trip form, so a dump read
//! back reproduces every sample bit for bit. A trajectory file carries its
//! replay coordinates (seed, stream, dt) in comment lines; segment windows
//! and measurement means are run metadata derived from the pulse sequence
//! and are not part of the dump.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::engine::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::estimators::VarianceEstimate;

/// Write `traj` as CSV: comment header with replay coordinates, then one
/// row per sample with time, envelope parts, and instantaneous drive.
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    traj.validate()?;
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# su11 trajectory v1")?;
    writeln!(
        out,
        "# seed={} stream={} dt={}",
        traj.seed, traj.stream, traj.dt
    )?;
    let has_pump = traj.pump.is_some();
    if has_pump {
        writeln!(
            out,
            "time,signal_re,signal_im,idler_re,idler_im,pump_re,pump_im,mu"
        )?;
    } else {
        writeln!(out, "time,signal_re,signal_im,idler_re,idler_im,mu")?;
    }
    for k in 0..traj.len() {
        let s = traj.signal[k];
        let i = traj.idler[k];
        if let Some(p) = &traj.pump {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                traj.times[k], s.re, s.im, i.re, i.im, p[k].re, p[k].im, traj.mu[k]
            )?;
        } else {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                traj.times[k], s.re, s.im, i.re, i.im, traj.mu[k]
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_field(token: &str, line: usize) -> Result<f64> {
    token.trim().parse().map_err(|_| {
        Error::MalformedTrajectory(format!("unparseable number {token:?} on line {line}"))
    })
}

/// Read a dump written by [`write_trajectory_csv`]. Windows and measurement
/// means are not stored in the dump, so the result carries none.
pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory> {
    let reader = BufReader::new(File::open(path)?);
    let mut seed = 0u64;
    let mut stream = 0u64;
    let mut dt = 0.0f64;
    let mut has_pump = None;
    let mut times = Vec::new();
    let mut signal = Vec::new();
    let mut idler = Vec::new();
    let mut pump = Vec::new();
    let mut mu = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                if let Some(v) = token.strip_prefix("seed=") {
                    seed = v.parse().map_err(|_| {
                        Error::MalformedTrajectory(format!("bad seed on line {lineno}"))
                    })?;
                } else if let Some(v) = token.strip_prefix("stream=") {
                    stream = v.parse().map_err(|_| {
                        Error::MalformedTrajectory(format!("bad stream on line {lineno}"))
                    })?;
                } else if let Some(v) = token.strip_prefix("dt=") {
                    dt = v.parse().map_err(|_| {
                        Error::MalformedTrajectory(format!("bad dt on line {lineno}"))
                    })?;
                }
            }
            continue;
        }
        if has_pump.is_none() {
            // Header row names the columns and fixes the layout.
            has_pump = Some(match line.split(',').count() {
                8 => true,
                6 => false,
                cols => {
                    return Err(Error::MalformedTrajectory(format!(
                        "expected 6 or 8 columns, found {cols} on line {lineno}"
                    )))
                }
            });
            continue;
        }
        let want = if has_pump == Some(true) { 8 } else { 6 };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != want {
            return Err(Error::MalformedTrajectory(format!(
                "expected {want} columns, found {} on line {lineno}",
                fields.len()
            )));
        }
        let nums: Vec<f64> = fields
            .iter()
            .map(|f| parse_field(f, lineno))
            .collect::<Result<_>>()?;
        times.push(nums[0]);
        signal.push(Complex64::new(nums[1], nums[2]));
        idler.push(Complex64::new(nums[3], nums[4]));
        if want == 8 {
            pump.push(Complex64::new(nums[5], nums[6]));
        }
        mu.push(nums[want - 1]);
    }
    if has_pump.is_none() {
        return Err(Error::MalformedTrajectory("no header row".into()));
    }

    let traj = Trajectory {
        times,
        signal,
        idler,
        pump: if has_pump == Some(true) {
            Some(pump)
        } else {
            None
        },
        mu,
        windows: Vec::new(),
        measured_means: None,
        seed,
        stream,
        dt,
    };
    traj.validate()?;
    Ok(traj)
}

/// One row of an estimate table.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub quantity: String,
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

impl EstimateRow {
    pub fn new(quantity: &str, est: &VarianceEstimate) -> Self {
        Self {
            quantity: quantity.to_string(),
            value: est.value,
            std_error: est.std_error,
            n: est.n,
        }
    }
}

/// Write rows as a (quantity, value, std_error, n) CSV table.
pub fn write_estimates_csv(rows: &[EstimateRow], path: &Path) -> Result<()> {
    for row in rows {
        if row.quantity.contains([',', '\n', '\r']) {
            return Err(Error::InvalidParameter(format!(
                "quantity name {:?} needs to be CSV-safe",
                row.quantity
            )));
        }
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "quantity,value,std_error,n")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.quantity, row.value, row.std_error, row.n
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::sequence::PulseSequence;
    use crate::engine::three_mode::{integrate_three_mode, ThreeModeParams};
    use crate::engine::two_mode::integrate_two_mode;
    use crate::engine::StepConfig;
    use crate::model::modes::ModePair;

    #[test]
    fn trajectory_round_trips_bit_for_bit() {
        let tp = 2.0 * std::f64::consts::PI;
        let modes = ModePair::new(tp * 1.233e6, tp * 1.466e6, tp * 0.083, tp * 0.108).unwrap();
        let seq = PulseSequence::constant_drive(3.0, 0.2).unwrap();
        let step = StepConfig::new(1e-3).with_stride(10);
        let traj = integrate_two_mode(&modes, &seq, &step, 31).unwrap();

        let dir = std::env::temp_dir().join("su11-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("two_mode.csv");
        write_trajectory_csv(&traj, &path).unwrap();
        let back = read_trajectory_csv(&path).unwrap();
        assert_eq!(back.times, traj.times);
        assert_eq!(back.signal, traj.signal);
        assert_eq!(back.idler, traj.idler);
        assert_eq!(back.mu, traj.mu);
        assert_eq!(back.pump, None);
        assert_eq!((back.seed, back.stream, back.dt), (31, 0, 1e-3));

        // Pump channel round-trips for the three-mode engine.
        let params = ThreeModeParams::new(tp * 0.083, tp * 0.108, tp * 50.0, 2.0);
        let traj3 = integrate_three_mode(&params, &seq, &step, 5).unwrap();
        let path3 = dir.join("three_mode.csv");
        write_trajectory_csv(&traj3, &path3).unwrap();
        let back3 = read_trajectory_csv(&path3).unwrap();
        assert_eq!(back3.pump, traj3.pump);
        assert_eq!(back3.signal, traj3.signal);
    }

    #[test]
    fn malformed_dumps_are_rejected() {
        let dir = std::env::temp_dir().join("su11-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("broken.csv");
        std::fs::write(&path, "time,signal_re\n0,1\n").unwrap();
        assert!(matches!(
            read_trajectory_csv(&path),
            Err(Error::MalformedTrajectory(_))
        ));
        std::fs::write(
            &path,
            "time,signal_re,signal_im,idler_re,idler_im,mu\n0,1,nope,0,0,0\n",
        )
        .unwrap();
        assert!(read_trajectory_csv(&path).is_err());
        // Non-increasing times fail validation on read.
        std::fs::write(
            &path,
            "time,signal_re,signal_im,idler_re,idler_im,mu\n0,1,0,0,0,0\n0,1,0,0,0,0\n",
        )
        .unwrap();
        assert!(read_trajectory_csv(&path).is_err());
    }

    #[test]
    fn estimate_table_format() {
        let rows = vec![
            EstimateRow {
                quantity: "squeezed_variance".into(),
                value: 0.0256,
                std_error: 0.0004,
                n: 10_000,
            },
            EstimateRow {
                quantity: "amplified_variance".into(),
                value: 39.0,
                std_error: 0.55,
                n: 10_000,
            },
        ];
        let dir = std::env::temp_dir().join("su11-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("estimates.csv");
        write_estimates_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "quantity,value,std_error,n\nsqueezed_variance,0.0256,0.0004,10000\namplified_variance,39,0.55,10000\n"
        );
        let bad = vec![EstimateRow {
            quantity: "a,b".into(),
            value: 1.0,
            std_error: 0.0,
            n: 2,
        }];
        assert!(write_estimates_csv(&bad, &path).is_err());
    }
}
