use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::phase_speeds;
use crate::error::{Error, Result};
use crate::ode::{Trajectory, VectorField};

/// One line of the NDJSON state stream.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct NdjsonRecord {
    pub t: f64,
    pub x: Vec<f64>,
    pub speed: f64,
}

/// `t,x1,...,xn` header, then one row per refined point with 17 significant
/// digits (enough to round-trip every double).
pub fn write_timeseries_csv<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    let n = traj.dim();
    let mut header = String::from("t");
    for i in 1..=n {
        header.push_str(&format!(",x{i}"));
    }
    writeln!(out, "{header}")?;
    for p in &traj.refined_points {
        write!(out, "{:.16e}", p.t)?;
        for v in &p.x {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn emit_timeseries_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_timeseries_csv(traj, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn write_ndjson<F, W>(field: &F, traj: &Trajectory, mut out: W) -> std::io::Result<()>
where
    F: VectorField + ?Sized,
    W: Write,
{
    let speeds = phase_speeds(field, &traj.refined_points);
    for (p, speed) in traj.refined_points.iter().zip(speeds) {
        let rec = NdjsonRecord {
            t: p.t,
            x: p.x.clone(),
            speed,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn emit_ndjson<F: VectorField + ?Sized>(field: &F, traj: &Trajectory, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_ndjson(field, traj, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::State;
    use crate::systems::{SystemId, SystemSpec};

    fn traj(points: Vec<State>) -> Trajectory {
        Trajectory {
            system: None,
            steps: Vec::new(),
            refined_points: points,
            stats: Default::default(),
        }
    }

    fn csv(t: &Trajectory) -> String {
        let mut buf = Vec::new();
        write_timeseries_csv(t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn header_plus_rows() {
        let t = traj(vec![
            State::new(0.0, vec![1.0, 2.0]),
            State::new(0.1, vec![1.5, 2.5]),
            State::new(0.2, vec![2.0, 3.0]),
        ]);
        let text = csv(&t);
        assert!(text.ends_with('\n'));
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,x1,x2");
    }

    #[test]
    fn values_round_trip_bit_exactly() {
        let vals = [0.1, 1.0 / 3.0, -2.0f64.sqrt(), 1e-300, 6.02214076e23, 8.0 / 3.0];
        let t = traj(vals.iter().map(|&v| State::new(v, vec![v, -v, v * 7.0])).collect());
        let text = csv(&t);
        for (line, p) in text.lines().skip(1).zip(&t.refined_points) {
            let parsed: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(parsed[0].to_bits(), p.t.to_bits());
            for (a, b) in parsed[1..].iter().zip(&p.x) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn lorenz_origin_is_all_zero() {
        let t = traj((0..3).map(|k| State::new(k as f64, vec![0.0; 3])).collect());
        for line in csv(&t).lines().skip(1) {
            assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0));
        }
    }

    #[test]
    fn ndjson_lines_carry_speed() {
        let spec = SystemSpec::preset(SystemId::Lorenz);
        let t = traj(vec![State::new(0.0, vec![1.0, 1.0, 1.0])]);
        let mut buf = Vec::new();
        write_ndjson(&spec, &t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rec: NdjsonRecord = serde_json::from_str(text.trim_end()).unwrap();
        let want = (26.0f64 * 26.0 + 25.0 / 9.0).sqrt();
        assert!((rec.speed - want).abs() < 1e-12);
        assert_eq!(rec.x, vec![1.0, 1.0, 1.0]);
    }
}
