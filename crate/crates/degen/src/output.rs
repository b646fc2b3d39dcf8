//! CSV and JSON emission. Floats are written with Rust's shortest round-trip formatting.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use degen_core::evolve::{PulledFrame, Trajectory};
use serde::Serialize;

pub fn frames_csv(frames: &[PulledFrame]) -> String {
    let mut s = String::from("t,x,u,u_x,rho\n");
    for f in frames {
        for j in 0..f.x.len() {
            writeln!(s, "{},{},{},{},{}", f.t, f.x[j], f.u[j], f.u_x[j], f.rho[j]).unwrap();
        }
    }
    s
}

pub fn diagnostics_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,N_u,sup_w,sqrt_t_C1\n");
    for f in &traj.frames {
        writeln!(s, "{},{},{},{}", f.t, f.n_u, f.sup_w, f.sqrt_t_c1).unwrap();
    }
    s
}

/// Writes through a temporary file so readers never see a half-written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_formatting() {
        let f = PulledFrame {
            t: 0.1,
            x: vec![0.0, 1.0 / 3.0],
            u: vec![0.0, 0.1 + 0.2],
            u_x: vec![1e-300, 2.5],
            rho: vec![-0.0, 1e21],
        };
        let csv = frames_csv(std::slice::from_ref(&f));
        let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows[1][1], f.x[1]);
        assert_eq!(rows[1][2], f.u[1]);
        assert_eq!(rows[0][3], 1e-300);
        assert_eq!(rows[1][4], 1e21);
    }
}
