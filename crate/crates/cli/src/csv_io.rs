//! CSV artifacts. Every file has one header row; numbers carry 17
//! significant digits so that reading a file back reproduces the values
//! exactly.

use std::path::{Path, PathBuf};

use stringopt_core::mesh::{SpaceTimeMesh, SpatialMesh};
use stringopt_core::model::{desired_output, Trajectory};
use stringopt_core::ocp::{ControlSeries, OcpFields};
use stringopt_core::simulate::SimResult;
use stringopt_core::statics::SetPoints;
use stringopt_core::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },
}

impl CsvError {
    fn io(path: &Path, source: impl Into<csv::Error>) -> Self {
        CsvError::Io {
            path: path.to_path_buf(),
            source: source.into(),
        }
    }

    fn schema(path: &Path, message: impl Into<String>) -> Self {
        CsvError::Schema {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn indexed(prefix: &str, d: usize) -> impl Iterator<Item = String> + '_ {
    (1..=d).map(move |k| format!("{prefix}_{k}"))
}

pub fn field_header(d: usize) -> Vec<String> {
    ["s", "t"].map(String::from).into_iter().chain(indexed("r", d)).chain(indexed("w", d)).collect()
}

pub fn control_header(d: usize) -> Vec<String> {
    core::iter::once("t".to_string()).chain(indexed("u", d)).collect()
}

pub fn output_header(d: usize) -> Vec<String> {
    core::iter::once("t".to_string()).chain(indexed("y", d)).chain(indexed("yd", d)).collect()
}

pub fn snapshots_header(d: usize) -> Vec<String> {
    ["t", "s"].map(String::from).into_iter().chain(indexed("r", d)).collect()
}

pub fn setpoints_header(d: usize) -> Vec<String> {
    core::iter::once("s".to_string()).chain(indexed("ri", d)).chain(indexed("re", d)).collect()
}

/// Writes a numeric table.
pub fn write_table<I>(path: &Path, header: &[String], rows: I) -> Result<(), CsvError>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| CsvError::io(path, e))?;
    w.write_record(header).map_err(|e| CsvError::io(path, e))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(CsvError::schema(
                path,
                format!("row has {} values, header has {}", row.len(), header.len()),
            ));
        }
        w.write_record(row.iter().map(|&x| format_number(x)))
            .map_err(|e| CsvError::io(path, e))?;
    }
    w.flush().map_err(|e| CsvError::io(path, e))
}

/// Reads a numeric table whose header must equal `expected`.
pub fn read_table(path: &Path, expected: &[String]) -> Result<Vec<Vec<f64>>, CsvError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CsvError::io(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CsvError::io(path, e))?
        .iter()
        .map(String::from)
        .collect();
    if header != expected {
        return Err(CsvError::schema(
            path,
            format!("header {:?} does not match {:?}", header, expected),
        ));
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| CsvError::io(path, e))?;
        let row = record
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CsvError::schema(path, format!("data row {}: {e}", line + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

fn components(v: &[f64], node: usize, d: usize) -> impl Iterator<Item = f64> + '_ {
    v[node * d..(node + 1) * d].iter().copied()
}

/// `s,t,r_*,w_*`, one row per space-time node, time-major.
pub fn write_field(path: &Path, mesh: &SpaceTimeMesh, fields: &OcpFields, d: usize) -> Result<(), CsvError> {
    let rows = (0..mesh.n_nodes()).map(|node| {
        let (s, t) = mesh.node_coords(node);
        [s, t]
            .into_iter()
            .chain(components(&fields.r, node, d))
            .chain(components(&fields.w, node, d))
            .collect()
    });
    write_table(path, &field_header(d), rows)
}

pub fn write_control(path: &Path, control: &ControlSeries) -> Result<(), CsvError> {
    let d = control.dim;
    let rows = control
        .times
        .iter()
        .zip(&control.values)
        .map(|(&t, u)| core::iter::once(t).chain(u[..d].iter().copied()).collect());
    write_table(path, &control_header(d), rows)
}

pub fn read_control(path: &Path, d: usize) -> Result<ControlSeries, CsvError> {
    let rows = read_table(path, &control_header(d))?;
    let times = rows.iter().map(|r| r[0]).collect();
    let values = rows
        .iter()
        .map(|r| {
            let mut u: Vec3 = [0.0; 3];
            u[..d].copy_from_slice(&r[1..]);
            u
        })
        .collect();
    ControlSeries::new(d, times, values).map_err(|e| CsvError::schema(path, e.to_string()))
}

/// `t,y_*,yd_*` at every simulation step.
pub fn write_output(path: &Path, sim: &SimResult, traj: &Trajectory, d: usize) -> Result<(), CsvError> {
    let rows = sim.times.iter().zip(&sim.outputs).map(|(&t, y)| {
        let yd = desired_output(t, traj);
        core::iter::once(t)
            .chain(y[..d].iter().copied())
            .chain(yd[..d].iter().copied())
            .collect()
    });
    write_table(path, &output_header(d), rows)
}

/// Simulated configurations at the steps nearest to `times`, in ascending
/// time order.
pub fn write_snapshots(
    path: &Path,
    sim: &SimResult,
    mesh: &SpatialMesh,
    times: &[f64],
    d: usize,
) -> Result<(), CsvError> {
    let steps = snapshot_steps(&sim.times, times);
    let coords = mesh.node_coords();
    let rows = steps.into_iter().flat_map(|k| {
        let r = &sim.states[k].r;
        let t = sim.times[k];
        coords
            .iter()
            .enumerate()
            .map(move |(i, &s)| [t, s].into_iter().chain(components(r, i, d)).collect::<Vec<f64>>())
    });
    write_table(path, &snapshots_header(d), rows)
}

/// Indices of the time levels closest to each requested instant, sorted
/// and without repeats.
pub fn snapshot_steps(levels: &[f64], requested: &[f64]) -> Vec<usize> {
    let mut steps: Vec<usize> = requested
        .iter()
        .filter_map(|&t| {
            levels
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map(|(k, _)| k)
        })
        .collect();
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// `s,ri_*,re_*`. Both rest states have zero velocity.
pub fn write_setpoints(path: &Path, mesh: &SpatialMesh, sp: &SetPoints, d: usize) -> Result<(), CsvError> {
    let rows = mesh.node_coords().into_iter().enumerate().map(|(i, s)| {
        core::iter::once(s)
            .chain(components(&sp.r_i, i, d))
            .chain(components(&sp.r_e, i, d))
            .collect()
    });
    write_table(path, &setpoints_header(d), rows)
}

pub fn read_setpoints(path: &Path, mesh: &SpatialMesh, d: usize) -> Result<SetPoints, CsvError> {
    let rows = read_table(path, &setpoints_header(d))?;
    if rows.len() != mesh.n_nodes() {
        return Err(CsvError::schema(
            path,
            format!("{} rows for a mesh with {} nodes", rows.len(), mesh.n_nodes()),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if (row[0] - mesh.node_coord(i)).abs() > 1e-12 * mesh.length {
            return Err(CsvError::schema(path, format!("row {} has s = {}, expected {}", i + 1, row[0], mesh.node_coord(i))));
        }
    }
    let r_i = rows.iter().flat_map(|r| r[1..=d].to_vec()).collect();
    let r_e = rows.iter().flat_map(|r| r[d + 1..].to_vec()).collect();
    let n = d * rows.len();
    Ok(SetPoints {
        r_i,
        r_e,
        v_i: vec![0.0; n],
        v_e: vec![0.0; n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -5.905, 1e-300, 6.02214076e23, 0.0, -0.0, f64::MIN_POSITIVE] {
            let back: f64 = format_number(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(format_number(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn headers() {
        assert_eq!(field_header(2).join(","), "s,t,r_1,r_2,w_1,w_2");
        assert_eq!(control_header(3).join(","), "t,u_1,u_2,u_3");
        assert_eq!(output_header(2).join(","), "t,y_1,y_2,yd_1,yd_2");
        assert_eq!(snapshots_header(2).join(","), "t,s,r_1,r_2");
        assert_eq!(setpoints_header(2).join(","), "s,ri_1,ri_2,re_1,re_2");
    }

    #[test]
    fn empty_table_keeps_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_table(&path, &control_header(2), Vec::<Vec<f64>>::new()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "t,u_1,u_2\n");
        assert!(read_table(&path, &control_header(2)).unwrap().is_empty());
    }

    #[test]
    fn control_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("control.csv");
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.06).collect();
        let values: Vec<Vec3> = times.iter().map(|&t| [t.sin() / 3.0, 9.81 + t.cos() / 7.0, 0.0]).collect();
        let c = ControlSeries::new(2, times, values).unwrap();
        write_control(&path, &c).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 102);
        assert_eq!(read_control(&path, 2).unwrap(), c);
    }

    #[test]
    fn schema_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "t,u_1\n0.0,1.0\n").unwrap();
        assert!(matches!(read_control(&path, 2), Err(CsvError::Schema { .. })));
        std::fs::write(&path, "t,u_1,u_2\n0.0,abc,1.0\n").unwrap();
        assert!(matches!(read_control(&path, 2), Err(CsvError::Schema { .. })));
        assert!(matches!(read_control(&dir.path().join("missing.csv"), 2), Err(CsvError::Io { .. })));
    }

    #[test]
    fn setpoints_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("setpoints.csv");
        let mesh = SpatialMesh::new(3, 1.0).unwrap();
        let sp = SetPoints {
            r_i: vec![0.0, 0.0, 0.0, -0.4, 0.0, -0.7, 0.0, -1.1],
            r_e: vec![1.0, 1.0, 1.0, 0.6, 1.0, 0.3, 1.0, -0.1],
            v_i: vec![0.0; 8],
            v_e: vec![0.0; 8],
        };
        write_setpoints(&path, &mesh, &sp, 2).unwrap();
        assert_eq!(read_setpoints(&path, &mesh, 2).unwrap(), sp);
        assert!(read_setpoints(&path, &SpatialMesh::new(4, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn snapshot_step_selection() {
        let levels: Vec<f64> = (0..=100).map(|k| k as f64 * 0.06).collect();
        assert_eq!(snapshot_steps(&levels, &[6.0, 0.0, 1.5, 3.0, 4.5]), vec![0, 25, 50, 75, 100]);
        assert_eq!(snapshot_steps(&levels, &[0.01, 0.02]), vec![0]);
    }
}
