//! File formats: CSV tables, legacy ASCII VTK and Matrix Market.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hodge::StepDiagnostics;
use crate::mesh::Mesh;
use crate::metrics::ErrorRow;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

pub const ERRORS_HEADER: [&str; 8] = [
    "h",
    "tau",
    "scheme",
    "e_psi_L2",
    "e_mod_psi_L2",
    "e_A_L2",
    "e_u_H1",
    "e_v_H1",
];

pub const DIAGNOSTICS_HEADER: [&str; 10] = [
    "step",
    "t",
    "psi_L2",
    "grad_u_L2",
    "grad_v_L2",
    "solver_iters_psi",
    "solver_iters_p",
    "solver_iters_q",
    "solver_iters_u",
    "solver_iters_v",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Config(format!("bad number {s:?}: {e}")))
}

fn error_fields(r: &ErrorRow) -> Vec<String> {
    let mut out = vec![fmt_num(r.h), fmt_num(r.tau), r.scheme.clone()];
    out.extend([r.e_psi, r.e_mod_psi, r.e_a, r.e_u, r.e_v].map(fmt_num));
    out
}

fn parse_error_fields(rec: &csv::StringRecord, offset: usize) -> Result<ErrorRow> {
    let n = |i: usize| parse_num(&rec[offset + i]);
    Ok(ErrorRow {
        h: n(0)?,
        tau: n(1)?,
        scheme: rec[offset + 2].to_string(),
        e_psi: n(3)?,
        e_mod_psi: n(4)?,
        e_a: n(5)?,
        e_u: n(6)?,
        e_v: n(7)?,
    })
}

fn check_header(rdr: &mut csv::Reader<File>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Config(format!("unexpected CSV header {:?}", header)));
    }
    Ok(())
}

pub fn write_errors_csv(path: &Path, rows: &[ErrorRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ERRORS_HEADER)?;
    for r in rows {
        w.write_record(error_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_errors_csv(path: &Path) -> Result<Vec<ErrorRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    check_header(&mut rdr, &ERRORS_HEADER)?;
    rdr.records()
        .map(|rec| parse_error_fields(&rec?, 0))
        .collect()
}

pub fn write_diagnostics_csv(path: &Path, rows: &[StepDiagnostics]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DIAGNOSTICS_HEADER)?;
    for d in rows {
        let mut rec = vec![
            d.step.to_string(),
            fmt_num(d.t),
            fmt_num(d.psi_l2),
            fmt_num(d.grad_u_l2),
            fmt_num(d.grad_v_l2),
        ];
        rec.extend(d.iters.iter().map(|i| i.to_string()));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<StepDiagnostics>> {
    let mut rdr = csv::Reader::from_path(path)?;
    check_header(&mut rdr, &DIAGNOSTICS_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let int = |i: usize| {
                rec[i]
                    .parse::<usize>()
                    .map_err(|e| Error::Config(format!("bad integer: {e}")))
            };
            Ok(StepDiagnostics {
                step: int(0)?,
                t: parse_num(&rec[1])?,
                psi_l2: parse_num(&rec[2])?,
                grad_u_l2: parse_num(&rec[3])?,
                grad_v_l2: parse_num(&rec[4])?,
                iters: [int(5)?, int(6)?, int(7)?, int(8)?, int(9)?],
            })
        })
        .collect()
}

/// Convergence table: one row per mesh and, when there are at least two
/// meshes, a trailing `rate` row computed from the two finest.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesTable {
    pub runs: Vec<(usize, ErrorRow)>,
    /// Rates for `e_psi, e_mod_psi, e_A, e_u, e_v`; `NaN` where undefined.
    pub rates: Option<[f64; 5]>,
}

pub fn write_rates_csv(path: &Path, table: &RatesTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["M"];
    header.extend(ERRORS_HEADER);
    w.write_record(&header)?;
    for (m, r) in &table.runs {
        let mut rec = vec![m.to_string()];
        rec.extend(error_fields(r));
        w.write_record(rec)?;
    }
    if let Some(rates) = table.rates {
        let scheme = table
            .runs
            .last()
            .map(|(_, r)| r.scheme.clone())
            .unwrap_or_default();
        let mut rec = vec!["rate".to_string(), String::new(), String::new(), scheme];
        rec.extend(rates.map(fmt_num));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rates_csv(path: &Path) -> Result<RatesTable> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut header = vec!["M"];
    header.extend(ERRORS_HEADER);
    check_header(&mut rdr, &header)?;
    let mut runs = Vec::new();
    let mut rates = None;
    for rec in rdr.records() {
        let rec = rec?;
        if &rec[0] == "rate" {
            let n = |i: usize| parse_num(&rec[4 + i]);
            rates = Some([n(0)?, n(1)?, n(2)?, n(3)?, n(4)?]);
        } else {
            let m = rec[0]
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("bad mesh parameter: {e}")))?;
            runs.push((m, parse_error_fields(&rec, 1)?));
        }
    }
    Ok(RatesTable { runs, rates })
}

/// Field attached to a VTK file.
#[derive(Debug, Clone)]
pub enum VtkData {
    PointScalar(String, Vec<f64>),
    PointVector(String, Vec<[f64; 2]>),
    CellScalar(String, Vec<f64>),
    CellVector(String, Vec<[f64; 2]>),
}

/// Legacy ASCII VTK unstructured grid of linear triangles.
pub fn write_vtk<T: Real>(
    path: &Path,
    mesh: &Mesh<T>,
    title: &str,
    data: &[VtkData],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(
            w,
            "{} {} 0",
            fmt_num(v[0].to_f64_lossy()),
            fmt_num(v[1].to_f64_lossy())
        )?;
    }
    let nt = mesh.num_triangles();
    writeln!(w, "CELLS {} {}", nt, 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    let (point, cell): (Vec<&VtkData>, Vec<&VtkData>) = data
        .iter()
        .partition(|d| matches!(d, VtkData::PointScalar(..) | VtkData::PointVector(..)));
    for (section, count, items) in [
        ("POINT_DATA", mesh.num_vertices(), point),
        ("CELL_DATA", nt, cell),
    ] {
        if items.is_empty() {
            continue;
        }
        writeln!(w, "{section} {count}")?;
        for d in items {
            match d {
                VtkData::PointScalar(name, v) | VtkData::CellScalar(name, v) => {
                    if v.len() != count {
                        return Err(Error::Config(format!(
                            "VTK field {name} has {} values, expected {count}",
                            v.len()
                        )));
                    }
                    writeln!(w, "SCALARS {name} double 1")?;
                    writeln!(w, "LOOKUP_TABLE default")?;
                    for x in v {
                        writeln!(w, "{}", fmt_num(*x))?;
                    }
                }
                VtkData::PointVector(name, v) | VtkData::CellVector(name, v) => {
                    if v.len() != count {
                        return Err(Error::Config(format!(
                            "VTK field {name} has {} values, expected {count}",
                            v.len()
                        )));
                    }
                    writeln!(w, "VECTORS {name} double")?;
                    for x in v {
                        writeln!(w, "{} {} 0", fmt_num(x[0]), fmt_num(x[1]))?;
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Entry types the Matrix Market writer understands.
pub trait MarketEntry: Copy {
    const FIELD: &'static str;
    fn write(self, w: &mut impl Write) -> std::io::Result<()>;
}

impl MarketEntry for f64 {
    const FIELD: &'static str = "real";
    fn write(self, w: &mut impl Write) -> std::io::Result<()> {
        write!(w, "{}", fmt_num(self))
    }
}

impl MarketEntry for f32 {
    const FIELD: &'static str = "real";
    fn write(self, w: &mut impl Write) -> std::io::Result<()> {
        write!(w, "{}", fmt_num(self as f64))
    }
}

impl<T: Real> MarketEntry for Complex<T> {
    const FIELD: &'static str = "complex";
    fn write(self, w: &mut impl Write) -> std::io::Result<()> {
        write!(
            w,
            "{} {}",
            fmt_num(self.re.to_f64_lossy()),
            fmt_num(self.im.to_f64_lossy())
        )
    }
}

/// Coordinate-format Matrix Market file with 1-based indices.
pub fn write_matrix_market<S: crate::scalar::Scalar + MarketEntry>(
    path: &Path,
    a: &CsrMatrix<S>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate {} general", S::FIELD)?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        for (j, v) in a.row(i) {
            write!(w, "{} {} ", i + 1, j + 1)?;
            v.write(&mut w)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_l_shape_mesh;

    fn row(scheme: &str, h: f64) -> ErrorRow {
        ErrorRow {
            h,
            tau: h,
            scheme: scheme.into(),
            e_psi: 0.1 / 3.0,
            e_mod_psi: 1e-300,
            e_a: 2.5,
            e_u: 0.0,
            e_v: 7.0e-5,
        }
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.1047e-5, f64::MIN_POSITIVE, 1e300, -2.5] {
            assert_eq!(parse_num(&fmt_num(x)).unwrap(), x);
        }
        assert_eq!(fmt_num(0.0625), "6.2500000000000000e-2");
    }

    #[test]
    fn errors_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("errors.csv");
        let rows = vec![row("hodge", 1.0 / 16.0), row("direct", 1.0 / 32.0)];
        write_errors_csv(&p, &rows).unwrap();
        assert_eq!(read_errors_csv(&p).unwrap(), rows);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("h,tau,scheme,e_psi_L2,e_mod_psi_L2,e_A_L2,e_u_H1,e_v_H1\n"));
    }

    #[test]
    fn diagnostics_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("diagnostics.csv");
        let rows = vec![
            StepDiagnostics {
                step: 0,
                t: 0.0,
                psi_l2: 0.0,
                grad_u_l2: 0.0,
                grad_v_l2: 0.0,
                iters: [0; 5],
            },
            StepDiagnostics {
                step: 1,
                t: 0.0625,
                psi_l2: 1.5e-3,
                grad_u_l2: 0.2,
                grad_v_l2: 0.3,
                iters: [9, 1, 1, 1, 1],
            },
        ];
        write_diagnostics_csv(&p, &rows).unwrap();
        assert_eq!(read_diagnostics_csv(&p).unwrap(), rows);
    }

    #[test]
    fn rates_csv_round_trip_with_and_without_rates() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rates.csv");
        let table = RatesTable {
            runs: vec![
                (16, row("hodge", 1.0 / 16.0)),
                (32, row("hodge", 1.0 / 32.0)),
            ],
            rates: Some([1.0, 0.9, 0.8, 0.7, 0.6]),
        };
        write_rates_csv(&p, &table).unwrap();
        assert_eq!(read_rates_csv(&p).unwrap(), table);
        let single = RatesTable {
            runs: vec![(16, row("hodge", 1.0 / 16.0))],
            rates: None,
        };
        write_rates_csv(&p, &single).unwrap();
        assert_eq!(read_rates_csv(&p).unwrap(), single);
    }

    #[test]
    fn vtk_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mesh.vtk");
        let mesh = build_l_shape_mesh::<f64>(2).unwrap();
        let data = vec![
            VtkData::PointScalar("psi_abs".into(), vec![1.0; mesh.num_vertices()]),
            VtkData::CellVector("A".into(), vec![[0.0, 1.0]; mesh.num_triangles()]),
        ];
        write_vtk(&p, &mesh, "test", &data).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains(&format!("POINTS {} double", mesh.num_vertices())));
        assert!(text.contains(&format!("CELL_TYPES {}", mesh.num_triangles())));
        assert!(text.contains("SCALARS psi_abs double 1"));
        assert!(text.contains("VECTORS A double"));
        let bad = vec![VtkData::PointScalar("x".into(), vec![1.0])];
        assert!(write_vtk(&p, &mesh, "test", &bad).is_err());
    }

    #[test]
    fn matrix_market_header_and_entries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        let a = CsrMatrix::from_dense(&[
            vec![Complex::new(1.0, 2.0), Complex::new(0.0, 0.0)],
            vec![Complex::new(0.0, 0.0), Complex::new(3.0, 0.0)],
        ]);
        write_matrix_market(&p, &a).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("%%MatrixMarket matrix coordinate complex general")
        );
        assert_eq!(lines.next(), Some(&*format!("2 2 {}", a.nnz())));
    }
}
