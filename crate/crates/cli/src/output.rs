//! CSV and summary writers. All numbers use 17 significant digits so fields
//! round-trip through text exactly; iteration order is fixed, so identical
//! runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thinfilm_core::grid::{Field, Grid};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter {
    out: BufWriter<File>,
    pub path: PathBuf,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        let file = File::create(path)?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter {
            out,
            path: path.to_path_buf(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> std::io::Result<()> {
        let mut line = String::with_capacity(values.len() * 26);
        for (k, v) in values.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(*v));
        }
        writeln!(self.out, "{line}")
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

/// Writes one scalar field in the interchange layout `xi1,xi2,value`,
/// row-major with `xi1` varying fastest.
pub fn write_field(path: &Path, grid: &Grid, field: &Field) -> std::io::Result<()> {
    write_columns(path, grid, &["value"], &[field])
}

/// Writes node coordinates plus named columns, row-major.
pub fn write_columns(
    path: &Path,
    grid: &Grid,
    names: &[&str],
    fields: &[&Field],
) -> std::io::Result<()> {
    assert_eq!(names.len(), fields.len());
    let mut header = vec!["xi1", "xi2"];
    header.extend_from_slice(names);
    let mut w = CsvWriter::create(path, &header)?;
    let mut row = Vec::with_capacity(2 + fields.len());
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            row.clear();
            row.push(grid.xi1(i));
            row.push(grid.xi2(j));
            let idx = grid.idx(i, j);
            for f in fields {
                row.push(f.data[idx]);
            }
            w.row(&row)?;
        }
    }
    w.finish()
}

/// Reads a scalar field written by [`write_field`]; checks the node count.
pub fn read_field(path: &Path, grid: &Grid) -> std::io::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::with_capacity(grid.len());
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            continue; // header
        }
        let last = line
            .rsplit(',')
            .next()
            .ok_or_else(|| bad_data(path, k + 1, "empty line"))?;
        let v = last
            .trim()
            .parse::<f64>()
            .map_err(|_| bad_data(path, k + 1, "value column is not a number"))?;
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(bad_data(
            path,
            0,
            &format!(
                "expected {} rows for the grid, found {}",
                grid.len(),
                values.len()
            ),
        ));
    }
    Ok(values)
}

fn bad_data(path: &Path, line: usize, message: &str) -> std::io::Error {
    std::io::Error::new(
        std::io::ErrorKind::InvalidData,
        format!("{}:{line}: {message}", path.display()),
    )
}

/// Key-value run summary; values are written as given.
pub fn write_summary(path: &Path, pairs: &[(String, String)]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (k, v) in pairs {
        writeln!(out, "{k} = {v}")?;
    }
    out.flush()
}

/// Flat JSON object with the insertion order preserved.
pub fn write_json(path: &Path, pairs: &[(String, String)]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{{")?;
    for (k, (key, value)) in pairs.iter().enumerate() {
        let comma = if k + 1 < pairs.len() { "," } else { "" };
        writeln!(out, "  \"{key}\": {value}{comma}")?;
    }
    writeln!(out, "}}")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use thinfilm_core::grid::BoundaryKind;

    #[test]
    fn field_round_trips_exactly() {
        let dir = std::env::temp_dir().join("thinfilm_output_test");
        std::fs::create_dir_all(&dir).unwrap();
        let grid = Grid::new(
            5,
            4,
            (0.0, 1.0),
            (0.0, 2.0),
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
        )
        .unwrap();
        let field = Field::from_fn(&grid, |x, y| (x * 17.3).sin() * (y + 0.1).ln() + 1.0 / 3.0);
        let path = dir.join("field.csv");
        write_field(&path, &grid, &field).unwrap();
        let back = read_field(&path, &grid).unwrap();
        assert_eq!(back, field.data);
        std::fs::remove_dir_all(&dir).ok();
    }
}
