use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// A CSV table held in memory; cells are formatted on insertion so files are
/// byte-identical for identical inputs.
pub struct Table {
    header: &'static [&'static str],
    body: String,
}

/// One CSV cell.
pub enum Cell {
    Text(String),
    Int(u64),
    Real(f64),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<Option<usize>> for Cell {
    fn from(x: Option<usize>) -> Self {
        x.map_or(Cell::Empty, |v| Cell::Int(v as u64))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Table {
            header,
            body: String::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        let line: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Text(s) => quote(&s),
                Cell::Int(v) => v.to_string(),
                Cell::Real(x) => format!("{x:e}"),
                Cell::Empty => String::new(),
            })
            .collect();
        let _ = writeln!(self.body, "{}", line.join(","));
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, self.render().as_bytes())
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Written next to every run's outputs; `config` and `seed` rerun it.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'static str,
    pub seed: u64,
    pub config_path: Option<PathBuf>,
    pub config: String,
    pub outputs: Vec<String>,
    pub threads: usize,
    pub wall_time_s: f64,
    pub results: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_render() {
        let mut t = Table::new(&["a", "b", "c", "d"]);
        t.row(vec!["x,y".into(), 3usize.into(), 0.5.into(), Cell::Empty]);
        assert_eq!(t.render(), "a,b,c,d\n\"x,y\",3,5e-1,\n");
    }
}
