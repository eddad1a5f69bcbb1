//! CSV and summary writers. Numbers carry 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use plap_core::DiscreteField;

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// `key = value` lines, in insertion order.
#[derive(Default)]
pub struct Summary {
    lines: Vec<(String, String)>,
}

impl Summary {
    pub fn text(&mut self, key: &str, value: impl Into<String>) {
        self.lines.push((key.into(), value.into()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        self.text(key, num(value));
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.text(key, value.to_string());
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Node coordinates, value, `|∇u|` and measure weight.
pub fn field_csv(u: &DiscreteField) -> Csv {
    let g = u.grid();
    let two_d = g.as_2d().is_some();
    let mut csv = Csv::new(if two_d { &["x", "y", "value", "grad_norm", "weight"] } else { &["t", "value", "grad_norm", "weight"] });
    let grad = g.grad(u.values());
    for (k, (v, w)) in u.values().iter().zip(g.weights()).enumerate() {
        let (x, y) = g.point(k);
        let gn = grad[k][0].hypot(grad[k][1]);
        let mut cells = vec![num(x)];
        if two_d {
            cells.push(num(y));
        }
        cells.extend([num(*v), num(gn), num(*w)]);
        csv.row(&cells);
    }
    csv
}

/// Collects output files and writes them once the command has finished.
pub struct Output {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Output {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir, files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn write(&self) -> Result<(), CliError> {
        if self.files.is_empty() {
            return Err(CliError::Usage("nothing to write".into()));
        }
        fs::create_dir_all(&self.dir).map_err(|e| io(&self.dir, e))?;
        for (name, contents) in &self.files {
            let path = self.dir.join(name);
            fs::write(&path, contents).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
