//! CSV and plot-script emission. Every CSV starts with a header naming each
//! column and its unit; numbers use Rust's shortest round-trip formatting so
//! reruns are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qes_core::Result;

pub struct CsvWriter {
    w: BufWriter<File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{}", header.join(","))?;
        Ok(Self {
            w,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, fields: &[Field]) -> Result<()> {
        debug_assert_eq!(fields.len(), self.columns, "CSV row width");
        let line: Vec<String> = fields.iter().map(Field::render).collect();
        writeln!(self.w, "{}", line.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    F(f64),
    U(u64),
    B(bool),
    Opt(Option<f64>),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::F(x) | Field::Opt(Some(x)) => number(*x),
            Field::U(x) => format!("{x}"),
            Field::B(x) => (if *x { "1" } else { "0" }).to_string(),
            Field::Opt(None) => String::new(),
        }
    }
}

/// Shortest round-trip form, in exponent notation for very small or large
/// magnitudes.
pub fn number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Creates the output directory (and parents).
pub fn prepare_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

/// A gnuplot command file drawing `series` (column pairs of `csv`, given as
/// `(x column, y column, title)`, 1-based) as lines.
pub fn write_gnuplot(
    path: &Path,
    csv: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(usize, usize, &str)],
    style: &str,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let png = Path::new(csv).with_extension("png");
    writeln!(w, "set datafile separator ','")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set terminal pngcairo size 900,600")?;
    writeln!(w, "set output '{}'", png.display())?;
    writeln!(w, "set xlabel '{xlabel}'")?;
    writeln!(w, "set ylabel '{ylabel}'")?;
    let plots: Vec<String> = series
        .iter()
        .map(|(x, y, title)| format!("'{csv}' using {x}:{y} with {style} title '{title}'"))
        .collect();
    writeln!(w, "plot {}", plots.join(", \\\n     "))?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        let mut w = CsvWriter::create(&p, &["x_ns", "y_au", "flag"]).unwrap();
        w.row(&[Field::F(0.5), Field::Opt(None), Field::B(true)]).unwrap();
        w.row(&[Field::U(3), Field::F(-1e-20), Field::B(false)]).unwrap();
        w.finish().unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x_ns,y_au,flag\n0.5,,1\n3,-1e-20,0\n");
    }

    #[test]
    fn gnuplot_script_references_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.gp");
        write_gnuplot(&p, "a.csv", "t (ns)", "i (a.u.)", &[(1, 2, "trace")], "lines").unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("'a.csv' using 1:2 with lines title 'trace'"));
        assert!(text.contains("set output 'a.png'"));
    }
}
