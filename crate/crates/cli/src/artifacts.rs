//! Files written by `run` and read back by `verify`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use scf_core::group::fourier;
use scf_core::{GroupFunction, IndexSet, SpectrumSet};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const REPORT: &str = "report.json";
pub const B: &str = "b.json";
pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const SPECTRUM_SVG: &str = "spectrum.svg";
pub const FIELDS: &str = "fields.json";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const FIT: &str = "fit.json";

/// Writes to a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BFile {
    pub orders: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVec {
    pub fn from_function(f: &GroupFunction) -> Self {
        Self { re: f.values().iter().map(|z| z.re).collect(), im: f.values().iter().map(|z| z.im).collect() }
    }

    pub fn to_values(&self) -> CliResult<Vec<num_complex::Complex64>> {
        if self.re.len() != self.im.len() {
            return Err(CliError::Config("real and imaginary parts differ in length".into()));
        }
        Ok(self.re.iter().zip(&self.im).map(|(&a, &b)| num_complex::Complex64::new(a, b)).collect())
    }
}

/// Raw outputs of a run, enough to recompute the report from scratch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fields {
    pub config: RunConfig,
    pub a: Vec<usize>,
    pub w: Vec<f64>,
    pub f_final: ComplexVec,
    pub f00: ComplexVec,
    pub k_set: Vec<usize>,
    pub r: Vec<usize>,
    pub s: Vec<usize>,
    pub t_final: f64,
    pub epsilon: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub char_index: usize,
    pub abs_coeff: f64,
    #[serde(rename = "in_K")]
    pub in_k: u8,
    #[serde(rename = "in_R")]
    pub in_r: u8,
    #[serde(rename = "in_S")]
    pub in_s: u8,
}

pub fn spectrum_rows(f: &GroupFunction, k: &SpectrumSet, r: &SpectrumSet, s: &SpectrumSet) -> Vec<SpectrumRow> {
    let fh = fourier(f);
    fh.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| SpectrumRow {
            char_index: i,
            abs_coeff: c.norm(),
            in_k: k.contains(i) as u8,
            in_r: r.contains(i) as u8,
            in_s: s.contains(i) as u8,
        })
        .collect()
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_spectrum_csv(path: &Path) -> CliResult<Vec<SpectrumRow>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rd
        .headers()
        .map_err(|e| CliError::Config(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header != ["char_index", "abs_coeff", "in_K", "in_R", "in_S"] {
        return Err(CliError::Config(format!("{}: unexpected header {header:?}", path.display())));
    }
    rd.deserialize().collect::<Result<_, _>>().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Index runs `[lo, hi)` of a set, for shading.
fn runs(set: &IndexSet) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for i in set.iter() {
        match out.last_mut() {
            Some(last) if last.1 == i => last.1 = i + 1,
            _ => out.push((i, i + 1)),
        }
    }
    out
}

/// Stem plot of `|𝓕f|` over the character index with `K`, `R`, `S` shaded.
pub fn spectrum_svg(rows: &[SpectrumRow], k: &IndexSet, r: &IndexSet, s: &IndexSet) -> String {
    let (width, height) = (960.0, 360.0);
    let (left, right, top, bottom) = (56.0, 16.0, 28.0, 40.0);
    let pw = width - left - right;
    let ph = height - top - bottom;
    let n = rows.len().max(1) as f64;
    let peak = rows.iter().map(|r| r.abs_coeff).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let x = |i: f64| left + (i + 0.5) * pw / n;
    let base = top + ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let bands = [(k, "K", "#4c72b0"), (r, "R", "#55a868"), (s, "S", "#dd8452")];
    for (set, _, colour) in bands {
        for (lo, hi) in runs(set) {
            let x0 = left + lo as f64 * pw / n;
            let w = (hi - lo) as f64 * pw / n;
            let _ = writeln!(
                svg,
                r#"<rect x="{x0:.2}" y="{top}" width="{w:.2}" height="{ph}" fill="{colour}" fill-opacity="0.18"/>"#
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{base}" x2="{}" y2="{base}" stroke="black"/><line x1="{left}" y1="{top}" x2="{left}" y2="{base}" stroke="black"/>"#,
        left + pw
    );
    let dots = rows.len() <= 512;
    for row in rows.iter().filter(|r| r.abs_coeff > 0.0) {
        let xi = x(row.char_index as f64);
        let y = base - ph * row.abs_coeff / peak;
        let _ = writeln!(svg, r##"<line x1="{xi:.2}" y1="{base}" x2="{xi:.2}" y2="{y:.2}" stroke="#333333" stroke-width="1"/>"##);
        if dots {
            let _ = writeln!(svg, r##"<circle cx="{xi:.2}" cy="{y:.2}" r="1.8" fill="#333333"/>"##);
        }
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}">{peak:.3e}</text>"#, 4, top + 4.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}">0</text>"#, left - 12.0, base + 4.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}">character index (0 … {})</text>"#, left + pw / 2.0 - 60.0, height - 12.0, rows.len().saturating_sub(1));
    for (i, (_, name, colour)) in bands.iter().enumerate() {
        let lx = left + pw - 150.0 + 50.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="8" width="12" height="12" fill="{colour}" fill-opacity="0.5"/><text x="{}" y="18">{name}</text>"#,
            lx + 16.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_of_a_set() {
        let s = IndexSet::from_indices(10, [0, 1, 2, 5, 7, 8]);
        assert_eq!(runs(&s), vec![(0, 3), (5, 6), (7, 9)]);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
