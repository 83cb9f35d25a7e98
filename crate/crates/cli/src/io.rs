//! File loading and number formatting shared by the commands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use switched_lss::lss_core::LssDims;
use switched_lss::{MarkovFamily, SwitchedLinearSystem};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_system(path: &Path) -> Result<SwitchedLinearSystem> {
    SwitchedLinearSystem::from_json(&read(path)?).with_context(|| format!("invalid system file {}", path.display()))
}

pub fn load_markov(path: &Path, dims: Option<LssDims>) -> Result<MarkovFamily> {
    MarkovFamily::from_text(&read(path)?, dims).with_context(|| format!("invalid Markov file {}", path.display()))
}

/// `D,m,p`.
pub fn parse_dims(s: &str) -> std::result::Result<LssDims, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad number {t:?} in {s:?}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [d, m, p] if d > 0 && m > 0 && p > 0 => Ok(LssDims::new(d, m, p)),
        [_, _, _] => Err("D, m and p must be positive".into()),
        _ => Err(format!("expected D,m,p, found {s:?}")),
    }
}

/// Input sequence from a headerless CSV file, one row of `m` values per step.
pub fn load_inputs(path: &Path, m: usize, steps: usize) -> Result<Vec<DVector<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), n + 1))?;
        let values = record
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("{}: row {}: bad number", path.display(), n + 1))?;
        if values.len() != m {
            bail!("{}: row {} has {} values, the system has {m} inputs", path.display(), n + 1, values.len());
        }
        out.push(DVector::from_vec(values));
    }
    if out.len() != steps {
        bail!("{}: {} input rows for a word of length {steps}", path.display(), out.len());
    }
    Ok(out)
}

/// `<stem>.index.csv` next to the matrix file.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.index.csv"))
}

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

pub fn matrix(m: &DMatrix<f64>, indent: &str) -> String {
    if m.nrows() == 0 || m.ncols() == 0 {
        return format!("{indent}({}x{} empty)\n", m.nrows(), m.ncols());
    }
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| num(x)).collect();
        out.push_str(indent);
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
