//! Discrete-time linear switched systems
//!
//! ```text
//! x_{t+1} = A_{q_t} x_t + B_{q_t} u_t,   y_t = C_{q_t} x_t,   x_0 fixed
//! ```
//!
//! Modes are numbered `1..=D` on every public surface.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::max_abs_diff;

/// A finite word over the modes `1..=D`. The empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ModeWord(Vec<usize>);

impl ModeWord {
    pub fn empty() -> Self {
        ModeWord(Vec::new())
    }

    /// Builds a word from 1-based mode letters. Letter 0 is rejected; the
    /// upper bound is checked against a system or family when the word is used.
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::InvalidMode {
                letter: 0,
                modes: letters.iter().copied().max().unwrap_or(0),
            });
        }
        Ok(ModeWord(letters))
    }

    /// Single-letter word.
    pub fn letter(q: usize) -> Self {
        assert!(q >= 1, "modes are 1-based");
        ModeWord(vec![q])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// `self · other`
    pub fn concat(&self, other: &ModeWord) -> ModeWord {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        ModeWord(letters)
    }

    /// `self · q`
    pub fn push(&self, q: usize) -> ModeWord {
        let mut letters = self.0.clone();
        letters.push(q);
        ModeWord(letters)
    }

    /// `q · self`
    pub fn prepend(&self, q: usize) -> ModeWord {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(q);
        letters.extend_from_slice(&self.0);
        ModeWord(letters)
    }

    /// `(v, q)` with `self = v · q`.
    pub fn split_last(&self) -> Option<(ModeWord, usize)> {
        let (&q, rest) = self.0.split_last()?;
        Some((ModeWord(rest.to_vec()), q))
    }

    /// `(q, v)` with `self = q · v`.
    pub fn split_first(&self) -> Option<(usize, ModeWord)> {
        let (&q, rest) = self.0.split_first()?;
        Some((q, ModeWord(rest.to_vec())))
    }

    /// Letters `j..=k` (0-based); empty when `j > k`.
    pub fn sub_word(&self, j: usize, k: usize) -> ModeWord {
        if j > k {
            return ModeWord::empty();
        }
        ModeWord(self.0[j..=k].to_vec())
    }

    /// Checks every letter against the mode count.
    pub fn validate(&self, modes: usize) -> Result<()> {
        match self.0.iter().find(|&&q| q == 0 || q > modes) {
            Some(&letter) => Err(Error::InvalidMode { letter, modes }),
            None => Ok(()),
        }
    }

    /// Compact text form: digits when every letter is below 10, dot-separated
    /// otherwise, `-` for the empty word.
    pub fn to_compact(&self) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        if self.0.iter().all(|&q| q < 10) {
            self.0.iter().map(|q| q.to_string()).collect()
        } else {
            self.0
                .iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

/// Length-first, then letter-wise ordering of words.
impl Ord for ModeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ModeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ModeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// Parses `-`/`ε`/empty as the empty word, `1,2,2` or `1.2.2` as separated
/// letters, and `122` as one digit per letter.
impl FromStr for ModeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "ε" {
            return Ok(ModeWord::empty());
        }
        let parse = |tok: &str| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::format("word", format!("bad letter {tok:?} in {s:?}")))
        };
        let letters = if s.contains(',') || s.contains('.') {
            s.split([',', '.']).map(parse).collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| parse(&c.to_string()))
                .collect::<Result<Vec<_>>>()?
        };
        ModeWord::new(letters)
    }
}

/// A non-empty sequence of (mode, input) pairs fed to a system.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridWord {
    modes: ModeWord,
    inputs: Vec<DVector<f64>>,
}

impl HybridWord {
    pub fn new(modes: ModeWord, inputs: Vec<DVector<f64>>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyWord);
        }
        if modes.len() != inputs.len() {
            return Err(Error::dims("hybrid word inputs", modes.len(), inputs.len()));
        }
        let m = inputs[0].len();
        if let Some(u) = inputs.iter().find(|u| u.len() != m) {
            return Err(Error::dims("hybrid word input vector", m, u.len()));
        }
        Ok(HybridWord { modes, inputs })
    }

    /// Mode word paired with zero inputs of dimension `m`.
    pub fn zero_input(modes: ModeWord, m: usize) -> Result<Self> {
        let inputs = vec![DVector::zeros(m); modes.len()];
        HybridWord::new(modes, inputs)
    }

    pub fn modes(&self) -> &ModeWord {
        &self.modes
    }

    pub fn inputs(&self) -> &[DVector<f64>] {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// The first `len` steps.
    pub fn prefix(&self, len: usize) -> Result<HybridWord> {
        HybridWord::new(
            ModeWord(self.modes.0[..len].to_vec()),
            self.inputs[..len].to_vec(),
        )
    }
}

/// `A_w = A_{σ_k} ⋯ A_{σ_1}` for `w = σ_1 ⋯ σ_k`; the identity for `w = ε`.
pub fn word_matrix_product(family: &[DMatrix<f64>], w: &ModeWord) -> Result<DMatrix<f64>> {
    let n = family.first().map(|a| a.nrows()).unwrap_or(0);
    w.validate(family.len())?;
    let mut out = DMatrix::identity(n, n);
    for &q in w.letters() {
        out = &family[q - 1] * out;
    }
    Ok(out)
}

/// Applies `A_w` to a vector without forming the product.
pub fn apply_word(family: &[DMatrix<f64>], w: &ModeWord, x: &DVector<f64>) -> Result<DVector<f64>> {
    w.validate(family.len())?;
    let mut out = x.clone();
    for &q in w.letters() {
        out = &family[q - 1] * out;
    }
    Ok(out)
}

/// Mode count, input dimension and output dimension shared by a system, its
/// input-output map and its Markov parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LssDims {
    pub modes: usize,
    pub m: usize,
    pub p: usize,
}

impl LssDims {
    pub fn new(modes: usize, m: usize, p: usize) -> Self {
        LssDims { modes, m, p }
    }

    /// Number of Hankel column labels per word, `mD + 1`.
    pub fn index_count(&self) -> usize {
        self.m * self.modes + 1
    }

    /// Number of Hankel rows per word, `pD`.
    pub fn stacked_outputs(&self) -> usize {
        self.p * self.modes
    }
}

/// A discrete-time linear switched system with `D` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedLinearSystem {
    a: Vec<DMatrix<f64>>,
    b: Vec<DMatrix<f64>>,
    c: Vec<DMatrix<f64>>,
    x0: DVector<f64>,
    m: usize,
    p: usize,
}

impl SwitchedLinearSystem {
    /// Builds a system from per-mode matrices (index 0 holds mode 1). The
    /// input and output dimensions are given explicitly so that state
    /// dimension 0 is representable.
    pub fn new(
        a: Vec<DMatrix<f64>>,
        b: Vec<DMatrix<f64>>,
        c: Vec<DMatrix<f64>>,
        x0: DVector<f64>,
        m: usize,
        p: usize,
    ) -> Result<Self> {
        let d = a.len();
        if d == 0 {
            return Err(Error::Shape("a switched system needs at least one mode".into()));
        }
        if m == 0 || p == 0 {
            return Err(Error::Shape("input and output dimensions must be positive".into()));
        }
        if b.len() != d {
            return Err(Error::dims("number of B matrices", d, b.len()));
        }
        if c.len() != d {
            return Err(Error::dims("number of C matrices", d, c.len()));
        }
        let n = x0.len();
        for q in 0..d {
            let mode = q + 1;
            if a[q].shape() != (n, n) {
                return Err(Error::Shape(format!(
                    "A_{mode} is {:?}, expected ({n}, {n})",
                    a[q].shape()
                )));
            }
            if b[q].shape() != (n, m) {
                return Err(Error::Shape(format!(
                    "B_{mode} is {:?}, expected ({n}, {m})",
                    b[q].shape()
                )));
            }
            if c[q].shape() != (p, n) {
                return Err(Error::Shape(format!(
                    "C_{mode} is {:?}, expected ({p}, {n})",
                    c[q].shape()
                )));
            }
        }
        Ok(SwitchedLinearSystem { a, b, c, x0, m, p })
    }

    /// The state-dimension-0 system realizing the identically zero map.
    pub fn zero(modes: usize, m: usize, p: usize) -> Result<Self> {
        let d = modes.max(1);
        SwitchedLinearSystem::new(
            vec![DMatrix::zeros(0, 0); d],
            vec![DMatrix::zeros(0, m); d],
            vec![DMatrix::zeros(p, 0); d],
            DVector::zeros(0),
            m,
            p,
        )
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    pub fn dims(&self) -> LssDims {
        LssDims::new(self.modes(), self.m, self.p)
    }

    pub fn state_dim(&self) -> usize {
        self.x0.len()
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn output_dim(&self) -> usize {
        self.p
    }

    /// `A_q` for the 1-based mode `q`.
    pub fn a(&self, q: usize) -> &DMatrix<f64> {
        &self.a[q - 1]
    }

    pub fn b(&self, q: usize) -> &DMatrix<f64> {
        &self.b[q - 1]
    }

    pub fn c(&self, q: usize) -> &DMatrix<f64> {
        &self.c[q - 1]
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn a_family(&self) -> &[DMatrix<f64>] {
        &self.a
    }

    pub fn b_family(&self) -> &[DMatrix<f64>] {
        &self.b
    }

    pub fn c_family(&self) -> &[DMatrix<f64>] {
        &self.c
    }

    pub fn a_word(&self, w: &ModeWord) -> Result<DMatrix<f64>> {
        word_matrix_product(&self.a, w)
    }

    /// New system with state `x' = t x`, for an invertible `t`.
    pub fn transformed(&self, t: &DMatrix<f64>, t_inv: &DMatrix<f64>) -> Result<Self> {
        SwitchedLinearSystem::new(
            self.a.iter().map(|a| t * a * t_inv).collect(),
            self.b.iter().map(|b| t * b).collect(),
            self.c.iter().map(|c| c * t_inv).collect(),
            t * &self.x0,
            self.m,
            self.p,
        )
    }

    fn check_state(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.state_dim() {
            return Err(Error::dims("state vector", self.state_dim(), x.len()));
        }
        Ok(())
    }

    fn check_word(&self, w: &HybridWord) -> Result<()> {
        w.modes().validate(self.modes())?;
        if w.input_dim() != self.m {
            return Err(Error::dims("input vector", self.m, w.input_dim()));
        }
        Ok(())
    }

    /// State reached from `x_init` after feeding all of `w`; `None` stands
    /// for the empty word and returns `x_init`.
    pub fn simulate_state(&self, x_init: &DVector<f64>, w: Option<&HybridWord>) -> Result<DVector<f64>> {
        self.check_state(x_init)?;
        let Some(w) = w else {
            return Ok(x_init.clone());
        };
        self.check_word(w)?;
        let mut x = x_init.clone();
        for (&q, u) in w.modes().letters().iter().zip(w.inputs()) {
            x = &self.a[q - 1] * x + &self.b[q - 1] * u;
        }
        Ok(x)
    }

    /// Output at the last step of `w` when started from `x_init`.
    pub fn simulate_output(&self, x_init: &DVector<f64>, w: &HybridWord) -> Result<DVector<f64>> {
        self.check_state(x_init)?;
        self.check_word(w)?;
        let t = w.len() - 1;
        let mut x = x_init.clone();
        for (&q, u) in w.modes().letters()[..t].iter().zip(w.inputs()) {
            x = &self.a[q - 1] * x + &self.b[q - 1] * u;
        }
        let q_last = w.modes().letters()[t];
        Ok(&self.c[q_last - 1] * x)
    }

    /// Outputs `y_0, …, y_t` along `w`.
    pub fn output_trajectory(&self, x_init: &DVector<f64>, w: &HybridWord) -> Result<Vec<DVector<f64>>> {
        self.check_state(x_init)?;
        self.check_word(w)?;
        let mut x = x_init.clone();
        let mut ys = Vec::with_capacity(w.len());
        for (&q, u) in w.modes().letters().iter().zip(w.inputs()) {
            ys.push(&self.c[q - 1] * &x);
            x = &self.a[q - 1] * x + &self.b[q - 1] * u;
        }
        Ok(ys)
    }
}

/// An input-output map `f : (Q × R^m)^+ → R^p`.
pub trait IoMap: Send + Sync {
    fn modes(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn eval(&self, w: &HybridWord) -> Result<DVector<f64>>;

    fn dims(&self) -> LssDims {
        LssDims::new(self.modes(), self.input_dim(), self.output_dim())
    }
}

/// The input-output map of a system from its own initial state.
#[derive(Debug, Clone, Copy)]
pub struct SystemIoMap<'a> {
    system: &'a SwitchedLinearSystem,
}

pub fn io_map(system: &SwitchedLinearSystem) -> SystemIoMap<'_> {
    SystemIoMap { system }
}

impl IoMap for SystemIoMap<'_> {
    fn modes(&self) -> usize {
        self.system.modes()
    }

    fn input_dim(&self) -> usize {
        self.system.input_dim()
    }

    fn output_dim(&self) -> usize {
        self.system.output_dim()
    }

    fn eval(&self, w: &HybridWord) -> Result<DVector<f64>> {
        self.system.simulate_output(self.system.x0(), w)
    }
}

/// Owned version of [`SystemIoMap`], usable where a `'static` map is needed.
impl IoMap for SwitchedLinearSystem {
    fn modes(&self) -> usize {
        SwitchedLinearSystem::modes(self)
    }

    fn input_dim(&self) -> usize {
        self.m
    }

    fn output_dim(&self) -> usize {
        self.p
    }

    fn eval(&self, w: &HybridWord) -> Result<DVector<f64>> {
        self.simulate_output(&self.x0, w)
    }
}

type IoFn = dyn Fn(&HybridWord) -> DVector<f64> + Send + Sync;

/// An input-output map given by a closure.
#[derive(Clone)]
pub struct FnIoMap {
    modes: usize,
    m: usize,
    p: usize,
    f: Arc<IoFn>,
}

impl FnIoMap {
    pub fn new(
        modes: usize,
        m: usize,
        p: usize,
        f: impl Fn(&HybridWord) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        FnIoMap {
            modes,
            m,
            p,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnIoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnIoMap")
            .field("modes", &self.modes)
            .field("m", &self.m)
            .field("p", &self.p)
            .finish_non_exhaustive()
    }
}

impl IoMap for FnIoMap {
    fn modes(&self) -> usize {
        self.modes
    }

    fn input_dim(&self) -> usize {
        self.m
    }

    fn output_dim(&self) -> usize {
        self.p
    }

    fn eval(&self, w: &HybridWord) -> Result<DVector<f64>> {
        w.modes().validate(self.modes)?;
        if w.input_dim() != self.m {
            return Err(Error::dims("input vector", self.m, w.input_dim()));
        }
        let y = (self.f)(w);
        if y.len() != self.p {
            return Err(Error::dims("oracle output", self.p, y.len()));
        }
        Ok(y)
    }
}

/// A matrix `T` intertwining two systems: `T x0 = x0'`, `A'_q T = T A_q`,
/// `B'_q = T B_q`, `C'_q T = C_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LssMorphism {
    pub t: DMatrix<f64>,
}

/// Max-norm residual of each morphism equation (maximized over modes).
#[derive(Debug, Clone, PartialEq)]
pub struct MorphismReport {
    pub holds: bool,
    pub tolerance: f64,
    pub initial_state: f64,
    pub transitions: f64,
    pub inputs: f64,
    pub outputs: f64,
}

impl MorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.initial_state
            .max(self.transitions)
            .max(self.inputs)
            .max(self.outputs)
    }
}

/// Checks whether `t` is a morphism from `source` to `target`.
pub fn check_morphism(
    source: &SwitchedLinearSystem,
    target: &SwitchedLinearSystem,
    t: &DMatrix<f64>,
    tol: f64,
) -> Result<MorphismReport> {
    if source.modes() != target.modes() {
        return Err(Error::dims("mode count", source.modes(), target.modes()));
    }
    if source.input_dim() != target.input_dim() {
        return Err(Error::dims("input dimension", source.input_dim(), target.input_dim()));
    }
    if source.output_dim() != target.output_dim() {
        return Err(Error::dims("output dimension", source.output_dim(), target.output_dim()));
    }
    if t.nrows() != target.state_dim() {
        return Err(Error::dims("morphism rows", target.state_dim(), t.nrows()));
    }
    if t.ncols() != source.state_dim() {
        return Err(Error::dims("morphism columns", source.state_dim(), t.ncols()));
    }
    let vec_diff = |a: &DVector<f64>, b: &DVector<f64>| {
        a.iter().zip(b.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
    };
    let initial_state = vec_diff(&(t * source.x0()), target.x0());
    let mut transitions = 0.0_f64;
    let mut inputs = 0.0_f64;
    let mut outputs = 0.0_f64;
    for q in 1..=source.modes() {
        transitions = transitions.max(max_abs_diff(&(target.a(q) * t), &(t * source.a(q))));
        inputs = inputs.max(max_abs_diff(target.b(q), &(t * source.b(q))));
        outputs = outputs.max(max_abs_diff(&(target.c(q) * t), source.c(q)));
    }
    let worst = initial_state.max(transitions).max(inputs).max(outputs);
    Ok(MorphismReport {
        holds: worst <= tol,
        tolerance: tol,
        initial_state,
        transitions,
        inputs,
        outputs,
    })
}

/// A matrix in the system file: either a flat row-major list or a list of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixData {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

/// On-disk JSON layout of a system.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SystemFile {
    #[serde(rename = "D")]
    d: usize,
    n: usize,
    m: usize,
    p: usize,
    #[serde(rename = "A")]
    a: Vec<MatrixData>,
    #[serde(rename = "B")]
    b: Vec<MatrixData>,
    #[serde(rename = "C")]
    c: Vec<MatrixData>,
    x0: Vec<f64>,
}

fn matrix_from_data(data: &MatrixData, rows: usize, cols: usize, field: String) -> Result<DMatrix<f64>> {
    match data {
        MatrixData::Flat(values) => {
            if values.len() != rows * cols {
                return Err(Error::format(
                    field,
                    format!("expected {} row-major entries ({rows}x{cols}), found {}", rows * cols, values.len()),
                ));
            }
            Ok(DMatrix::from_row_slice(rows, cols, values))
        }
        MatrixData::Rows(r) => {
            if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                return Err(Error::format(field, format!("expected {rows} rows of {cols} entries")));
            }
            Ok(DMatrix::from_fn(rows, cols, |i, j| r[i][j]))
        }
    }
}

fn matrix_to_data(m: &DMatrix<f64>) -> MatrixData {
    let mut flat = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        flat.extend(m.row(i).iter());
    }
    MatrixData::Flat(flat)
}

impl SwitchedLinearSystem {
    /// Parses the JSON system format. Matrices may be given flat (row-major)
    /// or as nested rows.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SystemFile =
            serde_json::from_str(text).map_err(|e| Error::format("system file", e.to_string()))?;
        let SystemFile { d, n, m, p, .. } = file;
        if d == 0 {
            return Err(Error::format("D", "at least one mode is required"));
        }
        if m == 0 || p == 0 {
            return Err(Error::format(if m == 0 { "m" } else { "p" }, "must be positive"));
        }
        for (name, list) in [("A", &file.a), ("B", &file.b), ("C", &file.c)] {
            if list.len() != d {
                return Err(Error::format(name, format!("expected {d} per-mode matrices, found {}", list.len())));
            }
        }
        if file.x0.len() != n {
            return Err(Error::format("x0", format!("expected {n} entries, found {}", file.x0.len())));
        }
        let collect = |list: &[MatrixData], name: &str, rows: usize, cols: usize| {
            list.iter()
                .enumerate()
                .map(|(q, data)| matrix_from_data(data, rows, cols, format!("{name}[{}]", q + 1)))
                .collect::<Result<Vec<_>>>()
        };
        SwitchedLinearSystem::new(
            collect(&file.a, "A", n, n)?,
            collect(&file.b, "B", n, m)?,
            collect(&file.c, "C", p, n)?,
            DVector::from_vec(file.x0),
            m,
            p,
        )
    }

    /// Serializes to the JSON system format with flat row-major matrices.
    pub fn to_json(&self) -> String {
        let file = SystemFile {
            d: self.modes(),
            n: self.state_dim(),
            m: self.m,
            p: self.p,
            a: self.a.iter().map(matrix_to_data).collect(),
            b: self.b.iter().map(matrix_to_data).collect(),
            c: self.c.iter().map(matrix_to_data).collect(),
            x0: self.x0.iter().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("system serializes")
    }
}
