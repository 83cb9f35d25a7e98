//! Markov parameters of input-output maps.
//!
//! For a word `v·q` the initial-state parameter is `S0(vq) = f_{vq}(0,…,0)`
//! and for `q0·v·q` the input parameter of channel `j` is
//! `S_j(q0 v q) = f_{q0 v q}(e_j, 0, …, 0) − f_{q0 v q}(0, …, 0)`.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hankel::{enumerate_words, enumerate_words_of_length, word_count, word_rank};
use crate::lss_core::{HybridWord, IoMap, LssDims, ModeWord};

/// Default absolute tolerance on outputs for [`check_gcr`].
pub const DEFAULT_GCR_TOL: f64 = 1e-9;

/// Default cap on the number of experiments run by [`check_gcr`].
pub const DEFAULT_GCR_CAP: usize = 10_000;

#[derive(Clone)]
enum Store {
    /// Indexed by word rank; entries for words outside the domain are unused.
    Table {
        depth: usize,
        s0: Vec<DVector<f64>>,
        s: Vec<DMatrix<f64>>,
    },
    Lazy(Arc<dyn IoMap>),
}

/// The Markov parameters `S0` and `S = [S_1 … S_m]` of a map, either
/// tabulated up to a word length or computed on demand from an oracle.
#[derive(Clone)]
pub struct MarkovFamily {
    dims: LssDims,
    store: Store,
}

impl fmt::Debug for MarkovFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkovFamily")
            .field("dims", &self.dims)
            .field("depth", &self.depth())
            .finish_non_exhaustive()
    }
}

impl PartialEq for MarkovFamily {
    fn eq(&self, other: &Self) -> bool {
        match (&self.store, &other.store) {
            (Store::Table { depth: d1, s0: a0, s: a }, Store::Table { depth: d2, s0: b0, s: b }) => {
                self.dims == other.dims && d1 == d2 && a0 == b0 && a == b
            }
            _ => false,
        }
    }
}

impl MarkovFamily {
    /// Tabulates closed-form parameters for every word up to `depth`.
    /// `s0` is called on words of length ≥ 1 and `s` on words of length ≥ 2;
    /// `s` returns the `p × m` matrix `[S_1(w) … S_m(w)]`.
    pub fn from_fn(
        modes: usize,
        m: usize,
        p: usize,
        depth: usize,
        s0: impl Fn(&ModeWord) -> DVector<f64>,
        s: impl Fn(&ModeWord) -> DMatrix<f64>,
    ) -> Self {
        let words = enumerate_words(modes, depth);
        let s0_table = words
            .iter()
            .map(|w| if w.is_empty() { DVector::zeros(p) } else { s0(w) })
            .collect();
        let s_table = words
            .iter()
            .map(|w| if w.len() < 2 { DMatrix::zeros(p, m) } else { s(w) })
            .collect();
        MarkovFamily {
            dims: LssDims::new(modes, m, p),
            store: Store::Table {
                depth,
                s0: s0_table,
                s: s_table,
            },
        }
    }

    /// Family that queries `oracle` on every access.
    pub fn lazy(oracle: Arc<dyn IoMap>) -> Self {
        MarkovFamily {
            dims: oracle.dims(),
            store: Store::Lazy(oracle),
        }
    }

    /// The all-zero family.
    pub fn zero(dims: LssDims, depth: usize) -> Self {
        let LssDims { modes, m, p } = dims;
        MarkovFamily::from_fn(modes, m, p, depth, |_| DVector::zeros(p), |_| DMatrix::zeros(p, m))
    }

    pub fn dims(&self) -> LssDims {
        self.dims
    }

    /// Maximal tabulated word length; `None` for oracle-backed families.
    pub fn depth(&self) -> Option<usize> {
        match &self.store {
            Store::Table { depth, .. } => Some(*depth),
            Store::Lazy(_) => None,
        }
    }

    fn check_word(&self, w: &ModeWord) -> Result<()> {
        w.validate(self.dims.modes)?;
        if let Some(depth) = self.depth() {
            if w.len() > depth {
                return Err(Error::OutOfDepth { length: w.len(), depth });
            }
        }
        Ok(())
    }

    /// `S0(w)` for `|w| ≥ 1`.
    pub fn s0(&self, w: &ModeWord) -> Result<DVector<f64>> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        self.check_word(w)?;
        match &self.store {
            Store::Table { s0, .. } => Ok(s0[word_rank(w, self.dims.modes)].clone()),
            Store::Lazy(f) => f.eval(&HybridWord::zero_input(w.clone(), self.dims.m)?),
        }
    }

    /// `[S_1(w) … S_m(w)]` (`p × m`) for `|w| ≥ 2`.
    pub fn s(&self, w: &ModeWord) -> Result<DMatrix<f64>> {
        if w.len() < 2 {
            return Err(Error::Shape(format!(
                "input Markov parameters need words of length at least 2, got {w}"
            )));
        }
        self.check_word(w)?;
        match &self.store {
            Store::Table { s, .. } => Ok(s[word_rank(w, self.dims.modes)].clone()),
            Store::Lazy(f) => impulse_responses(f.as_ref(), w),
        }
    }

    /// `S_j(q0 · v · q)` with 1-based `j`.
    pub fn sj(&self, q0: usize, v: &ModeWord, q: usize, j: usize) -> Result<DVector<f64>> {
        if j == 0 || j > self.dims.m {
            return Err(Error::Shape(format!("input channel {j} outside 1..={}", self.dims.m)));
        }
        let w = v.prepend(q0).push(q);
        Ok(self.s(&w)?.column(j - 1).into_owned())
    }

    /// Combined Markov parameter `M(v)`: block-row `q` is
    /// `[S0(vq), S(1vq), …, S(Dvq)]`.
    pub fn combined(&self, v: &ModeWord) -> Result<CombinedMarkov> {
        let LssDims { modes, m, p } = self.dims;
        let mut block = DMatrix::zeros(p * modes, m * modes + 1);
        for q in 1..=modes {
            let rows = (q - 1) * p;
            let vq = v.push(q);
            block.view_mut((rows, 0), (p, 1)).copy_from(&self.s0(&vq)?);
            for q0 in 1..=modes {
                let col = 1 + (q0 - 1) * m;
                block.view_mut((rows, col), (p, m)).copy_from(&self.s(&vq.prepend(q0))?);
            }
        }
        Ok(CombinedMarkov { v: v.clone(), block })
    }

    /// Tabulated copy of this family up to `depth`.
    pub fn tabulate(&self, depth: usize) -> Result<MarkovFamily> {
        if let Some(own) = self.depth() {
            if depth > own {
                return Err(Error::OutOfDepth { length: depth, depth: own });
            }
        }
        let LssDims { modes, m, p } = self.dims;
        let words = enumerate_words(modes, depth);
        let mut s0 = Vec::with_capacity(words.len());
        let mut s = Vec::with_capacity(words.len());
        for w in &words {
            s0.push(if w.is_empty() { DVector::zeros(p) } else { self.s0(w)? });
            s.push(if w.len() < 2 { DMatrix::zeros(p, m) } else { self.s(w)? });
        }
        Ok(MarkovFamily {
            dims: self.dims,
            store: Store::Table { depth, s0, s },
        })
    }

    /// Largest entry-wise difference over all words up to `depth`.
    pub fn max_difference(&self, other: &MarkovFamily, depth: usize) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "Markov families have dimensions {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        let mut worst = 0.0_f64;
        for w in enumerate_words(self.dims.modes, depth).iter().skip(1) {
            worst = worst.max((self.s0(w)? - other.s0(w)?).amax());
            if w.len() >= 2 {
                worst = worst.max((self.s(w)? - other.s(w)?).amax());
            }
        }
        Ok(worst)
    }

    /// Text dump: an optional header followed by `S0 <word> <p floats>` and
    /// `S <j> <q0> <word> <q> <p floats>` lines. Only table-backed families
    /// can be written.
    pub fn to_text(&self) -> Result<String> {
        let depth = self
            .depth()
            .ok_or_else(|| Error::Shape("an oracle-backed family has no finite table".into()))?;
        let LssDims { modes, m, p } = self.dims;
        let mut out = format!("# markov D={modes} m={m} p={p} depth={depth}\n");
        let floats = |v: &DVector<f64>| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        for len in 1..=depth {
            for w in enumerate_words_of_length(modes, len) {
                let _ = writeln!(out, "S0 {w} {}", floats(&self.s0(&w)?));
            }
        }
        for len in 2..=depth {
            for w in enumerate_words_of_length(modes, len) {
                let s = self.s(&w)?;
                let q0 = w.letters()[0];
                let q = w.letters()[len - 1];
                let v = w.sub_word(1, len - 2);
                for j in 1..=m {
                    let _ = writeln!(out, "S {j} {q0} {v} {q} {}", floats(&s.column(j - 1).into_owned()));
                }
            }
        }
        Ok(out)
    }

    /// Parses a text dump. The header fixes the dimensions; without one they
    /// must be passed in `dims` and the depth is the longest word present.
    /// Every parameter up to the depth must be present.
    pub fn from_text(text: &str, dims: Option<LssDims>) -> Result<MarkovFamily> {
        let mut header: Option<(LssDims, usize)> = None;
        let mut s0_lines: Vec<(ModeWord, Vec<f64>)> = Vec::new();
        let mut s_lines: Vec<(usize, ModeWord, Vec<f64>)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let field = || format!("line {}", n + 1);
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if header.is_none() && rest.trim_start().starts_with("markov") {
                    header = Some(parse_header(rest, &field())?);
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let floats = |toks: &[&str]| {
                toks.iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::format(field(), format!("bad number {t:?}")))
                    })
                    .collect::<Result<Vec<f64>>>()
            };
            match tokens[0] {
                "S0" if tokens.len() >= 2 => {
                    let w: ModeWord = tokens[1].parse()?;
                    if w.is_empty() {
                        return Err(Error::format(field(), "S0 is undefined on the empty word"));
                    }
                    s0_lines.push((w, floats(&tokens[2..])?));
                }
                "S" if tokens.len() >= 5 => {
                    let j: usize = tokens[1]
                        .parse()
                        .map_err(|_| Error::format(field(), format!("bad channel {:?}", tokens[1])))?;
                    let q0: ModeWord = tokens[2].parse()?;
                    let v: ModeWord = tokens[3].parse()?;
                    let q: ModeWord = tokens[4].parse()?;
                    if q0.len() != 1 || q.len() != 1 {
                        return Err(Error::format(field(), "q0 and q must be single modes"));
                    }
                    s_lines.push((j, q0.concat(&v).concat(&q), floats(&tokens[5..])?));
                }
                other => return Err(Error::format(field(), format!("unexpected record {other:?}"))),
            }
        }
        let (dims, depth) = match (header, dims) {
            (Some((h, _)), Some(d)) if h != d => {
                return Err(Error::format(
                    "header",
                    format!("file declares {h:?} but {d:?} was requested"),
                ))
            }
            (Some((h, depth)), _) => (h, depth),
            (None, Some(d)) => {
                let depth = s0_lines
                    .iter()
                    .map(|(w, _)| w.len())
                    .chain(s_lines.iter().map(|(_, w, _)| w.len()))
                    .max()
                    .unwrap_or(0);
                (d, depth)
            }
            (None, None) => {
                return Err(Error::format(
                    "header",
                    "no '# markov D=.. m=.. p=.. depth=..' header and no dimensions given",
                ))
            }
        };
        let LssDims { modes, m, p } = dims;
        let total = word_count(modes, depth);
        let mut s0: Vec<Option<DVector<f64>>> = vec![None; total];
        let mut s: Vec<Vec<Option<DVector<f64>>>> = vec![vec![None; m]; total];
        for (w, vals) in s0_lines {
            check_record(&w, &vals, dims, depth)?;
            s0[word_rank(&w, modes)] = Some(DVector::from_vec(vals));
        }
        for (j, w, vals) in s_lines {
            check_record(&w, &vals, dims, depth)?;
            if j == 0 || j > m {
                return Err(Error::format(format!("S {j} {w}"), format!("channel outside 1..={m}")));
            }
            s[word_rank(&w, modes)][j - 1] = Some(DVector::from_vec(vals));
        }
        let words = enumerate_words(modes, depth);
        let mut s0_table = Vec::with_capacity(total);
        let mut s_table = Vec::with_capacity(total);
        for (k, w) in words.iter().enumerate() {
            s0_table.push(match s0[k].take() {
                Some(v) => v,
                None if w.is_empty() => DVector::zeros(p),
                None => return Err(Error::format(format!("S0 {w}"), "missing parameter")),
            });
            let mut block = DMatrix::zeros(p, m);
            if w.len() >= 2 {
                for j in 1..=m {
                    match s[k][j - 1].take() {
                        Some(col) => block.set_column(j - 1, &col),
                        None => return Err(Error::format(format!("S {j} {w}"), "missing parameter")),
                    }
                }
            }
            s_table.push(block);
        }
        Ok(MarkovFamily {
            dims,
            store: Store::Table {
                depth,
                s0: s0_table,
                s: s_table,
            },
        })
    }
}

fn parse_header(rest: &str, field: &str) -> Result<(LssDims, usize)> {
    let mut values: HashMap<&str, usize> = HashMap::new();
    for tok in rest.split_whitespace().skip(1) {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::format(field, format!("bad header token {tok:?}")))?;
        let value = value
            .parse()
            .map_err(|_| Error::format(field, format!("bad header value {tok:?}")))?;
        values.insert(key, value);
    }
    let get = |k: &str| {
        values
            .get(k)
            .copied()
            .ok_or_else(|| Error::format(field, format!("header lacks {k}")))
    };
    let dims = LssDims::new(get("D")?, get("m")?, get("p")?);
    if dims.modes == 0 || dims.m == 0 || dims.p == 0 {
        return Err(Error::format(field, "D, m and p must be positive"));
    }
    Ok((dims, get("depth")?))
}

fn check_record(w: &ModeWord, vals: &[f64], dims: LssDims, depth: usize) -> Result<()> {
    w.validate(dims.modes)?;
    if w.len() > depth {
        return Err(Error::OutOfDepth { length: w.len(), depth });
    }
    if vals.len() != dims.p {
        return Err(Error::format(format!("parameter for {w}"), format!("expected {} values, found {}", dims.p, vals.len())));
    }
    Ok(())
}

/// `[f(e_1,0,…) − f(0,…), …, f(e_m,0,…) − f(0,…)]` along `w`.
fn impulse_responses(f: &dyn IoMap, w: &ModeWord) -> Result<DMatrix<f64>> {
    let LssDims { m, p, .. } = f.dims();
    let zero = f.eval(&HybridWord::zero_input(w.clone(), m)?)?;
    let mut out = DMatrix::zeros(p, m);
    for j in 0..m {
        let mut inputs = vec![DVector::zeros(m); w.len()];
        inputs[0][j] = 1.0;
        let y = f.eval(&HybridWord::new(w.clone(), inputs)?)?;
        if y.len() != p {
            return Err(Error::dims("oracle output", p, y.len()));
        }
        out.set_column(j, &(y - &zero));
    }
    Ok(out)
}

/// Tabulates the Markov parameters of `f` for every word up to `depth` with
/// the zero-input and unit-impulse experiments.
pub fn extract_markov(f: &dyn IoMap, depth: usize) -> Result<MarkovFamily> {
    if depth == 0 {
        return Err(Error::Shape("Markov extraction needs depth at least 1".into()));
    }
    let LssDims { modes, m, p } = f.dims();
    let words = enumerate_words(modes, depth);
    let mut s0 = Vec::with_capacity(words.len());
    let mut s = Vec::with_capacity(words.len());
    for w in &words {
        if w.is_empty() {
            s0.push(DVector::zeros(p));
        } else {
            let y = f.eval(&HybridWord::zero_input(w.clone(), m)?)?;
            if y.len() != p {
                return Err(Error::dims("oracle output", p, y.len()));
            }
            s0.push(y);
        }
        s.push(if w.len() < 2 { DMatrix::zeros(p, m) } else { impulse_responses(f, w)? });
    }
    Ok(MarkovFamily {
        dims: f.dims(),
        store: Store::Table { depth, s0, s },
    })
}

/// Value of the convolution representation built from `markov` on `w`:
/// `S0(q_0⋯q_t) + Σ_k S(q_k⋯q_t) u_k`.
pub fn gcr_evaluate(markov: &MarkovFamily, w: &HybridWord) -> Result<DVector<f64>> {
    let dims = markov.dims();
    if w.input_dim() != dims.m {
        return Err(Error::dims("input vector", dims.m, w.input_dim()));
    }
    let letters = w.modes();
    let t = w.len() - 1;
    let mut y = markov.s0(letters)?;
    for (k, u) in w.inputs()[..t].iter().enumerate() {
        y += markov.s(&letters.sub_word(k, t))? * u;
    }
    Ok(y)
}

/// Outcome of [`check_gcr`].
#[derive(Debug, Clone, PartialEq)]
pub struct GcrReport {
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    /// The experiment with the largest residual.
    pub worst: Option<HybridWord>,
    pub experiments: usize,
    /// Whether the experiment budget cut the enumeration short.
    pub truncated: bool,
}

/// `{0, e_1, …, e_m, 2e_1}`.
pub fn default_gcr_samples(m: usize) -> Vec<DVector<f64>> {
    let mut out = vec![DVector::zeros(m)];
    for j in 0..m {
        let mut e = DVector::zeros(m);
        e[j] = 1.0;
        out.push(e);
    }
    let mut e = DVector::zeros(m);
    e[0] = 2.0;
    out.push(e);
    out
}

/// Compares `f` with the convolution representation of `markov` on every
/// mode word up to length `max_len` and every per-step choice from `samples`,
/// shortest words first, stopping after `cap` experiments. Passing is
/// necessary for `f` to have a convolution representation, not sufficient.
pub fn check_gcr(
    f: &dyn IoMap,
    markov: &MarkovFamily,
    max_len: usize,
    samples: &[DVector<f64>],
    tol: f64,
    cap: usize,
) -> Result<GcrReport> {
    let dims = f.dims();
    if dims != markov.dims() {
        return Err(Error::Shape(format!(
            "map has dimensions {dims:?} but the Markov family has {:?}",
            markov.dims()
        )));
    }
    if samples.is_empty() {
        return Err(Error::Shape("no input samples given".into()));
    }
    if let Some(u) = samples.iter().find(|u| u.len() != dims.m) {
        return Err(Error::dims("input sample", dims.m, u.len()));
    }
    let mut report = GcrReport {
        passed: true,
        max_residual: 0.0,
        tolerance: tol,
        worst: None,
        experiments: 0,
        truncated: false,
    };
    'outer: for len in 1..=max_len {
        for modes in enumerate_words_of_length(dims.modes, len) {
            let mut choice = vec![0usize; len];
            loop {
                if report.experiments >= cap {
                    report.truncated = true;
                    break 'outer;
                }
                let inputs = choice.iter().map(|&k| samples[k].clone()).collect();
                let w = HybridWord::new(modes.clone(), inputs)?;
                let residual = (f.eval(&w)? - gcr_evaluate(markov, &w)?).amax();
                report.experiments += 1;
                if residual > report.max_residual || report.worst.is_none() {
                    report.max_residual = report.max_residual.max(residual);
                    report.worst = Some(w);
                }
                // odometer over the per-step sample choices
                let mut pos = 0;
                while pos < len {
                    choice[pos] += 1;
                    if choice[pos] < samples.len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
    }
    report.passed = report.max_residual <= tol;
    Ok(report)
}

/// The `pD × (mD+1)` block `M(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedMarkov {
    pub v: ModeWord,
    pub block: DMatrix<f64>,
}

pub fn combined_markov(markov: &MarkovFamily, v: &ModeWord) -> Result<CombinedMarkov> {
    markov.combined(v)
}

/// Input-output experiments read from a dataset file, served as an oracle.
/// Only the recorded experiments can be evaluated.
#[derive(Debug, Clone)]
pub struct ExperimentTable {
    dims: LssDims,
    records: HashMap<(ModeWord, Vec<u64>), DVector<f64>>,
}

fn input_key(inputs: &[DVector<f64>]) -> Vec<u64> {
    // -0.0 and 0.0 are the same experiment
    inputs
        .iter()
        .flat_map(|u| u.iter().map(|&x| if x == 0.0 { 0u64 } else { x.to_bits() }))
        .collect()
}

impl ExperimentTable {
    pub fn new(dims: LssDims) -> Self {
        ExperimentTable {
            dims,
            records: HashMap::new(),
        }
    }

    pub fn insert(&mut self, w: &HybridWord, y: DVector<f64>) -> Result<()> {
        w.modes().validate(self.dims.modes)?;
        if w.input_dim() != self.dims.m {
            return Err(Error::dims("input vector", self.dims.m, w.input_dim()));
        }
        if y.len() != self.dims.p {
            return Err(Error::dims("output vector", self.dims.p, y.len()));
        }
        self.records.insert((w.modes().clone(), input_key(w.inputs())), y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Parses lines `<word> | <u_0> <u_1> … | <y>` where vectors are
    /// comma-separated; `#` starts a comment.
    pub fn from_text(text: &str, dims: LssDims) -> Result<Self> {
        let mut table = ExperimentTable::new(dims);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let field = format!("line {}", n + 1);
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::format(field, "expected '<word> | <inputs> | <output>'"));
            }
            let modes: ModeWord = parts[0].parse()?;
            let vector = |s: &str| {
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::format(field.clone(), format!("bad number {t:?}")))
                    })
                    .collect::<Result<Vec<f64>>>()
                    .map(DVector::from_vec)
            };
            let inputs = parts[1]
                .split_whitespace()
                .map(vector)
                .collect::<Result<Vec<_>>>()?;
            let w = HybridWord::new(modes, inputs).map_err(|e| Error::format(field.clone(), e.to_string()))?;
            let y = vector(parts[2])?;
            table
                .insert(&w, y)
                .map_err(|e| Error::format(field.clone(), e.to_string()))?;
        }
        Ok(table)
    }

    /// Dataset text holding exactly the experiments needed by
    /// [`extract_markov`] up to `depth`, evaluated on `f`.
    pub fn extraction_dataset(f: &dyn IoMap, depth: usize) -> Result<String> {
        let LssDims { modes, m, .. } = f.dims();
        let vec_text = |v: &DVector<f64>| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for w in enumerate_words(modes, depth).iter().skip(1) {
            let mut experiments = vec![HybridWord::zero_input(w.clone(), m)?];
            if w.len() >= 2 {
                for j in 0..m {
                    let mut inputs = vec![DVector::zeros(m); w.len()];
                    inputs[0][j] = 1.0;
                    experiments.push(HybridWord::new(w.clone(), inputs)?);
                }
            }
            for e in experiments {
                let us: Vec<String> = e.inputs().iter().map(vec_text).collect();
                let _ = writeln!(out, "{w} | {} | {}", us.join(" "), vec_text(&f.eval(&e)?));
            }
        }
        Ok(out)
    }
}

impl IoMap for ExperimentTable {
    fn modes(&self) -> usize {
        self.dims.modes
    }

    fn input_dim(&self) -> usize {
        self.dims.m
    }

    fn output_dim(&self) -> usize {
        self.dims.p
    }

    fn eval(&self, w: &HybridWord) -> Result<DVector<f64>> {
        self.records
            .get(&(w.modes().clone(), input_key(w.inputs())))
            .cloned()
            .ok_or_else(|| {
                let us: Vec<String> = w.inputs().iter().map(|u| format!("{:?}", u.as_slice())).collect();
                Error::format("dataset", format!("no experiment for word {} with inputs {}", w.modes(), us.join(" ")))
            })
    }
}
