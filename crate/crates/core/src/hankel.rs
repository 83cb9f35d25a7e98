//! Finite Hankel matrices indexed by words.
//!
//! Words are enumerated length-first and then letter-wise (`ε, 1, …, D, 11,
//! 12, …`). Row `(v, i)` of a Hankel matrix sits at flat index
//! `rank(v)·P + (i−1)` and column `(w, j)` at `rank(w)·J + j`, where `P` is
//! the coefficient dimension, `J` the number of column labels per word and
//! `rank` the position of a word in the enumeration. All flat indices here are
//! 0-based.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::bridge::{LssIndex, LssIndexSet};
use crate::error::{Error, Result};
use crate::lss_core::{LssDims, ModeWord};
use crate::markov::MarkovFamily;
use crate::numerics::{rank_report, RankReport};

/// Default cap on the number of dense entries a Hankel matrix may allocate.
pub const DEFAULT_ENTRY_CAP: usize = 100_000_000;

/// `N(L)`: number of words of length at most `len` over `modes` letters.
pub fn word_count(modes: usize, len: usize) -> usize {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..=len {
        total = total.saturating_add(level);
        level = level.saturating_mul(modes);
    }
    total
}

/// Position of `w` in the enumeration (`ε` has rank 0).
pub fn word_rank(w: &ModeWord, modes: usize) -> usize {
    let base = if w.is_empty() { 0 } else { word_count(modes, w.len() - 1) };
    let offset = w
        .letters()
        .iter()
        .fold(0usize, |acc, &q| acc * modes + (q - 1));
    base + offset
}

/// The word at position `rank`.
pub fn word_at(rank: usize, modes: usize) -> ModeWord {
    let mut len = 0;
    while word_count(modes, len) <= rank {
        len += 1;
    }
    let mut offset = rank - if len == 0 { 0 } else { word_count(modes, len - 1) };
    let mut letters = vec![0; len];
    for slot in letters.iter_mut().rev() {
        *slot = offset % modes + 1;
        offset /= modes;
    }
    ModeWord::new(letters).expect("letters are 1-based")
}

/// All words of exactly `len` letters, in increasing order.
pub fn enumerate_words_of_length(modes: usize, len: usize) -> Vec<ModeWord> {
    let count = modes.pow(len as u32);
    (0..count)
        .map(|mut offset| {
            let mut letters = vec![0; len];
            for slot in letters.iter_mut().rev() {
                *slot = offset % modes + 1;
                offset /= modes;
            }
            ModeWord::new(letters).expect("letters are 1-based")
        })
        .collect()
}

/// All words of length at most `max_len`, in increasing order.
pub fn enumerate_words(modes: usize, max_len: usize) -> Vec<ModeWord> {
    (0..=max_len)
        .flat_map(|len| enumerate_words_of_length(modes, len))
        .collect()
}

/// Shape parameters shared by every Hankel matrix of a given family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelLayout {
    /// Alphabet size (number of modes).
    pub alphabet: usize,
    /// Rows per word.
    pub coef_dim: usize,
    /// Column labels per word.
    pub index_count: usize,
}

impl HankelLayout {
    pub fn lss(dims: LssDims) -> Self {
        HankelLayout {
            alphabet: dims.modes,
            coef_dim: dims.stacked_outputs(),
            index_count: dims.index_count(),
        }
    }

    pub fn rows(&self, depth: usize) -> usize {
        word_count(self.alphabet, depth) * self.coef_dim
    }

    pub fn cols(&self, depth: usize) -> usize {
        word_count(self.alphabet, depth) * self.index_count
    }

    /// Flat row of `(v, i)` with `i` in `1..=coef_dim`.
    pub fn row_index(&self, v: &ModeWord, i: usize) -> usize {
        word_rank(v, self.alphabet) * self.coef_dim + (i - 1)
    }

    /// Flat column of `(w, j)` with `j` in `0..index_count`.
    pub fn col_index(&self, w: &ModeWord, j: usize) -> usize {
        word_rank(w, self.alphabet) * self.index_count + j
    }

    pub fn row_label(&self, row: usize) -> (ModeWord, usize) {
        (word_at(row / self.coef_dim, self.alphabet), row % self.coef_dim + 1)
    }

    pub fn col_label(&self, col: usize) -> (ModeWord, usize) {
        (word_at(col / self.index_count, self.alphabet), col % self.index_count)
    }
}

/// The upper-left block of a Hankel matrix with row words of length at most
/// `row_depth` and column words of length at most `col_depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelBlockMatrix {
    layout: HankelLayout,
    row_depth: usize,
    col_depth: usize,
    matrix: DMatrix<f64>,
    lss: Option<LssDims>,
}

impl HankelBlockMatrix {
    pub fn from_matrix(
        layout: HankelLayout,
        row_depth: usize,
        col_depth: usize,
        matrix: DMatrix<f64>,
    ) -> Result<Self> {
        let expected = (layout.rows(row_depth), layout.cols(col_depth));
        if matrix.shape() != expected {
            return Err(Error::Shape(format!(
                "Hankel matrix is {:?}, expected {:?} for depths ({row_depth}, {col_depth})",
                matrix.shape(),
                expected
            )));
        }
        Ok(HankelBlockMatrix {
            layout,
            row_depth,
            col_depth,
            matrix,
            lss: None,
        })
    }

    /// Same, for a switched-system Hankel whose labels are `(v, i)` and
    /// `(w, 0 | (q, z))`.
    pub fn from_lss_matrix(dims: LssDims, row_depth: usize, col_depth: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let mut h = HankelBlockMatrix::from_matrix(HankelLayout::lss(dims), row_depth, col_depth, matrix)?;
        h.lss = Some(dims);
        Ok(h)
    }

    pub fn layout(&self) -> HankelLayout {
        self.layout
    }

    pub fn lss_dims(&self) -> Option<LssDims> {
        self.lss
    }

    pub fn row_depth(&self) -> usize {
        self.row_depth
    }

    pub fn col_depth(&self) -> usize {
        self.col_depth
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn entry(&self, v: &ModeWord, i: usize, w: &ModeWord, j: usize) -> f64 {
        self.matrix[(self.layout.row_index(v, i), self.layout.col_index(w, j))]
    }

    /// Entry addressed by a switched-system column label.
    pub fn lss_entry(&self, v: &ModeWord, i: usize, w: &ModeWord, label: LssIndex) -> Result<f64> {
        let dims = self.lss.ok_or_else(|| Error::Shape("not a switched-system Hankel matrix".into()))?;
        let j = LssIndexSet::new(dims.modes, dims.m).position(label)?;
        Ok(self.entry(v, i, w, j))
    }

    /// Block at block-row `r`, block-column `c` (0-based word ranks).
    pub fn block(&self, r: usize, c: usize) -> DMatrix<f64> {
        let HankelLayout {
            coef_dim, index_count, ..
        } = self.layout;
        self.matrix
            .view((r * coef_dim, c * index_count), (coef_dim, index_count))
            .into_owned()
    }

    /// Sub-matrix with smaller depths; the rows and columns kept are a prefix
    /// of the current ones.
    pub fn truncated(&self, row_depth: usize, col_depth: usize) -> Result<Self> {
        if row_depth > self.row_depth || col_depth > self.col_depth {
            return Err(Error::OutOfDepth {
                length: row_depth.max(col_depth),
                depth: self.row_depth.min(self.col_depth),
            });
        }
        let rows = self.layout.rows(row_depth);
        let cols = self.layout.cols(col_depth);
        Ok(HankelBlockMatrix {
            layout: self.layout,
            row_depth,
            col_depth,
            matrix: self.matrix.view((0, 0), (rows, cols)).into_owned(),
            lss: self.lss,
        })
    }

    fn column_label_text(&self, j: usize) -> String {
        match self.lss {
            Some(dims) => match LssIndexSet::new(dims.modes, dims.m).label(j) {
                LssIndex::Initial => "0".to_string(),
                LssIndex::Input { mode, channel } => format!("{mode}:{channel}"),
            },
            None => j.to_string(),
        }
    }

    /// Dense CSV dump, one matrix row per line, full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.matrix.nrows() {
            let line: Vec<String> = self.matrix.row(i).iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Sidecar mapping every flat index to its `(word, offset)` label.
    pub fn index_sidecar(&self) -> String {
        let mut out = String::from("axis,index,word,label\n");
        for r in 0..self.matrix.nrows() {
            let (v, i) = self.layout.row_label(r);
            let _ = writeln!(out, "row,{r},{v},{i}");
        }
        for c in 0..self.matrix.ncols() {
            let (w, j) = self.layout.col_label(c);
            let _ = writeln!(out, "col,{c},{w},{}", self.column_label_text(j));
        }
        out
    }

    /// Parses a CSV dump produced by [`HankelBlockMatrix::to_csv`].
    pub fn from_csv(text: &str, dims: LssDims, row_depth: usize, col_depth: usize) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::format(format!("line {}", n + 1), format!("bad number {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if let Some((n, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::format(format!("row {}", n + 1), format!("expected {cols} values, found {}", r.len())));
        }
        let matrix = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
        HankelBlockMatrix::from_lss_matrix(dims, row_depth, col_depth, matrix)
    }
}

/// Assembles `H_{f,L,M}` from Markov parameters: block `(r, c)` is the
/// combined Markov parameter of `v_c · v_r`.
pub fn build_hankel(
    markov: &MarkovFamily,
    row_depth: usize,
    col_depth: usize,
    entry_cap: usize,
) -> Result<HankelBlockMatrix> {
    let dims = markov.dims();
    let layout = HankelLayout::lss(dims);
    let need = row_depth + col_depth + 2;
    if let Some(depth) = markov.depth() {
        if depth < need {
            return Err(Error::OutOfDepth { length: need, depth });
        }
    }
    let (rows, cols) = (layout.rows(row_depth), layout.cols(col_depth));
    let entries = rows.saturating_mul(cols);
    if entries > entry_cap {
        return Err(Error::TooLarge {
            entries,
            cap: entry_cap,
        });
    }
    let row_words = enumerate_words(dims.modes, row_depth);
    let col_words = enumerate_words(dims.modes, col_depth);
    let mut matrix = DMatrix::zeros(rows, cols);
    for (c, wc) in col_words.iter().enumerate() {
        for (r, vr) in row_words.iter().enumerate() {
            let block = markov.combined(&wc.concat(vr))?.block;
            matrix
                .view_mut((r * layout.coef_dim, c * layout.index_count), (layout.coef_dim, layout.index_count))
                .copy_from(&block);
        }
    }
    HankelBlockMatrix::from_lss_matrix(dims, row_depth, col_depth, matrix)
}

/// Numerical rank of a Hankel matrix with its singular spectrum.
pub fn hankel_rank(h: &HankelBlockMatrix, tol: f64) -> RankReport {
    rank_report(h.matrix(), tol)
}
