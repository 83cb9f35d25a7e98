//! Translation between switched systems, their Markov parameters and
//! rational representations.
//!
//! The index set of a switched system with `D` modes and `m` inputs is
//! `J = {0} ∪ {(q, l)}`, ordered `0, (1,1), …, (1,m), (2,1), …, (D,m)`.
//! Index `0` carries the initial state and `(q, l)` the `l`-th input column of
//! mode `q`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lss_core::{LssDims, ModeWord, SwitchedLinearSystem};
use crate::markov::MarkovFamily;
use crate::numerics::{hstack, vstack};
use crate::rational_repr::{RationalRepresentation, SeriesFamily};

/// An element of the switched-system index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LssIndex {
    Initial,
    /// 1-based mode and input channel.
    Input { mode: usize, channel: usize },
}

/// The ordered index set `J` for `modes` modes and `m` input channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LssIndexSet {
    pub modes: usize,
    pub m: usize,
}

impl LssIndexSet {
    pub fn new(modes: usize, m: usize) -> Self {
        LssIndexSet { modes, m }
    }

    pub fn len(&self) -> usize {
        self.modes * self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based position of an index.
    pub fn position(&self, index: LssIndex) -> Result<usize> {
        match index {
            LssIndex::Initial => Ok(0),
            LssIndex::Input { mode, channel } => {
                if mode == 0 || mode > self.modes {
                    return Err(Error::InvalidMode {
                        letter: mode,
                        modes: self.modes,
                    });
                }
                if channel == 0 || channel > self.m {
                    return Err(Error::Shape(format!("input channel {channel} outside 1..={}", self.m)));
                }
                Ok(1 + (mode - 1) * self.m + (channel - 1))
            }
        }
    }

    /// Index at a 0-based position.
    pub fn label(&self, position: usize) -> LssIndex {
        assert!(position < self.len(), "position {position} outside the index set");
        if position == 0 {
            LssIndex::Initial
        } else {
            LssIndex::Input {
                mode: (position - 1) / self.m + 1,
                channel: (position - 1) % self.m + 1,
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = LssIndex> + '_ {
        (0..self.len()).map(|k| self.label(k))
    }
}

/// The series family of a map given by its Markov parameters:
/// `𝕊_0(w)` stacks `S0(w q)` over `q`, and `𝕊_(q,l)(w)` stacks
/// `S_l(q w q')` over `q'`.
#[derive(Debug, Clone)]
pub struct MarkovSeries {
    markov: MarkovFamily,
}

pub fn psi_from_markov(markov: &MarkovFamily) -> MarkovSeries {
    MarkovSeries { markov: markov.clone() }
}

impl MarkovSeries {
    pub fn markov(&self) -> &MarkovFamily {
        &self.markov
    }
}

impl SeriesFamily for MarkovSeries {
    fn alphabet(&self) -> usize {
        self.markov.dims().modes
    }

    fn index_count(&self) -> usize {
        self.markov.dims().index_count()
    }

    fn coef_dim(&self) -> usize {
        self.markov.dims().stacked_outputs()
    }

    fn depth(&self) -> Option<usize> {
        self.markov.depth().map(|d| d.saturating_sub(2))
    }

    fn coefficient(&self, j: usize, w: &ModeWord) -> Result<DVector<f64>> {
        let LssDims { modes, m, p } = self.markov.dims();
        let index = LssIndexSet::new(modes, m);
        if j >= index.len() {
            return Err(Error::Shape(format!("index {j} outside 0..{}", index.len())));
        }
        let mut out = DVector::zeros(p * modes);
        for q_last in 1..=modes {
            let block = match index.label(j) {
                LssIndex::Initial => self.markov.s0(&w.push(q_last))?,
                LssIndex::Input { mode, channel } => self.markov.sj(mode, w, q_last, channel)?,
            };
            out.rows_mut((q_last - 1) * p, p).copy_from(&block);
        }
        Ok(out)
    }
}

/// `R_Σ`: same transitions, `C = [C_1; …; C_D]`, `B_0 = x0` and
/// `B_(q,l)` the `l`-th column of `B_q`.
pub fn repr_of_lss(sys: &SwitchedLinearSystem) -> RationalRepresentation {
    let n = sys.state_dim();
    let mut b_blocks = vec![DMatrix::from_column_slice(n, 1, sys.x0().as_slice())];
    b_blocks.extend(sys.b_family().iter().cloned());
    let b = hstack(n, &b_blocks);
    let c = vstack(n, sys.c_family());
    RationalRepresentation::new(sys.a_family().to_vec(), b, c).expect("a valid system gives a valid representation")
}

/// `Σ_R` for a representation over the index set of `dims`.
pub fn lss_of_repr(r: &RationalRepresentation, dims: LssDims) -> Result<SwitchedLinearSystem> {
    let LssDims { modes, m, p } = dims;
    if r.alphabet() != modes {
        return Err(Error::Shape(format!("representation has {} letters, expected {modes} modes", r.alphabet())));
    }
    if r.index_count() != dims.index_count() {
        return Err(Error::Shape(format!(
            "representation has {} initial vectors, expected mD+1 = {}",
            r.index_count(),
            dims.index_count()
        )));
    }
    if r.coef_dim() != dims.stacked_outputs() {
        return Err(Error::Shape(format!(
            "representation readout has {} rows, expected pD = {}",
            r.coef_dim(),
            dims.stacked_outputs()
        )));
    }
    let n = r.dim();
    let b = (0..modes).map(|q| r.b().columns(1 + q * m, m).into_owned()).collect();
    let c = (0..modes).map(|q| r.c().rows(q * p, p).into_owned()).collect();
    SwitchedLinearSystem::new(
        r.a_family().to_vec(),
        b,
        c,
        r.b().column(0).into_owned(),
        m,
        p,
    )
    .map_err(|e| Error::Shape(format!("representation of dimension {n} does not form a system: {e}")))
}
