use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One state of the single-excitation subspace. Nodes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisLabel {
    /// Every ensemble in `|g…g⟩`, every mode empty.
    GlobalGround,
    /// One collective f-excitation at the node.
    FExc(usize),
    /// One collective e-excitation at the node.
    EExc(usize),
    /// One photon in the node's cavity.
    CavityPhoton(usize),
    /// One photon in the shared fiber mode.
    FiberPhoton,
}

impl BasisLabel {
    /// Canonical index. Node 1 occupies 1..=3 with the fiber at 4; node `k ≥ 2`
    /// occupies `3k-1` (cavity), `3k` (e), `3k+1` (f).
    pub fn index(self) -> usize {
        match self {
            BasisLabel::GlobalGround => 0,
            BasisLabel::FiberPhoton => 4,
            BasisLabel::FExc(1) => 1,
            BasisLabel::EExc(1) => 2,
            BasisLabel::CavityPhoton(1) => 3,
            BasisLabel::CavityPhoton(k) => 3 * k - 1,
            BasisLabel::EExc(k) => 3 * k,
            BasisLabel::FExc(k) => 3 * k + 1,
        }
    }

    pub fn from_index(n_cavities: usize, index: usize) -> Option<Self> {
        let label = match index {
            0 => BasisLabel::GlobalGround,
            1 => BasisLabel::FExc(1),
            2 => BasisLabel::EExc(1),
            3 => BasisLabel::CavityPhoton(1),
            4 => BasisLabel::FiberPhoton,
            i => {
                let k = (i + 1) / 3;
                match i % 3 {
                    2 => BasisLabel::CavityPhoton(k),
                    0 => BasisLabel::EExc(k),
                    _ => BasisLabel::FExc(k),
                }
            }
        };
        (index < 3 * n_cavities + 2).then_some(label)
    }

    /// Node carrying the excitation, if any.
    pub fn node(self) -> Option<usize> {
        match self {
            BasisLabel::FExc(k) | BasisLabel::EExc(k) | BasisLabel::CavityPhoton(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::GlobalGround => write!(f, "ground"),
            BasisLabel::FExc(k) => write!(f, "f{k}"),
            BasisLabel::EExc(k) => write!(f, "e{k}"),
            BasisLabel::CavityPhoton(k) => write!(f, "cavity{k}"),
            BasisLabel::FiberPhoton => write!(f, "fiber"),
        }
    }
}

/// The ordered basis for `N` nodes; dimension `3N + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    n_cavities: usize,
    labels: Vec<BasisLabel>,
}

impl SubspaceBasis {
    pub fn n_cavities(&self) -> usize {
        self.n_cavities
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<BasisLabel> {
        self.labels.get(index).copied()
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        let valid = match label.node() {
            Some(k) => (1..=self.n_cavities).contains(&k),
            None => true,
        };
        valid.then(|| label.index())
    }
}

pub fn enumerate_basis(n_cavities: usize) -> Result<SubspaceBasis> {
    if n_cavities < 2 {
        return Err(invalid("n_cavities", format!("{n_cavities} < 2")));
    }
    let labels = (0..3 * n_cavities + 2)
        .map(|i| BasisLabel::from_index(n_cavities, i).expect("index in range"))
        .collect();
    Ok(SubspaceBasis { n_cavities, labels })
}
