//! Discrete groups for the `C_0(G) ⊕ C1` family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A group element as integer coordinates; the meaning of the coordinates
/// is fixed by the [`GroupSpec`] that produced it.
pub type GroupElem = Vec<i64>;

pub trait GroupAdapter {
    fn identity(&self) -> GroupElem;
    fn multiply(&self, g: &GroupElem, h: &GroupElem) -> GroupElem;
    fn inverse(&self, g: &GroupElem) -> GroupElem;
    fn generators(&self) -> Vec<GroupElem>;
    fn canonical(&self, g: &GroupElem) -> String;
    fn parse(&self, s: &str) -> Result<GroupElem>;
    /// Element count for finite groups.
    fn order(&self) -> Option<u64> {
        None
    }
}

/// The concrete groups supported by the walk builders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `(Z, +)`.
    Integers,
    /// `Z^d`.
    Lattice { dim: usize },
    /// `Z / nZ`.
    Cyclic { n: u64 },
    /// Discrete Heisenberg group; `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
    Heisenberg,
}

impl GroupSpec {
    pub fn dim(&self) -> usize {
        match self {
            GroupSpec::Integers | GroupSpec::Cyclic { .. } => 1,
            GroupSpec::Lattice { dim } => *dim,
            GroupSpec::Heisenberg => 3,
        }
    }

    fn reduce(&self, mut g: GroupElem) -> GroupElem {
        if let GroupSpec::Cyclic { n } = self {
            g[0] = g[0].rem_euclid(*n as i64);
        }
        g
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        g.len() == self.dim()
            && match self {
                GroupSpec::Cyclic { n } => g[0] >= 0 && (g[0] as u64) < *n,
                _ => true,
            }
    }

    /// All elements within `radius` steps of `seeds` under the given moves
    /// (left multiplication by each move and its inverse), sorted.
    pub fn ball(&self, seeds: &[GroupElem], moves: &[GroupElem], radius: usize) -> Vec<GroupElem> {
        let mut all_moves: Vec<GroupElem> = moves.to_vec();
        all_moves.extend(moves.iter().map(|h| self.inverse(h)));
        let mut seen: std::collections::BTreeSet<GroupElem> = seeds.iter().cloned().collect();
        let mut frontier: Vec<GroupElem> = seeds.to_vec();
        for _ in 0..radius {
            let mut next = Vec::new();
            for g in &frontier {
                for h in &all_moves {
                    let k = self.multiply(h, g);
                    if seen.insert(k.clone()) {
                        next.push(k);
                    }
                }
            }
            frontier = next;
        }
        seen.into_iter().collect()
    }
}

impl GroupAdapter for GroupSpec {
    fn identity(&self) -> GroupElem {
        vec![0; self.dim()]
    }

    fn multiply(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        match self {
            GroupSpec::Heisenberg => vec![g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]],
            _ => self.reduce(g.iter().zip(h).map(|(a, b)| a + b).collect()),
        }
    }

    fn inverse(&self, g: &GroupElem) -> GroupElem {
        match self {
            GroupSpec::Heisenberg => vec![-g[0], -g[1], -g[2] + g[0] * g[1]],
            _ => self.reduce(g.iter().map(|a| -a).collect()),
        }
    }

    fn generators(&self) -> Vec<GroupElem> {
        let d = self.dim();
        match self {
            GroupSpec::Heisenberg => vec![vec![1, 0, 0], vec![0, 1, 0]],
            _ => (0..d)
                .map(|k| {
                    let mut e = vec![0; d];
                    e[k] = 1;
                    self.reduce(e)
                })
                .collect(),
        }
    }

    fn canonical(&self, g: &GroupElem) -> String {
        match self {
            GroupSpec::Integers | GroupSpec::Cyclic { .. } => g[0].to_string(),
            _ => {
                let parts: Vec<String> = g.iter().map(|v| v.to_string()).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    fn parse(&self, s: &str) -> Result<GroupElem> {
        let s = s.trim();
        let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
        let coords: std::result::Result<Vec<i64>, _> =
            inner.split(',').map(|p| p.trim().parse::<i64>()).collect();
        let g = coords.map_err(|e| Error::Parse(format!("group element {s:?}: {e}")))?;
        if g.len() != self.dim() {
            return Err(Error::Parse(format!(
                "group element {s:?} has {} coordinates, expected {}",
                g.len(),
                self.dim()
            )));
        }
        let g = self.reduce(g);
        Ok(g)
    }

    fn order(&self) -> Option<u64> {
        match self {
            GroupSpec::Cyclic { n } => Some(*n),
            _ => None,
        }
    }
}
