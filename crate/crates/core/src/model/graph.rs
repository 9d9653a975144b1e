use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};

pub type PartyId = usize;

/// Largest party count the workbench supports.
pub const MAX_PARTIES: usize = 64;

/// Directed simple graph on `[k]`; edge `(i, j)` means party `i` sees `x_j`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct RestrictionGraph {
    k: usize,
    // bit j-1 of adj[i-1] is set iff (i, j) is an edge
    adj: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl RestrictionGraph {
    pub fn new(k: usize, edges: impl IntoIterator<Item = (PartyId, PartyId)>) -> Result<Self> {
        check_k(k)?;
        let mut adj = vec![0u64; k];
        for (i, j) in edges {
            if i == 0 || j == 0 || i > k || j > k {
                return Err(Error::domain(format!("edge ({i},{j}) outside [1,{k}]")));
            }
            if i == j {
                return Err(Error::domain(format!("self-loop ({i},{i}) not allowed")));
            }
            adj[i - 1] |= 1 << (j - 1);
        }
        Ok(RestrictionGraph { k, adj })
    }

    pub fn empty(k: usize) -> Result<Self> {
        Self::new(k, [])
    }

    /// Every party sees every other party: the plain NOF view.
    pub fn complete(k: usize) -> Result<Self> {
        Self::new(
            k,
            (1..=k).flat_map(|i| (1..=k).filter(move |&j| j != i).map(move |j| (i, j))),
        )
    }

    /// View graph of the myopic model ordered by `order`: the party at
    /// position `p` sees positions `< p` and position `p + 1`.
    pub fn myopic(order: &Permutation) -> Result<Self> {
        let k = order.k();
        let mut edges = Vec::new();
        for p in 1..=k {
            let me = order.apply(p);
            for q in 1..p {
                edges.push((me, order.apply(q)));
            }
            if p < k {
                edges.push((me, order.apply(p + 1)));
            }
        }
        Self::new(k, edges)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn has_edge(&self, i: PartyId, j: PartyId) -> bool {
        i >= 1 && j >= 1 && i <= self.k && j <= self.k && self.adj[i - 1] >> (j - 1) & 1 == 1
    }

    pub(crate) fn neighbor_mask(&self, i: PartyId) -> u64 {
        self.adj[i - 1]
    }

    /// N(i).
    pub fn neighbors(&self, i: PartyId) -> BTreeSet<PartyId> {
        (1..=self.k).filter(|&j| self.has_edge(i, j)).collect()
    }

    /// `[k] \ N(i)`; contains `i` itself.
    pub fn non_neighbors(&self, i: PartyId) -> BTreeSet<PartyId> {
        (1..=self.k).filter(|&j| !self.has_edge(i, j)).collect()
    }

    pub fn edges(&self) -> Vec<(PartyId, PartyId)> {
        (1..=self.k)
            .flat_map(|i| (1..=self.k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    /// `G_π`: edge `(π(i), π(j))` for every edge `(i, j)`.
    pub fn permuted(&self, pi: &Permutation) -> Result<Self> {
        pi.check_arity(self.k)?;
        Self::new(
            self.k,
            self.edges().into_iter().map(|(i, j)| (pi.apply(i), pi.apply(j))),
        )
    }

    pub fn check_party(&self, i: PartyId) -> Result<()> {
        if i == 0 || i > self.k {
            return Err(Error::domain(format!("party {i} outside [1,{}]", self.k)));
        }
        Ok(())
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if !(2..=MAX_PARTIES).contains(&k) {
        return Err(Error::domain(format!(
            "party count {k} outside [2,{MAX_PARTIES}]"
        )));
    }
    Ok(())
}

impl TryFrom<GraphFile> for RestrictionGraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        RestrictionGraph::new(f.k, f.edges)
    }
}

impl From<RestrictionGraph> for GraphFile {
    fn from(g: RestrictionGraph) -> Self {
        GraphFile {
            k: g.k,
            edges: g.edges(),
        }
    }
}

impl std::fmt::Debug for RestrictionGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RestrictionGraph(k={}, edges={:?})", self.k, self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(RestrictionGraph::new(3, [(2, 2)]).is_err());
        assert!(RestrictionGraph::new(3, [(1, 4)]).is_err());
        assert!(RestrictionGraph::new(1, []).is_err());
    }

    #[test]
    fn myopic_graph_matches_chain_views() {
        let order = Permutation::new(vec![4, 2, 5, 1, 3]).unwrap();
        let g = RestrictionGraph::myopic(&order).unwrap();
        // position 3 is party 5: sees positions 1,2 (parties 4,2) and position 4 (party 1)
        assert_eq!(g.neighbors(5), BTreeSet::from([1, 2, 4]));
        assert_eq!(g.neighbors(4), BTreeSet::from([2]));
        assert_eq!(g.neighbors(3), BTreeSet::from([1, 2, 4, 5]));
    }

    #[test]
    fn json_shape() {
        let g: RestrictionGraph = serde_json::from_str(r#"{"k":4,"edges":[[4,1]]}"#).unwrap();
        assert!(g.has_edge(4, 1));
        assert!(!g.has_edge(1, 4));
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"k":4,"edges":[[4,1]]}"#);
    }
}
