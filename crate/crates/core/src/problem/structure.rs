use crate::error::{Error, Result};

/// Function/variable incidence graph.
///
/// `neigh[j]` is the sorted set `N_j` of blocks read by component `j`;
/// `neigh_bar[i]` is the sorted set of components reading block `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteStructure {
    num_blocks: usize,
    neigh: Vec<Vec<usize>>,
    neigh_bar: Vec<Vec<usize>>,
    /// `slot[i][k]` is the position of block `i` inside `N_j` for
    /// `j = neigh_bar[i][k]`.
    slot: Vec<Vec<usize>>,
    omega: usize,
    omega_bar: usize,
}

impl BipartiteStructure {
    /// Build from `(component, block)` incidence pairs (0-based). Duplicate
    /// pairs are merged.
    pub fn build(
        pairs: &[(usize, usize)],
        num_blocks: usize,
        num_components: usize,
    ) -> Result<Self> {
        if num_blocks == 0 || num_components == 0 {
            return Err(Error::input("structure needs at least one block and one component"));
        }
        let mut neigh = vec![Vec::new(); num_components];
        for &(j, i) in pairs {
            if j >= num_components {
                return Err(Error::input(format!(
                    "component index {j} out of range (N_bar = {num_components})"
                )));
            }
            if i >= num_blocks {
                return Err(Error::input(format!(
                    "block index {i} out of range (N = {num_blocks})"
                )));
            }
            neigh[j].push(i);
        }
        for (j, n) in neigh.iter_mut().enumerate() {
            n.sort_unstable();
            n.dedup();
            if n.is_empty() {
                return Err(Error::structure(format!("component {j} touches no block")));
            }
        }
        Ok(Self::from_neighbours(neigh, num_blocks))
    }

    /// Build from already sorted, deduplicated, non-empty neighbour lists.
    pub(crate) fn from_neighbours(neigh: Vec<Vec<usize>>, num_blocks: usize) -> Self {
        let mut neigh_bar = vec![Vec::new(); num_blocks];
        let mut slot = vec![Vec::new(); num_blocks];
        for (j, blocks) in neigh.iter().enumerate() {
            for (p, &i) in blocks.iter().enumerate() {
                neigh_bar[i].push(j);
                slot[i].push(p);
            }
        }
        let omega = neigh.iter().map(Vec::len).max().unwrap_or(0);
        let omega_bar = neigh_bar.iter().map(Vec::len).max().unwrap_or(0);
        Self {
            num_blocks,
            neigh,
            neigh_bar,
            slot,
            omega,
            omega_bar,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn num_components(&self) -> usize {
        self.neigh.len()
    }

    /// `N_j`.
    pub fn blocks_of(&self, j: usize) -> &[usize] {
        &self.neigh[j]
    }

    /// `N_bar_i`.
    pub fn components_of(&self, i: usize) -> &[usize] {
        &self.neigh_bar[i]
    }

    /// Positions of block `i` inside each `N_j`, aligned with
    /// [`components_of`](Self::components_of).
    pub fn slots_of(&self, i: usize) -> &[usize] {
        &self.slot[i]
    }

    /// `max_j |N_j|`.
    pub fn omega(&self) -> usize {
        self.omega
    }

    /// `max_i |N_bar_i|`.
    pub fn omega_bar(&self) -> usize {
        self.omega_bar
    }

    /// Blocks read by no component.
    pub fn uncovered_blocks(&self) -> Vec<usize> {
        (0..self.num_blocks)
            .filter(|&i| self.neigh_bar[i].is_empty())
            .collect()
    }
}
