use crate::error::{Error, Result};

/// Decomposition of `R^n` into `N` consecutive blocks of sizes `n_i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn new(block_sizes: &[usize]) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::input("block partition needs at least one block"));
        }
        let mut offsets = Vec::with_capacity(block_sizes.len() + 1);
        offsets.push(0);
        let mut acc = 0usize;
        for (i, &s) in block_sizes.iter().enumerate() {
            if s == 0 {
                return Err(Error::input(format!("block {i} has size 0")));
            }
            acc += s;
            offsets.push(acc);
        }
        Ok(Self { offsets })
    }

    /// `n` scalar blocks.
    pub fn scalar(n: usize) -> Result<Self> {
        Self::new(&vec![1; n])
    }

    /// Blocks of size `block_size`; the last block takes the remainder.
    pub fn uniform(n: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::input("block size must be positive"));
        }
        let mut sizes = vec![block_size; n / block_size];
        if !n.is_multiple_of(block_size) {
            sizes.push(n % block_size);
        }
        Self::new(&sizes)
    }

    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total dimension `n`.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn block_size(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Block containing coordinate `c`.
    pub fn block_of(&self, c: usize) -> usize {
        match self.offsets.binary_search(&c) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_and_lookup() {
        let p = BlockPartition::new(&[2, 1, 3]).unwrap();
        assert_eq!(p.dim(), 6);
        assert_eq!(p.num_blocks(), 3);
        assert_eq!(p.offsets(), &[0, 2, 3, 6]);
        assert_eq!(p.block_of(0), 0);
        assert_eq!(p.block_of(1), 0);
        assert_eq!(p.block_of(2), 1);
        assert_eq!(p.block_of(5), 2);
        assert_eq!(p.range(2), 3..6);
    }

    #[test]
    fn rejects_empty_blocks() {
        assert!(BlockPartition::new(&[1, 0]).is_err());
        assert!(BlockPartition::new(&[]).is_err());
    }

    #[test]
    fn uniform_remainder() {
        let p = BlockPartition::uniform(7, 3).unwrap();
        assert_eq!(p.block_sizes(), vec![3, 3, 1]);
    }
}
