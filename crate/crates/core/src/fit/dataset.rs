use crate::bdge::BivariatePoint;
use crate::error::{Error, Result};

/// Observed pairs with the index partition `I1 = {x1 < x2}`,
/// `I2 = {x1 > x2}`, `I0 = {x1 = x2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateDataset {
    pairs: Vec<BivariatePoint>,
    i0: Vec<usize>,
    i1: Vec<usize>,
    i2: Vec<usize>,
}

impl BivariateDataset {
    pub fn new(pairs: Vec<BivariatePoint>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyData);
        }
        let (mut i0, mut i1, mut i2) = (Vec::new(), Vec::new(), Vec::new());
        for (i, pt) in pairs.iter().enumerate() {
            match pt.x1.cmp(&pt.x2) {
                std::cmp::Ordering::Less => i1.push(i),
                std::cmp::Ordering::Greater => i2.push(i),
                std::cmp::Ordering::Equal => i0.push(i),
            }
        }
        Ok(Self { pairs, i0, i1, i2 })
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(a, b)| BivariatePoint::new(a, b)).collect())
    }

    pub fn pairs(&self) -> &[BivariatePoint] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn i0(&self) -> &[usize] {
        &self.i0
    }
    pub fn i1(&self) -> &[usize] {
        &self.i1
    }
    pub fn i2(&self) -> &[usize] {
        &self.i2
    }

    /// `(n0, n1, n2)`.
    pub fn partition_sizes(&self) -> (usize, usize, usize) {
        (self.i0.len(), self.i1.len(), self.i2.len())
    }

    pub fn column1(&self) -> Vec<u32> {
        self.pairs.iter().map(|p| p.x1).collect()
    }

    pub fn column2(&self) -> Vec<u32> {
        self.pairs.iter().map(|p| p.x2).collect()
    }

    pub fn max_column(&self) -> Vec<u32> {
        self.pairs.iter().map(|p| p.x1.max(p.x2)).collect()
    }

    /// Columns exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.pairs.iter().map(|p| BivariatePoint::new(p.x2, p.x1)).collect()).expect("non-empty")
    }

    /// Distinct points with multiplicities, sorted.
    pub fn distinct(&self) -> Vec<(BivariatePoint, usize)> {
        let mut sorted = self.pairs.clone();
        sorted.sort();
        let mut out: Vec<(BivariatePoint, usize)> = Vec::new();
        for pt in sorted {
            match out.last_mut() {
                Some((last, c)) if *last == pt => *c += 1,
                _ => out.push((pt, 1)),
            }
        }
        out
    }

    /// Counts over `0..rows` x `0..cols`; larger values land in the last row/column.
    pub fn contingency(&self, rows: usize, cols: usize) -> Vec<Vec<u64>> {
        let mut t = vec![vec![0u64; cols]; rows];
        for p in &self.pairs {
            let r = (p.x1 as usize).min(rows - 1);
            let c = (p.x2 as usize).min(cols - 1);
            t[r][c] += 1;
        }
        t
    }
}
