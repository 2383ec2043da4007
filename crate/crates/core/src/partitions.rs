//! Integer partitions: enumeration, diagram geometry and dominance order.

use std::fmt;

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive parts. The empty partition has
/// weight 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition, dropping trailing zero parts.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "parts {parts:?} are not weakly decreasing"
            )));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "parts {parts:?} contain an interior zero"
            )));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(!parts.contains(&0));
        Partition(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// |κ|
    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// ℓ(κ), the number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `κ_i` with 1-based row index; zero beyond the length.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.0.first().copied().unwrap_or(0);
        let parts = (1..=width)
            .map(|j| self.0.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition(parts)
    }

    /// Cells `(i, j)` of the diagram, 1-based, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| (1..=p).map(move |j| (r + 1, j)))
    }

    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && self.part(i) >= j
    }

    fn check_cell(&self, i: usize, j: usize) -> Result<()> {
        if self.contains_cell(i, j) {
            Ok(())
        } else {
            Err(Error::OutsideDiagram {
                partition: self.to_string(),
                row: i,
                col: j,
            })
        }
    }

    /// Arm length: cells in row `i` strictly right of column `j`.
    pub fn arm(&self, i: usize, j: usize) -> Result<usize> {
        self.check_cell(i, j)?;
        Ok(self.part(i) - j)
    }

    /// Leg length: cells in column `j` strictly below row `i`.
    pub fn leg(&self, i: usize, j: usize) -> Result<usize> {
        self.check_cell(i, j)?;
        Ok(self.0[i..].iter().take_while(|&&p| p >= j).count())
    }

    /// Dominance order `self ≤ other` (partial sums of `self` never exceed
    /// those of `other`).
    pub fn dominance_leq(&self, other: &Partition) -> Result<bool> {
        dominance_leq(self, other)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// `μ ≤ κ` in dominance order. Both partitions must have the same weight.
pub fn dominance_leq(mu: &Partition, kappa: &Partition) -> Result<bool> {
    let (wm, wk) = (mu.weight(), kappa.weight());
    if wm != wk {
        return Err(Error::UnequalWeights(wm, wk));
    }
    let len = mu.len().max(kappa.len());
    let (mut sm, mut sk) = (0usize, 0usize);
    for i in 1..=len {
        sm += mu.part(i);
        sk += kappa.part(i);
        if sm > sk {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Streaming enumeration of the partitions of a fixed weight, in
/// reverse-lexicographic order, with a cap on each row.
#[derive(Clone, Debug)]
pub struct Partitions {
    weight: usize,
    caps: Vec<usize>,
    current: Option<Vec<usize>>,
    started: bool,
}

impl Partitions {
    fn new(weight: usize, caps: Vec<usize>) -> Self {
        let mut eff = Vec::with_capacity(caps.len());
        let mut prev = weight;
        for c in caps {
            prev = prev.min(c);
            eff.push(prev);
        }
        Partitions {
            weight,
            caps: eff,
            current: None,
            started: false,
        }
    }

    /// Greedy completion of `rem` cells into rows `from..`, each part at
    /// most `prev` and its row cap. Returns false if the cells do not fit.
    fn fill(&self, parts: &mut Vec<usize>, mut rem: usize, mut prev: usize) -> bool {
        let mut row = parts.len();
        while rem > 0 {
            if row >= self.caps.len() {
                return false;
            }
            let x = prev.min(self.caps[row]).min(rem);
            if x == 0 {
                return false;
            }
            parts.push(x);
            rem -= x;
            prev = x;
            row += 1;
        }
        true
    }

    fn capacity_after(&self, row: usize, bound: usize) -> usize {
        self.caps
            .iter()
            .skip(row + 1)
            .map(|&c| c.min(bound))
            .sum()
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if !self.started {
            self.started = true;
            let mut parts = Vec::new();
            if self.fill(&mut parts, self.weight, self.weight) {
                self.current = Some(parts);
            }
        } else if let Some(mut parts) = self.current.take() {
            let mut advanced = false;
            let mut suffix = 0usize;
            for p in (0..parts.len()).rev() {
                suffix += parts[p];
                let v = parts[p] - 1;
                if v == 0 {
                    continue;
                }
                let rem = suffix - v;
                if self.capacity_after(p, v) >= rem {
                    parts.truncate(p);
                    parts.push(v);
                    let ok = self.fill(&mut parts, rem, v);
                    debug_assert!(ok);
                    advanced = true;
                    break;
                }
            }
            if advanced {
                self.current = Some(parts);
            }
        }
        self.current
            .as_ref()
            .map(|p| Partition::from_parts_unchecked(p.clone()))
    }
}

/// All partitions of `weight` with at most `max_parts` parts.
pub fn enumerate_partitions(weight: usize, max_parts: usize) -> Partitions {
    Partitions::new(weight, vec![usize::MAX; max_parts.max(1)])
}

/// All partitions of `weight` with `κ_i ≤ caps[i-1]`; the length of `caps`
/// bounds the number of parts.
pub fn enumerate_partitions_capped(weight: usize, caps: &[usize]) -> Partitions {
    Partitions::new(weight, caps.to_vec())
}
