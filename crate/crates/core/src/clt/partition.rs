use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A set partition of `{0, ..., m-1}` stored as its restricted growth
/// string: `labels[i]` is the block of position `i`, blocks numbered in
/// order of their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<usize>,
}

impl SetPartition {
    /// Validates a restricted growth string.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let mut next = 0;
        for &l in &labels {
            if l > next {
                return Err(Error::InvalidParameter(format!(
                    "{labels:?} is not a restricted growth string"
                )));
            }
            if l == next {
                next += 1;
            }
        }
        Ok(Self { labels })
    }

    /// The pattern of an arbitrary word: letters relabelled by first
    /// appearance.
    pub fn of_word(word: &[usize]) -> Self {
        let mut seen: Vec<usize> = Vec::new();
        let labels = word
            .iter()
            .map(|x| match seen.iter().position(|y| y == x) {
                Some(i) => i,
                None => {
                    seen.push(*x);
                    seen.len() - 1
                }
            })
            .collect();
        Self { labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_blocks()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                format!(
                    "{{{}}}",
                    b.iter()
                        .map(|i| (i + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        f.write_str(&blocks.join(""))
    }
}

/// All set partitions of an `m`-element set, in lexicographic order of
/// their growth strings.
pub fn set_partitions(m: usize) -> Vec<SetPartition> {
    fn extend(prefix: &mut Vec<usize>, next: usize, m: usize, out: &mut Vec<SetPartition>) {
        if prefix.len() == m {
            out.push(SetPartition {
                labels: prefix.clone(),
            });
            return;
        }
        for l in 0..=next {
            prefix.push(l);
            extend(prefix, next.max(l + 1), m, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(m), 0, m, &mut out);
    out
}

/// `n (n-1) ... (n-k+1)`, the number of injective labellings of `k` blocks
/// by `n` indices.
pub fn falling_factorial<T: Scalar>(n: usize, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| {
        if i >= n {
            T::zero()
        } else {
            acc * &T::from_usize(n - i)
        }
    })
}
