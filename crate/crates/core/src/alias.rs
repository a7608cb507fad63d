//! Walker/Vose alias table for O(1) draws from a discrete distribution.

use crate::rng::Stream;

#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds the table with Vose's method. `weights` must be non-empty,
    /// finite and positive; they need not be normalized.
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        assert!(n > 0 && n <= u32::MAX as usize, "alias table size out of range");
        let total: f64 = weights.iter().sum();
        let scale = n as f64 / total;

        let mut prob: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<u32>, Vec<u32>) =
            (0..n as u32).partition(|&i| prob[i as usize] < 1.0);

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s as usize] = l;
            let rest = (prob[l as usize] + prob[s as usize]) - 1.0;
            prob[l as usize] = rest;
            if rest < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i as usize] = 1.0;
        }
        AliasTable { prob, alias }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Draws a 0-based index, consuming two words of `stream`.
    #[inline]
    pub fn sample(&self, stream: &mut Stream) -> u32 {
        let column = stream.next_below(self.prob.len() as u64) as usize;
        if stream.next_f64() < self.prob[column] {
            column as u32
        } else {
            self.alias[column]
        }
    }

    /// Probability mass the table assigns to each index, reconstructed from
    /// the columns. Used to check the construction.
    pub fn implied_pmf(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut pmf = vec![0.0; self.prob.len()];
        for (i, (&p, &a)) in self.prob.iter().zip(&self.alias).enumerate() {
            pmf[i] += p / n;
            pmf[a as usize] += (1.0 - p) / n;
        }
        pmf
    }
}
