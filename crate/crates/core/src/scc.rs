//! Implication graph of a 2-CNF and an iterative Tarjan SCC pass.

use crate::formula::{Formula, Literal};

const UNSET: u32 = u32::MAX;

/// Literal graph in CSR form: clause `(a ∨ b)` contributes `¬a → b` and
/// `¬b → a`. Node ids are literal codes. Buffers are kept between builds.
#[derive(Debug, Default, Clone)]
pub struct ImplicationGraph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    /// Clause index of each edge, parallel to `targets`.
    origins: Vec<u32>,
}

impl ImplicationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds from the 2-clauses of `f`. Callers guarantee every clause
    /// has two literals.
    pub fn rebuild(&mut self, f: &Formula) {
        let nodes = 2 * f.num_vars();
        self.offsets.clear();
        self.offsets.resize(nodes + 1, 0);
        let lits = f.literals();
        for pair in lits.chunks_exact(2) {
            self.offsets[(!pair[0]).code() as usize + 1] += 1;
            self.offsets[(!pair[1]).code() as usize + 1] += 1;
        }
        for i in 0..nodes {
            self.offsets[i + 1] += self.offsets[i];
        }
        self.targets.clear();
        self.targets.resize(lits.len(), 0);
        self.origins.clear();
        self.origins.resize(lits.len(), 0);
        // Fill back to front so each node's edges end up in clause order.
        let mut cursor = self.offsets[1..].to_vec();
        for (ci, pair) in lits.chunks_exact(2).enumerate().rev() {
            for (from, to) in [(!pair[1], pair[0]), (!pair[0], pair[1])] {
                let slot = &mut cursor[from.code() as usize];
                *slot -= 1;
                self.targets[*slot as usize] = to.code();
                self.origins[*slot as usize] = ci as u32;
            }
        }
    }

    pub fn from_formula(f: &Formula) -> Self {
        let mut g = Self::new();
        g.rebuild(f);
        g
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    /// Successors of `lit`.
    #[inline]
    pub fn successors(&self, lit: Literal) -> &[u32] {
        let i = lit.code() as usize;
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Successors of `lit` paired with the clause index that produced each
    /// edge.
    pub fn edges(&self, lit: Literal) -> impl Iterator<Item = (Literal, usize)> + '_ {
        let i = lit.code() as usize;
        let range = self.offsets[i] as usize..self.offsets[i + 1] as usize;
        self.targets[range.clone()]
            .iter()
            .zip(&self.origins[range])
            .map(|(&t, &c)| (Literal::from_code(t), c as usize))
    }
}

/// Scratch space for Tarjan's algorithm without recursion.
#[derive(Debug, Default, Clone)]
pub struct Tarjan {
    index: Vec<u32>,
    low: Vec<u32>,
    comp: Vec<u32>,
    stack: Vec<u32>,
    frames: Vec<(u32, u32)>,
    count: u32,
}

impl Tarjan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels every node with its component id. Ids are handed out in
    /// completion order, which is a reverse topological order of the
    /// condensation. Returns the number of components.
    pub fn run(&mut self, g: &ImplicationGraph) -> usize {
        let nodes = g.num_nodes();
        self.index.clear();
        self.index.resize(nodes, UNSET);
        self.low.clear();
        self.low.resize(nodes, 0);
        self.comp.clear();
        self.comp.resize(nodes, UNSET);
        self.stack.clear();
        self.frames.clear();
        self.count = 0;
        let mut next_index = 0u32;

        for root in 0..nodes as u32 {
            if self.index[root as usize] != UNSET {
                continue;
            }
            self.index[root as usize] = next_index;
            self.low[root as usize] = next_index;
            next_index += 1;
            self.stack.push(root);
            self.frames.push((root, g.offsets[root as usize]));

            while let Some(frame) = self.frames.last_mut() {
                let v = frame.0 as usize;
                if frame.1 < g.offsets[v + 1] {
                    let w = g.targets[frame.1 as usize] as usize;
                    frame.1 += 1;
                    if self.index[w] == UNSET {
                        self.index[w] = next_index;
                        self.low[w] = next_index;
                        next_index += 1;
                        self.stack.push(w as u32);
                        self.frames.push((w as u32, g.offsets[w]));
                    } else if self.comp[w] == UNSET {
                        // Visited and unassigned means still on the stack.
                        self.low[v] = self.low[v].min(self.index[w]);
                    }
                    continue;
                }
                self.frames.pop();
                if self.low[v] == self.index[v] {
                    loop {
                        let w = self.stack.pop().expect("tarjan stack underflow");
                        self.comp[w as usize] = self.count;
                        if w as usize == v {
                            break;
                        }
                    }
                    self.count += 1;
                }
                if let Some(&(parent, _)) = self.frames.last() {
                    let p = parent as usize;
                    self.low[p] = self.low[p].min(self.low[v]);
                }
            }
        }
        self.count as usize
    }

    /// Component ids from the last [`Tarjan::run`], indexed by literal code.
    pub fn components(&self) -> &[u32] {
        &self.comp
    }

    #[inline]
    pub fn component(&self, lit: Literal) -> u32 {
        self.comp[lit.code() as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implication_edges() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, -2]]).unwrap();
        let g = ImplicationGraph::from_formula(&f);
        let x1 = crate::formula::Var::new(0);
        let x2 = crate::formula::Var::new(1);
        assert_eq!(g.successors(x1.negative()), &[x2.negative().code()]);
        assert_eq!(g.successors(x2.positive()), &[x1.positive().code()]);
        assert!(g.successors(x1.positive()).is_empty());
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        // x1 → x2 → … → xn as a single long path.
        let n = 200_000u32;
        let clauses: Vec<Vec<Literal>> = (0..n - 1)
            .map(|i| vec![crate::formula::Var::new(i).negative(), crate::formula::Var::new(i + 1).positive()])
            .collect();
        let f = Formula::new(n as usize, &clauses).unwrap();
        let g = ImplicationGraph::from_formula(&f);
        let mut t = Tarjan::new();
        assert_eq!(t.run(&g), 2 * n as usize);
    }
}
