use crate::formula::{Formula, Var};

/// Variable-variable incidence graph: one vertex per variable that occurs
/// in the formula, an edge whenever two variables share a clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vig {
    adj: Vec<Vec<Var>>,
    present: Vec<bool>,
}

impl Vig {
    pub fn vertices(&self) -> impl Iterator<Item = Var> + '_ {
        self.present.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| Var::new(i as u32))
    }

    pub fn neighbors(&self, v: Var) -> &[Var] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: Var) -> usize {
        self.adj[v.index()].len()
    }

    pub fn has_edge(&self, a: Var, b: Var) -> bool {
        self.adj[a.index()].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(Var, Var)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| {
                let a = Var::new(i as u32);
                list.iter().filter(move |&&b| a < b).map(move |&b| (a, b))
            })
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

pub fn build_vig(f: &Formula) -> Vig {
    let n = f.num_vars();
    let mut adj: Vec<Vec<Var>> = vec![Vec::new(); n];
    let mut present = vec![false; n];
    for clause in f.clauses() {
        for (i, a) in clause.iter().enumerate() {
            present[a.var().index()] = true;
            for b in &clause[i + 1..] {
                if a.var() != b.var() {
                    adj[a.var().index()].push(b.var());
                    adj[b.var().index()].push(a.var());
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    Vig { adj, present }
}
