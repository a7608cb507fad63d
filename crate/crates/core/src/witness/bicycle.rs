use crate::formula::{Formula, Literal};
use crate::scc::{ImplicationGraph, Tarjan};

use super::{require_two_cnf, WitnessError};

pub const DEFAULT_T_MAX: usize = 20;

/// Depth-first fallback gives up after this many path extensions.
const DFS_BUDGET: u64 = 2_000_000;

/// Clauses `(u, w_1), (w̄_1, w_2), …, (w̄_{t-1}, w_t), (w̄_t, v)` of a host
/// formula, where the `w_i` are over distinct variables and `u`, `v` are
/// over variables of `w`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Bicycle {
    pub w: Vec<Literal>,
    pub u: Literal,
    pub v: Literal,
    /// Host clause realizing each of the `t + 1` clauses, in order.
    pub clause_indices: Vec<usize>,
}

impl Bicycle {
    pub fn t(&self) -> usize {
        self.w.len()
    }

    /// The `t + 1` clauses as literal pairs.
    pub fn clauses(&self) -> Vec<[Literal; 2]> {
        let t = self.w.len();
        let mut out = Vec::with_capacity(t + 1);
        out.push([self.u, self.w[0]]);
        out.extend(self.w.windows(2).map(|p| [!p[0], p[1]]));
        out.push([!self.w[t - 1], self.v]);
        out
    }

    /// Checks the definition against `host`.
    pub fn is_valid_in(&self, host: &Formula) -> bool {
        let t = self.w.len();
        if t < 2 || self.clause_indices.len() != t + 1 {
            return false;
        }
        let vars: Vec<_> = self.w.iter().map(|l| l.var()).collect();
        let distinct = (0..t).all(|i| !vars[..i].contains(&vars[i]));
        if !distinct || !vars.contains(&self.u.var()) || !vars.contains(&self.v.var()) {
            return false;
        }
        self.clauses().iter().zip(&self.clause_indices).all(|(want, &ci)| {
            ci < host.num_clauses() && same_pair(host.clause(ci), want)
        })
    }
}

fn same_pair(c: &[Literal], want: &[Literal; 2]) -> bool {
    c.len() == 2 && ((c[0] == want[0] && c[1] == want[1]) || (c[0] == want[1] && c[1] == want[0]))
}

struct Search<'a> {
    g: &'a ImplicationGraph,
    in_path: Vec<bool>,
}

impl Search<'_> {
    /// Best closing pair for the chain `path`: an entry clause `(u, w_1)`
    /// and exit clause `(w̄_t, v)` with `|u|, |v|` on the chain, preferring
    /// two different host clauses.
    fn close(&self, path: &[Literal]) -> Option<(Literal, usize, Literal, usize, bool)> {
        let first = path[0];
        let last = *path.last()?;
        // (u ∨ w_1) yields the edge ¬w_1 → u.
        let entries: Vec<_> =
            self.g.edges(!first).filter(|(u, _)| self.in_path[u.var().index()]).collect();
        let exits: Vec<_> =
            self.g.edges(last).filter(|(v, _)| self.in_path[v.var().index()]).collect();
        let mut fallback = None;
        for &(u, s) in &entries {
            for &(v, e) in &exits {
                if s != e {
                    return Some((u, s, v, e, true));
                }
                fallback.get_or_insert((u, s, v, e, false));
            }
        }
        fallback
    }
}

fn assemble(path: &[Literal], links: &[usize], closing: (Literal, usize, Literal, usize, bool)) -> Bicycle {
    let (u, s, v, e, _) = closing;
    let mut clause_indices = Vec::with_capacity(path.len() + 1);
    clause_indices.push(s);
    clause_indices.extend_from_slice(links);
    clause_indices.push(e);
    Bicycle { w: path.to_vec(), u, v, clause_indices }
}

/// Looks for a bicycle of length at most `t_max` in a 2-CNF.
///
/// First pass: inside every non-trivial strongly connected component of the
/// implication graph, grow a chain over fresh variables forwards and then
/// backwards until it cannot be extended inside the component. Such a chain
/// always closes into a bicycle, so this pass finds one in every
/// unsatisfiable formula when `t_max >= n`. If no chain closes with two
/// distinct host clauses, a bounded depth-first search over all chains of
/// length `<= t_max` runs next. A bicycle whose entry and exit use the same
/// host clause is returned only as a last resort.
pub fn find_bicycle(f: &Formula, t_max: usize) -> Result<Option<Bicycle>, WitnessError> {
    require_two_cnf(f)?;
    if f.is_empty() || t_max < 2 {
        return Ok(None);
    }
    let g = ImplicationGraph::from_formula(f);
    let mut tarjan = Tarjan::new();
    let count = tarjan.run(&g);
    let comp = tarjan.components().to_vec();
    let mut size = vec![0u32; count];
    for &c in &comp {
        size[c as usize] += 1;
    }

    let mut search = Search { g: &g, in_path: vec![false; f.num_vars()] };
    let mut fallback: Option<Bicycle> = None;

    for code in 0..g.num_nodes() as u32 {
        let start = Literal::from_code(code);
        let scc = comp[code as usize];
        if size[scc as usize] < 2 {
            continue;
        }
        // path[i] → path[i+1] is realized by clause links[i].
        let mut path = vec![start];
        let mut links = Vec::new();
        search.in_path[start.var().index()] = true;
        while let Some((next, ci)) = g.edges(*path.last().unwrap()).find(|(w, _)| {
            comp[w.code() as usize] == scc && !search.in_path[w.var().index()]
        }) {
            search.in_path[next.var().index()] = true;
            path.push(next);
            links.push(ci);
        }
        // Predecessors of w_1 are the negations of the successors of ¬w_1.
        while let Some((prev, ci)) = g.edges(!path[0]).map(|(w, ci)| (!w, ci)).find(|(p, _)| {
            comp[p.code() as usize] == scc && !search.in_path[p.var().index()]
        }) {
            search.in_path[prev.var().index()] = true;
            path.insert(0, prev);
            links.insert(0, ci);
        }
        let found = if path.len() >= 2 && path.len() <= t_max { search.close(&path) } else { None };
        for l in &path {
            search.in_path[l.var().index()] = false;
        }
        match found {
            Some(closing) if closing.4 => return Ok(Some(assemble(&path, &links, closing))),
            Some(closing) if fallback.is_none() => fallback = Some(assemble(&path, &links, closing)),
            _ => {}
        }
    }

    let mut budget = DFS_BUDGET;
    let mut path = Vec::with_capacity(t_max);
    let mut links = Vec::with_capacity(t_max);
    for code in 0..g.num_nodes() as u32 {
        let start = Literal::from_code(code);
        path.push(start);
        search.in_path[start.var().index()] = true;
        let hit = dfs(&mut search, &mut path, &mut links, t_max, &mut budget);
        search.in_path[start.var().index()] = false;
        path.clear();
        links.clear();
        if let Some(b) = hit {
            return Ok(Some(b));
        }
        if budget == 0 {
            break;
        }
    }
    Ok(fallback)
}

fn dfs(
    search: &mut Search<'_>,
    path: &mut Vec<Literal>,
    links: &mut Vec<usize>,
    t_max: usize,
    budget: &mut u64,
) -> Option<Bicycle> {
    if path.len() >= 2 {
        if let Some(closing) = search.close(path) {
            if closing.4 {
                return Some(assemble(path, links, closing));
            }
        }
    }
    if path.len() == t_max {
        return None;
    }
    let last = *path.last().unwrap();
    let g = search.g;
    for (next, ci) in g.edges(last) {
        if search.in_path[next.var().index()] {
            continue;
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        search.in_path[next.var().index()] = true;
        path.push(next);
        links.push(ci);
        let hit = dfs(search, path, links, t_max, budget);
        path.pop();
        links.pop();
        search.in_path[next.var().index()] = false;
        if hit.is_some() {
            return hit;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve2;

    fn lit(d: i64) -> Literal {
        Literal::from_dimacs(d).unwrap()
    }

    #[test]
    fn definition_instance() {
        let f = Formula::from_dimacs_clauses(2, &[&[2, 1], &[-1, 2], &[-2, 1]]).unwrap();
        assert!(solve2(&f).unwrap().is_sat());
        let b = find_bicycle(&f, DEFAULT_T_MAX).unwrap().unwrap();
        assert_eq!(b.t(), 2);
        assert_eq!(b.w, vec![lit(1), lit(2)]);
        assert_eq!(b.u, lit(2));
        assert_eq!(b.v, lit(1));
        assert_eq!(b.clause_indices, vec![0, 1, 2]);
        assert!(b.is_valid_in(&f));
    }

    #[test]
    fn empty_and_acyclic_formulas_have_none() {
        assert_eq!(find_bicycle(&Formula::with_arity(3, 2), 10).unwrap(), None);
        let chain = Formula::from_dimacs_clauses(4, &[&[-1, 2], &[-2, 3], &[-3, 4]]).unwrap();
        assert_eq!(find_bicycle(&chain, 10).unwrap(), None);
    }

    #[test]
    fn respects_t_max() {
        // Implication cycle x1 → x2 → x3 → x4 → x1 needs t = 4.
        let f =
            Formula::from_dimacs_clauses(4, &[&[-1, 2], &[-2, 3], &[-3, 4], &[-4, 1]]).unwrap();
        assert_eq!(find_bicycle(&f, 3).unwrap(), None);
        let b = find_bicycle(&f, 4).unwrap().unwrap();
        assert!(b.is_valid_in(&f));
        assert_eq!(b.t(), 4);
    }

    #[test]
    fn rejects_wider_clauses() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, 2, 3]]).unwrap();
        assert_eq!(find_bicycle(&f, 5), Err(WitnessError::Arity { found: Some(3) }));
    }

    #[test]
    fn unsat_core_contains_bicycle() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]).unwrap();
        let b = find_bicycle(&f, 2).unwrap().unwrap();
        assert!(b.is_valid_in(&f));
        let distinct: std::collections::HashSet<_> = b.clause_indices.iter().collect();
        assert_eq!(distinct.len(), 3);
    }
}
