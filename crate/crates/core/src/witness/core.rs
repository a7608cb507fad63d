use std::collections::HashMap;

use crate::formula::{Formula, Var};

/// Widest clause for which the sign patterns fit a 64-bit mask.
pub const MAX_CORE_ARITY: usize = 6;

/// Returns `k` variables that carry all `2^k` sign patterns among the
/// width-`k` clauses of `f`, if any. Such a set is an unsatisfiable
/// sub-formula on its own. Clauses of other widths are ignored, as is any
/// `k` outside `1..=6`. The set that completes first in clause order wins.
pub fn full_sign_core(f: &Formula, k: usize) -> Option<Vec<Var>> {
    if k == 0 || k > MAX_CORE_ARITY {
        return None;
    }
    let full: u64 = if k == MAX_CORE_ARITY { u64::MAX } else { (1u64 << (1 << k)) - 1 };
    let mut patterns: HashMap<[u32; MAX_CORE_ARITY], u64> = HashMap::new();
    for clause in f.clauses().filter(|c| c.len() == k) {
        let mut lits = [clause[0]; MAX_CORE_ARITY];
        lits[..k].copy_from_slice(clause);
        lits[..k].sort_unstable();
        let mut key = [u32::MAX; MAX_CORE_ARITY];
        let mut pattern = 0usize;
        for (j, l) in lits[..k].iter().enumerate() {
            key[j] = l.var().index() as u32;
            if j > 0 && key[j] == key[j - 1] {
                // Repeated variable; cannot belong to a core.
                pattern = usize::MAX;
                break;
            }
            pattern |= (l.is_negated() as usize) << j;
        }
        if pattern == usize::MAX {
            continue;
        }
        let mask = patterns.entry(key).or_default();
        *mask |= 1 << pattern;
        if *mask == full {
            return Some(key[..k].iter().map(|&v| Var::new(v)).collect());
        }
    }
    None
}
