//! Brute-force generation of every term below a rank bound.
//!
//! This module never touches the encoder: terms are built by structural
//! recursion on rank, so it can serve as an independent oracle for
//! injectivity and roundtrip checks.

use num_traits::{One, Zero};

use crate::codec::{decode, CodecConfig};
use crate::registry::Registry;
use crate::syntax::{ArgSpec, ConstrsType};
use crate::term::{Arg, Term};
use crate::Nat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBudget {
    /// Only terms with rank strictly below this are produced.
    pub max_rank: usize,
    /// How many values of each infinite base are used.
    pub base_budget: usize,
}

impl EnumBudget {
    pub fn new(max_rank: usize, base_budget: usize) -> Self {
        EnumBudget { max_rank, base_budget }
    }
}

fn base_values(constrs: &ConstrsType, registry: &Registry, budget: usize) -> Vec<Vec<Vec<Nat>>> {
    constrs
        .constructors
        .iter()
        .map(|c| {
            c.args
                .iter()
                .map(|a| match a {
                    ArgSpec::Base(b) => {
                        registry.get(b).map(|codec| codec.enumeration_values(budget)).unwrap_or_default()
                    }
                    ArgSpec::Rec => Vec::new(),
                })
                .collect()
        })
        .collect()
}

/// All ways to write `total` as an ordered sum of `parts` positive integers,
/// in lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Every well-formed term with rank below `budget.max_rank` (infinite bases
/// truncated to `budget.base_budget` values), ordered by rank, then
/// constructor index, then lexicographically by argument tuple. A recursive
/// argument compares by its own position in this order.
pub fn enumerate_upto_rank(constrs: &ConstrsType, registry: &Registry, budget: EnumBudget) -> Vec<Term> {
    let values = base_values(constrs, registry, budget.base_budget);
    let mut all: Vec<Term> = Vec::new();
    // ids of the terms of each exact rank, as positions in `all`
    let mut by_rank: Vec<Vec<usize>> = vec![Vec::new()];

    for r in 1..budget.max_rank {
        let mut level = Vec::new();
        for (ctor, sig) in constrs.constructors.iter().enumerate() {
            let rec_slots = sig.rec_arity();
            let splits = if rec_slots == 0 {
                if r == 1 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            } else {
                compositions(r - 1, rec_slots)
            };

            // Each candidate is a key vector: base value index or term id per slot.
            let mut keys: Vec<Vec<usize>> = Vec::new();
            for split in &splits {
                let choices: Vec<Vec<usize>> = {
                    let mut rec = split.iter();
                    sig.args
                        .iter()
                        .zip(&values[ctor])
                        .map(|(spec, vals)| match spec {
                            ArgSpec::Base(_) => (0..vals.len()).collect(),
                            ArgSpec::Rec => by_rank[*rec.next().expect("one part per slot")].clone(),
                        })
                        .collect()
                };
                let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
                for options in &choices {
                    partial = partial
                        .into_iter()
                        .flat_map(|p| {
                            options.iter().map(move |&o| {
                                let mut q = p.clone();
                                q.push(o);
                                q
                            })
                        })
                        .collect();
                }
                keys.extend(partial);
            }
            keys.sort();

            for key in keys {
                let args = sig
                    .args
                    .iter()
                    .zip(&key)
                    .enumerate()
                    .map(|(slot, (spec, &k))| match spec {
                        ArgSpec::Base(b) => Arg::base(b, values[ctor][slot][k].clone()),
                        ArgSpec::Rec => Arg::Rec(all[k].clone()),
                    })
                    .collect();
                level.push(Term::new(ctor, args));
            }
        }
        let start = all.len();
        by_rank.push((start..start + level.len()).collect());
        all.extend(level);
    }
    all
}

/// `enumerate_upto_rank(..).len()`, computed by dynamic programming over
/// rank without building any term.
pub fn count_upto_rank(constrs: &ConstrsType, registry: &Registry, budget: EnumBudget) -> Nat {
    let values = base_values(constrs, registry, budget.base_budget);
    let weights: Vec<Nat> = constrs
        .constructors
        .iter()
        .zip(&values)
        .map(|(sig, vals)| {
            sig.args
                .iter()
                .zip(vals)
                .filter(|(spec, _)| matches!(spec, ArgSpec::Base(_)))
                .map(|(_, v)| Nat::from(v.len()))
                .product()
        })
        .collect();
    let max_arity = constrs.constructors.iter().map(|c| c.rec_arity()).max().unwrap_or(0);

    // exact[r] = number of terms of rank exactly r
    let mut exact: Vec<Nat> = vec![Nat::zero(); budget.max_rank.max(1)];
    for r in 1..budget.max_rank {
        // ways[j][s]: ordered j-tuples of terms whose ranks sum to s
        let mut ways: Vec<Vec<Nat>> = vec![vec![Nat::zero(); r]; max_arity + 1];
        ways[0][0] = Nat::one();
        for j in 1..=max_arity {
            for s in 1..r {
                let mut acc = Nat::zero();
                for last in 1..=s {
                    if !ways[j - 1][s - last].is_zero() && !exact[last].is_zero() {
                        acc += &ways[j - 1][s - last] * &exact[last];
                    }
                }
                ways[j][s] = acc;
            }
        }
        exact[r] = constrs.constructors.iter().zip(&weights).map(|(sig, w)| w * &ways[sig.rec_arity()][r - 1]).sum();
    }
    exact.into_iter().sum()
}

/// Every `k < limit` that decodes, with its term.
pub fn scan_decode(cfg: &CodecConfig, limit: &Nat) -> Vec<(Nat, Term)> {
    let mut out = Vec::new();
    let mut k = Nat::zero();
    while &k < limit {
        if let Some(t) = decode(&k, cfg) {
            out.push((k.clone(), t));
        }
        k += 1u32;
    }
    out
}
