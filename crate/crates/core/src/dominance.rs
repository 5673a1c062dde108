//! Dominance between evaluated designs and the non-dominated filter.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::EvaluatedDesign;

/// `a` dominates `b` when it performs at least as well with no more capacity
/// in any DER, and differs from `b` somewhere.
pub fn dominates(a: &EvaluatedDesign, b: &EvaluatedDesign) -> Result<bool> {
    if a.design.len() != b.design.len() {
        return Err(Error::invalid(format!(
            "cannot compare designs of {} and {} DERs",
            a.design.len(),
            b.design.len()
        )));
    }
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &EvaluatedDesign, b: &EvaluatedDesign) -> bool {
    if a.deficit_ratio > b.deficit_ratio {
        return false;
    }
    let mut strict = a.deficit_ratio < b.deficit_ratio;
    for (&ca, &cb) in a.capacities().iter().zip(b.capacities()) {
        if ca > cb {
            return false;
        }
        strict |= ca < cb;
    }
    strict
}

/// Lexicographic order on capacity vectors.
pub fn lexicographic(a: &EvaluatedDesign, b: &EvaluatedDesign) -> Ordering {
    a.capacities()
        .iter()
        .zip(b.capacities())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.capacities().len().cmp(&b.capacities().len()))
}

/// Keeps the first occurrence of every capacity vector, preserving order.
pub fn dedupe(set: impl IntoIterator<Item = EvaluatedDesign>) -> Vec<EvaluatedDesign> {
    let mut seen = HashSet::new();
    set.into_iter()
        .filter(|e| seen.insert(e.design.key()))
        .collect()
}

/// Deduplicates, drops every dominated design and returns the survivors in
/// lexicographic capacity order.
pub fn non_dominated(set: impl IntoIterator<Item = EvaluatedDesign>) -> Vec<EvaluatedDesign> {
    let mut designs = dedupe(set);
    designs.sort_by(lexicographic);
    // A dominator is lexicographically smaller, and by transitivity some
    // retained design dominates anything a discarded one dominates.
    let mut kept: Vec<EvaluatedDesign> = Vec::with_capacity(designs.len());
    for candidate in designs {
        let dominated = kept.iter().any(|k| {
            k.design.len() == candidate.design.len() && dominates_unchecked(k, &candidate)
        });
        if !dominated {
            kept.push(candidate);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MicrogridDesign;
    use proptest::prelude::*;

    fn ev(caps: &[f64], ratio: f64) -> EvaluatedDesign {
        EvaluatedDesign {
            design: MicrogridDesign::new(caps.to_vec()),
            deficit_ratio: ratio,
            unused_ratios: vec![0.0; caps.len()],
        }
    }

    #[test]
    fn componentwise_smaller_dominates() {
        let a = ev(&[25.0, 245.0, 650.0], 0.0);
        let b = ev(&[25.0, 245.0, 660.0], 0.0);
        assert!(dominates(&a, &b).unwrap());
        assert!(!dominates(&b, &a).unwrap());
    }

    #[test]
    fn incomparable_capacities() {
        let a = ev(&[45.0, 0.0, 650.0], 0.0);
        let b = ev(&[45.0, 70.0, 450.0], 0.0);
        assert!(!dominates(&a, &b).unwrap());
        assert!(!dominates(&b, &a).unwrap());
    }

    #[test]
    fn identical_entries_do_not_dominate() {
        let a = ev(&[45.0, 0.0, 650.0], 0.0);
        assert!(!dominates(&a, &a.clone()).unwrap());
    }

    #[test]
    fn same_capacities_better_ratio_dominates() {
        assert!(dominates(&ev(&[10.0], 0.1), &ev(&[10.0], 0.2)).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(dominates(&ev(&[1.0], 0.0), &ev(&[1.0, 2.0], 0.0)).is_err());
    }

    #[test]
    fn smallest_zero_deficit_survives() {
        let out = non_dominated(vec![ev(&[80.0], 0.0), ev(&[60.0], 0.0), ev(&[100.0], 0.0)]);
        assert_eq!(out, vec![ev(&[60.0], 0.0)]);
    }

    #[test]
    fn smaller_but_worse_is_kept() {
        let out = non_dominated(vec![ev(&[60.0], 0.0), ev(&[40.0], 0.2)]);
        assert_eq!(out, vec![ev(&[40.0], 0.2), ev(&[60.0], 0.0)]);
    }

    #[test]
    fn duplicates_collapse_to_first() {
        let mut second = ev(&[60.0, 5.0], 0.0);
        second.unused_ratios = vec![0.5, 0.5];
        let out = non_dominated(vec![ev(&[60.0, 5.0], 0.0), second]);
        assert_eq!(out, vec![ev(&[60.0, 5.0], 0.0)]);
    }

    #[test]
    fn output_is_lexicographic() {
        let out = non_dominated(vec![
            ev(&[70.0, 0.0], 0.0),
            ev(&[45.0, 70.0], 0.0),
            ev(&[45.0, 175.0], 0.01),
            ev(&[120.0, 0.0], 0.0),
        ]);
        let caps: Vec<_> = out.iter().map(|e| e.capacities().to_vec()).collect();
        assert_eq!(caps, vec![vec![45.0, 70.0], vec![70.0, 0.0]]);
    }

    fn arb_design() -> impl Strategy<Value = EvaluatedDesign> {
        (
            proptest::collection::vec(0u8..4, 3),
            prop_oneof![Just(0.0), Just(0.25), Just(0.5)],
        )
            .prop_map(|(caps, r)| ev(&caps.iter().map(|&c| c as f64 * 10.0).collect::<Vec<_>>(), r))
    }

    fn brute_force(set: &[EvaluatedDesign]) -> Vec<EvaluatedDesign> {
        let unique = dedupe(set.to_vec());
        let mut out: Vec<_> = unique
            .iter()
            .filter(|b| !unique.iter().any(|a| dominates(a, b).unwrap()))
            .cloned()
            .collect();
        out.sort_by(lexicographic);
        out
    }

    proptest! {
        #[test]
        fn dominance_is_a_strict_partial_order(
            a in arb_design(), b in arb_design(), c in arb_design(),
        ) {
            prop_assert!(!dominates(&a, &a).unwrap());
            if dominates(&a, &b).unwrap() {
                prop_assert!(!dominates(&b, &a).unwrap());
                if dominates(&b, &c).unwrap() {
                    prop_assert!(dominates(&a, &c).unwrap());
                }
            }
        }

        #[test]
        fn filter_matches_brute_force(set in proptest::collection::vec(arb_design(), 0..40)) {
            let fast = non_dominated(set.clone());
            prop_assert_eq!(&fast, &brute_force(&set));
            for a in &fast {
                for b in &fast {
                    prop_assert!(!dominates(a, b).unwrap());
                }
            }
            let unique = dedupe(set);
            for removed in unique.iter().filter(|e| !fast.iter().any(|k| k.design.key() == e.design.key())) {
                prop_assert!(fast.iter().any(|k| dominates(k, removed).unwrap()));
            }
        }
    }
}
