//! Duplicate-free generation by lexicographic-prefix growth.
//!
//! The lexicographically largest box of a solid partition is always
//! removable, so every partition arises exactly once by repeatedly adding an
//! addable box that is larger than all boxes present.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{Cell, SolidPartition};

/// Prefix size at which the tree is cut into independent subtrees.
pub const DEFAULT_SPLIT_DEPTH: usize = 3;

fn children(p: &SolidPartition) -> impl Iterator<Item = SolidPartition> + '_ {
    let last = p.last().copied();
    p.addable()
        .into_iter()
        .filter(move |c| last.is_none_or(|l| *c > l))
        .map(move |c: Cell| p.push_unchecked(c))
}

/// Depth-first stream of all partitions extending `root` up to `max_size`
/// boxes, `root` included.
pub struct Subtree {
    stack: Vec<SolidPartition>,
    max_size: usize,
}

impl Subtree {
    pub fn new(root: SolidPartition, max_size: usize) -> Self {
        let stack = if root.size() <= max_size { vec![root] } else { Vec::new() };
        Subtree { stack, max_size }
    }
}

impl Iterator for Subtree {
    type Item = SolidPartition;

    fn next(&mut self) -> Option<SolidPartition> {
        let p = self.stack.pop()?;
        if p.size() < self.max_size {
            let mut kids: Vec<_> = children(&p).collect();
            // reversed so that the smallest child is explored first
            kids.reverse();
            self.stack.extend(kids);
        }
        Some(p)
    }
}

/// All partitions with exactly `n` boxes, in lexicographic order.
pub fn enumerate(n: usize) -> Vec<SolidPartition> {
    let mut out: Vec<_> = Subtree::new(SolidPartition::empty(), n).filter(|p| p.size() == n).collect();
    out.sort();
    out
}

/// All partitions with at most `n` boxes, ordered by size then lexicographically.
pub fn enumerate_up_to(n: usize) -> Vec<SolidPartition> {
    let mut out: Vec<_> = Subtree::new(SolidPartition::empty(), n).collect();
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    out
}

/// Number of partitions of each size `0..=n`.
pub fn count_up_to(n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    for p in Subtree::new(SolidPartition::empty(), n) {
        counts[p.size()] += 1;
    }
    counts
}

/// Apply `f` to every partition with at most `n` boxes in parallel.
///
/// The prefix tree is cut at `split_depth`; each cut subtree is an
/// independent work item. The output is in the canonical order of
/// [`enumerate_up_to`] whatever the split or thread count.
pub fn par_map_up_to<T, F>(n: usize, split_depth: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&SolidPartition) -> T + Sync + Send,
{
    let depth = split_depth.min(n);
    let mut shallow = Vec::new();
    let mut roots = Vec::new();
    for p in Subtree::new(SolidPartition::empty(), depth) {
        if p.size() == depth {
            roots.push(p);
        } else {
            shallow.push(p);
        }
    }
    let mut tagged: Vec<(SolidPartition, T)> = shallow
        .into_par_iter()
        .map(|p| {
            let v = f(&p);
            (p, v)
        })
        .collect();
    let deep: Vec<(SolidPartition, T)> = roots
        .into_par_iter()
        .flat_map_iter(|root| {
            Subtree::new(root, n).map(|p| {
                let v = f(&p);
                (p, v)
            })
        })
        .collect();
    tagged.extend(deep);
    tagged.sort_by(|(a, _), (b, _)| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    tagged.into_iter().map(|(_, v)| v).collect()
}

/// Independent oracle: grow by adding any addable box, deduplicating sets.
pub fn brute_force(n: usize) -> Vec<BTreeSet<SolidPartition>> {
    let mut levels = vec![BTreeSet::from([SolidPartition::empty()])];
    for k in 0..n {
        let mut next = BTreeSet::new();
        for p in &levels[k] {
            for c in p.addable() {
                let mut boxes = p.boxes().to_vec();
                boxes.push(c);
                next.insert(SolidPartition::new(boxes).expect("addable box keeps closure"));
            }
        }
        levels.push(next);
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sizes() {
        assert_eq!(enumerate(0), vec![SolidPartition::empty()]);
        assert_eq!(enumerate(1), vec!["0,0,0,0".parse().unwrap()]);
        let two = enumerate(2);
        assert_eq!(two.len(), 4);
        for p in &two {
            assert!(p.contains(&[0, 0, 0, 0]));
        }
    }

    #[test]
    fn counts_match_oracle() {
        assert_eq!(count_up_to(5), vec![1, 1, 4, 10, 26, 59]);
        let oracle = brute_force(5);
        for (n, level) in oracle.iter().enumerate() {
            let mine: BTreeSet<_> = enumerate(n).into_iter().collect();
            assert_eq!(&mine, level, "size {n}");
        }
    }

    #[test]
    fn prefixes_are_partitions() {
        for p in enumerate(5) {
            for k in 0..=p.size() {
                assert!(SolidPartition::new(p.boxes()[..k].to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn parallel_order_is_independent_of_split() {
        let base: Vec<String> = enumerate_up_to(5).iter().map(|p| p.to_string()).collect();
        for depth in [0, 1, 2, 4, 9] {
            let got = par_map_up_to(5, depth, |p| p.to_string());
            assert_eq!(got, base, "split depth {depth}");
        }
    }
}
