//! Solid partitions (finite downward-closed box sets in `Z>=0^4`) and the
//! statistics the vertex and sign formulas consume.

mod enumerate;
mod jsonl;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{EquivariantClass, Monomial};
use crate::error::{Error, Result};

pub use enumerate::{
    brute_force, count_up_to, enumerate, enumerate_up_to, par_map_up_to, Subtree, DEFAULT_SPLIT_DEPTH,
};
pub use jsonl::{read_jsonl, write_jsonl, PartitionRecord};

/// A box `(i, j, k, l)`.
pub type Cell = [u32; 4];

/// Boxes kept in lexicographic order without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Cell>", into = "Vec<Cell>")]
pub struct SolidPartition {
    boxes: Vec<Cell>,
}

impl TryFrom<Vec<Cell>> for SolidPartition {
    type Error = Error;
    fn try_from(boxes: Vec<Cell>) -> Result<Self> {
        Self::new(boxes)
    }
}

impl From<SolidPartition> for Vec<Cell> {
    fn from(p: SolidPartition) -> Self {
        p.boxes
    }
}

/// The four boxes obtained by lowering one coordinate (those that exist).
pub fn predecessors(c: &Cell) -> impl Iterator<Item = Cell> + '_ {
    (0..4).filter(move |&i| c[i] > 0).map(move |i| {
        let mut d = *c;
        d[i] -= 1;
        d
    })
}

impl SolidPartition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validate distinctness and downward closure.
    pub fn new(mut boxes: Vec<Cell>) -> Result<Self> {
        boxes.sort_unstable();
        if let Some(w) = boxes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition(format!("repeated box {:?}", w[0])));
        }
        let p = SolidPartition { boxes };
        for c in &p.boxes {
            if let Some(missing) = predecessors(c).find(|d| !p.contains(d)) {
                return Err(Error::InvalidPartition(format!(
                    "box {c:?} present but its predecessor {missing:?} is missing"
                )));
            }
        }
        Ok(p)
    }

    /// Append a box known to be lexicographically last and addable.
    pub(crate) fn push_unchecked(&self, c: Cell) -> Self {
        let mut boxes = self.boxes.clone();
        boxes.push(c);
        SolidPartition { boxes }
    }

    pub fn boxes(&self) -> &[Cell] {
        &self.boxes
    }

    pub fn size(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.boxes.binary_search(c).is_ok()
    }

    pub fn last(&self) -> Option<&Cell> {
        self.boxes.last()
    }

    /// Boxes not in `self` whose predecessors all are.
    pub fn addable(&self) -> Vec<Cell> {
        if self.boxes.is_empty() {
            return vec![[0; 4]];
        }
        let mut out: Vec<Cell> = self
            .boxes
            .iter()
            .flat_map(|c| {
                (0..4).map(move |i| {
                    let mut d = *c;
                    d[i] += 1;
                    d
                })
            })
            .filter(|d| !self.contains(d) && predecessors(d).all(|e| self.contains(&e)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Color `i - j mod r` of a box.
    pub fn color(c: &Cell, r: u32) -> u32 {
        (c[0] as i64 - c[1] as i64).rem_euclid(r as i64) as u32
    }

    pub fn color_vector(&self, r: u32) -> Vec<u32> {
        assert!(r >= 1, "number of colors must be positive");
        let mut v = vec![0; r as usize];
        for c in &self.boxes {
            v[Self::color(c, r) as usize] += 1;
        }
        v
    }

    /// `|{(i,i,i,j) : j > i}|`.
    pub fn mu(&self) -> u32 {
        self.mu_axis(4)
    }

    /// `|{a : a_j = a_k = a_l < a_i}|` where `{j,k,l}` are the other axes.
    pub fn mu_axis(&self, axis: usize) -> u32 {
        assert!((1..=4).contains(&axis), "axis must be in 1..=4");
        let i = axis - 1;
        let others: Vec<usize> = (0..4).filter(|&x| x != i).collect();
        self.boxes
            .iter()
            .filter(|c| {
                let v = c[others[0]];
                others.iter().all(|&o| c[o] == v) && v < c[i]
            })
            .count() as u32
    }

    /// `|{(i,j,k,l) : l != min(i,j,k)}|`.
    pub fn k_stat(&self) -> u32 {
        self.boxes.iter().filter(|c| c[3] != c[0].min(c[1]).min(c[2])).count() as u32
    }

    /// `a_{ij} = |{(a+i, a, b+j, b)}|`, supported on finitely many `(i, j)`.
    pub fn a_stats(&self) -> BTreeMap<(i64, i64), u64> {
        let mut out = BTreeMap::new();
        for c in &self.boxes {
            let key = (c[0] as i64 - c[1] as i64, c[2] as i64 - c[3] as i64);
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }

    /// `a_00 - 1/2 sum (a_{km} - a_{k+1,m} - a_{k,m+1} + a_{k+1,m+1})^2`.
    pub fn c_stat(&self) -> i64 {
        let a = self.a_stats();
        if a.is_empty() {
            return 0;
        }
        let get = |k: i64, m: i64| a.get(&(k, m)).copied().unwrap_or(0) as i64;
        let kmin = a.keys().map(|x| x.0).min().unwrap() - 1;
        let kmax = a.keys().map(|x| x.0).max().unwrap();
        let mmin = a.keys().map(|x| x.1).min().unwrap() - 1;
        let mmax = a.keys().map(|x| x.1).max().unwrap();
        let mut squares = 0i64;
        for k in kmin..=kmax {
            for m in mmin..=mmax {
                let d = get(k, m) - get(k + 1, m) - get(k, m + 1) + get(k + 1, m + 1);
                squares += d * d;
            }
        }
        debug_assert!(squares % 2 == 0);
        get(0, 0) - squares / 2
    }

    /// `Z = sum t^box`.
    pub fn character(&self) -> EquivariantClass {
        EquivariantClass::from_terms(self.boxes.iter().map(|c| (Monomial::t(c.map(|x| x as i32)), 1)))
    }

    /// The part of `Z` carried by boxes of color `l` modulo `r`.
    pub fn colored_character(&self, r: u32, l: u32) -> EquivariantClass {
        assert!(l < r, "color index out of range");
        EquivariantClass::from_terms(
            self.boxes
                .iter()
                .filter(|c| Self::color(c, r) == l)
                .map(|c| (Monomial::t(c.map(|x| x as i32)), 1)),
        )
    }
}

impl fmt::Display for SolidPartition {
    /// `i,j,k,l;i,j,k,l;...`, the same syntax [`FromStr`] accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.boxes.iter().map(|c| format!("{},{},{},{}", c[0], c[1], c[2], c[3])).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for SolidPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let mut boxes = Vec::new();
        for chunk in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let coords: Vec<u32> = chunk
                .split(',')
                .map(|x| x.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidPartition(format!("bad box `{chunk}`: {e}")))?;
            let cell: Cell = coords
                .try_into()
                .map_err(|_| Error::InvalidPartition(format!("box `{chunk}` needs four coordinates")))?;
            boxes.push(cell);
        }
        Self::new(boxes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SolidPartition {
        s.parse().unwrap()
    }

    #[test]
    fn validation() {
        assert!("0,0,0,1".parse::<SolidPartition>().is_err());
        assert!("0,0,0,0;0,0,0,0".parse::<SolidPartition>().is_err());
        assert!("0,0,0".parse::<SolidPartition>().is_err());
        assert_eq!(p("0,0,0,0;1,0,0,0").size(), 2);
        assert_eq!(p("1,0,0,0;0,0,0,0").to_string(), "0,0,0,0;1,0,0,0");
    }

    #[test]
    fn colors() {
        assert_eq!(p("0,0,0,0").color_vector(2), vec![1, 0]);
        assert_eq!(p("0,0,0,0;1,0,0,0").color_vector(2), vec![1, 1]);
        assert_eq!(p("0,0,0,0;1,0,0,0;0,1,0,0").color_vector(3), vec![1, 1, 1]);
    }

    #[test]
    fn mu_and_k() {
        assert_eq!(p("0,0,0,0").mu(), 0);
        assert_eq!(p("0,0,0,0;0,0,0,1").mu(), 1);
        assert_eq!(p("0,0,0,0;0,0,0,1;0,0,0,2").mu(), 2);
        assert_eq!(p("0,0,0,0;1,0,0,0").mu_axis(1), 1);
        assert_eq!(p("0,0,0,0").k_stat(), 0);
        assert_eq!(p("0,0,0,0;0,0,0,1").k_stat(), 1);
        assert_eq!(p("0,0,0,0;1,0,0,0").k_stat(), 0);
    }

    #[test]
    fn a_and_c() {
        let one = p("0,0,0,0");
        assert_eq!(one.a_stats(), BTreeMap::from([((0, 0), 1)]));
        assert_eq!(one.c_stat(), -1);
        assert_eq!(p("0,0,0,0;1,0,0,0").a_stats(), BTreeMap::from([((0, 0), 1), ((1, 0), 1)]));
        assert_eq!(SolidPartition::empty().c_stat(), 0);
    }

    #[test]
    fn characters() {
        assert_eq!(p("0,0,0,0").character(), EquivariantClass::one());
        let two = p("0,0,0,0;1,0,0,0");
        assert_eq!(two.character(), &EquivariantClass::one() + &EquivariantClass::t(1));
        assert_eq!(two.colored_character(2, 1), EquivariantClass::t(1));
    }
}
