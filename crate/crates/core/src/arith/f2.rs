//! Vectors over F₂ and the affine-span solver for square classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Integer, SquareClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    words: Vec<u64>,
    len: usize,
}

impl F2Vector {
    pub fn zero(len: usize) -> Self {
        F2Vector {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    fn lowest_set(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// Result of asking whether the affine span of a vector family holds 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineSolution {
    pub rank: usize,
    pub origin_in_affine_span: bool,
    /// Odd-size index set whose vectors sum to zero.
    pub witness: Option<Vec<usize>>,
}

/// Rank of the family and whether some odd-cardinality subset sums to zero,
/// i.e. whether `Vx = 0, 1·x = 1` is solvable over F₂.
pub fn f2_solve_affine(vectors: &[F2Vector]) -> AffineSolution {
    let k = vectors.len();
    // pivot column -> (reduced row, combination of original indices)
    let mut pivots: BTreeMap<usize, (F2Vector, F2Vector)> = BTreeMap::new();
    let mut odd_relation = None;
    for (j, v) in vectors.iter().enumerate() {
        let mut row = v.clone();
        let mut combo = F2Vector::zero(k);
        combo.set(j);
        while let Some(col) = row.lowest_set() {
            match pivots.get(&col) {
                Some((prow, pcombo)) => {
                    row.xor_assign(prow);
                    combo.xor_assign(pcombo);
                }
                None => break,
            }
        }
        match row.lowest_set() {
            Some(col) => {
                pivots.insert(col, (row, combo));
            }
            None => {
                if odd_relation.is_none() && combo.weight() % 2 == 1 {
                    odd_relation = Some(combo.ones().collect::<Vec<_>>());
                }
            }
        }
    }
    AffineSolution {
        rank: pivots.len(),
        origin_in_affine_span: odd_relation.is_some(),
        witness: odd_relation,
    }
}

/// Some `x` with `row · x = 1` for every row, or `None` if the system is
/// inconsistent (which happens exactly when an odd number of rows sum to 0).
pub fn f2_solve_all_ones(rows: &[F2Vector]) -> Option<F2Vector> {
    let n = rows.first().map_or(0, F2Vector::len);
    let mut aug: Vec<F2Vector> = rows
        .iter()
        .map(|r| {
            let mut a = F2Vector::zero(n + 1);
            r.ones().for_each(|i| a.set(i));
            a.set(n);
            a
        })
        .collect();
    let mut pivot_cols = Vec::new();
    for col in 0..n {
        let rank = pivot_cols.len();
        let Some(pr) = (rank..aug.len()).find(|&r| aug[r].get(col)) else {
            continue;
        };
        aug.swap(rank, pr);
        let prow = aug[rank].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&prow);
            }
        }
        pivot_cols.push(col);
    }
    if aug[pivot_cols.len()..].iter().any(|r| r.get(n)) {
        return None;
    }
    let mut x = F2Vector::zero(n);
    for (r, &col) in pivot_cols.iter().enumerate() {
        if aug[r].get(n) {
            x.set(col);
        }
    }
    Some(x)
}

/// Coordinates of square-class vectors: the sign (−1) then each prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coordinate {
    MinusOne,
    Prime(Integer),
}

/// Materialize classes as F₂ vectors over the union of their supports plus
/// a sign coordinate. Fails if any class has an unfactored cofactor.
pub fn classes_to_vectors(classes: &[SquareClass]) -> Result<(Vec<F2Vector>, Vec<Coordinate>)> {
    if let Some(index) = classes.iter().position(|c| !c.cofactor_known) {
        return Err(Error::UncertainClass { index });
    }
    let mut primes: Vec<Integer> = classes.iter().flat_map(|c| c.support.clone()).collect();
    primes.sort();
    primes.dedup();
    let n = primes.len() + 1;
    let vectors = classes
        .iter()
        .map(|c| {
            let mut v = F2Vector::zero(n);
            if c.sign < 0 {
                v.set(0);
            }
            for p in &c.support {
                let i = primes.binary_search(p).expect("prime in union");
                v.set(i + 1);
            }
            v
        })
        .collect();
    let mut coords = vec![Coordinate::MinusOne];
    coords.extend(primes.into_iter().map(Coordinate::Prime));
    Ok((vectors, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_square_integer, square_class, FactorBudget};

    fn solve(values: &[i64]) -> AffineSolution {
        let b = FactorBudget::default();
        let classes: Vec<_> = values
            .iter()
            .map(|&v| square_class(&v.into(), &b).unwrap())
            .collect();
        let (vecs, _) = classes_to_vectors(&classes).unwrap();
        f2_solve_affine(&vecs)
    }

    #[test]
    fn examples() {
        let s = solve(&[2, -1, -2]);
        assert_eq!(s.rank, 2);
        assert!(s.origin_in_affine_span);
        assert_eq!(s.witness, Some(vec![0, 1, 2]));

        let s = solve(&[2]);
        assert_eq!((s.rank, s.origin_in_affine_span), (1, false));

        let s = solve(&[2, 3, 6]);
        assert_eq!((s.rank, s.origin_in_affine_span), (2, true));
    }

    #[test]
    fn all_ones_system() {
        let b = FactorBudget::default();
        let vecs = |vals: &[i64]| {
            let cs: Vec<_> = vals.iter().map(|&v| square_class(&v.into(), &b).unwrap()).collect();
            classes_to_vectors(&cs).unwrap().0
        };
        let rows = vecs(&[5, -2, -3, -6]);
        let x = f2_solve_all_ones(&rows).unwrap();
        for r in &rows {
            let dot = r.ones().filter(|&i| x.get(i)).count();
            assert_eq!(dot % 2, 1);
        }
        assert!(f2_solve_all_ones(&vecs(&[2, -1, -2])).is_none());
    }

    #[test]
    fn even_relations_do_not_count() {
        // 2·2 is a square but the subset has even size.
        let s = solve(&[2, 2]);
        assert_eq!((s.rank, s.origin_in_affine_span), (1, false));
        // 2·2·2 = 8 is not a square either: the affine span is {2}.
        let s = solve(&[2, 2, 2]);
        assert!(!s.origin_in_affine_span);
        let s = solve(&[2, 2, 8, 3, 6]);
        assert!(s.origin_in_affine_span);
        let w = s.witness.unwrap();
        assert_eq!(w.len() % 2, 1);
    }

    #[test]
    fn identity_class_is_its_own_witness() {
        let s = solve(&[3, 4]);
        assert_eq!(s.witness, Some(vec![1]));
        assert!(is_square_integer(&4.into()));
    }

    #[test]
    fn uncertain_class_rejected() {
        let c = SquareClass {
            sign: 1,
            support: vec![],
            cofactor_known: false,
            cofactor: 15.into(),
        };
        assert_eq!(
            classes_to_vectors(&[c]).unwrap_err(),
            Error::UncertainClass { index: 0 }
        );
    }
}
