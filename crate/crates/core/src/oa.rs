//! Orthogonal arrays and their frameproof codes.
//!
//! An `OA(N, k, s, t)` is stored row-major as `k` rows of `N` symbols; the
//! codewords derived from it are its columns.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::model::{Code, Symbol, Witness, Word};
use crate::verify::VerifyReport;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthogonalArray {
    levels: u32,
    strength: usize,
    rows: Vec<Vec<Symbol>>,
}

impl OrthogonalArray {
    /// Checks shape and symbol range only; the balance property is left to
    /// [`verify_oa`] so that broken arrays can still be loaded and reported.
    pub fn new(rows: Vec<Vec<Symbol>>, levels: u32, strength: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::AlphabetTooSmall(levels));
        }
        let k = rows.len();
        if strength == 0 || strength > k {
            return Err(Error::StrengthOutOfRange { t: strength, k });
        }
        let runs = rows[0].len();
        if runs == 0 {
            return Err(Error::UnsupportedArray("array has no columns".into()));
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != runs {
                return Err(Error::RaggedArray {
                    row,
                    expected: runs,
                    found: r.len(),
                });
            }
            if let Some(&symbol) = r.iter().find(|&&s| s >= levels) {
                return Err(Error::SymbolOutOfRange {
                    index: row,
                    symbol,
                    alphabet: levels,
                });
            }
        }
        Ok(OrthogonalArray { levels, strength, rows })
    }

    /// Number of rows `k`.
    pub fn constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    /// Number of columns `N`.
    pub fn runs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Symbol>] {
        &self.rows
    }

    /// `s^t`, or `None` on overflow.
    fn cells(&self) -> Option<u128> {
        (self.levels as u128).checked_pow(self.strength as u32)
    }

    /// `N / s^t` when that divides exactly.
    pub fn index(&self) -> Option<usize> {
        let cells = self.cells()?;
        let runs = self.runs() as u128;
        runs.is_multiple_of(cells).then(|| (runs / cells) as usize)
    }

    pub fn column(&self, col: usize) -> Word {
        self.rows.iter().map(|r| r[col]).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.runs()).map(|c| self.column(c))
    }
}

/// `OA(2, s+1, s)` over `GF(s)`: the column for `(a, b)` holds `a*alpha + b`
/// for each field element `alpha`, then `a` in the last row. Columns are in
/// `(a, b)` lex order.
pub fn build_oa_strength2(s: u64) -> Result<OrthogonalArray> {
    let field = Field::new(s)?;
    let pairs: Vec<(u32, u32)> = field
        .elements()
        .flat_map(|a| field.elements().map(move |b| (a, b)))
        .collect();
    let mut rows: Vec<Vec<Symbol>> = field
        .elements()
        .map(|alpha| pairs.iter().map(|&(a, b)| field.add(field.mul(a, alpha), b)).collect())
        .collect();
    rows.push(pairs.iter().map(|&(a, _)| a).collect());
    OrthogonalArray::new(rows, field.order(), 2)
}

const DENSE_CELLS: u128 = 1 << 20;

/// Counts every `t`-tuple in every set of `t` rows.
pub fn verify_oa(array: &OrthogonalArray) -> VerifyReport {
    let started = Instant::now();
    let t = array.strength;
    let k = array.constraints();
    let runs = array.runs();
    let expected = array.index();
    let mut examined = 0u64;
    let mut dense = match array.cells() {
        Some(cells) if cells <= DENSE_CELLS => vec![0usize; cells as usize],
        _ => Vec::new(),
    };

    let mut rows: Vec<usize> = (0..t).collect();
    loop {
        examined += 1;
        let found = if dense.is_empty() {
            let mut counts: HashMap<Vec<Symbol>, usize> = HashMap::new();
            for col in 0..runs {
                let tuple = rows.iter().map(|&r| array.rows[r][col]).collect();
                *counts.entry(tuple).or_default() += 1;
            }
            imbalance(array, &rows, &counts, expected)
        } else {
            dense_imbalance(array, &rows, &mut dense, expected)
        };
        if let Some(witness) = found {
            return VerifyReport {
                verdict: false,
                witness: Some(witness),
                subsets_examined: examined,
                elapsed: started.elapsed(),
            };
        }

        let mut i = t;
        loop {
            if i == 0 {
                return VerifyReport {
                    verdict: true,
                    witness: None,
                    subsets_examined: examined,
                    elapsed: started.elapsed(),
                };
            }
            i -= 1;
            if rows[i] < k - (t - i) {
                break;
            }
        }
        rows[i] += 1;
        for j in i + 1..t {
            rows[j] = rows[j - 1] + 1;
        }
    }
}

/// Same witness choice as [`imbalance`], counting into a table indexed by
/// the tuple read as a base-`s` number.
fn dense_imbalance(
    array: &OrthogonalArray,
    rows: &[usize],
    counts: &mut [usize],
    expected: Option<usize>,
) -> Option<Witness> {
    let s = array.levels as usize;
    counts.fill(0);
    for col in 0..array.runs() {
        let idx = rows.iter().fold(0, |acc, &r| acc * s + array.rows[r][col] as usize);
        counts[idx] += 1;
    }
    let pick = match expected {
        None => counts.iter().position(|&n| n > 0),
        Some(lambda) => counts
            .iter()
            .position(|&n| n != 0 && n != lambda)
            .or_else(|| counts.iter().position(|&n| n == 0)),
    }?;
    let mut tuple = vec![0; rows.len()];
    let mut rest = pick;
    for slot in tuple.iter_mut().rev() {
        *slot = (rest % s) as Symbol;
        rest /= s;
    }
    Some(Witness::OaViolation {
        rows: rows.to_vec(),
        tuple,
        count: counts[pick],
        expected,
    })
}

fn imbalance(
    array: &OrthogonalArray,
    rows: &[usize],
    counts: &HashMap<Vec<Symbol>, usize>,
    expected: Option<usize>,
) -> Option<Witness> {
    let witness = |tuple: Vec<Symbol>, count| Witness::OaViolation {
        rows: rows.to_vec(),
        tuple,
        count,
        expected,
    };
    let Some(lambda) = expected else {
        let (tuple, &count) = counts.iter().min().expect("at least one column");
        return Some(witness(tuple.clone(), count));
    };
    // Overfull tuples first, in lex order; otherwise the smallest missing one.
    let mut over: Vec<_> = counts.iter().filter(|(_, &n)| n != lambda).collect();
    over.sort();
    if let Some((tuple, &count)) = over.first() {
        return Some(witness(tuple.to_vec(), count));
    }
    if counts.len() as u128 == array.cells().unwrap_or(u128::MAX) {
        return None;
    }
    let s = array.levels;
    let mut tuple = vec![0; rows.len()];
    loop {
        if !counts.contains_key(&tuple) {
            return Some(witness(tuple, 0));
        }
        let mut i = tuple.len();
        loop {
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < s {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// Relabels each row by the transposition `(0 v)`, where `v` is the entry of
/// column `col`, so that column becomes all zeros.
pub fn normalize_column_to_infinity(array: &OrthogonalArray, col: usize) -> Result<OrthogonalArray> {
    if col >= array.runs() {
        return Err(Error::ColumnOutOfRange {
            col,
            runs: array.runs(),
        });
    }
    let rows = array
        .rows
        .iter()
        .map(|r| {
            let v = r[col];
            r.iter()
                .map(|&x| match x {
                    0 => v,
                    x if x == v => 0,
                    x => x,
                })
                .collect()
        })
        .collect();
    OrthogonalArray::new(rows, array.levels, array.strength)
}

/// The columns as an `s`-ary code of length `k`; frameproof for every `c`
/// with `k > c(t-1)`.
pub fn oa_to_frameproof(array: &OrthogonalArray, c: usize) -> Result<Code> {
    let bound = c * (array.strength - 1);
    if array.constraints() <= bound {
        return Err(Error::LengthTooShort {
            length: array.constraints(),
            bound,
        });
    }
    Code::new(array.constraints(), array.levels, array.columns(), None)
}

/// Normalizes column 0 to all-infinity (id 0) and drops it, leaving `s^t - 1`
/// words that satisfy P(t).
pub fn oa_to_pt_code(array: &OrthogonalArray, t: usize) -> Result<Code> {
    if t != array.strength {
        return Err(Error::UnsupportedArray(format!(
            "requested P({t}) from an array of strength {}",
            array.strength
        )));
    }
    if array.index() != Some(1) {
        return Err(Error::IndexNotOne {
            runs: array.runs(),
            cells: array.cells().unwrap_or(u128::MAX),
        });
    }
    let normalized = normalize_column_to_infinity(array, 0)?;
    let words = normalized.columns().skip(1);
    Code::new(array.constraints(), array.levels, words, Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::satisfies_property_pt;

    #[test]
    fn smallest_array() {
        let oa = build_oa_strength2(2).unwrap();
        assert_eq!((oa.constraints(), oa.runs(), oa.index()), (3, 4, Some(1)));
        assert_eq!(oa.rows(), &[vec![0, 1, 0, 1], vec![0, 1, 1, 0], vec![0, 0, 1, 1]]);
        assert!(verify_oa(&oa).verdict);
    }

    #[test]
    fn dense_and_hashed_counts_pick_the_same_witness() {
        let base = build_oa_strength2(4).unwrap();
        let mut arrays = vec![OrthogonalArray::new(base.rows()[..3].to_vec(), 4, 2).unwrap()];
        for (row, col, v) in [(0, 0, 3), (2, 5, 0), (4, 15, 1)] {
            let mut rows = base.rows().to_vec();
            rows[row][col] = v;
            arrays.push(OrthogonalArray::new(rows, 4, 2).unwrap());
        }
        arrays.push(OrthogonalArray::new(vec![vec![1, 2, 2], vec![0, 3, 3]], 4, 2).unwrap());
        for array in &arrays {
            let rows = [0, 1];
            let mut counts: HashMap<Vec<Symbol>, usize> = HashMap::new();
            for col in 0..array.runs() {
                *counts.entry(vec![array.rows[0][col], array.rows[1][col]]).or_default() += 1;
            }
            let mut table = vec![0; 16];
            assert_eq!(
                dense_imbalance(array, &rows, &mut table, array.index()),
                imbalance(array, &rows, &counts, array.index())
            );
        }
    }

    #[test]
    fn order_three_has_index_one() {
        let oa = build_oa_strength2(3).unwrap();
        assert_eq!((oa.constraints(), oa.runs(), oa.index()), (4, 9, Some(1)));
        assert!(verify_oa(&oa).verdict);
    }

    #[test]
    fn rejects_non_prime_power() {
        assert_eq!(build_oa_strength2(6), Err(Error::NotPrimePower(6)));
    }

    #[test]
    fn all_zero_array_fails() {
        let oa = OrthogonalArray::new(vec![vec![0; 4]; 3], 2, 2).unwrap();
        let r = verify_oa(&oa);
        assert!(!r.verdict);
        assert_eq!(
            r.witness,
            Some(Witness::OaViolation {
                rows: vec![0, 1],
                tuple: vec![0, 0],
                count: 4,
                expected: Some(1),
            })
        );
    }

    #[test]
    fn duplicated_column_fails() {
        let mut oa = build_oa_strength2(3).unwrap();
        for r in &mut oa.rows {
            r[1] = r[0];
        }
        assert!(!verify_oa(&oa).verdict);
    }

    #[test]
    fn indivisible_run_count_fails() {
        let oa = OrthogonalArray::new(vec![vec![0, 1, 0], vec![1, 0, 0]], 2, 2).unwrap();
        let r = verify_oa(&oa);
        assert!(matches!(r.witness, Some(Witness::OaViolation { expected: None, .. })));
    }

    #[test]
    fn normalization() {
        let oa = build_oa_strength2(3).unwrap();
        assert_eq!(normalize_column_to_infinity(&oa, 0).unwrap(), oa);
        let n = normalize_column_to_infinity(&oa, 5).unwrap();
        assert!(n.column(5).iter().all(|&s| s == 0));
        assert!(verify_oa(&n).verdict);
        assert!(normalize_column_to_infinity(&oa, 9).is_err());
    }

    #[test]
    fn frameproof_length_bound() {
        let oa = build_oa_strength2(4).unwrap();
        assert_eq!(oa_to_frameproof(&oa, 3).unwrap().len(), 16);
        assert_eq!(oa_to_frameproof(&oa, 4).unwrap().alphabet(), 4);
        assert_eq!(
            oa_to_frameproof(&oa, 5),
            Err(Error::LengthTooShort { length: 5, bound: 5 })
        );
    }

    #[test]
    fn pt_codes() {
        for (s, words) in [(2, 3), (3, 8), (4, 15)] {
            let code = oa_to_pt_code(&build_oa_strength2(s).unwrap(), 2).unwrap();
            assert_eq!(code.len(), words);
            assert_eq!(code.length(), s as usize + 1);
            assert!(satisfies_property_pt(&code, 2).unwrap().verdict);
        }
        let doubled = OrthogonalArray::new(vec![vec![0, 1, 0, 1, 0, 1, 0, 1]; 3], 2, 2).unwrap();
        assert!(matches!(oa_to_pt_code(&doubled, 2), Err(Error::IndexNotOne { .. })));
    }
}
