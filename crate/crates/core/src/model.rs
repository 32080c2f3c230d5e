//! Codes over dense integer alphabets and descendant semantics.
//!
//! A [`Code`] is a set of equal-length words over `0..q`. Words are kept in
//! lexicographic order, so iteration and serialization are reproducible. When
//! a code carries an infinity symbol it is (by convention in this crate) the
//! id `0`, but any id in range is accepted.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub type Symbol = u32;
pub type Word = Vec<Symbol>;

/// Default cap on the number of words [`enumerate_descendants`] may produce.
pub const DEFAULT_DESCENDANT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Code {
    length: usize,
    alphabet: u32,
    inf: Option<Symbol>,
    words: Vec<Word>,
}

impl Code {
    /// Validates and builds a code. Duplicate words are rejected rather than
    /// merged.
    pub fn new(
        length: usize,
        alphabet: u32,
        words: impl IntoIterator<Item = Word>,
        inf: Option<Symbol>,
    ) -> Result<Self> {
        if length == 0 {
            return Err(Error::ZeroLength);
        }
        if alphabet < 2 {
            return Err(Error::AlphabetTooSmall(alphabet));
        }
        if let Some(inf) = inf {
            if inf >= alphabet {
                return Err(Error::InfinityOutOfRange { inf, alphabet });
            }
        }
        let mut set = BTreeSet::new();
        for (index, word) in words.into_iter().enumerate() {
            if word.len() != length {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: length,
                    found: word.len(),
                });
            }
            if let Some(&symbol) = word.iter().find(|&&s| s >= alphabet) {
                return Err(Error::SymbolOutOfRange {
                    index,
                    symbol,
                    alphabet,
                });
            }
            if set.contains(&word) {
                return Err(Error::DuplicateWord(word));
            }
            set.insert(word);
        }
        Ok(Code {
            length,
            alphabet,
            inf,
            words: set.into_iter().collect(),
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn inf(&self) -> Option<Symbol> {
        self.inf
    }

    /// Words in lexicographic order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &[Symbol]) -> bool {
        self.index_of(word).is_some()
    }

    pub fn index_of(&self, word: &[Symbol]) -> Option<usize> {
        self.words.binary_search_by(|w| w.as_slice().cmp(word)).ok()
    }

    pub fn into_words(self) -> Vec<Word> {
        self.words
    }

    /// The word consisting only of the infinity symbol, if the code has one.
    pub fn infinity_word(&self) -> Option<Word> {
        self.inf.map(|inf| vec![inf; self.length])
    }

    pub fn infinity_count(&self, word: &[Symbol]) -> usize {
        match self.inf {
            Some(inf) => word.iter().filter(|&&s| s == inf).count(),
            None => 0,
        }
    }

    /// Returns a copy with `word` added.
    pub fn with_word(&self, word: Word) -> Result<Code> {
        Code::new(
            self.length,
            self.alphabet,
            self.words.iter().cloned().chain(std::iter::once(word)),
            self.inf,
        )
    }

    /// Returns a copy with `word` removed (no-op if absent).
    pub fn without_word(&self, word: &[Symbol]) -> Code {
        let mut out = self.clone();
        if let Some(i) = out.index_of(word) {
            out.words.remove(i);
        }
        out
    }

    /// Writes a word using the file syntax: `*` for the infinity symbol.
    pub fn display_word<'a>(&self, word: &'a [Symbol]) -> DisplayWord<'a> {
        DisplayWord { word, inf: self.inf }
    }
}

pub struct DisplayWord<'a> {
    pub(crate) word: &'a [Symbol],
    pub(crate) inf: Option<Symbol>,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &s) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if Some(s) == self.inf {
                f.write_str("*")?;
            } else {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

fn check_coalition<W: AsRef<[Symbol]>>(coalition: &[W], length: usize) -> Result<()> {
    if coalition.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    for (index, w) in coalition.iter().enumerate() {
        let found = w.as_ref().len();
        if found != length {
            return Err(Error::DimensionMismatch {
                index,
                expected: length,
                found,
            });
        }
    }
    Ok(())
}

/// True iff every position of `x` matches the same position of some member
/// of `coalition`. Never enumerates the descendant set.
pub fn descendant_contains<W: AsRef<[Symbol]>>(coalition: &[W], x: &[Symbol]) -> Result<bool> {
    check_coalition(coalition, x.len())?;
    Ok(x.iter()
        .enumerate()
        .all(|(i, &s)| coalition.iter().any(|y| y.as_ref()[i] == s)))
}

/// All descendants of `coalition`, in lexicographic order.
pub fn enumerate_descendants<W: AsRef<[Symbol]>>(coalition: &[W], cap: u128) -> Result<Vec<Word>> {
    let length = coalition.first().ok_or(Error::EmptyCoalition)?.as_ref().len();
    check_coalition(coalition, length)?;
    let columns: Vec<Vec<Symbol>> = (0..length)
        .map(|i| {
            coalition
                .iter()
                .map(|y| y.as_ref()[i])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    let size = columns
        .iter()
        .try_fold(1u128, |acc, col| acc.checked_mul(col.len() as u128))
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::DescendantCapExceeded { size, cap });
    }

    let mut out = Vec::with_capacity(size as usize);
    let mut odometer = vec![0usize; length];
    loop {
        out.push(odometer.iter().zip(&columns).map(|(&k, col)| col[k]).collect());
        let mut pos = length;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < columns[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// Relabels the symbols at one coordinate of every word through `sigma`.
/// Frameproofness is invariant under this map.
pub fn apply_coordinate_permutation(code: &Code, position: usize, sigma: &[Symbol]) -> Result<Code> {
    if position >= code.length {
        return Err(Error::PositionOutOfRange {
            position,
            length: code.length,
        });
    }
    let q = code.alphabet;
    if sigma.len() != q as usize {
        return Err(Error::NotAPermutation(q));
    }
    let mut seen = vec![false; q as usize];
    for &s in sigma {
        if s >= q || std::mem::replace(&mut seen[s as usize], true) {
            return Err(Error::NotAPermutation(q));
        }
    }
    let words = code.words.iter().map(|w| {
        let mut w = w.clone();
        w[position] = sigma[w[position] as usize];
        w
    });
    Code::new(code.length, q, words, code.inf)
}

/// One symbol of the product alphabet `(T x F_m) u {(inf, inf)}`, where `T`
/// holds the non-infinity symbols `1..s` of an `s`-ary parent alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairSymbol {
    Infinity,
    Finite { outer: Symbol, inner: Symbol },
}

/// The flattening `(inf, inf) -> 0`, `(b, y) -> (b-1)m + y + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairAlphabet {
    s: u32,
    m: u32,
}

impl PairAlphabet {
    pub fn new(s: u32, m: u32) -> Result<Self> {
        if s < 2 {
            return Err(Error::BelowTwo(s.into()));
        }
        if m < 2 {
            return Err(Error::BelowTwo(m.into()));
        }
        (s - 1)
            .checked_mul(m)
            .and_then(|v| v.checked_add(1))
            .ok_or(Error::Overflow("flattened alphabet size"))?;
        Ok(PairAlphabet { s, m })
    }

    /// Size of the flattened alphabet, `(s-1)m + 1`.
    pub fn size(&self) -> u32 {
        (self.s - 1) * self.m + 1
    }

    pub fn flatten(&self, pair: PairSymbol) -> Symbol {
        match pair {
            PairSymbol::Infinity => 0,
            PairSymbol::Finite { outer, inner } => {
                debug_assert!((1..self.s).contains(&outer) && inner < self.m);
                (outer - 1) * self.m + inner + 1
            }
        }
    }

    pub fn unflatten(&self, symbol: Symbol) -> Option<PairSymbol> {
        match symbol {
            0 => Some(PairSymbol::Infinity),
            s if s < self.size() => Some(PairSymbol::Finite {
                outer: (s - 1) / self.m + 1,
                inner: (s - 1) % self.m,
            }),
            _ => None,
        }
    }
}

/// A way in which a property of P(t) fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PtViolation {
    /// A word holds `count` infinities, more than `t-1`.
    Infinities { word: Word, count: usize },
    /// Two distinct words agree, off infinity, on at least `t` positions.
    Agreement {
        first: Word,
        second: Word,
        positions: Vec<usize>,
    },
}

/// Counterexample certificate returned by the verifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `framed` lies in `desc(coalition)` but not in `coalition`.
    Framed {
        coalition: Vec<Word>,
        framed: Word,
    },
    PtViolation(PtViolation),
    /// In rows `rows`, the tuple `tuple` appears `count` times instead of
    /// `expected` (`None` when the run count is not a multiple of `s^t`).
    OaViolation {
        rows: Vec<usize>,
        tuple: Vec<Symbol>,
        count: usize,
        expected: Option<usize>,
    },
}

impl Witness {
    /// Re-checks a framing witness from scratch. Other kinds return `None`.
    pub fn revalidate_frame(&self) -> Option<bool> {
        match self {
            Witness::Framed { coalition, framed } => {
                Some(!coalition.contains(framed) && descendant_contains(coalition, framed).unwrap_or(false))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1_words() -> Vec<Word> {
        // infinity -> 0, i -> i + 1
        let mut out = Vec::new();
        for i in 1..=2u32 {
            let j = 3 - i;
            out.push(vec![0, i, i, i]);
            out.push(vec![i, 0, i, j]);
            out.push(vec![i, j, 0, i]);
            out.push(vec![i, i, j, 0]);
        }
        out
    }

    #[test]
    fn make_code_example_one() {
        let code = Code::new(4, 3, ex1_words(), Some(0)).unwrap();
        assert_eq!(code.len(), 8);
        assert!(code.words().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn make_code_errors() {
        assert_eq!(
            Code::new(2, 2, vec![vec![0, 0], vec![0, 0]], None),
            Err(Error::DuplicateWord(vec![0, 0]))
        );
        assert!(matches!(
            Code::new(3, 2, vec![vec![0, 1, 2]], None),
            Err(Error::SymbolOutOfRange { symbol: 2, .. })
        ));
        assert!(matches!(
            Code::new(3, 2, vec![vec![0, 1]], None),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Code::new(3, 2, vec![vec![0, 1, 1]], Some(2)),
            Err(Error::InfinityOutOfRange { .. })
        ));
    }

    #[test]
    fn descendant_membership() {
        let p = [vec![0, 1], vec![1, 0]];
        assert!(descendant_contains(&p[..1], &[0, 1]).unwrap());
        assert!(descendant_contains(&p, &[0, 0]).unwrap());
        assert!(!descendant_contains(&p, &[2, 0]).unwrap());
        let empty: [Word; 0] = [];
        assert_eq!(descendant_contains(&empty, &[0]), Err(Error::EmptyCoalition));
        assert!(descendant_contains(&p, &[0]).is_err());
    }

    #[test]
    fn descendant_enumeration() {
        let p = [vec![0, 0, 0, 0], vec![1, 1, 1, 1]];
        assert_eq!(enumerate_descendants(&p, DEFAULT_DESCENDANT_CAP).unwrap().len(), 16);
        let single = [vec![2, 0, 1]];
        assert_eq!(
            enumerate_descendants(&single, DEFAULT_DESCENDANT_CAP).unwrap(),
            vec![vec![2, 0, 1]]
        );
        // X_1 of the first example: (inf, i, i, i) for i in Z_2.
        let x1 = [vec![0, 1, 1, 1], vec![0, 2, 2, 2]];
        let desc = enumerate_descendants(&x1, DEFAULT_DESCENDANT_CAP).unwrap();
        let mut oracle = Vec::new();
        for a in [1, 2] {
            for b in [1, 2] {
                for c in [1, 2] {
                    oracle.push(vec![0, a, b, c]);
                }
            }
        }
        assert_eq!(desc, oracle);
        assert!(matches!(
            enumerate_descendants(&p, 15),
            Err(Error::DescendantCapExceeded { size: 16, cap: 15 })
        ));
    }

    #[test]
    fn coordinate_permutation() {
        let code = Code::new(4, 3, ex1_words(), Some(0)).unwrap();
        assert_eq!(apply_coordinate_permutation(&code, 2, &[0, 1, 2]).unwrap(), code);
        let once = apply_coordinate_permutation(&code, 1, &[1, 0, 2]).unwrap();
        assert_ne!(once, code);
        assert_eq!(once.len(), code.len());
        assert_eq!(apply_coordinate_permutation(&once, 1, &[1, 0, 2]).unwrap(), code);
        assert_eq!(
            apply_coordinate_permutation(&code, 0, &[0, 0, 1]),
            Err(Error::NotAPermutation(3))
        );
        assert!(apply_coordinate_permutation(&code, 4, &[0, 1, 2]).is_err());
    }

    #[test]
    fn pair_alphabet_flattening() {
        let a = PairAlphabet::new(3, 3).unwrap();
        assert_eq!(a.size(), 7);
        assert_eq!(a.flatten(PairSymbol::Infinity), 0);
        assert_eq!(a.flatten(PairSymbol::Finite { outer: 1, inner: 0 }), 1);
        assert_eq!(a.flatten(PairSymbol::Finite { outer: 2, inner: 2 }), 6);
        let image: BTreeSet<_> = (0..7).map(|s| a.flatten(a.unflatten(s).unwrap())).collect();
        assert_eq!(image.len(), 7);
        assert_eq!(a.unflatten(7), None);

        assert_eq!(PairAlphabet::new(2, 2).unwrap().size(), 3);
        assert_eq!(PairAlphabet::new(4, 4).unwrap().size(), 13);
    }

    #[test]
    fn display_word_marks_infinity() {
        let code = Code::new(3, 3, vec![vec![0, 1, 2]], Some(0)).unwrap();
        assert_eq!(code.display_word(&code.words()[0]).to_string(), "* 1 2");
        let plain = Code::new(3, 3, vec![vec![0, 1, 2]], None).unwrap();
        assert_eq!(plain.display_word(&plain.words()[0]).to_string(), "0 1 2");
    }
}
