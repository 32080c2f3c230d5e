//! Exhaustive checks of the frameproof property and of P(t).
//!
//! Two independent frameproof oracles are provided. [`is_frameproof_naive`]
//! walks every coalition of at most `c` codewords and tests every other
//! codeword for membership in its descendant set. [`is_frameproof_cover`]
//! instead fixes the candidate `x` and asks whether at most `c` agreement
//! sets `{i : y_i = x_i}` cover every position.
//!
//! Both report the first witness in a fixed order. With `jobs > 1` work is
//! split by the leading index and the earliest witness is still the one
//! returned, so reports do not depend on the number of workers. The naive
//! budget is enforced approximately when running in parallel.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Code, PtViolation, Symbol, Witness, Word};

/// Default cap on `(coalition, candidate)` checks for the naive verifier.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub budget: u64,
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DEFAULT_BUDGET,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdict: bool,
    pub witness: Option<Witness>,
    pub subsets_examined: u64,
    pub elapsed: Duration,
}

impl VerifyReport {
    fn new(witness: Option<Witness>, subsets_examined: u64, started: Instant) -> Self {
        VerifyReport {
            verdict: witness.is_none(),
            witness,
            subsets_examined,
            elapsed: started.elapsed(),
        }
    }
}

/// Runs `f(0), f(1), ..` and returns the first `Some` in index order,
/// on a dedicated pool when `jobs > 1`.
fn first_in_order<T, F>(n: usize, jobs: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    if jobs <= 1 {
        return (0..n).find_map(f);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().find_map_first(&f)),
        Err(_) => (0..n).find_map(f),
    }
}

/// Brute force over all coalitions `P` with `|P| <= c`.
pub fn is_frameproof_naive(code: &Code, c: usize, opts: VerifyOptions) -> Result<VerifyReport> {
    if c < 2 {
        return Err(Error::CoalitionTooSmall(c));
    }
    let started = Instant::now();
    let words = code.words();
    let n = words.len();
    let counter = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);

    for k in 1..=c.min(n) {
        let found = first_in_order(n, opts.jobs, |first| {
            if exhausted.load(Ordering::Relaxed) {
                return Some(Err(()));
            }
            match naive_from(words, k, first, &counter, &exhausted, opts.budget) {
                Ok(None) => None,
                Ok(Some(w)) => Some(Ok(w)),
                Err(()) => Some(Err(())),
            }
        });
        match found {
            Some(Ok(witness)) => {
                return Ok(VerifyReport::new(
                    Some(witness),
                    counter.load(Ordering::Relaxed),
                    started,
                ))
            }
            Some(Err(())) => {
                return Err(Error::BudgetExceeded {
                    budget: opts.budget,
                    examined: counter.load(Ordering::Relaxed).min(opts.budget),
                })
            }
            None => {}
        }
    }
    Ok(VerifyReport::new(None, counter.load(Ordering::Relaxed), started))
}

/// Coalitions of size `k` whose smallest index is `first`, in lex order.
fn naive_from(
    words: &[Word],
    k: usize,
    first: usize,
    counter: &AtomicU64,
    exhausted: &AtomicBool,
    budget: u64,
) -> std::result::Result<Option<Witness>, ()> {
    let n = words.len();
    if first + k > n {
        return Ok(None);
    }
    let per_subset = (n - k) as u64;
    let mut idx: Vec<usize> = (first..first + k).collect();
    loop {
        let before = counter.fetch_add(per_subset, Ordering::Relaxed);
        if before + per_subset > budget {
            exhausted.store(true, Ordering::Relaxed);
            return Err(());
        }
        let coalition: Vec<&Word> = idx.iter().map(|&i| &words[i]).collect();
        for (j, x) in words.iter().enumerate() {
            if idx.contains(&j) {
                continue;
            }
            let framed = x
                .iter()
                .enumerate()
                .all(|(pos, &s)| coalition.iter().any(|y| y[pos] == s));
            if framed {
                return Ok(Some(Witness::Framed {
                    coalition: coalition.into_iter().cloned().collect(),
                    framed: x.clone(),
                }));
            }
        }

        // advance positions 1..k, keeping idx[0] == first
        let mut i = k;
        loop {
            if i <= 1 {
                return Ok(None);
            }
            i -= 1;
            if idx[i] < n - (k - i) {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Fixed-width bitsets over positions, stored contiguously.
struct MaskArena {
    width: usize,
    bits: Vec<u64>,
}

impl MaskArena {
    fn new(length: usize) -> Self {
        MaskArena {
            width: length.div_ceil(64),
            bits: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.bits.len() / self.width
    }

    fn get(&self, i: usize) -> &[u64] {
        &self.bits[i * self.width..(i + 1) * self.width]
    }
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x & !y == 0)
}

fn agreement_mask(x: &[Symbol], y: &[Symbol], width: usize) -> Vec<u64> {
    let mut m = vec![0u64; width];
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        if a == b {
            m[i / 64] |= 1 << (i % 64);
        }
    }
    m
}

/// Covering search: `x` is framed iff at most `c` agreement sets cover
/// every position.
pub fn is_frameproof_cover(code: &Code, c: usize, opts: VerifyOptions) -> Result<VerifyReport> {
    if c < 2 {
        return Err(Error::CoalitionTooSmall(c));
    }
    let started = Instant::now();
    let words = code.words();
    let counter = AtomicU64::new(0);
    let witness = first_in_order(words.len(), opts.jobs, |xi| {
        let (w, examined) = cover_for(words, xi, c, code.length());
        counter.fetch_add(examined, Ordering::Relaxed);
        w
    });
    Ok(VerifyReport::new(witness, counter.load(Ordering::Relaxed), started))
}

fn cover_for(words: &[Word], xi: usize, c: usize, length: usize) -> (Option<Witness>, u64) {
    let x = &words[xi];
    let mut arena = MaskArena::new(length);
    let mut reps: Vec<usize> = Vec::new();
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    for (yi, y) in words.iter().enumerate() {
        if yi == xi {
            continue;
        }
        let m = agreement_mask(x, y, arena.width);
        if m.iter().all(|&b| b == 0) || seen.contains_key(&m) {
            continue;
        }
        arena.bits.extend_from_slice(&m);
        seen.insert(m, ());
        reps.push(yi);
    }

    // Only maximal agreement sets matter: any cover can be lifted to one.
    let count = arena.len();
    let maximal: Vec<usize> = (0..count)
        .filter(|&i| {
            !(0..count).any(|j| j != i && is_subset(arena.get(i), arena.get(j)) && arena.get(i) != arena.get(j))
        })
        .collect();

    let mut full = vec![u64::MAX; arena.width];
    if !length.is_multiple_of(64) {
        full[arena.width - 1] = (1u64 << (length % 64)) - 1;
    }

    let mut examined = 0u64;
    let mut chosen = Vec::with_capacity(c);
    let mut union = vec![0u64; arena.width];
    if cover_dfs(&arena, &maximal, 0, c, &full, &mut union, &mut chosen, &mut examined) {
        let coalition = chosen.iter().map(|&i| words[reps[maximal[i]]].clone()).collect();
        return (
            Some(Witness::Framed {
                coalition,
                framed: x.clone(),
            }),
            examined,
        );
    }
    (None, examined)
}

#[allow(clippy::too_many_arguments)]
fn cover_dfs(
    arena: &MaskArena,
    candidates: &[usize],
    start: usize,
    depth_left: usize,
    full: &[u64],
    union: &mut Vec<u64>,
    chosen: &mut Vec<usize>,
    examined: &mut u64,
) -> bool {
    if depth_left == 0 {
        return false;
    }
    for i in start..candidates.len() {
        *examined += 1;
        let saved = union.clone();
        for (u, &b) in union.iter_mut().zip(arena.get(candidates[i])) {
            *u |= b;
        }
        chosen.push(i);
        if union.as_slice() == full
            || cover_dfs(arena, candidates, i + 1, depth_left - 1, full, union, chosen, examined)
        {
            return true;
        }
        chosen.pop();
        *union = saved;
    }
    false
}

/// Checks P(t): every word has at most `t-1` infinities, and no two distinct
/// words agree on `t` or more positions where both differ from infinity.
pub fn satisfies_property_pt(code: &Code, t: usize) -> Result<VerifyReport> {
    let inf = code.inf().ok_or(Error::MissingInfinity)?;
    if t == 0 {
        return Err(Error::InvalidStrength);
    }
    let started = Instant::now();
    let words = code.words();

    for w in words {
        let count = code.infinity_count(w);
        if count > t - 1 {
            let witness = Witness::PtViolation(PtViolation::Infinities { word: w.clone(), count });
            return Ok(VerifyReport::new(Some(witness), 0, started));
        }
    }

    // Two words agreeing on t non-infinity positions share the key
    // (positions, values) for that t-subset.
    let mut seen: HashMap<(Vec<usize>, Vec<Symbol>), usize> = HashMap::new();
    let mut examined = 0u64;
    for (wi, w) in words.iter().enumerate() {
        let finite: Vec<usize> = (0..w.len()).filter(|&i| w[i] != inf).collect();
        let mut found = None;
        for_each_subset(&finite, t, &mut |positions| {
            examined += 1;
            let values = positions.iter().map(|&i| w[i]).collect();
            match seen.entry((positions.to_vec(), values)) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    found = Some(*e.get());
                    false
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(wi);
                    true
                }
            }
        });
        if let Some(other) = found {
            let first = words[other].clone();
            let positions = (0..w.len()).filter(|&i| w[i] != inf && w[i] == first[i]).collect();
            let witness = Witness::PtViolation(PtViolation::Agreement {
                first,
                second: w.clone(),
                positions,
            });
            return Ok(VerifyReport::new(Some(witness), examined, started));
        }
    }
    Ok(VerifyReport::new(None, examined, started))
}

/// Calls `f` on each `k`-subset of `items` in lex order until it returns
/// false.
fn for_each_subset(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    let n = items.len();
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0usize; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = items[i];
        }
        if !f(&buf) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - (k - i) {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
