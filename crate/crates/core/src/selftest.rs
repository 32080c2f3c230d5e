//! Built-in consistency checks: base-code fixtures, the array generator,
//! and agreement of the two frameproof verifiers on random codes.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::{base_code, BaseCodeId};
use crate::model::{Code, Word};
use crate::oa::{build_oa_strength2, verify_oa};
use crate::verify::{is_frameproof_cover, is_frameproof_naive, satisfies_property_pt, VerifyOptions};

/// Array orders exercised by the selftest.
pub const OA_ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];

#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub seed: u64,
    pub trials: usize,
    pub jobs: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 0,
            trials: 200,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!(
            "selftest: {ok}/{} checks passed{}",
            self.checks.len(),
            if self.passed() { "" } else { " (FAILED)" }
        )
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{status} {:<28} {}", c.name, c.detail)?;
        }
        writeln!(f, "{}", self.summary())
    }
}

/// Checks `code` against the published parameters of `id`: size, alphabet,
/// length, P(2) and frameproofness at the family's `c`.
pub fn check_base_fixture(id: BaseCodeId, code: &Code, opts: VerifyOptions) -> CheckResult {
    let name = format!("fixture {id}");
    let (q, l, m) = id.parameters();
    let c = id.coalition();
    let fail = |detail: String| CheckResult {
        name: name.clone(),
        passed: false,
        detail,
    };
    if (code.alphabet(), code.length(), code.len()) != (q, l, m) {
        return fail(format!(
            "expected q={q} l={l} M={m}, found q={} l={} M={}",
            code.alphabet(),
            code.length(),
            code.len()
        ));
    }
    match satisfies_property_pt(code, 2) {
        Ok(r) if r.verdict => {}
        Ok(r) => return fail(format!("P(2) fails: {:?}", r.witness)),
        Err(e) => return fail(e.to_string()),
    }
    // Cover search is exact; the naive walk is added where it is quick.
    let verifier = if code.len() <= 40 {
        is_frameproof_naive
    } else {
        is_frameproof_cover
    };
    match verifier(code, c, opts) {
        Ok(r) if r.verdict => CheckResult {
            name,
            passed: true,
            detail: format!("q={q} l={l} M={m} {c}-frameproof, P(2)"),
        },
        Ok(r) => fail(format!("not {c}-frameproof: {:?}", r.witness)),
        Err(e) => fail(e.to_string()),
    }
}

/// A random code with `q <= 5`, `l <= 5`, `M <= 12` and a coalition size
/// `c <= 3`. Roughly a third of the instances get a planted descendant of
/// a small coalition, so framed codes are well represented.
pub fn random_instance<R: Rng>(rng: &mut R) -> (Code, usize) {
    let q = rng.random_range(2..=5u32);
    let l = rng.random_range(2..=5usize);
    let c = rng.random_range(2..=3usize);
    let max_words = (q as usize).pow(l as u32).min(12);
    let target = rng.random_range(1..=max_words);
    let mut words: BTreeSet<Word> = BTreeSet::new();
    while words.len() < target {
        words.insert((0..l).map(|_| rng.random_range(0..q)).collect());
    }
    if words.len() >= 2 && words.len() < 12 && rng.random_bool(1.0 / 3.0) {
        let pool: Vec<Word> = words.iter().cloned().collect();
        let size = rng.random_range(2..=c.min(pool.len()));
        let parents: Vec<&Word> = pool.choose_multiple(rng, size).collect();
        let planted: Word = (0..l).map(|i| parents.choose(rng).expect("nonempty")[i]).collect();
        words.insert(planted);
    }
    let code = Code::new(l, q, words, None).expect("valid by construction");
    (code, c)
}

pub fn run(config: &SelftestConfig) -> SelftestReport {
    let opts = VerifyOptions {
        jobs: config.jobs,
        ..VerifyOptions::default()
    };
    let mut report = SelftestReport::default();
    for id in BaseCodeId::ALL {
        report.checks.push(check_base_fixture(id, &base_code(id), opts));
    }

    for s in OA_ORDERS {
        let name = format!("OA(2,{},{s})", s + 1);
        let check = match build_oa_strength2(s) {
            Ok(oa) => {
                let r = verify_oa(&oa);
                CheckResult {
                    name,
                    passed: r.verdict,
                    detail: format!("{} row pairs checked", r.subsets_examined),
                }
            }
            Err(e) => CheckResult {
                name,
                passed: false,
                detail: e.to_string(),
            },
        };
        report.checks.push(check);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut framed = 0;
    let mut mismatch = None;
    for trial in 0..config.trials {
        let (code, c) = random_instance(&mut rng);
        let naive = is_frameproof_naive(&code, c, opts);
        let cover = is_frameproof_cover(&code, c, opts);
        match (naive, cover) {
            (Ok(a), Ok(b)) if a.verdict == b.verdict => {
                let witnesses_hold = [a.witness, b.witness]
                    .iter()
                    .flatten()
                    .all(|w| w.revalidate_frame() == Some(true));
                if !witnesses_hold {
                    mismatch = Some(format!("trial {trial}: witness does not revalidate"));
                    break;
                }
                framed += usize::from(!a.verdict);
            }
            (a, b) => {
                mismatch = Some(format!("trial {trial}: naive {a:?} vs cover {b:?}"));
                break;
            }
        }
    }
    report.checks.push(CheckResult {
        name: "verifier cross-check".into(),
        passed: mismatch.is_none(),
        detail: mismatch.unwrap_or_else(|| {
            format!(
                "{} random codes agree ({framed} framed), seed {}",
                config.trials, config.seed
            )
        }),
    });
    report
}
