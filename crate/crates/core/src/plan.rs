//! Recursive construction plans for the two length-`c+2` families and the
//! bound calculators used to judge the resulting codes.
//!
//! A plan is a linear chain: one base code, zero or more compositions with
//! prime-power field orders, and a final all-infinity augmentation. Plans
//! are data, so they can be printed and stored before anything is built.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::construct::{augment_infinity, base_code, compose, BaseCodeId, Compose};
use crate::error::{Error, Result};
use crate::field::is_prime_power;
use crate::model::Code;

/// Exact rational; rates are compared without rounding.
pub type Rational = Ratio<u128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
}

impl PrimePower {
    pub fn value(self) -> u64 {
        self.p.pow(self.e)
    }
}

/// Prime factorization grouped by prime, smallest prime first.
pub fn factor_prime_powers(n: u64) -> Result<Vec<PrimePower>> {
    if n < 2 {
        return Err(Error::BelowTwo(n));
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push(PrimePower { p, e });
        }
        p += 1;
    }
    if rest > 1 {
        out.push(PrimePower { p: rest, e: 1 });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStep {
    Base(BaseCodeId),
    Compose { m: u64 },
    AugmentInfinity,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanStep::Base(id) => write!(f, "{id}"),
            PlanStep::Compose { m } => write!(f, "compose:{m}"),
            PlanStep::AugmentInfinity => f.write_str("augment"),
        }
    }
}

impl FromStr for PlanStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "augment" {
            return Ok(PlanStep::AugmentInfinity);
        }
        if let Some(m) = s.strip_prefix("compose:") {
            let m = m
                .parse()
                .map_err(|_| Error::InvalidPlan(format!("bad field order in {s:?}")))?;
            return Ok(PlanStep::Compose { m });
        }
        s.parse().map(PlanStep::Base).map_err(Error::InvalidPlan)
    }
}

/// What a plan promises to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Target {
    pub c: usize,
    pub l: usize,
    pub q: u64,
    pub words: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub target: Target,
    pub steps: Vec<PlanStep>,
}

impl ConstructionPlan {
    /// `(q, M)` after each step, computed from the step parameters alone.
    pub fn trace(&self) -> Result<Vec<(u64, u64)>> {
        let mut out = Vec::with_capacity(self.steps.len());
        let mut state: Option<(u64, u64)> = None;
        for step in &self.steps {
            let next = match (*step, state) {
                (PlanStep::Base(id), None) => {
                    let (q, _, m) = id.parameters();
                    (q as u64, m as u64)
                }
                (PlanStep::Compose { m }, Some((q, words))) => {
                    let q = (q - 1)
                        .checked_mul(m)
                        .and_then(|v| v.checked_add(1))
                        .ok_or(Error::Overflow("plan alphabet"))?;
                    let words = m
                        .checked_mul(m)
                        .and_then(|mm| mm.checked_mul(words))
                        .ok_or(Error::Overflow("plan size"))?;
                    (q, words)
                }
                (PlanStep::AugmentInfinity, Some((q, words))) => (q, words + 1),
                (PlanStep::Base(_), Some(_)) => {
                    return Err(Error::InvalidPlan("base code after the first step".into()))
                }
                (_, None) => return Err(Error::InvalidPlan("plan must start with a base code".into())),
            };
            out.push(next);
            state = Some(next);
        }
        Ok(out)
    }
}

/// Tree-style listing, one step per line with its running `(q, M)`.
impl fmt::Display for ConstructionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Target { c, l, q, words } = self.target;
        writeln!(f, "target c={c} l={l} q={q} M={words}")?;
        let trace = self.trace().map_err(|_| fmt::Error)?;
        for (depth, (step, (q, m))) in self.steps.iter().zip(trace).enumerate() {
            let label = match step {
                PlanStep::Base(id) => format!("base {id}"),
                PlanStep::Compose { m } => format!("compose m={m}"),
                PlanStep::AugmentInfinity => "augment infinity".to_string(),
            };
            let indent = "  ".repeat(depth);
            let branch = if depth == 0 { "" } else { "└─ " };
            writeln!(f, "{indent}{branch}{label:<18} q={q} M={m}")?;
        }
        Ok(())
    }
}

impl ConstructionPlan {
    /// Single-line form, e.g. `c=2 l=4 q=7 M=73: ex1 compose:3 augment`.
    /// Checks the step sequence is well formed and its [`trace`] ends at the
    /// target. Field orders are checked only when the plan runs.
    ///
    /// [`trace`]: ConstructionPlan::trace
    pub fn validate(&self) -> Result<()> {
        let Some(PlanStep::Base(id)) = self.steps.first() else {
            return Err(if self.steps.is_empty() {
                Error::EmptyPlan
            } else {
                Error::InvalidPlan("plan must start with a base code".into())
            });
        };
        if let Some(i) = self.steps.iter().position(|s| *s == PlanStep::AugmentInfinity) {
            if i + 1 != self.steps.len() {
                return Err(Error::InvalidPlan("augmentation must be the last step".into()));
            }
        }
        let (_, l, _) = id.parameters();
        let Target { c, q, words, .. } = self.target;
        let &(found_q, found_words) = self.trace()?.last().expect("non-empty");
        if (id.coalition(), l, found_q, found_words) != (c, self.target.l, q, words) {
            return Err(Error::PlanMismatch {
                expected: format!("c={c} l={} q={q} M={words}", self.target.l),
                found: format!("c={} l={l} q={found_q} M={found_words}", id.coalition()),
            });
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        let Target { c, l, q, words } = self.target;
        let steps: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        format!("c={c} l={l} q={q} M={words}: {}", steps.join(" "))
    }
}

impl FromStr for ConstructionPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidPlan(msg.to_string());
        let (head, tail) = s.trim().split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let mut fields = head.split_whitespace();
        let mut take = |key: &str| -> Result<u64> {
            fields
                .next()
                .and_then(|f| f.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::InvalidPlan(format!("expected {key}<n>")))
        };
        let target = Target {
            c: take("c=")? as usize,
            l: take("l=")? as usize,
            q: take("q=")?,
            words: take("M=")?,
        };
        if fields.next().is_some() {
            return Err(bad("trailing fields in header"));
        }
        let steps = tail.split_whitespace().map(str::parse).collect::<Result<Vec<_>>>()?;
        let plan = ConstructionPlan { target, steps };
        plan.validate()?;
        Ok(plan)
    }
}

/// Largest odd prime-power factor of `m` that is at least `min`.
fn largest_odd_factor(m: u64, min: u64) -> Option<u64> {
    factor_prime_powers(m)
        .ok()?
        .into_iter()
        .filter(|pp| pp.p != 2)
        .map(PrimePower::value)
        .filter(|&v| v >= min)
        .max()
}

fn chain_c2(q: u64) -> Result<Vec<PlanStep>> {
    match q {
        3 => return Ok(vec![PlanStep::Base(BaseCodeId::Ex1)]),
        5 => return Ok(vec![PlanStep::Base(BaseCodeId::Lem4)]),
        _ => {}
    }
    let m = (q - 1) / 2;
    if is_prime_power(m)?.is_some() {
        return Ok(vec![PlanStep::Base(BaseCodeId::Ex1), PlanStep::Compose { m }]);
    }
    let factor = largest_odd_factor(m, 3).ok_or_else(|| Error::Unplannable {
        q,
        reason: format!("{m} has no odd prime-power factor of at least 3"),
    })?;
    let mut steps = chain_c2(2 * m / factor + 1)?;
    steps.push(PlanStep::Compose { m: factor });
    Ok(steps)
}

fn chain_c3(q: u64) -> Result<Vec<PlanStep>> {
    match q {
        4 => return Ok(vec![PlanStep::Base(BaseCodeId::Ex2)]),
        10 => return Ok(vec![PlanStep::Base(BaseCodeId::Lem5)]),
        _ => {}
    }
    let m = (q - 1) / 3;
    if is_prime_power(m)?.is_some() {
        return Ok(vec![PlanStep::Base(BaseCodeId::Ex2), PlanStep::Compose { m }]);
    }
    let factor = largest_odd_factor(m, 5).ok_or_else(|| Error::Unplannable {
        q,
        reason: format!("{m} has no odd prime-power factor of at least 5"),
    })?;
    let mut steps = chain_c3(3 * m / factor + 1)?;
    steps.push(PlanStep::Compose { m: factor });
    Ok(steps)
}

/// Plan for a `q`-ary 2-frameproof code of length 4 with `2(q-1)^2 + 1`
/// words, for odd `q >= 3`.
pub fn plan_c2_length4(q: u64) -> Result<ConstructionPlan> {
    if q < 3 || q.is_multiple_of(2) {
        return Err(Error::Unplannable {
            q,
            reason: "needs odd q >= 3".into(),
        });
    }
    let words = (q - 1)
        .checked_mul(q - 1)
        .and_then(|v| v.checked_mul(2))
        .ok_or(Error::Overflow("target size"))?
        + 1;
    let mut steps = chain_c2(q)?;
    steps.push(PlanStep::AugmentInfinity);
    Ok(ConstructionPlan {
        target: Target { c: 2, l: 4, q, words },
        steps,
    })
}

/// Plan for a `q`-ary 3-frameproof code of length 5 with
/// `(5/3)(q-1)^2 + 1` words, for `q = 4 (mod 6)`.
pub fn plan_c3_length5(q: u64) -> Result<ConstructionPlan> {
    if q % 6 != 4 {
        return Err(Error::Unplannable {
            q,
            reason: "needs q = 4 (mod 6)".into(),
        });
    }
    let words = (q - 1)
        .checked_mul(q - 1)
        .and_then(|v| v.checked_mul(5))
        .ok_or(Error::Overflow("target size"))?
        / 3
        + 1;
    let mut steps = chain_c3(q)?;
    steps.push(PlanStep::AugmentInfinity);
    Ok(ConstructionPlan {
        target: Target { c: 3, l: 5, q, words },
        steps,
    })
}

/// Dispatches on `c` to the two supported families.
pub fn plan(c: usize, q: u64) -> Result<ConstructionPlan> {
    match c {
        2 => plan_c2_length4(q),
        3 => plan_c3_length5(q),
        _ => Err(Error::Unplannable {
            q,
            reason: format!("no plan family for c={c}"),
        }),
    }
}

/// Replays a plan. With `trust`, intermediate codes are not re-verified.
pub fn execute_plan(plan: &ConstructionPlan, trust: bool) -> Result<Code> {
    let mut steps = plan.steps.iter();
    let first = steps.next().ok_or(Error::EmptyPlan)?;
    let PlanStep::Base(id) = first else {
        return Err(Error::InvalidPlan("plan must start with a base code".into()));
    };
    let (c, t) = (plan.target.c, 2);
    let mut code = base_code(*id);
    let mut augmented = false;
    for step in steps {
        if augmented {
            return Err(Error::InvalidPlan("augmentation must be the last step".into()));
        }
        code = match *step {
            PlanStep::Base(_) => return Err(Error::InvalidPlan("base code after the first step".into())),
            PlanStep::Compose { m } => {
                let params = Compose {
                    trust,
                    ..Compose::new(m, t, c)
                };
                compose(&code, &params)?
            }
            PlanStep::AugmentInfinity => {
                augmented = true;
                augment_infinity(&code, c, t, trust)?
            }
        };
    }

    let found = (code.length(), code.alphabet() as u64, code.len() as u64);
    let Target { l, q, words, .. } = plan.target;
    if found != (l, q, words) {
        return Err(Error::PlanMismatch {
            expected: format!("l={l} q={q} M={words}"),
            found: format!("l={} q={} M={}", found.0, found.1, found.2),
        });
    }
    Ok(code)
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

fn q_power(c: usize, l: usize, q: u64) -> Result<u128> {
    (q as u128)
        .checked_pow(ceil_div(l, c) as u32)
        .ok_or(Error::Overflow("q^ceil(l/c)"))
}

/// Upper bound `M <= c(q^ceil(l/c) - 1)` valid for every `c`, `l`, `q`.
pub fn ssw_bound(c: usize, l: usize, q: u64) -> Result<u128> {
    (q_power(c, l, q)? - 1)
        .checked_mul(c as u128)
        .ok_or(Error::Overflow("ssw bound"))
}

/// Leading coefficient `l / (l - (t-1) ceil(l/c))` of the asymptotic
/// bound, with `t` in `1..=c` and `t = l (mod c)`.
pub fn blackburn_leading(c: usize, l: usize) -> Result<Rational> {
    if c < 2 || l < 2 {
        return Err(Error::BelowTwo(c.min(l) as u64));
    }
    let t = (l - 1) % c + 1;
    let den = l as i128 - ((t - 1) * ceil_div(l, c)) as i128;
    if den <= 0 {
        return Err(Error::NonPositiveDenominator { c, l });
    }
    Ok(Rational::new(l as u128, den as u128))
}

/// `M / q^ceil(l/c)`.
pub fn achieved_rate(c: usize, l: usize, q: u64, words: u128) -> Result<Rational> {
    Ok(Rational::new(words, q_power(c, l, q)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub c: usize,
    pub l: usize,
    pub q: u64,
    pub ssw: u128,
    /// Asymptotic only: the lower-order term has no explicit constant.
    pub leading: Rational,
    /// `ssw / q^ceil(l/c)`.
    pub rate_upper: Rational,
    pub achieved_words: Option<u128>,
    pub achieved_rate: Option<Rational>,
}

impl BoundReport {
    pub fn new(c: usize, l: usize, q: u64, achieved_words: Option<u128>) -> Result<Self> {
        if q < 2 {
            return Err(Error::BelowTwo(q));
        }
        let ssw = ssw_bound(c, l, q)?;
        let leading = blackburn_leading(c, l)?;
        let rate_upper = Rational::new(ssw, q_power(c, l, q)?);
        let achieved_rate = achieved_words.map(|m| achieved_rate(c, l, q, m)).transpose()?;
        Ok(BoundReport {
            c,
            l,
            q,
            ssw,
            leading,
            rate_upper,
            achieved_words,
            achieved_rate,
        })
    }

    /// `c=<> l=<> q=<> ssw=<> leading=<num>/<den> achieved=<M|->`
    pub fn machine_line(&self) -> String {
        let achieved = self.achieved_words.map_or_else(|| "-".to_string(), |m| m.to_string());
        format!(
            "c={} l={} q={} ssw={} leading={}/{} achieved={}",
            self.c,
            self.l,
            self.q,
            self.ssw,
            self.leading.numer(),
            self.leading.denom(),
            achieved
        )
    }
}

fn fmt_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("parameters", format!("c={} l={} q={}", self.c, self.l, self.q)),
            ("ssw bound", self.ssw.to_string()),
            (
                "leading coefficient",
                format!("{} (asymptotic)", fmt_ratio(&self.leading)),
            ),
            ("rate upper", fmt_ratio(&self.rate_upper)),
            ("achieved M", self.achieved_words.map_or("-".into(), |m| m.to_string())),
            (
                "achieved rate",
                self.achieved_rate.as_ref().map_or("-".into(), fmt_ratio),
            ),
        ];
        for (k, v) in rows {
            writeln!(f, "{k:<20} {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(
            factor_prime_powers(45).unwrap(),
            vec![PrimePower { p: 3, e: 2 }, PrimePower { p: 5, e: 1 }]
        );
        assert_eq!(factor_prime_powers(7).unwrap(), vec![PrimePower { p: 7, e: 1 }]);
        assert_eq!(factor_prime_powers(1024).unwrap(), vec![PrimePower { p: 2, e: 10 }]);
        assert_eq!(factor_prime_powers(1), Err(Error::BelowTwo(1)));
    }

    #[test]
    fn c2_plans() {
        use PlanStep::*;
        let p = plan_c2_length4(7).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Ex1), Compose { m: 3 }, AugmentInfinity]);
        assert_eq!(p.target.words, 73);
        let p = plan_c2_length4(5).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Lem4), AugmentInfinity]);
        assert_eq!(p.target.words, 33);
        let p = plan_c2_length4(19).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Ex1), Compose { m: 9 }, AugmentInfinity]);
        assert_eq!(p.target.words, 649);
        // m = 15 = 3 * 5: recurse on 2*3 + 1 = 7, then compose with 5.
        let p = plan_c2_length4(31).unwrap();
        assert_eq!(
            p.steps,
            vec![
                Base(BaseCodeId::Ex1),
                Compose { m: 3 },
                Compose { m: 5 },
                AugmentInfinity
            ]
        );
        assert!(plan_c2_length4(8).is_err());
        assert!(plan_c2_length4(1).is_err());
    }

    #[test]
    fn c3_plans() {
        use PlanStep::*;
        let p = plan_c3_length5(4).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Ex2), AugmentInfinity]);
        assert_eq!(p.target.words, 16);
        let p = plan_c3_length5(10).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Lem5), AugmentInfinity]);
        assert_eq!(p.target.words, 136);
        let p = plan_c3_length5(22).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Ex2), Compose { m: 7 }, AugmentInfinity]);
        assert_eq!(p.target.words, 736);
        // m = 15: 5 is the only odd prime-power factor >= 5; 3*3 + 1 = 10.
        let p = plan_c3_length5(46).unwrap();
        assert_eq!(p.steps, vec![Base(BaseCodeId::Lem5), Compose { m: 5 }, AugmentInfinity]);
        assert!(plan_c3_length5(7).is_err());
    }

    #[test]
    fn plans_are_deterministic_and_traceable() {
        for q in (3..200).step_by(2) {
            let p = plan_c2_length4(q).unwrap();
            assert_eq!(p, plan_c2_length4(q).unwrap());
            let (fq, fm) = *p.trace().unwrap().last().unwrap();
            assert_eq!((fq, fm), (q, p.target.words), "q={q}");
        }
        for q in (4..400).step_by(6) {
            let p = plan_c3_length5(q).unwrap();
            let (fq, fm) = *p.trace().unwrap().last().unwrap();
            assert_eq!((fq, fm), (q, p.target.words), "q={q}");
        }
    }

    #[test]
    fn plan_line_form_round_trips() {
        let p = plan_c2_length4(31).unwrap();
        let line = p.to_line();
        assert_eq!(line, "c=2 l=4 q=31 M=1801: ex1 compose:3 compose:5 augment");
        assert_eq!(line.parse::<ConstructionPlan>().unwrap(), p);
        assert!("c=2 l=4 q=31: ex1".parse::<ConstructionPlan>().is_err());
        assert!("c=2 l=4 q=31 M=1: ex9".parse::<ConstructionPlan>().is_err());
        assert!(matches!(
            "c=2 l=4 q=31 M=1800: ex1 compose:3 compose:5 augment".parse::<ConstructionPlan>(),
            Err(Error::PlanMismatch { .. })
        ));
        assert!(matches!(
            "c=3 l=4 q=7 M=72: ex1 compose:3".parse::<ConstructionPlan>(),
            Err(Error::PlanMismatch { .. })
        ));
        assert!(matches!(
            "c=2 l=4 q=7 M=73: ex1 augment compose:3".parse::<ConstructionPlan>(),
            Err(Error::InvalidPlan(_))
        ));
        assert_eq!("c=2 l=4 q=7 M=73:".parse::<ConstructionPlan>(), Err(Error::EmptyPlan));
    }

    #[test]
    fn execute_small_plans() {
        for (c, q, words) in [(2, 7, 73), (2, 5, 33), (3, 22, 736)] {
            let code = execute_plan(&plan(c, q).unwrap(), false).unwrap();
            assert_eq!(code.len(), words);
        }
    }

    #[test]
    fn execute_rejects_bad_plans() {
        let target = Target {
            c: 2,
            l: 4,
            q: 7,
            words: 73,
        };
        let empty = ConstructionPlan { target, steps: vec![] };
        assert_eq!(execute_plan(&empty, false), Err(Error::EmptyPlan));
        let composite = ConstructionPlan {
            target,
            steps: vec![PlanStep::Base(BaseCodeId::Ex1), PlanStep::Compose { m: 6 }],
        };
        assert_eq!(execute_plan(&composite, false), Err(Error::NotPrimePower(6)));
        let short = ConstructionPlan {
            target,
            steps: vec![PlanStep::Base(BaseCodeId::Ex1), PlanStep::Compose { m: 3 }],
        };
        assert!(matches!(execute_plan(&short, false), Err(Error::PlanMismatch { .. })));
        let late = ConstructionPlan {
            target,
            steps: vec![
                PlanStep::Base(BaseCodeId::Ex1),
                PlanStep::AugmentInfinity,
                PlanStep::Compose { m: 3 },
            ],
        };
        assert!(matches!(execute_plan(&late, false), Err(Error::InvalidPlan(_))));
        let headless = ConstructionPlan {
            target,
            steps: vec![PlanStep::Compose { m: 3 }],
        };
        assert!(matches!(execute_plan(&headless, false), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn bounds() {
        assert_eq!(ssw_bound(2, 4, 7).unwrap(), 96);
        assert_eq!(ssw_bound(3, 5, 10).unwrap(), 297);
        assert_eq!(ssw_bound(2, 4, 3).unwrap(), 16);
        assert_eq!(blackburn_leading(3, 5).unwrap(), Rational::new(5, 3));
        assert_eq!(blackburn_leading(2, 4).unwrap(), Rational::from_integer(2));
        assert_eq!(blackburn_leading(3, 4).unwrap(), Rational::from_integer(1));
        assert_eq!(achieved_rate(2, 4, 7, 73).unwrap(), Rational::new(73, 49));
        assert_eq!(achieved_rate(3, 5, 4, 16).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn bound_report_lines() {
        let r = BoundReport::new(3, 5, 10, None).unwrap();
        assert_eq!(r.machine_line(), "c=3 l=5 q=10 ssw=297 leading=5/3 achieved=-");
        let r = BoundReport::new(2, 4, 7, Some(73)).unwrap();
        assert_eq!(r.machine_line(), "c=2 l=4 q=7 ssw=96 leading=2/1 achieved=73");
        assert_eq!(r.achieved_rate, Some(Rational::new(73, 49)));
        assert!(r.to_string().contains("leading coefficient  2/1 (asymptotic)"));
    }
}
