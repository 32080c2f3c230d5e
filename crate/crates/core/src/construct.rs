//! Fixed base codes and the operators that grow them.
//!
//! The central operator is [`compose`]: given an `s`-ary `c`-frameproof
//! code of length `l` with P(t), it pairs every non-infinity symbol of each
//! codeword with the value of a polynomial of degree below `t` over `GF(m)`
//! at a per-position evaluation point. The result is a `((s-1)m + 1)`-ary
//! `c`-frameproof code with `M m^t` words and P(t), so the step can be
//! repeated. [`augment_infinity`] then adds the all-infinity word.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{Field, Poly};
use crate::model::{Code, PairAlphabet, PairSymbol, Symbol, Word};
use crate::oa::{build_oa_strength2, oa_to_pt_code};
use crate::verify::{is_frameproof_cover, satisfies_property_pt, VerifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseCodeId {
    /// 3-ary, length 4, 8 words, 2-frameproof.
    Ex1,
    /// 4-ary, length 5, 15 words, 3-frameproof.
    Ex2,
    /// 5-ary, length 4, 32 words, 2-frameproof.
    Lem4,
    /// 10-ary, length 5, 135 words, 3-frameproof.
    Lem5,
}

impl BaseCodeId {
    pub const ALL: [BaseCodeId; 4] = [BaseCodeId::Ex1, BaseCodeId::Ex2, BaseCodeId::Lem4, BaseCodeId::Lem5];

    pub fn name(self) -> &'static str {
        match self {
            BaseCodeId::Ex1 => "ex1",
            BaseCodeId::Ex2 => "ex2",
            BaseCodeId::Lem4 => "lem4",
            BaseCodeId::Lem5 => "lem5",
        }
    }

    /// Largest coalition the code resists.
    pub fn coalition(self) -> usize {
        match self {
            BaseCodeId::Ex1 | BaseCodeId::Lem4 => 2,
            BaseCodeId::Ex2 | BaseCodeId::Lem5 => 3,
        }
    }

    /// `(q, l, M)`.
    pub fn parameters(self) -> (u32, usize, usize) {
        match self {
            BaseCodeId::Ex1 => (3, 4, 8),
            BaseCodeId::Ex2 => (4, 5, 15),
            BaseCodeId::Lem4 => (5, 4, 32),
            BaseCodeId::Lem5 => (10, 5, 135),
        }
    }
}

impl fmt::Display for BaseCodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseCodeId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BaseCodeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown base code {s:?}"))
    }
}

/// Offsets `k` of the word family `{(.., i + k, ..) : i in Z_n}`; `None` is
/// infinity.
type Template = &'static [&'static [Option<u32>]];

const LENGTH4_OFFSETS: Template = &[
    &[None, Some(0), Some(0), Some(0)],
    &[Some(0), None, Some(0), Some(1)],
    &[Some(0), Some(1), None, Some(0)],
    &[Some(0), Some(0), Some(1), None],
];

const LENGTH5_OFFSETS: Template = &[
    &[None, Some(0), Some(0), Some(0), Some(0)],
    &[Some(0), None, Some(0), Some(1), Some(2)],
    &[Some(0), Some(0), None, Some(2), Some(1)],
    &[Some(0), Some(1), Some(2), None, Some(0)],
    &[Some(0), Some(2), Some(1), Some(0), None],
];

/// Words `{(.., i + k, ..)}` over `{inf} u Z_n` with `inf -> 0`, `i -> i + 1`.
fn cyclic_code(template: Template, n: u32) -> Code {
    let l = template[0].len();
    let words = template
        .iter()
        .flat_map(|row| (0..n).map(move |i| row.iter().map(|o| o.map_or(0, |k| (i + k) % n + 1)).collect::<Word>()));
    Code::new(l, n + 1, words, Some(0)).expect("fixed base code is well formed")
}

/// Same templates over `{inf} u (Z_n x F_n)`: the non-infinity positions of
/// each word carry, in order, `f(0), f(1), .., f(n-1), f_inf` for every `f`
/// of degree at most 1.
fn cyclic_poly_code(template: Template, n: u32) -> Code {
    let field = Field::new(n as u64).expect("prime");
    let pair = PairAlphabet::new(n + 1, n).expect("valid");
    let l = template[0].len();
    let mut words = Vec::new();
    for row in template {
        for i in 0..n {
            for f in field.polys(2) {
                let mut values = field
                    .elements()
                    .map(|a| field.eval(&f, a).expect("in range"))
                    .chain(std::iter::once(f.leading_coeff(2)));
                let word: Word = row
                    .iter()
                    .map(|o| match o {
                        None => 0,
                        Some(k) => pair.flatten(PairSymbol::Finite {
                            outer: (i + k) % n + 1,
                            inner: values.next().expect("one value per finite position"),
                        }),
                    })
                    .collect();
                words.push(word);
            }
        }
    }
    Code::new(l, pair.size(), words, Some(0)).expect("fixed base code is well formed")
}

pub fn base_code(id: BaseCodeId) -> Code {
    match id {
        BaseCodeId::Ex1 => cyclic_code(LENGTH4_OFFSETS, 2),
        BaseCodeId::Ex2 => cyclic_code(LENGTH5_OFFSETS, 3),
        BaseCodeId::Lem4 => cyclic_poly_code(LENGTH4_OFFSETS, 2),
        BaseCodeId::Lem5 => cyclic_poly_code(LENGTH5_OFFSETS, 3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalPoint {
    Element(u32),
    Infinity,
}

/// `l` distinct points of `GF(m) u {inf}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPoints(Vec<EvalPoint>);

impl EvalPoints {
    pub fn new(points: Vec<EvalPoint>, field: &Field) -> Result<Self> {
        for p in &points {
            if let EvalPoint::Element(a) = p {
                field.check(*a)?;
            }
        }
        let distinct: HashSet<_> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::PointsNotDistinct);
        }
        Ok(EvalPoints(points))
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.0
    }
}

/// The first `l` field elements, or all of them followed by infinity when
/// `l = m + 1`.
pub fn default_eval_points(field: &Field, l: usize) -> Result<EvalPoints> {
    let m = field.order() as usize;
    if m + 1 < l {
        return Err(Error::FieldTooSmall {
            m: m as u64,
            needed: l - 1,
        });
    }
    let mut points: Vec<_> = field.elements().take(l).map(EvalPoint::Element).collect();
    if l == m + 1 {
        points.push(EvalPoint::Infinity);
    }
    Ok(EvalPoints(points))
}

/// Checks `2t - 1 <= l`, `c >= t` and `l = c(t-1) + r` with `t <= r <= c`.
fn check_shape(l: usize, t: usize, c: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidStrength);
    }
    if c < 2 {
        return Err(Error::CoalitionTooSmall(c));
    }
    if 2 * t - 1 > l {
        return Err(Error::StrengthTooLarge { t, length: l });
    }
    if c < t {
        return Err(Error::CoalitionBelowStrength { c, t });
    }
    let residue = l as i64 - (c * (t - 1)) as i64;
    if residue < t as i64 || residue > c as i64 {
        return Err(Error::ResidueOutOfRange {
            length: l,
            c,
            t,
            residue,
        });
    }
    Ok(())
}

fn check_pt(code: &Code, t: usize) -> Result<()> {
    let report = satisfies_property_pt(code, t)?;
    match report.witness {
        None => Ok(()),
        Some(w) => Err(Error::ParentNotPt {
            t,
            detail: format!("{w:?}"),
        }),
    }
}

fn check_frameproof(code: &Code, c: usize) -> Result<()> {
    let report = is_frameproof_cover(code, c, VerifyOptions::default())?;
    match report.witness {
        None => Ok(()),
        Some(w) => Err(Error::ParentNotFrameproof {
            c,
            detail: format!("{w:?}"),
        }),
    }
}

/// Parameters of one composition step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compose {
    pub m: u64,
    pub t: usize,
    pub c: usize,
    /// Defaults to [`default_eval_points`].
    pub points: Option<Vec<EvalPoint>>,
    /// Skip re-verifying P(t) and frameproofness of the parent.
    pub trust: bool,
}

impl Compose {
    pub fn new(m: u64, t: usize, c: usize) -> Self {
        Compose {
            m,
            t,
            c,
            points: None,
            trust: false,
        }
    }

    pub fn trusted(mut self) -> Self {
        self.trust = true;
        self
    }
}

/// Builds the `((s-1)m + 1)`-ary code of `M m^t` words from an `s`-ary
/// parent with P(t). Position `j` of a child of parent word `b` holds
/// infinity where `b_j` is infinity, and otherwise the pair `(b_j, y_j)`
/// with `y_j = f(alpha_j)`, or the coefficient of `X^(t-1)` when
/// `alpha_j` is infinity.
pub fn compose(parent: &Code, params: &Compose) -> Result<Code> {
    let inf = parent.inf().ok_or(Error::MissingInfinity)?;
    let (l, t, c) = (parent.length(), params.t, params.c);
    check_shape(l, t, c)?;
    let field = Field::new(params.m)?;
    if (params.m as usize) + 1 < l {
        return Err(Error::FieldTooSmall {
            m: params.m,
            needed: l - 1,
        });
    }
    let points = match &params.points {
        Some(p) => {
            if p.len() != l {
                return Err(Error::PointCount(p.len(), l));
            }
            EvalPoints::new(p.clone(), &field)?
        }
        None => default_eval_points(&field, l)?,
    };
    if !params.trust {
        check_pt(parent, t)?;
        check_frameproof(parent, c)?;
    }

    let pair = PairAlphabet::new(parent.alphabet(), field.order())?;
    // Non-infinity parent symbols become 1..s in order.
    let outer = |b: Symbol| if b < inf { b + 1 } else { b };

    let columns: Vec<Vec<u32>> = field
        .polys(t)
        .map(|f: Poly| {
            points
                .points()
                .iter()
                .map(|p| match *p {
                    EvalPoint::Element(a) => field.eval(&f, a).expect("points checked"),
                    EvalPoint::Infinity => f.leading_coeff(t),
                })
                .collect()
        })
        .collect();

    let mut words = Vec::with_capacity(parent.len() * columns.len());
    for b in parent.words() {
        for values in &columns {
            let word = b
                .iter()
                .zip(values)
                .map(|(&bj, &yj)| {
                    if bj == inf {
                        pair.flatten(PairSymbol::Infinity)
                    } else {
                        pair.flatten(PairSymbol::Finite {
                            outer: outer(bj),
                            inner: yj,
                        })
                    }
                })
                .collect();
            words.push(word);
        }
    }
    Code::new(l, pair.size(), words, Some(0))
}

/// Adds the all-infinity word to a code with P(t); the result stays
/// `c`-frameproof.
pub fn augment_infinity(code: &Code, c: usize, t: usize, trust: bool) -> Result<Code> {
    let all_inf = code.infinity_word().ok_or(Error::MissingInfinity)?;
    check_shape(code.length(), t, c)?;
    if code.contains(&all_inf) {
        return Err(Error::AlreadyAugmented);
    }
    if !trust {
        check_pt(code, t)?;
    }
    code.with_word(all_inf)
}

/// Normalized strength-`t` array over `s` symbols, then [`compose`] with
/// `GF(m)`. Only the built-in `OA(2, s+1, s)` is available.
pub fn oa_pipeline(s: u64, t: usize, l: usize, m: u64, c: usize, trust: bool) -> Result<Code> {
    if t != 2 || l as u64 != s + 1 {
        return Err(Error::UnsupportedArray(format!(
            "only t = 2 and l = s + 1 are built in (got s={s}, t={t}, l={l})"
        )));
    }
    let array = build_oa_strength2(s)?;
    let base = oa_to_pt_code(&array, t)?;
    let params = Compose {
        trust,
        ..Compose::new(m, t, c)
    };
    compose(&base, &params)
}

/// The `(cm + 1)`-ary `c`-frameproof code of length `c + 2` with
/// `((c+2)/c)(q-1)^2` words, for `c + 1` a prime power and `m >= c + 1`.
pub fn oa_family(c: usize, m: u64, trust: bool) -> Result<Code> {
    let s = c as u64 + 1;
    if crate::field::is_prime_power(s)?.is_none() {
        return Err(Error::NotPrimePower(s));
    }
    if m < s {
        return Err(Error::FieldTooSmall { m, needed: c + 1 });
    }
    oa_pipeline(s, 2, c + 2, m, c, trust)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::is_frameproof_naive;

    #[test]
    fn base_code_parameters() {
        for id in BaseCodeId::ALL {
            let code = base_code(id);
            let (q, l, m) = id.parameters();
            assert_eq!((code.alphabet(), code.length(), code.len()), (q, l, m), "{id}");
            assert_eq!(code.inf(), Some(0));
            assert_eq!(id.name().parse::<BaseCodeId>(), Ok(id));
        }
        assert!("lem6".parse::<BaseCodeId>().is_err());
    }

    #[test]
    fn example_one_words() {
        let code = base_code(BaseCodeId::Ex1);
        // (inf, 0, 0, 0) under inf -> 0, i -> i + 1
        assert!(code.contains(&[0, 1, 1, 1]));
        assert!(code.contains(&[2, 0, 2, 1]));
        assert!(code.contains(&[1, 2, 0, 1]));
        assert!(code.contains(&[2, 2, 1, 0]));
    }

    #[test]
    fn length_four_polynomial_word_layout() {
        let code = base_code(BaseCodeId::Lem4);
        // (inf, (0, f(0)), (0, f(1)), (0, f_inf)) with f = X: values 0, 1, 1
        assert!(code.contains(&[0, 1, 2, 2]));
        // ((1, f(0)), inf, (1, f(1)), (0, f_inf)) with f = X + 1: 1, 0, 1
        assert!(code.contains(&[4, 0, 3, 2]));
    }

    #[test]
    fn default_points() {
        let f3 = Field::new(3).unwrap();
        assert_eq!(
            default_eval_points(&f3, 4).unwrap().points(),
            &[
                EvalPoint::Element(0),
                EvalPoint::Element(1),
                EvalPoint::Element(2),
                EvalPoint::Infinity
            ]
        );
        let f5 = Field::new(5).unwrap();
        assert_eq!(
            default_eval_points(&f5, 4).unwrap().points(),
            &[0, 1, 2, 3].map(EvalPoint::Element)
        );
        let f2 = Field::new(2).unwrap();
        assert!(matches!(
            default_eval_points(&f2, 4),
            Err(Error::FieldTooSmall { m: 2, needed: 3 })
        ));
    }

    #[test]
    fn compose_example_one() {
        let code = compose(&base_code(BaseCodeId::Ex1), &Compose::new(3, 2, 2)).unwrap();
        assert_eq!(code.alphabet(), 7);
        assert_eq!(code.len(), 72);
        assert!(satisfies_property_pt(&code, 2).unwrap().verdict);
        assert!(is_frameproof_naive(&code, 2, VerifyOptions::default()).unwrap().verdict);
    }

    #[test]
    fn compose_example_two() {
        let code = compose(&base_code(BaseCodeId::Ex2), &Compose::new(4, 2, 3)).unwrap();
        assert_eq!((code.alphabet(), code.len()), (13, 240));
    }

    #[test]
    fn compose_diagnostics() {
        let ex1 = base_code(BaseCodeId::Ex1);
        let err = |m, t, c| compose(&ex1, &Compose::new(m, t, c)).unwrap_err();
        assert_eq!(err(6, 2, 2), Error::NotPrimePower(6));
        assert_eq!(err(2, 2, 2), Error::FieldTooSmall { m: 2, needed: 3 });
        assert_eq!(err(3, 3, 3), Error::StrengthTooLarge { t: 3, length: 4 });
        assert!(matches!(err(3, 2, 3), Error::ResidueOutOfRange { residue: 1, .. }));
        assert_eq!(err(3, 2, 1), Error::CoalitionTooSmall(1));

        let no_inf = Code::new(4, 3, vec![vec![1, 1, 1, 1]], None).unwrap();
        assert_eq!(compose(&no_inf, &Compose::new(3, 2, 2)), Err(Error::MissingInfinity));

        let augmented = augment_infinity(&ex1, 2, 2, false).unwrap();
        assert!(matches!(
            compose(&augmented, &Compose::new(3, 2, 2)),
            Err(Error::ParentNotPt { t: 2, .. })
        ));

        let mut bad = Compose::new(3, 2, 2);
        bad.points = Some(vec![EvalPoint::Element(0); 4]);
        assert_eq!(compose(&ex1, &bad), Err(Error::PointsNotDistinct));
        bad.points = Some(vec![EvalPoint::Element(0)]);
        assert_eq!(compose(&ex1, &bad), Err(Error::PointCount(1, 4)));
    }

    #[test]
    fn compose_rejects_parent_without_pt() {
        // (1,1,1,1) and (1,1,2,2) agree on two finite positions.
        let parent = Code::new(
            4,
            3,
            vec![vec![1, 1, 1, 1], vec![2, 2, 2, 2], vec![1, 1, 2, 2]],
            Some(0),
        )
        .unwrap();
        assert!(matches!(
            compose(&parent, &Compose::new(3, 2, 2)),
            Err(Error::ParentNotPt { t: 2, .. })
        ));
        // Trusted composition skips the check.
        assert_eq!(compose(&parent, &Compose::new(3, 2, 2).trusted()).unwrap().len(), 27);
    }

    #[test]
    fn custom_points() {
        let ex1 = base_code(BaseCodeId::Ex1);
        let mut params = Compose::new(5, 2, 2);
        params.points = Some(vec![
            EvalPoint::Infinity,
            EvalPoint::Element(4),
            EvalPoint::Element(2),
            EvalPoint::Element(0),
        ]);
        let code = compose(&ex1, &params).unwrap();
        assert_eq!((code.alphabet(), code.len()), (11, 200));
        assert!(satisfies_property_pt(&code, 2).unwrap().verdict);
        assert!(is_frameproof_cover(&code, 2, VerifyOptions::default()).unwrap().verdict);
    }

    #[test]
    fn augmentation() {
        let ex1 = base_code(BaseCodeId::Ex1);
        let aug = augment_infinity(&ex1, 2, 2, false).unwrap();
        assert_eq!(aug.len(), 9);
        assert!(is_frameproof_naive(&aug, 2, VerifyOptions::default()).unwrap().verdict);
        assert_eq!(augment_infinity(&aug, 2, 2, false), Err(Error::AlreadyAugmented));

        let composed = compose(&ex1, &Compose::new(3, 2, 2)).unwrap();
        assert_eq!(augment_infinity(&composed, 2, 2, false).unwrap().len(), 73);
    }

    #[test]
    fn oa_pipeline_sizes() {
        let code = oa_pipeline(4, 2, 5, 4, 3, false).unwrap();
        assert_eq!((code.alphabet(), code.len()), (13, 240));
        let code = oa_pipeline(3, 2, 4, 3, 2, false).unwrap();
        assert_eq!((code.alphabet(), code.len()), (7, 72));
        let code = oa_pipeline(5, 2, 6, 5, 4, false).unwrap();
        assert_eq!((code.alphabet(), code.len()), (21, 600));
        assert!(matches!(
            oa_pipeline(4, 2, 4, 4, 3, false),
            Err(Error::UnsupportedArray(_))
        ));
    }

    #[test]
    fn oa_family_parameters() {
        let code = oa_family(3, 4, false).unwrap();
        assert_eq!((code.alphabet(), code.length(), code.len()), (13, 5, 240));
        let code = oa_family(4, 7, true).unwrap();
        assert_eq!((code.alphabet(), code.length(), code.len()), (29, 6, 1176));
        assert_eq!(oa_family(5, 7, true), Err(Error::NotPrimePower(6)));
        assert_eq!(oa_family(4, 4, true), Err(Error::FieldTooSmall { m: 4, needed: 5 }));

        let c2 = oa_family(2, 3, false).unwrap();
        assert_eq!(c2.len(), 72);
        assert!(is_frameproof_naive(&c2, 2, VerifyOptions::default()).unwrap().verdict);
    }
}
