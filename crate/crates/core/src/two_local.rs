//! 2-local superderivations given as query oracles, and their
//! globalization into a single superderivation with a certificate.
//!
//! An oracle answers `query(x, y)` with a local map together with the
//! values `Δ(x)` and `Δ(y)`; the local map has to agree with both.
//! [`globalize`] anchors on a fixed pair of odd generators, corrects the
//! outer part on `I_0 + Q_0` for SW(2,2), and then checks the resulting
//! candidate against `Δ` on a finite test set.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{gens, BasisVector, Element, Family, Index, Kind};
use crate::annihilator::{common_annihilator, fit_derivation, AnnihilatorError, GradedWindow};
use crate::derivations::{DerivationError, LocalMap, RawLinearMap, SuperDerivation};
use crate::expr::{format_element, format_rational_pq, parse_element, parse_rational, ParseError};
use crate::linalg::{rat, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwoLocalError {
    #[error("globalization is not supported for {0}")]
    UnsupportedFamily(Family),
    #[error("oracle defect on query ({x}, {y}): returned map sends {at} to {got}, but reported {reported}")]
    OracleDefect {
        x: String,
        y: String,
        at: String,
        got: String,
        reported: String,
    },
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Annihilator(#[from] AnnihilatorError),
    #[error("malformed certificate: {0}")]
    Certificate(String),
}

impl From<ParseError> for TwoLocalError {
    fn from(e: ParseError) -> Self {
        TwoLocalError::Certificate(e.to_string())
    }
}

/// One answer of a 2-local oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResponse {
    pub map: LocalMap,
    pub delta_x: Element,
    pub delta_y: Element,
}

/// A 2-local superderivation presented through queries.
///
/// `query` must be a pure function of its arguments (and any seed fixed at
/// construction).
pub trait TwoLocalOracle {
    fn family(&self) -> Family;
    fn query(&self, x: &Element, y: &Element) -> Result<QueryResponse, TwoLocalError>;
}

/// Queries `o` and verifies that the returned map reproduces both
/// reported values.
pub fn checked_query<O: TwoLocalOracle + ?Sized>(
    o: &O,
    x: &Element,
    y: &Element,
) -> Result<QueryResponse, TwoLocalError> {
    let resp = o.query(x, y)?;
    for (at, reported) in [(x, &resp.delta_x), (y, &resp.delta_y)] {
        let got = resp.map.apply(at)?;
        if got != *reported {
            return Err(TwoLocalError::OracleDefect {
                x: format_element(x),
                y: format_element(y),
                at: format_element(at),
                got: format_element(&got),
                reported: format_element(reported),
            });
        }
    }
    Ok(resp)
}

/// `Δ(x)`, read off a self-paired query.
pub fn delta<O: TwoLocalOracle + ?Sized>(o: &O, x: &Element) -> Result<Element, TwoLocalError> {
    Ok(checked_query(o, x, x)?.delta_x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchors {
    pub first: Element,
    pub second: Element,
    /// `I_0 + Q_0`, present for SW(2,2) only.
    pub outer_probe: Option<Element>,
}

pub fn anchor_pair(family: Family) -> Result<Anchors, TwoLocalError> {
    use gens::*;
    match family {
        Family::Vir => Err(TwoLocalError::UnsupportedFamily(family)),
        Family::SVir0 => Ok(Anchors {
            first: g(family, 0),
            second: g(family, 1),
            outer_probe: None,
        }),
        Family::SVir12 => Ok(Anchors {
            first: g_half(family, 1),
            second: g_half(family, 3),
            outer_probe: None,
        }),
        Family::SW22 => Ok(Anchors {
            first: g(family, 0),
            second: g(family, 1),
            outer_probe: Some(i(family, 0).add(&q(family, 0)).expect("same family")),
        }),
    }
}

/// The finite stand-in for "every element": all basis vectors inside the
/// window followed by `random_count` seeded random combinations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSet {
    pub basis_bound: GradedWindow,
    pub random_count: usize,
    pub seed: u64,
}

impl TestSet {
    pub fn new(basis_bound: u32, random_count: usize, seed: u64) -> Self {
        Self {
            basis_bound: GradedWindow::int(basis_bound),
            random_count,
            seed,
        }
    }

    pub fn elements(&self, family: Family) -> Vec<Element> {
        let basis = family.basis_within(self.basis_bound.bound());
        let mut out: Vec<Element> = basis
            .iter()
            .map(|&b| Element::from_basis(family, b))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // Supports of two or more terms keep random elements off the lines
        // spanned by single basis vectors.
        let max_terms = basis.len().min(4);
        for _ in 0..self.random_count {
            if max_terms < 2 {
                break;
            }
            let size = rng.gen_range(2..=max_terms);
            let mut e = Element::zero(family);
            for pick in sample(&mut rng, basis.len(), size) {
                let c = COEFFICIENTS[rng.gen_range(0..COEFFICIENTS.len())];
                e.add_scaled(&Element::from_basis(family, basis[pick]), &ratio(c.0, c.1))
                    .expect("same family");
            }
            out.push(e);
        }
        out
    }
}

const COEFFICIENTS: [(i64, i64); 7] = [(-2, 1), (-1, 1), (-1, 2), (1, 2), (1, 1), (2, 1), (3, 1)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub element: Element,
    pub expected: Element,
    pub got: Element,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// The outcome of [`globalize`]: `Δ = candidate` checked element by
/// element. `candidate` already includes the outer correction `mu · D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub family: Family,
    pub candidate: SuperDerivation,
    pub mu: Rational,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub failure_witness: Option<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CandidateJson {
    inner: String,
    lambda: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CheckJson {
    element: String,
    expected: String,
    got: String,
    pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CertificateJson {
    family: String,
    candidate: CandidateJson,
    mu: String,
    checks: Vec<CheckJson>,
    verdict: Verdict,
    failure_witness: Option<String>,
}

impl Certificate {
    fn to_wire(&self) -> CertificateJson {
        CertificateJson {
            family: self.family.name().to_string(),
            candidate: CandidateJson {
                inner: format_element(self.candidate.inner_part()),
                lambda: format_rational_pq(self.candidate.outer_lambda()),
            },
            mu: format_rational_pq(&self.mu),
            checks: self
                .checks
                .iter()
                .map(|c| CheckJson {
                    element: format_element(&c.element),
                    expected: format_element(&c.expected),
                    got: format_element(&c.got),
                    pass: c.pass,
                })
                .collect(),
            verdict: self.verdict,
            failure_witness: self.failure_witness.as_ref().map(format_element),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("certificate serializes")
    }

    pub fn from_json(src: &str) -> Result<Self, TwoLocalError> {
        let wire: CertificateJson =
            serde_json::from_str(src).map_err(|e| TwoLocalError::Certificate(e.to_string()))?;
        let family = Family::from_name(&wire.family)
            .ok_or_else(|| TwoLocalError::Certificate(format!("unknown family {}", wire.family)))?;
        let candidate = SuperDerivation::new(
            parse_element(&wire.candidate.inner, family)?,
            parse_rational(&wire.candidate.lambda)?,
        )?;
        let checks = wire
            .checks
            .iter()
            .map(|c| {
                Ok(Check {
                    element: parse_element(&c.element, family)?,
                    expected: parse_element(&c.expected, family)?,
                    got: parse_element(&c.got, family)?,
                    pass: c.pass,
                })
            })
            .collect::<Result<Vec<_>, TwoLocalError>>()?;
        Ok(Self {
            family,
            candidate,
            mu: parse_rational(&wire.mu)?,
            checks,
            verdict: wire.verdict,
            failure_witness: wire
                .failure_witness
                .as_deref()
                .map(|w| parse_element(w, family))
                .transpose()?,
        })
    }

    /// Re-derives every `got` from the candidate and every flag from the
    /// recorded values. Returns the list of inconsistencies (empty when
    /// the certificate is internally sound).
    pub fn recheck(&self) -> Result<Vec<String>, TwoLocalError> {
        let mut problems = Vec::new();
        for (n, c) in self.checks.iter().enumerate() {
            let got = self.candidate.apply(&c.element)?;
            if got != c.got {
                problems.push(format!(
                    "check {n}: candidate gives {}",
                    format_element(&got)
                ));
            }
            if c.pass != (c.expected == c.got) {
                problems.push(format!("check {n}: pass flag disagrees with values"));
            }
        }
        let all_pass = self.checks.iter().all(|c| c.pass);
        if (self.verdict == Verdict::Pass) != all_pass {
            problems.push("verdict disagrees with checks".into());
        }
        let first_fail = self.checks.iter().find(|c| !c.pass).map(|c| &c.element);
        if first_fail != self.failure_witness.as_ref() {
            problems.push("failure witness is not the first failing element".into());
        }
        Ok(problems)
    }
}

/// Reconstructs a global superderivation from a 2-local oracle and checks
/// it on `t`.
///
/// 1. Query the anchor pair. A returned superderivation is kept without
///    its outer part (which kills both anchors anyway); a returned raw map
///    is replaced by the canonical superderivation matching it on the
///    anchors, if there is one.
/// 2. For SW(2,2), the residual on `I_0 + Q_0` must be a multiple `mu` of
///    it; `mu · D` is added to the candidate.
/// 3. Every test element `e` is checked, with `Δ(e)` read from the query
///    `(first anchor, e)`.
pub fn globalize<O: TwoLocalOracle + ?Sized>(
    o: &O,
    t: &TestSet,
) -> Result<Certificate, TwoLocalError> {
    let family = o.family();
    let anchors = anchor_pair(family)?;
    let mut recorded: Vec<(Element, Element)> = Vec::new();

    let resp = checked_query(o, &anchors.first, &anchors.second)?;
    recorded.push((anchors.first.clone(), resp.delta_x.clone()));
    recorded.push((anchors.second.clone(), resp.delta_y.clone()));
    let mut candidate = match resp.map {
        LocalMap::Derivation(d) => d.inner_only(),
        LocalMap::Raw(_) => {
            let reach = anchors
                .first
                .max_abs_index()
                .max(anchors.second.max_abs_index());
            let bound = t.basis_bound.bound().clone().max(reach * rat(2) + rat(2));
            fit_derivation(family, &recorded, &GradedWindow::new(bound)?)?
                .unwrap_or_else(|| SuperDerivation::zero(family))
        }
    };

    let mut mu = Rational::zero();
    if let Some(probe) = &anchors.outer_probe {
        let want = checked_query(o, &anchors.first, probe)?.delta_y;
        let residual = want.sub(&candidate.apply(probe)?).expect("same family");
        if let Some(k) = residual.ratio_to(probe) {
            mu = k;
            candidate = candidate.add(&SuperDerivation::outer(family, mu.clone())?)?;
        }
        recorded.push((probe.clone(), want));
    }

    for e in t.elements(family) {
        let want = checked_query(o, &anchors.first, &e)?.delta_y;
        recorded.push((e, want));
    }

    let mut checks = Vec::with_capacity(recorded.len());
    for (element, expected) in recorded {
        let got = candidate.apply(&element)?;
        let pass = got == expected;
        checks.push(Check {
            element,
            expected,
            got,
            pass,
        });
    }
    let failure_witness = checks.iter().find(|c| !c.pass).map(|c| c.element.clone());
    let verdict = if failure_witness.is_none() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Certificate {
        family,
        candidate,
        mu,
        checks,
        verdict,
        failure_witness,
    })
}

/// For each `(k, x)`, whether `Δ(kx) = k·Δ(x)`.
pub fn homogeneity_check<O: TwoLocalOracle + ?Sized>(
    o: &O,
    samples: &[(Rational, Element)],
) -> Result<Vec<bool>, TwoLocalError> {
    samples
        .iter()
        .map(|(k, x)| Ok(delta(o, &x.scale(k))? == delta(o, x)?.scale(k)))
        .collect()
}

/// An honest oracle for the superderivation `d`.
///
/// Each query returns `d + m`, where `m` is a seeded pseudo-random member
/// of the common annihilator of the two arguments inside the mask window.
/// Different pairs therefore see different local derivations while
/// `Δ = d` stays globally consistent.
#[derive(Debug, Clone)]
pub struct HonestOracle {
    d: SuperDerivation,
    mask: Option<GradedWindow>,
    seed: u64,
}

/// A mask window of bound 0 turns masking off.
pub fn make_honest_oracle(
    d: SuperDerivation,
    mask_window: GradedWindow,
    seed: u64,
) -> HonestOracle {
    let mask = (!mask_window.bound().is_zero()).then_some(mask_window);
    HonestOracle { d, mask, seed }
}

impl HonestOracle {
    pub fn derivation(&self) -> &SuperDerivation {
        &self.d
    }
}

impl TwoLocalOracle for HonestOracle {
    fn family(&self) -> Family {
        self.d.family()
    }

    fn query(&self, x: &Element, y: &Element) -> Result<QueryResponse, TwoLocalError> {
        let mut local = self.d.clone();
        if let Some(mask) = &self.mask {
            let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(self.seed, x, y));
            for m in common_annihilator(self.family(), &[x, y], mask)? {
                let k = rat(rng.gen_range(-2..=2));
                if !k.is_zero() {
                    local = local.add(&m.scale(&k))?;
                }
            }
        }
        Ok(QueryResponse {
            map: LocalMap::Derivation(local),
            delta_x: self.d.apply(x)?,
            delta_y: self.d.apply(y)?,
        })
    }
}

/// FNV-1a over the printed pair, mixed with the oracle seed.
fn pair_seed(seed: u64, x: &Element, y: &Element) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in format_element(x)
        .bytes()
        .chain(*b"|")
        .chain(format_element(y).bytes())
    {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.rotate_left(17)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdversarialKind {
    /// `Δ(Σ c_i b_i) = Σ c_i² b_i`
    CoefficientSquare,
    /// `Δ(L_m) = L_{m+1}`, zero on every other basis vector.
    ShiftMap,
    /// Answers `ad(L_0)` for pairs containing the second anchor and
    /// `ad(2 L_0)` otherwise.
    PairwiseInconsistent,
}

impl AdversarialKind {
    pub const ALL: [AdversarialKind; 3] = [
        AdversarialKind::CoefficientSquare,
        AdversarialKind::ShiftMap,
        AdversarialKind::PairwiseInconsistent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversarialKind::CoefficientSquare => "coefficient_square",
            AdversarialKind::ShiftMap => "shift_map",
            AdversarialKind::PairwiseInconsistent => "pairwise_inconsistent",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// An oracle whose `Δ` is not a superderivation.
#[derive(Debug, Clone)]
pub struct AdversarialOracle {
    kind: AdversarialKind,
    family: Family,
}

pub fn make_adversarial_oracle(kind: AdversarialKind, family: Family) -> AdversarialOracle {
    AdversarialOracle { kind, family }
}

impl AdversarialOracle {
    fn shifted(&self, x: &Element) -> Element {
        let mut out = Element::zero(self.family);
        for (b, c) in x.terms() {
            if b.kind == Kind::L {
                let up = BasisVector {
                    kind: Kind::L,
                    index: b.index + Index::int(1),
                };
                out.add_scaled(&Element::from_basis(self.family, up), c)
                    .expect("same family");
            }
        }
        out
    }

    fn squared(&self, x: &Element) -> Element {
        let mut out = Element::zero(self.family);
        for (b, c) in x.terms() {
            out.add_scaled(&Element::from_basis(self.family, *b), &(c * c))
                .expect("same family");
        }
        out
    }
}

impl TwoLocalOracle for AdversarialOracle {
    fn family(&self) -> Family {
        self.family
    }

    fn query(&self, x: &Element, y: &Element) -> Result<QueryResponse, TwoLocalError> {
        match self.kind {
            AdversarialKind::CoefficientSquare => {
                let (dx, dy) = (self.squared(x), self.squared(y));
                let map = interpolate(self.family, (x, &dx), (y, &dy));
                Ok(QueryResponse {
                    map: LocalMap::Raw(map),
                    delta_x: dx,
                    delta_y: dy,
                })
            }
            AdversarialKind::ShiftMap => {
                let domain: Vec<BasisVector> =
                    x.terms().chain(y.terms()).map(|(b, _)| *b).collect();
                let map = RawLinearMap::from_fn(self.family, &domain, |b| {
                    self.shifted(&Element::from_basis(self.family, b))
                });
                Ok(QueryResponse {
                    map: LocalMap::Raw(map),
                    delta_x: self.shifted(x),
                    delta_y: self.shifted(y),
                })
            }
            AdversarialKind::PairwiseInconsistent => {
                let second = anchor_pair(self.family)
                    .map(|a| a.second)
                    .unwrap_or_else(|_| gens::l(self.family, 1));
                let k = if *x == second || *y == second {
                    rat(1)
                } else {
                    rat(2)
                };
                let d = SuperDerivation::inner(gens::l(self.family, 0).scale(&k));
                Ok(QueryResponse {
                    delta_x: d.apply(x)?,
                    delta_y: d.apply(y)?,
                    map: LocalMap::Derivation(d),
                })
            }
        }
    }
}

/// A linear map with `T(x) = tx` and `T(y) = ty`, supported on at most two
/// basis vectors. When `x` and `y` are dependent and no such map exists,
/// the map matches `x` only.
fn interpolate(
    family: Family,
    (x, tx): (&Element, &Element),
    (y, ty): (&Element, &Element),
) -> RawLinearMap {
    let mut table = BTreeMap::new();
    let Some((&b1, x1)) = x.terms().next() else {
        // x = 0: only y constrains the map.
        if let Some((&b, c)) = y.terms().next() {
            table.insert(b, ty.scale(&c.recip()));
        }
        return RawLinearMap::from_table(family, table).expect("basis from the family");
    };
    let k = y.coefficient(&b1) / x1;
    let y_rest = y.sub(&x.scale(&k)).expect("same family");
    match y_rest.terms().next() {
        None => {
            table.insert(b1, tx.scale(&x1.recip()));
        }
        Some((&b2, _)) => {
            // Solve [x1 x2; y1 y2] [T b1; T b2] = [tx; ty].
            let (x2, y1, y2) = (x.coefficient(&b2), y.coefficient(&b1), y.coefficient(&b2));
            let det = x1 * &y2 - &x2 * &y1;
            let inv = det.recip();
            let tb1 = tx
                .scale(&(&y2 * &inv))
                .sub(&ty.scale(&(&x2 * &inv)))
                .expect("same family");
            let tb2 = ty
                .scale(&(x1 * &inv))
                .sub(&tx.scale(&(&y1 * &inv)))
                .expect("same family");
            table.insert(b1, tb1);
            table.insert(b2, tb2);
        }
    }
    RawLinearMap::from_table(family, table).expect("basis from the family")
}
