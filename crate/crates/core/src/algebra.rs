//! The algebra families and their graded brackets.
//!
//! Four families are supported: the Virasoro algebra, the Ramond and
//! Neveu-Schwarz super Virasoro algebras, and the super W(2,2) algebra.
//! Each is defined by its nonzero products on ordered basis pairs; pairs
//! that appear only in the reverse order are filled in by super
//! anti-symmetry, and every other pair brackets to zero.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Vir,
    SVir0,
    SVir12,
    SW22,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Vir, Family::SVir0, Family::SVir12, Family::SW22];

    pub fn name(self) -> &'static str {
        match self {
            Family::Vir => "vir",
            Family::SVir0 => "svir0",
            Family::SVir12 => "svir12",
            Family::SW22 => "sw22",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn kinds(self) -> &'static [Kind] {
        match self {
            Family::Vir => &[Kind::L, Kind::C],
            Family::SVir0 | Family::SVir12 => &[Kind::L, Kind::G, Kind::C],
            Family::SW22 => &[Kind::L, Kind::G, Kind::I, Kind::Q, Kind::C1, Kind::C2],
        }
    }

    pub fn admits(self, kind: Kind) -> bool {
        self.kinds().contains(&kind)
    }

    /// Whether `index` is a legal index for `kind` in this family.
    pub fn index_in_sector(self, kind: Kind, index: Index) -> bool {
        match kind {
            Kind::C | Kind::C1 | Kind::C2 => index == Index::ZERO,
            Kind::G if self == Family::SVir12 => !index.is_integer(),
            _ => index.is_integer(),
        }
    }

    pub fn basis(self, kind: Kind, index: Index) -> Result<BasisVector, AlgebraError> {
        if !self.admits(kind) {
            return Err(AlgebraError::KindNotInFamily { kind, family: self });
        }
        if !self.index_in_sector(kind, index) {
            return Err(AlgebraError::IndexNotInSector {
                kind,
                index,
                family: self,
            });
        }
        Ok(BasisVector { kind, index })
    }

    /// Central kinds carried by this family.
    pub fn central_kinds(self) -> &'static [Kind] {
        match self {
            Family::SW22 => &[Kind::C1, Kind::C2],
            _ => &[Kind::C],
        }
    }

    /// All non-central basis vectors with `|index| <= bound`, in canonical
    /// order.
    pub fn generators_within(self, bound: &Rational) -> Vec<BasisVector> {
        // Work on doubled indices so both sectors enumerate uniformly.
        let twice = (bound * Rational::from_integer(BigInt::from(2))).floor();
        let limit: i64 = twice.to_integer().try_into().unwrap_or(i64::MAX / 4);
        let mut out = Vec::new();
        for &kind in self.kinds() {
            if kind.is_central() {
                continue;
            }
            for t in -limit..=limit {
                let index = Index::from_twice(t);
                if self.index_in_sector(kind, index) {
                    out.push(BasisVector { kind, index });
                }
            }
        }
        out
    }

    /// Every basis vector (central ones included) with `|index| <= bound`.
    pub fn basis_within(self, bound: &Rational) -> Vec<BasisVector> {
        let mut out = self.generators_within(bound);
        out.extend(
            self.central_kinds()
                .iter()
                .map(|&k| BasisVector::central(k)),
        );
        out.sort();
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Generator kind. The declaration order is the canonical print order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    L,
    G,
    I,
    Q,
    C,
    C1,
    C2,
}

impl Kind {
    pub fn is_central(self) -> bool {
        matches!(self, Kind::C | Kind::C1 | Kind::C2)
    }

    pub fn parity(self) -> Parity {
        match self {
            Kind::G | Kind::Q => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Kind::L => "L",
            Kind::G => "G",
            Kind::I => "I",
            Kind::Q => "Q",
            Kind::C => "C",
            Kind::C1 => "C1",
            Kind::C2 => "C2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// `(-1)^(|a||b|)`
    pub fn sign(self, other: Parity) -> i64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1
        } else {
            1
        }
    }

    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A generator index: an integer or half-odd-integer, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index(i64);

impl Index {
    pub const ZERO: Index = Index(0);

    pub fn int(n: i64) -> Index {
        Index(2 * n)
    }

    /// The index `n/2`.
    pub fn half(n: i64) -> Index {
        Index(n)
    }

    pub fn from_twice(t: i64) -> Index {
        Index(t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_rational(self) -> Rational {
        ratio(self.0, 2)
    }

    pub fn from_rational(q: &Rational) -> Option<Index> {
        let twice = q * Rational::from_integer(BigInt::from(2));
        if !twice.is_integer() {
            return None;
        }
        twice.to_integer().try_into().ok().map(Index)
    }

    pub fn abs_le(self, bound: &Rational) -> bool {
        self.to_rational().abs() <= *bound
    }
}

impl std::ops::Add for Index {
    type Output = Index;
    fn add(self, rhs: Index) -> Index {
        Index(self.0 + rhs.0)
    }
}

impl std::ops::Neg for Index {
    type Output = Index;
    fn neg(self) -> Index {
        Index(-self.0)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// One labelled generator. Central kinds always carry index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisVector {
    pub kind: Kind,
    pub index: Index,
}

impl BasisVector {
    pub fn central(kind: Kind) -> BasisVector {
        debug_assert!(kind.is_central());
        BasisVector {
            kind,
            index: Index::ZERO,
        }
    }

    pub fn parity(self) -> Parity {
        self.kind.parity()
    }

    pub fn is_central(self) -> bool {
        self.kind.is_central()
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_central() {
            f.write_str(self.kind.symbol())
        } else {
            write!(f, "{}[{}]", self.kind.symbol(), self.index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("family mismatch: {0} vs {1}")]
    FamilyMismatch(Family, Family),
    #[error("{} is not a generator kind of {family}", kind.symbol())]
    KindNotInFamily { kind: Kind, family: Family },
    #[error("index {index} is not allowed for {} in {family}", kind.symbol())]
    IndexNotInSector {
        kind: Kind,
        index: Index,
        family: Family,
    },
}

/// A finitely supported exact linear combination of basis vectors.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    family: Family,
    terms: BTreeMap<BasisVector, Rational>,
}

impl Element {
    pub fn zero(family: Family) -> Element {
        Element {
            family,
            terms: BTreeMap::new(),
        }
    }

    /// A single basis vector, validated against the family.
    pub fn basis(family: Family, kind: Kind, index: Index) -> Result<Element, AlgebraError> {
        let b = family.basis(kind, index)?;
        Ok(Element::from_basis(family, b))
    }

    pub fn from_basis(family: Family, b: BasisVector) -> Element {
        let mut e = Element::zero(family);
        e.terms.insert(b, Rational::one());
        e
    }

    pub fn from_terms<I>(family: Family, terms: I) -> Result<Element, AlgebraError>
    where
        I: IntoIterator<Item = (BasisVector, Rational)>,
    {
        let mut e = Element::zero(family);
        for (b, c) in terms {
            family.basis(b.kind, b.index)?;
            e.add_term(b, &c);
        }
        Ok(e)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisVector, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, b: &BasisVector) -> Rational {
        self.terms.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * b`. The caller is responsible for `b` belonging to the family.
    pub(crate) fn add_term(&mut self, b: BasisVector, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(b).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    /// `self += k * other`
    pub fn add_scaled(&mut self, other: &Element, k: &Rational) -> Result<(), AlgebraError> {
        self.same_family(other)?;
        if k.is_zero() {
            return Ok(());
        }
        for (b, c) in &other.terms {
            self.add_term(*b, &(c * k));
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one())?;
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> Element {
        if k.is_zero() {
            return Element::zero(self.family);
        }
        Element {
            family: self.family,
            terms: self.terms.iter().map(|(b, c)| (*b, c * k)).collect(),
        }
    }

    pub fn neg(&self) -> Element {
        self.scale(&-Rational::one())
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&BasisVector) -> bool) -> Element {
        Element {
            family: self.family,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| keep(b))
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    pub fn without_central(&self) -> Element {
        self.filter(|b| !b.is_central())
    }

    /// Splits into even and odd parts.
    pub fn parity_decompose(&self) -> (Element, Element) {
        (
            self.filter(|b| b.parity() == Parity::Even),
            self.filter(|b| b.parity() == Parity::Odd),
        )
    }

    /// Parity if the element is homogeneous and nonzero.
    pub fn homogeneous_parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|b| b.parity());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// The scalar `k` with `self = k * other`, if one exists. `other` must be
    /// nonzero.
    pub fn ratio_to(&self, other: &Element) -> Option<Rational> {
        let (b, c) = other.terms.iter().next()?;
        let k = self.coefficient(b) / c;
        (self.family == other.family && *self == other.scale(&k)).then_some(k)
    }

    pub fn max_abs_index(&self) -> Rational {
        self.terms
            .keys()
            .map(|b| b.index.to_rational().abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn same_family(&self, other: &Element) -> Result<(), AlgebraError> {
        if self.family == other.family {
            Ok(())
        } else {
            Err(AlgebraError::FamilyMismatch(self.family, other.family))
        }
    }
}

/// The graded bracket `[x, y]`, extended bilinearly.
pub fn bracket(x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    x.same_family(y)?;
    let family = x.family;
    let mut out = Element::zero(family);
    for (u, a) in &x.terms {
        for (v, b) in &y.terms {
            let coeff = a * b;
            for (w, c) in bracket_basis(family, *u, *v) {
                out.add_term(w, &(c * &coeff));
            }
        }
    }
    Ok(out)
}

/// Bracket of two basis vectors as a list of (basis vector, coefficient).
pub fn bracket_basis(
    family: Family,
    u: BasisVector,
    v: BasisVector,
) -> Vec<(BasisVector, Rational)> {
    if let Some(terms) = listed_product(family, u, v) {
        return terms;
    }
    if let Some(terms) = listed_product(family, v, u) {
        // [u, v] = -(-1)^{|u||v|} [v, u]
        let sign = Rational::from_integer(BigInt::from(-u.parity().sign(v.parity())));
        return terms.into_iter().map(|(w, c)| (w, c * &sign)).collect();
    }
    Vec::new()
}

/// The defining relations, for ordered pairs only. `None` means the pair
/// is not listed in this order.
fn listed_product(
    family: Family,
    u: BasisVector,
    v: BasisVector,
) -> Option<Vec<(BasisVector, Rational)>> {
    use Kind::*;
    let (m, n) = (u.index, v.index);
    let sum = m + n;
    let mq = m.to_rational();
    let nq = n.to_rational();
    let half = ratio(1, 2);
    // (m^3 - m) / 12 when m + n = 0
    let virasoro_cocycle = || (&mq * &mq * &mq - &mq) / Rational::from_integer(BigInt::from(12));
    // (r^2 - 1/4) / 3 when r + s = 0
    let odd_cocycle = || (&mq * &mq - ratio(1, 4)) / Rational::from_integer(BigInt::from(3));
    let gen = |kind: Kind, index: Index| BasisVector { kind, index };
    let lie_c = if family == Family::SW22 { C1 } else { C };

    let mut terms = Vec::new();
    let central = |kind: Kind, c: Rational, terms: &mut Vec<(BasisVector, Rational)>| {
        if sum == Index::ZERO && !c.is_zero() {
            terms.push((BasisVector::central(kind), c));
        }
    };
    match (u.kind, v.kind) {
        (L, L) => {
            terms.push((gen(L, sum), &mq - &nq));
            central(lie_c, virasoro_cocycle(), &mut terms);
        }
        (G, G) if family != Family::Vir => {
            terms.push((gen(L, sum), ratio(2, 1)));
            central(lie_c, odd_cocycle(), &mut terms);
        }
        (L, G) if family != Family::Vir => {
            terms.push((gen(G, sum), &mq * &half - &nq));
        }
        (L, I) if family == Family::SW22 => {
            terms.push((gen(I, sum), &mq - &nq));
            central(C2, virasoro_cocycle(), &mut terms);
        }
        (L, Q) if family == Family::SW22 => {
            terms.push((gen(Q, sum), &mq * &half - &nq));
        }
        (G, Q) if family == Family::SW22 => {
            terms.push((gen(I, sum), ratio(2, 1)));
            central(C2, odd_cocycle(), &mut terms);
        }
        (I, G) if family == Family::SW22 => {
            terms.push((gen(Q, sum), &mq * &half - &nq));
        }
        _ => return None,
    }
    terms.retain(|(_, c)| !c.is_zero());
    Some(terms)
}

/// Convenience constructors used throughout the tests and reproduction runners.
pub mod gens {
    use super::*;

    fn one(family: Family, kind: Kind, index: Index) -> Element {
        Element::basis(family, kind, index).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn l(family: Family, m: i64) -> Element {
        one(family, Kind::L, Index::int(m))
    }
    pub fn i(family: Family, m: i64) -> Element {
        one(family, Kind::I, Index::int(m))
    }
    pub fn g(family: Family, r: i64) -> Element {
        one(family, Kind::G, Index::int(r))
    }
    /// `G_{n/2}`
    pub fn g_half(family: Family, n: i64) -> Element {
        one(family, Kind::G, Index::half(n))
    }
    pub fn q(family: Family, r: i64) -> Element {
        one(family, Kind::Q, Index::int(r))
    }
    pub fn c(family: Family, kind: Kind) -> Element {
        one(family, kind, Index::ZERO)
    }
}
