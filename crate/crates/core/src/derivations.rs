//! Superderivations in normal form `ad(a) + λ·D`, plus raw linear maps
//! for feeding non-derivations through the same checks.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{bracket, AlgebraError, BasisVector, Element, Family, Kind, Parity};
use crate::linalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0} has no outer derivation")]
    NoOuterDerivation(Family),
}

/// `ad(inner) + outer_lambda · D`, where `D` is the outer derivation of
/// SW(2,2) fixing `I_m`, `Q_r`, `C_2` and killing `L_m`, `G_r`, `C_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperDerivation {
    family: Family,
    inner: Element,
    outer_lambda: Rational,
}

impl SuperDerivation {
    pub fn new(inner: Element, outer_lambda: Rational) -> Result<Self, DerivationError> {
        let family = inner.family();
        if !outer_lambda.is_zero() && family != Family::SW22 {
            return Err(DerivationError::NoOuterDerivation(family));
        }
        Ok(Self {
            family,
            inner: inner.without_central(),
            outer_lambda,
        })
    }

    /// `ad(inner)`. Central terms are dropped since they act as zero.
    pub fn inner(inner: Element) -> Self {
        Self {
            family: inner.family(),
            inner: inner.without_central(),
            outer_lambda: Rational::zero(),
        }
    }

    pub fn outer(family: Family, lambda: Rational) -> Result<Self, DerivationError> {
        Self::new(Element::zero(family), lambda)
    }

    pub fn zero(family: Family) -> Self {
        Self::inner(Element::zero(family))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn inner_part(&self) -> &Element {
        &self.inner
    }

    pub fn outer_lambda(&self) -> &Rational {
        &self.outer_lambda
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero() && self.outer_lambda.is_zero()
    }

    /// Same inner part, outer coefficient dropped.
    pub fn inner_only(&self) -> Self {
        Self::inner(self.inner.clone())
    }

    pub fn apply(&self, x: &Element) -> Result<Element, DerivationError> {
        let mut out = bracket(&self.inner, x)?;
        if !self.outer_lambda.is_zero() {
            out.add_scaled(&outer_action(x), &self.outer_lambda)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, DerivationError> {
        Ok(Self {
            family: self.family,
            inner: self.inner.add(&other.inner)?,
            outer_lambda: &self.outer_lambda + &other.outer_lambda,
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            family: self.family,
            inner: self.inner.scale(k),
            outer_lambda: &self.outer_lambda * k,
        }
    }

    /// Splits into the even part (even inner terms and the outer
    /// coefficient, since `D` preserves parity) and the odd part.
    pub fn parity_components(&self) -> (Self, Self) {
        let (even, odd) = self.inner.parity_decompose();
        (
            Self {
                family: self.family,
                inner: even,
                outer_lambda: self.outer_lambda.clone(),
            },
            Self::inner(odd),
        )
    }
}

/// The outer derivation `D` of SW(2,2) applied to `x`.
pub fn outer_action(x: &Element) -> Element {
    x.filter(|b| matches!(b.kind, Kind::I | Kind::Q | Kind::C2))
}

/// A linear map given by its values on finitely many basis vectors; every
/// other basis vector maps to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLinearMap {
    family: Family,
    table: BTreeMap<BasisVector, Element>,
}

impl RawLinearMap {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            table: BTreeMap::new(),
        }
    }

    pub fn from_table(
        family: Family,
        table: BTreeMap<BasisVector, Element>,
    ) -> Result<Self, DerivationError> {
        for (b, img) in &table {
            family.basis(b.kind, b.index)?;
            if img.family() != family {
                return Err(AlgebraError::FamilyMismatch(family, img.family()).into());
            }
        }
        let table = table
            .into_iter()
            .filter(|(_, img)| !img.is_zero())
            .collect();
        Ok(Self { family, table })
    }

    /// Builds the map sending each basis vector in `domain` to `f(b)`.
    pub fn from_fn(
        family: Family,
        domain: &[BasisVector],
        f: impl Fn(BasisVector) -> Element,
    ) -> Self {
        let table = domain
            .iter()
            .map(|&b| (b, f(b)))
            .filter(|(_, img)| !img.is_zero())
            .collect();
        Self { family, table }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn table(&self) -> &BTreeMap<BasisVector, Element> {
        &self.table
    }

    pub fn apply(&self, x: &Element) -> Result<Element, DerivationError> {
        if x.family() != self.family {
            return Err(AlgebraError::FamilyMismatch(self.family, x.family()).into());
        }
        let mut out = Element::zero(self.family);
        for (b, c) in x.terms() {
            if let Some(img) = self.table.get(b) {
                out.add_scaled(img, c)?;
            }
        }
        Ok(out)
    }

    /// Splits into the parity-preserving and parity-reversing parts.
    pub fn parity_components(&self) -> (Self, Self) {
        let mut even = Self::new(self.family);
        let mut odd = Self::new(self.family);
        for (b, img) in &self.table {
            let p = b.parity();
            let same = img.filter(|w| w.parity() == p);
            let flipped = img.filter(|w| w.parity() != p);
            if !same.is_zero() {
                even.table.insert(*b, same);
            }
            if !flipped.is_zero() {
                odd.table.insert(*b, flipped);
            }
        }
        (even, odd)
    }
}

/// Either kind of local map an oracle may hand back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalMap {
    Derivation(SuperDerivation),
    Raw(RawLinearMap),
}

impl LocalMap {
    pub fn family(&self) -> Family {
        match self {
            LocalMap::Derivation(d) => d.family(),
            LocalMap::Raw(m) => m.family(),
        }
    }

    pub fn apply(&self, x: &Element) -> Result<Element, DerivationError> {
        match self {
            LocalMap::Derivation(d) => d.apply(x),
            LocalMap::Raw(m) => m.apply(x),
        }
    }

    fn parity_components(&self) -> [(Parity, LocalMap); 2] {
        match self {
            LocalMap::Derivation(d) => {
                let (e, o) = d.parity_components();
                [
                    (Parity::Even, LocalMap::Derivation(e)),
                    (Parity::Odd, LocalMap::Derivation(o)),
                ]
            }
            LocalMap::Raw(m) => {
                let (e, o) = m.parity_components();
                [
                    (Parity::Even, LocalMap::Raw(e)),
                    (Parity::Odd, LocalMap::Raw(o)),
                ]
            }
        }
    }
}

impl From<SuperDerivation> for LocalMap {
    fn from(d: SuperDerivation) -> Self {
        LocalMap::Derivation(d)
    }
}

impl From<RawLinearMap> for LocalMap {
    fn from(m: RawLinearMap) -> Self {
        LocalMap::Raw(m)
    }
}

/// `d[x,y] − Σ ([d_p x_q, y] + (−1)^{pq} [x_q, d_p y])`, summed over the
/// homogeneous components `d_p` of `d` and `x_q` of `x`.
///
/// Zero exactly when `d` satisfies the super-Leibniz rule on `(x, y)`.
pub fn leibniz_defect(d: &LocalMap, x: &Element, y: &Element) -> Result<Element, DerivationError> {
    let family = d.family();
    for e in [x, y] {
        if e.family() != family {
            return Err(AlgebraError::FamilyMismatch(family, e.family()).into());
        }
    }
    let mut defect = d.apply(&bracket(x, y)?)?;
    let (x_even, x_odd) = x.parity_decompose();
    let minus = -Rational::one();
    for (p, dp) in d.parity_components() {
        for (q, xq) in [(Parity::Even, &x_even), (Parity::Odd, &x_odd)] {
            if xq.is_zero() {
                continue;
            }
            defect.add_scaled(&bracket(&dp.apply(xq)?, y)?, &minus)?;
            let sign = Rational::from_integer((-p.sign(q)).into());
            defect.add_scaled(&bracket(xq, &dp.apply(y)?)?, &sign)?;
        }
    }
    Ok(defect)
}
