//! Annihilators of elements inside a finite graded window.
//!
//! A general normal-form superderivation with support in the window is a
//! linear combination of the column generators `ad(b)` (and `D` in SW(2,2)).
//! Applying it to a target gives a linear system in those coefficients;
//! its kernel is the annihilator.
//!
//! The window bounds the support of the inner part only. Images of window
//! generators may reach indices up to twice the bound, and rows are
//! created as they appear. Pick `bound >= 2 * max|index of target| + 2` to
//! be sure the expected kernel members fit; the window is never grown
//! automatically.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{BasisVector, Element, Family};
use crate::derivations::{DerivationError, SuperDerivation};
use crate::linalg::{LabeledMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnihilatorError {
    #[error("target element is zero")]
    ZeroTarget,
    #[error("window bound must be non-negative, got {0}")]
    NegativeBound(Rational),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// Indices `i` with `|i| <= bound` are inside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedWindow {
    bound: Rational,
}

impl GradedWindow {
    pub fn new(bound: Rational) -> Result<Self, AnnihilatorError> {
        if bound.is_negative() {
            return Err(AnnihilatorError::NegativeBound(bound));
        }
        Ok(Self { bound })
    }

    pub fn int(bound: u32) -> Self {
        Self {
            bound: Rational::from_integer(bound.into()),
        }
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn contains(&self, b: &BasisVector) -> bool {
        b.index.abs_le(&self.bound)
    }

    /// Column generators: `ad(b)` for every non-central basis vector inside
    /// the window, then the outer derivation for SW(2,2).
    pub fn generators(&self, family: Family) -> Vec<Generator> {
        let mut out: Vec<Generator> = family
            .generators_within(&self.bound)
            .into_iter()
            .map(Generator::Ad)
            .collect();
        if family == Family::SW22 {
            out.push(Generator::Outer);
        }
        out
    }
}

/// Column tag of an evaluation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Ad(BasisVector),
    Outer,
}

impl Generator {
    pub fn derivation(self, family: Family) -> SuperDerivation {
        match self {
            Generator::Ad(b) => SuperDerivation::inner(Element::from_basis(family, b)),
            Generator::Outer => SuperDerivation::outer(family, Rational::from_integer(1.into()))
                .expect("outer generator only enumerated for SW(2,2)"),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Ad(b) => write!(f, "ad({b})"),
            Generator::Outer => f.write_str("D"),
        }
    }
}

/// Coordinates of `d` over `columns`, or `None` if `d` has support outside them.
pub fn coordinates(d: &SuperDerivation, columns: &[Generator]) -> Option<Vec<Rational>> {
    let mut v = vec![Rational::zero(); columns.len()];
    let mut placed = 0;
    for (i, g) in columns.iter().enumerate() {
        v[i] = match g {
            Generator::Ad(b) => d.inner_part().coefficient(b),
            Generator::Outer => d.outer_lambda().clone(),
        };
        if !v[i].is_zero() {
            placed += 1;
        }
    }
    let support = d.inner_part().len() + usize::from(!d.outer_lambda().is_zero());
    (placed == support).then_some(v)
}

/// Reassembles a coefficient vector over `columns` into a derivation.
pub fn assemble(family: Family, columns: &[Generator], coeffs: &[Rational]) -> SuperDerivation {
    let mut d = SuperDerivation::zero(family);
    for (g, k) in columns.iter().zip(coeffs) {
        if !k.is_zero() {
            d = d
                .add(&g.derivation(family).scale(k))
                .expect("generators share the family");
        }
    }
    d
}

/// Rows: basis vectors occurring in some generator's image of `target`.
/// Columns: the window generators. Entry: the coefficient of the row in
/// `apply(generator, target)`.
pub fn evaluation_matrix(
    target: &Element,
    window: &GradedWindow,
) -> Result<LabeledMatrix<BasisVector, Generator>, AnnihilatorError> {
    if target.is_zero() {
        return Err(AnnihilatorError::ZeroTarget);
    }
    let family = target.family();
    let columns = window.generators(family);
    let mut m = LabeledMatrix::new(columns.clone()).expect("generators are distinct");
    for (col, g) in columns.iter().enumerate() {
        let image = g.derivation(family).apply(target)?;
        for (b, c) in image.terms() {
            m.add_entry(*b, col, c).expect("column in range");
        }
    }
    Ok(m)
}

/// Stacks the evaluation systems of several targets. Row labels are
/// (target position, basis vector). Zero targets contribute no rows.
pub fn joint_evaluation_matrix(
    family: Family,
    targets: &[&Element],
    window: &GradedWindow,
) -> Result<LabeledMatrix<(usize, BasisVector), Generator>, AnnihilatorError> {
    let columns = window.generators(family);
    let mut m = LabeledMatrix::new(columns.clone()).expect("generators are distinct");
    for (col, g) in columns.iter().enumerate() {
        let d = g.derivation(family);
        for (t, target) in targets.iter().enumerate() {
            for (b, c) in d.apply(target)?.terms() {
                m.add_entry((t, *b), col, c).expect("column in range");
            }
        }
    }
    Ok(m)
}

/// The annihilator of `target` inside a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationSpace {
    pub basis: Vec<SuperDerivation>,
    pub window: GradedWindow,
    pub target: Element,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether `d` lies in the span of the basis. Members with support
    /// outside the window are never contained.
    pub fn contains(&self, d: &SuperDerivation) -> bool {
        let columns = self.window.generators(self.target.family());
        let Some(v) = coordinates(d, &columns) else {
            return false;
        };
        let rows: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| coordinates(b, &columns).expect("basis lies in the window"))
            .collect();
        let base = LabeledMatrix::from_dense(&rows, columns.len()).rank();
        let mut extended = rows;
        extended.push(v);
        LabeledMatrix::from_dense(&extended, columns.len()).rank() == base
    }
}

/// Canonical (reduced echelon) basis of the superderivations supported in
/// `window` that kill `target`.
pub fn annihilator_basis(
    target: &Element,
    window: &GradedWindow,
) -> Result<DerivationSpace, AnnihilatorError> {
    let m = evaluation_matrix(target, window)?;
    let family = target.family();
    let basis = m
        .kernel_basis()
        .iter()
        .map(|v| assemble(family, m.col_labels(), v))
        .collect();
    Ok(DerivationSpace {
        basis,
        window: window.clone(),
        target: target.clone(),
    })
}

/// Basis of the superderivations in `window` killing every target at once.
pub fn common_annihilator(
    family: Family,
    targets: &[&Element],
    window: &GradedWindow,
) -> Result<Vec<SuperDerivation>, AnnihilatorError> {
    let m = joint_evaluation_matrix(family, targets, window)?;
    Ok(m.kernel_basis()
        .iter()
        .map(|v| assemble(family, m.col_labels(), v))
        .collect())
}

/// A superderivation supported in `window` with `d(x) = want` for every
/// constraint `(x, want)`, if one exists. Among all solutions the one with
/// zero free coordinates is returned, so the answer is deterministic.
pub fn fit_derivation(
    family: Family,
    constraints: &[(Element, Element)],
    window: &GradedWindow,
) -> Result<Option<SuperDerivation>, AnnihilatorError> {
    let targets: Vec<&Element> = constraints.iter().map(|(x, _)| x).collect();
    let m = joint_evaluation_matrix(family, &targets, window)?;
    let mut rhs = BTreeMap::new();
    for (t, (_, want)) in constraints.iter().enumerate() {
        for (b, c) in want.terms() {
            rhs.insert((t, *b), c.clone());
        }
    }
    Ok(m.solve(&rhs)
        .map(|coeffs| assemble(family, m.col_labels(), &coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gens::*;
    use crate::algebra::{Index, Kind};
    use crate::linalg::{rat, ratio};

    #[test]
    fn evaluation_matrix_for_g2() {
        let f = Family::SVir0;
        let m = evaluation_matrix(&g(f, 2), &GradedWindow::int(6)).unwrap();
        let cols = m.col_labels().to_vec();
        for (col, gen) in cols.iter().enumerate() {
            let Generator::Ad(b) = gen else {
                unreachable!()
            };
            if b.kind != Kind::L {
                continue;
            }
            let k = b.index;
            let entries = m.column(col);
            if k == Index::int(4) {
                assert!(entries.is_empty());
            } else {
                let row = f.basis(Kind::G, k + Index::int(2)).unwrap();
                let want = k.to_rational() / rat(2) - rat(2);
                assert_eq!(entries, vec![(row, want)]);
            }
        }
    }

    #[test]
    fn central_target_gives_zero_columns() {
        let f = Family::SVir0;
        let m = evaluation_matrix(&c(f, Kind::C), &GradedWindow::int(3)).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(
            annihilator_basis(&c(f, Kind::C), &GradedWindow::int(3))
                .unwrap()
                .dim(),
            m.ncols()
        );
    }

    #[test]
    fn outer_column_on_i0_q0() {
        let f = Family::SW22;
        let target = i(f, 0).add(&q(f, 0)).unwrap();
        let m = evaluation_matrix(&target, &GradedWindow::int(1)).unwrap();
        let col = m
            .col_labels()
            .iter()
            .position(|g| *g == Generator::Outer)
            .unwrap();
        let rows: Vec<(BasisVector, Rational)> = m.column(col);
        let want = vec![
            (f.basis(Kind::I, Index::ZERO).unwrap(), rat(1)),
            (f.basis(Kind::Q, Index::ZERO).unwrap(), rat(1)),
        ];
        let mut rows = rows;
        rows.sort();
        assert_eq!(rows, want);
    }

    #[test]
    fn zero_target_rejected() {
        let err =
            annihilator_basis(&Element::zero(Family::SVir0), &GradedWindow::int(2)).unwrap_err();
        assert_eq!(err, AnnihilatorError::ZeroTarget);
        assert!(GradedWindow::new(rat(-1)).is_err());
    }

    #[test]
    fn annihilator_of_g2_is_ad_l4() {
        let f = Family::SVir0;
        let space = annihilator_basis(&g(f, 2), &GradedWindow::int(6)).unwrap();
        assert_eq!(space.basis, vec![SuperDerivation::inner(l(f, 4))]);
    }

    #[test]
    fn annihilator_of_sw22_g1() {
        let f = Family::SW22;
        let space = annihilator_basis(&g(f, 1), &GradedWindow::int(4)).unwrap();
        assert_eq!(
            space.basis,
            vec![
                SuperDerivation::inner(l(f, 2)),
                SuperDerivation::inner(i(f, 2)),
                SuperDerivation::outer(f, rat(1)).unwrap(),
            ]
        );
    }

    #[test]
    fn annihilator_of_i0_plus_q0() {
        let f = Family::SW22;
        let target = i(f, 0).add(&q(f, 0)).unwrap();
        let space = annihilator_basis(&target, &GradedWindow::int(2)).unwrap();
        assert_eq!(space.dim(), 12);
        let mut want = vec![
            SuperDerivation::inner(l(f, 0)),
            SuperDerivation::inner(l(f, 1).sub(&g(f, 1).scale(&ratio(1, 2))).unwrap()),
        ];
        want.extend((-2..=2).map(|k| SuperDerivation::inner(i(f, k))));
        want.extend((-2..=2).map(|k| SuperDerivation::inner(q(f, k))));
        assert_eq!(space.basis, want);
    }

    #[test]
    fn fit_recovers_inner_action() {
        let f = Family::SVir0;
        let d = SuperDerivation::inner(l(f, 1).add(&g(f, -1)).unwrap());
        let anchors = [g(f, 0), g(f, 1)];
        let constraints: Vec<(Element, Element)> = anchors
            .iter()
            .map(|a| (a.clone(), d.apply(a).unwrap()))
            .collect();
        let fit = fit_derivation(f, &constraints, &GradedWindow::int(4))
            .unwrap()
            .unwrap();
        for a in &anchors {
            assert_eq!(fit.apply(a).unwrap(), d.apply(a).unwrap());
        }
        // G_0 -> G_0 is not achievable by any derivation.
        let bad = [(g(f, 0), g(f, 0))];
        assert!(fit_derivation(f, &bad, &GradedWindow::int(4))
            .unwrap()
            .is_none());
    }

    #[test]
    fn containment_by_rank() {
        let f = Family::SW22;
        let space = annihilator_basis(&g(f, 1), &GradedWindow::int(4)).unwrap();
        let combo =
            SuperDerivation::new(l(f, 2).add(&i(f, 2).scale(&rat(3))).unwrap(), rat(-2)).unwrap();
        assert!(space.contains(&combo));
        assert!(!space.contains(&SuperDerivation::inner(l(f, 1))));
        assert!(!space.contains(&SuperDerivation::inner(l(f, 9))));
    }
}
