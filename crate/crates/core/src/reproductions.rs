//! Built-in reproductions of the annihilator and derivation facts that the
//! globalization argument rests on. Each run reports one case per
//! parameter value and an overall verdict.

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::algebra::gens::*;
use crate::algebra::{Element, Family, Index, Kind};
use crate::annihilator::{annihilator_basis, AnnihilatorError, GradedWindow};
use crate::derivations::{leibniz_defect, DerivationError, LocalMap, SuperDerivation};
use crate::linalg::{rat, ratio};
use crate::two_local::Verdict;

pub const NAMES: [&str; 5] = [
    "lemma3.3",
    "lemma4.4i",
    "lemma4.4ii",
    "lemma4.7",
    "lemma4.1-derivation",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub fields: Vec<(&'static str, Value)>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub cases: Vec<Case>,
    pub verdict: Verdict,
}

impl Report {
    fn new(name: &str, cases: Vec<Case>) -> Self {
        let verdict = if cases.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.to_string(),
            cases,
            verdict,
        }
    }

    pub fn to_json_value(&self) -> Value {
        let cases: Vec<Value> = self
            .cases
            .iter()
            .map(|c| {
                let mut m = Map::new();
                for (k, v) in &c.fields {
                    m.insert((*k).to_string(), v.clone());
                }
                m.insert("pass".into(), Value::Bool(c.pass));
                Value::Object(m)
            })
            .collect();
        json!({ "name": self.name, "cases": cases, "verdict": self.verdict })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let fields: Vec<String> = c.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "{} {}\n",
                if c.pass { "ok  " } else { "FAIL" },
                fields.join(" ")
            ));
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.name,
            if self.verdict == Verdict::Pass {
                "pass"
            } else {
                "fail"
            }
        ));
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReproductionError {
    #[error("unknown reproduction {0:?}; expected one of {list}", list = NAMES.join(", "))]
    Unknown(String),
    #[error("{name} does not apply to {family}")]
    WrongFamily { name: String, family: Family },
    #[error(transparent)]
    Annihilator(#[from] AnnihilatorError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// Runs a named reproduction. `family` only matters for `lemma3.3`, which
/// accepts `svir0` (integer `i`) and `svir12` (half-integer `i`).
pub fn run(name: &str, family: Family) -> Result<Report, ReproductionError> {
    match name {
        "lemma3.3" => g_annihilators(family),
        "lemma4.4i" => sw22_g_annihilators(),
        "lemma4.4ii" => i0_q0_annihilators(&[2, 3, 4]),
        "lemma4.7" => mixed_annihilators(&[-3, -1, 1, 3]),
        "lemma4.1-derivation" => outer_is_derivation(3),
        _ => Err(ReproductionError::Unknown(name.to_string())),
    }
}

fn index_value(i: Index) -> Value {
    if i.is_integer() {
        json!(i.twice() / 2)
    } else {
        json!(i.to_string())
    }
}

fn window_for(target_index: Index) -> GradedWindow {
    let bound = target_index.to_rational().abs() * rat(2) + rat(2);
    GradedWindow::new(bound).expect("non-negative")
}

/// Annihilator of `G_i` is `span{ad(L_{2i})}`, bound `2|i| + 2`.
pub fn g_annihilators(family: Family) -> Result<Report, ReproductionError> {
    let indices: Vec<Index> = match family {
        Family::SVir0 => (-3..=3).map(Index::int).collect(),
        Family::SVir12 => (-5..=5).step_by(2).map(Index::half).collect(),
        _ => {
            return Err(ReproductionError::WrongFamily {
                name: "lemma3.3".into(),
                family,
            })
        }
    };
    let mut cases = Vec::new();
    for i in indices {
        let target = Element::basis(family, Kind::G, i).expect("legal index");
        let space = annihilator_basis(&target, &window_for(i))?;
        let want = SuperDerivation::inner(Element::basis(family, Kind::L, i + i).expect("integer"));
        cases.push(Case {
            fields: vec![("i", index_value(i)), ("dim", json!(space.dim()))],
            pass: space.basis == vec![want],
        });
    }
    Ok(Report::new("lemma3.3", cases))
}

/// In SW(2,2), annihilator of `G_r` is `span{ad(L_{2r}), ad(I_{2r}), D}`.
pub fn sw22_g_annihilators() -> Result<Report, ReproductionError> {
    let f = Family::SW22;
    let mut cases = Vec::new();
    for r in -2..=2 {
        let space = annihilator_basis(&g(f, r), &window_for(Index::int(r)))?;
        let want = vec![
            SuperDerivation::inner(l(f, 2 * r)),
            SuperDerivation::inner(i(f, 2 * r)),
            SuperDerivation::outer(f, rat(1))?,
        ];
        cases.push(Case {
            fields: vec![("r", json!(r)), ("dim", json!(space.dim()))],
            pass: space.basis == want,
        });
    }
    Ok(Report::new("lemma4.4i", cases))
}

/// Annihilator of `I_0 + Q_0` in window `W`: dimension `4W + 4`, contains
/// `ad(L_0)` and `ad(L_1 - G_1/2)`, and no member has an outer part.
pub fn i0_q0_annihilators(bounds: &[u32]) -> Result<Report, ReproductionError> {
    let f = Family::SW22;
    let target = i(f, 0).add(&q(f, 0)).expect("same family");
    let l1_g1 = SuperDerivation::inner(
        l(f, 1)
            .sub(&g(f, 1).scale(&ratio(1, 2)))
            .expect("same family"),
    );
    let mut cases = Vec::new();
    for &w in bounds {
        let space = annihilator_basis(&target, &GradedWindow::int(w))?;
        let no_outer = space.basis.iter().all(|d| d.outer_lambda().is_zero());
        let pass = space.dim() == 4 * w as usize + 4
            && space.contains(&SuperDerivation::inner(l(f, 0)))
            && space.contains(&l1_g1)
            && no_outer;
        cases.push(Case {
            fields: vec![
                ("bound", json!(w)),
                ("dim", json!(space.dim())),
                ("outer_free", json!(no_outer)),
            ],
            pass,
        });
    }
    Ok(Report::new("lemma4.4ii", cases))
}

/// Annihilator of `L_p + I_{2p} + Q_{2p}` (bound `3|p|`) is spanned by
/// `ad(L_p + I_{2p} + Q_{2p})` and `ad(I_p)`.
pub fn mixed_annihilators(ps: &[i64]) -> Result<Report, ReproductionError> {
    let f = Family::SW22;
    let mut cases = Vec::new();
    for &p in ps {
        let target = l(f, p)
            .add(&i(f, 2 * p))
            .and_then(|x| x.add(&q(f, 2 * p)))
            .expect("same family");
        let bound = u32::try_from(3 * p.unsigned_abs()).expect("small index");
        let space = annihilator_basis(&target, &GradedWindow::int(bound))?;
        let pass = space.dim() == 2
            && space.contains(&SuperDerivation::inner(target.clone()))
            && space.contains(&SuperDerivation::inner(i(f, p)));
        cases.push(Case {
            fields: vec![("p", json!(p)), ("dim", json!(space.dim()))],
            pass,
        });
    }
    Ok(Report::new("lemma4.7", cases))
}

/// The outer derivation satisfies the super-Leibniz rule on every pair of
/// SW(2,2) basis vectors with `|index| <= bound`. One case per left kind.
pub fn outer_is_derivation(bound: u32) -> Result<Report, ReproductionError> {
    let f = Family::SW22;
    let d = LocalMap::Derivation(SuperDerivation::outer(f, rat(1))?);
    let basis = f.basis_within(&rat(i64::from(bound)));
    let mut cases = Vec::new();
    for &kind in f.kinds() {
        let mut pairs = 0usize;
        let mut violations = 0usize;
        for x in basis.iter().filter(|b| b.kind == kind) {
            for y in &basis {
                pairs += 1;
                let defect =
                    leibniz_defect(&d, &Element::from_basis(f, *x), &Element::from_basis(f, *y))?;
                if !defect.is_zero() {
                    violations += 1;
                }
            }
        }
        cases.push(Case {
            fields: vec![
                ("kind", json!(kind.symbol())),
                ("pairs", json!(pairs)),
                ("violations", json!(violations)),
            ],
            pass: violations == 0,
        });
    }
    Ok(Report::new("lemma4.1-derivation", cases))
}
