//! JSON documents exchanged by the command-line tool.
//!
//! Field elements are coefficient arrays `[e0, .., e_(n-1)]` over GF(p) in
//! the polynomial basis of the field's modulus.

use serde::{Deserialize, Serialize};

use crate::couveignes::Enumeration;
use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldCtx};
use crate::formal_group::{Axiom, AxiomReport, WeierstrassCurve};
use crate::hom::{FglHom, HomogeneousPoly, Isogeny};
use crate::series::TruncSeries;

pub type ElemDoc = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub p: u32,
    pub n: u32,
    /// `[c0, .., cn]` with `cn = 1`.
    pub modulus: Vec<u32>,
}

impl FieldDoc {
    pub fn from_field(field: &Field) -> Self {
        FieldDoc {
            p: field.characteristic(),
            n: field.degree(),
            modulus: field.modulus().to_vec(),
        }
    }

    pub fn to_field(&self) -> Result<Field> {
        FieldCtx::new(self.p, self.n, Some(self.modulus.clone()))
    }
}

pub fn elem_doc(field: &Field, a: Elem) -> ElemDoc {
    field.digits(a)
}

pub fn parse_elem(field: &Field, doc: &[u32]) -> Result<Elem> {
    if doc.len() != field.degree() as usize {
        return Err(Error::BadElement(format!(
            "expected {} coefficients, got {}",
            field.degree(),
            doc.len()
        )));
    }
    field.from_digits(doc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    pub field: FieldDoc,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: Vec<ElemDoc>,
}

impl CurveDoc {
    pub fn from_curve(curve: &WeierstrassCurve) -> Self {
        let f = curve.field();
        CurveDoc {
            field: FieldDoc::from_field(f),
            a: curve.coeffs().iter().map(|&c| elem_doc(f, c)).collect(),
        }
    }

    pub fn to_curve(&self) -> Result<WeierstrassCurve> {
        let field = self.field.to_field()?;
        self.to_curve_over(&field)
    }

    /// Reads the coefficients into an existing field, which must match the
    /// document's field description.
    pub fn to_curve_over(&self, field: &Field) -> Result<WeierstrassCurve> {
        if FieldDoc::from_field(field) != self.field {
            return Err(Error::CtxMismatch);
        }
        if self.a.len() != 5 {
            return Err(Error::BadElement(format!(
                "expected 5 curve coefficients, got {}",
                self.a.len()
            )));
        }
        let mut a = [Elem::ZERO; 5];
        for (slot, doc) in a.iter_mut().zip(&self.a) {
            *slot = parse_elem(field, doc)?;
        }
        WeierstrassCurve::new(field, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub e: Vec<u32>,
    pub c: ElemDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub vars: usize,
    pub prec: usize,
    /// Nonzero terms by total degree, then lexicographic exponent.
    pub terms: Vec<TermDoc>,
}

impl SeriesDoc {
    pub fn from_series(s: &TruncSeries) -> Self {
        let f = s.field();
        let k = s.nvars();
        SeriesDoc {
            vars: k,
            prec: s.prec(),
            terms: s
                .terms()
                .map(|(e, c)| TermDoc {
                    e: e[..k].to_vec(),
                    c: elem_doc(f, c),
                })
                .collect(),
        }
    }

    pub fn to_series(&self, field: &Field) -> Result<TruncSeries> {
        if !(1..=3).contains(&self.vars) {
            return Err(Error::ArityMismatch);
        }
        let mut s = TruncSeries::zero(field, self.vars, self.prec);
        for t in &self.terms {
            if t.e.len() != self.vars {
                return Err(Error::ArityMismatch);
            }
            s.set_coeff(&t.e, parse_elem(field, &t.c)?)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    #[serde(rename = "U")]
    pub u: SeriesDoc,
    /// A number, or the string "inf" for a series that is zero to precision.
    pub height: serde_json::Value,
    pub separable: bool,
    pub checked_to_degree: usize,
}

impl HomDoc {
    pub fn from_hom(hom: &FglHom) -> Self {
        let height = match hom.height() {
            Ok(crate::hom::Height::Finite(h)) => serde_json::Value::from(h),
            Ok(crate::hom::Height::Infinite) => serde_json::Value::from("inf"),
            Err(_) => serde_json::Value::Null,
        };
        HomDoc {
            u: SeriesDoc::from_series(hom.series()),
            height,
            separable: hom.is_separable(),
            checked_to_degree: hom.checked_to(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailingDoc {
    pub axiom: String,
    pub e: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomDoc {
    pub identity_ok: bool,
    pub commutative_ok: bool,
    pub associative_ok: bool,
    pub failing_monomial: Option<FailingDoc>,
    pub checked_to: usize,
}

impl AxiomDoc {
    pub fn from_report(r: &AxiomReport) -> Self {
        AxiomDoc {
            identity_ok: r.identity_ok,
            commutative_ok: r.commutative_ok,
            associative_ok: r.associative_ok,
            failing_monomial: r.failing_monomial.as_ref().map(|(a, e)| FailingDoc {
                axiom: match a {
                    Axiom::Identity => "identity",
                    Axiom::Commutativity => "commutativity",
                    Axiom::Associativity => "associativity",
                }
                .into(),
                e: e.clone(),
            }),
            checked_to: r.checked_to,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDoc {
    pub bound: usize,
    pub solve_field_degree: u32,
    pub solutions: Vec<Vec<ElemDoc>>,
    pub splitting_deficit: usize,
}

impl SolveDoc {
    pub fn from_enumeration(e: &Enumeration) -> Self {
        SolveDoc {
            bound: e.bound,
            solve_field_degree: e.solve_degree,
            solutions: e
                .solutions
                .iter()
                .map(|s| s.iter().map(|&c| elem_doc(&e.field, c)).collect())
                .collect(),
            splitting_deficit: e.splitting_deficit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub degree: u32,
    pub terms: Vec<TermDoc>,
}

/// An isogeny file: source and target curves and the polynomials
/// `f1, f2, f3` in `X, Y, Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsogenyDoc {
    pub source: CurveDoc,
    pub target: CurveDoc,
    pub f: Vec<PolyDoc>,
}

impl IsogenyDoc {
    pub fn from_isogeny(iso: &Isogeny) -> Self {
        let field = iso.source.field();
        IsogenyDoc {
            source: CurveDoc::from_curve(&iso.source),
            target: CurveDoc::from_curve(&iso.target),
            f: iso
                .f
                .iter()
                .map(|g| PolyDoc {
                    degree: g.degree(),
                    terms: g
                        .terms()
                        .iter()
                        .map(|(e, c)| TermDoc {
                            e: e.to_vec(),
                            c: elem_doc(field, *c),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_isogeny(&self) -> Result<Isogeny> {
        let source = self.source.to_curve()?;
        let field = source.field().clone();
        let target = self.target.to_curve_over(&field)?;
        if self.f.len() != 3 {
            return Err(Error::BadElement(format!(
                "expected 3 polynomials, got {}",
                self.f.len()
            )));
        }
        let mut polys = Vec::with_capacity(3);
        for p in &self.f {
            let mut terms = Vec::with_capacity(p.terms.len());
            for t in &p.terms {
                let e: [u32; 3] =
                    t.e.as_slice()
                        .try_into()
                        .map_err(|_| Error::ArityMismatch)?;
                terms.push((e, parse_elem(&field, &t.c)?));
            }
            polys.push(HomogeneousPoly::new(&field, p.degree, terms)?);
        }
        let f: [HomogeneousPoly; 3] = polys.try_into().expect("length checked");
        Isogeny::new(source, target, f)
    }
}

/// Compact JSON, the form written by the command-line tool.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("documents always serialize")
}
