use thiserror::Error;

use crate::hom::Height;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    CtxMismatch,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("characteristic {p} exceeds the configured bound {max}")]
    PrimeTooLarge { p: u32, max: u32 },
    #[error("{what} of size {size} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        size: u64,
        bound: u64,
    },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("no irreducible polynomial of degree {degree} found over GF({p})")]
    NoIrreducibleFound { p: u32, degree: u32 },
    #[error("invalid element encoding: {0}")]
    BadElement(String),

    #[error("series have different numbers of variables")]
    ArityMismatch,
    #[error("substituted series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("series is not a unit (zero constant term)")]
    NonUnit,
    #[error("exponent of total degree {degree} is beyond precision {prec}")]
    PrecisionExceeded { degree: usize, prec: usize },

    #[error("the Weierstrass equation is singular (discriminant is zero)")]
    SingularCurve,
    #[error("insufficient precision: need {needed}, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },
    #[error("homomorphisms connect different formal group laws")]
    LawMismatch,
    #[error("the isogeny does not fix the origin (0,1,0)")]
    OriginNotFixed,
    #[error("series is not a homomorphism: identity fails at monomial {0:?}")]
    NotAHomomorphism(Vec<u32>),
    #[error("isogeny polynomials are not homogeneous of one common degree")]
    NotHomogeneous,

    #[error("hypothesis of the chart formula failed: {0}")]
    HypothesisFailed(&'static str),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("height {0} is outside {{1, 2}}")]
    HeightOutOfRange(Height),
    #[error("point count and formal group disagree: {0}")]
    Inconsistent(String),

    #[error("formal group laws have different heights ({0} vs {1})")]
    HeightMismatch(Height, Height),
    #[error("index {0} is not valid for this relation")]
    BadIndex(usize),
    #[error("no unit binomial coefficient for index {0}")]
    NoUnitBinomial(usize),
    #[error("relation at index {0} has a residual that no choice of u_i cancels")]
    RelationInconsistent(usize),
    #[error("enumeration exceeds the budget of {0} solutions")]
    BudgetExceeded(usize),
    #[error("no branch of the extension survives at index {0}")]
    NoBranchSurvives(usize),
    #[error("p-power relation at index {0} has no root in the solve field")]
    RootsOutsideField(usize),
    #[error("rationality filter requires formal group laws of height one")]
    HeightNotOne,
}
