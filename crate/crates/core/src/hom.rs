//! Homomorphisms between formal group laws and their heights.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{ensure_same, same_field, Elem, Field};
use crate::formal_group::mult_by_n;
use crate::formal_group::{group_law, s_expansion, twist_p_pow, FormalGroupLaw, WeierstrassCurve};
use crate::series::TruncSeries;

/// Height of a homomorphism. `Infinite` means "zero to the available
/// precision".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    pub fn finite(self) -> Option<u32> {
        match self {
            Height::Finite(h) => Some(h),
            Height::Infinite => None,
        }
    }

    pub fn plus(self, other: Height) -> Height {
        match (self, other) {
            (Height::Finite(a), Height::Finite(b)) => Height::Finite(a + b),
            _ => Height::Infinite,
        }
    }
}

impl PartialOrd for Height {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Height {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Height::Finite(a), Height::Finite(b)) => a.cmp(b),
            (Height::Finite(_), Height::Infinite) => Ordering::Less,
            (Height::Infinite, Height::Finite(_)) => Ordering::Greater,
            (Height::Infinite, Height::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::Infinite => f.write_str("inf"),
        }
    }
}

fn p_adic_valuation(mut e: u32, p: u32) -> u32 {
    let mut v = 0;
    while e.is_multiple_of(p) {
        e /= p;
        v += 1;
    }
    v
}

/// Largest `h` such that `u` is a series in `t^(p^h)`, judged from the
/// nonzero coefficients below precision.
pub fn series_height(u: &TruncSeries) -> Result<Height> {
    let p = u.field().characteristic();
    let h = u.terms().map(|(e, _)| p_adic_valuation(e[0], p)).min();
    match h {
        Some(h) => Ok(Height::Finite(h)),
        None => {
            let needed = (p * p + 1) as usize;
            if u.prec() < needed {
                Err(Error::InsufficientPrecision {
                    needed,
                    available: u.prec(),
                })
            } else {
                Ok(Height::Infinite)
            }
        }
    }
}

/// Height of the law: the height of `[p]`.
pub fn law_height(law: &FormalGroupLaw) -> Result<Height> {
    let p = law.field().characteristic();
    series_height(&mult_by_n(law, p as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCheck {
    pub ok: bool,
    pub failing_monomial: Option<Vec<u32>>,
    pub checked_to: usize,
}

/// Checks `U(F(X,Y)) = F'(U(X), U(Y))` below total degree `to`.
pub fn check_hom(
    u: &TruncSeries,
    source: &FormalGroupLaw,
    target: &FormalGroupLaw,
    to: usize,
) -> Result<HomCheck> {
    ensure_same(u.field(), source.field())?;
    ensure_same(u.field(), target.field())?;
    if u.nvars() != 1 {
        return Err(Error::ArityMismatch);
    }
    if !u.has_zero_constant_term() {
        return Err(Error::NonzeroConstantTerm);
    }
    let available = u.prec().min(source.prec()).min(target.prec());
    if available < to {
        return Err(Error::InsufficientPrecision {
            needed: to,
            available,
        });
    }
    let u = u.truncate(to);
    let left = u.compose(&[source.series().truncate(to)])?.truncate(to);
    let ux = u.rename_vars(2, &[0]);
    let uy = u.rename_vars(2, &[1]);
    let right = target
        .series()
        .truncate(to)
        .compose(&[ux, uy])?
        .truncate(to);
    let diff = &left - &right;
    let failing_monomial = diff.terms().next().map(|(e, _)| e[..2].to_vec());
    Ok(HomCheck {
        ok: failing_monomial.is_none(),
        failing_monomial,
        checked_to: to,
    })
}

/// Two laws agree on their common precision.
pub fn laws_match(a: &FormalGroupLaw, b: &FormalGroupLaw) -> bool {
    let n = a.prec().min(b.prec());
    same_field(a.field(), b.field()) && a.series().truncate(n) == b.series().truncate(n)
}

/// A homomorphism `source -> target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FglHom {
    source: FormalGroupLaw,
    target: FormalGroupLaw,
    u: TruncSeries,
    checked_to: usize,
}

impl FglHom {
    /// Checks the homomorphism identity to the common precision.
    pub fn new(u: TruncSeries, source: &FormalGroupLaw, target: &FormalGroupLaw) -> Result<Self> {
        let to = u.prec().min(source.prec()).min(target.prec());
        let check = check_hom(&u, source, target, to)?;
        if let Some(e) = check.failing_monomial {
            return Err(Error::NotAHomomorphism(e));
        }
        Ok(FglHom {
            source: source.clone(),
            target: target.clone(),
            u,
            checked_to: to,
        })
    }

    /// Skips the homomorphism check.
    pub fn unchecked(u: TruncSeries, source: &FormalGroupLaw, target: &FormalGroupLaw) -> Self {
        FglHom {
            source: source.clone(),
            target: target.clone(),
            u,
            checked_to: 0,
        }
    }

    /// `[n]_F` as an endomorphism of `law`.
    pub fn mult_by_n(law: &FormalGroupLaw, n: i64) -> Self {
        FglHom {
            source: law.clone(),
            target: law.clone(),
            u: mult_by_n(law, n),
            checked_to: law.prec(),
        }
    }

    /// `t^(p^k)`, from a law to its k-fold twist.
    pub fn frobenius(law: &FormalGroupLaw, k: u32) -> Self {
        let f = law.field();
        let q = (f.characteristic() as usize).pow(k) as u32;
        let u = TruncSeries::monomial(f, 1, &[q], Elem::ONE, law.prec());
        FglHom {
            source: law.clone(),
            target: twist_p_pow(law, k),
            u,
            checked_to: law.prec(),
        }
    }

    pub fn series(&self) -> &TruncSeries {
        &self.u
    }

    pub fn source(&self) -> &FormalGroupLaw {
        &self.source
    }

    pub fn target(&self) -> &FormalGroupLaw {
        &self.target
    }

    /// Degree below which the homomorphism identity was verified.
    pub fn checked_to(&self) -> usize {
        self.checked_to
    }

    pub fn height(&self) -> Result<Height> {
        series_height(&self.u)
    }

    /// `u1 != 0`.
    pub fn is_separable(&self) -> bool {
        self.u.prec() > 1 && !self.u.coeff(&[1]).expect("within precision").is_zero()
    }
}

pub fn hom_height(u: &FglHom) -> Result<Height> {
    u.height()
}

/// `U1 (+) U2 = F'(U1, U2)`.
pub fn hom_add(u1: &FglHom, u2: &FglHom) -> Result<FglHom> {
    if !laws_match(&u1.source, &u2.source) || !laws_match(&u1.target, &u2.target) {
        return Err(Error::LawMismatch);
    }
    let sum = u1.target.add_series(&u1.u, &u2.u)?;
    FglHom::new(sum, &u1.source, &u1.target)
}

/// `V o U` for `U: F -> F'` and `V: F' -> F''`.
pub fn hom_compose(v: &FglHom, u: &FglHom) -> Result<FglHom> {
    if !laws_match(&u.target, &v.source) {
        return Err(Error::LawMismatch);
    }
    let composed = v.u.compose(std::slice::from_ref(&u.u))?;
    FglHom::new(composed, &u.source, &v.target)
}

/// `V` with `U(t) = V(t^(p^k))` for a series `u` of height `k`.
pub fn v_factor_series(u: &TruncSeries, k: u32) -> TruncSeries {
    let f = u.field();
    let step = (f.characteristic() as usize).pow(k);
    let prec = u.prec().div_ceil(step);
    let coeffs: Vec<Elem> = (0..prec)
        .map(|j| u.coeff(&[(j * step) as u32]).expect("within precision"))
        .collect();
    TruncSeries::univariate(f, &coeffs, prec)
}

/// Factors a homomorphism of height `k` as `V o t^(p^k)` with
/// `V: F^(p^k) -> F'` of height zero.
pub fn v_factor(u: &FglHom) -> Result<FglHom> {
    let k = match u.height()? {
        Height::Finite(k) => k,
        Height::Infinite => {
            return Err(Error::InsufficientPrecision {
                needed: u.u.prec() + 1,
                available: u.u.prec(),
            })
        }
    };
    let v = v_factor_series(&u.u, k);
    let source = twist_p_pow(&u.source, k);
    FglHom::new(v, &source, &u.target)
}

/// Homogeneous polynomial in `X, Y, Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousPoly {
    field: Field,
    degree: u32,
    terms: Vec<([u32; 3], Elem)>,
}

impl HomogeneousPoly {
    /// An empty term list is the zero polynomial of the given degree.
    pub fn new(field: &Field, degree: u32, terms: Vec<([u32; 3], Elem)>) -> Result<Self> {
        if terms.iter().any(|(e, _)| e.iter().sum::<u32>() != degree) {
            return Err(Error::NotHomogeneous);
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(HomogeneousPoly {
            field: field.clone(),
            degree,
            terms,
        })
    }

    pub fn monomial(field: &Field, e: [u32; 3]) -> Self {
        HomogeneousPoly {
            field: field.clone(),
            degree: e.iter().sum(),
            terms: vec![(e, Elem::ONE)],
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[([u32; 3], Elem)] {
        &self.terms
    }

    pub fn eval(&self, x: Elem, y: Elem, z: Elem) -> Elem {
        let f = &self.field;
        self.terms.iter().fold(Elem::ZERO, |acc, (e, c)| {
            let m = f.mul(
                f.pow(x, e[0] as u64),
                f.mul(f.pow(y, e[1] as u64), f.pow(z, e[2] as u64)),
            );
            f.add(acc, f.mul(*c, m))
        })
    }

    /// `f(t, -1, s)` for univariate series `t, s`.
    pub fn eval_chart(&self, t: &TruncSeries, s: &TruncSeries) -> TruncSeries {
        let f = &self.field;
        let prec = t.prec().min(s.prec());
        let minus_one = f.neg(Elem::ONE);
        self.terms
            .iter()
            .fold(TruncSeries::zero(f, 1, prec), |acc, (e, c)| {
                let sign = f.pow(minus_one, e[1] as u64);
                let m = &t.pow(e[0]) * &s.pow(e[2]);
                &acc + &m.scale(f.mul(*c, sign))
            })
    }
}

/// A map `(X:Y:Z) -> (f1:f2:f3)` between Weierstrass curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isogeny {
    pub source: WeierstrassCurve,
    pub target: WeierstrassCurve,
    pub f: [HomogeneousPoly; 3],
}

impl Isogeny {
    pub fn new(
        source: WeierstrassCurve,
        target: WeierstrassCurve,
        f: [HomogeneousPoly; 3],
    ) -> Result<Self> {
        ensure_same(source.field(), target.field())?;
        for g in &f {
            ensure_same(source.field(), &g.field)?;
        }
        if f[0].degree != f[1].degree || f[1].degree != f[2].degree {
            return Err(Error::NotHomogeneous);
        }
        Ok(Isogeny { source, target, f })
    }

    pub fn identity(curve: &WeierstrassCurve) -> Self {
        Self::frobenius(curve, 0)
    }

    /// `(X^(p^k), Y^(p^k), Z^(p^k))` onto the k-fold twisted curve.
    pub fn frobenius(curve: &WeierstrassCurve, k: u32) -> Self {
        let f = curve.field();
        let q = f.characteristic().pow(k);
        let target = (0..k).fold(curve.clone(), |c, _| c.frobenius_twist());
        let polys = [[q, 0, 0], [0, q, 0], [0, 0, q]].map(|e| HomogeneousPoly::monomial(f, e));
        Isogeny {
            source: curve.clone(),
            target,
            f: polys,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyHom {
    pub hom: FglHom,
    pub separable: bool,
}

/// Expands an isogeny into the homomorphism `-f1(t,-1,S)/f2(t,-1,S)` of
/// the formal group laws. The result is checked a posteriori: it must be a
/// homomorphism and the image chart point must lie on the target curve.
pub fn isogeny_to_hom(iso: &Isogeny, prec: usize) -> Result<IsogenyHom> {
    let field = iso.source.field();
    let (zero, one) = (Elem::ZERO, Elem::ONE);
    if !iso.f[0].eval(zero, one, zero).is_zero()
        || iso.f[1].eval(zero, one, zero).is_zero()
        || !iso.f[2].eval(zero, one, zero).is_zero()
    {
        return Err(Error::OriginNotFixed);
    }
    let tau = TruncSeries::var(field, 1, 0, prec);
    let s = s_expansion(&iso.source, prec);
    let [g1, g2, g3] = [0, 1, 2].map(|k| iso.f[k].eval_chart(&tau, &s));
    let inv = g2.recip()?;
    let u = (&g1 * &inv).neg();
    let w = (&g3 * &inv).neg();

    let on_target = s_expansion(&iso.target, prec).compose(std::slice::from_ref(&u))?;
    if let Some((e, _)) = (&on_target - &w).terms().next() {
        return Err(Error::NotAHomomorphism(vec![e[0]]));
    }
    let source = group_law(&iso.source, prec);
    let target = group_law(&iso.target, prec);
    let hom = FglHom::new(u, &source, &target)?;
    let separable = hom.is_separable();
    Ok(IsogenyHom { hom, separable })
}
