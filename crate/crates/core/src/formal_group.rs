//! Weierstrass curves and formal group laws.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{same_field, Elem, Embedding, Field};
use crate::series::TruncSeries;

/// Precision used when the caller does not supply one: large enough to see
/// the coefficient of `t^(p^2)` in `[p]`.
pub fn default_prec(p: u32) -> usize {
    (p as usize * p as usize + 2).max(16)
}

/// `Y^2 Z + a1 XYZ + a3 YZ^2 = X^3 + a2 X^2 Z + a4 XZ^2 + a6 Z^3`.
#[derive(Clone, Debug)]
pub struct WeierstrassCurve {
    field: Field,
    a: [Elem; 5],
}

impl PartialEq for WeierstrassCurve {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && same_field(&self.field, &other.field)
    }
}

impl Eq for WeierstrassCurve {}

impl WeierstrassCurve {
    /// Coefficients in the order `[a1, a2, a3, a4, a6]`.
    pub fn new(field: &Field, a: [Elem; 5]) -> Result<Self> {
        for &c in &a {
            field.elem(c.code())?;
        }
        if discriminant(field, &a).is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(WeierstrassCurve {
            field: field.clone(),
            a,
        })
    }

    pub fn from_ints(field: &Field, a: [i64; 5]) -> Result<Self> {
        Self::new(field, a.map(|c| field.from_int(c)))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> [Elem; 5] {
        self.a
    }

    pub fn a1(&self) -> Elem {
        self.a[0]
    }

    pub fn a2(&self) -> Elem {
        self.a[1]
    }

    pub fn a3(&self) -> Elem {
        self.a[2]
    }

    pub fn a4(&self) -> Elem {
        self.a[3]
    }

    pub fn a6(&self) -> Elem {
        self.a[4]
    }

    pub fn discriminant(&self) -> Elem {
        discriminant(&self.field, &self.a)
    }

    /// The cubic form `W(X, Y, Z)`; points of the curve are its zeros.
    pub fn eval(&self, x: Elem, y: Elem, z: Elem) -> Elem {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let m = |a: Elem, b: Elem| f.mul(a, b);
        let lhs = f.add(
            f.add(m(m(y, y), z), m(a1, m(m(x, y), z))),
            m(a3, m(y, m(z, z))),
        );
        let x2 = m(x, x);
        let z2 = m(z, z);
        let rhs = [m(x2, x), m(a2, m(x2, z)), m(a4, m(x, z2)), m(a6, m(z2, z))]
            .into_iter()
            .fold(Elem::ZERO, |acc, t| f.add(acc, t));
        f.sub(lhs, rhs)
    }

    /// The curve with every coefficient raised to the p-th power.
    pub fn frobenius_twist(&self) -> Self {
        WeierstrassCurve {
            field: self.field.clone(),
            a: self.a.map(|c| self.field.frobenius(c)),
        }
    }

    /// The same curve over a larger field.
    pub fn lift(&self, emb: &Embedding) -> Self {
        assert!(
            same_field(emb.source(), &self.field),
            "embedding source differs"
        );
        WeierstrassCurve {
            field: emb.target().clone(),
            a: self.a.map(|c| emb.map(c)),
        }
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["a1", "a2", "a3", "a4", "a6"];
        let parts: Vec<String> = names
            .iter()
            .zip(self.a)
            .map(|(n, c)| format!("{n}={}", self.field.format(c)))
            .collect();
        write!(
            f,
            "E[{}] over GF({}^{})",
            parts.join(", "),
            self.field.characteristic(),
            self.field.degree()
        )
    }
}

/// Discriminant of the Weierstrass equation with coefficients `a`.
pub fn discriminant(field: &Field, a: &[Elem; 5]) -> Elem {
    let f = field;
    let [a1, a2, a3, a4, a6] = *a;
    let k = |v: i64| f.from_int(v);
    let m = |x: Elem, y: Elem| f.mul(x, y);
    let b2 = f.add(m(a1, a1), m(k(4), a2));
    let b4 = f.add(m(k(2), a4), m(a1, a3));
    let b6 = f.add(m(a3, a3), m(k(4), a6));
    let b8 = [
        m(m(a1, a1), a6),
        m(k(4), m(a2, a6)),
        f.neg(m(a1, m(a3, a4))),
        m(a2, m(a3, a3)),
        f.neg(m(a4, a4)),
    ]
    .into_iter()
    .fold(Elem::ZERO, |acc, t| f.add(acc, t));
    [
        f.neg(m(m(b2, b2), b8)),
        m(k(-8), m(b4, m(b4, b4))),
        m(k(-27), m(b6, b6)),
        m(k(9), m(b2, m(b4, b6))),
    ]
    .into_iter()
    .fold(Elem::ZERO, |acc, t| f.add(acc, t))
}

/// Expansion `S(t) = t^3 + a1 t^4 + ...` of the chart coordinate `s` in
/// terms of `t`, known below degree `prec`.
pub fn s_expansion(curve: &WeierstrassCurve, prec: usize) -> TruncSeries {
    let f = &curve.field;
    let [a1, a2, a3, a4, a6] = curve.a;
    let mut s = vec![Elem::ZERO; prec.max(4)];
    // sq[n] = sum_{i+j=n} s_i s_j, filled as soon as its inputs are known
    let mut sq = vec![Elem::ZERO; prec.max(4)];
    s[3] = Elem::ONE;
    let conv = |s: &[Elem], n: usize| {
        (3..=n.saturating_sub(3)).fold(Elem::ZERO, |acc, i| f.add(acc, f.mul(s[i], s[n - i])))
    };
    for n in 4..prec {
        sq[n] = conv(&s, n);
        sq[n - 1] = conv(&s, n - 1);
        let cube =
            (3..=n.saturating_sub(6)).fold(Elem::ZERO, |acc, k| f.add(acc, f.mul(s[k], sq[n - k])));
        s[n] = [
            f.mul(a1, s[n - 1]),
            f.mul(a2, s[n - 2]),
            f.mul(a3, sq[n]),
            f.mul(a4, sq[n - 1]),
            f.mul(a6, cube),
        ]
        .into_iter()
        .fold(Elem::ZERO, |acc, t| f.add(acc, t));
    }
    s.truncate(prec);
    TruncSeries::univariate(f, &s, prec)
}

/// Where a formal group law came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Additive,
    Multiplicative,
    Curve(WeierstrassCurve),
    /// Coefficientwise Frobenius applied `times` times to `base`.
    Twist {
        base: Box<Provenance>,
        times: u32,
    },
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalGroupLaw {
    series: TruncSeries,
    provenance: Provenance,
    axiom_checked: usize,
}

impl FormalGroupLaw {
    /// Wraps a bivariate series without checking the axioms; see
    /// [`verify_axioms`].
    pub fn custom(series: TruncSeries) -> Result<Self> {
        if series.nvars() != 2 {
            return Err(Error::ArityMismatch);
        }
        if !series.has_zero_constant_term() {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(FormalGroupLaw {
            series,
            provenance: Provenance::Custom,
            axiom_checked: 0,
        })
    }

    pub fn series(&self) -> &TruncSeries {
        &self.series
    }

    pub fn field(&self) -> &Field {
        self.series.field()
    }

    pub fn prec(&self) -> usize {
        self.series.prec()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Precision to which the axioms have been verified (0 if never).
    pub fn axiom_checked(&self) -> usize {
        self.axiom_checked
    }

    /// The curve this law belongs to, following twists.
    pub fn curve(&self) -> Option<WeierstrassCurve> {
        match &self.provenance {
            Provenance::Curve(c) => Some(c.clone()),
            Provenance::Twist { base, times } => match base.as_ref() {
                Provenance::Curve(c) => {
                    Some((0..*times).fold(c.clone(), |c, _| c.frobenius_twist()))
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// The law known to a lower precision.
    pub fn truncate(&self, prec: usize) -> Self {
        FormalGroupLaw {
            series: self.series.truncate(prec),
            provenance: self.provenance.clone(),
            axiom_checked: self.axiom_checked.min(prec),
        }
    }

    /// `F(g, h)` for univariate `g, h` with zero constant term.
    pub fn add_series(&self, g: &TruncSeries, h: &TruncSeries) -> Result<TruncSeries> {
        self.series.compose(&[g.clone(), h.clone()])
    }

    /// The same law over a larger field.
    pub fn lift(&self, emb: &Embedding) -> Self {
        let series = self.series.map_coeffs(emb.target(), |c| emb.map(c));
        FormalGroupLaw {
            series,
            provenance: lift_provenance(&self.provenance, emb),
            axiom_checked: self.axiom_checked,
        }
    }

    /// Marks the law as verified when the axiom report is clean.
    pub fn checked(mut self, to: usize) -> Result<Self> {
        let report = verify_axioms(&self, to)?;
        if report.all_ok() {
            self.axiom_checked = self.axiom_checked.max(to);
        }
        Ok(self)
    }
}

fn lift_provenance(p: &Provenance, emb: &Embedding) -> Provenance {
    match p {
        Provenance::Curve(c) => Provenance::Curve(c.lift(emb)),
        Provenance::Twist { base, times } => Provenance::Twist {
            base: Box::new(lift_provenance(base, emb)),
            times: *times,
        },
        other => other.clone(),
    }
}

/// Formal group law of `curve`, known below total degree `prec`.
pub fn group_law(curve: &WeierstrassCurve, prec: usize) -> FormalGroupLaw {
    assert!(prec >= 2, "group law needs precision at least 2");
    let f = curve.field();
    let [a1, a2, a3, a4, a6] = curve.a;
    let s = s_expansion(curve, prec + 1);
    let n = prec;

    // slope of the chord through (t1, S(t1)) and (t2, S(t2)):
    // sum_i s_i (t1^(i-1) + t1^(i-2) t2 + ... + t2^(i-1))
    let mut m = TruncSeries::zero(f, 2, n);
    for d in 2..n {
        let c = s.coeff(&[d as u32 + 1]).expect("within precision");
        for i in 0..=d as u32 {
            m.set_coeff(&[i, d as u32 - i], c)
                .expect("within precision");
        }
    }
    let x = TruncSeries::var(f, 2, 0, n);
    let y = TruncSeries::var(f, 2, 1, n);
    let s1 = s.truncate(n).rename_vars(2, &[0]);
    let b = &s1 - &(&m * &x);

    let one = TruncSeries::one(f, 2, n);
    let m2 = &m * &m;
    let m3 = &m2 * &m;
    let a = &(&(&one + &m.scale(a2)) + &m2.scale(a4)) + &m3.scale(a6);
    let mb = &m * &b;
    let num = [
        m.scale(a1),
        b.scale(a2),
        m2.scale(a3),
        mb.scale(f.mul(f.from_int(2), a4)),
        (&m2 * &b).scale(f.mul(f.from_int(3), a6)),
    ]
    .iter()
    .fold(TruncSeries::zero(f, 2, n), |acc, t| &acc + t);
    let quotient = &num * &a.recip().expect("1 + O(m) is a unit");
    let t3 = &(&x.neg() - &y) - &quotient;
    let s3 = &(&m * &t3) + &b;
    let denom = &(&one - &t3.scale(a1)) - &s3.scale(a3);
    let series = &t3.neg() * &denom.recip().expect("1 + O(t3) is a unit");
    FormalGroupLaw {
        series,
        provenance: Provenance::Curve(curve.clone()),
        axiom_checked: 0,
    }
}

/// `F(X, Y) = X + Y`.
pub fn additive_law(field: &Field, prec: usize) -> FormalGroupLaw {
    let x = TruncSeries::var(field, 2, 0, prec);
    let y = TruncSeries::var(field, 2, 1, prec);
    FormalGroupLaw {
        series: &x + &y,
        provenance: Provenance::Additive,
        axiom_checked: 0,
    }
}

/// `F(X, Y) = X + Y + XY`.
pub fn multiplicative_law(field: &Field, prec: usize) -> FormalGroupLaw {
    let x = TruncSeries::var(field, 2, 0, prec);
    let y = TruncSeries::var(field, 2, 1, prec);
    let series = &(&x + &y) + &(&x * &y);
    FormalGroupLaw {
        series,
        provenance: Provenance::Multiplicative,
        axiom_checked: 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Identity,
    Commutativity,
    Associativity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub identity_ok: bool,
    pub commutative_ok: bool,
    pub associative_ok: bool,
    /// First failing monomial, from the first axiom (in the order above)
    /// that fails.
    pub failing_monomial: Option<(Axiom, Vec<u32>)>,
    pub checked_to: usize,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.identity_ok && self.commutative_ok && self.associative_ok
    }
}

fn first_difference(a: &TruncSeries, b: &TruncSeries) -> Option<Vec<u32>> {
    let diff = a - b;
    let k = diff.nvars();
    let first = diff.terms().next().map(|(e, _)| e[..k].to_vec());
    first
}

/// Checks `F(X,0) = X`, `F(0,Y) = Y`, `F(X,Y) = F(Y,X)` and
/// `F(F(X,Y),Z) = F(X,F(Y,Z))` below total degree `to`.
pub fn verify_axioms(law: &FormalGroupLaw, to: usize) -> Result<AxiomReport> {
    if law.prec() < to {
        return Err(Error::InsufficientPrecision {
            needed: to,
            available: law.prec(),
        });
    }
    let f = law.field();
    let g = law.series.truncate(to);
    let x = TruncSeries::var(f, 2, 0, to);
    let y = TruncSeries::var(f, 2, 1, to);
    let identity_fail = first_difference(&g.set_var_zero(1), &x)
        .or_else(|| first_difference(&g.set_var_zero(0), &y));
    let comm_fail = first_difference(&g, &g.rename_vars(2, &[1, 0]));

    let xyz: Vec<TruncSeries> = (0..3).map(|k| TruncSeries::var(f, 3, k, to)).collect();
    let f_xy = g.rename_vars(3, &[0, 1]);
    let f_yz = g.rename_vars(3, &[1, 2]);
    let left = g.compose(&[f_xy, xyz[2].clone()])?;
    let right = g.compose(&[xyz[0].clone(), f_yz])?;
    let assoc_fail = first_difference(&left, &right);

    let failing_monomial = identity_fail
        .clone()
        .map(|e| (Axiom::Identity, e))
        .or_else(|| comm_fail.clone().map(|e| (Axiom::Commutativity, e)))
        .or_else(|| assoc_fail.clone().map(|e| (Axiom::Associativity, e)));
    Ok(AxiomReport {
        identity_ok: identity_fail.is_none(),
        commutative_ok: comm_fail.is_none(),
        associative_ok: assoc_fail.is_none(),
        failing_monomial,
        checked_to: to,
    })
}

/// Inverse series `i(t)` with `F(t, i(t)) = 0`, built one degree at a time
/// starting from `-t`.
pub fn negation_by_induction(law: &FormalGroupLaw) -> TruncSeries {
    let f = law.field();
    let n = law.prec();
    let mut coeffs = vec![Elem::ZERO; n];
    if n > 1 {
        coeffs[1] = f.neg(Elem::ONE);
    }
    for d in 2..n {
        let work = d + 1;
        let tau = TruncSeries::var(f, 1, 0, work);
        let iota = TruncSeries::univariate(f, &coeffs[..d], work);
        let r = law
            .series
            .truncate(work)
            .compose(&[tau, iota])
            .expect("arguments have zero constant term");
        // dF/dY(t, i) = 1 + O(t), so the defect at degree d is removed by
        // subtracting it from the coefficient of t^d
        coeffs[d] = f.neg(r.coeff(&[d as u32]).expect("within precision"));
    }
    TruncSeries::univariate(f, &coeffs, n)
}

/// `-t / (1 - a1 t - a3 S(t))`.
pub fn curve_negation(curve: &WeierstrassCurve, prec: usize) -> TruncSeries {
    let f = curve.field();
    let s = s_expansion(curve, prec);
    let tau = TruncSeries::var(f, 1, 0, prec);
    let denom = &(&TruncSeries::one(f, 1, prec) - &tau.scale(curve.a1())) - &s.scale(curve.a3());
    &tau.neg() * &denom.recip().expect("1 + O(t) is a unit")
}

/// The inverse series of the law. Curve laws use the closed form, which
/// debug builds cross-check against the generic induction.
pub fn negation_series(law: &FormalGroupLaw) -> TruncSeries {
    match law.curve() {
        Some(curve) => {
            let closed = curve_negation(&curve, law.prec());
            debug_assert_eq!(
                closed,
                negation_by_induction(law),
                "negation formulas disagree"
            );
            closed
        }
        None => negation_by_induction(law),
    }
}

/// `[n]_F`, via `[k+1] = F([k], t)` and `[-n] = i o [n]`.
pub fn mult_by_n(law: &FormalGroupLaw, n: i64) -> TruncSeries {
    let f = law.field();
    let prec = law.prec();
    let tau = TruncSeries::var(f, 1, 0, prec);
    let mut acc = TruncSeries::zero(f, 1, prec);
    for _ in 0..n.unsigned_abs() {
        acc = law
            .add_series(&acc, &tau)
            .expect("arguments have zero constant term");
    }
    if n < 0 {
        acc = negation_series(law)
            .compose(&[acc])
            .expect("zero constant term");
    }
    acc
}

/// `F^(p)`: the law with every coefficient raised to the p-th power.
pub fn twist_p(law: &FormalGroupLaw) -> FormalGroupLaw {
    let provenance = match &law.provenance {
        Provenance::Twist { base, times } => Provenance::Twist {
            base: base.clone(),
            times: times + 1,
        },
        Provenance::Additive => Provenance::Additive,
        Provenance::Multiplicative => Provenance::Multiplicative,
        other => Provenance::Twist {
            base: Box::new(other.clone()),
            times: 1,
        },
    };
    FormalGroupLaw {
        series: law.series.map_coeffs_frobenius(),
        provenance,
        axiom_checked: law.axiom_checked,
    }
}

/// `twist_p` applied `k` times.
pub fn twist_p_pow(law: &FormalGroupLaw, k: u32) -> FormalGroupLaw {
    (0..k).fold(law.clone(), |l, _| twist_p(&l))
}
