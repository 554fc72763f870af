//! Dense truncated power series in one, two or three variables.
//!
//! Coefficients are stored for every monomial of total degree below the
//! precision, grouped by total degree and, inside one degree, in ascending
//! lexicographic order of the exponent tuple. The layout of the monomials of
//! degree `d` does not depend on the precision, so truncation is a prefix.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{ensure_same, same_field, Elem, Field};

/// Exponent tuple, padded with zeros beyond the number of variables.
pub type Exps = [u32; 3];

/// Order of a series: the smallest total degree with a nonzero coefficient,
/// or `Infinite` when every stored coefficient vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<usize> {
        match self {
            Order::Finite(d) => Some(d),
            Order::Infinite => None,
        }
    }
}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => a.cmp(b),
            (Order::Finite(_), Order::Infinite) => Ordering::Less,
            (Order::Infinite, Order::Finite(_)) => Ordering::Greater,
            (Order::Infinite, Order::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(d) => write!(f, "{d}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Number of monomials of total degree below `d`.
fn count(nvars: usize, d: usize) -> usize {
    match nvars {
        1 => d,
        2 => d * (d + 1) / 2,
        3 => d * (d + 1) * (d + 2) / 6,
        _ => unreachable!("series have 1 to 3 variables"),
    }
}

/// Number of monomials of total degree exactly `d`.
fn degree_len(nvars: usize, d: usize) -> usize {
    count(nvars, d + 1) - count(nvars, d)
}

#[inline]
fn pos3(i: usize, j: usize, d: usize) -> usize {
    i * (d + 1) - i * i.saturating_sub(1) / 2 + j
}

fn index_of(nvars: usize, e: &Exps) -> usize {
    let d = (e[0] + e[1] + e[2]) as usize;
    let pos = match nvars {
        1 => 0,
        2 => e[0] as usize,
        _ => pos3(e[0] as usize, e[1] as usize, d),
    };
    count(nvars, d) + pos
}

/// Monomials of total degree `d` in storage order.
fn exps_of_degree(nvars: usize, d: u32) -> Vec<Exps> {
    match nvars {
        1 => vec![[d, 0, 0]],
        2 => (0..=d).map(|i| [i, d - i, 0]).collect(),
        _ => (0..=d)
            .flat_map(|i| (0..=d - i).map(move |j| [i, j, d - i - j]))
            .collect(),
    }
}

/// Accumulate the product of the homogeneous parts of degrees `da` and `db`
/// into `out`, the homogeneous slice of degree `da + db`.
fn hom_mul_acc(
    f: &Field,
    nvars: usize,
    da: usize,
    a: &[Elem],
    db: usize,
    b: &[Elem],
    out: &mut [Elem],
) {
    match nvars {
        1 => out[0] = f.add(out[0], f.mul(a[0], b[0])),
        2 => {
            for (ia, &x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (ib, &y) in b.iter().enumerate() {
                    if !y.is_zero() {
                        out[ia + ib] = f.add(out[ia + ib], f.mul(x, y));
                    }
                }
            }
        }
        _ => {
            let ea = exps_of_degree(3, da as u32);
            let eb = exps_of_degree(3, db as u32);
            let d = da + db;
            for (x, ex) in a.iter().zip(&ea) {
                if x.is_zero() {
                    continue;
                }
                for (y, ey) in b.iter().zip(&eb) {
                    if !y.is_zero() {
                        let k = pos3((ex[0] + ey[0]) as usize, (ex[1] + ey[1]) as usize, d);
                        out[k] = f.add(out[k], f.mul(*x, *y));
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncSeries {
    field: Field,
    nvars: usize,
    prec: usize,
    coeffs: Vec<Elem>,
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars
            && self.prec == other.prec
            && self.coeffs == other.coeffs
            && same_field(&self.field, &other.field)
    }
}

impl Eq for TruncSeries {}

fn check_nvars(nvars: usize) {
    assert!(
        (1..=3).contains(&nvars),
        "series have 1 to 3 variables, got {nvars}"
    );
}

impl TruncSeries {
    pub fn zero(field: &Field, nvars: usize, prec: usize) -> Self {
        check_nvars(nvars);
        TruncSeries {
            field: field.clone(),
            nvars,
            prec,
            coeffs: vec![Elem::ZERO; count(nvars, prec)],
        }
    }

    pub fn constant(field: &Field, nvars: usize, prec: usize, c: Elem) -> Self {
        let mut s = Self::zero(field, nvars, prec);
        if prec > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(field: &Field, nvars: usize, prec: usize) -> Self {
        Self::constant(field, nvars, prec, Elem::ONE)
    }

    /// The variable with index `var` (0-based).
    pub fn var(field: &Field, nvars: usize, var: usize, prec: usize) -> Self {
        let mut e = [0; 3];
        e[var] = 1;
        Self::monomial(field, nvars, &e[..nvars], Elem::ONE, prec)
    }

    pub fn monomial(field: &Field, nvars: usize, exps: &[u32], c: Elem, prec: usize) -> Self {
        let mut s = Self::zero(field, nvars, prec);
        let e = pad(exps);
        if ((e[0] + e[1] + e[2]) as usize) < prec {
            s.coeffs[index_of(nvars, &e)] = c;
        }
        s
    }

    /// Univariate series from coefficients `c0, c1, ..`; entries at or
    /// beyond `prec` are ignored.
    pub fn univariate(field: &Field, coeffs: &[Elem], prec: usize) -> Self {
        let mut s = Self::zero(field, 1, prec);
        for (k, &c) in coeffs.iter().enumerate().take(prec) {
            s.coeffs[k] = c;
        }
        s
    }

    /// Build from `(exponents, coefficient)` pairs; later entries for the
    /// same monomial overwrite earlier ones.
    pub fn from_terms<'a>(
        field: &Field,
        nvars: usize,
        prec: usize,
        terms: impl IntoIterator<Item = (&'a [u32], Elem)>,
    ) -> Result<Self> {
        let mut s = Self::zero(field, nvars, prec);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::ArityMismatch);
            }
            s.set_coeff(exps, c)?;
        }
        Ok(s)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Total-degree cutoff: coefficients are known for degrees below it.
    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, exps: &[u32]) -> Result<Elem> {
        if exps.len() != self.nvars {
            return Err(Error::ArityMismatch);
        }
        let e = pad(exps);
        let degree = (e[0] + e[1] + e[2]) as usize;
        if degree >= self.prec {
            return Err(Error::PrecisionExceeded {
                degree,
                prec: self.prec,
            });
        }
        Ok(self.coeffs[index_of(self.nvars, &e)])
    }

    pub fn set_coeff(&mut self, exps: &[u32], c: Elem) -> Result<()> {
        let e = pad(exps);
        let degree = (e[0] + e[1] + e[2]) as usize;
        if degree >= self.prec {
            return Err(Error::PrecisionExceeded {
                degree,
                prec: self.prec,
            });
        }
        self.coeffs[index_of(self.nvars, &e)] = c;
        Ok(())
    }

    /// Univariate coefficients `c0 .. c_{prec-1}`.
    pub fn coeffs_univariate(&self) -> &[Elem] {
        debug_assert_eq!(self.nvars, 1);
        &self.coeffs
    }

    pub fn constant_term(&self) -> Elem {
        self.coeffs.first().copied().unwrap_or(Elem::ZERO)
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Nonzero terms in storage order (total degree, then lexicographic).
    pub fn terms(&self) -> impl Iterator<Item = (Exps, Elem)> + '_ {
        (0..self.prec as u32)
            .flat_map(move |d| exps_of_degree(self.nvars, d))
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn order(&self) -> Order {
        (0..self.prec)
            .find(|&d| self.degree_slice(d).iter().any(|c| !c.is_zero()))
            .map_or(Order::Infinite, Order::Finite)
    }

    fn degree_slice(&self, d: usize) -> &[Elem] {
        &self.coeffs[count(self.nvars, d)..count(self.nvars, d + 1)]
    }

    /// The same series known to a lower precision.
    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec);
        TruncSeries {
            field: self.field.clone(),
            nvars: self.nvars,
            prec,
            coeffs: self.coeffs[..count(self.nvars, prec)].to_vec(),
        }
    }

    /// Pads with zero coefficients up to `prec`. Only correct where the
    /// caller has established that the padded coefficients do not matter.
    pub(crate) fn zero_extend(&self, prec: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(count(self.nvars, prec.max(self.prec)), Elem::ZERO);
        TruncSeries {
            field: self.field.clone(),
            nvars: self.nvars,
            prec: prec.max(self.prec),
            coeffs,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        ensure_same(&self.field, &other.field)?;
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Elem, Elem) -> Elem) -> Self {
        let prec = self.prec.min(other.prec);
        let len = count(self.nvars, prec);
        TruncSeries {
            field: self.field.clone(),
            nvars: self.nvars,
            prec,
            coeffs: self.coeffs[..len]
                .iter()
                .zip(&other.coeffs[..len])
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| self.field.add(a, b)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| self.field.sub(a, b)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let mut out = Self::zero(&self.field, self.nvars, prec);
        for da in 0..prec {
            let a = self.degree_slice(da);
            if a.iter().all(|c| c.is_zero()) {
                continue;
            }
            for db in 0..prec - da {
                let b = other.degree_slice(db);
                let lo = count(self.nvars, da + db);
                let hi = lo + degree_len(self.nvars, da + db);
                hom_mul_acc(
                    &self.field,
                    self.nvars,
                    da,
                    a,
                    db,
                    b,
                    &mut out.coeffs[lo..hi],
                );
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|c| self.field.neg(c))
    }

    pub fn scale(&self, c: Elem) -> Self {
        self.map(|x| self.field.mul(c, x))
    }

    /// `self += c * other`, over the common prefix.
    fn axpy(&mut self, c: Elem, other: &TruncSeries) {
        let f = &self.field;
        for (x, &y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !y.is_zero() {
                *x = f.add(*x, f.mul(c, y));
            }
        }
    }

    fn map(&self, op: impl Fn(Elem) -> Elem) -> Self {
        TruncSeries {
            field: self.field.clone(),
            nvars: self.nvars,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| op(c)).collect(),
        }
    }

    /// Coefficientwise image under `op`, landing in `field`.
    pub fn map_coeffs(&self, field: &Field, op: impl Fn(Elem) -> Elem) -> Self {
        TruncSeries {
            field: field.clone(),
            nvars: self.nvars,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| op(c)).collect(),
        }
    }

    /// Every coefficient raised to the p-th power.
    pub fn map_coeffs_frobenius(&self) -> Self {
        self.map(|c| self.field.frobenius(c))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field, self.nvars, self.prec);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let f = &self.field;
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NonUnit);
        }
        let inv0 = f.inv(c0)?;
        let minus_inv0 = f.neg(inv0);
        let mut out = Self::zero(f, self.nvars, self.prec);
        if self.prec == 0 {
            return Ok(out);
        }
        out.coeffs[0] = inv0;
        for d in 1..self.prec {
            let lo = count(self.nvars, d);
            let len = degree_len(self.nvars, d);
            let mut acc = vec![Elem::ZERO; len];
            for da in 1..=d {
                let a = self.degree_slice(da);
                if a.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let db = d - da;
                let b = &out.coeffs[count(self.nvars, db)..count(self.nvars, db + 1)];
                hom_mul_acc(f, self.nvars, da, a, db, b, &mut acc);
            }
            for (k, v) in acc.into_iter().enumerate() {
                out.coeffs[lo + k] = f.mul(minus_inv0, v);
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to variable `var`; the
    /// precision drops by one.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.nvars);
        let f = &self.field;
        let prec = self.prec.saturating_sub(1);
        let mut out = Self::zero(f, self.nvars, prec);
        for (e, c) in self.terms() {
            if e[var] == 0 {
                continue;
            }
            let mut lowered = e;
            lowered[var] -= 1;
            let k = f.from_int(e[var] as i64);
            out.coeffs[index_of(self.nvars, &lowered)] = f.mul(k, c);
        }
        out
    }

    /// Substitute zero for variable `var`, keeping the arity.
    pub fn set_var_zero(&self, var: usize) -> Self {
        let mut out = self.clone();
        for d in 0..self.prec as u32 {
            let lo = count(self.nvars, d as usize);
            for (k, e) in exps_of_degree(self.nvars, d).iter().enumerate() {
                if e[var] != 0 {
                    out.coeffs[lo + k] = Elem::ZERO;
                }
            }
        }
        out
    }

    /// Re-express as a series in `nvars` variables, sending variable `k` of
    /// `self` to variable `targets[k]`.
    pub fn rename_vars(&self, nvars: usize, targets: &[usize]) -> Self {
        assert_eq!(targets.len(), self.nvars);
        let mut out = Self::zero(&self.field, nvars, self.prec);
        for (e, c) in self.terms() {
            let mut image = [0u32; 3];
            for (k, &t) in targets.iter().enumerate() {
                image[t] += e[k];
            }
            out.coeffs[index_of(nvars, &image)] = c;
        }
        out
    }

    /// Univariate restriction `f(t, 0, ..)` along variable 0.
    pub fn restrict_to_first(&self) -> Self {
        let mut out = Self::zero(&self.field, 1, self.prec);
        for d in 0..self.prec {
            out.coeffs[d] = self.coeffs[count(self.nvars, d + 1) - 1];
        }
        out
    }

    /// `f(t^k)` for univariate `f`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert_eq!(self.nvars, 1);
        assert!(k >= 1);
        let prec = self.prec * k;
        let mut out = Self::zero(&self.field, 1, prec);
        for (j, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[j * k] = c;
        }
        out
    }

    /// Homogeneous part of total degree `d`, as `(exponents, coefficient)`.
    pub fn homogeneous_part(&self, d: usize) -> Vec<(Exps, Elem)> {
        if d >= self.prec {
            return Vec::new();
        }
        exps_of_degree(self.nvars, d as u32)
            .into_iter()
            .zip(self.degree_slice(d).iter().copied())
            .collect()
    }

    /// Substitute series for the variables of `self`. Every argument must
    /// have zero constant term. The result carries the precision to which it
    /// is determined by the known coefficients of `self` and the arguments.
    pub fn compose(&self, args: &[TruncSeries]) -> Result<TruncSeries> {
        if args.len() != self.nvars {
            return Err(Error::ArityMismatch);
        }
        let m = args[0].nvars;
        for a in args {
            ensure_same(&self.field, &a.field)?;
            if a.nvars != m {
                return Err(Error::ArityMismatch);
            }
            if !a.has_zero_constant_term() {
                return Err(Error::NonzeroConstantTerm);
            }
        }
        let prec = composed_prec(self, args);
        let padded: Vec<TruncSeries> = args
            .iter()
            .map(|a| {
                if a.prec < prec {
                    a.zero_extend(prec)
                } else {
                    a.truncate(prec)
                }
            })
            .collect();
        let terms: Vec<(Exps, Elem)> = self.terms().collect();
        let powers: Vec<Vec<TruncSeries>> = padded
            .iter()
            .enumerate()
            .map(|(l, g)| {
                let max_e = terms.iter().map(|(e, _)| e[l]).max().unwrap_or(0);
                power_table(g, max_e, prec)
            })
            .collect();
        Ok(compose_terms(
            &self.field,
            &terms,
            0,
            self.nvars,
            &powers,
            m,
            prec,
        ))
    }
}

/// Reliable precision of `f(args)`. Every argument has order at least `o`
/// and is known below `n_arg`; `f` is known below `n_f` and its lowest
/// nonconstant term has degree `d`. Unknown terms of `f` contribute at
/// degree `o * n_f` or beyond; an unknown tail of an argument changes a
/// degree-`k` monomial only at degree `n_arg + (k-1)*o` or beyond.
fn composed_prec(f: &TruncSeries, args: &[TruncSeries]) -> usize {
    let o = args
        .iter()
        .map(|a| a.order().finite().unwrap_or(a.prec).max(1))
        .min()
        .unwrap_or(1);
    let n_arg = args.iter().map(|a| a.prec).min().unwrap_or(0);
    let by_f = o * f.prec;
    match (1..f.prec).find(|&d| f.degree_slice(d).iter().any(|c| !c.is_zero())) {
        Some(d) => by_f.min(n_arg + (d - 1) * o),
        None => by_f,
    }
}

/// Sum over `terms` of coefficient times the product of argument powers.
/// `powers[l][e]` is the `e`-th power of argument `l`; a missing entry means
/// the power vanishes below `prec`. Terms are grouped by the exponent of
/// variable `level` so that each distinct exponent prefix costs one product.
fn compose_terms(
    field: &Field,
    terms: &[(Exps, Elem)],
    level: usize,
    k: usize,
    powers: &[Vec<TruncSeries>],
    m: usize,
    prec: usize,
) -> TruncSeries {
    let mut out = TruncSeries::zero(field, m, prec);
    if level + 1 == k {
        for (e, c) in terms {
            if let Some(p) = powers[level].get(e[level] as usize) {
                out.axpy(*c, p);
            }
        }
        return out;
    }
    let mut groups: BTreeMap<u32, Vec<(Exps, Elem)>> = BTreeMap::new();
    for &(e, c) in terms {
        groups.entry(e[level]).or_default().push((e, c));
    }
    for (e, group) in groups {
        let Some(p) = powers[level].get(e as usize) else {
            continue;
        };
        let inner = compose_terms(field, &group, level + 1, k, powers, m, prec);
        if inner.is_zero() {
            continue;
        }
        let term = if e == 0 {
            inner
        } else {
            p.mul_unchecked(&inner)
        };
        out.axpy(Elem::ONE, &term);
    }
    out
}

/// Powers `g^0, g^1, ..` of `g` as long as they can be nonzero below `prec`.
fn power_table(g: &TruncSeries, max_e: u32, prec: usize) -> Vec<TruncSeries> {
    let o = g.order().finite().unwrap_or(prec).max(1);
    let mut table = vec![TruncSeries::one(&g.field, g.nvars, prec)];
    for e in 1..=max_e as usize {
        if e * o >= prec {
            break;
        }
        let next = table[e - 1].mul_unchecked(g);
        table.push(next);
    }
    table
}

fn pad(exps: &[u32]) -> Exps {
    let mut e = [0u32; 3];
    e[..exps.len()].copy_from_slice(exps);
    e
}

impl std::ops::Add for &TruncSeries {
    type Output = TruncSeries;

    /// Panics if the operands are incompatible; see [`TruncSeries::try_add`].
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_add(rhs).expect("incompatible series")
    }
}

impl std::ops::Sub for &TruncSeries {
    type Output = TruncSeries;

    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_sub(rhs).expect("incompatible series")
    }
}

impl std::ops::Mul for &TruncSeries {
    type Output = TruncSeries;

    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_mul(rhs).expect("incompatible series")
    }
}

impl std::ops::Neg for &TruncSeries {
    type Output = TruncSeries;

    fn neg(self) -> TruncSeries {
        TruncSeries::neg(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

pub fn ts_arith(a: &TruncSeries, b: &TruncSeries, op: SeriesOp) -> Result<TruncSeries> {
    match op {
        SeriesOp::Add => a.try_add(b),
        SeriesOp::Sub => a.try_sub(b),
        SeriesOp::Mul => a.try_mul(b),
    }
}

const VAR_NAMES: [[&str; 3]; 3] = [["t", "", ""], ["X", "Y", ""], ["X", "Y", "Z"]];

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = &VAR_NAMES[self.nvars - 1];
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono: Vec<String> = (0..self.nvars)
                .filter(|&k| e[k] > 0)
                .map(|k| {
                    if e[k] == 1 {
                        names[k].to_string()
                    } else {
                        format!("{}^{}", names[k], e[k])
                    }
                })
                .collect();
            let coeff = self.field.format(c);
            let coeff = if coeff.contains('+') {
                format!("({coeff})")
            } else {
                coeff
            };
            match (mono.is_empty(), coeff.as_str()) {
                (true, _) => write!(f, "{coeff}")?,
                (false, "1") => write!(f, "{}", mono.join("*"))?,
                (false, _) => write!(f, "{coeff}*{}", mono.join("*"))?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(deg {})", self.prec)
    }
}
