//! Exact arithmetic in GF(p^n) for small p.
//!
//! A [`FieldCtx`] owns the field description together with log/exp tables
//! relative to a primitive element. Elements are plain [`Elem`] codes: the
//! coefficient vector `[e0, .., e_{n-1}]` of the polynomial basis packed as
//! the integer `e0 + e1*p + .. + e_{n-1}*p^{n-1}`. The codes only mean
//! something together with the context that produced them; series and curves
//! carry their [`Field`] alongside raw codes, while [`FieldElement`] bundles
//! the two for standalone use.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Field = Arc<FieldCtx>;

/// Raw element code relative to some [`FieldCtx`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Size limits for field construction. These are configuration, not
/// properties of the mathematics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldConfig {
    pub max_prime: u32,
    pub max_order: u64,
    pub max_enumeration: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            max_prime: 13,
            max_order: 1 << 20,
            max_enumeration: 1 << 20,
        }
    }
}

pub struct FieldCtx {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    config: FieldConfig,
    p_pows: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// True when both handles describe the same field.
pub fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same(a: &Field, b: &Field) -> Result<()> {
    if same_field(a, b) {
        Ok(())
    } else {
        Err(Error::CtxMismatch)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// GF(p^n) with the given modulus, or the default one when `None`.
    pub fn new(p: u32, n: u32, modulus: Option<Vec<u32>>) -> Result<Field> {
        Self::with_config(p, n, modulus, FieldConfig::default())
    }

    pub fn prime(p: u32) -> Result<Field> {
        Self::new(p, 1, None)
    }

    pub fn with_config(
        p: u32,
        n: u32,
        modulus: Option<Vec<u32>>,
        config: FieldConfig,
    ) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > config.max_prime {
            return Err(Error::PrimeTooLarge {
                p,
                max: config.max_prime,
            });
        }
        if n == 0 {
            return Err(Error::BadModulus(
                "extension degree must be at least 1".into(),
            ));
        }
        let order = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
        if order > config.max_order {
            return Err(Error::BoundExceeded {
                what: "field order",
                size: order,
                bound: config.max_order,
            });
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != n as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        n + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus("coefficient out of range".into()));
                }
                if m[n as usize] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                if !gfp::is_irreducible(&m, p) {
                    return Err(Error::BadModulus("modulus is reducible".into()));
                }
                m
            }
            None => gfp::default_modulus(p, n).ok_or(Error::NoIrreducibleFound { p, degree: n })?,
        };
        Ok(Arc::new(Self::build(p, n, order as u32, modulus, config)))
    }

    fn build(p: u32, n: u32, q: u32, modulus: Vec<u32>, config: FieldConfig) -> FieldCtx {
        let p_pows: Vec<u32> = (0..=n).map(|k| p.pow(k)).collect();
        let g = gfp::primitive_element(p, n, q, &modulus);
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![u32::MAX; q as usize];
        let g_digits = gfp::decode(g, p, n);
        let mut cur = vec![0u32; n as usize];
        cur[0] = 1;
        for k in 0..order {
            let code = gfp::encode(&cur, p);
            exp[k] = code;
            exp[k + order] = code;
            log[code as usize] = k as u32;
            cur = gfp::mulmod(&cur, &g_digits, &modulus, p);
        }
        let mut ctx = FieldCtx {
            p,
            n,
            q,
            modulus,
            config,
            p_pows,
            exp,
            log,
            add_table: None,
        };
        if p != 2 && n > 1 && q <= 256 {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = ctx.add_digits(Elem(a), Elem(b)).0;
                }
            }
            ctx.add_table = Some(table);
        }
        ctx
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients `[c0, .., cn]` of the defining polynomial, `cn = 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn config(&self) -> FieldConfig {
        self.config
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.p as i64) as u32)
    }

    /// The class of the polynomial variable (zero when n = 1 with modulus x).
    pub fn generator(&self) -> Elem {
        if self.n == 1 {
            Elem(((self.p as u64 - self.modulus[0] as u64) % self.p as u64) as u32)
        } else {
            Elem(self.p)
        }
    }

    pub fn elem(&self, code: u32) -> Result<Elem> {
        if code < self.q {
            Ok(Elem(code))
        } else {
            Err(Error::BadElement(format!(
                "code {code} outside GF({})",
                self.q
            )))
        }
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Elem> {
        if digits.len() != self.n as usize {
            return Err(Error::BadElement(format!(
                "expected {} coordinates, got {}",
                self.n,
                digits.len()
            )));
        }
        if digits.iter().any(|&d| d >= self.p) {
            return Err(Error::BadElement("coordinate out of range".into()));
        }
        Ok(Elem(gfp::encode(digits, self.p)))
    }

    pub fn digits(&self, a: Elem) -> Vec<u32> {
        gfp::decode(a.0, self.p, self.n)
    }

    /// All elements, ordered by code.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            Elem(a.0 ^ b.0)
        } else if self.n == 1 {
            let s = a.0 + b.0;
            Elem(if s >= self.p { s - self.p } else { s })
        } else if let Some(t) = &self.add_table {
            Elem(t[(a.0 * self.q + b.0) as usize])
        } else {
            self.add_digits(a, b)
        }
    }

    fn add_digits(&self, a: Elem, b: Elem) -> Elem {
        let (mut x, mut y, mut out) = (a.0, b.0, 0);
        for k in 0..self.n as usize {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * self.p_pows[k];
            x /= self.p;
            y /= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.0 == 0 {
            a
        } else if self.n == 1 {
            Elem(self.p - a.0)
        } else {
            let (mut x, mut out) = (a.0, 0);
            for k in 0..self.n as usize {
                let d = x % self.p;
                out += ((self.p - d) % self.p) * self.p_pows[k];
                x /= self.p;
            }
            Elem(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            Elem::ZERO
        } else {
            Elem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        Ok(Elem(
            self.exp[((order - self.log[a.0 as usize]) % order) as usize],
        ))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let order = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % order)) % order;
        Elem(self.exp[k as usize])
    }

    /// a^p.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }

    /// a^(p^k).
    pub fn frobenius_pow(&self, a: Elem, k: u32) -> Elem {
        if a.0 == 0 || self.q == 2 {
            return a;
        }
        let order = (self.q - 1) as u64;
        let mut e = 1u64;
        for _ in 0..k {
            e = e * self.p as u64 % order;
        }
        // e = p^k mod (q-1); when it reduces to 0 the power is 1 for a != 0.
        let k = (self.log[a.0 as usize] as u64 * e) % order;
        Elem(self.exp[k as usize])
    }

    /// Norm to the prime field: a * a^p * .. * a^(p^(n-1)).
    pub fn norm(&self, a: Elem) -> Elem {
        let e = (self.q as u64 - 1) / (self.p as u64 - 1);
        self.pow(a, e)
    }

    /// Value of a prime-field element as an integer in [0, p).
    pub fn prime_value(&self, a: Elem) -> Option<u32> {
        (a.0 < self.p).then_some(a.0)
    }

    /// True if `a` lies in the subfield with `p^d` elements.
    pub fn in_subfield(&self, a: Elem, d: u32) -> bool {
        self.frobenius_pow(a, d) == a
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a.0 == 0 || self.p == 2 || self.log[a.0 as usize].is_multiple_of(2)
    }

    pub fn format(&self, a: Elem) -> String {
        if self.n == 1 {
            return a.0.to_string();
        }
        let digits = self.digits(a);
        let mut parts = Vec::new();
        for (k, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let coeff = if d == 1 && k > 0 {
                String::new()
            } else {
                d.to_string()
            };
            parts.push(match k {
                0 => coeff,
                1 => format!("{coeff}g"),
                _ => format!("{coeff}g^{k}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// Every element of the field, in code order, subject to the enumeration
/// bound.
pub fn enumerate_field(field: &Field) -> Result<Vec<Elem>> {
    let q = field.order() as u64;
    if q > field.config.max_enumeration {
        return Err(Error::BoundExceeded {
            what: "field enumeration",
            size: q,
            bound: field.config.max_enumeration,
        });
    }
    Ok(field.elements().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element bundled with its field.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Field,
    elem: Elem,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.elem == other.elem && same_field(&self.field, &other.field)
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(field: &Field, elem: Elem) -> Self {
        FieldElement {
            field: field.clone(),
            elem,
        }
    }

    pub fn from_digits(field: &Field, digits: &[u32]) -> Result<Self> {
        Ok(Self::new(field, field.from_digits(digits)?))
    }

    pub fn from_int(field: &Field, v: i64) -> Self {
        Self::new(field, field.from_int(v))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn elem(&self) -> Elem {
        self.elem
    }

    pub fn digits(&self) -> Vec<u32> {
        self.field.digits(self.elem)
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    pub fn arith(&self, rhs: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        fe_arith(self, rhs, op)
    }

    pub fn frobenius(&self) -> FieldElement {
        Self::new(&self.field, self.field.frobenius(self.elem))
    }

    pub fn norm(&self) -> FieldElement {
        Self::new(&self.field, self.field.norm(self.elem))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.elem))
    }
}

pub fn fe_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    ensure_same(&a.field, &b.field)?;
    let f = &a.field;
    let elem = match op {
        ArithOp::Add => f.add(a.elem, b.elem),
        ArithOp::Sub => f.sub(a.elem, b.elem),
        ArithOp::Mul => f.mul(a.elem, b.elem),
        ArithOp::Div => f.div(a.elem, b.elem)?,
    };
    Ok(FieldElement::new(f, elem))
}

/// An injective homomorphism GF(p^n) -> GF(p^(n*m)).
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Field,
    target: Field,
    /// Images of 1, g, g^2, .., g^(n-1).
    basis_images: Vec<Elem>,
}

impl Embedding {
    pub fn identity(field: &Field) -> Self {
        let basis_images = (0..field.degree())
            .map(|k| field.pow(field.generator(), k as u64))
            .map(|e| if field.degree() == 1 { Elem::ONE } else { e })
            .collect();
        Embedding {
            source: field.clone(),
            target: field.clone(),
            basis_images,
        }
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    /// Degree of the target over the source.
    pub fn relative_degree(&self) -> u32 {
        self.target.degree() / self.source.degree()
    }

    pub fn map(&self, a: Elem) -> Elem {
        let t = &self.target;
        self.source
            .digits(a)
            .iter()
            .zip(&self.basis_images)
            .fold(Elem::ZERO, |acc, (&d, &b)| {
                t.add(acc, t.mul(t.from_int(d as i64), b))
            })
    }

    /// True if `a` lies in the image of the source field.
    pub fn contains(&self, a: Elem) -> bool {
        self.target.in_subfield(a, self.source.degree())
    }

    pub fn preimage(&self, a: Elem) -> Option<Elem> {
        let t = &self.target;
        let p = t.characteristic();
        let rows = t.degree() as usize;
        let cols = self.basis_images.len();
        let mut matrix = vec![vec![0u32; cols]; rows];
        for (j, &b) in self.basis_images.iter().enumerate() {
            for (i, d) in t.digits(b).into_iter().enumerate() {
                matrix[i][j] = d;
            }
        }
        let (sol, _) = solve_affine(matrix, t.digits(a), p)?;
        self.source.from_digits(&sol).ok()
    }
}

/// Extension of degree `m` over `field`, with the embedding of `field` into
/// it. The target uses the default modulus of degree `n*m` over GF(p).
pub fn find_extension(field: &Field, m: u32) -> Result<Embedding> {
    if m == 0 {
        return Err(Error::BadModulus(
            "extension degree must be at least 1".into(),
        ));
    }
    if m == 1 {
        return Ok(Embedding::identity(field));
    }
    let p = field.characteristic();
    let n = field.degree();
    let target = FieldCtx::with_config(p, n * m, None, field.config())?;
    let modulus: Vec<Elem> = field
        .modulus()
        .iter()
        .map(|&c| target.from_int(c as i64))
        .collect();
    let root = if n == 1 {
        // modulus is x - c for some c in GF(p)
        Some(target.neg(modulus[0]))
    } else {
        target.elements().find(|&x| {
            modulus
                .iter()
                .rev()
                .fold(Elem::ZERO, |acc, &c| target.add(target.mul(acc, x), c))
                .is_zero()
        })
    };
    let root = root.ok_or(Error::NoIrreducibleFound { p, degree: n * m })?;
    let basis_images = (0..n)
        .map(|k| {
            if n == 1 {
                Elem::ONE
            } else {
                target.pow(root, k as u64)
            }
        })
        .collect();
    Ok(Embedding {
        source: field.clone(),
        target,
        basis_images,
    })
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Solve `matrix * x = rhs` over GF(p). Returns one solution together with
/// a basis of the kernel, or `None` if the system is inconsistent.
pub(crate) fn solve_affine(
    mut matrix: Vec<Vec<u32>>,
    mut rhs: Vec<u32>,
    p: u32,
) -> Option<(Vec<u32>, Vec<Vec<u32>>)> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| matrix[i][c] != 0) else {
            continue;
        };
        matrix.swap(r, pr);
        rhs.swap(r, pr);
        let inv = inv_mod(matrix[r][c], p);
        for v in matrix[r].iter_mut() {
            *v = (*v as u64 * inv as u64 % p as u64) as u32;
        }
        rhs[r] = (rhs[r] as u64 * inv as u64 % p as u64) as u32;
        for i in 0..rows {
            if i != r && matrix[i][c] != 0 {
                let f = matrix[i][c];
                for j in 0..cols {
                    let sub = (f as u64 * matrix[r][j] as u64 % p as u64) as u32;
                    matrix[i][j] = (matrix[i][j] + p - sub) % p;
                }
                let sub = (f as u64 * rhs[r] as u64 % p as u64) as u32;
                rhs[i] = (rhs[i] + p - sub) % p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|&v| v != 0) {
        return None;
    }
    let mut sol = vec![0u32; cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rhs[i];
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u32; cols];
            v[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = (p - matrix[i][f]) % p;
            }
            v
        })
        .collect();
    Some((sol, kernel))
}

/// Dense polynomials over GF(p), coefficient vectors low degree first.
mod gfp {
    pub fn encode(digits: &[u32], p: u32) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    pub fn decode(mut code: u32, p: u32, n: u32) -> Vec<u32> {
        (0..n)
            .map(|_| {
                let d = code % p;
                code /= p;
                d
            })
            .collect()
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        while r.len() > dm {
            let lead = r.pop().unwrap();
            if lead != 0 {
                let shift = r.len() - dm;
                for (k, &c) in m[..dm].iter().enumerate() {
                    let sub = (lead as u64 * c as u64 % p as u64) as u32;
                    r[shift + k] = (r[shift + k] + p - sub) % p;
                }
            }
        }
        r.resize(dm, 0);
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut prod = vec![0u32; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        rem(&prod, m, p)
    }

    fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let n = m.len() - 1;
        let mut result = vec![0u32; n];
        result[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        result
    }

    /// Exhaustive search for monic factors of degree 1..=n/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() as u32 - 1;
        for d in 1..=n / 2 {
            for code in 0..p.pow(d) {
                let mut g = decode(code, p, d);
                g.push(1);
                if rem(f, &g, p).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    /// The first monic irreducible polynomial of degree `n`, ordering
    /// candidates by the code of their lower coefficients (highest
    /// coefficient most significant).
    pub fn default_modulus(p: u32, n: u32) -> Option<Vec<u32>> {
        (0..p.pow(n)).find_map(|code| {
            let mut f = decode(code, p, n);
            f.push(1);
            is_irreducible(&f, p).then_some(f)
        })
    }

    fn prime_factors(mut m: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= m {
            if m.is_multiple_of(d) {
                out.push(d);
                while m.is_multiple_of(d) {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            out.push(m);
        }
        out
    }

    pub fn primitive_element(p: u32, n: u32, q: u32, modulus: &[u32]) -> u32 {
        let order = q as u64 - 1;
        let factors = prime_factors(order);
        (1..q)
            .find(|&c| {
                let a = decode(c, p, n);
                factors.iter().all(|&r| {
                    let x = powmod(&a, order / r, modulus, p);
                    !(x[0] == 1 && x[1..].iter().all(|&v| v == 0))
                })
            })
            .expect("multiplicative group of a finite field is cyclic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, n: u32) -> Field {
        FieldCtx::new(p, n, None).unwrap()
    }

    #[test]
    fn prime_field_basics() {
        let f = gf(2, 1);
        assert_eq!(f.add(Elem::ONE, Elem::ONE), Elem::ZERO);
        let f5 = gf(5, 1);
        assert_eq!(
            f5.div(f5.from_int(2), f5.from_int(3)).unwrap(),
            f5.from_int(4)
        );
        assert_eq!(f5.div(Elem::ONE, Elem::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn gf4_generator_squares_to_g_plus_one() {
        let f = gf(2, 2);
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let g = f.from_digits(&[0, 1]).unwrap();
        let g_plus_1 = f.from_digits(&[1, 1]).unwrap();
        assert_eq!(f.mul(g, g), g_plus_1);
        assert_eq!(f.frobenius(g), g_plus_1);
        assert_eq!(f.norm(g), Elem::ONE);
    }

    #[test]
    fn gf9_frobenius_negates_generator() {
        let f = gf(3, 2);
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let x = f.from_digits(&[0, 1]).unwrap();
        let minus_x = f.from_digits(&[0, 2]).unwrap();
        assert_eq!(f.frobenius(x), minus_x);
    }

    #[test]
    fn default_moduli() {
        assert_eq!(gf(2, 3).modulus(), &[1, 1, 0, 1]);
        assert_eq!(gf(2, 4).modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(gf(5, 1).modulus(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FieldCtx::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(
            FieldCtx::new(17, 1, None),
            Err(Error::PrimeTooLarge { .. })
        ));
        assert!(matches!(
            FieldCtx::new(2, 2, Some(vec![1, 0, 1])),
            Err(Error::BadModulus(_))
        ));
        assert!(matches!(
            FieldCtx::new(2, 21, None),
            Err(Error::BoundExceeded { .. })
        ));
        let cfg = FieldConfig {
            max_prime: 17,
            ..Default::default()
        };
        assert!(FieldCtx::with_config(17, 1, None, cfg).is_ok());
    }

    #[test]
    fn enumeration_order_and_bound() {
        assert_eq!(enumerate_field(&gf(2, 1)).unwrap(), vec![Elem(0), Elem(1)]);
        assert_eq!(
            enumerate_field(&gf(3, 1)).unwrap(),
            vec![Elem(0), Elem(1), Elem(2)]
        );
        let four = enumerate_field(&gf(2, 2)).unwrap();
        assert_eq!(four.len(), 4);
        assert_eq!(four[0], Elem::ZERO);
        let cfg = FieldConfig {
            max_enumeration: 8,
            ..Default::default()
        };
        let f = FieldCtx::with_config(2, 4, None, cfg).unwrap();
        assert!(matches!(
            enumerate_field(&f),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn extension_embeddings() {
        let f2 = gf(2, 1);
        let id = find_extension(&f2, 1).unwrap();
        assert!(Arc::ptr_eq(id.source(), id.target()));

        let e = find_extension(&f2, 2).unwrap();
        assert_eq!(e.target().order(), 4);
        assert_eq!(e.map(Elem::ZERO), Elem::ZERO);
        assert_eq!(e.map(Elem::ONE), Elem::ONE);

        let f4 = gf(2, 2);
        let e = find_extension(&f4, 2).unwrap();
        let t = e.target();
        let g = e.map(f4.generator());
        assert_eq!(t.add(t.add(t.mul(g, g), g), Elem::ONE), Elem::ZERO);
        for a in f4.elements() {
            let img = e.map(a);
            assert!(e.contains(img));
            assert_eq!(e.preimage(img), Some(a));
        }
        let outside = t.elements().find(|&x| !e.contains(x)).unwrap();
        assert_eq!(e.preimage(outside), None);
    }

    #[test]
    fn wrapper_rejects_cross_field_operations() {
        let a = FieldElement::from_int(&gf(2, 1), 1);
        let b = FieldElement::from_int(&gf(3, 1), 1);
        assert_eq!(a.arith(&b, ArithOp::Add), Err(Error::CtxMismatch));
        let c = FieldElement::from_int(&gf(3, 1), 2);
        assert_eq!(
            b.arith(&c, ArithOp::Add).unwrap(),
            FieldElement::from_int(&gf(3, 1), 0)
        );
    }

    #[test]
    fn affine_solver() {
        // x + y = 1, y = 1 over GF(3)
        let (sol, ker) = solve_affine(vec![vec![1, 1], vec![0, 1]], vec![1, 1], 3).unwrap();
        assert_eq!(sol, vec![0, 1]);
        assert!(ker.is_empty());
        let (_, ker) = solve_affine(vec![vec![1, 1]], vec![0], 2).unwrap();
        assert_eq!(ker, vec![vec![1, 1]]);
        assert!(solve_affine(vec![vec![0, 0]], vec![1], 2).is_none());
    }
}
