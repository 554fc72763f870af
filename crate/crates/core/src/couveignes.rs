//! Couveignes' relations on the coefficients of a homomorphism `U: F -> F'`.
//!
//! Relations are never expanded symbolically. Each one is evaluated as a
//! residual with the unknown coefficient set to zero, and the dependence on
//! the unknown is known in closed form: linear with a binomial slope at
//! indices that are not powers of p, and `v1' x^q - v1^i x` at powers of p.

use crate::error::{Error, Result};
use crate::field::{ensure_same, solve_affine, Elem, Embedding, Field};
use crate::formal_group::{default_prec, group_law, mult_by_n, FormalGroupLaw, WeierstrassCurve};
use crate::hom::{check_hom, series_height, v_factor_series, FglHom, Height};
use crate::series::TruncSeries;

/// Default cap on the number of enumerated solutions.
pub const DEFAULT_BUDGET: usize = 1 << 16;

pub fn is_p_power(mut i: usize, p: usize) -> bool {
    if i == 0 {
        return false;
    }
    while i.is_multiple_of(p) {
        i /= p;
    }
    i == 1
}

/// Largest power of `p` not exceeding `i` (`i >= 1`).
fn largest_p_power(i: usize, p: usize) -> usize {
    let mut k = 1;
    while k * p <= i {
        k *= p;
    }
    k
}

/// `binom(n, k) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut n: usize, mut k: usize, p: usize) -> u32 {
    let mut acc = 1usize;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        // small binomial by the multiplicative formula, mod p
        let mut c = 1usize;
        for j in 0..b {
            c = c * (a - j) / (j + 1);
        }
        acc = acc * (c % p) % p;
        n /= p;
        k /= p;
    }
    acc as u32
}

/// Everything the relations for homomorphisms `source -> target` need.
#[derive(Clone, Debug)]
pub struct RelationCtx {
    source: FormalGroupLaw,
    target: FormalGroupLaw,
    height: u32,
    q: usize,
    /// `[p]_F = V(t^q)` and `[p]_F' = V'(t^q)`.
    v: TruncSeries,
    v_prime: TruncSeries,
}

/// Precision of the laws needed to state every relation of index `<= upto`
/// for laws of height `h`.
pub fn required_prec(p: u32, h: u32, upto: usize) -> usize {
    let q = (p as usize).pow(h);
    (upto + 1).max(q * largest_p_power(upto.max(1), p as usize) + 1)
}

impl RelationCtx {
    pub fn new(source: &FormalGroupLaw, target: &FormalGroupLaw) -> Result<Self> {
        ensure_same(source.field(), target.field())?;
        let p = source.field().characteristic() as i64;
        let p_source = mult_by_n(source, p);
        let p_target = mult_by_n(target, p);
        let (h, h_prime) = (series_height(&p_source)?, series_height(&p_target)?);
        if h != h_prime {
            return Err(Error::HeightMismatch(h, h_prime));
        }
        let h = match h {
            Height::Finite(h) if h > 0 => h,
            other => return Err(Error::HeightOutOfRange(other)),
        };
        let v = v_factor_series(&p_source, h);
        let v_prime = v_factor_series(&p_target, h);
        if v.prec() < 2 || v_prime.prec() < 2 {
            return Err(Error::InsufficientPrecision {
                needed: 2 * (p as usize).pow(h) + 1,
                available: source.prec().min(target.prec()),
            });
        }
        Ok(RelationCtx {
            source: source.clone(),
            target: target.clone(),
            height: h,
            q: (p as usize).pow(h),
            v,
            v_prime,
        })
    }

    /// Builds the laws of two curves at a precision sufficient for every
    /// relation of index `<= upto`.
    pub fn from_curves(
        source: &WeierstrassCurve,
        target: &WeierstrassCurve,
        upto: usize,
    ) -> Result<Self> {
        let p = source.field().characteristic();
        let first = (upto + 1).max(default_prec(p));
        let ctx = Self::new(&group_law(source, first), &group_law(target, first))?;
        let needed = required_prec(p, ctx.height, upto);
        if needed <= first {
            return Ok(ctx);
        }
        Self::new(&group_law(source, needed), &group_law(target, needed))
    }

    pub fn field(&self) -> &Field {
        self.source.field()
    }

    pub fn source(&self) -> &FormalGroupLaw {
        &self.source
    }

    pub fn target(&self) -> &FormalGroupLaw {
        &self.target
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn v1(&self) -> Elem {
        self.v.coeff(&[1]).expect("checked at construction")
    }

    pub fn v1_prime(&self) -> Elem {
        self.v_prime.coeff(&[1]).expect("checked at construction")
    }

    /// Largest index whose relation can be evaluated with the stored
    /// precision.
    pub fn max_index(&self) -> usize {
        let p = self.field().characteristic() as usize;
        let generic = self.source.prec().min(self.target.prec()) - 1;
        let sigma = self.v.prec().min(self.v_prime.prec()) - 1;
        // p-power indices need sigma precision; the next one above
        // `sigma` caps everything
        let mut k = 1;
        while k <= sigma {
            k *= p;
        }
        generic.min(k - 1)
    }

    /// The same relations over a larger field.
    pub fn lift(&self, emb: &Embedding) -> Self {
        let map = |s: &TruncSeries| s.map_coeffs(emb.target(), |c| emb.map(c));
        RelationCtx {
            source: self.source.lift(emb),
            target: self.target.lift(emb),
            height: self.height,
            q: self.q,
            v: map(&self.v),
            v_prime: map(&self.v_prime),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i > self.max_index() {
            let p = self.field().characteristic();
            let needed = required_prec(p, self.height, i);
            return Err(Error::InsufficientPrecision {
                needed,
                available: self.source.prec().min(self.target.prec()),
            });
        }
        Ok(())
    }

    /// Homogeneous degree-`i` part of `U(F(X,Y)) - F'(U(X),U(Y))`, indexed by
    /// the exponent `m` of `Y`. Only `u_1 .. u_i` matter.
    fn generic_residual(&self, u: &[Elem], i: usize) -> Vec<Elem> {
        let f = self.field();
        let prec = i + 1;
        let mut coeffs = vec![Elem::ZERO; prec];
        for (j, &c) in u.iter().enumerate().take(i) {
            coeffs[j + 1] = c;
        }
        let us = TruncSeries::univariate(f, &coeffs, prec);
        let left = us
            .compose(&[self.source.series().truncate(prec)])
            .expect("zero constant term");
        let ux = us.rename_vars(2, &[0]);
        let uy = us.rename_vars(2, &[1]);
        let right = self
            .target
            .series()
            .truncate(prec)
            .compose(&[ux, uy])
            .expect("zero constant term");
        let diff = &left.truncate(prec) - &right.truncate(prec);
        let mut r = vec![Elem::ZERO; i + 1];
        for (e, c) in diff.homogeneous_part(i) {
            r[e[1] as usize] = c;
        }
        r
    }

    /// `V'(U^(q)(s)) - U(V(s))` in the variable `s = t^q`, known below
    /// `prec`.
    fn ppower_defect(&self, u: &[Elem], prec: usize) -> TruncSeries {
        let f = self.field();
        let mut coeffs = vec![Elem::ZERO; prec];
        let mut twisted = vec![Elem::ZERO; prec];
        for (j, &c) in u.iter().enumerate().take(prec.saturating_sub(1)) {
            coeffs[j + 1] = c;
            twisted[j + 1] = f.pow(c, self.q as u64);
        }
        let us = TruncSeries::univariate(f, &coeffs, prec);
        let uq = TruncSeries::univariate(f, &twisted, prec);
        let left = self
            .v_prime
            .truncate(prec)
            .compose(&[uq])
            .expect("zero constant term");
        let right = us
            .compose(&[self.v.truncate(prec)])
            .expect("zero constant term");
        &left.truncate(prec) - &right.truncate(prec)
    }
}

/// Coefficients `u_1 .. u_(i-1)` solving the first `i - 1` relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSolution {
    field: Field,
    coeffs: Vec<Elem>,
}

impl PartialSolution {
    pub fn new(field: &Field, coeffs: Vec<Elem>) -> Self {
        PartialSolution {
            field: field.clone(),
            coeffs,
        }
    }

    /// The coefficients `u_1, u_2, ..` of a series, below index `len + 1`.
    pub fn from_series(u: &TruncSeries, len: usize) -> Self {
        let coeffs = (1..=len)
            .map(|j| u.coeff(&[j as u32]).expect("within precision"))
            .collect();
        PartialSolution {
            field: u.field().clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Index of the next unknown coefficient.
    pub fn next_index(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn push(&mut self, c: Elem) {
        self.coeffs.push(c);
    }

    /// `sum u_j t^j` known below `len + 1`.
    pub fn series(&self) -> TruncSeries {
        let mut c = vec![Elem::ZERO];
        c.extend_from_slice(&self.coeffs);
        let prec = c.len();
        TruncSeries::univariate(&self.field, &c, prec)
    }
}

fn check_partial(ctx: &RelationCtx, partial: &PartialSolution, i: usize) -> Result<()> {
    ensure_same(ctx.field(), partial.field())?;
    if i == 0 || partial.next_index() != i {
        return Err(Error::BadIndex(i));
    }
    ctx.check_index(i)
}

/// The coefficient `u_i` forced by `u_1 .. u_(i-1)` when `i` is not a power
/// of p.
pub fn next_coeff_generic(ctx: &RelationCtx, partial: &PartialSolution, i: usize) -> Result<Elem> {
    let f = ctx.field();
    let p = f.characteristic() as usize;
    if i < 2 || is_p_power(i, p) {
        return Err(Error::BadIndex(i));
    }
    check_partial(ctx, partial, i)?;
    let r = ctx.generic_residual(partial.coeffs(), i);
    let m = (1..i)
        .find(|&m| binom_mod_p(i, m, p) != 0)
        .ok_or(Error::NoUnitBinomial(i))?;
    let slope = f.from_int(binom_mod_p(i, m, p) as i64);
    let u = f.neg(f.div(r[m], slope)?);
    // the same value must cancel every power of the auxiliary variable
    for (k, &rk) in r.iter().enumerate() {
        let mut s = binom_mod_p(i, k, p) as i64;
        if k == 0 || k == i {
            s -= 1;
        }
        if !f.add(rk, f.mul(u, f.from_int(s))).is_zero() {
            return Err(Error::RelationInconsistent(i));
        }
    }
    Ok(u)
}

/// All roots in the context's field of `v1' x^q - v1^i x + M_i = 0`, in
/// increasing element order, for `i` a power of p.
pub fn next_coeff_ppower(
    ctx: &RelationCtx,
    partial: &PartialSolution,
    i: usize,
) -> Result<Vec<Elem>> {
    let f = ctx.field();
    let p = f.characteristic() as usize;
    if !is_p_power(i, p) {
        return Err(Error::BadIndex(i));
    }
    check_partial(ctx, partial, i)?;
    if i > 1 {
        // u_i drops out of the generic form of the relation at a power of
        // p; what remains must already vanish
        if ctx
            .generic_residual(partial.coeffs(), i)
            .iter()
            .any(|c| !c.is_zero())
        {
            return Err(Error::RelationInconsistent(i));
        }
    }
    let m_i = ctx
        .ppower_defect(partial.coeffs(), i + 1)
        .coeff(&[i as u32])
        .expect("within precision");
    let slope_q = ctx.v1_prime();
    let slope_1 = f.pow(ctx.v1(), i as u64);
    let q = ctx.q as u64;
    let linear = |x: Elem| f.sub(f.mul(slope_q, f.pow(x, q)), f.mul(slope_1, x));
    Ok(solve_twisted_linear(f, linear, f.neg(m_i)))
}

/// All `x` with `map(x) = rhs` for a GF(p)-linear `map` on `field`.
fn solve_twisted_linear(field: &Field, map: impl Fn(Elem) -> Elem, rhs: Elem) -> Vec<Elem> {
    let p = field.characteristic();
    let n = field.degree() as usize;
    let mut matrix = vec![vec![0u32; n]; n];
    for j in 0..n {
        let mut e = vec![0u32; n];
        e[j] = 1;
        let image = map(field.from_digits(&e).expect("basis vector"));
        for (i, d) in field.digits(image).into_iter().enumerate() {
            matrix[i][j] = d;
        }
    }
    let Some((particular, kernel)) = solve_affine(matrix, field.digits(rhs), p) else {
        return Vec::new();
    };
    let base = field.from_digits(&particular).expect("digits in range");
    let kernel: Vec<Elem> = kernel
        .iter()
        .map(|v| field.from_digits(v).expect("digits in range"))
        .collect();
    let mut roots = vec![base];
    for k in kernel {
        let mut next = Vec::with_capacity(roots.len() * p as usize);
        for &r in &roots {
            let mut x = r;
            for _ in 0..p {
                next.push(x);
                x = field.add(x, k);
            }
        }
        roots = next;
    }
    roots.sort();
    roots
}

/// Residuals of the relations at one index. Both must vanish for the
/// coefficients of a homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationResidual {
    pub index: usize,
    /// Degree-`index` part of `U(F(X,Y)) - F'(U(X),U(Y))`, by power of `Y`.
    pub generic: Vec<Elem>,
    /// `v1' u_i^q - v1^i u_i + M_i` at powers of p.
    pub ppower: Option<Elem>,
}

impl RelationResidual {
    pub fn is_zero(&self) -> bool {
        self.generic.iter().all(|c| c.is_zero()) && self.ppower.is_none_or(|c| c.is_zero())
    }
}

/// Evaluates every relation of index `1 ..= upto` at `u = (u_1, u_2, ..)`.
pub fn relation_residuals(
    ctx: &RelationCtx,
    u: &[Elem],
    upto: usize,
) -> Result<Vec<RelationResidual>> {
    ctx.check_index(upto)?;
    if u.len() < upto {
        return Err(Error::BadIndex(upto));
    }
    let f = ctx.field();
    let p = f.characteristic() as usize;
    let prec = upto + 1;
    let mut coeffs = vec![Elem::ZERO; prec];
    coeffs[1..].copy_from_slice(&u[..upto]);
    let us = TruncSeries::univariate(f, &coeffs, prec);
    let left = us.compose(&[ctx.source.series().truncate(prec)])?;
    let right = ctx
        .target
        .series()
        .truncate(prec)
        .compose(&[us.rename_vars(2, &[0]), us.rename_vars(2, &[1])])?;
    let diff = &left.truncate(prec) - &right.truncate(prec);
    let defect = ctx.ppower_defect(&u[..upto], largest_p_power(upto, p) + 1);
    Ok((1..=upto)
        .map(|i| {
            let mut generic = vec![Elem::ZERO; i + 1];
            for (e, c) in diff.homogeneous_part(i) {
                generic[e[1] as usize] = c;
            }
            let ppower =
                is_p_power(i, p).then(|| defect.coeff(&[i as u32]).expect("within precision"));
            RelationResidual {
                index: i,
                generic,
                ppower,
            }
        })
        .collect())
}

/// Result of enumerating all solutions of the first `bound` relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub bound: usize,
    /// Degree of the solve field over the base field.
    pub solve_degree: u32,
    pub field: Field,
    /// Each solution is `(u_1, .., u_bound)`, in depth-first order.
    pub solutions: Vec<Vec<Elem>>,
    /// Roots missing across all branching steps: `q - #roots`, summed.
    pub splitting_deficit: usize,
}

/// Depth-first enumeration of all `(u_1, .., u_bound)` over the context's
/// field. `solve_degree` is recorded in the result only.
pub fn enumerate_truncations(
    ctx: &RelationCtx,
    bound: usize,
    solve_degree: u32,
    budget: usize,
) -> Result<Enumeration> {
    ctx.check_index(bound)?;
    let p = ctx.field().characteristic() as usize;
    let mut solutions = Vec::new();
    let mut deficit = 0usize;
    let mut stack = vec![PartialSolution::new(ctx.field(), Vec::new())];
    while let Some(partial) = stack.pop() {
        let i = partial.next_index();
        if i > bound {
            if solutions.len() == budget {
                return Err(Error::BudgetExceeded(budget));
            }
            solutions.push(partial.coeffs);
            continue;
        }
        if is_p_power(i, p) {
            let roots = next_coeff_ppower(ctx, &partial, i)?;
            deficit += ctx.q - roots.len();
            // pushed in reverse so that smaller roots are explored first
            for &r in roots.iter().rev() {
                let mut next = partial.clone();
                next.push(r);
                stack.push(next);
            }
        } else {
            let u = next_coeff_generic(ctx, &partial, i)?;
            let mut next = partial;
            next.push(u);
            stack.push(next);
        }
    }
    Ok(Enumeration {
        bound,
        solve_degree,
        field: ctx.field().clone(),
        solutions,
        splitting_deficit: deficit,
    })
}

/// Enumerates over extensions of degree `start, 2 start, 4 start, ..` of
/// the base field until every branching step splits. When the next
/// extension would exceed the field bound, the last enumeration is returned
/// with its nonzero deficit.
pub fn enumerate_auto(
    ctx: &RelationCtx,
    bound: usize,
    start: u32,
    budget: usize,
) -> Result<(Enumeration, Embedding)> {
    let base = ctx.field();
    let mut m = start.max(1);
    let mut last = None;
    loop {
        let too_big = (base.degree() * m) as f64 * (base.characteristic() as f64).log2()
            > (base.config().max_order as f64).log2();
        if too_big {
            return last.ok_or(Error::BoundExceeded {
                what: "solve field",
                size: (base.characteristic() as u64).saturating_pow(base.degree() * m),
                bound: base.config().max_order,
            });
        }
        let emb = crate::field::find_extension(base, m)?;
        let lifted = ctx.lift(&emb);
        let e = enumerate_truncations(&lifted, bound, m, budget)?;
        if e.splitting_deficit == 0 {
            return Ok((e, emb));
        }
        last = Some((e, emb));
        m *= 2;
    }
}

/// Extends a solution of the first `len` relations to a homomorphism known
/// below `extend_to`, and checks it. At each power of p every root is tried
/// in order; a branch is abandoned as soon as the homomorphism identity
/// fails at the current degree.
pub fn certify_solution(ctx: &RelationCtx, solution: &[Elem], extend_to: usize) -> Result<FglHom> {
    let f = ctx.field();
    let p = f.characteristic() as usize;
    if extend_to <= solution.len() {
        return Err(Error::BadIndex(extend_to));
    }
    ctx.check_index(extend_to - 1)?;
    if !solution.is_empty() {
        if let Some(bad) = relation_residuals(ctx, solution, solution.len())?
            .iter()
            .find(|r| !r.is_zero())
        {
            return Err(Error::RelationInconsistent(bad.index));
        }
    }
    let mut missing_roots: Option<usize> = None;
    let mut stack = vec![PartialSolution::new(f, solution.to_vec())];
    while let Some(partial) = stack.pop() {
        let i = partial.next_index();
        if i == extend_to {
            let u = partial.series();
            if check_hom(&u, &ctx.source, &ctx.target, extend_to)?.ok {
                return FglHom::new(u, &ctx.source, &ctx.target);
            }
            continue;
        }
        if is_p_power(i, p) {
            if i > 1 && !check_hom(&partial.series(), &ctx.source, &ctx.target, i)?.ok {
                continue;
            }
            let roots = match next_coeff_ppower(ctx, &partial, i) {
                Ok(r) => r,
                Err(Error::RelationInconsistent(_)) => continue,
                Err(e) => return Err(e),
            };
            if roots.is_empty() {
                missing_roots.get_or_insert(i);
            }
            for &r in roots.iter().rev() {
                let mut next = partial.clone();
                next.push(r);
                stack.push(next);
            }
        } else {
            match next_coeff_generic(ctx, &partial, i) {
                Ok(u) => {
                    let mut next = partial;
                    next.push(u);
                    stack.push(next);
                }
                Err(Error::RelationInconsistent(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Err(match missing_roots {
        Some(i) => Error::RootsOutsideField(i),
        None => Error::NoBranchSurvives(solution.len() + 1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalityReport {
    /// Solutions vanishing below `p^k` with every coefficient in the base.
    pub rational: Vec<Vec<Elem>>,
    /// Number of solutions vanishing below `p^k`.
    pub vanishing: usize,
}

impl RationalityReport {
    pub fn all_vanishing_rational(&self) -> bool {
        self.rational.len() == self.vanishing
    }
}

/// Keeps the solutions with `u_i = 0` for `i < p^k` whose coefficients lie
/// in the image of `emb` (the base field inside the solve field). Only
/// meaningful for laws of height one.
pub fn rationality_filter(
    ctx: &RelationCtx,
    solutions: &[Vec<Elem>],
    k: u32,
    emb: &Embedding,
) -> Result<RationalityReport> {
    if ctx.height != 1 {
        return Err(Error::HeightNotOne);
    }
    let p = ctx.field().characteristic() as usize;
    let cutoff = p.pow(k);
    let vanishing: Vec<&Vec<Elem>> = solutions
        .iter()
        .filter(|s| s.iter().take(cutoff - 1).all(|c| c.is_zero()))
        .collect();
    let rational = vanishing
        .iter()
        .filter(|s| s.iter().all(|&c| emb.contains(c)))
        .map(|s| (*s).clone())
        .collect();
    Ok(RationalityReport {
        rational,
        vanishing: vanishing.len(),
    })
}
