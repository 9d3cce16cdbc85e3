// SPDX-License-Identifier: Apache-2.0

//! Legendre polynomials over `Z[1/2]` and modulo `p`, with checks of their
//! classical congruences and identities.
//!
//! `P_r` is built three ways (three-term recursion, two closed forms) and
//! reduced modulo `p` three ways (exact reduction, Lucas-reduced closed-form
//! coefficients, Ille–Schur digit product). The checks here compare those
//! routes and verify the mod-`p` identities that tie `P_r` to correlation
//! coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{base_digits, binomial, binomial_mod_p};
use crate::fields::{mod_inv, mod_pow, FieldCtx, FieldElem, FieldError, FieldLevel};
use crate::polyx::{rational_string, Dyadic, DyadicPoly, FqPoly};
use crate::report::{bracket, IdentityRow};

use FieldLevel::Prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LegendreError {
    #[error("index {r} outside the admissible range (limit {limit})")]
    OutOfRange { r: u64, limit: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Explicit closed forms of `P_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplicitForm {
    /// `2^{-r} Σ (-1)^{(r-i)/2} C(r,(r-i)/2) C(r+i,i) x^i`
    Binomial,
    /// `2^{-r} Σ (-1)^{(r-i)/2} C(r,i) C(r-i,(r-i)/2) (1-x^2)^{(r-i)/2} (2x)^i`
    Trigonometric,
}

/// `S_r = {i ≤ r : i ≡ r mod 2}`
pub fn parity_indices(r: u64) -> impl Iterator<Item = u64> {
    (r % 2..=r).step_by(2)
}

/// Frozen table `P_0, …, P_R` built by the recursion.
#[derive(Debug, Clone)]
pub struct LegendreCache {
    polys: Vec<DyadicPoly>,
}

impl LegendreCache {
    pub fn new(bound: u64) -> Self {
        let mut polys = vec![DyadicPoly::from_ints(&[1])];
        if bound >= 1 {
            polys.push(DyadicPoly::x());
        }
        let x = DyadicPoly::x();
        for r in 1..bound {
            let (prev, cur) = (&polys[r as usize - 1], &polys[r as usize]);
            let next = x
                .mul(cur)
                .scalar_mul(&Dyadic::from_int(2 * r as i64 + 1))
                .sub(&prev.scalar_mul(&Dyadic::from_int(r as i64)))
                .div_int(r as i64 + 1)
                .expect("Legendre coefficients are dyadic");
            polys.push(next);
        }
        LegendreCache { polys }
    }

    pub fn bound(&self) -> u64 {
        self.polys.len() as u64 - 1
    }

    pub fn get(&self, r: u64) -> Option<&DyadicPoly> {
        self.polys.get(r as usize)
    }

    pub fn polys(&self) -> &[DyadicPoly] {
        &self.polys
    }

    /// Reductions of every cached polynomial into `F_p[x]`.
    pub fn reduce(&self, ctx: &FieldCtx) -> Vec<FqPoly> {
        self.polys.iter().map(|f| f.reduce_mod_p(ctx)).collect()
    }
}

/// `P_r` by the three-term recursion.
pub fn legendre_poly(r: u64) -> DyadicPoly {
    LegendreCache::new(r).polys.pop().expect("nonempty")
}

pub fn legendre_explicit(r: u64, form: ExplicitForm) -> DyadicPoly {
    let mut acc = DyadicPoly::zero();
    for i in parity_indices(r) {
        let h = (r - i) / 2;
        let sign: i64 = if h % 2 == 0 { 1 } else { -1 };
        let term = match form {
            ExplicitForm::Binomial => {
                let c = binomial(r, h) * binomial(r + i, i) * sign;
                DyadicPoly::monomial(Dyadic::new(c, 0), i as usize)
            }
            ExplicitForm::Trigonometric => {
                let c = binomial(r, i) * binomial(r - i, h) * sign;
                let one_minus_x2 = DyadicPoly::from_ints(&[1, 0, -1]);
                let two_x = DyadicPoly::from_ints(&[0, 2]);
                one_minus_x2
                    .pow(h as u32)
                    .mul(&two_x.pow(i as u32))
                    .scalar_mul(&Dyadic::new(c, 0))
            }
        };
        acc = acc.add(&term);
    }
    acc.scalar_mul(&Dyadic::new(BigInt::one(), r as u32))
}

/// `P_r mod p` from the closed-form coefficients reduced with Lucas'
/// theorem; never forms the characteristic-zero coefficients.
pub fn legendre_mod_p(r: u64, ctx: &FieldCtx) -> FqPoly {
    let p = ctx.p();
    let inv2r = mod_pow(mod_inv(2, p), r, p);
    let mut coeffs = vec![0u64; r as usize + 1];
    for i in parity_indices(r) {
        let h = (r - i) / 2;
        let mut c = binomial_mod_p(r, h, p) * binomial_mod_p(r + i, i, p) % p * inv2r % p;
        if h % 2 == 1 {
            c = (p - c) % p;
        }
        coeffs[i as usize] = c;
    }
    FqPoly::new(Prime, coeffs.into_iter().map(|c| ctx.from_int(Prime, c as i64)).collect())
}

/// `Π P_{r_i}(x)^{p^i}` over the base-`p` digits of `r`, computed as
/// `Π P_{r_i}(x^{p^i})` since the coefficients lie in `F_p`.
pub fn ille_schur_product(r: u64, ctx: &FieldCtx) -> FqPoly {
    let p = ctx.p();
    let mut acc = FqPoly::one(ctx, Prime);
    let mut stride = 1usize;
    for d in base_digits(r, p, 1) {
        let f = legendre_mod_p(d, ctx);
        let mut spread = vec![ctx.zero(Prime); f.degree().unwrap_or(0) * stride + 1];
        for (k, &c) in f.coeffs().iter().enumerate() {
            spread[k * stride] = c;
        }
        acc = acc.mul(ctx, &FqPoly::new(Prime, spread)).expect("prime level");
        stride *= p as usize;
    }
    acc
}

/// Outcome of a polynomial identity together with both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCheck {
    pub pass: bool,
    pub lhs: FqPoly,
    pub rhs: FqPoly,
}

pub fn ille_schur_check(r: u64, ctx: &FieldCtx) -> PolyCheck {
    let lhs = legendre_mod_p(r, ctx);
    let rhs = ille_schur_product(r, ctx);
    PolyCheck { pass: lhs == rhs, lhs, rhs }
}

/// `P_{p-1-r} ≡ P_r (mod p)`.
pub fn symmetry_check(r: u64, ctx: &FieldCtx) -> Result<bool, LegendreError> {
    let p = ctx.p();
    if r > p - 1 {
        return Err(LegendreError::OutOfRange { r, limit: p - 1 });
    }
    Ok(legendre_mod_p(p - 1 - r, ctx) == legendre_mod_p(r, ctx))
}

/// `G_i = Σ_{r<p} P_r^i mod p`
pub fn moment_g(i: u32, ctx: &FieldCtx) -> FqPoly {
    let mut acc = FqPoly::zero(Prime);
    for r in 0..ctx.p() {
        let term = legendre_mod_p(r, ctx).pow(ctx, i as u64);
        acc = acc.add(ctx, &term).expect("prime level");
    }
    acc
}

/// `(-2)^{(p-1)/2} mod p`, as an element of `F_p`.
fn legendre_symbol_minus_two(ctx: &FieldCtx) -> FieldElem {
    ctx.pow(ctx.from_int(Prime, -2), (ctx.p() - 1) / 2)
}

/// Both sum identities: `Σ P_r ≡ (-2/p)(x-1)^{(p-1)/2}` and
/// `Σ P_r^2 ≡ (x^2-1)^{(p-1)/2}`, as exact identities in `F_p[x]`.
pub fn lemma61_check(ctx: &FieldCtx) -> (PolyCheck, PolyCheck) {
    let half = (ctx.p() - 1) / 2;
    let lhs1 = moment_g(1, ctx);
    let rhs1 = FqPoly::from_ints(ctx, Prime, &[-1, 1])
        .pow(ctx, half)
        .scalar_mul(ctx, legendre_symbol_minus_two(ctx));
    let lhs2 = moment_g(2, ctx);
    let rhs2 = FqPoly::from_ints(ctx, Prime, &[-1, 0, 1]).pow(ctx, half);
    (
        PolyCheck { pass: lhs1 == rhs1, lhs: lhs1, rhs: rhs1 },
        PolyCheck { pass: lhs2 == rhs2, lhs: lhs2, rhs: rhs2 },
    )
}

/// Pointwise check over `F_p` of
/// `P_r(x)^2 ≡ 1 + P_r(2x^2-1) + 2 Σ_{y non-residue} P_r((y+1-2x^2)/(y-1))`.
/// Requires a prime field context (`m = 1`).
pub fn verify_vd(r: u64, ctx: &FieldCtx) -> Result<bool, LegendreError> {
    let p = ctx.p();
    if r > p - 1 {
        return Err(LegendreError::OutOfRange { r, limit: p - 1 });
    }
    if ctx.m() != 1 {
        return Err(LegendreError::OutOfRange { r: ctx.m() as u64, limit: 1 });
    }
    let pr = legendre_mod_p(r, ctx);
    let one = ctx.one(Prime);
    let two = ctx.from_int(Prime, 2);
    let nonres: Vec<FieldElem> = ctx
        .non_squares()
        .into_iter()
        .map(|y| ctx.restrict(y, Prime).expect("m = 1"))
        .collect();
    for x in ctx.elements(Prime) {
        let px = pr.evaluate(ctx, x);
        let lhs = ctx.mul(px, px);
        let t = ctx.sub(ctx.mul(two, ctx.mul(x, x)), one);
        let mut rhs = ctx.add(one, pr.evaluate(ctx, t));
        for &y in &nonres {
            let arg = ctx.div(ctx.sub(ctx.add(y, one), ctx.add(t, one)), ctx.sub(y, one))?;
            rhs = ctx.add(rhs, ctx.mul(two, pr.evaluate(ctx, arg)));
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `C(i - j - 1/2, i) = Π_{t<i} (2(i-j-t) - 1) / (2^i i!)`
fn half_binomial(i: u64, j: u64) -> Dyadic {
    let mut num = BigInt::one();
    for t in 0..i {
        num *= 2 * (i as i64 - j as i64 - t as i64) - 1;
    }
    let mut den = BigInt::one() << i;
    for t in 2..=i {
        den *= t;
    }
    Dyadic::from_rational(&BigRational::new(num, den)).expect("generalized binomial is dyadic")
}

/// `Q_i(x) = Σ_j (-1)^j C(i,j) C(i-j-1/2, i) x^j`
pub fn q_poly(i: u64) -> DyadicPoly {
    DyadicPoly::new(
        (0..=i)
            .map(|j| {
                let c = half_binomial(i, j).mul(&Dyadic::new(binomial(i, j), 0));
                if j % 2 == 1 {
                    c.neg()
                } else {
                    c
                }
            })
            .collect(),
    )
}

/// `z^i P_i((z + z^{-1})/2) = Σ_k a_k z^{i-k} (z^2+1)^k / 2^k`, a polynomial in `z`.
fn kelley_rhs(i: u64, pi: &DyadicPoly) -> DyadicPoly {
    let z2p1 = DyadicPoly::from_ints(&[1, 0, 1]);
    let mut acc = DyadicPoly::zero();
    for (k, a) in pi.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = z2p1
            .pow(k as u32)
            .mul(&DyadicPoly::monomial(a.mul(&Dyadic::new(BigInt::one(), k as u32)), i as usize - k));
        acc = acc.add(&term);
    }
    acc
}

/// `Q_i(z^2) = z^i P_i((z + z^{-1})/2)` as a Laurent (here polynomial)
/// identity in `z`.
pub fn kelley_check(i: u64) -> bool {
    let lhs = q_poly(i).compose(&DyadicPoly::from_ints(&[0, 0, 1]));
    lhs == kelley_rhs(i, &legendre_poly(i))
}

/// The same relation with `Q_i` evaluated at `z` instead of `z^2`. Holds
/// only for `i = 0`; kept to document the discrepancy.
pub fn kelley_unsquared_check(i: u64) -> bool {
    q_poly(i) == kelley_rhs(i, &legendre_poly(i))
}

/// `P_r^2 = Σ_{i∈S_r} a_i Q_i(2x^2 - 1)` over `Z[1/2]`.
pub fn verify_fe(r: u64) -> bool {
    let cache = LegendreCache::new(r);
    let pr = cache.get(r).expect("cached");
    let t = DyadicPoly::from_ints(&[-1, 0, 2]);
    let mut rhs = DyadicPoly::zero();
    for i in parity_indices(r) {
        let a = pr.coeff(i as usize);
        if a.is_zero() {
            continue;
        }
        rhs = rhs.add(&q_poly(i).compose(&t).scalar_mul(&a));
    }
    pr.mul(pr) == rhs
}

/// `∫_{-1}^{1} P_r P_s dx`, exactly.
pub fn orthogonality_integral(r: u64, s: u64) -> BigRational {
    let cache = LegendreCache::new(r.max(s));
    cache.get(r).unwrap().mul(cache.get(s).unwrap()).integral_pm1()
}

pub fn orthogonality_check(r: u64, s: u64) -> bool {
    let expected = if r == s {
        BigRational::new(BigInt::from(2), BigInt::from(2 * r + 1))
    } else {
        BigRational::zero()
    };
    orthogonality_integral(r, s) == expected
}

/// `P_r(-x) = (-1)^r P_r(x)`
pub fn parity_check(f: &DyadicPoly, r: u64) -> bool {
    let expected = if r % 2 == 0 { f.clone() } else { f.neg() };
    f.reflect() == expected
}

/// `(1-x^2) P'' - 2x P' + r(r+1) P = 0`
pub fn ode_check(f: &DyadicPoly, r: u64) -> bool {
    let d1 = f.derivative();
    let d2 = d1.derivative();
    let lhs = DyadicPoly::from_ints(&[1, 0, -1])
        .mul(&d2)
        .sub(&DyadicPoly::from_ints(&[0, 2]).mul(&d1))
        .add(&f.scalar_mul(&Dyadic::from_int((r * (r + 1)) as i64)));
    lhs.is_zero()
}

pub fn normalization_check(f: &DyadicPoly) -> bool {
    f.evaluate(&Dyadic::one()) == Dyadic::one()
}

/// All Legendre-side identity rows for one prime, with `r < p^2` for the
/// digit product and `i, r ≤ bound` for the characteristic-zero checks.
/// Explicit forms, parity, differential equation and `P_r(1) = 1` for `r ≤ bound`.
pub fn construction_rows(bound: u64) -> Vec<IdentityRow> {
    let cache = LegendreCache::new(bound);
    let mut rows = Vec::new();
    for (r, f) in cache.polys().iter().enumerate() {
        let r = r as u64;
        let f1 = legendre_explicit(r, ExplicitForm::Binomial);
        let f2 = legendre_explicit(r, ExplicitForm::Trigonometric);
        rows.push(IdentityRow::new("explicit_forms", Some(r), None, f == &f1 && f == &f2, f1.to_string(), f2.to_string()));
        rows.push(IdentityRow::new("parity", Some(r), None, parity_check(f, r), f.reflect().to_string(), f.to_string()));
        rows.push(IdentityRow::new("differential_equation", Some(r), None, ode_check(f, r), f.to_string(), "0"));
        rows.push(IdentityRow::new("normalization", Some(r), None, normalization_check(f), f.evaluate(&Dyadic::one()).to_string(), "1"));
    }
    rows
}

/// `∫ P_r P_s` over `[-1, 1]` for `r, s ≤ bound`.
pub fn orthogonality_rows(bound: u64) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    for r in 0..=bound {
        for s in r..=bound {
            let v = orthogonality_integral(r, s);
            let want = if r == s { BigRational::new(2.into(), (2 * r + 1).into()) } else { BigRational::zero() };
            rows.push(IdentityRow::new(
                "orthogonality",
                Some(r),
                None,
                orthogonality_check(r, s),
                format!("s={s}: {}", rational_string(&v)),
                rational_string(&want),
            ));
        }
    }
    rows
}

/// The radical-free square identity and the `Q_i` generating relation.
pub fn fe_rows(bound: u64) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    for r in 0..=bound {
        let f = legendre_poly(r);
        rows.push(IdentityRow::new("fe", Some(r), None, verify_fe(r), f.mul(&f).to_string(), "sum a_i Q_i(2x^2-1)"));
        rows.push(IdentityRow::new("kelley", Some(r), None, kelley_check(r), q_poly(r).to_string(), "z^i P_i((z+1/z)/2)"));
    }
    rows
}

/// `P_r ≡ Π P_{r_i}^{p^i}` for `r < p^2`, each side also compared with the
/// reduction of the exact polynomial.
pub fn ille_schur_rows(ctx: &FieldCtx) -> Vec<IdentityRow> {
    let p = ctx.p();
    let fmt = |f: &FqPoly| bracket(f.to_strings(ctx));
    let cache = LegendreCache::new(p * p - 1);
    (0..p * p)
        .map(|r| {
            let c = ille_schur_check(r, ctx);
            let exact = cache.get(r).expect("cached").reduce_mod_p(ctx);
            IdentityRow::new("ille_schur", Some(r), Some(p), c.pass && exact == c.lhs, fmt(&c.lhs), fmt(&c.rhs))
        })
        .collect()
}

pub fn symmetry_rows(ctx: &FieldCtx) -> Result<Vec<IdentityRow>, LegendreError> {
    let p = ctx.p();
    let fmt = |f: &FqPoly| bracket(f.to_strings(ctx));
    (0..p)
        .map(|r| {
            Ok(IdentityRow::new(
                "symmetry",
                Some(r),
                Some(p),
                symmetry_check(r, ctx)?,
                fmt(&legendre_mod_p(p - 1 - r, ctx)),
                fmt(&legendre_mod_p(r, ctx)),
            ))
        })
        .collect()
}

/// Requires `m = 1`.
pub fn vd_rows(ctx: &FieldCtx) -> Result<Vec<IdentityRow>, LegendreError> {
    let p = ctx.p();
    (0..p)
        .map(|r| Ok(IdentityRow::new("vd", Some(r), Some(p), verify_vd(r, ctx)?, "P_r(x)^2", "1+P_r(2x^2-1)+2 sum P_r(..)")))
        .collect()
}

pub fn lemma61_rows(ctx: &FieldCtx) -> Vec<IdentityRow> {
    let p = ctx.p();
    let fmt = |f: &FqPoly| bracket(f.to_strings(ctx));
    let (l1, l2) = lemma61_check(ctx);
    vec![
        IdentityRow::new("sum_P", None, Some(p), l1.pass, fmt(&l1.lhs), fmt(&l1.rhs)),
        IdentityRow::new("sum_P_squared", None, Some(p), l2.pass, fmt(&l2.lhs), fmt(&l2.rhs)),
    ]
}

/// Every identity above for one field and one bound.
pub fn identity_rows(ctx: &FieldCtx, bound: u64) -> Result<Vec<IdentityRow>, LegendreError> {
    let mut rows = construction_rows(bound);
    rows.extend(orthogonality_rows(bound.min(20)));
    rows.extend(fe_rows(bound));
    rows.extend(ille_schur_rows(ctx));
    rows.extend(symmetry_rows(ctx)?);
    if ctx.m() == 1 {
        rows.extend(vd_rows(ctx)?);
    }
    rows.extend(lemma61_rows(ctx));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(n: i64, e: u32) -> Dyadic {
        Dyadic::new(BigInt::from(n), e)
    }

    fn ctx(p: u64) -> FieldCtx {
        FieldCtx::build(p, 1).unwrap()
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(legendre_poly(0), DyadicPoly::from_ints(&[1]));
        assert_eq!(legendre_poly(1), DyadicPoly::x());
        assert_eq!(legendre_poly(2), DyadicPoly::new(vec![d(-1, 1), d(0, 0), d(3, 1)]));
        assert_eq!(legendre_poly(3), DyadicPoly::new(vec![d(0, 0), d(-3, 1), d(0, 0), d(5, 1)]));
        assert_eq!(legendre_poly(4), DyadicPoly::new(vec![d(3, 3), d(0, 0), d(-30, 3), d(0, 0), d(35, 3)]));
    }

    #[test]
    fn explicit_forms_by_hand() {
        assert_eq!(legendre_explicit(2, ExplicitForm::Binomial), legendre_poly(2));
        assert_eq!(legendre_explicit(1, ExplicitForm::Trigonometric), DyadicPoly::x());
    }

    #[test]
    fn three_constructions_agree() {
        let cache = LegendreCache::new(64);
        for r in 0..=64 {
            let f = cache.get(r).unwrap();
            assert_eq!(f.degree(), Some(r as usize));
            assert_eq!(&legendre_explicit(r, ExplicitForm::Binomial), f, "form 1, r={r}");
            assert_eq!(&legendre_explicit(r, ExplicitForm::Trigonometric), f, "form 2, r={r}");
        }
    }

    #[test]
    fn structural_invariants() {
        let cache = LegendreCache::new(40);
        for (r, f) in cache.polys().iter().enumerate() {
            let r = r as u64;
            assert!(parity_check(f, r));
            assert!(ode_check(f, r));
            assert!(normalization_check(f));
            for (i, c) in f.coeffs().iter().enumerate() {
                if (i as u64 + r) % 2 == 1 {
                    assert!(c.is_zero());
                }
            }
        }
        // parity mod p
        let c7 = ctx(7);
        for r in 0..30 {
            let f = legendre_mod_p(r, &c7);
            for x in c7.elements(Prime) {
                let a = f.evaluate(&c7, c7.neg(x));
                let b = f.evaluate(&c7, x);
                assert_eq!(a, if r % 2 == 0 { b } else { c7.neg(b) });
            }
        }
    }

    #[test]
    fn mod_p_examples() {
        let c3 = ctx(3);
        assert_eq!(legendre_mod_p(2, &c3), FqPoly::from_ints(&c3, Prime, &[1]));
        assert_eq!(legendre_mod_p(4, &c3), FqPoly::from_ints(&c3, Prime, &[0, 0, 0, 0, 1]));
        let c11 = ctx(11);
        assert_eq!(legendre_mod_p(1, &c11), FqPoly::x(&c11, Prime));
    }

    #[test]
    fn mod_p_routes_agree() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = ctx(p);
            let cache = LegendreCache::new(p * p - 1);
            for r in 0..p * p {
                let exact = cache.get(r).unwrap().reduce_mod_p(&c);
                assert_eq!(legendre_mod_p(r, &c), exact, "lucas p={p} r={r}");
                assert_eq!(ille_schur_product(r, &c), exact, "digits p={p} r={r}");
            }
        }
    }

    #[test]
    fn ille_schur_examples() {
        let c3 = ctx(3);
        let chk = ille_schur_check(4, &c3);
        assert!(chk.pass);
        assert_eq!(chk.rhs, FqPoly::from_ints(&c3, Prime, &[0, 0, 0, 0, 1]));
        assert!(ille_schur_check(2, &ctx(5)).pass);
    }

    #[test]
    fn symmetry_all_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let c = ctx(p);
            for r in 0..p {
                assert!(symmetry_check(r, &c).unwrap(), "p={p} r={r}");
            }
            assert!(symmetry_check(p, &c).is_err());
        }
    }

    #[test]
    fn moments_small() {
        let c3 = ctx(3);
        assert_eq!(moment_g(1, &c3), FqPoly::from_ints(&c3, Prime, &[2, 1]));
        assert_eq!(moment_g(2, &c3), FqPoly::from_ints(&c3, Prime, &[2, 0, 1]));
    }

    #[test]
    fn sum_identities_up_to_97() {
        for p in (3u64..=97).filter(|&n| crate::fields::is_prime(n)) {
            let (a, b) = lemma61_check(&ctx(p));
            assert!(a.pass, "first, p={p}");
            assert!(b.pass, "second, p={p}");
        }
    }

    #[test]
    fn vd_pointwise() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let c = ctx(p);
            for r in 0..p {
                assert!(verify_vd(r, &c).unwrap(), "p={p} r={r}");
            }
        }
        assert!(verify_vd(0, &FieldCtx::build(3, 2).unwrap()).is_err());
    }

    #[test]
    fn q_polynomials() {
        assert_eq!(q_poly(0), DyadicPoly::from_ints(&[1]));
        assert_eq!(q_poly(1), DyadicPoly::new(vec![d(1, 1), d(1, 1)]));
        for i in 0..=20 {
            assert!(kelley_check(i), "i={i}");
        }
        assert!(kelley_unsquared_check(0));
        assert!(!kelley_unsquared_check(1));
    }

    #[test]
    fn fe_identity() {
        for r in 0..=20 {
            assert!(verify_fe(r), "r={r}");
        }
    }

    #[test]
    fn orthogonality() {
        assert_eq!(orthogonality_integral(0, 1), BigRational::zero());
        assert_eq!(orthogonality_integral(1, 1), BigRational::new(2.into(), 3.into()));
        assert_eq!(orthogonality_integral(2, 2), BigRational::new(2.into(), 5.into()));
        for r in 0..12 {
            for s in 0..12 {
                assert!(orthogonality_check(r, s));
            }
        }
    }

    #[test]
    fn rows_all_pass() {
        let rows = identity_rows(&ctx(5), 8).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{:?}", rows.iter().find(|r| !r.pass));
        assert!(rows.iter().any(|r| r.check == "vd"));
    }

    proptest! {
        #[test]
        fn p_at_one_is_one_mod_p(r in 0u64..500, pi in 0usize..4) {
            let c = ctx([3u64, 5, 7, 11][pi]);
            prop_assert_eq!(legendre_mod_p(r, &c).evaluate(&c, c.one(Prime)), c.one(Prime));
        }
    }
}
