// SPDX-License-Identifier: Apache-2.0

//! Exact polynomials over `Z[1/2]` ([`DyadicPoly`]) and over one level of a
//! field tower ([`FqPoly`]), with exhaustive root finding and factor-shape
//! analysis by square-free plus distinct-degree factorization.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::fields::{FieldCtx, FieldElem, FieldError, FieldLevel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomials live over different coefficient domains")]
    MixedDomain,
    #[error("value {0} is not a dyadic rational")]
    NotDyadic(String),
    #[error("cannot parse dyadic rational from {0:?}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

// ---------------------------------------------------------------------------
// Z[1/2]
// ---------------------------------------------------------------------------

/// An element `num / 2^exp` of `Z[1/2]` in lowest terms: `num` is odd, or
/// zero with `exp = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn zero() -> Self {
        Dyadic::from_int(0)
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp as u64) as u32;
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn two_exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Converts a rational whose denominator is a power of two.
    pub fn from_rational(r: &BigRational) -> Result<Self, PolyError> {
        let den = r.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return Err(PolyError::NotDyadic(r.to_string()));
        }
        Ok(Dyadic::new(r.numer().clone(), tz as u32))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        let e = self.exp.max(o.exp);
        let a = &self.num << (e - self.exp);
        let b = &o.num << (e - o.exp);
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &o.num, self.exp + o.exp)
    }

    pub fn mul_int(&self, k: i64) -> Dyadic {
        Dyadic::new(&self.num * k, self.exp)
    }

    /// Exact division by an integer; fails unless the quotient stays in
    /// `Z[1/2]`.
    pub fn div_int(&self, k: i64) -> Result<Dyadic, PolyError> {
        assert!(k != 0, "division by zero");
        let tz = k.trailing_zeros();
        let odd = k >> tz;
        let (q, r) = self.num.div_rem(&BigInt::from(odd));
        if !r.is_zero() {
            return Err(PolyError::NotDyadic(format!("{self} / {k}")));
        }
        Ok(Dyadic::new(q, self.exp + tz))
    }

    /// Image in `F_p` (`p` odd) as an integer in `[0, p)`.
    pub fn reduce_mod(&self, p: u64) -> u64 {
        let pb = BigInt::from(p);
        let n = self.num.mod_floor(&pb).to_u64().expect("fits");
        let inv2 = crate::fields::mod_inv(2, p);
        n * crate::fields::mod_pow(inv2, self.exp as u64, p) % p
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PolyError::Parse(s.to_string());
        match s.split_once("/2^") {
            None => Ok(Dyadic::new(s.trim().parse().map_err(|_| bad())?, 0)),
            Some((n, e)) => Ok(Dyadic::new(
                n.trim().parse().map_err(|_| bad())?,
                e.trim().parse().map_err(|_| bad())?,
            )),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Polynomial with coefficients in `Z[1/2]`, low degree first, no trailing
/// zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicPoly {
    coeffs: Vec<Dyadic>,
}

impl Serialize for DyadicPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl DyadicPoly {
    pub fn new(mut coeffs: Vec<Dyadic>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DyadicPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        DyadicPoly::new(c.iter().map(|&v| Dyadic::from_int(v)).collect())
    }

    pub fn zero() -> Self {
        DyadicPoly::default()
    }

    pub fn constant(c: Dyadic) -> Self {
        DyadicPoly::new(vec![c])
    }

    pub fn x() -> Self {
        DyadicPoly::from_ints(&[0, 1])
    }

    /// `c x^k`
    pub fn monomial(c: Dyadic, k: usize) -> Self {
        let mut v = vec![Dyadic::zero(); k];
        v.push(c);
        DyadicPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Dyadic {
        self.coeffs.get(i).cloned().unwrap_or_else(Dyadic::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, o: &DyadicPoly) -> DyadicPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        DyadicPoly::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> DyadicPoly {
        DyadicPoly::new(self.coeffs.iter().map(Dyadic::neg).collect())
    }

    pub fn sub(&self, o: &DyadicPoly) -> DyadicPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &DyadicPoly) -> DyadicPoly {
        if self.is_zero() || o.is_zero() {
            return DyadicPoly::zero();
        }
        let mut out = vec![Dyadic::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        DyadicPoly::new(out)
    }

    pub fn scalar_mul(&self, c: &Dyadic) -> DyadicPoly {
        DyadicPoly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn div_int(&self, k: i64) -> Result<DyadicPoly, PolyError> {
        Ok(DyadicPoly::new(self.coeffs.iter().map(|a| a.div_int(k)).collect::<Result<_, _>>()?))
    }

    pub fn pow(&self, mut e: u32) -> DyadicPoly {
        let mut acc = DyadicPoly::constant(Dyadic::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self(g(x))`
    pub fn compose(&self, g: &DyadicPoly) -> DyadicPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(DyadicPoly::zero(), |acc, c| acc.mul(g).add(&DyadicPoly::constant(c.clone())))
    }

    pub fn evaluate(&self, x: &Dyadic) -> Dyadic {
        self.coeffs
            .iter()
            .rev()
            .fold(Dyadic::zero(), |acc, c| acc.mul(x).add(c))
    }

    pub fn derivative(&self) -> DyadicPoly {
        DyadicPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul_int(i as i64))
                .collect(),
        )
    }

    /// `f(-x)`
    pub fn reflect(&self) -> DyadicPoly {
        DyadicPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        )
    }

    /// Coefficient-wise image under `Z[1/2] -> F_p`, as a prime-level
    /// polynomial of `ctx`.
    pub fn reduce_mod_p(&self, ctx: &FieldCtx) -> FqPoly {
        let p = ctx.p();
        FqPoly::new(
            FieldLevel::Prime,
            self.coeffs
                .iter()
                .map(|c| ctx.from_int(FieldLevel::Prime, c.reduce_mod(p) as i64))
                .collect(),
        )
    }

    /// Exact `∫_{-1}^{1} f(x) dx`.
    pub fn integral_pm1(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .fold(BigRational::zero(), |acc, (i, c)| {
                acc + c.to_rational() * BigRational::new(BigInt::from(2), BigInt::from(i as u64 + 1))
            })
    }
}

impl fmt::Display for DyadicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format!("\"{c}\"")).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

// ---------------------------------------------------------------------------
// Polynomials over one level of a field tower
// ---------------------------------------------------------------------------

/// Polynomial over `F_p`, `F_q` or `F_{q^2}`; all coefficients on `level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqPoly {
    level: FieldLevel,
    coeffs: Vec<FieldElem>,
}

/// One irreducible factor class: `count` distinct irreducible factors of
/// the given degree, each appearing with `multiplicity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ShapeEntry {
    pub degree: usize,
    pub multiplicity: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorShape {
    pub entries: Vec<ShapeEntry>,
}

impl FactorShape {
    /// Multiset of irreducible-factor degrees, with multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.count * e.multiplicity {
                out.push(e.degree);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn total_degree(&self) -> usize {
        self.entries.iter().map(|e| e.degree * e.multiplicity * e.count).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.entries.iter().map(|e| e.degree).max().unwrap_or(0)
    }
}

impl FqPoly {
    pub fn new(level: FieldLevel, mut coeffs: Vec<FieldElem>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.level() == level));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FqPoly { level, coeffs }
    }

    /// Builds from small integers (reduced mod p).
    pub fn from_ints(ctx: &FieldCtx, level: FieldLevel, c: &[i64]) -> Self {
        FqPoly::new(level, c.iter().map(|&v| ctx.from_int(level, v)).collect())
    }

    pub fn zero(level: FieldLevel) -> Self {
        FqPoly { level, coeffs: Vec::new() }
    }

    pub fn one(ctx: &FieldCtx, level: FieldLevel) -> Self {
        FqPoly::new(level, vec![ctx.one(level)])
    }

    pub fn x(ctx: &FieldCtx, level: FieldLevel) -> Self {
        FqPoly::new(level, vec![ctx.zero(level), ctx.one(level)])
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem) -> Self {
        let _ = ctx;
        FqPoly::new(c.level(), vec![c])
    }

    pub fn level(&self) -> FieldLevel {
        self.level
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, ctx: &FieldCtx, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or_else(|| ctx.zero(self.level))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    /// Same polynomial with coefficients moved up to `level`.
    pub fn promote(&self, ctx: &FieldCtx, level: FieldLevel) -> Result<FqPoly, PolyError> {
        if level == self.level {
            return Ok(self.clone());
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| ctx.promote(c, level))
            .collect::<Result<_, _>>()?;
        Ok(FqPoly::new(level, coeffs))
    }

    fn check(&self, o: &FqPoly) -> Result<(), PolyError> {
        if self.level != o.level {
            Err(PolyError::MixedDomain)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, ctx: &FieldCtx, o: &FqPoly) -> Result<FqPoly, PolyError> {
        self.check(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(FqPoly::new(
            self.level,
            (0..n).map(|i| ctx.add(self.coeff(ctx, i), o.coeff(ctx, i))).collect(),
        ))
    }

    pub fn sub(&self, ctx: &FieldCtx, o: &FqPoly) -> Result<FqPoly, PolyError> {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn neg(&self, ctx: &FieldCtx) -> FqPoly {
        FqPoly::new(self.level, self.coeffs.iter().map(|&c| ctx.neg(c)).collect())
    }

    pub fn mul(&self, ctx: &FieldCtx, o: &FqPoly) -> Result<FqPoly, PolyError> {
        self.check(o)?;
        Ok(self.mul_unchecked(ctx, o))
    }

    fn mul_unchecked(&self, ctx: &FieldCtx, o: &FqPoly) -> FqPoly {
        if self.is_zero() || o.is_zero() {
            return FqPoly::zero(self.level);
        }
        let mut out = vec![ctx.zero(self.level); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        FqPoly::new(self.level, out)
    }

    pub fn scalar_mul(&self, ctx: &FieldCtx, c: FieldElem) -> FqPoly {
        FqPoly::new(self.level, self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn pow(&self, ctx: &FieldCtx, mut e: u64) -> FqPoly {
        let mut acc = FqPoly::one(ctx, self.level);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(ctx, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(ctx, &base);
            }
        }
        acc
    }

    pub fn compose(&self, ctx: &FieldCtx, g: &FqPoly) -> Result<FqPoly, PolyError> {
        self.check(g)?;
        Ok(self.coeffs.iter().rev().fold(FqPoly::zero(self.level), |acc, &c| {
            acc.mul_unchecked(ctx, g)
                .add(ctx, &FqPoly::new(self.level, vec![c]))
                .expect("same level")
        }))
    }

    /// Horner evaluation; `x` may sit on a higher level than the coefficients.
    pub fn evaluate(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        let level = self.level.max(x.level());
        self.coeffs
            .iter()
            .rev()
            .fold(ctx.zero(level), |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> FqPoly {
        FqPoly::new(
            self.level,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ctx.mul(c, ctx.from_int(self.level, i as i64)))
                .collect(),
        )
    }

    pub fn monic(&self, ctx: &FieldCtx) -> Result<FqPoly, PolyError> {
        let lead = self.lead().ok_or(PolyError::ZeroPolynomial)?;
        Ok(self.scalar_mul(ctx, ctx.inv(lead)?))
    }

    /// Euclidean division: `self = quot * d + rem`, `deg rem < deg d`.
    pub fn div_rem(&self, ctx: &FieldCtx, d: &FqPoly) -> Result<(FqPoly, FqPoly), PolyError> {
        self.check(d)?;
        let dl = d.lead().ok_or(PolyError::ZeroPolynomial)?;
        let dd = d.coeffs.len() - 1;
        let inv = ctx.inv(dl)?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((FqPoly::zero(self.level), self.clone()));
        }
        let mut quot = vec![ctx.zero(self.level); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = ctx.mul(rem[k], inv);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                rem[k - dd + i] = ctx.sub(rem[k - dd + i], ctx.mul(c, di));
            }
        }
        rem.truncate(dd);
        Ok((FqPoly::new(self.level, quot), FqPoly::new(self.level, rem)))
    }

    pub fn rem(&self, ctx: &FieldCtx, d: &FqPoly) -> Result<FqPoly, PolyError> {
        Ok(self.div_rem(ctx, d)?.1)
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, ctx: &FieldCtx, o: &FqPoly) -> Result<FqPoly, PolyError> {
        self.check(o)?;
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(ctx, &b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic(ctx)
        }
    }

    /// `self^e mod modulus`
    pub fn pow_mod(&self, ctx: &FieldCtx, mut e: u64, modulus: &FqPoly) -> Result<FqPoly, PolyError> {
        let mut acc = FqPoly::one(ctx, self.level).rem(ctx, modulus)?;
        let mut base = self.rem(ctx, modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(ctx, &base).rem(ctx, modulus)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(ctx, &base).rem(ctx, modulus)?;
            }
        }
        Ok(acc)
    }

    /// If every exponent is a multiple of `k`, returns `g` with
    /// `self(x) = g(x^k)`.
    pub fn deflate(&self, k: usize) -> Option<FqPoly> {
        if self.coeffs.iter().enumerate().any(|(i, c)| i % k != 0 && !c.is_zero()) {
            return None;
        }
        Some(FqPoly::new(self.level, self.coeffs.iter().step_by(k).copied().collect()))
    }

    /// All roots on `level` with multiplicities, by exhaustive evaluation.
    pub fn roots_in_field(&self, ctx: &FieldCtx, level: FieldLevel) -> Result<Vec<(FieldElem, usize)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let level = level.max(self.level);
        let f = self.promote(ctx, level)?;
        let mut out = Vec::new();
        for z in ctx.elements(level) {
            if !f.evaluate(ctx, z).is_zero() {
                continue;
            }
            let lin = FqPoly::new(level, vec![ctx.neg(z), ctx.one(level)]);
            let mut g = f.clone();
            let mut mult = 0;
            loop {
                let (q, r) = g.div_rem(ctx, &lin)?;
                if !r.is_zero() {
                    break;
                }
                mult += 1;
                g = q;
            }
            out.push((z, mult));
        }
        Ok(out)
    }

    /// Square-free decomposition: monic pairwise coprime `(g_i, i)` with
    /// `monic(self) = prod g_i^i`.
    pub fn square_free_decomposition(&self, ctx: &FieldCtx) -> Result<Vec<(FqPoly, usize)>, PolyError> {
        let f = self.monic(ctx)?;
        let mut out = Vec::new();
        self.sqf_into(ctx, &f, 1, &mut out)?;
        out.sort_by_key(|(_, i)| *i);
        Ok(out)
    }

    fn sqf_into(&self, ctx: &FieldCtx, f: &FqPoly, scale: usize, out: &mut Vec<(FqPoly, usize)>) -> Result<(), PolyError> {
        if f.degree().unwrap_or(0) == 0 {
            return Ok(());
        }
        let p = ctx.p() as usize;
        let df = f.derivative(ctx);
        let mut c = f.gcd(ctx, &df)?;
        if c.is_zero() {
            c = f.clone();
        }
        let mut w = f.div_rem(ctx, &c)?.0;
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = w.gcd(ctx, &c)?;
            let fac = w.div_rem(ctx, &y)?.0;
            if fac.degree().unwrap_or(0) > 0 {
                out.push((fac.monic(ctx)?, i * scale));
            }
            w = y;
            c = c.div_rem(ctx, &w)?.0;
            i += 1;
        }
        if c.degree().unwrap_or(0) > 0 {
            // c = h(x^p); take the p-th root coefficient-wise
            let h = c.deflate(p).expect("derivative vanished");
            let d = ctx.degree(self.level.max(h.level));
            let root = FqPoly::new(h.level, h.coeffs.iter().map(|&a| ctx.frobenius(a, d - 1)).collect());
            self.sqf_into(ctx, &root.monic(ctx)?, scale * p, out)?;
        }
        Ok(())
    }

    /// Degrees (with multiplicity) of the irreducible factorization over the
    /// coefficient field.
    pub fn factor_shape(&self, ctx: &FieldCtx) -> Result<FactorShape, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let field_size = ctx.size(self.level);
        let x = FqPoly::x(ctx, self.level);
        let mut entries = Vec::new();
        for (g, mult) in self.square_free_decomposition(ctx)? {
            // distinct-degree factorization of a square-free g
            let mut rest = g;
            let mut h = x.clone();
            let mut d = 0;
            while rest.degree().unwrap_or(0) > 0 {
                d += 1;
                if 2 * d > rest.degree().unwrap() {
                    let deg = rest.degree().unwrap();
                    entries.push(ShapeEntry { degree: deg, multiplicity: mult, count: 1 });
                    break;
                }
                h = h.pow_mod(ctx, field_size, &rest)?;
                let part = h.sub(ctx, &x)?.gcd(ctx, &rest)?;
                let pd = part.degree().unwrap_or(0);
                if pd > 0 {
                    entries.push(ShapeEntry { degree: d, multiplicity: mult, count: pd / d });
                    rest = rest.div_rem(ctx, &part)?.0;
                    h = h.rem(ctx, &rest)?;
                }
            }
        }
        entries.sort();
        // merge identical (degree, multiplicity) classes
        let mut merged: Vec<ShapeEntry> = Vec::new();
        for e in entries {
            match merged.last_mut() {
                Some(last) if last.degree == e.degree && last.multiplicity == e.multiplicity => last.count += e.count,
                _ => merged.push(e),
            }
        }
        Ok(FactorShape { entries: merged })
    }

    /// Explicit irreducible factors when none exceeds degree 2, recovered
    /// from roots in `F_{q^2}`; `None` when a factor of degree ≥ 3 exists.
    /// Coefficients must lie on the prime or base level.
    pub fn low_degree_factors(&self, ctx: &FieldCtx) -> Result<Option<Vec<(FqPoly, usize)>>, PolyError> {
        let deg = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let roots = self.roots_in_field(ctx, FieldLevel::Quadratic)?;
        let counted: usize = roots.iter().map(|(_, m)| m).sum();
        if counted != deg {
            return Ok(None);
        }
        let conj_exp = ctx.size(self.level);
        let big = FieldLevel::Quadratic;
        let mut out = Vec::new();
        let mut used = std::collections::HashSet::new();
        for &(z, mult) in &roots {
            if used.contains(&z) {
                continue;
            }
            if let Some(zl) = ctx.restrict(z, self.level) {
                out.push((FqPoly::new(self.level, vec![ctx.neg(zl), ctx.one(self.level)]), mult));
                used.insert(z);
                continue;
            }
            let zc = ctx.pow(z, conj_exp);
            let s = ctx.add(z, zc);
            let n = ctx.mul(z, zc);
            if ctx.pow(zc, conj_exp) != z {
                return Ok(None);
            }
            let quad = FqPoly::new(
                self.level,
                vec![
                    ctx.restrict(n, self.level).expect("norm descends"),
                    ctx.restrict(ctx.neg(s), self.level).expect("trace descends"),
                    ctx.one(self.level),
                ],
            );
            let _ = big;
            out.push((quad, mult));
            used.insert(z);
            used.insert(zc);
        }
        Ok(Some(out))
    }

    /// Non-squares `c ∈ F_q^×` with `(x^2 - c) | self`.
    pub fn quad_nonresidue_factor_scan(&self, ctx: &FieldCtx) -> Result<Vec<FieldElem>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut out = Vec::new();
        for c in ctx.non_squares() {
            let s = ctx.sqrt_in_ext(c)?;
            if self.evaluate(ctx, s).is_zero() {
                out.push(c);
            }
        }
        Ok(out)
    }

    pub fn to_strings(&self, ctx: &FieldCtx) -> Vec<String> {
        self.coeffs.iter().map(|&c| ctx.format(c)).collect()
    }
}

/// Rational with a sign-aware short form, used for exact report columns.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_nonneg(r: &BigRational) -> bool {
    !r.is_negative()
}
