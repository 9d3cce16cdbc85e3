// SPDX-License-Identifier: Apache-2.0

//! The field tower `F_p ⊂ F_q ⊂ F_{q^2}` with `q = p^m`.
//!
//! Every level is built deterministically: the defining modulus is the least
//! monic irreducible polynomial of its degree and the multiplicative generator
//! is the least primitive element. "Least" always refers to the integer code
//! `c_0 + c_1 p + ... + c_{d-1} p^{d-1}` of the coefficient vector, so the
//! same `(p, m)` always produces a bit-identical [`FieldCtx`].
//!
//! Elements are small `Copy` handles ([`FieldElem`]) holding that code; all
//! arithmetic goes through the context, which owns log/antilog tables for each
//! level.

use serde::Serialize;
use thiserror::Error;

/// Largest admissible `p^{2m}`; all algorithms here are exhaustive scans.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = 2 is not supported, the characteristic must be odd")]
    EvenCharacteristic,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("p^(2m) = {p}^{} exceeds the size limit {MAX_FIELD_SIZE}", 2 * .m)]
    TooLarge { p: u64, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation undefined at zero")]
    ZeroInput,
    #[error("operands come from different field contexts")]
    MixedContext,
    #[error("element is not in the requested subfield")]
    NotInSubfield,
    #[error("coefficient vector does not describe an element of this level")]
    BadCoefficients,
}

/// Which floor of the tower an element lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FieldLevel {
    /// `F_p`
    Prime,
    /// `F_q`
    Base,
    /// `F_{q^2}`
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CtxTag(u32);

/// An element of one level of a [`FieldCtx`].
///
/// Equality is coefficient-wise: two elements are equal when they sit on the
/// same level with the same canonical coefficients. Use
/// [`FieldCtx::eq_elem`] to compare across levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    tag: CtxTag,
    level: FieldLevel,
    code: u32,
}

impl FieldElem {
    pub fn level(self) -> FieldLevel {
        self.level
    }

    /// Packed coefficient vector, `sum c_i p^i`. Also the ordering key.
    pub fn code(self) -> u32 {
        self.code
    }

    pub fn is_zero(self) -> bool {
        self.code == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow(u64),
}

#[derive(Debug, Clone)]
struct Level {
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Level {
    fn order(&self) -> u64 {
        self.size as u64 - 1
    }
}

/// Immutable description of the tower for one `(p, m)`.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    tag: CtxTag,
    levels: [Level; 3],
    // F_q code -> F_{q^2} code
    embed: Vec<u32>,
    // F_{q^2} code -> F_q code, u32::MAX off the subfield
    restrict: Vec<u32>,
}

/// JSON fragment embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldCtxDescriptor {
    pub p: u32,
    pub m: u32,
    pub modulus_q: Vec<u32>,
    pub modulus_q2: Vec<u32>,
    pub generator: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn digits_of(mut code: u32, p: u32, len: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(len as usize);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

// Raw polynomial helpers over F_p used only while bootstrapping the tables.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let lead_inv = mod_inv(b[db] as u64, p as u64);
    let p64 = p as u64;
    if r.len() > db {
        for k in (db..r.len()).rev() {
            let c = r[k] * lead_inv % p64;
            if c != 0 {
                for (i, &bi) in b.iter().enumerate() {
                    let idx = k - db + i;
                    r[idx] = (r[idx] + p64 - c * bi as u64 % p64) % p64;
                }
            }
        }
        r.truncate(db);
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn mul_mod_poly(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (i, &mi) in modulus.iter().enumerate() {
                let idx = k - d + i;
                prod[idx] = (prod[idx] + p64 - c * mi as u64 % p64) % p64;
            }
        }
    }
    prod.truncate(d);
    prod.into_iter().map(|c| c as u32).collect()
}

fn pow_mod_poly(base: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len() - 1;
    let mut acc = vec![0u32; d];
    acc[0] = 1;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_poly(&acc, &b, modulus, p);
        }
        b = mul_mod_poly(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a % p, p - 2, p)
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Exhaustive check: no monic factor of degree `1..=d/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for low in 0..count {
            let mut g = digits_of(low as u32, p, k as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, degree: u32) -> Vec<u32> {
    if degree == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(degree);
    for low in 0..count {
        let mut f = digits_of(low as u32, p, degree);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build_level(p: u32, degree: u32) -> Level {
    let modulus = least_irreducible(p, degree);
    let size = p.pow(degree);
    let order = size as u64 - 1;
    let factors = prime_factors(order);
    let generator = (1..size)
        .find(|&code| {
            let g = digits_of(code, p, degree);
            factors.iter().all(|&l| {
                let r = pow_mod_poly(&g, order / l, &modulus, p);
                !(r[0] == 1 && r[1..].iter().all(|&c| c == 0))
            })
        })
        .expect("multiplicative group is cyclic");
    let g = digits_of(generator, p, degree);
    let mut exp = Vec::with_capacity(order as usize);
    let mut log = vec![u32::MAX; size as usize];
    let mut cur = vec![0u32; degree as usize];
    cur[0] = 1;
    for k in 0..order {
        let code = pack(&cur, p);
        exp.push(code);
        log[code as usize] = k as u32;
        cur = mul_mod_poly(&cur, &g, &modulus, p);
    }
    Level {
        degree,
        size,
        modulus,
        generator,
        exp,
        log,
    }
}

impl FieldCtx {
    /// Builds `F_p ⊂ F_{p^m} ⊂ F_{p^{2m}}`.
    pub fn build(p: u64, m: u32) -> Result<Self, FieldError> {
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let too_large = (p as u128)
            .checked_pow(2 * m)
            .is_none_or(|s| s > MAX_FIELD_SIZE as u128);
        if too_large {
            return Err(FieldError::TooLarge { p, m });
        }
        let p = p as u32;
        let prime = build_level(p, 1);
        let base = build_level(p, m);
        let quad = build_level(p, 2 * m);

        let tag = CtxTag((p << 8) | m);
        let mut ctx = FieldCtx {
            p,
            m,
            tag,
            levels: [prime, base, quad],
            embed: Vec::new(),
            restrict: Vec::new(),
        };

        // Image of the F_q power-basis generator: the least root of modulus_q
        // inside F_{q^2}.
        let q = ctx.levels[1].size;
        let modulus_q = ctx.levels[1].modulus.clone();
        let beta = (0..ctx.levels[2].size)
            .find(|&z| {
                let acc = modulus_q
                    .iter()
                    .rev()
                    .fold(0u32, |acc, &c| ctx.raw_add(2, ctx.raw_mul(2, acc, z), c));
                acc == 0
            })
            .expect("F_q embeds in F_{q^2}");
        let mut beta_pows = Vec::with_capacity(m as usize);
        let mut cur = 1u32;
        for _ in 0..m {
            beta_pows.push(cur);
            cur = ctx.raw_mul(2, cur, beta);
        }
        let mut embed = Vec::with_capacity(q as usize);
        let mut restrict = vec![u32::MAX; ctx.levels[2].size as usize];
        for code in 0..q {
            let digits = digits_of(code, p, m);
            let img = digits.iter().zip(&beta_pows).fold(0u32, |acc, (&c, &bp)| {
                ctx.raw_add(2, acc, ctx.raw_mul(2, c, bp))
            });
            embed.push(img);
            restrict[img as usize] = code;
        }
        ctx.embed = embed;
        ctx.restrict = restrict;
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.levels[1].size as u64
    }

    pub fn q2(&self) -> u64 {
        self.levels[2].size as u64
    }

    pub fn size(&self, level: FieldLevel) -> u64 {
        self.lvl(level).size as u64
    }

    pub fn degree(&self, level: FieldLevel) -> u32 {
        self.lvl(level).degree
    }

    /// Defining polynomial of a level, low-degree coefficient first.
    pub fn modulus(&self, level: FieldLevel) -> &[u32] {
        &self.lvl(level).modulus
    }

    pub fn descriptor(&self) -> FieldCtxDescriptor {
        FieldCtxDescriptor {
            p: self.p,
            m: self.m,
            modulus_q: self.levels[1].modulus.clone(),
            modulus_q2: self.levels[2].modulus.clone(),
            generator: self.coeffs(self.generator()),
        }
    }

    fn lvl(&self, level: FieldLevel) -> &Level {
        &self.levels[level as usize]
    }

    fn mk(&self, level: FieldLevel, code: u32) -> FieldElem {
        FieldElem {
            tag: self.tag,
            level,
            code,
        }
    }

    pub fn zero(&self, level: FieldLevel) -> FieldElem {
        self.mk(level, 0)
    }

    pub fn one(&self, level: FieldLevel) -> FieldElem {
        self.mk(level, 1)
    }

    /// Image of an integer; constants have the same code on every level.
    pub fn from_int(&self, level: FieldLevel, n: i64) -> FieldElem {
        self.mk(level, n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_code(&self, level: FieldLevel, code: u32) -> Result<FieldElem, FieldError> {
        if (code as u64) < self.size(level) {
            Ok(self.mk(level, code))
        } else {
            Err(FieldError::BadCoefficients)
        }
    }

    pub fn from_coeffs(&self, level: FieldLevel, coeffs: &[u32]) -> Result<FieldElem, FieldError> {
        let d = self.degree(level) as usize;
        if coeffs.len() > d || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadCoefficients);
        }
        Ok(self.mk(level, pack(coeffs, self.p)))
    }

    /// Coefficients in the power basis of the element's own level.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        digits_of(x.code, self.p, self.degree(x.level))
    }

    /// All elements of a level in increasing code order.
    pub fn elements(&self, level: FieldLevel) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.lvl(level).size).map(move |c| self.mk(level, c))
    }

    pub fn nonzero_elements(&self, level: FieldLevel) -> impl Iterator<Item = FieldElem> + '_ {
        (1..self.lvl(level).size).map(move |c| self.mk(level, c))
    }

    /// The fixed generator of `F_{q^2}^×`.
    pub fn generator(&self) -> FieldElem {
        self.mk(FieldLevel::Quadratic, self.levels[2].generator)
    }

    // ---- raw code arithmetic on a level index -------------------------------

    #[inline]
    fn raw_add(&self, li: usize, a: u32, b: u32) -> u32 {
        let p = self.p;
        if self.levels[li].degree == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0u32, 1u32);
        while a | b != 0 {
            let mut d = a % p + b % p;
            if d >= p {
                d -= p;
            }
            out += d * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    #[inline]
    fn raw_neg(&self, li: usize, a: u32) -> u32 {
        let p = self.p;
        if self.levels[li].degree == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let mut a = a;
        let (mut out, mut scale) = (0u32, 1u32);
        while a != 0 {
            let d = a % p;
            if d != 0 {
                out += (p - d) * scale;
            }
            a /= p;
            scale *= p;
        }
        out
    }

    #[inline]
    fn raw_mul(&self, li: usize, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let l = &self.levels[li];
        let s = l.log[a as usize] as u64 + l.log[b as usize] as u64;
        let o = l.order();
        l.exp[(if s >= o { s - o } else { s }) as usize]
    }

    #[inline]
    fn raw_pow(&self, li: usize, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = &self.levels[li];
        let o = l.order();
        let k = (l.log[a as usize] as u64 * (e % o)) % o;
        l.exp[k as usize]
    }

    // ---- levels ------------------------------------------------------------

    /// Re-expresses `x` on a level at least as high as its own.
    pub fn promote(&self, x: FieldElem, level: FieldLevel) -> Result<FieldElem, FieldError> {
        if x.tag != self.tag {
            return Err(FieldError::MixedContext);
        }
        if level < x.level {
            return self.restrict(x, level).ok_or(FieldError::NotInSubfield);
        }
        Ok(self.lift(x, level))
    }

    #[inline]
    fn lift(&self, x: FieldElem, level: FieldLevel) -> FieldElem {
        if level == x.level || x.level == FieldLevel::Prime {
            return self.mk(level, x.code);
        }
        // Base -> Quadratic
        self.mk(level, self.embed[x.code as usize])
    }

    /// Re-expresses `x` on a lower level if it lies in that subfield.
    pub fn restrict(&self, x: FieldElem, level: FieldLevel) -> Option<FieldElem> {
        if level >= x.level {
            return Some(self.lift(x, level));
        }
        let base_code = match x.level {
            FieldLevel::Quadratic => {
                let c = self.restrict[x.code as usize];
                if c == u32::MAX {
                    return None;
                }
                c
            }
            _ => x.code,
        };
        match level {
            FieldLevel::Base => Some(self.mk(level, base_code)),
            FieldLevel::Prime => (base_code < self.p).then(|| self.mk(level, base_code)),
            FieldLevel::Quadratic => unreachable!(),
        }
    }

    pub fn contains(&self, level: FieldLevel, x: FieldElem) -> bool {
        self.restrict(x, level).is_some()
    }

    /// Equality after moving both operands to a common level.
    pub fn eq_elem(&self, x: FieldElem, y: FieldElem) -> bool {
        let level = x.level.max(y.level);
        self.lift(x, level) == self.lift(y, level)
    }

    #[inline]
    fn align(&self, x: FieldElem, y: FieldElem) -> (FieldLevel, u32, u32) {
        debug_assert_eq!(x.tag, y.tag, "mixed field contexts");
        if x.level == y.level {
            return (x.level, x.code, y.code);
        }
        let level = x.level.max(y.level);
        (level, self.lift(x, level).code, self.lift(y, level).code)
    }

    // ---- arithmetic ----------------------------------------------------------

    #[inline]
    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let (l, a, b) = self.align(x, y);
        self.mk(l, self.raw_add(l as usize, a, b))
    }

    #[inline]
    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let (l, a, b) = self.align(x, y);
        let nb = self.raw_neg(l as usize, b);
        self.mk(l, self.raw_add(l as usize, a, nb))
    }

    #[inline]
    pub fn neg(&self, x: FieldElem) -> FieldElem {
        self.mk(x.level, self.raw_neg(x.level as usize, x.code))
    }

    #[inline]
    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let (l, a, b) = self.align(x, y);
        self.mk(l, self.raw_mul(l as usize, a, b))
    }

    #[inline]
    pub fn pow(&self, x: FieldElem, e: u64) -> FieldElem {
        self.mk(x.level, self.raw_pow(x.level as usize, x.code, e))
    }

    /// `x^e` for a signed exponent; `x` must be nonzero when `e < 0`.
    pub fn pow_signed(&self, x: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if e >= 0 {
            return Ok(self.pow(x, e as u64));
        }
        let inv = self.inv(x)?;
        Ok(self.pow(inv, e.unsigned_abs()))
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        if x.code == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let l = self.lvl(x.level);
        let o = l.order();
        let k = (o - l.log[x.code as usize] as u64) % o;
        Ok(self.mk(x.level, l.exp[k as usize]))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Checked entry point for all binary/unary operations.
    pub fn arith(&self, op: ArithOp, x: FieldElem, y: Option<FieldElem>) -> Result<FieldElem, FieldError> {
        if x.tag != self.tag || y.is_some_and(|y| y.tag != self.tag) {
            return Err(FieldError::MixedContext);
        }
        let need = |y: Option<FieldElem>| y.ok_or(FieldError::BadCoefficients);
        match op {
            ArithOp::Add => Ok(self.add(x, need(y)?)),
            ArithOp::Sub => Ok(self.sub(x, need(y)?)),
            ArithOp::Mul => Ok(self.mul(x, need(y)?)),
            ArithOp::Div => self.div(x, need(y)?),
            ArithOp::Neg => Ok(self.neg(x)),
            ArithOp::Inv => self.inv(x),
            ArithOp::Pow(e) => Ok(self.pow(x, e)),
        }
    }

    /// `x^(p^i)`.
    pub fn frobenius(&self, x: FieldElem, i: u32) -> FieldElem {
        if x.code == 0 {
            return x;
        }
        let o = self.lvl(x.level).order();
        // p is a unit modulo p^d - 1, so the reduced exponent is never 0
        self.pow(x, mod_pow(self.p as u64, i as u64, o))
    }

    /// Euler's criterion in `F_q`.
    pub fn is_square(&self, x: FieldElem) -> Result<bool, FieldError> {
        if x.code == 0 {
            return Err(FieldError::ZeroInput);
        }
        let x = self.restrict(x, FieldLevel::Base).ok_or(FieldError::NotInSubfield)?;
        Ok(self.pow(x, (self.q() - 1) / 2).code == 1)
    }

    /// The least square root of `x` in `F_{q^2}`.
    pub fn sqrt_in_ext(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        if x.code == 0 {
            return Err(FieldError::ZeroInput);
        }
        let y = self.lift(x, FieldLevel::Quadratic);
        let k = self.levels[2].log[y.code as usize] as u64;
        // Every element of F_q is a square in F_{q^2}, so k is even here.
        debug_assert_eq!(k % 2, 0);
        let o = self.levels[2].order();
        let r1 = self.levels[2].exp[(k / 2) as usize];
        let r2 = self.levels[2].exp[((k / 2 + o / 2) % o) as usize];
        Ok(self.mk(FieldLevel::Quadratic, r1.min(r2)))
    }

    /// Discrete logarithm base [`Self::generator`], in `[0, q^2 - 1)`.
    pub fn discrete_log(&self, x: FieldElem) -> Result<u64, FieldError> {
        if x.code == 0 {
            return Err(FieldError::ZeroInput);
        }
        let y = self.lift(x, FieldLevel::Quadratic);
        Ok(self.levels[2].log[y.code as usize] as u64)
    }

    /// `g^k` in `F_{q^2}`.
    pub fn gen_pow(&self, k: u64) -> FieldElem {
        let o = self.levels[2].order();
        self.mk(FieldLevel::Quadratic, self.levels[2].exp[(k % o) as usize])
    }

    /// The non-squares of `F_q^×`, in code order.
    pub fn non_squares(&self) -> Vec<FieldElem> {
        self.nonzero_elements(FieldLevel::Base)
            .filter(|&x| !self.is_square(x).expect("nonzero"))
            .collect()
    }

    pub fn least_non_square(&self) -> FieldElem {
        self.nonzero_elements(FieldLevel::Base)
            .find(|&x| !self.is_square(x).expect("nonzero"))
            .expect("odd q has non-squares")
    }

    /// Human-readable exact form: an integer for prime-field members,
    /// otherwise the bracketed coefficient vector.
    pub fn format(&self, x: FieldElem) -> String {
        if x.code < self.p {
            x.code.to_string()
        } else {
            let c = self.coeffs(x);
            let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
}
