// SPDX-License-Identifier: Apache-2.0

//! Character side: conjugacy classes of `GL_2(F_q)`, the character table of
//! `PGL_2(F_q)`, and the correlation double sum
//! `c(π; H, K) = |H|^{-1} |K|^{-1} Σ_{h,k} χ_π(hk)`.
//!
//! Roots of unity are identified by `ζ_{q^2-1} ↦ g` for the fixed generator
//! `g` of `F_{q^2}^×`. Under this rule `ψ = ζ^{log_g}` reduces to the
//! identity character of `F_{q^2}^×`, `χ = ψ|_{F_q^×}` to the identity of
//! `F_q^×`, and `η` to `x ↦ x^{(q-1)/2}`.
//!
//! Two evaluators share the classifier but nothing else: [`char_value_modp`]
//! works with field arithmetic, while [`char_value_cyclo`] produces exact
//! integer combinations of powers of `ζ` from discrete logarithms. The
//! characteristic-zero correlation is kept as such a combination (a vector of
//! multiplicities indexed by `k mod q^2-1`), evaluated in floating point,
//! rationalized when it is an integer, and reduced mod `p` by `ζ^k ↦ g^k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::brauer::TorusPair;
use crate::fields::{FieldCtx, FieldElem, FieldError, FieldLevel};
use crate::group::Mat2;

use FieldLevel::{Base, Quadratic};

/// Tolerance on the imaginary part and on the distance to the nearest
/// integer when rationalizing a floating-point character sum.
pub const RATIONALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharsError {
    #[error("matrix is singular")]
    Singular,
    #[error("label {0} is outside the range for q = {1}")]
    LabelOutOfRange(String, u64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

// ---------------------------------------------------------------------------
// classes
// ---------------------------------------------------------------------------

/// Conjugacy class of an invertible matrix, by its eigenvalue data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassData {
    /// `a·1`
    Central(FieldElem),
    /// Repeated eigenvalue `a`, not scalar.
    NonSemisimple(FieldElem),
    /// Distinct eigenvalues `a < b` (by code) in `F_q`.
    Split(FieldElem, FieldElem),
    /// Eigenvalues `λ, λ^q ∈ F_{q^2} \ F_q`; `λ` is the smaller code.
    Elliptic(FieldElem),
}

impl ClassData {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassData::Central(_) => "central",
            ClassData::NonSemisimple(_) => "non_semisimple",
            ClassData::Split(..) => "split",
            ClassData::Elliptic(_) => "elliptic",
        }
    }

    /// Size of the class in `GL_2(F_q)`.
    pub fn class_size(&self, q: u64) -> u64 {
        match self {
            ClassData::Central(_) => 1,
            ClassData::NonSemisimple(_) => q * q - 1,
            ClassData::Split(..) => q * (q + 1),
            ClassData::Elliptic(_) => q * (q - 1),
        }
    }
}

pub fn classify(ctx: &FieldCtx, g: &Mat2) -> Result<ClassData, CharsError> {
    let det = g.det(ctx);
    if det.is_zero() {
        return Err(CharsError::Singular);
    }
    if g.is_scalar() {
        return Ok(ClassData::Central(g.a));
    }
    let tr = g.trace(ctx);
    let disc = ctx.sub(ctx.mul(tr, tr), ctx.mul(ctx.from_int(Base, 4), det));
    let half = ctx.inv(ctx.from_int(Base, 2))?;
    if disc.is_zero() {
        return Ok(ClassData::NonSemisimple(ctx.mul(tr, half)));
    }
    let s = ctx.sqrt_in_ext(disc)?;
    let l1 = ctx.mul(ctx.add(tr, s), half);
    let l2 = ctx.mul(ctx.sub(tr, s), half);
    match (ctx.restrict(l1, Base), ctx.restrict(l2, Base)) {
        (Some(a), Some(b)) => Ok(if a < b { ClassData::Split(a, b) } else { ClassData::Split(b, a) }),
        _ => Ok(ClassData::Elliptic(if l1 < l2 { l1 } else { l2 })),
    }
}

/// One representative datum per `GL_2(F_q)` class, in a fixed order.
pub fn all_classes(ctx: &FieldCtx) -> Vec<ClassData> {
    let nz: Vec<FieldElem> = ctx.nonzero_elements(Base).collect();
    let mut out: Vec<ClassData> = nz.iter().map(|&a| ClassData::Central(a)).collect();
    out.extend(nz.iter().map(|&a| ClassData::NonSemisimple(a)));
    for (i, &a) in nz.iter().enumerate() {
        for &b in &nz[i + 1..] {
            out.push(ClassData::Split(a, b));
        }
    }
    let q = ctx.q();
    for l in ctx.nonzero_elements(Quadratic) {
        if ctx.restrict(l, Base).is_none() && l < ctx.pow(l, q) {
            out.push(ClassData::Elliptic(l));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// labels
// ---------------------------------------------------------------------------

/// Irreducible representation of `PGL_2(F_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IrrepLabel {
    Trivial,
    EtaTwist,
    Steinberg,
    SteinbergEta,
    /// `Ps(χ^r, χ^{-r})`, `1 ≤ r ≤ (q-3)/2`
    PrincipalSeries(u64),
    /// `π(ψ^{(q-1)(r+1)})`, `0 ≤ r ≤ (q-3)/2`
    Cuspidal(u64),
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Trivial => write!(f, "Trivial"),
            IrrepLabel::EtaTwist => write!(f, "Eta"),
            IrrepLabel::Steinberg => write!(f, "St"),
            IrrepLabel::SteinbergEta => write!(f, "StEta"),
            IrrepLabel::PrincipalSeries(r) => write!(f, "Ps({r})"),
            IrrepLabel::Cuspidal(r) => write!(f, "Cusp({r})"),
        }
    }
}

impl IrrepLabel {
    pub fn dim(&self, q: u64) -> u64 {
        match self {
            IrrepLabel::Trivial | IrrepLabel::EtaTwist => 1,
            IrrepLabel::Steinberg | IrrepLabel::SteinbergEta => q,
            IrrepLabel::PrincipalSeries(_) => q + 1,
            IrrepLabel::Cuspidal(_) => q - 1,
        }
    }

    pub fn validate(&self, q: u64) -> Result<(), CharsError> {
        let ok = match *self {
            IrrepLabel::PrincipalSeries(r) => r >= 1 && 2 * r + 3 <= q,
            IrrepLabel::Cuspidal(r) => 2 * r + 3 <= q,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(CharsError::LabelOutOfRange(self.to_string(), q))
        }
    }

    /// Legendre index `r` of the prediction `P_r(u/√α)^2`, for labels with
    /// both fixed vectors.
    pub fn weight(&self, q: u64) -> Option<u64> {
        match *self {
            IrrepLabel::Trivial => Some(0),
            IrrepLabel::SteinbergEta => Some((q - 1) / 2),
            IrrepLabel::PrincipalSeries(r) | IrrepLabel::Cuspidal(r) => Some(r),
            IrrepLabel::EtaTwist | IrrepLabel::Steinberg => None,
        }
    }
}

/// Every irreducible representation of `PGL_2(F_q)`.
pub fn all_labels(q: u64) -> Vec<IrrepLabel> {
    let mut v = vec![IrrepLabel::Trivial, IrrepLabel::EtaTwist, IrrepLabel::Steinberg, IrrepLabel::SteinbergEta];
    v.extend((1..=(q - 3) / 2).map(IrrepLabel::PrincipalSeries));
    v.extend((0..=(q - 3) / 2).map(IrrepLabel::Cuspidal));
    v
}

/// Labels admitting both an `H`- and a `K`-fixed vector.
pub fn in_scope_labels(q: u64) -> Vec<IrrepLabel> {
    all_labels(q).into_iter().filter(|l| l.weight(q).is_some()).collect()
}

/// Constituents of the Gelfand–Graev representation (all labels of
/// dimension > 1).
pub fn generic_labels(q: u64) -> Vec<IrrepLabel> {
    all_labels(q).into_iter().filter(|l| l.dim(q) > 1).collect()
}

// ---------------------------------------------------------------------------
// character values
// ---------------------------------------------------------------------------

/// Image of `ζ^k` under the fixed identification.
pub fn zeta_modp(ctx: &FieldCtx, k: u64) -> FieldElem {
    ctx.gen_pow(k)
}

fn eta_modp(ctx: &FieldCtx, x: FieldElem) -> FieldElem {
    let x = ctx.restrict(x, Base).expect("argument of eta lies in F_q");
    ctx.pow(x, (ctx.q() - 1) / 2)
}

/// `χ_π(g)` reduced mod `p`, by field arithmetic on the class data.
pub fn char_value_modp_class(ctx: &FieldCtx, label: IrrepLabel, cls: &ClassData) -> FieldElem {
    let q = ctx.q();
    let c = |n: i64| ctx.from_int(Quadratic, n);
    let det = match *cls {
        ClassData::Central(a) | ClassData::NonSemisimple(a) => ctx.mul(a, a),
        ClassData::Split(a, b) => ctx.mul(a, b),
        ClassData::Elliptic(l) => ctx.pow(l, q + 1),
    };
    let lift = |x: FieldElem| ctx.promote(x, Quadratic).expect("promotion upward");
    let st = |cls: &ClassData| match cls {
        ClassData::Central(_) => c(q as i64),
        ClassData::NonSemisimple(_) => c(0),
        ClassData::Split(..) => c(1),
        ClassData::Elliptic(_) => c(-1),
    };
    match label {
        IrrepLabel::Trivial => c(1),
        IrrepLabel::EtaTwist => lift(eta_modp(ctx, det)),
        IrrepLabel::Steinberg => st(cls),
        IrrepLabel::SteinbergEta => ctx.mul(st(cls), eta_modp(ctx, det)),
        IrrepLabel::PrincipalSeries(r) => match *cls {
            ClassData::Central(_) => c(q as i64 + 1),
            ClassData::NonSemisimple(_) => c(1),
            ClassData::Split(a, b) => {
                let ab = ctx.div(a, b).expect("nonzero");
                lift(ctx.add(ctx.pow(ab, r), ctx.pow(ctx.inv(ab).expect("nonzero"), r)))
            }
            ClassData::Elliptic(_) => c(0),
        },
        IrrepLabel::Cuspidal(r) => match *cls {
            ClassData::Central(_) => c(q as i64 - 1),
            ClassData::NonSemisimple(_) => c(-1),
            ClassData::Split(..) => c(0),
            ClassData::Elliptic(l) => {
                let e = (q - 1) * (r + 1);
                ctx.neg(ctx.add(ctx.pow(l, e), ctx.pow(l, e * q)))
            }
        },
    }
}

pub fn char_value_modp(ctx: &FieldCtx, label: IrrepLabel, g: &Mat2) -> Result<FieldElem, CharsError> {
    Ok(char_value_modp_class(ctx, label, &classify(ctx, g)?))
}

/// Exact value `Σ c_j ζ^{k_j}` with `ζ = exp(2πi/(q^2-1))`, as `(c_j, k_j)`.
pub type Cyclo = Vec<(i64, u64)>;

/// `χ_π` on a class as an integer combination of roots of unity.
pub fn char_value_cyclo(ctx: &FieldCtx, label: IrrepLabel, cls: &ClassData) -> Cyclo {
    let q = ctx.q();
    let n = q * q - 1;
    let lg = |x: FieldElem| ctx.discrete_log(x).expect("nonzero");
    let q_i = q as i64;
    // log of det, and η(det) = ζ^{log(det) (q-1)/2}
    let log_det = match *cls {
        ClassData::Central(a) | ClassData::NonSemisimple(a) => 2 * lg(a) % n,
        ClassData::Split(a, b) => (lg(a) + lg(b)) % n,
        ClassData::Elliptic(l) => lg(l) * (q + 1) % n,
    };
    let eta = log_det * ((q - 1) / 2) % n;
    let st: Cyclo = match cls {
        ClassData::Central(_) => vec![(q_i, 0)],
        ClassData::NonSemisimple(_) => vec![],
        ClassData::Split(..) => vec![(1, 0)],
        ClassData::Elliptic(_) => vec![(-1, 0)],
    };
    match label {
        IrrepLabel::Trivial => vec![(1, 0)],
        IrrepLabel::EtaTwist => vec![(1, eta)],
        IrrepLabel::Steinberg => st,
        IrrepLabel::SteinbergEta => st.into_iter().map(|(c, _)| (c, eta)).collect(),
        IrrepLabel::PrincipalSeries(r) => match *cls {
            ClassData::Central(_) => vec![(q_i + 1, 0)],
            ClassData::NonSemisimple(_) => vec![(1, 0)],
            ClassData::Split(a, b) => {
                let d = (lg(a) + n - lg(b)) % n;
                vec![(1, r * d % n), (1, r * (n - d) % n)]
            }
            ClassData::Elliptic(_) => vec![],
        },
        IrrepLabel::Cuspidal(r) => match *cls {
            ClassData::Central(_) => vec![(q_i - 1, 0)],
            ClassData::NonSemisimple(_) => vec![(-1, 0)],
            ClassData::Split(..) => vec![],
            ClassData::Elliptic(l) => {
                let e = (q - 1) * (r + 1) % n;
                let k = lg(l);
                vec![(-1, e * k % n), (-1, e * (q % n) % n * k % n)]
            }
        },
    }
}

fn zeta(n: u64, k: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64)
}

pub fn char_value_complex(ctx: &FieldCtx, label: IrrepLabel, g: &Mat2) -> Result<Complex64, CharsError> {
    let n = ctx.q2() - 1;
    let cls = classify(ctx, g)?;
    Ok(char_value_cyclo(ctx, label, &cls)
        .into_iter()
        .map(|(c, k)| zeta(n, k) * c as f64)
        .sum())
}

// ---------------------------------------------------------------------------
// tori and correlations
// ---------------------------------------------------------------------------

/// `H = {diag(a,1)}` and `K_{α,u} = {(1+uz, (α-u^2)z; z, 1-uz)} ∪ {(u, α-u^2; 1, -u)}`.
pub fn torus_elements(ctx: &FieldCtx, tp: &TorusPair) -> (Vec<Mat2>, Vec<Mat2>) {
    let (zero, one) = (ctx.zero(Base), ctx.one(Base));
    let (alpha, u) = (tp.alpha(), tp.u());
    let am = ctx.sub(alpha, ctx.mul(u, u));
    let h = ctx.nonzero_elements(Base).map(|a| Mat2::new(a, zero, zero, one)).collect();
    let mut k: Vec<Mat2> = ctx
        .elements(Base)
        .map(|z| {
            let uz = ctx.mul(u, z);
            Mat2::new(ctx.add(one, uz), ctx.mul(am, z), z, ctx.sub(one, uz))
        })
        .collect();
    k.push(Mat2::new(u, am, one, ctx.neg(u)));
    (h, k)
}

/// Histogram of the classes of `hk` over `H × K_{α,u}`, shared by all labels.
#[derive(Debug, Clone)]
pub struct CorrelationData {
    classes: BTreeMap<ClassData, u64>,
    pairs: u64,
}

impl CorrelationData {
    pub fn new(ctx: &FieldCtx, tp: &TorusPair) -> Self {
        let (h, k) = torus_elements(ctx, tp);
        let mut classes = BTreeMap::new();
        for hh in &h {
            for kk in &k {
                let cls = classify(ctx, &hh.mul(ctx, kk)).expect("torus elements are invertible");
                *classes.entry(cls).or_insert(0) += 1;
            }
        }
        CorrelationData {
            classes,
            pairs: (h.len() * k.len()) as u64,
        }
    }

    pub fn classes(&self) -> &BTreeMap<ClassData, u64> {
        &self.classes
    }

    /// `|H| |K|`
    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    /// `c(π; H, K) mod p`; lies in `F_q`.
    pub fn modp(&self, ctx: &FieldCtx, label: IrrepLabel) -> FieldElem {
        let p = ctx.p() as i64;
        let sum = self.classes.iter().fold(ctx.zero(Quadratic), |acc, (cls, &n)| {
            let v = char_value_modp_class(ctx, label, cls);
            ctx.add(acc, ctx.mul(v, ctx.from_int(Quadratic, (n % p as u64) as i64)))
        });
        let norm = ctx.inv(ctx.from_int(Quadratic, (self.pairs % p as u64) as i64)).expect("|H||K| prime to p");
        let v = ctx.mul(sum, norm);
        ctx.restrict(v, Base).unwrap_or(v)
    }

    /// `Σ_{h,k} χ_π(hk)` as multiplicities of `ζ^k`, `k mod q^2-1`.
    pub fn group_ring(&self, ctx: &FieldCtx, label: IrrepLabel) -> Vec<i64> {
        let n = (ctx.q2() - 1) as usize;
        let mut acc = vec![0i64; n];
        for (cls, &count) in &self.classes {
            for (c, k) in char_value_cyclo(ctx, label, cls) {
                acc[k as usize] += c * count as i64;
            }
        }
        acc
    }
}

/// A characteristic-zero correlation `S/(q^2-1)` with `S = Σ χ(hk)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Char0Value {
    pub re: f64,
    pub im: f64,
    /// Numerator and denominator in lowest terms when `S` is an integer.
    pub num: Option<String>,
    pub den: Option<String>,
    /// Reduction mod `p` via `ζ^k ↦ g^k`.
    pub modp: String,
    /// p-integral (always, since the denominator divides `q^2-1`).
    pub p_integral: bool,
    #[serde(skip)]
    pub rational: Option<BigRational>,
}

/// Evaluates, rationalizes and reduces a group-ring sum over `|H||K|` pairs.
pub fn char0_from_group_ring(ctx: &FieldCtx, ring: &[i64], pairs: u64) -> Char0Value {
    let n = ring.len() as u64;
    let s: Complex64 = ring
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| zeta(n, k as u64) * c as f64)
        .sum();
    let mut red = ctx.zero(Quadratic);
    let p = ctx.p() as i64;
    for (k, &c) in ring.iter().enumerate() {
        if c.rem_euclid(p) != 0 {
            red = ctx.add(red, ctx.mul(ctx.from_int(Quadratic, c), zeta_modp(ctx, k as u64)));
        }
    }
    let norm = ctx.inv(ctx.from_int(Quadratic, (pairs % p as u64) as i64)).expect("prime to p");
    let red = ctx.mul(red, norm);
    let nearest = s.re.round();
    // A rational algebraic integer is an integer, so a non-integral real part
    // certifies irrationality.
    let rational = (s.im.abs() < RATIONALIZE_TOL && (s.re - nearest).abs() < RATIONALIZE_TOL)
        .then(|| BigRational::new(BigInt::from(nearest as i64), BigInt::from(pairs)));
    let p_integral = rational.as_ref().is_none_or(|r| !r.denom().is_multiple_of(&BigInt::from(p)));
    Char0Value {
        re: s.re / pairs as f64,
        im: s.im / pairs as f64,
        num: rational.as_ref().map(|r| r.numer().to_string()),
        den: rational.as_ref().map(|r| r.denom().to_string()),
        modp: ctx.format(ctx.restrict(red, Base).unwrap_or(red)),
        p_integral,
        rational,
    }
}

pub fn correlation_modp(ctx: &FieldCtx, label: IrrepLabel, tp: &TorusPair) -> Result<FieldElem, CharsError> {
    label.validate(ctx.q())?;
    Ok(CorrelationData::new(ctx, tp).modp(ctx, label))
}

pub fn correlation_char0(ctx: &FieldCtx, label: IrrepLabel, tp: &TorusPair) -> Result<Char0Value, CharsError> {
    label.validate(ctx.q())?;
    let data = CorrelationData::new(ctx, tp);
    Ok(char0_from_group_ring(ctx, &data.group_ring(ctx, label), data.pairs()))
}

/// Reduction mod `p` of a rational with denominator prime to `p`.
pub fn rational_mod_p(ctx: &FieldCtx, r: &BigRational) -> FieldElem {
    let pb = BigInt::from(ctx.p());
    let n: i64 = r.numer().mod_floor(&pb).try_into().expect("small");
    let d: i64 = r.denom().mod_floor(&pb).try_into().expect("small");
    ctx.div(ctx.from_int(Base, n), ctx.from_int(Base, d)).expect("denominator prime to p")
}

// ---------------------------------------------------------------------------
// inner-product sum and Gelfand–Graev counts
// ---------------------------------------------------------------------------

/// `-Σ_{λ∈F_q^×} χ^r((α - (λ+u)^2)/λ)` reduced mod `p`.
pub fn prop_ip_sum(ctx: &FieldCtx, r: u64, tp: &TorusPair) -> FieldElem {
    let mut acc = ctx.zero(Base);
    for l in ctx.nonzero_elements(Base) {
        let lu = ctx.add(l, tp.u());
        let arg = ctx.div(ctx.sub(tp.alpha(), ctx.mul(lu, lu)), l).expect("nonzero");
        acc = ctx.add(acc, ctx.pow(arg, r));
    }
    ctx.neg(acc)
}

/// Number of pairs `(h, k) ∈ H × K_{α,u}` with `hk` unipotent and not
/// central in `PGL_2` (`tr^2 = 4 det`, not scalar).
pub fn gg_unipotent_count(ctx: &FieldCtx, tp: &TorusPair) -> u64 {
    let (h, k) = torus_elements(ctx, tp);
    let four = ctx.from_int(Base, 4);
    let mut n = 0;
    for hh in &h {
        for kk in &k {
            let g = hh.mul(ctx, kk);
            let tr = g.trace(ctx);
            if !g.is_scalar() && ctx.mul(tr, tr) == ctx.mul(four, g.det(ctx)) {
                n += 1;
            }
        }
    }
    n
}

/// The case table: `q - 1` when `[q ≡ 1 mod 4]` equals `[α - u^2` is a
/// non-square`]`, otherwise `q - 3`.
pub fn gg_table_count(ctx: &FieldCtx, tp: &TorusPair) -> u64 {
    let am = ctx.sub(tp.alpha(), ctx.mul(tp.u(), tp.u()));
    let nonsquare = !ctx.is_square(am).expect("α - u² ≠ 0 for non-square α");
    if (ctx.q() % 4 == 1) == nonsquare {
        ctx.q() - 1
    } else {
        ctx.q() - 3
    }
}

/// Sums of correlations over the Gelfand–Graev constituents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GgSums {
    pub unipotent_count: u64,
    pub table_count: u64,
    /// Exact characteristic-zero sum.
    pub char0: String,
    /// `1 - N/(q^2-1)` with `N` the unipotent count.
    pub char0_expected: String,
    pub modp: String,
    /// `1 + N` mod `p`.
    pub modp_expected: String,
    pub pass: bool,
}

pub fn gg_sums(ctx: &FieldCtx, tp: &TorusPair) -> GgSums {
    let q = ctx.q();
    let data = CorrelationData::new(ctx, tp);
    let n = (q * q - 1) as usize;
    let mut ring = vec![0i64; n];
    let mut modp = ctx.zero(Base);
    for label in generic_labels(q) {
        for (a, b) in ring.iter_mut().zip(data.group_ring(ctx, label)) {
            *a += b;
        }
        modp = ctx.add(modp, data.modp(ctx, label));
    }
    let c0 = char0_from_group_ring(ctx, &ring, data.pairs());
    let count = gg_unipotent_count(ctx, tp);
    let table = gg_table_count(ctx, tp);
    let expected = BigRational::new(BigInt::from(q * q - 1 - count), BigInt::from(q * q - 1));
    let modp_expected = ctx.from_int(Base, 1 + (count % ctx.p()) as i64);
    let char0 = c0.rational.clone();
    GgSums {
        unipotent_count: count,
        table_count: table,
        char0: char0.as_ref().map_or_else(|| format!("{:.12}", c0.re), crate::polyx::rational_string),
        char0_expected: crate::polyx::rational_string(&expected),
        modp: ctx.format(modp),
        modp_expected: ctx.format(modp_expected),
        pass: count == table && char0.as_ref() == Some(&expected) && modp == modp_expected,
    }
}

// ---------------------------------------------------------------------------
// table self-test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSelfTest {
    pub q: u64,
    pub dim_square_sum: u64,
    pub group_order: u64,
    pub class_sizes_ok: bool,
    pub max_orthogonality_error: f64,
    pub brute_force_checked: bool,
    pub class_function_ok: bool,
    pub pass: bool,
}

/// Tolerance for the floating-point orthogonality relations.
pub const ORTHOGONALITY_TOL: f64 = 1e-7;

/// Dimension count, first orthogonality relations over the class list, and
/// (for `q ≤ brute_force_max_q`) a brute-force scan of `GL_2(F_q)` checking
/// class sizes and invariance of every character under conjugation by a
/// generating set.
pub fn table_selftest(ctx: &FieldCtx, brute_force_max_q: u64) -> TableSelfTest {
    let q = ctx.q();
    let labels = all_labels(q);
    let dim_square_sum: u64 = labels.iter().map(|l| l.dim(q).pow(2)).sum();
    let group_order = q * (q * q - 1);
    let gl_order = (q * q - 1) * (q * q - q);
    let classes = all_classes(ctx);
    let mut class_sizes_ok = classes.iter().map(|c| c.class_size(q)).sum::<u64>() == gl_order;

    let n = q * q - 1;
    let values: Vec<Vec<Complex64>> = labels
        .par_iter()
        .map(|&l| {
            classes
                .iter()
                .map(|c| char_value_cyclo(ctx, l, c).into_iter().map(|(a, k)| zeta(n, k) * a as f64).sum())
                .collect()
        })
        .collect();
    let sizes: Vec<f64> = classes.iter().map(|c| c.class_size(q) as f64).collect();
    let mut max_err: f64 = 0.0;
    for i in 0..labels.len() {
        for j in i..labels.len() {
            let ip: Complex64 = values[i]
                .iter()
                .zip(&values[j])
                .zip(&sizes)
                .map(|((a, b), s)| a * b.conj() * s)
                .sum::<Complex64>()
                / gl_order as f64;
            let target = if i == j { 1.0 } else { 0.0 };
            max_err = max_err.max((ip - Complex64::new(target, 0.0)).norm());
        }
    }

    let brute = q <= brute_force_max_q;
    let mut class_function_ok = true;
    if brute {
        let (zero, one) = (ctx.zero(Base), ctx.one(Base));
        let gens = [
            Mat2::new(one, one, zero, one),
            Mat2::new(zero, one, one, zero),
            Mat2::new(ctx.restrict(ctx.gen_pow(q + 1), Base).expect("generator of F_q^×"), zero, zero, one),
        ];
        let gens_inv: Vec<Mat2> = gens.iter().map(|g| g.inv(ctx).expect("invertible")).collect();
        let elems: Vec<FieldElem> = ctx.elements(Base).collect();
        let mut counts: BTreeMap<ClassData, u64> = BTreeMap::new();
        for &a in &elems {
            for &b in &elems {
                for &c in &elems {
                    for &d in &elems {
                        let g = Mat2::new(a, b, c, d);
                        let Ok(cls) = classify(ctx, &g) else { continue };
                        *counts.entry(cls).or_insert(0) += 1;
                        for (x, xi) in gens.iter().zip(&gens_inv) {
                            let h = x.mul(ctx, &g).mul(ctx, xi);
                            let ch = classify(ctx, &h).expect("conjugate is invertible");
                            if ch != cls {
                                class_function_ok = false;
                            }
                        }
                    }
                }
            }
        }
        class_sizes_ok &= counts.len() == classes.len() && counts.iter().all(|(c, &n)| n == c.class_size(q));
    }
    TableSelfTest {
        q,
        dim_square_sum,
        group_order,
        class_sizes_ok,
        max_orthogonality_error: max_err,
        brute_force_checked: brute,
        class_function_ok,
        pass: dim_square_sum == group_order && class_sizes_ok && class_function_ok && max_err < ORTHOGONALITY_TOL,
    }
}

/// True when `x` is a nonnegative rational (used for char-0 sanity checks).
pub fn nonnegative(v: &Char0Value) -> bool {
    match &v.rational {
        Some(r) => !r.is_negative(),
        None => v.re > -RATIONALIZE_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(ctx: &FieldCtx, n: i64) -> FieldElem {
        ctx.from_int(Base, n)
    }

    fn tp(ctx: &FieldCtx, a: i64, u: i64) -> TorusPair {
        TorusPair::new(ctx, b(ctx, a), b(ctx, u)).unwrap()
    }

    #[test]
    fn classify_examples() {
        let ctx = FieldCtx::build(5, 1).unwrap();
        let id = Mat2::identity(&ctx, Base);
        assert_eq!(classify(&ctx, &id).unwrap(), ClassData::Central(b(&ctx, 1)));
        let n = Mat2::from_ints(&ctx, Base, [1, 1, 0, 1]);
        assert_eq!(classify(&ctx, &n).unwrap(), ClassData::NonSemisimple(b(&ctx, 1)));
        let e = Mat2::from_ints(&ctx, Base, [0, 2, 1, 0]);
        let ClassData::Elliptic(l) = classify(&ctx, &e).unwrap() else { panic!() };
        assert!(ctx.eq_elem(ctx.mul(l, l), b(&ctx, 2)));
        let s = Mat2::from_ints(&ctx, Base, [2, 0, 0, 3]);
        assert_eq!(classify(&ctx, &s).unwrap(), ClassData::Split(b(&ctx, 2), b(&ctx, 3)));
        assert!(classify(&ctx, &Mat2::from_ints(&ctx, Base, [1, 2, 2, 4])).is_err());
    }

    #[test]
    fn values_at_identity_are_dimensions() {
        for (p, m) in [(5, 1), (3, 2), (7, 1)] {
            let ctx = FieldCtx::build(p, m).unwrap();
            let q = ctx.q();
            let id = Mat2::identity(&ctx, Base);
            for l in all_labels(q) {
                assert_eq!(char_value_modp(&ctx, l, &id).unwrap(), ctx.from_int(Quadratic, l.dim(q) as i64));
                let z = char_value_complex(&ctx, l, &id).unwrap();
                assert!((z.re - l.dim(q) as f64).abs() < 1e-9 && z.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cuspidal_at_unipotent_and_trivial_everywhere() {
        let ctx = FieldCtx::build(7, 1).unwrap();
        let n = Mat2::from_ints(&ctx, Base, [3, 1, 0, 3]);
        for r in 0..=2 {
            assert_eq!(char_value_modp(&ctx, IrrepLabel::Cuspidal(r), &n).unwrap(), ctx.from_int(Quadratic, -1));
        }
        let g = Mat2::from_ints(&ctx, Base, [2, 5, 1, 3]);
        assert_eq!(char_value_modp(&ctx, IrrepLabel::Trivial, &g).unwrap(), ctx.one(Quadratic));
    }

    #[test]
    fn correlation_examples() {
        let ctx = FieldCtx::build(5, 1).unwrap();
        let t = tp(&ctx, 2, 0);
        assert_eq!(correlation_modp(&ctx, IrrepLabel::Trivial, &t).unwrap(), b(&ctx, 1));
        assert_eq!(correlation_modp(&ctx, IrrepLabel::SteinbergEta, &t).unwrap(), b(&ctx, 4));
        assert!(correlation_modp(&ctx, IrrepLabel::Steinberg, &t).unwrap().is_zero());
        assert!(correlation_modp(&ctx, IrrepLabel::EtaTwist, &t).unwrap().is_zero());
        assert!(correlation_modp(&ctx, IrrepLabel::PrincipalSeries(2), &t).is_err());
        let c0 = correlation_char0(&ctx, IrrepLabel::Trivial, &t).unwrap();
        assert_eq!(c0.rational, Some(BigRational::from_integer(1.into())));
    }

    #[test]
    fn torus_listing() {
        let ctx = FieldCtx::build(7, 1).unwrap();
        let t = tp(&ctx, 3, 0);
        let (h, k) = torus_elements(&ctx, &t);
        assert_eq!((h.len(), k.len()), (6, 8));
        assert!(k.iter().all(|g| !g.det(&ctx).is_zero()));
        // u = 0 gives K_α = {(1, αz; z, 1)} ∪ {(0, α; 1, 0)}
        assert!(k.contains(&Mat2::from_ints(&ctx, Base, [1, 6, 2, 1])));
        assert!(k.contains(&Mat2::from_ints(&ctx, Base, [0, 3, 1, 0])));
        // same sets as the conjugation construction
        let t2 = tp(&ctx, 3, 4);
        let (_, k1) = torus_elements(&ctx, &t2);
        let mut a = k1.clone();
        let mut bb = t2.k_elements(&ctx);
        a.sort();
        bb.sort();
        assert_eq!(a, bb);
    }

    #[test]
    fn char0_reduces_to_modp() {
        for (p, m) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let ctx = FieldCtx::build(p, m).unwrap();
            let q = ctx.q();
            for alpha in ctx.non_squares() {
                for u in ctx.elements(Base).take(3) {
                    let t = TorusPair::new(&ctx, alpha, u).unwrap();
                    let data = CorrelationData::new(&ctx, &t);
                    for l in all_labels(q) {
                        let v = char0_from_group_ring(&ctx, &data.group_ring(&ctx, l), data.pairs());
                        let md = data.modp(&ctx, l);
                        assert_eq!(v.modp, ctx.format(md), "q={q} {l}");
                        assert!(v.im.abs() < 1e-9);
                        assert!(nonnegative(&v), "q={q} {l} {v:?}");
                        if let Some(r) = &v.rational {
                            assert!(v.p_integral);
                            assert_eq!(rational_mod_p(&ctx, r), md);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn irrational_char0_values_exist() {
        // Cusp(0) at q = 7: not every correlation is rational
        let ctx = FieldCtx::build(7, 1).unwrap();
        let any_irrational = ctx.non_squares().into_iter().any(|a| {
            ctx.elements(Base).any(|u| {
                let t = TorusPair::new(&ctx, a, u).unwrap();
                correlation_char0(&ctx, IrrepLabel::Cuspidal(0), &t).unwrap().rational.is_none()
            })
        });
        assert!(any_irrational);
    }

    #[test]
    fn selftest_small() {
        for (p, m) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let ctx = FieldCtx::build(p, m).unwrap();
            let r = table_selftest(&ctx, 9);
            assert!(r.pass, "{r:?}");
            assert!(r.brute_force_checked);
        }
        let ctx = FieldCtx::build(5, 1).unwrap();
        assert_eq!(table_selftest(&ctx, 0).dim_square_sum, 120);
    }

    #[test]
    fn elliptic_values_real() {
        let ctx = FieldCtx::build(3, 2).unwrap();
        let n = ctx.q2() - 1;
        for c in all_classes(&ctx) {
            for l in all_labels(ctx.q()) {
                let z: Complex64 = char_value_cyclo(&ctx, l, &c).into_iter().map(|(a, k)| zeta(n, k) * a as f64).sum();
                assert!(z.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn prop_ip_examples() {
        let ctx = FieldCtx::build(7, 1).unwrap();
        let t = tp(&ctx, 3, 0);
        assert_eq!(prop_ip_sum(&ctx, 0, &t), b(&ctx, 1));
        assert!(prop_ip_sum(&ctx, 1, &t).is_zero());
        assert!(prop_ip_sum(&ctx, 3, &t).is_zero());
    }

    #[test]
    fn gg_examples() {
        let c5 = FieldCtx::build(5, 1).unwrap();
        assert_eq!(gg_unipotent_count(&c5, &tp(&c5, 2, 0)), 4);
        // α - u² = 2 - 4 = 3 is a non-square too; u = 2 gives α - u² = 3
        let c7 = FieldCtx::build(7, 1).unwrap();
        let t = tp(&c7, 3, 0);
        assert_eq!(gg_unipotent_count(&c7, &t), 4);
        // a square α - u²: α = 2, u = 1 in F_5 gives 1
        assert_eq!(gg_unipotent_count(&c5, &tp(&c5, 2, 1)), 2);
        for (p, m) in [(5u64, 1u32), (7, 1), (11, 1), (13, 1)] {
            let ctx = FieldCtx::build(p, m).unwrap();
            for a in ctx.non_squares() {
                for u in ctx.elements(Base) {
                    let g = gg_sums(&ctx, &TorusPair::new(&ctx, a, u).unwrap());
                    assert!(g.pass, "p={p} {g:?}");
                }
            }
        }
    }

    #[test]
    fn gg_count_uses_q_mod_4() {
        for (p, m) in [(3u64, 2u32), (5, 2), (3, 3)] {
            let ctx = FieldCtx::build(p, m).unwrap();
            for a in ctx.non_squares().into_iter().take(2) {
                for u in ctx.elements(Base) {
                    let t = TorusPair::new(&ctx, a, u).unwrap();
                    assert_eq!(gg_unipotent_count(&ctx, &t), gg_table_count(&ctx, &t));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn characters_are_class_functions(g in prop::array::uniform4(0u32..9), x in prop::array::uniform4(0u32..9), li in 0usize..8) {
            let ctx = FieldCtx::build(3, 2).unwrap();
            let mk = |e: [u32; 4]| Mat2::new(
                ctx.from_code(Base, e[0]).unwrap(),
                ctx.from_code(Base, e[1]).unwrap(),
                ctx.from_code(Base, e[2]).unwrap(),
                ctx.from_code(Base, e[3]).unwrap(),
            );
            let (g, x) = (mk(g), mk(x));
            prop_assume!(!g.det(&ctx).is_zero() && !x.det(&ctx).is_zero());
            let h = x.mul(&ctx, &g).mul(&ctx, &x.inv(&ctx).unwrap());
            let l = all_labels(9)[li];
            let a = char_value_complex(&ctx, l, &g).unwrap();
            let bb = char_value_complex(&ctx, l, &h).unwrap();
            prop_assert!((a - bb).norm() < 1e-9);
            prop_assert_eq!(char_value_modp(&ctx, l, &g).unwrap(), char_value_modp(&ctx, l, &h).unwrap());
        }
    }
}
