// SPDX-License-Identifier: Apache-2.0

//! Non-vanishing search, the expectation scan, moment factor reports and
//! the identity-suite driver.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brauer::{theorem1_modp, u_zero_value, BrauerError, Theorem1Row, TorusPair};
use crate::chars::{
    all_labels, char0_from_group_ring, gg_sums, in_scope_labels, table_selftest, CharsError, CorrelationData,
    IrrepLabel,
};
use crate::fields::{FieldCtx, FieldCtxDescriptor, FieldElem, FieldError, FieldLevel};
use crate::legendre::{
    construction_rows, fe_rows, ille_schur_rows, legendre_mod_p, lemma61_rows, moment_g, orthogonality_rows,
    symmetry_rows, vd_rows, LegendreError,
};
use crate::polyx::{FactorShape, FqPoly, PolyError};
use crate::report::{bracket, CorrelationReport, IdentityRow, SuiteRow, Summary};

use FieldLevel::{Base, Prime};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("alpha = {0} is a square")]
    AlphaIsSquare(String),
    #[error("q = {p}^{m} is a prime field; this operation needs m >= 2")]
    NeedsExtension { p: u64, m: u32 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Brauer(#[from] BrauerError),
    #[error(transparent)]
    Chars(#[from] CharsError),
    #[error(transparent)]
    Legendre(#[from] LegendreError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn check_alpha(ctx: &FieldCtx, alpha: FieldElem) -> Result<FieldElem, AnalysisError> {
    let a = ctx.restrict(alpha, Base).ok_or(FieldError::NotInSubfield)?;
    if a.is_zero() || ctx.is_square(a)? {
        return Err(AnalysisError::AlphaIsSquare(ctx.format(a)));
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// non-vanishing search
// ---------------------------------------------------------------------------

/// `P = Π_{i ≤ (p-1)/2} P_i mod p` and its fold `F` with `P(x) = x^ε F(x^2)`.
pub fn folded_product(ctx: &FieldCtx) -> (FqPoly, FqPoly) {
    let half = (ctx.p() - 1) / 2;
    let prod = (0..=half).fold(FqPoly::one(ctx, Prime), |acc, i| {
        acc.mul(ctx, &legendre_mod_p(i, ctx)).expect("prime level")
    });
    let odd = prod.degree().is_some_and(|d| d % 2 == 1);
    let even = if odd {
        FqPoly::new(Prime, prod.coeffs()[1..].to_vec())
    } else {
        prod.clone()
    };
    let folded = even.deflate(2).expect("products of Legendre polynomials have one parity");
    (prod, folded)
}

/// Per-`u` record of `P_r(u/√α)^2` for `0 ≤ r ≤ (q-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonvanishWitness {
    pub p: u64,
    pub m: u32,
    pub alpha: String,
    pub u: String,
    pub values: Vec<String>,
    pub all_nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub p: u64,
    pub m: u32,
    pub alpha: String,
    /// Least witness by element code, if any.
    pub witness: Option<NonvanishWitness>,
    /// Witnesses from all `r ≤ (q-1)/2`.
    pub naive_witnesses: Vec<String>,
    /// Witnesses from the single digits `i ≤ (p-1)/2`.
    pub reduced_witnesses: Vec<String>,
    /// Witnesses from `F(u^2/α) ≠ 0`.
    pub folded_witnesses: Vec<String>,
    pub routes_agree: bool,
    pub exhausted: bool,
}

fn witness_record(ctx: &FieldCtx, alpha: FieldElem, u: FieldElem, polys: &[FqPoly], sa: FieldElem) -> NonvanishWitness {
    let x = ctx.div(u, sa).expect("√α ≠ 0");
    let values: Vec<FieldElem> = polys
        .iter()
        .map(|f| {
            let v = f.evaluate(ctx, x);
            let sq = ctx.mul(v, v);
            ctx.restrict(sq, Base).unwrap_or(sq)
        })
        .collect();
    NonvanishWitness {
        p: ctx.p(),
        m: ctx.m(),
        alpha: ctx.format(alpha),
        u: ctx.format(u),
        all_nonzero: values.iter().all(|v| !v.is_zero()),
        values: values.iter().map(|&v| ctx.format(v)).collect(),
    }
}

pub fn nonvanishing_search(ctx: &FieldCtx, alpha: FieldElem) -> Result<SearchReport, AnalysisError> {
    let alpha = check_alpha(ctx, alpha)?;
    let q = ctx.q();
    let sa = ctx.sqrt_in_ext(alpha)?;
    let full: Vec<FqPoly> = (0..=(q - 1) / 2).map(|r| legendre_mod_p(r, ctx)).collect();
    let half = ((ctx.p() - 1) / 2) as usize;
    let (_, folded) = folded_product(ctx);
    let mut us: Vec<FieldElem> = ctx.nonzero_elements(Base).collect();
    us.sort_by_key(|u| u.code());

    // (u, record, reduced route, folded route)
    type PerU = (FieldElem, NonvanishWitness, bool, bool);
    let per_u: Vec<PerU> = us
        .par_iter()
        .map(|&u| {
            let rec = witness_record(ctx, alpha, u, &full, sa);
            let x = ctx.div(u, sa).expect("√α ≠ 0");
            let reduced = full[..=half].iter().all(|f| !f.evaluate(ctx, x).is_zero());
            let c = ctx.div(ctx.mul(u, u), alpha).expect("α ≠ 0");
            let fold = !folded.evaluate(ctx, c).is_zero();
            (u, rec, reduced, fold)
        })
        .collect();

    let pick = |f: &dyn Fn(&PerU) -> bool| -> Vec<String> {
        per_u.iter().filter(|e| f(e)).map(|e| ctx.format(e.0)).collect()
    };
    let naive = pick(&|e| e.1.all_nonzero);
    let reduced = pick(&|e| e.2);
    let fold = pick(&|e| e.3);
    let witness = per_u.iter().find(|e| e.1.all_nonzero).map(|e| e.1.clone());
    Ok(SearchReport {
        p: ctx.p(),
        m: ctx.m(),
        alpha: ctx.format(alpha),
        exhausted: witness.is_none(),
        witness,
        routes_agree: naive == reduced && naive == fold,
        naive_witnesses: naive,
        reduced_witnesses: reduced,
        folded_witnesses: fold,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theorem2Report {
    pub search: SearchReport,
    /// `(q-1)/2`
    pub nonresidue_count: u64,
    /// `⌊(p^2-1)/16⌋`
    pub folded_degree_bound: u64,
    pub counting_holds: bool,
    /// `(label, c mod p)` at the witness.
    pub correlations: Vec<(String, String)>,
    pub all_units: bool,
    pub pass: bool,
}

pub fn theorem2_verify(ctx: &FieldCtx, alpha: FieldElem) -> Result<Theorem2Report, AnalysisError> {
    if ctx.m() < 2 {
        return Err(AnalysisError::NeedsExtension { p: ctx.p(), m: ctx.m() });
    }
    let search = nonvanishing_search(ctx, alpha)?;
    let q = ctx.q();
    let p = ctx.p();
    let nonresidue_count = (q - 1) / 2;
    let folded_degree_bound = (p * p - 1) / 16;
    let mut correlations = Vec::new();
    let mut all_units = false;
    if let Some(w) = &search.witness {
        let u = ctx
            .nonzero_elements(Base)
            .find(|&u| ctx.format(u) == w.u)
            .expect("witness is an element");
        let tp = TorusPair::new(ctx, check_alpha(ctx, alpha)?, u)?;
        let data = CorrelationData::new(ctx, &tp);
        all_units = true;
        for label in in_scope_labels(q) {
            let c = data.modp(ctx, label);
            all_units &= !c.is_zero();
            correlations.push((label.to_string(), ctx.format(c)));
        }
    }
    let counting_holds = nonresidue_count > folded_degree_bound;
    Ok(Theorem2Report {
        pass: search.witness.is_some() && search.routes_agree && all_units && counting_holds,
        search,
        nonresidue_count,
        folded_degree_bound,
        counting_holds,
        correlations,
        all_units,
    })
}

// ---------------------------------------------------------------------------
// expectation scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectationReport {
    pub p: u64,
    pub m: u32,
    pub product: Vec<String>,
    pub product_degree: usize,
    pub folded: Vec<String>,
    pub folded_degree: usize,
    pub degree_bound: u64,
    pub degree_ok: bool,
    /// Non-residues `c` with `(x^2 - c) | P`.
    pub factor_nonresidues: Vec<String>,
    /// Non-residues `c` with `F(c) ≠ 0`.
    pub good_nonresidues: Vec<String>,
    /// Some non-residue avoids every factor.
    pub verdict: bool,
    /// Non-residues `c` with `(x^2 - c) | G_{2(p-1)}` as a polynomial.
    pub g_literal: Vec<String>,
    /// Non-residues `c` with `Σ_{r<p} [P_r(√c) ≠ 0] ≡ 0 mod p`.
    pub g_function: Vec<String>,
    pub literal_agrees: bool,
    pub function_agrees: bool,
}

pub fn expectation_scan(ctx: &FieldCtx) -> Result<ExpectationReport, AnalysisError> {
    let p = ctx.p();
    let (prod, folded) = folded_product(ctx);
    let mut nonres = ctx.non_squares();
    nonres.sort_by_key(|c| c.code());
    let fmt = |v: &[FieldElem]| v.iter().map(|&c| ctx.format(c)).collect::<Vec<_>>();

    let mut factor = prod.quad_nonresidue_factor_scan(ctx)?;
    factor.sort_by_key(|c| c.code());
    let good: Vec<FieldElem> = nonres.iter().copied().filter(|c| !folded.evaluate(ctx, *c).is_zero()).collect();

    let g = moment_g(2 * (p as u32 - 1), ctx);
    let mut g_lit = g.quad_nonresidue_factor_scan(ctx)?;
    g_lit.sort_by_key(|c| c.code());

    let polys: Vec<FqPoly> = (0..p).map(|r| legendre_mod_p(r, ctx)).collect();
    let g_fn: Vec<FieldElem> = nonres
        .iter()
        .copied()
        .filter(|&c| {
            let s = ctx.sqrt_in_ext(c).expect("square root in F_{q^2}");
            let n = polys.iter().filter(|f| !f.evaluate(ctx, s).is_zero()).count() as u64;
            n % p == 0
        })
        .collect();

    let degree_bound = (p * p - 1) / 16;
    let folded_degree = folded.degree().unwrap_or(0);
    Ok(ExpectationReport {
        p,
        m: ctx.m(),
        product: prod.to_strings(ctx),
        product_degree: prod.degree().unwrap_or(0),
        folded: folded.to_strings(ctx),
        folded_degree,
        degree_bound,
        degree_ok: folded_degree as u64 == degree_bound,
        verdict: !good.is_empty(),
        literal_agrees: g_lit == good,
        function_agrees: g_fn == good,
        factor_nonresidues: fmt(&factor),
        good_nonresidues: fmt(&good),
        g_literal: fmt(&g_lit),
        g_function: fmt(&g_fn),
    })
}

// ---------------------------------------------------------------------------
// moment factor shapes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentRow {
    pub p: u64,
    pub i: u32,
    pub degree: Option<usize>,
    pub shape: FactorShape,
    pub max_factor_degree: usize,
    /// `G_3` with an irreducible factor of degree at least 3.
    pub flagged: bool,
}

pub fn moment_factor_report(ctx: &FieldCtx, i_max: u32) -> Result<Vec<MomentRow>, AnalysisError> {
    (1..=i_max)
        .map(|i| {
            let g = moment_g(i, ctx);
            let shape = g.factor_shape(ctx)?;
            let max = shape.max_degree();
            Ok(MomentRow {
                p: ctx.p(),
                i,
                degree: g.degree(),
                max_factor_degree: max,
                flagged: i == 3 && max >= 3,
                shape,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// correlation rows
// ---------------------------------------------------------------------------

/// Correlations for `labels` at one torus pair, compared with `s t` and
/// `P_r(u/√α)^2`; labels without a weight must give zero.
pub fn correlation_rows(
    ctx: &FieldCtx,
    tp: &TorusPair,
    labels: &[IrrepLabel],
    with_char0: bool,
) -> Result<Vec<CorrelationReport>, AnalysisError> {
    let q = ctx.q();
    let data = CorrelationData::new(ctx, tp);
    let mut rows_t1: BTreeMap<u64, Theorem1Row> = BTreeMap::new();
    let mut out = Vec::with_capacity(labels.len());
    for &label in labels {
        label.validate(q)?;
        let c = data.modp(ctx, label);
        let (st, pred, agree_modp) = match label.weight(q) {
            Some(r) => {
                let row = match rows_t1.entry(r) {
                    std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::btree_map::Entry::Vacant(e) => e.insert(theorem1_modp(ctx, r, tp)?),
                };
                let ok = row.consistent() && ctx.eq_elem(c, row.st_value) && ctx.eq_elem(c, row.legendre_sq_value);
                (row.st.clone(), row.legendre_sq.clone(), ok)
            }
            None => ("0".to_string(), "0".to_string(), c.is_zero()),
        };
        let (num, den, float, c0modp, agree_char0) = if with_char0 {
            let v = char0_from_group_ring(ctx, &data.group_ring(ctx, label), data.pairs());
            let fmt_c = ctx.format(c);
            let ok = v.modp == fmt_c && v.p_integral && v.im.abs() < crate::chars::RATIONALIZE_TOL;
            (v.num, v.den, Some(v.re), Some(v.modp), Some(ok))
        } else {
            (None, None, None, None, None)
        };
        out.push(CorrelationReport {
            label: label.to_string(),
            p: ctx.p(),
            m: ctx.m(),
            alpha: ctx.format(tp.alpha()),
            u: ctx.format(tp.u()),
            r: label.weight(q),
            c_modp: ctx.format(c),
            st,
            legendre_pred: pred,
            c_char0_num: num,
            c_char0_den: den,
            c_char0_float: float,
            c_char0_modp: c0modp,
            agree_modp,
            agree_char0,
        });
    }
    Ok(out)
}

/// `Σ_{r<p} P_r(u/√α)^2 = -(u^2-α)^{(p-1)/2}` at one point (`m = 1`).
pub fn square_sum_row(ctx: &FieldCtx, tp: &TorusPair) -> Result<IdentityRow, AnalysisError> {
    if ctx.m() != 1 {
        return Err(AnalysisError::Config("the pointwise square sum needs m = 1".into()));
    }
    let p = ctx.p();
    let x = ctx.div(tp.u(), ctx.sqrt_in_ext(tp.alpha())?)?;
    let lhs = (0..p).fold(ctx.zero(Base), |acc, r| {
        let v = legendre_mod_p(r, ctx).evaluate(ctx, x);
        ctx.add(acc, ctx.mul(v, v))
    });
    let rhs = ctx.neg(ctx.pow(ctx.sub(ctx.mul(tp.u(), tp.u()), tp.alpha()), (p - 1) / 2));
    let lhs = ctx.restrict(lhs, Base).unwrap_or(lhs);
    Ok(IdentityRow::new("sum_squares_pointwise", None, Some(p), ctx.eq_elem(lhs, rhs), ctx.format(lhs), ctx.format(rhs)))
}

// ---------------------------------------------------------------------------
// configuration and suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaRule {
    /// Every non-square of `F_q`.
    All,
    /// The least non-square.
    Least,
    /// Explicit element codes.
    List(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum URule {
    All,
    List(Vec<u32>),
}

/// Named checks of the identity suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Legendre,
    Orthogonality,
    Fe,
    IlleSchur,
    Symmetry,
    Vd,
    Lemma61,
    SumSquares,
    Theorem1,
    UZero,
    Gg,
    CharTable,
    Char0,
    Search,
    Expectation,
    G3Shape,
}

impl Check {
    pub const ALL: [Check; 16] = [
        Check::Legendre,
        Check::Orthogonality,
        Check::Fe,
        Check::IlleSchur,
        Check::Symmetry,
        Check::Vd,
        Check::Lemma61,
        Check::SumSquares,
        Check::Theorem1,
        Check::UZero,
        Check::Gg,
        Check::CharTable,
        Check::Char0,
        Check::Search,
        Check::Expectation,
        Check::G3Shape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Legendre => "legendre",
            Check::Orthogonality => "orthogonality",
            Check::Fe => "fe",
            Check::IlleSchur => "ille-schur",
            Check::Symmetry => "symmetry",
            Check::Vd => "vd",
            Check::Lemma61 => "lemma61",
            Check::SumSquares => "sum-squares",
            Check::Theorem1 => "theorem1",
            Check::UZero => "u-zero",
            Check::Gg => "gg",
            Check::CharTable => "char-table",
            Check::Char0 => "char0",
            Check::Search => "search",
            Check::Expectation => "expectation",
            Check::G3Shape => "g3-shape",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }

    fn field_independent(self) -> bool {
        matches!(self, Check::Legendre | Check::Orthogonality | Check::Fe)
    }

    /// Depends on `p` only.
    fn prime_only(self) -> bool {
        matches!(self, Check::IlleSchur | Check::Symmetry | Check::Vd | Check::Lemma61 | Check::G3Shape)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub fields: Vec<FieldSpec>,
    pub alpha: AlphaRule,
    pub u: URule,
    /// Empty means every check.
    pub checks: Vec<Check>,
    pub max_q: u64,
    pub threads: Option<usize>,
    pub legendre_bound: u64,
    pub orthogonality_bound: u64,
    pub fe_bound: u64,
    pub moment_max: u32,
    pub brute_force_max_q: u64,
    pub char0_max_q: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fields = [(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (3, 2), (5, 2), (7, 2)]
            .into_iter()
            .map(|(p, m)| FieldSpec { p, m })
            .collect();
        RunConfig {
            fields,
            alpha: AlphaRule::All,
            u: URule::All,
            checks: Vec::new(),
            max_q: 2401,
            threads: None,
            legendre_bound: 64,
            orthogonality_bound: 20,
            fe_bound: 20,
            moment_max: 3,
            brute_force_max_q: 13,
            char0_max_q: 13,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.fields.is_empty() {
            return Err(AnalysisError::Config("no (p, m) pairs given".into()));
        }
        for f in &self.fields {
            let ctx = FieldCtx::build(f.p, f.m)?;
            if ctx.q() > self.max_q {
                return Err(AnalysisError::Config(format!("q = {} exceeds max_q = {}", ctx.q(), self.max_q)));
            }
            self.alphas(&ctx)?;
            self.us(&ctx)?;
        }
        Ok(())
    }

    pub fn enabled(&self, c: Check) -> bool {
        self.checks.is_empty() || self.checks.contains(&c)
    }

    pub fn alphas(&self, ctx: &FieldCtx) -> Result<Vec<FieldElem>, AnalysisError> {
        let mut v: Vec<FieldElem> = match &self.alpha {
            AlphaRule::All => ctx.non_squares(),
            AlphaRule::Least => vec![ctx.least_non_square()],
            AlphaRule::List(codes) => codes
                .iter()
                .map(|&c| check_alpha(ctx, ctx.from_code(Base, c)?))
                .collect::<Result<_, _>>()?,
        };
        v.sort_by_key(|a| a.code());
        v.dedup();
        Ok(v)
    }

    pub fn us(&self, ctx: &FieldCtx) -> Result<Vec<FieldElem>, AnalysisError> {
        let mut v: Vec<FieldElem> = match &self.u {
            URule::All => ctx.elements(Base).collect(),
            URule::List(codes) => codes.iter().map(|&c| ctx.from_code(Base, c)).collect::<Result<_, _>>()?,
        };
        v.sort_by_key(|u| u.code());
        v.dedup();
        Ok(v)
    }

    fn pairs(&self, ctx: &FieldCtx) -> Result<Vec<TorusPair>, AnalysisError> {
        let us = self.us(ctx)?;
        let mut out = Vec::new();
        for a in self.alphas(ctx)? {
            for &u in &us {
                out.push(TorusPair::new(ctx, a, u)?);
            }
        }
        Ok(out)
    }
}

/// Aggregate document: `{config, field_ctx, rows, summary}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<R> {
    pub config: RunConfig,
    pub field_ctx: Vec<FieldCtxDescriptor>,
    pub rows: Vec<R>,
    pub summary: Summary,
}

pub fn field_descriptors(config: &RunConfig) -> Result<Vec<FieldCtxDescriptor>, AnalysisError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in &config.fields {
        if seen.insert(*f) {
            out.push(FieldCtx::build(f.p, f.m)?.descriptor());
        }
    }
    Ok(out)
}

fn case_key(ctx: &FieldCtx, tp: &TorusPair) -> String {
    format!("alpha={},u={}", ctx.format(tp.alpha()), ctx.format(tp.u()))
}

fn row(check: Check, ctx: Option<&FieldCtx>, r: Option<u64>, case: String, pass: bool, lhs: String, rhs: String) -> SuiteRow {
    SuiteRow {
        check: check.name().to_string(),
        p: ctx.map(|c| c.p()),
        m: ctx.map(|c| c.m()),
        r,
        case,
        pass,
        exploratory: false,
        lhs,
        rhs,
    }
}

fn tagged(check: Check, rows: Vec<IdentityRow>, m: Option<u32>) -> Vec<SuiteRow> {
    rows.into_iter()
        .map(|r| {
            let mut s = SuiteRow::from_identity(r, m);
            s.case = std::mem::replace(&mut s.check, check.name().to_string());
            s
        })
        .collect()
}

fn run_field_independent(check: Check, config: &RunConfig) -> Vec<SuiteRow> {
    match check {
        Check::Legendre => tagged(check, construction_rows(config.legendre_bound), None),
        Check::Orthogonality => tagged(check, orthogonality_rows(config.orthogonality_bound), None),
        Check::Fe => tagged(check, fe_rows(config.fe_bound), None),
        _ => unreachable!("field-dependent check"),
    }
}

fn run_prime(check: Check, p: u64, config: &RunConfig) -> Result<Vec<SuiteRow>, AnalysisError> {
    let ctx = FieldCtx::build(p, 1)?;
    let m = Some(1);
    Ok(match check {
        Check::IlleSchur => tagged(check, ille_schur_rows(&ctx), m),
        Check::Symmetry => tagged(check, symmetry_rows(&ctx)?, m),
        Check::Vd => tagged(check, vd_rows(&ctx)?, m),
        Check::Lemma61 => tagged(check, lemma61_rows(&ctx), m),
        Check::G3Shape => moment_factor_report(&ctx, config.moment_max)?
            .into_iter()
            .map(|mr| {
                let shape = bracket(mr.shape.entries.iter().map(|e| format!("{}^{}x{}", e.degree, e.multiplicity, e.count)));
                let mut s = row(
                    check,
                    Some(&ctx),
                    None,
                    format!("G_{}", mr.i),
                    !mr.flagged,
                    shape,
                    format!("max_factor_degree={}", mr.max_factor_degree),
                );
                s.exploratory = true;
                s
            })
            .collect(),
        _ => unreachable!("not a prime-only check"),
    })
}

fn run_field(check: Check, ctx: &FieldCtx, config: &RunConfig) -> Result<Vec<SuiteRow>, AnalysisError> {
    let q = ctx.q();
    let mut out = Vec::new();
    match check {
        Check::SumSquares => {
            if ctx.m() == 1 {
                for tp in config.pairs(ctx)? {
                    let mut s = tagged(check, vec![square_sum_row(ctx, &tp)?], Some(1));
                    s[0].case = case_key(ctx, &tp);
                    out.extend(s);
                }
            }
        }
        Check::Theorem1 | Check::Char0 => {
            let with_char0 = check == Check::Char0;
            if with_char0 && q > config.char0_max_q {
                return Ok(out);
            }
            let labels = if with_char0 { all_labels(q) } else { in_scope_labels(q) };
            let rows: Vec<Vec<CorrelationReport>> = config
                .pairs(ctx)?
                .par_iter()
                .map(|tp| correlation_rows(ctx, tp, &labels, with_char0))
                .collect::<Result<_, _>>()?;
            for cr in rows.into_iter().flatten() {
                let (pass, lhs, rhs) = if with_char0 {
                    let c0 = match (&cr.c_char0_num, &cr.c_char0_den) {
                        (Some(n), Some(d)) => format!("{n}/{d}"),
                        _ => format!("{:.12}", cr.c_char0_float.unwrap_or(f64::NAN)),
                    };
                    (cr.agree_char0 == Some(true), format!("{} -> {}", c0, cr.c_char0_modp.clone().unwrap_or_default()), cr.c_modp.clone())
                } else {
                    (cr.agree_modp, format!("c={},st={}", cr.c_modp, cr.st), cr.legendre_pred.clone())
                };
                out.push(row(check, Some(ctx), cr.r, format!("alpha={},u={},label={}", cr.alpha, cr.u, cr.label), pass, lhs, rhs));
            }
        }
        Check::UZero => {
            let zero = ctx.zero(Base);
            for a in config.alphas(ctx)? {
                let tp = TorusPair::new(ctx, a, zero)?;
                let data = CorrelationData::new(ctx, &tp);
                for label in in_scope_labels(q) {
                    let r = label.weight(q).expect("in-scope labels have a weight");
                    let c = data.modp(ctx, label);
                    let want = u_zero_value(ctx, r);
                    out.push(row(
                        check,
                        Some(ctx),
                        Some(r),
                        format!("alpha={},label={label}", ctx.format(a)),
                        ctx.eq_elem(c, want),
                        ctx.format(c),
                        ctx.format(want),
                    ));
                }
            }
        }
        Check::Gg => {
            let sums: Vec<(String, crate::chars::GgSums)> =
                config.pairs(ctx)?.par_iter().map(|tp| (case_key(ctx, tp), gg_sums(ctx, tp))).collect();
            for (case, g) in sums {
                out.push(row(
                    check,
                    Some(ctx),
                    None,
                    case,
                    g.pass,
                    format!("N={},char0={},modp={}", g.unipotent_count, g.char0, g.modp),
                    format!("N={},char0={},modp={}", g.table_count, g.char0_expected, g.modp_expected),
                ));
            }
        }
        Check::CharTable => {
            let t = table_selftest(ctx, config.brute_force_max_q);
            out.push(row(
                check,
                Some(ctx),
                None,
                format!("brute_force={}", t.brute_force_checked),
                t.pass,
                format!("sum_dim2={},orth_err={:.3e},class_sizes={},class_fn={}", t.dim_square_sum, t.max_orthogonality_error, t.class_sizes_ok, t.class_function_ok),
                format!("{}", t.group_order),
            ));
        }
        Check::Search => {
            for a in config.alphas(ctx)? {
                let case = format!("alpha={}", ctx.format(a));
                if ctx.m() >= 2 {
                    let t = theorem2_verify(ctx, a)?;
                    let w = t.search.witness.as_ref().map_or("none".to_string(), |w| w.u.clone());
                    out.push(row(
                        check,
                        Some(ctx),
                        None,
                        case,
                        t.pass,
                        format!("witness={w},witnesses={}", bracket(&t.search.naive_witnesses)),
                        format!("units={},nonresidues={}>{}", t.all_units, t.nonresidue_count, t.folded_degree_bound),
                    ));
                } else {
                    let s = nonvanishing_search(ctx, a)?;
                    let w = s.witness.as_ref().map_or("none".to_string(), |w| w.u.clone());
                    let mut r = row(check, Some(ctx), None, case, !s.exhausted && s.routes_agree, format!("witness={w}"), format!("routes_agree={}", s.routes_agree));
                    r.exploratory = true;
                    out.push(r);
                }
            }
        }
        Check::Expectation => {
            let e = expectation_scan(ctx)?;
            let mut r = row(
                check,
                Some(ctx),
                None,
                format!("folded_degree={},bound={}", e.folded_degree, e.degree_bound),
                e.verdict,
                format!("good={}", bracket(&e.good_nonresidues)),
                format!("g_literal={},g_function={}", bracket(&e.g_literal), bracket(&e.g_function)),
            );
            r.exploratory = true;
            out.push(r);
        }
        _ => unreachable!("dispatched elsewhere"),
    }
    Ok(out)
}

enum Cell {
    Independent(Check),
    Prime(Check, u64),
    Field(Check, FieldSpec),
}

/// Runs every enabled check over the configured grid. Rows come out in a
/// fixed order: checks in declaration order, then fields as configured.
pub fn run_identity_suite(config: &RunConfig) -> Result<Report<SuiteRow>, AnalysisError> {
    config.validate()?;
    let mut fields: Vec<FieldSpec> = Vec::new();
    for f in &config.fields {
        if !fields.contains(f) {
            fields.push(*f);
        }
    }
    let primes: BTreeSet<u64> = fields.iter().map(|f| f.p).collect();
    let mut cells = Vec::new();
    for c in Check::ALL.into_iter().filter(|&c| config.enabled(c)) {
        if c.field_independent() {
            cells.push(Cell::Independent(c));
        } else if c.prime_only() {
            cells.extend(primes.iter().map(|&p| Cell::Prime(c, p)));
        } else {
            cells.extend(fields.iter().map(|&f| Cell::Field(c, f)));
        }
    }
    let results: Vec<Vec<SuiteRow>> = cells
        .par_iter()
        .map(|cell| match *cell {
            Cell::Independent(c) => Ok(run_field_independent(c, config)),
            Cell::Prime(c, p) => run_prime(c, p, config),
            Cell::Field(c, f) => run_field(c, &FieldCtx::build(f.p, f.m)?, config),
        })
        .collect::<Result<_, AnalysisError>>()?;
    let rows: Vec<SuiteRow> = results.into_iter().flatten().collect();
    Ok(Report {
        config: config.clone(),
        field_ctx: field_descriptors(config)?,
        summary: Summary::from_flags(rows.iter().map(|r| (r.pass, r.exploratory))),
        rows,
    })
}

/// Correlation rows for every configured field and torus pair.
pub fn verify_theorem1(config: &RunConfig, with_char0: bool) -> Result<Report<CorrelationReport>, AnalysisError> {
    config.validate()?;
    let mut rows = Vec::new();
    for f in &config.fields {
        let ctx = FieldCtx::build(f.p, f.m)?;
        let labels = in_scope_labels(ctx.q());
        let c0 = with_char0 && ctx.q() <= config.char0_max_q;
        let per: Vec<Vec<CorrelationReport>> = config
            .pairs(&ctx)?
            .par_iter()
            .map(|tp| correlation_rows(&ctx, tp, &labels, c0))
            .collect::<Result<_, _>>()?;
        rows.extend(per.into_iter().flatten());
    }
    Ok(Report {
        config: config.clone(),
        field_ctx: field_descriptors(config)?,
        summary: Summary::from_flags(rows.iter().map(|r| (r.pass(), false))),
        rows,
    })
}
