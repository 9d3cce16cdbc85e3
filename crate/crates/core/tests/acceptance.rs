// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: ten criteria, one PASS/FAIL line each, exact
//! comparisons throughout. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rayon::prelude::*;

use toricorr::analysis::{correlation_rows, theorem2_verify};
use toricorr::brauer::{averaging_ops, scalar_s, scalar_t, theorem1_modp, u_zero_value, TorusPair, WeightDigits};
use toricorr::chars::{all_labels, gg_sums, in_scope_labels, table_selftest, CorrelationData, ORTHOGONALITY_TOL};
use toricorr::fields::is_prime;
use toricorr::legendre::{
    ille_schur_check, legendre_explicit, lemma61_check, normalization_check, ode_check, orthogonality_check,
    verify_fe, verify_vd, ExplicitForm, LegendreCache,
};
use toricorr::{Dyadic, DyadicPoly, FieldCtx, FieldLevel};

use FieldLevel::Base;

const GRID_QS: [(u64, u32); 9] = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3), (7, 2)];

fn odd_primes(max: u64) -> Vec<u64> {
    (3..=max).filter(|&n| is_prime(n)).collect()
}

fn pairs(ctx: &FieldCtx) -> Vec<TorusPair> {
    let mut out = Vec::new();
    for a in ctx.non_squares() {
        for u in ctx.elements(Base) {
            out.push(TorusPair::new(ctx, a, u).expect("non-square alpha"));
        }
    }
    out
}

/// Result of one criterion: pass flag and a short detail line.
type Outcome = (bool, String);

fn criterion_1() -> Outcome {
    let mut checked = 0usize;
    for (p, m) in GRID_QS {
        let ctx = FieldCtx::build(p, m).unwrap();
        let labels = in_scope_labels(ctx.q());
        let res: Vec<Result<usize, String>> = pairs(&ctx)
            .par_iter()
            .map(|tp| {
                let rows = correlation_rows(&ctx, tp, &labels, false).map_err(|e| e.to_string())?;
                match rows.iter().find(|r| !r.agree_modp) {
                    Some(r) => Err(format!("q={} alpha={} u={} {}: c={} st={} pred={}", ctx.q(), r.alpha, r.u, r.label, r.c_modp, r.st, r.legendre_pred)),
                    None => Ok(rows.len()),
                }
            })
            .collect();
        for r in res {
            match r {
                Ok(n) => checked += n,
                Err(e) => return (false, e),
            }
        }
    }
    (true, format!("{checked} (q, alpha, u, label) cells agree"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for (p, m) in GRID_QS {
        let ctx = FieldCtx::build(p, m).unwrap();
        let q = ctx.q();
        for a in ctx.non_squares() {
            let tp = TorusPair::new(&ctx, a, ctx.zero(Base)).unwrap();
            let data = CorrelationData::new(&ctx, &tp);
            for label in in_scope_labels(q) {
                let r = label.weight(q).unwrap();
                let c = data.modp(&ctx, label);
                let want = u_zero_value(&ctx, r);
                if !ctx.eq_elem(c, want) {
                    return (false, format!("q={q} alpha={} {label}: {} != {}", ctx.format(a), ctx.format(c), ctx.format(want)));
                }
                checked += 1;
            }
        }
    }
    (true, format!("{checked} u = 0 cells match the binomial formula"))
}

fn criterion_3() -> Outcome {
    let mut witnesses = Vec::new();
    for (p, m) in [(3u64, 2u32), (5, 2), (7, 2), (3, 3)] {
        let ctx = FieldCtx::build(p, m).unwrap();
        for a in ctx.non_squares() {
            let t = match theorem2_verify(&ctx, a) {
                Ok(t) => t,
                Err(e) => return (false, e.to_string()),
            };
            if !t.pass {
                return (false, format!("q={} alpha={}: {:?}", ctx.q(), ctx.format(a), t.search));
            }
            if a == ctx.least_non_square() {
                witnesses.push(format!("q={}:u={}", ctx.q(), t.search.witness.unwrap().u));
            }
        }
    }
    (true, format!("witnesses found, search routes agree ({})", witnesses.join(" ")))
}

fn criterion_4() -> Outcome {
    let ps = odd_primes(97);
    for &p in &ps {
        let (a, b) = lemma61_check(&FieldCtx::build(p, 1).unwrap());
        if !(a.pass && b.pass) {
            return (false, format!("p={p}"));
        }
    }
    (true, format!("both sum identities exact for {} primes", ps.len()))
}

fn criterion_5() -> Outcome {
    for p in odd_primes(31) {
        let ctx = FieldCtx::build(p, 1).unwrap();
        for r in 0..p {
            if !verify_vd(r, &ctx).unwrap_or(false) {
                return (false, format!("pointwise identity fails at p={p} r={r}"));
            }
        }
    }
    for r in 0..=20 {
        if !verify_fe(r) {
            return (false, format!("square expansion fails at r={r}"));
        }
    }
    (true, "pointwise identity for p <= 31; square expansion for r <= 20".into())
}

fn criterion_6() -> Outcome {
    for p in odd_primes(13) {
        let ctx = FieldCtx::build(p, 1).unwrap();
        let reduced = LegendreCache::new(p * p - 1).reduce(&ctx);
        for r in 0..p * p {
            let c = ille_schur_check(r, &ctx);
            if !c.pass || c.lhs != reduced[r as usize] {
                return (false, format!("digit congruence fails at p={p} r={r}"));
            }
            // digit-wise reflection r ↦ p^2 - 1 - r
            if reduced[(p * p - 1 - r) as usize] != reduced[r as usize] {
                return (false, format!("reflection fails at p={p} r={r}"));
            }
        }
    }
    (true, "digit and reflection congruences for r < p^2, p <= 13".into())
}

fn criterion_7() -> Outcome {
    let mut cells = 0;
    for p in [5u64, 7, 11, 13] {
        let ctx = FieldCtx::build(p, 1).unwrap();
        let zero = ctx.zero(Base);
        let minus_two = ctx.from_int(Base, -2);
        for tp in pairs(&ctx) {
            let g = gg_sums(&ctx, &tp);
            let modp_ok = g.modp == ctx.format(zero) || g.modp == ctx.format(minus_two);
            if !(g.pass && modp_ok) {
                return (false, format!("p={p} alpha={} u={}: {g:?}", ctx.format(tp.alpha()), ctx.format(tp.u())));
            }
            cells += 1;
        }
    }
    (true, format!("{cells} (p, alpha, u) cells match the case table"))
}

fn criterion_8() -> Outcome {
    let mut qs = Vec::new();
    for p in odd_primes(49) {
        let mut q = p;
        let mut m = 1;
        while q <= 49 {
            qs.push((p, m));
            q *= p;
            m += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for &(p, m) in &qs {
        let ctx = FieldCtx::build(p, m).unwrap();
        let t = table_selftest(&ctx, 13);
        worst = worst.max(t.max_orthogonality_error);
        if !t.pass || t.dim_square_sum != ctx.q() * (ctx.q() * ctx.q() - 1) {
            return (false, format!("table self-test fails at q={}: {t:?}", ctx.q()));
        }
    }
    let mut reductions = 0;
    for (p, m) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
        let ctx = FieldCtx::build(p, m).unwrap();
        let labels = all_labels(ctx.q());
        for tp in pairs(&ctx) {
            let rows = correlation_rows(&ctx, &tp, &labels, true).unwrap();
            if let Some(r) = rows.iter().find(|r| r.agree_char0 != Some(true)) {
                return (false, format!("char-0 reduction mismatch: {r:?}"));
            }
            reductions += rows.len();
        }
    }
    (true, format!("{} fields, max orthogonality error {worst:.1e} < {ORTHOGONALITY_TOL:.0e}, {reductions} char-0 reductions", qs.len()))
}

fn criterion_9() -> Outcome {
    let cache = LegendreCache::new(64);
    for (r, f) in cache.polys().iter().enumerate() {
        let r = r as u64;
        if &legendre_explicit(r, ExplicitForm::Binomial) != f || &legendre_explicit(r, ExplicitForm::Trigonometric) != f {
            return (false, format!("constructions differ at r={r}"));
        }
        if !ode_check(f, r) || !normalization_check(f) {
            return (false, format!("ODE or P_r(1) = 1 fails at r={r}"));
        }
    }
    for r in 0..=20 {
        for s in 0..=20 {
            if !orthogonality_check(r, s) {
                return (false, format!("orthogonality fails at ({r}, {s})"));
            }
        }
    }
    (true, "three constructions, ODE, normalization for r <= 64; orthogonality for r, s <= 20".into())
}

fn criterion_10() -> Outcome {
    // exhaustive grids: sign invariance and full-vector proportionality
    for (p, m) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2), (11, 1), (5, 2), (3, 3)] {
        let ctx = FieldCtx::build(p, m).unwrap();
        for tp in pairs(&ctx) {
            for r in 0..=(ctx.q() - 1) / 2 {
                let row = theorem1_modp(&ctx, r, &tp).unwrap();
                if !row.sign_invariant {
                    return (false, format!("sign invariance fails at q={} r={r}", ctx.q()));
                }
                let d = WeightDigits::from_weight(&ctx, r).unwrap();
                if scalar_s(&ctx, &d, &tp).is_err() || scalar_t(&ctx, &d, &tp).is_err() {
                    return (false, format!("averaged vector not proportional at q={} r={r}", ctx.q()));
                }
            }
        }
    }
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    // averaging operators are idempotent
    let fields = [(5u64, 1u32), (7, 1), (3, 2), (3, 3)];
    let idem = runner.run(&(0usize..fields.len(), 0u64..1000, 0u64..1000, 0u64..1000), |(fi, ai, ui, ri)| {
        let ctx = FieldCtx::build(fields[fi].0, fields[fi].1).unwrap();
        let ns = ctx.non_squares();
        let u = ctx.elements(Base).nth((ui % ctx.q()) as usize).unwrap();
        let tp = TorusPair::new(&ctx, ns[(ai as usize) % ns.len()], u).unwrap();
        let d = WeightDigits::from_weight(&ctx, ri % ((ctx.q() + 1) / 2)).unwrap();
        let (eh, ek) = averaging_ops(&ctx, &d, &tp).unwrap();
        prop_assert!(eh.mul(&ctx, &eh) == eh);
        prop_assert!(ek.mul(&ctx, &ek) == ek);
        Ok(())
    });
    if let Err(e) = idem {
        return (false, format!("idempotence: {e}"));
    }
    // reduction mod p is a ring morphism on Z[1/2][x]
    let coeffs = || prop::collection::vec((-500i64..500, 0u32..6), 0..12);
    let morph = runner.run(&(coeffs(), coeffs(), 0usize..5), |(a, b, pi)| {
        let ctx = FieldCtx::build([3u64, 5, 7, 11, 13][pi], 1).unwrap();
        let mk = |v: &[(i64, u32)]| DyadicPoly::new(v.iter().map(|&(n, e)| Dyadic::new(BigInt::from(n), e)).collect());
        let (f, g) = (mk(&a), mk(&b));
        let (rf, rg) = (f.reduce_mod_p(&ctx), g.reduce_mod_p(&ctx));
        prop_assert_eq!(f.add(&g).reduce_mod_p(&ctx), rf.add(&ctx, &rg).unwrap());
        prop_assert_eq!(f.mul(&g).reduce_mod_p(&ctx), rf.mul(&ctx, &rg).unwrap());
        Ok(())
    });
    if let Err(e) = morph {
        return (false, format!("reduction morphism: {e}"));
    }
    (true, "sign invariance, proportionality, idempotence, reduction morphism".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("correlation = s t = P_r(u/sqrt(alpha))^2 mod p", criterion_1),
        ("u = 0 binomial formula", criterion_2),
        ("simultaneous non-vanishing witnesses for m >= 2", criterion_3),
        ("sum identities for G_1 and G_2, p <= 97", criterion_4),
        ("pointwise square identity and square expansion", criterion_5),
        ("digit and reflection congruences", criterion_6),
        ("Gelfand-Graev unipotent counts and sums", criterion_7),
        ("character table self-test and char-0 reduction", criterion_8),
        ("Legendre construction cross-checks", criterion_9),
        ("property suites", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {:>2}: {name} [{detail}] ({secs:.1}s)", if ok { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
