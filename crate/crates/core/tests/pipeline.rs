// SPDX-License-Identifier: Apache-2.0

//! End-to-end use of the public API: search, correlations, serialization.

use toricorr::analysis::{correlation_rows, nonvanishing_search, run_identity_suite, Check, FieldSpec, RunConfig};
use toricorr::brauer::TorusPair;
use toricorr::chars::in_scope_labels;
use toricorr::legendre::legendre_mod_p;
use toricorr::{FieldCtx, FieldLevel};

#[test]
fn witness_gives_unit_correlations() {
    let ctx = FieldCtx::build(5, 2).unwrap();
    let alpha = ctx.least_non_square();
    let search = nonvanishing_search(&ctx, alpha).unwrap();
    let w = search.witness.expect("extension fields have witnesses");
    let u = ctx.elements(FieldLevel::Base).find(|&u| ctx.format(u) == w.u).unwrap();
    let tp = TorusPair::new(&ctx, alpha, u).unwrap();
    let rows = correlation_rows(&ctx, &tp, &in_scope_labels(ctx.q()), false).unwrap();
    assert!(rows.iter().all(|r| r.agree_modp && r.c_modp != "0"));
}

#[test]
fn non_witness_has_a_vanishing_correlation() {
    // q = 7: a u outside the witness set kills some P_r(u/√α)
    let ctx = FieldCtx::build(7, 1).unwrap();
    for alpha in ctx.non_squares() {
        let s = nonvanishing_search(&ctx, alpha).unwrap();
        for u in ctx.nonzero_elements(FieldLevel::Base) {
            if s.naive_witnesses.contains(&ctx.format(u)) {
                continue;
            }
            let tp = TorusPair::new(&ctx, alpha, u).unwrap();
            let rows = correlation_rows(&ctx, &tp, &in_scope_labels(7), false).unwrap();
            assert!(rows.iter().any(|r| r.c_modp == "0"));
        }
    }
}

#[test]
fn suite_report_serializes_with_context() {
    let cfg = RunConfig {
        fields: vec![FieldSpec { p: 3, m: 2 }],
        checks: vec![Check::Theorem1, Check::Expectation],
        ..RunConfig::default()
    };
    let report = run_identity_suite(&cfg).unwrap();
    let v = serde_json::to_value(&report).unwrap();
    assert_eq!(v["field_ctx"][0]["m"], 2);
    assert_eq!(v["summary"]["exploratory"], 1);
    assert!(v["summary"]["pass"].as_bool().unwrap());
}

#[test]
fn reductions_live_on_the_prime_field() {
    let ctx = FieldCtx::build(3, 3).unwrap();
    assert_eq!(legendre_mod_p(13, &ctx).level(), FieldLevel::Prime);
}
