// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use toricorr::brauer::TorusPair;
use toricorr::{FieldCtx, FieldLevel};

/// Field context with the least non-square `α` and the torus pair at `u`.
pub fn fixture(p: u64, m: u32, u: i64) -> (FieldCtx, TorusPair) {
    let ctx = FieldCtx::build(p, m).expect("valid field");
    let alpha = ctx.least_non_square();
    let tp = TorusPair::new(&ctx, alpha, ctx.from_int(FieldLevel::Base, u)).expect("non-square alpha");
    (ctx, tp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_builds() {
        let (ctx, tp) = fixture(7, 2, 3);
        assert_eq!(ctx.q(), 49);
        assert!(!ctx.is_square(tp.alpha()).unwrap());
    }
}
