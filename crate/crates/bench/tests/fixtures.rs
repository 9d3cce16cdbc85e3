// SPDX-License-Identifier: Apache-2.0

use toricorr::chars::CorrelationData;
use toricorr_bench::fixture;

#[test]
fn fixtures_cover_benchmarked_fields() {
    for (p, m) in [(5, 1), (13, 1), (3, 2), (7, 2)] {
        let (ctx, tp) = fixture(p, m, 1);
        let data = CorrelationData::new(&ctx, &tp);
        assert_eq!(data.pairs(), (ctx.q() - 1) * (ctx.q() + 1));
    }
}
