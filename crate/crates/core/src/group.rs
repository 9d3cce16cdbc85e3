// SPDX-License-Identifier: Apache-2.0

//! 2×2 matrices over a field level.

use serde::Serialize;

use crate::fields::{FieldCtx, FieldElem, FieldError, FieldLevel};

/// `(a, b; c, d)`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub d: FieldElem,
}

impl Mat2 {
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_ints(ctx: &FieldCtx, level: FieldLevel, e: [i64; 4]) -> Self {
        Mat2::new(
            ctx.from_int(level, e[0]),
            ctx.from_int(level, e[1]),
            ctx.from_int(level, e[2]),
            ctx.from_int(level, e[3]),
        )
    }

    pub fn identity(ctx: &FieldCtx, level: FieldLevel) -> Self {
        Mat2::from_ints(ctx, level, [1, 0, 0, 1])
    }

    pub fn mul(&self, ctx: &FieldCtx, o: &Mat2) -> Mat2 {
        let f = |x, y, z, w| ctx.add(ctx.mul(x, y), ctx.mul(z, w));
        Mat2::new(
            f(self.a, o.a, self.b, o.c),
            f(self.a, o.b, self.b, o.d),
            f(self.c, o.a, self.d, o.c),
            f(self.c, o.b, self.d, o.d),
        )
    }

    pub fn det(&self, ctx: &FieldCtx) -> FieldElem {
        ctx.sub(ctx.mul(self.a, self.d), ctx.mul(self.b, self.c))
    }

    pub fn trace(&self, ctx: &FieldCtx) -> FieldElem {
        ctx.add(self.a, self.d)
    }

    pub fn inv(&self, ctx: &FieldCtx) -> Result<Mat2, FieldError> {
        let di = ctx.inv(self.det(ctx))?;
        Ok(Mat2::new(
            ctx.mul(self.d, di),
            ctx.mul(ctx.neg(self.b), di),
            ctx.mul(ctx.neg(self.c), di),
            ctx.mul(self.a, di),
        ))
    }

    /// Entry-wise `x ↦ x^{p^i}`.
    pub fn frobenius(&self, ctx: &FieldCtx, i: u32) -> Mat2 {
        Mat2::new(
            ctx.frobenius(self.a, i),
            ctx.frobenius(self.b, i),
            ctx.frobenius(self.c, i),
            ctx.frobenius(self.d, i),
        )
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn entries(&self) -> [FieldElem; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn display(&self, ctx: &FieldCtx) -> MatDisplay {
        MatDisplay(self.entries().map(|e| ctx.format(e)))
    }
}

/// Printable entries of a [`Mat2`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatDisplay(pub [String; 4]);
