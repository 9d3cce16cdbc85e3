// SPDX-License-Identifier: Apache-2.0

//! Serializable result rows shared by the library checks and the CLI.

use serde::Serialize;

/// One identity run: `{r, p, check, pass, lhs, rhs}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityRow {
    pub r: Option<u64>,
    pub p: Option<u64>,
    pub check: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
}

impl IdentityRow {
    pub fn new(check: impl Into<String>, r: Option<u64>, p: Option<u64>, pass: bool, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        IdentityRow {
            r,
            p,
            check: check.into(),
            pass,
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }
}

/// Bracketed, comma-separated list.
pub fn bracket<I, T>(items: I) -> String
where
    I: IntoIterator<Item = T>,
    T: ToString,
{
    let parts: Vec<String> = items.into_iter().map(|t| t.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// One verified correlation: both computed values of `c mod p`, the
/// Legendre prediction and the agreement flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub label: String,
    pub p: u64,
    pub m: u32,
    pub alpha: String,
    pub u: String,
    /// Legendre index; `None` for labels without both fixed vectors.
    pub r: Option<u64>,
    pub c_modp: String,
    /// `s t` from the fixed-vector computation.
    pub st: String,
    pub legendre_pred: String,
    pub c_char0_num: Option<String>,
    pub c_char0_den: Option<String>,
    /// Diagnostic float value of the characteristic-zero correlation.
    pub c_char0_float: Option<f64>,
    /// Reduction mod `p` of the characteristic-zero value.
    pub c_char0_modp: Option<String>,
    pub agree_modp: bool,
    pub agree_char0: Option<bool>,
}

impl CorrelationReport {
    pub fn pass(&self) -> bool {
        self.agree_modp && self.agree_char0 != Some(false)
    }
}

/// Generic row of the identity suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteRow {
    pub check: String,
    pub p: Option<u64>,
    pub m: Option<u32>,
    pub r: Option<u64>,
    /// Free-form case key such as `alpha=2,u=1`.
    pub case: String,
    pub pass: bool,
    /// Exploratory rows are reported but never fail a run.
    pub exploratory: bool,
    pub lhs: String,
    pub rhs: String,
}

impl SuiteRow {
    pub fn from_identity(row: IdentityRow, m: Option<u32>) -> Self {
        SuiteRow {
            check: row.check,
            p: row.p,
            m: if row.p.is_some() { m } else { None },
            r: row.r,
            case: String::new(),
            pass: row.pass,
            exploratory: false,
            lhs: row.lhs,
            rhs: row.rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub exploratory: usize,
    pub pass: bool,
}

impl Summary {
    /// Counts asserted rows by outcome; exploratory rows only by number.
    pub fn from_flags(rows: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let (mut total, mut passed, mut exploratory) = (0, 0, 0);
        for (pass, expl) in rows {
            total += 1;
            if expl {
                exploratory += 1;
            } else if pass {
                passed += 1;
            }
        }
        let failed = total - passed - exploratory;
        Summary {
            total,
            passed,
            failed,
            exploratory,
            pass: failed == 0,
        }
    }
}
