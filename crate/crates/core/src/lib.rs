//! Finite-field matrix groups and an exhaustive checker for generation
//! results about companion matrices.
//!
//! The crate builds prime and extension fields, polynomials and dense
//! matrices over them, companion matrices and Singer cycles, the embedding of
//! `GL_a(q^d)` and its Frobenius twist into `GL_{ad}(q)`, and computes exact
//! orders of matrix groups through their action on nonzero vectors. The
//! [`verify`] module runs the exhaustive harnesses and [`cli`] exposes them
//! on the command line.

pub mod cli;
pub mod error;
pub mod fieldext;
pub mod gf;
pub mod matgf;
pub mod permgrp;
pub mod poly;
pub mod verify;

pub use error::{Error, Result};
pub use fieldext::{ExtensionFrame, StandardExtSubgroup};
pub use gf::{make_field, Elem, FieldCtx, FieldElem};
pub use matgf::Mat;
pub use permgrp::{closure_oracle, gl_order, group_order, Bsgs, Closure, Perm};
pub use poly::Poly;
pub use verify::{HarnessConfig, Report};

/// Size limits shared by every construction that enumerates points or group
/// elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on `q^n`, the number of vectors acted on.
    pub points: u64,
    /// Upper bound on `|GL_n(q)|` for full-group scans.
    pub scan: u64,
}

impl Budget {
    pub const DEFAULT_POINTS: u64 = 4096;
    pub const DEFAULT_SCAN: u64 = 25_000;

    pub(crate) fn check_points(&self, what: &'static str, size: u64) -> Result<()> {
        if size > self.points {
            return Err(Error::BudgetExceeded {
                what,
                size: size.to_string(),
                limit: self.points,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            points: Self::DEFAULT_POINTS,
            scan: Self::DEFAULT_SCAN,
        }
    }
}

/// `base^exp`, or `None` on overflow.
pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}
