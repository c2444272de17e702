//! Exact isometry constants for small matrices and numeric checks of the
//! recovery, convergence and distortion guarantees.

mod bounds;
mod rip;

pub use bounds::{
    alpha, distortion_checks_after_epsilon_stop, f_exceeds_g_on_grid, iteration_bound_check,
    noisy_guarantee_check, probe_trace_checks, recovery_condition, recovery_condition_from,
    residual_decay_check, snr_condition, IterationState,
};
pub use rip::{binomial, rip_bruteforce, support_deviation, RipReport, MAX_ENUM_N, MAX_ENUM_SUPPORTS};

use std::fmt::Write as _;

/// Comparison a [`BoundCheck`] asserts between its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `lhs <= rhs`, with a relative slack of [`CHECK_SLACK`].
    Le,
    /// `lhs < rhs`, strict and without slack.
    Lt,
    /// `lhs >= rhs`, with a relative slack of [`CHECK_SLACK`].
    Ge,
}

/// Relative floating-point slack applied to non-strict comparisons.
pub const CHECK_SLACK: f64 = 1e-9;

/// One evaluated inequality. `applicable` records whether the preconditions of
/// the underlying statement held; a check is only `satisfied` when applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub applicable: bool,
    pub satisfied: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, relation: Relation, applicable: bool) -> Self {
        let slack = CHECK_SLACK * rhs.abs().max(1.0);
        let holds = match relation {
            Relation::Le => lhs <= rhs + slack,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs - slack,
        };
        let applicable = applicable && lhs.is_finite() && !rhs.is_nan();
        Self { name: name.into(), lhs, rhs, relation, applicable, satisfied: applicable && holds }
    }

    /// An applicable check that failed.
    pub fn is_violation(&self) -> bool {
        self.applicable && !self.satisfied
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{:e},{:e}", self.name, self.applicable, self.satisfied, self.lhs, self.rhs)
    }
}

/// Renders checks as `name,applicable,satisfied,lhs,rhs` lines with a header.
pub fn checks_to_csv(checks: &[BoundCheck]) -> String {
    let mut out = String::from("name,applicable,satisfied,lhs,rhs\n");
    for c in checks {
        let _ = writeln!(out, "{}", c.csv_row());
    }
    out
}
