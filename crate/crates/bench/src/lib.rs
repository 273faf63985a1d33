//! Shared inputs for the criterion benches.

use vcalc_core::{parse_expr, Expr, Settings, VirtualNumber};

pub fn settings() -> Settings {
    Settings::default()
}

/// `∞ + ∂ + (±)∂²`, a value with both branches populated.
pub fn mixed_value() -> VirtualNumber {
    let del = VirtualNumber::del();
    &(&VirtualNumber::infty() + &del) + &(&del * &del).alternate_sign()
}

pub fn expr(src: &str) -> Expr {
    parse_expr(src).expect("bench expression parses")
}
