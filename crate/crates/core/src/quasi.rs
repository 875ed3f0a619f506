//! Deterministic low-discrepancy point sets for the audit suites.
//!
//! The additive recurrence based on the plastic constant covers a rectangle
//! far more evenly than pseudo-random sampling and needs no RNG state; every
//! report that samples points records the sequence name and start offset so
//! audits are bit-reproducible.

/// Start offset of the sequence; recorded in reports.
pub const SEQUENCE_OFFSET: u64 = 1;

/// Sequence identifier recorded in reports.
pub const SEQUENCE_NAME: &str = "r2-plastic";

// 1/p and 1/p^2 for the plastic constant p (real root of x^3 = x + 1).
const ALPHA_1: f64 = 0.754_877_666_246_692_8;
const ALPHA_2: f64 = 0.569_840_290_998_053_2;

/// `n`-th point of the unit-square sequence, `n >= SEQUENCE_OFFSET`.
pub fn unit_point(n: u64) -> (f64, f64) {
    let k = n as f64;
    ((0.5 + k * ALPHA_1).fract(), (0.5 + k * ALPHA_2).fract())
}

/// Low-discrepancy points mapped into `[u1_min, u1_max] x [u2_min, u2_max]`.
pub fn window_points(
    window: (f64, f64, f64, f64),
    count: usize,
) -> impl Iterator<Item = (f64, f64)> {
    let (u1_min, u1_max, u2_min, u2_max) = window;
    (SEQUENCE_OFFSET..SEQUENCE_OFFSET + count as u64).map(move |n| {
        let (x, y) = unit_point(n);
        (u1_min + x * (u1_max - u1_min), u2_min + y * (u2_max - u2_min))
    })
}
