//! Desk-scale verification kernels for the analytic machinery behind
//! prime-power twists of degree-three L-functions: exact unit-group and
//! character arithmetic, complete exponential sums, the additive-character
//! delta expansion, composite character sums with their CRT split,
//! oscillatory-integral estimates, and an exact exponent-balancing calculus.

pub mod charsums;
pub mod deltacore;
pub mod expcalc;
pub mod expsums;
pub mod modarith;
pub mod oscint;
