//! Exact rationals, quadratic irrationals and continued fractions.

mod approx;
mod cf;
mod magnitude;
mod quadratic;

pub use approx::{
    digit_dominates, is_in_se_d, se_density_truncate, well_approximated, well_approximated_cf, CVerdict, DigitTest,
    LogRatio, SeVerdict, WellApproximatedReport,
};
pub use cf::{cf_expand, CfWire, ContinuedFraction, Convergent, Digit, DigitRule, Magnitude};
pub use magnitude::LogMagnitude;
pub use num_rational::BigRational;
pub use quadratic::QuadraticNumber;
