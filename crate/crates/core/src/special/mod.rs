//! Scalar special functions: gamma, Mittag-Leffler, Mainardi and the Grönwall
//! majorant series.

pub mod gamma;
pub mod gronwall;
pub mod mainardi;
pub mod mittag_leffler;
mod series;

pub use gamma::{gamma_real, ln_gamma_abs, recip_gamma};
pub use gronwall::{gronwall_series, GronwallParams, GronwallValue};
pub use mainardi::{
    mainardi, mainardi_checked, mainardi_laplace, mainardi_laplace_weighted, mainardi_moment,
    mainardi_moment_quadrature, MainardiTail,
};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_asymptotic, mittag_leffler_exponential_term,
    mittag_leffler_series, mittag_leffler_with_regime, MlParams, Regime,
};
pub use series::SeriesPrecision;
