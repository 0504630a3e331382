//! Finite-precision completions at places above unramified primes, and rigorous
//! complex embeddings at archimedean places.

pub mod arch;
mod ball;
mod context;
mod element;
pub(crate) mod poly;

pub use arch::{arch_abs_sq, arch_ball_membership, arch_embed, ComplexInterval, Interval, Membership};
pub use ball::{ball_arithmetic_check, min_valuation_below, BallCheckReport, LocalBall, Sampling};
pub use context::{context, factor_count_mod_p, LocalContext, CACHE_ENV};
pub use element::{localize, LocalElement, Valuation};
