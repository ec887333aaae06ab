//! Provisioning model for delay-gated edge/cloud inference over a Poisson
//! cellular network.
//!
//! * [`analytic`]: closed-form delay distribution, average and asymptotic
//!   MSE, critical AP density and critical edge MSE.
//! * [`geomsim`]: a stochastic-geometry Monte Carlo simulator of the same
//!   uplink model, used as an independent check on the closed forms.
//! * [`experiments`]: parameter sweeps, spec files and CSV output.
//! * [`validation`]: the simulator-versus-closed-form report.
//! * [`numerics`]: seeded random streams, bisection, KS statistics.
//!
//! ```
//! use edgeprovision::analytic::{avg_mse, Scenario};
//!
//! // λ̂ = 1.28 gives a mean load of 2, so r_min = 0.5 loads the link to 1.
//! let s = Scenario::normalized(1.28, 0.5, 1.0, 1.5)?;
//! let m = avg_mse(&s);
//! assert!((m - (1.5 - 0.5 * (-std::f64::consts::FRAC_PI_4).exp())).abs() < 1e-12);
//! # Ok::<(), edgeprovision::Error>(())
//! ```

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod geomsim;
pub mod numerics;
pub mod validation;

pub use error::{Error, Result};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/delay-and-accuracy.md")]
    mod delay_and_accuracy {}
    #[doc = include_str!("../../../book/src/dimensioning.md")]
    mod dimensioning {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/sweeps-and-cli.md")]
    mod sweeps_and_cli {}
}
