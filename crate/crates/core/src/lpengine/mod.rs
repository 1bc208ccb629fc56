//! Discrete spectral core: periodic grids, dyadic blocks, Fourier
//! multipliers and weighted quadrature.

mod dyadic;
mod field;
mod grid;
pub mod io;
pub mod quad;
mod radial;

pub use dyadic::{
    bessel_apply, block_count, derivative, lp_blocks, make_dyadic, multi_indices, phi_hat, phi_hat0,
    DyadicSystem,
};
pub use field::Field;
pub use grid::Grid;
pub use quad::{parseval_l2, sphere_area, weighted_integral, weighted_lp, weighted_lp_samples};
pub use radial::{
    classify_diverged, radial_weighted_lp, RadialForm, RadialNorm, RadialProfile, PROTOCOL_CAUCHY,
    PROTOCOL_DELTA, PROTOCOL_LEVELS,
};


#[cfg(test)]
mod tests;
