//! Sharp pointwise estimates for mappings admitting general Poisson
//! representations on the unit ball.

pub mod specfun;
pub mod kernel;
pub mod sphere_oracle;
pub mod sharp;
pub mod transform;
pub mod cli;
