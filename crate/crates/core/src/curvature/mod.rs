//! Curvature of analytic ambient metrics, geodesic-sphere data, and the
//! small-sphere mass limits.

mod expansion;
mod metric;
mod oracle;
mod riemann;
mod small_sphere;

pub use expansion::*;
pub use metric::*;
pub use oracle::*;
pub use riemann::*;
pub use small_sphere::*;
