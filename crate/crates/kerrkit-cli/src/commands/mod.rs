pub mod cauchy;
pub mod charts;
pub mod geodesic;
pub mod orbits;
pub mod sweep;
pub mod thermal;
