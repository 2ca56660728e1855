//! Core entropy of postcritically-finite polynomials and Newton maps,
//! computed from exact rational-angle data.
//!
//! - [`circle`]: exact angles, the map `t -> d t`, separation and Hausdorff distance.
//! - [`portrait`]: critical portraits and markings, unlinked classes, itineraries.
//! - [`markov`]: Markov graph maps, incidence matrices and certified entropy.
//! - [`thurston`]: entropy of a critical portrait from its pair transition graph.
//! - [`hubbard`]: Hubbard forests, J-ends, `mu` and continuity verdicts.
//! - [`newton`]: Newton maps, extended-graph entropy and continuity verdicts.
//! - [`scan`], [`render`]: continuity scans and SVG portrait diagrams.

pub mod circle;
pub mod exec;
pub mod markov;
pub mod portrait;
pub mod thurston;
pub mod fixtures;
pub mod hubbard;
pub mod newton;
pub mod render;
pub mod scan;
