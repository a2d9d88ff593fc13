//! Pointwise Chern–Weil computations for hermitian vector bundles: sparse
//! exterior algebra, Chern and Segre forms of a curvature tensor, fiber
//! integrals over the projectivized bundle, and Kobayashi–Lübke type
//! inequalities for Hermite–Einstein curvature.

pub mod cli;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod inequalities;
pub mod io;
pub mod kahler;
pub mod moments;
pub mod projective;
pub mod report;
pub mod sampling;
pub mod symfun;

pub use curvature::{
    chern_forms, direction_form, flatness_detectors, is_hermite_einstein, mean_curvature,
    project_to_he, random_curvature, segre_forms, ChernSequence, CurvatureTensor, Kaehler11,
};
pub use error::{Error, Result};
pub use exterior::{divided_power, top_ratio, wedge, Form, MultiIndex};
