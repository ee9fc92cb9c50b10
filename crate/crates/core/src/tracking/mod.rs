//! Predictor-corrector path tracking of square homotopies from `t = 1` to
//! `t = 0`, with start systems built from products of random linear forms.

mod homotopy;
mod start;
mod tracker;

pub use homotopy::{HomotopyEval, HomotopyProblem, PolyHomotopy};
pub use start::{LinearFactor, ProductStartSystem};
pub use tracker::{
    newton_correct, track_all, track_path, track_path_traced, ConfigError, NewtonResult,
    PathOutcome, PathStatus, TrackerConfig,
};
