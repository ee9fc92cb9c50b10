//! Bottlenecks of pairs of smooth algebraic varieties by numerical homotopy
//! continuation.
//!
//! A bottleneck of varieties `X, Y ⊂ C^n` is a pair `(x, y)`, `x != y`,
//! whose joining line is normal to `X` at `x` and to `Y` at `y`. The solver
//! first computes the normal loci of `X` and `Y` with respect to a random
//! base point `p0` (their sizes are the Euclidean distance degrees) and then
//! deforms the product of those start points into the Lagrange system for
//! critical points of `|x - y|^2`.
//!
//! * [`algebra`]: polynomials, parsing, Jacobians, squaring, root counts
//! * [`tracking`]: the predictor-corrector path tracker
//! * [`startsys`]: normal-locus systems and their solution
//! * [`bottleneck`]: the main homotopy, classification and real filtering
//! * [`baseline`]: direct multihomogeneous solve of the Lagrange system
//! * [`topology`]: curve sampling and Vietoris-Rips component counts
//! * [`families`]: generators for the benchmark varieties

pub mod algebra;
pub mod baseline;
pub mod bottleneck;
pub mod families;
pub mod linalg;
pub mod rng;
pub mod startsys;
pub mod topology;
pub mod tracking;

pub type Complex = num_complex::Complex64;
