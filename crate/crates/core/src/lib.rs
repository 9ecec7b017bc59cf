//! Infinite-horizon optimal control of positive linear systems with coupled
//! input constraints.
//!
//! The optimal cost is linear, `J*(x) = p*ᵀx`, and `p*` is the smallest
//! fixed point of an explicit Bellman operator. This crate computes it by
//! value iteration, extracts the sparse optimal feedback, writes the
//! equivalent linear program, builds instances from routing and heat-flow
//! networks, and simulates the asynchronous distributed version of the
//! iteration.
//!
//! ```
//! use posflow::{bellman, instances, policy};
//!
//! let prob = instances::example1();
//! let report = bellman::value_iterate(&prob, &Default::default()).unwrap();
//! assert_eq!(report.p, vec![2.0, 1.0, 2.0, 0.0]);
//! let pol = policy::extract_policy(&prob, &report.p).unwrap();
//! assert_eq!(pol.choices[0], policy::Choice::Selected(0));
//! ```

pub mod bellman;
pub mod distsim;
pub mod error;
pub mod exec;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod network;
pub mod policy;
pub mod random;

pub use bellman::{value_iterate, SolveOptions, SolveReport, Status};
pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::SparseMatrix;
pub use model::{validate, ProblemData, ValidationReport};
pub use policy::{extract_policy, Choice, Policy};
