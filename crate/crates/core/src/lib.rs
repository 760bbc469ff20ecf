//! Finite-dimensional laboratory for graded-KMS functionals on `Mat_n(C)`.

pub mod error;
pub mod flow;
pub mod gns;
pub mod graded;
pub mod jordan;
pub mod linalg;
pub mod net;
pub mod report;
pub mod sampling;
pub mod scenario;
pub mod suite;

pub use error::{Error, Result};
pub use flow::ModularFlow;
pub use graded::{Functional, GradedAlgebra};
pub use jordan::{jordan_decompose, JordanData};
pub use report::Report;
pub use sampling::SampleRng;
pub use scenario::{generate_scenario, Scenario, ScenarioConfig};
pub use suite::{run_suite, Check};
