//! Pseudo-spectral integration of the KGW, complex KGW, SW, SP and
//! second-order normal-form systems.

pub mod functional_eval;
pub mod grid;
pub mod line_fft;
pub mod state;
pub mod run;
pub mod systems;

pub use grid::{Grid, Spectral};
pub use state::{gaussian_real, relative_l2, ComplexState, Frame, RealPair};
pub use functional_eval::{Evaluator, FieldValues};
pub use run::{compare_trajectories, integrate, DiagnosticsRecord, Norm, Run, SolverConfig};
pub use systems::{Scheme, Solver, System};
