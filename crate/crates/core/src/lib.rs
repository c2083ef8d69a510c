//! Evaluation and analysis of N-channel quantum switches.
//!
//! A quantum switch places `N` channels in a coherent superposition of `M`
//! sequential orderings, selected by a `M`-level control system. The output is
//! a block matrix over the control basis whose `(π, π′)` block is the
//! interference term `𝒩_{ππ′}(ρ)`.
//!
//! Two independent evaluators are provided:
//!
//! * [`switch::brute`] sums over every joint Kraus index and works for any
//!   channels. It is slow and serves as ground truth.
//! * [`switch::fast`] handles completely depolarising channels in closed form:
//!   each term is classified by the cycle structure of a permutation `C_{ππ′}`
//!   on `{0, …, N}` built from the two orderings ([`perm::build_c_pair`]).
//!
//! [`diagram`] is a third, purely combinatorial route to the same
//! classification (loop counting on the wiring diagram of a term), and
//! [`optimizer`] ranks sets of orderings by the weight of their
//! information-transmitting terms.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (default); see [`par::Execution`].

pub mod channels;
pub mod diagram;
pub mod error;
pub mod io;
pub mod optimizer;
pub mod par;
pub mod perm;
pub mod switch;
pub mod verify;

pub use channels::{
    make_cdpc, make_identity_channel, ComplexMatrix, DensityMatrix, Ensemble, Isometry,
    KrausChannel,
};
pub use error::{Error, Result};
pub use par::Execution;
pub use perm::{CycleDecomposition, ExtendedPermutation, Permutation};
pub use switch::{SwitchOutput, SwitchSpec};

/// Default absolute tolerance for all numerical invariant checks.
pub const TOL: f64 = 1e-10;
