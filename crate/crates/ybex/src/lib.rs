//! Exactly verified integrable Markov models built from set-theoretical
//! solutions of the Yang-Baxter equation.
//!
//! The crate covers the full pipeline:
//!
//! * [`perm`]: permutation algebra, cycle decompositions, species/charge
//!   coordinates, L-th roots.
//! * [`twosite`]: two-site maps on pairs, the braided Yang-Baxter and
//!   involutivity checks, Baxterization, and parametrized map families.
//! * [`matrix`]: exact sparse rational matrices, Kronecker products,
//!   two-site embeddings, kernels.
//! * [`markov`]: continuous-time Markov generators on periodic chains,
//!   twisted boundary conditions, transfer matrices and the conjugations
//!   relating map families to the twisted symmetric exclusion process.
//! * [`sector`]: dynamical sectors, their labels, counting formulas and
//!   uniform stationary states.
//! * [`quench`]: branching probabilities between sector decompositions of
//!   two commuting models, closed forms, and the induced oscillation chain.
//! * [`dynamics`]: numerically controlled time evolution, exact long-time
//!   limits, and reproducible stochastic trajectory sampling.
//! * [`model`]: a small text format describing a model instance.
//! * [`repro`]: the end-to-end reproduction suite with frozen expected
//!   values, shared by the command line and the acceptance tests.

pub mod dynamics;
pub mod markov;
pub mod matrix;
pub mod model;
pub mod perm;
pub mod quench;
pub mod rat;
pub mod repro;
pub mod report;
pub mod sector;
pub mod twosite;

pub use perm::Permutation;
pub use rat::Rat;
pub use report::CheckReport;
