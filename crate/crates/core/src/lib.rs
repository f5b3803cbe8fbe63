//! Solvers for Simultaneous Feedback Edge Set and Maximum Simultaneous
//! Acyclic Subgraph on edge-colored multigraphs.
//!
//! The exact solver reduces Sim-FES to α-matroid parity over a direct sum of
//! elongated cographic matroids and solves parity with a dynamic program
//! over representative families. A kernelizer shrinks instances first, and
//! brute-force oracles exist for every decision problem so results can be
//! cross-checked.

pub mod ecg;
pub mod ffield;
pub mod generators;
pub mod kernel;
pub mod matroids;
pub mod maxsim;
pub mod par;
pub mod parity;
pub mod repfam;
pub mod rng;
pub mod simfes;

pub use ecg::{parse_ecg, write_ecg, ColorSet, EdgeColoredGraph, EdgeId, Multigraph};
pub use ffield::{FMatrix, PrimeField, DEFAULT_PRIME};
pub use kernel::{apply_rules, kernelize, signature_reduce, Kernel, KernelOptions, KernelVerdict};
pub use matroids::LinearMatroid;
pub use maxsim::{brute_maxsim, solve_maxsim, MaxSimOptions, MaxSimVerdict};
pub use parity::{brute_parity, solve_parity, ParityInstance, ParityOutcome};
pub use simfes::{brute_simfes, solve_simfes, SfesVerdict, SolveOptions};
