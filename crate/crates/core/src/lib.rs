//! Continuous-time quantum-walk search on graphs.
//!
//! The pipeline: build a graph and its search Hamiltonian `H = -gamma A - |a><a|`
//! ([`graph`]), collapse it to the symmetry subspace of identically-evolving
//! vertices ([`quotient`]), diagonalize and evolve ([`spectral`]), and run the
//! degenerate-perturbation analysis that locates the critical jumping rate and
//! the `pi / dE` runtime ([`perturbation`]).

pub mod error;
pub mod graph;
pub mod perturbation;
pub mod quotient;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{
    complete_graph, full_hamiltonian, full_hamiltonian_adjacency, hypercube_graph,
    load_edge_list, simplex_complete_graph, DenseHamiltonian, Family, FamilyKind, GraphSpec,
};
pub use perturbation::{
    critical_gamma, critical_gamma_for_graph, default_split_spec, effective_subspace,
    estimate_exponents,
    hypercube_chain_matrix, perturbative_runtime_report, split, table1_column, CriticalGamma,
    EffectiveSubspace, PerturbationSplit, RuntimeReport, SplitMode, SplitSpec, Table1Row,
    DEFAULT_DEGENERACY_TOL,
};
pub use quotient::{
    equitable_partition, lift, quotient_hamiltonian, quotient_hamiltonian_adjacency,
    superposition_state, Partition, ReducedHamiltonian,
};
pub use spectral::{
    curve_to_csv, eigh, evolve_state, overlap_sweep, success_curve, sweep_to_csv,
    EvolutionResult, SpectralDecomposition, SweepRow,
};
