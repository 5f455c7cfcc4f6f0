//! Benchmark crate; see `benches/pipeline.rs`. The library target only hosts
//! shared setup helpers.

use num_complex::Complex64;
use qwsearch::{equitable_partition, quotient_hamiltonian, superposition_state, GraphSpec};

/// Reduced Hamiltonian and reduced initial superposition for a graph.
pub fn reduced_setup(
    g: &GraphSpec,
    gamma: f64,
) -> (qwsearch::ReducedHamiltonian, nalgebra::DVector<Complex64>) {
    let p = equitable_partition(g);
    let h = quotient_hamiltonian(g, &p, gamma).expect("benchmark graphs are valid");
    let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
    (h, s)
}
