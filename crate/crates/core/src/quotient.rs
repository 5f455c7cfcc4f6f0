//! Equitable partitions and the reduced (quotient) search Hamiltonian.
//!
//! Vertices that evolve identically by symmetry are grouped into classes; the
//! walk closes on the span of the normalized class-uniform states, so the
//! search Hamiltonian collapses to a small dense symmetric matrix.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::GraphSpec;

/// Ordered equitable partition of the vertices, class 0 = {marked}.
#[derive(Debug, Clone)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
    class_sizes: Vec<usize>,
    num_vertices: usize,
}

impl Partition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Index of the class containing the marked vertex; a singleton, always 0.
    pub fn marked_class(&self) -> usize {
        0
    }

    /// Class index per vertex.
    pub fn class_of(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.num_vertices];
        for (i, class) in self.classes.iter().enumerate() {
            for &v in class {
                out[v] = i;
            }
        }
        out
    }

    /// Build from explicit classes, checking only disjoint cover (not
    /// equitability; that is audited where it is required).
    pub fn from_classes(classes: Vec<Vec<usize>>, num_vertices: usize) -> Result<Self> {
        let mut seen = vec![false; num_vertices];
        for class in &classes {
            for &v in class {
                if v >= num_vertices || seen[v] {
                    return Err(Error::ContractViolation(
                        "classes must disjointly cover all vertices".into(),
                    ));
                }
                seen[v] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::ContractViolation(
                "classes must disjointly cover all vertices".into(),
            ));
        }
        let class_sizes = classes.iter().map(Vec::len).collect();
        Ok(Partition { classes, class_sizes, num_vertices })
    }
}

/// The coarsest equitable partition refining {{marked}, all others}.
///
/// Iterated refinement: split every class by the integer vector of neighbor
/// counts into each current class, until a pass splits nothing. Classes are
/// then ordered canonically by (BFS distance from the marked vertex, smallest
/// vertex index), which puts the hypercube classes in Hamming-weight order.
pub fn equitable_partition(g: &GraphSpec) -> Partition {
    let n = g.num_vertices();
    let marked = g.marked();
    let mut class_of: Vec<usize> =
        (0..n).map(|v| usize::from(v != marked && n > 1)).collect();
    let mut num_classes = if n > 1 { 2 } else { 1 };

    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for v in 0..n {
            let mut sig = vec![0usize; num_classes];
            for &w in g.neighbors(v) {
                sig[class_of[w]] += 1;
            }
            let fresh = ids.len();
            next[v] = *ids.entry((class_of[v], sig)).or_insert(fresh);
        }
        if ids.len() == num_classes {
            break; // refinement never merges, so equal count means unchanged
        }
        num_classes = ids.len();
        class_of = next;
    }

    // BFS distances from the marked vertex; unreachable vertices sort last.
    let mut dist = vec![usize::MAX; n];
    dist[marked] = 0;
    let mut queue = VecDeque::from([marked]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }

    let mut classes = vec![Vec::new(); num_classes];
    for v in 0..n {
        classes[class_of[v]].push(v);
    }

    // Class-to-class neighbor counts from one representative each (the
    // partition is equitable, so any representative agrees).
    let counts: Vec<Vec<usize>> = classes
        .iter()
        .map(|class| {
            let mut row = vec![0usize; num_classes];
            for &w in g.neighbors(class[0]) {
                row[class_of[w]] += 1;
            }
            row
        })
        .collect();

    // Canonical ordering, independent of vertex labelling: rank classes by
    // BFS distance, then iteratively refine by the profile of neighbor counts
    // into each current rank, larger counts at nearer ranks first. Ranks only
    // split under refinement, never reorder, so this terminates.
    let mut rank = dense_ranks(&classes.iter().map(|vs| dist[vs[0]]).collect::<Vec<_>>());
    loop {
        let num_ranks = rank.iter().max().unwrap() + 1;
        let profiles: Vec<Vec<usize>> = (0..num_classes)
            .map(|i| {
                let mut prof = vec![0usize; num_ranks];
                for j in 0..num_classes {
                    prof[rank[j]] += counts[i][j];
                }
                prof
            })
            .collect();
        let mut order: Vec<usize> = (0..num_classes).collect();
        order.sort_by(|&x, &y| rank[x].cmp(&rank[y]).then_with(|| profiles[y].cmp(&profiles[x])));
        let mut next = vec![0usize; num_classes];
        let mut r = 0;
        for w in 0..num_classes {
            if w > 0 {
                let (a, b) = (order[w - 1], order[w]);
                if rank[a] != rank[b] || profiles[a] != profiles[b] {
                    r += 1;
                }
            }
            next[order[w]] = r;
        }
        if next == rank {
            break;
        }
        rank = next;
    }

    // genuinely symmetric classes tie-break by smallest vertex index
    let mut idx: Vec<usize> = (0..num_classes).collect();
    idx.sort_by_key(|&i| (rank[i], classes[i][0]));
    let classes: Vec<Vec<usize>> =
        idx.into_iter().map(|i| std::mem::take(&mut classes[i])).collect();
    let class_sizes = classes.iter().map(Vec::len).collect();
    Partition { classes, class_sizes, num_vertices: n }
}

/// Map values to dense ranks 0..k preserving order.
fn dense_ranks(values: &[usize]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    values.iter().map(|v| sorted.binary_search(v).unwrap()).collect()
}

/// Per-class neighbor counts b[i][j]: how many neighbors in class j each
/// vertex of class i has. Errors if any vertex disagrees with its class.
fn neighbor_counts(g: &GraphSpec, p: &Partition) -> Result<Vec<Vec<usize>>> {
    if p.num_vertices() != g.num_vertices() {
        return Err(Error::ContractViolation("partition does not cover this graph".into()));
    }
    if p.classes().first().map(|c| c.as_slice()) != Some(&[g.marked()]) {
        return Err(Error::ContractViolation(
            "class 0 must be the marked-vertex singleton".into(),
        ));
    }
    let class_of = p.class_of();
    let d = p.num_classes();
    let mut counts = Vec::with_capacity(d);
    for class in p.classes() {
        let sig_of = |v: usize| {
            let mut sig = vec![0usize; d];
            for &w in g.neighbors(v) {
                sig[class_of[w]] += 1;
            }
            sig
        };
        let rep = sig_of(class[0]);
        for &v in &class[1..] {
            if sig_of(v) != rep {
                return Err(Error::ContractViolation(format!(
                    "partition is not equitable: vertex {v} disagrees with its class"
                )));
            }
        }
        counts.push(rep);
    }
    Ok(counts)
}

/// The search Hamiltonian in the collapsed orthonormal basis of class-uniform
/// states, dimension = number of classes.
#[derive(Debug, Clone)]
pub struct ReducedHamiltonian {
    pub order: usize,
    pub entries: DMatrix<f64>,
    pub gamma: f64,
    pub class_sizes: Vec<usize>,
    pub marked_index: usize,
}

impl ReducedHamiltonian {
    /// d rows of d full-precision entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.order {
            let row: Vec<String> =
                (0..self.order).map(|j| format!("{}", self.entries[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<Vec<f64>> = (0..self.order)
            .map(|i| (0..self.order).map(|j| self.entries[(i, j)]).collect())
            .collect();
        serde_json::json!({
            "order": self.order,
            "gamma": self.gamma,
            "class_sizes": self.class_sizes,
            "entries": entries,
        })
    }
}

fn assemble_reduced(
    g: &GraphSpec,
    p: &Partition,
    gamma: f64,
    laplacian: bool,
) -> Result<ReducedHamiltonian> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let counts = neighbor_counts(g, p)?;
    let d = p.num_classes();
    let sizes = p.class_sizes();
    let mut h = DMatrix::zeros(d, d);
    for i in 0..d {
        if counts[i][i] > 0 {
            // skip zero counts: -gamma * 0 would write a negative zero
            h[(i, i)] = -gamma * counts[i][i] as f64;
        }
        if laplacian {
            let degree: usize = counts[i].iter().sum();
            h[(i, i)] += gamma * degree as f64;
        }
        for j in i + 1..d {
            if counts[i][j] > 0 {
                // <u_i| -gamma A |u_j> = -gamma b_ij sqrt(|V_i| / |V_j|);
                // |V_i| b_ij = |V_j| b_ji makes this symmetric, and assigning
                // both entries from one expression keeps it exact.
                let val = -gamma * counts[i][j] as f64 * (sizes[i] as f64 / sizes[j] as f64).sqrt();
                h[(i, j)] = val;
                h[(j, i)] = val;
            }
        }
    }
    h[(0, 0)] -= 1.0; // oracle term lives only on the marked class
    Ok(ReducedHamiltonian { order: d, entries: h, gamma, class_sizes: sizes.to_vec(), marked_index: 0 })
}

/// Quotient of [`crate::graph::full_hamiltonian`]: adjacency form for regular
/// graphs, Laplacian form otherwise.
pub fn quotient_hamiltonian(g: &GraphSpec, p: &Partition, gamma: f64) -> Result<ReducedHamiltonian> {
    assemble_reduced(g, p, gamma, !g.is_regular())
}

/// Quotient of the forced adjacency form `-gamma A - |a><a|`.
pub fn quotient_hamiltonian_adjacency(
    g: &GraphSpec,
    p: &Partition,
    gamma: f64,
) -> Result<ReducedHamiltonian> {
    assemble_reduced(g, p, gamma, false)
}

/// The equal superposition |s> expressed in the reduced basis:
/// component i = sqrt(|V_i| / N).
pub fn superposition_state(p: &Partition) -> DVector<f64> {
    let n = p.num_vertices() as f64;
    DVector::from_iterator(p.num_classes(), p.class_sizes().iter().map(|&s| (s as f64 / n).sqrt()))
}

/// Expand a reduced-space vector to the full vertex space: vertex v in class i
/// receives amplitude `reduced[i] / sqrt(|V_i|)`. Norm-preserving.
pub fn lift(p: &Partition, reduced: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if reduced.len() != p.num_classes() {
        return Err(Error::ContractViolation(format!(
            "reduced vector has length {}, partition has {} classes",
            reduced.len(),
            p.num_classes()
        )));
    }
    let mut full = DVector::from_element(p.num_vertices(), Complex64::new(0.0, 0.0));
    for (i, class) in p.classes().iter().enumerate() {
        let amp = reduced[i] / (class.len() as f64).sqrt();
        for &v in class {
            full[v] = amp;
        }
    }
    Ok(full)
}
