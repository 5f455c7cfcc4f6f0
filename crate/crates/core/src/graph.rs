//! Graph families and the full-space search Hamiltonian.
//!
//! Vertices are 0-indexed everywhere; the hypercube identifies a vertex index
//! with the integer value of its bit string. The marked vertex carries the
//! rank-one oracle term `-|a><a|`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Family tag with its defining parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Complete graph on N vertices.
    Complete(usize),
    /// M-simplex with every vertex replaced by an M-clique; N = M(M+1).
    SimplexComplete(usize),
    /// n-dimensional hypercube; N = 2^n.
    Hypercube(u32),
    Custom,
}

/// Family selector without the size baked in, for CLI and report plumbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Complete,
    SimplexComplete,
    Hypercube,
}

impl FamilyKind {
    /// Build the family member of the given size (N, M, or n respectively).
    pub fn build(self, size: usize) -> Result<GraphSpec> {
        match self {
            FamilyKind::Complete => complete_graph(size),
            FamilyKind::SimplexComplete => simplex_complete_graph(size),
            FamilyKind::Hypercube => {
                let n = u32::try_from(size)
                    .map_err(|_| Error::InvalidParameter(format!("hypercube n = {size}")))?;
                hypercube_graph(n)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Complete => "complete",
            FamilyKind::SimplexComplete => "simplex",
            FamilyKind::Hypercube => "hypercube",
        }
    }
}

/// An undirected simple graph with one marked vertex.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    marked: usize,
    family: Family,
    degree_list: Vec<usize>,
    neighbors: Vec<Vec<usize>>,
}

impl GraphSpec {
    /// Validate and build. Edges are normalized to `u < v` and sorted.
    pub fn new(
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        marked: usize,
        family: Family,
    ) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidParameter("graph must have at least one vertex".into()));
        }
        if marked >= num_vertices {
            return Err(Error::InvalidParameter(format!(
                "marked vertex {marked} out of range for {num_vertices} vertices"
            )));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-edge at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {num_vertices} vertices"
                )));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate edge".into()));
        }
        match family {
            Family::Complete(n) if n != num_vertices => {
                return Err(Error::InvalidParameter("Complete family parameter mismatch".into()))
            }
            Family::SimplexComplete(m) if m * (m + 1) != num_vertices => {
                return Err(Error::InvalidParameter("SimplexComplete requires N = M(M+1)".into()))
            }
            Family::Hypercube(n) if (1usize << n) != num_vertices => {
                return Err(Error::InvalidParameter("Hypercube requires N = 2^n".into()))
            }
            _ => {}
        }
        let mut neighbors = vec![Vec::new(); num_vertices];
        for &(u, v) in &norm {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        let degree_list = neighbors.iter().map(Vec::len).collect();
        Ok(GraphSpec { num_vertices, edges: norm, marked, family, degree_list, neighbors })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree_list(&self) -> &[usize] {
        &self.degree_list
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn is_regular(&self) -> bool {
        self.degree_list.windows(2).all(|w| w[0] == w[1])
    }

    /// Same graph with a different marked vertex.
    pub fn with_marked(&self, marked: usize) -> Result<Self> {
        GraphSpec::new(self.num_vertices, self.edges.clone(), marked, self.family)
    }

    /// Serialize to the edge-list document format accepted by [`load_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.num_vertices);
        out.push_str(&format!("marked {}\n", self.marked));
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Complete graph on N vertices, marked vertex 0.
pub fn complete_graph(n: usize) -> Result<GraphSpec> {
    if n == 0 {
        return Err(Error::InvalidParameter("complete graph needs N >= 1".into()));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    GraphSpec::new(n, edges, 0, Family::Complete(n))
}

/// The M-simplex with each of its M+1 vertices replaced by an M-clique.
///
/// Clique `c` occupies vertices `[cM, cM + M - 1]`. Cliques `c < d` are joined
/// by the single edge `(cM + d - 1, dM + c)`; every vertex then has exactly
/// one inter-clique edge and the graph is M-regular. Any one-edge-per-pair
/// wiring gives an isomorphic graph; this rule makes output deterministic.
pub fn simplex_complete_graph(m: usize) -> Result<GraphSpec> {
    if m < 2 {
        return Err(Error::InvalidParameter("simplex of complete graphs needs M >= 2".into()));
    }
    let n = m * (m + 1);
    let mut edges = Vec::with_capacity(n * m / 2);
    for c in 0..=m {
        let base = c * m;
        for i in 0..m {
            for j in i + 1..m {
                edges.push((base + i, base + j));
            }
        }
    }
    for c in 0..=m {
        for d in c + 1..=m {
            edges.push((c * m + d - 1, d * m + c));
        }
    }
    GraphSpec::new(n, edges, 0, Family::SimplexComplete(m))
}

/// n-dimensional hypercube; vertices are n-bit strings, edges at Hamming
/// distance 1, marked vertex is the all-zeros string.
pub fn hypercube_graph(n: u32) -> Result<GraphSpec> {
    if n == 0 {
        return Err(Error::InvalidParameter("hypercube needs n >= 1".into()));
    }
    if n > 26 {
        return Err(Error::InvalidParameter(format!(
            "hypercube n = {n} is too large to materialize (2^{n} vertices)"
        )));
    }
    let size = 1usize << n;
    let mut edges = Vec::with_capacity(size * n as usize / 2);
    for v in 0..size {
        for b in 0..n {
            let w = v ^ (1 << b);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    GraphSpec::new(size, edges, 0, Family::Hypercube(n))
}

/// Parse the edge-list document format.
///
/// First line: vertex count. Optional header `marked K`. Then one `u v` edge
/// per line, ASCII decimal. Anything after `#` is a comment.
pub fn load_edge_list(text: &str) -> Result<GraphSpec> {
    let mut num_vertices: Option<usize> = None;
    let mut marked = 0usize;
    let mut marked_seen = false;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("expected a non-negative integer, got {s:?}"),
            })
        };
        let n = match num_vertices {
            None => {
                if fields.len() != 1 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "first line must be the vertex count".into(),
                    });
                }
                num_vertices = Some(parse(fields[0])?);
                continue;
            }
            Some(n) => n,
        };
        if fields[0] == "marked" {
            if marked_seen || !edges.is_empty() || fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "malformed or misplaced marked header".into(),
                });
            }
            marked = parse(fields[1])?;
            if marked >= n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("marked vertex {marked} out of range"),
                });
            }
            marked_seen = true;
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::Parse { line: line_no, msg: "expected an edge `u v`".into() });
        }
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u == v {
            return Err(Error::Parse { line: line_no, msg: format!("self-loop at vertex {u}") });
        }
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("edge ({u}, {v}) out of range for {n} vertices"),
            });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Parse { line: line_no, msg: format!("duplicate edge ({u}, {v})") });
        }
        edges.push((u, v));
    }

    let n = num_vertices
        .ok_or(Error::Parse { line: 1, msg: "empty document, expected a vertex count".into() })?;
    GraphSpec::new(n, edges, marked, Family::Custom)
}

/// The full N-dimensional search Hamiltonian, units of energy with hbar = 1.
#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    pub order: usize,
    pub entries: DMatrix<f64>,
    pub gamma: f64,
}

fn assemble_full(g: &GraphSpec, gamma: f64, laplacian: bool) -> Result<DenseHamiltonian> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let n = g.num_vertices();
    let mut h = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        h[(u, v)] = -gamma;
        h[(v, u)] = -gamma;
    }
    if laplacian {
        // H = -gamma (A - D) - |a><a|: the degree matrix adds +gamma deg(v).
        for v in 0..n {
            h[(v, v)] = gamma * g.degree_list()[v] as f64;
        }
    }
    h[(g.marked(), g.marked())] -= 1.0;
    Ok(DenseHamiltonian { order: n, entries: h, gamma })
}

/// `H = -gamma A - |a><a|` for regular graphs (the degree term is a constant
/// energy shift there); non-regular graphs fall back to the Laplacian form
/// `-gamma (A - D) - |a><a|`.
pub fn full_hamiltonian(g: &GraphSpec, gamma: f64) -> Result<DenseHamiltonian> {
    assemble_full(g, gamma, !g.is_regular())
}

/// Adjacency form `-gamma A - |a><a|` regardless of regularity.
pub fn full_hamiltonian_adjacency(g: &GraphSpec, gamma: f64) -> Result<DenseHamiltonian> {
    assemble_full(g, gamma, false)
}
