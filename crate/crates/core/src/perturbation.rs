//! Diagrammatic degenerate-perturbation analysis of the reduced Hamiltonian.
//!
//! The reduced matrix is read as a weighted graph with self-loops, split into
//! leading-order terms H0 and a perturbation H1 by asymptotic weight order
//! (or an explicit edge mask), the jumping rate is tuned until the marked
//! eigenvalue of H0 is degenerate with a bulk eigenvalue, and the effective
//! matrix on that degenerate subspace yields the gap dE and runtime pi / dE.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{FamilyKind, GraphSpec};
use crate::quotient::{
    equitable_partition, quotient_hamiltonian, superposition_state, Partition, ReducedHamiltonian,
};
use crate::spectral::{eigh, success_curve};

/// How reduced-matrix entries are assigned to H1.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitMode {
    /// Entries whose estimated scaling exponent exceeds the cutoff stay in H0;
    /// the rest become the perturbation.
    ExponentThreshold { cutoff: f64 },
    /// The listed entry positions (and their symmetric partners) go to H1.
    ExplicitMask { positions: Vec<(usize, usize)> },
}

/// Split specification: mode plus, for the threshold mode, the per-entry
/// scaling exponents (entry ~ c * size^p).
#[derive(Debug, Clone)]
pub struct SplitSpec {
    pub mode: SplitMode,
    pub exponents: Option<DMatrix<f64>>,
}

impl SplitSpec {
    pub fn mask(positions: Vec<(usize, usize)>) -> Self {
        SplitSpec { mode: SplitMode::ExplicitMask { positions }, exponents: None }
    }

    pub fn threshold(cutoff: f64, exponents: DMatrix<f64>) -> Self {
        SplitSpec { mode: SplitMode::ExponentThreshold { cutoff }, exponents: Some(exponents) }
    }
}

/// H = H0 + H1 with every entry wholly in one part.
#[derive(Debug, Clone)]
pub struct PerturbationSplit {
    pub h0: DMatrix<f64>,
    pub h1: DMatrix<f64>,
    pub gamma: f64,
}

/// Weight matrix of the reduced Hamiltonian: W = -H / gamma, with the oracle
/// self-loop written as 1/gamma for the natural rate gamma = 1/size. This is
/// the matrix whose entries carry the size scaling the split sorts by.
fn weight_matrix(g: &GraphSpec, p: &Partition, size: usize) -> Result<DMatrix<f64>> {
    let h = quotient_hamiltonian(g, p, 1.0)?;
    let mut w = -h.entries;
    w[(0, 0)] = size as f64; // the oracle self-loop is 1/gamma at gamma = 1/size
    Ok(w)
}

/// Estimate the scaling exponent of each reduced-matrix entry from two family
/// sizes: p = log(|w2| / |w1|) / log(size2 / size1). Zero entries map to -inf,
/// size-independent entries to exactly 0.
pub fn estimate_exponents(
    family: FamilyKind,
    size1: usize,
    size2: usize,
) -> Result<DMatrix<f64>> {
    if size2 <= size1 {
        return Err(Error::InvalidParameter("need size2 > size1".into()));
    }
    let g1 = family.build(size1)?;
    let g2 = family.build(size2)?;
    let p1 = equitable_partition(&g1);
    let p2 = equitable_partition(&g2);
    if p1.num_classes() != p2.num_classes() {
        return Err(Error::StructureMismatch(format!(
            "reduced dimensions differ between sizes ({} vs {})",
            p1.num_classes(),
            p2.num_classes()
        )));
    }
    let w1 = weight_matrix(&g1, &p1, size1)?;
    let w2 = weight_matrix(&g2, &p2, size2)?;
    let d = p1.num_classes();
    let ratio = (size2 as f64 / size1 as f64).ln();
    let mut exps = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let (a, b) = (w1[(i, j)], w2[(i, j)]);
            exps[(i, j)] = if a == 0.0 && b == 0.0 {
                f64::NEG_INFINITY
            } else if a == 0.0 || b == 0.0 {
                return Err(Error::StructureMismatch(format!(
                    "entry ({i}, {j}) vanishes at one size only"
                )));
            } else if a == b {
                0.0
            } else {
                (b.abs() / a.abs()).ln() / ratio
            };
        }
    }
    Ok(exps)
}

/// Which entries belong to H1 under this spec, as a symmetric boolean matrix.
fn h1_mask(spec: &SplitSpec, d: usize) -> Result<Vec<Vec<bool>>> {
    let mut to_h1 = vec![vec![false; d]; d];
    match &spec.mode {
        SplitMode::ExponentThreshold { cutoff } => {
            let exps = spec.exponents.as_ref().ok_or_else(|| {
                Error::ContractViolation(
                    "exponent-threshold split needs an exponent map".into(),
                )
            })?;
            if exps.nrows() != d || exps.ncols() != d {
                return Err(Error::ContractViolation("exponent map dimension mismatch".into()));
            }
            for i in 0..d {
                for j in 0..d {
                    to_h1[i][j] = exps[(i, j)] <= *cutoff;
                }
            }
        }
        SplitMode::ExplicitMask { positions } => {
            for &(i, j) in positions {
                if i >= d || j >= d {
                    return Err(Error::ContractViolation(format!(
                        "mask position ({i}, {j}) out of range for order {d}"
                    )));
                }
                if i == 0 && j == 0 {
                    return Err(Error::ContractViolation(
                        "the (0, 0) oracle term always belongs to H0".into(),
                    ));
                }
                to_h1[i][j] = true;
                to_h1[j][i] = true;
            }
        }
    }
    to_h1[0][0] = false; // oracle term stays leading-order
    Ok(to_h1)
}

/// Assign every entry of the reduced Hamiltonian to H0 or H1. Entries are
/// moved, never modified, so h0 + h1 reproduces H bit for bit.
pub fn split(h: &ReducedHamiltonian, spec: &SplitSpec) -> Result<PerturbationSplit> {
    let d = h.order;
    let mask = h1_mask(spec, d)?;
    let mut h0 = DMatrix::zeros(d, d);
    let mut h1 = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if mask[i][j] {
                h1[(i, j)] = h.entries[(i, j)];
            } else {
                h0[(i, j)] = h.entries[(i, j)];
            }
        }
    }
    Ok(PerturbationSplit { h0, h1, gamma: h.gamma })
}

/// Result of the degeneracy root-finder.
#[derive(Debug, Clone, Copy)]
pub struct CriticalGamma {
    pub gamma_c: f64,
    /// More than one crossing was found in the bracket; the one nearest the
    /// lower end is reported.
    pub multiple_crossings: bool,
}

const BRACKET_SCAN_POINTS: usize = 64;

/// Find the jumping rate at which two eigenvalue curves of the leading-order
/// matrix become degenerate.
///
/// Curves are tracked by eigenvector continuity: each evaluation picks the
/// eigenpairs with maximal overlap against the previously matched vectors
/// (seeded from the selectors). The bracket is scanned at 64 log-spaced
/// points for sign changes of E_a - E_b, then bisected to relative 1e-12.
pub fn critical_gamma<F>(
    h0_builder: F,
    selector_a: &DVector<f64>,
    selector_b: &DVector<f64>,
    bracket: (f64, f64),
) -> Result<CriticalGamma>
where
    F: Fn(f64) -> DMatrix<f64>,
{
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
    }
    let mut track_a = selector_a.normalize();
    let mut track_b = selector_b.normalize();
    let mut eval = |gamma: f64| -> Result<f64> {
        let decomp = eigh(&h0_builder(gamma))?;
        let d = decomp.order();
        let overlap = |track: &DVector<f64>, col: usize| {
            (0..d).map(|j| track[j] * decomp.eigenvectors[(j, col)]).sum::<f64>()
        };
        let ia = (0..d)
            .max_by(|&x, &y| overlap(&track_a, x).abs().total_cmp(&overlap(&track_a, y).abs()))
            .unwrap();
        let ib = (0..d)
            .filter(|&x| x != ia)
            .max_by(|&x, &y| overlap(&track_b, x).abs().total_cmp(&overlap(&track_b, y).abs()))
            .unwrap();
        let update = |track: &mut DVector<f64>, col: usize| {
            let sign = if overlap(track, col) < 0.0 { -1.0 } else { 1.0 };
            for j in 0..d {
                track[j] = sign * decomp.eigenvectors[(j, col)];
            }
        };
        update(&mut track_a, ia);
        update(&mut track_b, ib);
        Ok(decomp.eigenvalues[ia] - decomp.eigenvalues[ib])
    };

    let log_lo = lo.ln();
    let step = (hi / lo).ln() / (BRACKET_SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> =
        (0..BRACKET_SCAN_POINTS).map(|i| (log_lo + step * i as f64).exp()).collect();
    let values: Vec<f64> = grid.iter().map(|&g| eval(g)).collect::<Result<_>>()?;

    let mut crossings: Vec<(f64, f64)> = Vec::new();
    for i in 0..BRACKET_SCAN_POINTS - 1 {
        if values[i] == 0.0 {
            crossings.push((grid[i], grid[i]));
        } else if values[i] * values[i + 1] < 0.0 {
            crossings.push((grid[i], grid[i + 1]));
        }
    }
    if values[BRACKET_SCAN_POINTS - 1] == 0.0 {
        crossings.push((hi, hi));
    }
    let multiple_crossings = crossings.len() > 1;
    let (mut a, mut b) = *crossings.first().ok_or(Error::NoCrossing { lo, hi })?;
    if a == b {
        return Ok(CriticalGamma { gamma_c: a, multiple_crossings });
    }

    let mut fa = eval(a)?;
    while b - a > 1e-12 * b {
        let mid = 0.5 * (a + b);
        let fm = eval(mid)?;
        if fm == 0.0 {
            return Ok(CriticalGamma { gamma_c: mid, multiple_crossings });
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(CriticalGamma { gamma_c: 0.5 * (a + b), multiple_crossings })
}

/// Weight matrix of the hypercube's unmarked block: the Hamming-weight chain
/// over k = 1..n with couplings sqrt((n - k)(k + 1)).
pub fn hypercube_chain_matrix(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for k in 1..n {
        let coupling = ((n - k) as f64 * (k + 1) as f64).sqrt();
        w[(k - 1, k)] = coupling;
        w[(k, k - 1)] = coupling;
    }
    w
}

/// One row of the hypercube critical-rate comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Table1Row {
    pub n: usize,
    /// Reciprocal of the unmarked-chain eigenvalue nearest n.
    pub one_over_actual_eig: f64,
    pub one_over_n: f64,
}

/// For each n, the exact critical rate 1/lambda (lambda the unmarked-chain
/// eigenvalue nearest n) next to the asymptotic estimate 1/n.
pub fn table1_column(n_list: &[usize]) -> Result<Vec<Table1Row>> {
    n_list
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("table rows need n >= 2, got {n}")));
            }
            let decomp = eigh(&hypercube_chain_matrix(n))?;
            let target = n as f64;
            let lambda = decomp
                .eigenvalues
                .iter()
                .copied()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
                .unwrap();
            Ok(Table1Row { n, one_over_actual_eig: 1.0 / lambda, one_over_n: 1.0 / target })
        })
        .collect()
}

/// Effective Hamiltonian on the degenerate eigenspace of H0.
#[derive(Debug, Clone)]
pub struct EffectiveSubspace {
    pub gamma_c: f64,
    /// The shared H0 eigenvalue of the cluster.
    pub degenerate_value: f64,
    /// Orthonormal cluster eigenvectors, one column per cluster member.
    pub basis: DMatrix<f64>,
    /// <v_i| H0 + H1 |v_j> on the cluster.
    pub effective_matrix: DMatrix<f64>,
    /// Eigenvectors of the effective matrix (the alpha coefficients), columns
    /// matched with `effective_eigenvalues`.
    pub coefficients: DMatrix<f64>,
    pub effective_eigenvalues: Vec<f64>,
    /// Indices of the two effective eigenpairs carrying the most |a> weight.
    pub transition_pair: (usize, usize),
    pub gap: f64,
    pub runtime: f64,
}

/// Build the degenerate-subspace effective matrix at the critical rate.
///
/// The cluster is every H0 eigenvalue within `degeneracy_tol` (relative to the
/// marked eigenvalue's magnitude) of the marked-vertex eigenvalue. The gap is
/// the difference of the two effective eigenvalues whose eigenvectors carry
/// the largest squared |a> components; runtime = pi / gap.
pub fn effective_subspace(
    h: &ReducedHamiltonian,
    split: &PerturbationSplit,
    degeneracy_tol: f64,
) -> Result<EffectiveSubspace> {
    let d = h.order;
    if split.h0.nrows() != d {
        return Err(Error::ContractViolation("split does not match this Hamiltonian".into()));
    }
    let decomp = eigh(&split.h0)?;
    // the marked-vertex eigenvalue: largest |a> component
    let marked = (0..d)
        .max_by(|&x, &y| {
            decomp.eigenvectors[(0, x)].abs().total_cmp(&decomp.eigenvectors[(0, y)].abs())
        })
        .unwrap();
    let degenerate_value = decomp.eigenvalues[marked];
    let scale = if degenerate_value.abs() > 0.0 { degenerate_value.abs() } else { 1.0 };
    let cluster: Vec<usize> = (0..d)
        .filter(|&i| (decomp.eigenvalues[i] - degenerate_value).abs() <= degeneracy_tol * scale)
        .collect();
    if cluster.len() < 2 {
        return Err(Error::NoDegeneracy { value: degenerate_value, tol: degeneracy_tol });
    }

    let k = cluster.len();
    let mut basis = DMatrix::zeros(d, k);
    for (col, &i) in cluster.iter().enumerate() {
        basis.set_column(col, &decomp.eigenvectors.column(i));
    }
    let raw = basis.transpose() * &h.entries * &basis;
    let mut effective_matrix = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            effective_matrix[(i, j)] = 0.5 * (raw[(i, j)] + raw[(j, i)]);
        }
    }
    let eff = eigh(&effective_matrix)?;

    // squared |a> component of each effective eigenvector, in reduced space
    let a_weight = |col: usize| -> f64 {
        (0..k).map(|i| eff.eigenvectors[(i, col)] * basis[(0, i)]).sum::<f64>().powi(2)
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| a_weight(y).total_cmp(&a_weight(x)));
    let pair = (order[0].min(order[1]), order[0].max(order[1]));
    let gap = (eff.eigenvalues[pair.0] - eff.eigenvalues[pair.1]).abs();

    Ok(EffectiveSubspace {
        gamma_c: h.gamma,
        degenerate_value,
        basis,
        effective_matrix,
        coefficients: eff.eigenvectors,
        effective_eigenvalues: eff.eigenvalues,
        transition_pair: pair,
        gap,
        runtime: PI / gap,
    })
}

/// End-to-end perturbative analysis with a simulated cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct RuntimeReport {
    pub family: String,
    pub size: usize,
    pub gamma_c: f64,
    pub degenerate_value: f64,
    pub cluster_dim: usize,
    pub gap: f64,
    pub runtime: f64,
    pub simulated_peak_time: f64,
    pub simulated_peak_probability: f64,
    /// |runtime - simulated peak time| / runtime.
    pub relative_difference: f64,
    pub warnings: Vec<String>,
}

/// Default split for each family: the exponent thresholds sort complete and
/// simplex weights by their size scaling; the hypercube uses the explicit
/// disconnect-the-marked-vertex mask since its reduced dimension grows.
pub fn default_split_spec(family: FamilyKind) -> Result<SplitSpec> {
    match family {
        FamilyKind::Complete => {
            Ok(SplitSpec::threshold(0.75, estimate_exponents(family, 64, 256)?))
        }
        FamilyKind::SimplexComplete => {
            Ok(SplitSpec::threshold(0.75, estimate_exponents(family, 16, 64)?))
        }
        FamilyKind::Hypercube => Ok(SplitSpec::mask(vec![(0, 1)])),
    }
}

/// Default degeneracy tolerance: at the bisected critical rate the targeted
/// pair agrees to ~1e-12 while accidental near-degeneracies sit much farther.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// Locate the critical rate on one graph under a split spec, tracking the
/// marked-vertex curve against the bulk curve closest to the superposition.
pub fn critical_gamma_for_graph(
    g: &GraphSpec,
    spec: &SplitSpec,
    bracket: (f64, f64),
) -> Result<CriticalGamma> {
    let p = equitable_partition(g);
    let d = p.num_classes();
    let mask = h1_mask(spec, d)?;

    let base = quotient_hamiltonian(g, &p, 1.0)?.entries;
    // H(gamma) = gamma * (base + |a><a|) - |a><a|: every non-oracle entry of
    // the reduced matrix is linear in gamma and the oracle term is constant.
    let h0_at = move |gamma: f64| -> DMatrix<f64> {
        let mut h = base.clone();
        h[(0, 0)] += 1.0;
        h *= gamma;
        h[(0, 0)] -= 1.0;
        for i in 0..d {
            for j in 0..d {
                if mask[i][j] {
                    h[(i, j)] = 0.0;
                }
            }
        }
        h
    };

    let mut selector_a = DVector::zeros(d);
    selector_a[0] = 1.0;
    let mut selector_b = superposition_state(&p);
    selector_b[0] = 0.0;
    let selector_b = selector_b.normalize();

    critical_gamma(h0_at, &selector_a, &selector_b, bracket)
}

/// Run the full pipeline on one family member: split, find the critical rate,
/// build the effective subspace, and compare pi / dE against the simulated
/// success-probability peak at that rate.
pub fn perturbative_runtime_report(
    family: FamilyKind,
    size: usize,
    spec: &SplitSpec,
    degeneracy_tol: f64,
    bracket: Option<(f64, f64)>,
) -> Result<RuntimeReport> {
    let g = family.build(size)?;
    let p = equitable_partition(&g);

    let scale = size as f64;
    let bracket = bracket.unwrap_or((0.1 / scale, 10.0 / scale));
    let cg = critical_gamma_for_graph(&g, spec, bracket)?;

    let h_c = quotient_hamiltonian(&g, &p, cg.gamma_c)?;
    let ps = split(&h_c, spec)?;
    let eff = effective_subspace(&h_c, &ps, degeneracy_tol)?;

    let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
    let curve = success_curve(&h_c.entries, &s, 0, 2.0 * eff.runtime, 1024)?;
    let relative_difference = (eff.runtime - curve.peak_time).abs() / eff.runtime;

    let mut warnings = Vec::new();
    if cg.multiple_crossings {
        warnings.push("multiple eigenvalue crossings in bracket; using the lowest".into());
    }

    Ok(RuntimeReport {
        family: family.name().to_string(),
        size,
        gamma_c: cg.gamma_c,
        degenerate_value: eff.degenerate_value,
        cluster_dim: eff.basis.ncols(),
        gap: eff.gap,
        runtime: eff.runtime,
        simulated_peak_time: curve.peak_time,
        simulated_peak_probability: curve.peak_probability,
        relative_difference,
        warnings,
    })
}
