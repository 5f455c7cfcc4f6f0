//! Symmetric eigendecomposition, Schrodinger time evolution, success curves,
//! and the gamma sweep behind the overlap plots.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::quotient::{equitable_partition, quotient_hamiltonian, superposition_state};

/// Full symmetric eigendecomposition, eigenvalues ascending, columns matched.
///
/// Sign convention: in each eigenvector the entry of largest magnitude is
/// positive (ties broken by lowest index), so output is deterministic.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// e^{-iHt} psi0 through the decomposition: V e^{-i Lambda t} V^T psi0.
    pub fn evolve(&self, psi0: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
        let d = self.order();
        if psi0.len() != d {
            return Err(Error::ContractViolation(format!(
                "state length {} does not match matrix order {d}",
                psi0.len()
            )));
        }
        let coeffs = self.project(psi0);
        let mut out = DVector::from_element(d, Complex64::new(0.0, 0.0));
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t) * coeffs[i];
            for j in 0..d {
                out[j] += self.eigenvectors[(j, i)] * phase;
            }
        }
        Ok(out)
    }

    /// V^T psi0.
    fn project(&self, psi0: &DVector<Complex64>) -> Vec<Complex64> {
        let d = self.order();
        (0..d)
            .map(|i| (0..d).map(|j| self.eigenvectors[(j, i)] * psi0[j]).sum())
            .collect()
    }

    /// Amplitude on one basis vertex at time t, given projected coefficients.
    fn component_at(&self, coeffs: &[Complex64], row: usize, t: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &lambda)| {
                Complex64::from_polar(1.0, -lambda * t)
                    * coeffs[i]
                    * self.eigenvectors[(row, i)]
            })
            .sum()
    }
}

/// Symmetric eigensolver. Rejects input with relative asymmetry above 1e-12.
pub fn eigh(h: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let d = h.nrows();
    if d == 0 || h.ncols() != d {
        return Err(Error::ContractViolation("eigh needs a square matrix of order >= 1".into()));
    }
    let scale = h.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    for i in 0..d {
        for j in i + 1..d {
            if (h[(i, j)] - h[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::ContractViolation(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let decomp = SymmetricEigen::new(h.clone());
    let mut v = decomp.eigenvectors;
    let raw = jacobi_polish(h, &mut v);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = DMatrix::zeros(d, d);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(raw[src]);
        let mut best = 0;
        for j in 1..d {
            if v[(j, src)].abs() > v[(best, src)].abs() {
                best = j;
            }
        }
        let sign = if v[(best, src)] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..d {
            eigenvectors[(j, col)] = sign * v[(j, src)];
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Refine an approximate eigenbasis by threshold cyclic Jacobi sweeps on
/// `a = v^T h v`, rotating `v` along. The tridiagonalization-based solver
/// leaves residuals a few orders above machine precision; with its output as
/// the starting point `a` is nearly diagonal and one or two cheap sweeps
/// reach the 1e-10 residual contract. Returns the refined eigenvalues.
fn jacobi_polish(h: &DMatrix<f64>, v: &mut DMatrix<f64>) -> Vec<f64> {
    let d = h.nrows();
    let mut a = v.transpose() * h * &*v;
    let scale = h.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let threshold = 10.0 * f64::EPSILON * scale;

    for _sweep in 0..30 {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[(p, q)];
                if apq.abs() <= threshold {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..d).map(|i| a[(i, i)]).collect()
}

/// e^{-iHt} psi0. Decomposes H; for repeated times decompose once and use
/// [`SpectralDecomposition::evolve`].
pub fn evolve_state(
    h: &DMatrix<f64>,
    psi0: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    eigh(h)?.evolve(psi0, t)
}

/// Success probability |<marked|psi(t)>|^2 sampled on a uniform grid, with the
/// first local maximum refined by golden-section search.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub success_probability: Vec<f64>,
    pub peak_time: f64,
    pub peak_probability: f64,
}

pub fn success_curve(
    h: &DMatrix<f64>,
    psi0: &DVector<Complex64>,
    marked_index: usize,
    t_max: f64,
    num_points: usize,
) -> Result<EvolutionResult> {
    if num_points < 2 {
        return Err(Error::InvalidParameter("num_points must be at least 2".into()));
    }
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::InvalidParameter("t_max must be positive".into()));
    }
    if marked_index >= h.nrows() {
        return Err(Error::ContractViolation("marked index out of range".into()));
    }
    let decomp = eigh(h)?;
    if psi0.len() != decomp.order() {
        return Err(Error::ContractViolation("state length mismatch".into()));
    }
    let coeffs = decomp.project(psi0);
    let prob_at = |t: f64| decomp.component_at(&coeffs, marked_index, t).norm_sqr();

    let times: Vec<f64> =
        (0..num_points).map(|i| t_max * i as f64 / (num_points - 1) as f64).collect();
    let probs: Vec<f64> = times.iter().map(|&t| prob_at(t)).collect();

    // first interior local maximum; fall back to the grid maximum
    let mut peak_idx = None;
    for i in 1..num_points - 1 {
        if probs[i] >= probs[i - 1] && probs[i] >= probs[i + 1] {
            peak_idx = Some(i);
            break;
        }
    }
    let peak_idx = peak_idx.unwrap_or_else(|| {
        (0..num_points).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap()
    });

    let lo = if peak_idx > 0 { times[peak_idx - 1] } else { times[0] };
    let hi = if peak_idx + 1 < num_points { times[peak_idx + 1] } else { times[num_points - 1] };
    let (peak_time, peak_probability) = golden_max(&prob_at, lo, hi, 1e-6);

    Ok(EvolutionResult { times, success_probability: probs, peak_time, peak_probability })
}

/// Golden-section maximization of f over [a, b] to relative x tolerance.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > rel_tol * b.abs().max(1e-300) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// One gamma sample of the overlap sweep: eigenvalues of the reduced H and
/// squared overlaps of the k lowest eigenstates with |s> and |a>.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub gamma: f64,
    pub eigenvalues: Vec<f64>,
    pub overlap_s: Vec<f64>,
    pub overlap_a: Vec<f64>,
}

/// Sweep the jumping rate over a grid on one graph, in the reduced space.
pub fn overlap_sweep(g: &GraphSpec, gammas: &[f64], k: usize) -> Result<Vec<SweepRow>> {
    let p = equitable_partition(g);
    if k == 0 || k > p.num_classes() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} out of range for reduced dimension {}",
            p.num_classes()
        )));
    }
    let s = superposition_state(&p);
    let mut rows = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let h = quotient_hamiltonian(g, &p, gamma)?;
        let decomp = eigh(&h.entries)?;
        let mut eigenvalues = Vec::with_capacity(k);
        let mut overlap_s = Vec::with_capacity(k);
        let mut overlap_a = Vec::with_capacity(k);
        for i in 0..k {
            eigenvalues.push(decomp.eigenvalues[i]);
            let col = decomp.eigenvectors.column(i);
            overlap_s.push(col.dot(&s).powi(2));
            overlap_a.push(col[0].powi(2));
        }
        rows.push(SweepRow { gamma, eigenvalues, overlap_s, overlap_a });
    }
    Ok(rows)
}

/// CSV columns: gamma, then eig_i, overlap_s_i, overlap_a_i for each state.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let k = rows.first().map_or(0, |r| r.eigenvalues.len());
    let mut out = String::from("gamma");
    for i in 0..k {
        out.push_str(&format!(",eig_{i},overlap_s_{i},overlap_a_{i}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{}", row.gamma));
        for i in 0..k {
            out.push_str(&format!(
                ",{},{},{}",
                row.eigenvalues[i], row.overlap_s[i], row.overlap_a[i]
            ));
        }
        out.push('\n');
    }
    out
}

/// CSV columns: t, probability.
pub fn curve_to_csv(result: &EvolutionResult) -> String {
    let mut out = String::from("t,probability\n");
    for (t, p) in result.times.iter().zip(&result.success_probability) {
        out.push_str(&format!("{t},{p}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn reduced_complete(n: usize, gamma: f64) -> crate::quotient::ReducedHamiltonian {
        let g = complete_graph(n).unwrap();
        let p = equitable_partition(&g);
        quotient_hamiltonian(&g, &p, gamma).unwrap()
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let h = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let d = eigh(&h).unwrap();
        assert_eq!(d.eigenvalues, vec![-2.0, -1.0]);
    }

    #[test]
    fn eq2_gap_closed_form() {
        // gap^2 = (H00 - H11)^2 + 4 H01^2 = 4/N at gamma = 1/N
        for n in [4usize, 16, 64, 1024] {
            let h = reduced_complete(n, 1.0 / n as f64);
            let d = eigh(&h.entries).unwrap();
            let gap = d.eigenvalues[1] - d.eigenvalues[0];
            assert_abs_diff_eq!(gap, 2.0 / (n as f64).sqrt(), epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0 + 1e-6, 0.0]);
        assert!(matches!(eigh(&h), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn evolve_identity_at_t0_and_unit_norm() {
        let h = reduced_complete(16, 0.1).entries;
        let psi0 = DVector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ]);
        let at0 = evolve_state(&h, &psi0, 0.0).unwrap();
        assert_abs_diff_eq!((at0 - &psi0).norm(), 0.0, epsilon = 1e-12);
        for t in [0.3, 2.0, 17.5] {
            let psi = evolve_state(&h, &psi0, t).unwrap();
            assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn complete_graph_reaches_marked_at_pi_sqrt_n_over_2() {
        let n = 1024usize;
        let h = reduced_complete(n, 1.0 / n as f64);
        let p = equitable_partition(&complete_graph(n).unwrap());
        let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
        let t = PI * (n as f64).sqrt() / 2.0;
        let psi = evolve_state(&h.entries, &s, t).unwrap();
        assert!(psi[0].norm_sqr() >= 0.99, "got {}", psi[0].norm_sqr());
    }

    #[test]
    fn success_curve_peak_and_start() {
        let n = 1024usize;
        let h = reduced_complete(n, 1.0 / n as f64);
        let p = equitable_partition(&complete_graph(n).unwrap());
        let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
        let curve = success_curve(&h.entries, &s, 0, 100.0, 1024).unwrap();
        assert_abs_diff_eq!(curve.success_probability[0], 1.0 / n as f64, epsilon = 1e-12);
        assert!(curve.peak_probability >= 0.99);
        let expected = PI * (n as f64).sqrt() / 2.0;
        assert!((curve.peak_time - expected).abs() <= 0.02 * expected);
        assert!(curve
            .success_probability
            .iter()
            .all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)));
    }

    #[test]
    fn off_critical_gamma_stays_near_start() {
        let n = 1024usize;
        let h = reduced_complete(n, 3.0 / n as f64);
        let p = equitable_partition(&complete_graph(n).unwrap());
        let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
        let curve = success_curve(&h.entries, &s, 0, 200.0, 2048).unwrap();
        assert!(curve.peak_probability < 0.3, "got {}", curve.peak_probability);
    }

    #[test]
    fn sweep_overlap_limits() {
        let g = complete_graph(1024).unwrap();
        let n = 1024.0;
        let rows = overlap_sweep(&g, &[1.0 / (3.0 * n), 1.0 / n, 3.0 / n], 2).unwrap();
        // far below critical: ground state is the marked vertex
        assert!(rows[0].overlap_a[0] >= 0.9);
        // at critical: both lowest states split evenly between |s> and |a>
        for i in 0..2 {
            assert!((rows[1].overlap_s[i] - 0.5).abs() <= 0.05);
            assert!((rows[1].overlap_a[i] - 0.5).abs() <= 0.05);
        }
        // far above critical: ground state is the superposition
        assert!(rows[2].overlap_s[0] >= 0.9);
    }

    #[test]
    fn hypercube_reduced_low_eigenvalues_near_minus_one() {
        let n = 10usize;
        let gamma = table_gamma(n);
        let g = crate::graph::hypercube_graph(n as u32).unwrap();
        let p = equitable_partition(&g);
        let hr = quotient_hamiltonian(&g, &p, gamma).unwrap();
        let d = eigh(&hr.entries).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 0.15, "{}", d.eigenvalues[0]);
        assert!((d.eigenvalues[1] + 1.0).abs() < 0.15, "{}", d.eigenvalues[1]);
    }

    fn table_gamma(n: usize) -> f64 {
        crate::perturbation::table1_column(&[n]).unwrap()[0].one_over_actual_eig
    }

    #[test]
    fn sweep_csv_round_trips() {
        let g = complete_graph(8).unwrap();
        let rows = overlap_sweep(&g, &[0.125, 0.25], 2).unwrap();
        let csv = sweep_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "gamma,eig_0,overlap_s_0,overlap_a_0,eig_1,overlap_s_1,overlap_a_1"
        );
        let first: Vec<f64> =
            lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], 0.125);
        assert_eq!(first[1], rows[0].eigenvalues[0]);
    }
}
