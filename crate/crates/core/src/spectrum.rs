//! Dense symmetric eigendecomposition of graph Laplacians.
//!
//! The whole pipeline consumes the full eigenbasis (scores are rotated into
//! it once, after which every statistic evaluation is a weighted sum over
//! eigenvalues), so a dense decomposition is the right tool; target sizes
//! are n up to roughly 2000.
//!
//! Eigenvalues are reported in descending order with values below
//! `tol_zero = n * eps * lambda_max` clipped to exactly 0. The zero
//! multiplicity is cross-checked against the graph's connected-component
//! count; a mismatch is a hard error because the `lambda = infinity` limit
//! of the test statistic depends on the exact count. A collapsed
//! distinct-eigenvalue view (value, multiplicity) supports O(#distinct)
//! statistic evaluation; neighboring eigenvalues are merged into one group
//! when their gap is below `tol_zero`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind};

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Descending, all >= 0, near-zero values clipped to exactly 0.
    eigenvalues: Vec<f64>,
    /// Column k is the unit eigenvector paired with `eigenvalues[k]`.
    eigenvectors: DMatrix<f64>,
    /// Collapsed view: (representative value, multiplicity), descending.
    distinct: Vec<(f64, usize)>,
    zero_multiplicity: usize,
    tol_zero: f64,
}

impl Spectrum {
    /// Decompose the Laplacian of `g`, cross-checking the zero multiplicity
    /// against the component count.
    pub fn of_graph(g: &Graph) -> Result<Spectrum> {
        let (components, _) = g.components();
        Spectrum::from_laplacian(g.laplacian(), components)
    }

    /// Decompose a Laplacian whose graph has the given component count.
    pub fn from_laplacian(l: DMatrix<f64>, components: usize) -> Result<Spectrum> {
        let n = l.nrows();
        if n == 0 || l.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Laplacian must be square and nonempty, got {}x{}",
                l.nrows(),
                l.ncols()
            )));
        }
        let eig = SymmetricEigen::try_new(l, f64::EPSILON, 10_000 * n)
            .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;

        let mut order: Vec<usize> = (0..n).collect();
        // Descending by eigenvalue, index as tiebreak for a stable layout.
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap()
                .then(a.cmp(&b))
        });

        let lambda_max = eig.eigenvalues[order[0]].max(0.0);
        let tol_zero = n as f64 * f64::EPSILON * lambda_max;

        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
        for (k, &idx) in order.iter().enumerate() {
            let raw = eig.eigenvalues[idx];
            if raw < -tol_zero.max(n as f64 * f64::EPSILON) {
                return Err(Error::Numerical(format!(
                    "matrix is not positive semidefinite: eigenvalue {raw}"
                )));
            }
            eigenvalues.push(if raw < tol_zero { 0.0 } else { raw });
            eigenvectors.set_column(k, &eig.eigenvectors.column(idx));
        }

        let zero_multiplicity = eigenvalues.iter().filter(|&&v| v == 0.0).count();
        if zero_multiplicity != components {
            return Err(Error::Numerical(format!(
                "zero eigenvalue multiplicity {zero_multiplicity} disagrees with \
                 component count {components}"
            )));
        }

        let distinct = collapse(&eigenvalues, tol_zero);
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
            distinct,
            zero_multiplicity,
            tol_zero,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn distinct(&self) -> &[(f64, usize)] {
        &self.distinct
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.zero_multiplicity
    }

    pub fn tol_zero(&self) -> f64 {
        self.tol_zero
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest nonzero eigenvalue, if the graph has any edge.
    pub fn lambda_min_nonzero(&self) -> Option<f64> {
        self.eigenvalues
            .iter()
            .rev()
            .find(|&&v| v > 0.0)
            .copied()
    }

    /// trace(L) = sum of eigenvalues.
    pub fn trace_l(&self) -> f64 {
        self.distinct.iter().map(|&(v, m)| v * m as f64).sum()
    }

    /// trace(L^2) = sum of squared eigenvalues.
    pub fn trace_l2(&self) -> f64 {
        self.distinct.iter().map(|&(v, m)| v * v * m as f64).sum()
    }
}

/// Group a descending eigenvalue list into (value, multiplicity) runs,
/// merging neighbors closer than `tol`. The representative is the group
/// mean, which stays within `tol` of every member. Useful directly when a
/// closed-form spectrum is available and the eigenvectors are not needed.
pub fn collapse(descending: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    while start < descending.len() {
        let mut end = start + 1;
        // Gap <= tol merges, so exactly equal values group even at tol 0.
        while end < descending.len() && descending[end - 1] - descending[end] <= tol.max(0.0) {
            // Exact zeros never merge upward into a positive group.
            if descending[end] == 0.0 && descending[end - 1] != 0.0 {
                break;
            }
            end += 1;
        }
        let m = end - start;
        let mean = descending[start..end].iter().sum::<f64>() / m as f64;
        let rep = if descending[start] == 0.0 { 0.0 } else { mean };
        out.push((rep, m));
        start = end;
    }
    out
}

/// Exact Laplacian spectra of the deterministic families, descending.
///
/// - star `S_n`: one eigenvalue `n`, then `1` with multiplicity `n - 2`,
///   then `0`;
/// - cycle `C_n`: `4 sin^2(pi k / n)` for `k = 1..n`;
/// - lattice `(m, d)`: sums over axes of the path-graph eigenvalues
///   `4 sin^2(pi j / (2m))`, `j = 0..m-1`;
/// - complete `K_n`: `n` with multiplicity `n - 1`, then `0`;
/// - empty: all zeros.
pub fn closed_form_eigenvalues(kind: GraphKind) -> Result<Vec<f64>> {
    let mut vals = match kind {
        GraphKind::Star { n } => {
            if n < 2 {
                return Err(Error::InvalidParameter("star needs n >= 2".into()));
            }
            let mut v = vec![n as f64];
            v.extend(std::iter::repeat(1.0).take(n - 2));
            v.push(0.0);
            v
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
            }
            (1..=n)
                .map(|k| {
                    let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
                    4.0 * s * s
                })
                .collect()
        }
        GraphKind::Lattice { m, d } => {
            if m < 2 || d < 1 {
                return Err(Error::InvalidParameter("lattice needs m >= 2, d >= 1".into()));
            }
            let axis: Vec<f64> = (0..m)
                .map(|j| {
                    let s = (std::f64::consts::PI * j as f64 / (2.0 * m as f64)).sin();
                    4.0 * s * s
                })
                .collect();
            let mut sums = vec![0.0];
            for _ in 0..d {
                let mut next = Vec::with_capacity(sums.len() * m);
                for &s in &sums {
                    for &a in &axis {
                        next.push(s + a);
                    }
                }
                sums = next;
            }
            sums
        }
        GraphKind::Complete { n } => {
            if n < 2 {
                return Err(Error::InvalidParameter("complete graph needs n >= 2".into()));
            }
            let mut v = vec![n as f64; n - 1];
            v.push(0.0);
            v
        }
        GraphKind::Empty { n } => vec![0.0; n],
        GraphKind::ErdosRenyi { .. } => {
            return Err(Error::InvalidParameter(
                "Erdos-Renyi graphs have no closed-form spectrum".into(),
            ))
        }
    };
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(vals)
}
