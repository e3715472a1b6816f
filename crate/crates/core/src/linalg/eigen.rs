//! Eigenvalue clustering, Riesz projections, and the semisimple part.
//!
//! Projections are produced by two independent routes: invariant-subspace
//! block-diagonalization of the Schur form (the production path) and
//! trapezoid-rule contour quadrature of the resolvent (the verification
//! path). For well-separated clusters the two agree to high accuracy.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::schur::{schur, SchurForm};
use crate::linalg::solve::solve;
use crate::matrix::ComplexMatrix;

/// Default number of quadrature nodes on each contour circle.
pub const DEFAULT_QUADRATURE_NODES: usize = 64;

/// Default clustering tolerance for an operator.
pub fn default_cluster_tol(t: &ComplexMatrix) -> f64 {
    1e-7 * (1.0 + t.op_norm_est())
}

/// Clustering tolerance that also absorbs the eigenvalue scatter of
/// defective structure: a nilpotent block of index k perturbed at machine
/// precision scatters its eigenvalues by about eps^{1/k}, which dwarfs the
/// default tolerance from index 3 on. Used where merged defective clusters
/// are the intent (the semisimple-part oracle), at the cost of being unable
/// to distinguish genuine eigenvalues closer than the scatter radius.
pub fn defective_aware_cluster_tol(t: &ComplexMatrix) -> f64 {
    let dim = t.rows().max(1) as f64;
    let scatter = 4.0 * f64::EPSILON.powf(1.0 / dim);
    (1.0 + t.op_norm_est()) * scatter.max(1e-7)
}

/// Reject cluster layouts where two representatives sit closer than three
/// clustering tolerances without having merged: the clustering decision is
/// ambiguous there.
pub fn check_cluster_separation(clusters: &[PointCluster], cluster_tol: f64) -> Result<()> {
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let d = (clusters[i].representative - clusters[j].representative).norm();
            if d < 3.0 * cluster_tol {
                return Err(Error::ClusterSeparationFailure {
                    distance: d,
                    limit: 3.0 * cluster_tol,
                });
            }
        }
    }
    Ok(())
}

/// Spectral structure of a square matrix: eigenvalue clusters with their
/// Riesz projections and invariant-subspace bases.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Cluster representatives, sorted lexicographically by (re, im).
    pub eigenvalues: Vec<C64>,
    /// Cluster sizes; they sum to the dimension.
    pub multiplicities: Vec<usize>,
    /// Riesz projections, one per cluster; they sum to the identity.
    pub projections: Vec<ComplexMatrix>,
    /// Orthonormal bases of the cluster invariant subspaces (n x multiplicity).
    pub subspace_bases: Vec<ComplexMatrix>,
    /// Raw eigenvalues belonging to each cluster.
    pub cluster_members: Vec<Vec<C64>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn cluster_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Distance from `point` to the nearest member of cluster `i`.
    pub fn distance_to_cluster(&self, i: usize, point: C64) -> f64 {
        self.cluster_members[i]
            .iter()
            .map(|l| (l - point).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A single-linkage cluster of complex points.
#[derive(Debug, Clone)]
pub struct PointCluster {
    /// Arithmetic mean of the members.
    pub representative: C64,
    /// Indices into the input slice.
    pub member_indices: Vec<usize>,
    /// The member values themselves.
    pub members: Vec<C64>,
}

/// Single-linkage clustering at threshold `tol`, sorted lexicographically
/// by representative (real part, then imaginary part).
pub fn cluster_points(values: &[C64], tol: f64) -> Vec<PointCluster> {
    let groups = single_linkage(values, tol);
    let mut clusters: Vec<PointCluster> = groups
        .into_iter()
        .map(|g| PointCluster {
            representative: cluster_mean(values, &g),
            members: g.iter().map(|&i| values[i]).collect(),
            member_indices: g,
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.representative
            .re
            .partial_cmp(&b.representative.re)
            .unwrap()
            .then(a.representative.im.partial_cmp(&b.representative.im).unwrap())
    });
    clusters
}

/// Single-linkage clustering of eigenvalues at threshold `tol`.
/// Returns cluster member-index sets, each sorted.
fn single_linkage(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of_group.iter().position(|&g| g == r) {
            Some(gi) => groups[gi].push(i),
            None => {
                root_of_group.push(r);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn cluster_mean(values: &[C64], members: &[usize]) -> C64 {
    let sum: C64 = members.iter().map(|&i| values[i]).sum();
    sum / members.len() as f64
}

/// Swap adjacent diagonal entries k, k+1 of the upper-triangular Schur
/// factor by a unitary similarity, updating q accordingly.
fn swap_adjacent(t: &mut ComplexMatrix, q: &mut ComplexMatrix, k: usize) {
    let n = t.rows();
    let l1 = t[(k, k)];
    let l2 = t[(k + 1, k + 1)];
    let t12 = t[(k, k + 1)];
    // Eigenvector of [[l1, t12], [0, l2]] for l2.
    let v0 = t12;
    let v1 = l2 - l1;
    let r = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if r == 0.0 {
        return; // equal entries, nothing to move
    }
    let ca = v0.conj() / r;
    let cb = v1.conj() / r;
    let a = v0 / r;
    let b = v1 / r;
    // Left-multiply rows k, k+1 by G, right-multiply columns k, k+1 by G^*.
    for j in 0..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = ca * x + cb * y;
        t[(k + 1, j)] = -b * x + a * y;
    }
    for i in 0..n {
        let x = t[(i, k)];
        let y = t[(i, k + 1)];
        t[(i, k)] = a * x + b * y;
        t[(i, k + 1)] = -cb * x + ca * y;
        let qx = q[(i, k)];
        let qy = q[(i, k + 1)];
        q[(i, k)] = a * qx + b * qy;
        q[(i, k + 1)] = -cb * qx + ca * qy;
    }
    t[(k + 1, k)] = C64::new(0.0, 0.0);
}

/// Solve the upper-triangular Sylvester equation `A Z - Z B = C`
/// where A is m x m, B is p x p, both upper triangular.
fn triangular_sylvester(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let m = a.rows();
    let p = b.rows();
    let mut z = ComplexMatrix::zeros(m, p);
    for j in 0..p {
        // rhs_j = c_j + sum_{k<j} z_k B[k, j]
        let mut rhs = vec![C64::new(0.0, 0.0); m];
        for i in 0..m {
            rhs[i] = c[(i, j)];
        }
        for k in 0..j {
            let bkj = b[(k, j)];
            if bkj != C64::new(0.0, 0.0) {
                for i in 0..m {
                    rhs[i] += z[(i, k)] * bkj;
                }
            }
        }
        // Back-substitute (A - B[j,j] I) z_j = rhs.
        let shift = b[(j, j)];
        for i in (0..m).rev() {
            let mut acc = rhs[i];
            for k in i + 1..m {
                acc -= a[(i, k)] * z[(k, j)];
            }
            let denom = a[(i, i)] - shift;
            if denom.norm() == 0.0 {
                return Err(Error::ClusterSeparationFailure {
                    distance: 0.0,
                    limit: 0.0,
                });
            }
            z[(i, j)] = acc / denom;
        }
    }
    Ok(z)
}

/// Move the selected Schur positions to the leading block and return the
/// projection and subspace basis for that block.
fn projection_for_cluster(
    base: &SchurForm,
    selected: &[bool],
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = base.t.rows();
    let m = selected.iter().filter(|&&s| s).count();
    let mut t = base.t.clone();
    let mut q = base.q.clone();
    let mut select = selected.to_vec();

    let mut target = 0usize;
    for j in 0..n {
        if select[j] {
            let mut pos = j;
            while pos > target {
                swap_adjacent(&mut t, &mut q, pos - 1);
                select.swap(pos - 1, pos);
                pos -= 1;
            }
            target += 1;
        }
    }

    // Basis: leading m columns of the reordered Q.
    let mut basis = ComplexMatrix::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            basis[(i, j)] = q[(i, j)];
        }
    }

    if m == n {
        return Ok((ComplexMatrix::identity(n), basis));
    }

    // Block-diagonalize: P = Q [[I, Z], [0, 0]] Q^* with U11 Z - Z U22 = U12.
    let mut u11 = ComplexMatrix::zeros(m, m);
    let mut u22 = ComplexMatrix::zeros(n - m, n - m);
    let mut u12 = ComplexMatrix::zeros(m, n - m);
    for i in 0..m {
        for j in 0..m {
            u11[(i, j)] = t[(i, j)];
        }
        for j in m..n {
            u12[(i, j - m)] = t[(i, j)];
        }
    }
    for i in m..n {
        for j in m..n {
            u22[(i - m, j - m)] = t[(i, j)];
        }
    }
    let z = triangular_sylvester(&u11, &u22, &u12)?;

    let mut inner = ComplexMatrix::zeros(n, n);
    for i in 0..m {
        inner[(i, i)] = C64::new(1.0, 0.0);
        for j in 0..n - m {
            inner[(i, m + j)] = z[(i, j)];
        }
    }
    let p = q.mul(&inner).mul(&q.adjoint());
    Ok((p, basis))
}

/// Eigenvalue clusters with Riesz projections, computed through the Schur
/// form. Values within `cluster_tol` of each other (transitively) merge;
/// representatives closer than `3 * cluster_tol` that did not merge raise
/// `ClusterSeparationFailure`.
pub fn eigendecompose(t: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralDecomposition> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecompose requires a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    if cluster_tol <= 0.0 {
        return Err(Error::Validation(format!(
            "cluster tolerance must be positive, got {cluster_tol}"
        )));
    }
    let form = schur(t)?;
    let raw = form.eigenvalues();
    let clusters = cluster_points(&raw, cluster_tol);
    check_cluster_separation(&clusters, cluster_tol)?;

    let n = t.rows();
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    let mut subspace_bases = Vec::with_capacity(clusters.len());
    let mut cluster_members = Vec::with_capacity(clusters.len());

    for cluster in &clusters {
        let mut selected = vec![false; n];
        for &m in &cluster.member_indices {
            selected[m] = true;
        }
        let (p, basis) = projection_for_cluster(&form, &selected)?;
        eigenvalues.push(cluster.representative);
        multiplicities.push(cluster.member_indices.len());
        projections.push(p);
        subspace_bases.push(basis);
        cluster_members.push(cluster.members.clone());
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        multiplicities,
        projections,
        subspace_bases,
        cluster_members,
    })
}

/// Eigendecompose with the default clustering tolerance.
pub fn eigendecompose_default(t: &ComplexMatrix) -> Result<SpectralDecomposition> {
    eigendecompose(t, default_cluster_tol(t))
}

/// Contour radius for cluster `i`: half the minimum distance to the other
/// clusters; for a lone cluster, one plus its spread.
pub fn quadrature_radius(decomp: &SpectralDecomposition, i: usize) -> f64 {
    let mut min_dist = f64::INFINITY;
    for j in 0..decomp.cluster_count() {
        if j == i {
            continue;
        }
        for a in &decomp.cluster_members[i] {
            for b in &decomp.cluster_members[j] {
                min_dist = min_dist.min((a - b).norm());
            }
        }
    }
    if min_dist.is_finite() {
        min_dist / 2.0
    } else {
        let rep = decomp.eigenvalues[i];
        1.0 + decomp.cluster_members[i]
            .iter()
            .map(|l| (l - rep).norm())
            .fold(0.0, f64::max)
    }
}

/// Riesz projection by trapezoid-rule quadrature of the resolvent on the
/// circle `center + radius e^{i theta}`. The independent verification route
/// for `eigendecompose`'s projections.
pub fn riesz_projection_quadrature(
    t: &ComplexMatrix,
    center: C64,
    radius: f64,
    nodes: usize,
) -> Result<ComplexMatrix> {
    let n = t.rows();
    let identity = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
        let w = C64::new(0.0, theta).exp() * radius; // rho e^{i theta}
        let lambda = center + w;
        let mut shifted = t.scale(C64::new(-1.0, 0.0));
        for i in 0..n {
            shifted[(i, i)] += lambda;
        }
        let resolvent = solve(&shifted, &identity)?;
        acc = acc.add(&resolvent.scale(w / nodes as f64));
    }
    Ok(acc)
}

/// Diagonalizable component of the Jordan-Chevalley decomposition:
/// `D = sum_i lambda_i P_i`. `T - D` is nilpotent and commutes with `T`.
pub fn semisimple_part(t: &ComplexMatrix, cluster_tol: f64) -> Result<ComplexMatrix> {
    let decomp = eigendecompose(t, cluster_tol)?;
    let n = t.rows();
    let mut d = ComplexMatrix::zeros(n, n);
    for (lambda, p) in decomp.eigenvalues.iter().zip(&decomp.projections) {
        d = d.add(&p.scale(*lambda));
    }
    Ok(d)
}

/// Semisimple part with the default clustering tolerance.
pub fn semisimple_part_default(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    semisimple_part(t, default_cluster_tol(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_projection_invariants(t: &ComplexMatrix, d: &SpectralDecomposition, tol: f64) {
        let n = t.rows();
        assert_eq!(d.dim(), n);
        let mut sum = ComplexMatrix::zeros(n, n);
        for p in &d.projections {
            sum = sum.add(p);
        }
        assert!(
            sum.sub(&ComplexMatrix::identity(n)).max_abs() < tol,
            "projections do not sum to identity"
        );
        for (i, p) in d.projections.iter().enumerate() {
            assert!(p.mul(p).sub(p).max_abs() < tol, "P_{i} not idempotent");
            let comm = t.mul(p).sub(&p.mul(t)).max_abs();
            assert!(
                comm < tol * (1.0 + t.op_norm_est()),
                "P_{i} does not commute with T"
            );
            for (j, pj) in d.projections.iter().enumerate() {
                if i != j {
                    assert!(p.mul(pj).max_abs() < tol, "P_{i} P_{j} not zero");
                }
            }
        }
    }

    #[test]
    fn diagonal_two_clusters() {
        let t = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let d = eigendecompose_default(&t).unwrap();
        assert_eq!(d.cluster_count(), 2);
        assert_eq!(d.multiplicities, vec![1, 1]);
        assert!((d.eigenvalues[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((d.eigenvalues[1] - C64::new(2.0, 0.0)).norm() < 1e-12);
        let p1 = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let p2 = ComplexMatrix::from_real(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert!(d.projections[0].sub(&p1).max_abs() < 1e-12);
        assert!(d.projections[1].sub(&p2).max_abs() < 1e-12);
        check_projection_invariants(&t, &d, 1e-10);
    }

    #[test]
    fn jordan_block_single_cluster() {
        let t = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let d = eigendecompose_default(&t).unwrap();
        assert_eq!(d.cluster_count(), 1);
        assert_eq!(d.multiplicities, vec![2]);
        assert!((d.eigenvalues[0] - C64::new(1.0, 0.0)).norm() < 1e-7);
        assert!(d.projections[0]
            .sub(&ComplexMatrix::identity(2))
            .max_abs()
            < 1e-10);
    }

    #[test]
    fn nilpotent_single_cluster_at_zero() {
        let t = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let d = eigendecompose_default(&t).unwrap();
        assert_eq!(d.cluster_count(), 1);
        assert!(d.eigenvalues[0].norm() < 1e-10);
        assert!(d.projections[0]
            .sub(&ComplexMatrix::identity(2))
            .max_abs()
            < 1e-12);
    }

    #[test]
    fn mixed_structure_projections() {
        // Block diag: Jordan(2) at 1, scalar 3.
        let t = ComplexMatrix::from_real(&[
            &[1.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 3.0],
        ])
        .unwrap();
        let d = eigendecompose_default(&t).unwrap();
        assert_eq!(d.multiplicities, vec![2, 1]);
        check_projection_invariants(&t, &d, 1e-9);
        // Rank via trace: trace(P) = multiplicity.
        let tr0: C64 = (0..3).map(|i| d.projections[0][(i, i)]).sum();
        assert!((tr0 - C64::new(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn quadrature_route_agrees_with_schur_route() {
        let cases = vec![
            ComplexMatrix::from_real(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.5], &[0.0, 0.0, 3.0]])
                .unwrap(),
            ComplexMatrix::from_real(&[&[1.0, 2.0], &[0.5, -1.0]]).unwrap(),
            ComplexMatrix::from_rows(&[
                vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0)],
                vec![C64::new(0.0, 0.0), C64::new(2.0, -1.0)],
            ])
            .unwrap(),
        ];
        for t in cases {
            let d = eigendecompose_default(&t).unwrap();
            for i in 0..d.cluster_count() {
                let radius = quadrature_radius(&d, i);
                let pq = riesz_projection_quadrature(
                    &t,
                    d.eigenvalues[i],
                    radius,
                    DEFAULT_QUADRATURE_NODES,
                )
                .unwrap();
                let diff = pq.sub(&d.projections[i]).max_abs();
                assert!(diff < 1e-8, "cluster {i}: quadrature mismatch {diff:.3e}");
            }
        }
    }

    #[test]
    fn cluster_separation_failure_detected() {
        // Two eigenvalues 5e-7 apart with cluster_tol 2e-7: not merged,
        // but closer than the 6e-7 separation limit.
        let t = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 1.0 + 5e-7]]).unwrap();
        match eigendecompose(&t, 2e-7) {
            Err(Error::ClusterSeparationFailure { .. }) => {}
            other => panic!("expected ClusterSeparationFailure, got {other:?}"),
        }
    }

    #[test]
    fn semisimple_part_examples() {
        // Jordan block: D = I.
        let t = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let d = semisimple_part_default(&t).unwrap();
        assert!(d.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-10);

        // Already semisimple: D = T.
        let t = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let d = semisimple_part_default(&t).unwrap();
        assert!(d.sub(&t).max_abs() < 1e-10);

        // Nilpotent: D = 0.
        let t = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let d = semisimple_part_default(&t).unwrap();
        assert!(d.max_abs() < 1e-10);
    }

    #[test]
    fn semisimple_part_preserves_eigenvalues_with_multiplicity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let lex = |mut v: Vec<C64>| {
            v.sort_by(|a, b| {
                a.re.partial_cmp(&b.re)
                    .unwrap()
                    .then(a.im.partial_cmp(&b.im).unwrap())
            });
            v
        };
        for dim in 2..=6 {
            let entries: Vec<_> = (0..dim * dim)
                .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let t = ComplexMatrix::new(dim, dim, entries).unwrap();
            let d = match semisimple_part_default(&t) {
                Ok(d) => d,
                Err(Error::ClusterSeparationFailure { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            // Lexicographic pairing compares the spectra with multiplicity.
            let ev_t = lex(crate::linalg::schur::eigenvalues(&t).unwrap());
            let ev_d = lex(crate::linalg::schur::eigenvalues(&d).unwrap());
            for (a, b) in ev_t.iter().zip(&ev_d) {
                assert!((a - b).norm() <= 1e-7, "dim {dim}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn semisimple_part_invariants_on_seeded_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for dim in 2..=6 {
            let entries: Vec<_> = (0..dim * dim)
                .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let t = ComplexMatrix::new(dim, dim, entries).unwrap();
            let d = match semisimple_part_default(&t) {
                Ok(d) => d,
                Err(Error::ClusterSeparationFailure { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let norm_t = t.op_norm_est();
            let comm = t.mul(&d).sub(&d.mul(&t)).max_abs();
            assert!(comm <= 1e-8 * norm_t * norm_t, "commutator {comm:.3e}");
            let nilpotent = t.sub(&d).pow(dim).max_abs();
            let bound = 1e-8 * (1.0 + norm_t).powi(dim as i32);
            assert!(nilpotent <= bound, "nilpotency residual {nilpotent:.3e}");
        }
    }
}
