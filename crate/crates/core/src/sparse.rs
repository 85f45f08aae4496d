//! Sparse coding of item features over the trained group dictionary: each
//! atom is one group's concatenated observed and latent feature vector, and
//! an item's projected feature is expressed as a sparse mixture of atoms.
//!
//! Two encoders are provided: soft thresholding of atom correlations (one
//! proximal step, the production path) and an exact l1 coordinate-descent
//! solver kept as oracle and opt-in encoder.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::mat::{dot, norm_sq, Mat};
use crate::model::{ModelParams, Variant};
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sparse coefficient vector over the dictionary atoms: strictly increasing
/// indices paired with nonzero values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseCode {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseCode {
    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(dense: &[f64]) -> SparseCode {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        SparseCode { indices, values }
    }

    pub fn densify(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Index and value of the largest-magnitude coefficient, if any.
    pub fn top_magnitude(&self) -> Option<(usize, f64)> {
        self.iter()
            .max_by(|a, b| libm::fabs(a.1).total_cmp(&libm::fabs(b.1)))
    }
}

/// Group dictionary: atom `c` is the concatenation of group `c`'s observed
/// features and latent vector, optionally scaled to unit norm (original
/// norms are retained either way).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDictionary {
    // row c holds atom c; contiguous per atom
    atoms: Mat,
    atom_norms: Vec<f64>,
    normalized: bool,
}

impl SparseDictionary {
    /// Builds a dictionary from raw atoms (one per row). With `normalize`
    /// every nonzero atom is scaled to unit norm.
    pub fn from_atoms(mut atoms: Mat, normalize: bool) -> Result<SparseDictionary> {
        let norms: Vec<f64> = (0..atoms.rows())
            .map(|c| libm::sqrt(norm_sq(atoms.row(c))))
            .collect();
        if norms.iter().all(|&n| n == 0.0) {
            return Err(Error::ZeroDictionary);
        }
        if normalize {
            for (c, &n) in norms.iter().enumerate() {
                if n > 0.0 {
                    let inv = 1.0 / n;
                    for v in atoms.row_mut(c) {
                        *v *= inv;
                    }
                }
            }
        }
        Ok(SparseDictionary {
            atoms,
            atom_norms: norms,
            normalized: normalize,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.rows()
    }

    pub fn atom_dim(&self) -> usize {
        self.atoms.cols()
    }

    pub fn atom(&self, c: usize) -> &[f64] {
        self.atoms.row(c)
    }

    pub fn atom_norms(&self) -> &[f64] {
        &self.atom_norms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `sum_c alpha_c * atom_c`.
    pub fn reconstruct(&self, code: &SparseCode) -> Vec<f64> {
        let mut out = vec![0.0; self.atom_dim()];
        for (c, v) in code.iter() {
            crate::mat::axpy(&mut out, v, self.atom(c));
        }
        out
    }
}

/// Stacks `(y_c; z_c)` for every group into a dictionary.
pub fn build_dictionary(
    p: &ModelParams,
    y: &FeatureMatrix,
    normalize: bool,
) -> Result<SparseDictionary> {
    if p.config().variant != Variant::Proposed {
        return Err(Error::NoFeaturePath);
    }
    let cfg = p.config();
    if y.n_rows() != p.n_groups() {
        return Err(Error::ShapeMismatch {
            what: "group feature rows",
            expected: p.n_groups(),
            found: y.n_rows(),
        });
    }
    if y.dim() != cfg.d_group {
        return Err(Error::ShapeMismatch {
            what: "group feature dim",
            expected: cfg.d_group,
            found: y.dim(),
        });
    }
    let mut atoms = Mat::zeros(p.n_groups(), cfg.joint_dim());
    for c in 0..p.n_groups() {
        let row = atoms.row_mut(c);
        for (j, &v) in y.row(c).iter().enumerate() {
            row[j] = v as f64;
        }
        row[cfg.d_group..].copy_from_slice(p.z_group().row(c));
    }
    SparseDictionary::from_atoms(atoms, normalize)
}

/// The encoding target: the item feature projected into the group space,
/// `w_feat^T x`.
pub fn encode_target(p: &ModelParams, x: &[f64]) -> Result<Vec<f64>> {
    if p.config().variant != Variant::Proposed {
        return Err(Error::NoFeaturePath);
    }
    if x.len() != p.config().d_item {
        return Err(Error::ShapeMismatch {
            what: "item feature dim",
            expected: p.config().d_item,
            found: x.len(),
        });
    }
    let mut t = vec![0.0; p.config().joint_dim()];
    for (a, &xa) in x.iter().enumerate() {
        crate::mat::axpy(&mut t, xa, p.w_feat().row(a));
    }
    Ok(t)
}

fn soft_threshold(v: f64, thr: f64) -> f64 {
    if v > thr {
        v - thr
    } else if v < -thr {
        v + thr
    } else {
        0.0
    }
}

fn check_encode_inputs(d: &SparseDictionary, t: &[f64], lambda: f64) -> Result<()> {
    if !d.normalized {
        return Err(Error::InvalidParameter {
            what: "dictionary must be normalized for encoding",
        });
    }
    if t.len() != d.atom_dim() {
        return Err(Error::ShapeMismatch {
            what: "target dim",
            expected: d.atom_dim(),
            found: t.len(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            what: "lambda must be non-negative and finite",
        });
    }
    Ok(())
}

/// Soft thresholding of atom correlations: one proximal step from zero,
/// `alpha_c = sign(r_c) * max(|r_c| - lambda/2, 0)` with `r = D^T t`.
pub fn encode_threshold_target(
    d: &SparseDictionary,
    t: &[f64],
    lambda: f64,
) -> Result<SparseCode> {
    check_encode_inputs(d, t, lambda)?;
    let thr = lambda / 2.0;
    let dense: Vec<f64> = (0..d.n_atoms())
        .map(|c| soft_threshold(dot(d.atom(c), t), thr))
        .collect();
    Ok(SparseCode::from_dense(&dense))
}

/// [`encode_threshold_target`] on the projected feature of one item.
pub fn encode_threshold(
    d: &SparseDictionary,
    p: &ModelParams,
    x: &[f64],
    lambda: f64,
) -> Result<SparseCode> {
    let t = encode_target(p, x)?;
    encode_threshold_target(d, &t, lambda)
}

/// Exact solver for `min_a ||t - D a||^2 + lambda ||a||_1` by cyclic
/// coordinate descent, iterated until the largest coefficient change in a
/// sweep drops below `tol`.
///
/// Precomputes the atom Gram matrix, so it is meant for moderate dictionary
/// sizes; the thresholding encoder is the scalable path.
pub fn encode_lasso_cd_target(
    d: &SparseDictionary,
    t: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<SparseCode> {
    check_encode_inputs(d, t, lambda)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            what: "tol must be positive and finite",
        });
    }
    let n = d.n_atoms();
    let corr: Vec<f64> = (0..n).map(|c| dot(d.atom(c), t)).collect();
    let gram_sq: Vec<f64> = (0..n).map(|c| norm_sq(d.atom(c))).collect();
    let mut gram = Mat::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let g = dot(d.atom(a), d.atom(b));
            gram.set(a, b, g);
            gram.set(b, a, g);
        }
    }

    let thr = lambda / 2.0;
    let mut alpha = vec![0.0; n];
    for sweep in 1..=max_sweeps {
        let mut max_change = 0.0f64;
        for c in 0..n {
            if gram_sq[c] == 0.0 {
                continue;
            }
            // rho = atom_c . (t - D alpha) + ||atom_c||^2 alpha_c
            let mut cross = 0.0;
            let grow = gram.row(c);
            for (j, &aj) in alpha.iter().enumerate() {
                if aj != 0.0 && j != c {
                    cross += grow[j] * aj;
                }
            }
            let rho = corr[c] - cross;
            let new = soft_threshold(rho, thr) / gram_sq[c];
            let change = libm::fabs(new - alpha[c]);
            if change > max_change {
                max_change = change;
            }
            alpha[c] = new;
        }
        if max_change < tol {
            return Ok(SparseCode::from_dense(&alpha));
        }
        let _ = sweep;
    }
    Err(Error::NotConverged {
        sweeps: max_sweeps,
        last: SparseCode::from_dense(&alpha),
    })
}

/// [`encode_lasso_cd_target`] on the projected feature of one item.
pub fn encode_lasso_cd(
    d: &SparseDictionary,
    p: &ModelParams,
    x: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<SparseCode> {
    let t = encode_target(p, x)?;
    encode_lasso_cd_target(d, &t, lambda, tol, max_sweeps)
}

/// Picks the threshold by k-fold cross-validation over a sample of items:
/// the winning `lambda` minimizes the mean held-out reconstruction error
/// `||t - D alpha(t)||^2` of threshold-encoded codes, with ties broken
/// toward the larger (sparser) value.
pub fn select_threshold_cv(
    d: &SparseDictionary,
    p: &ModelParams,
    x_sample: &FeatureMatrix,
    lambda_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyLambdaGrid);
    }
    if folds == 0 || x_sample.n_rows() < folds {
        return Err(Error::InvalidParameter {
            what: "need at least one item per fold",
        });
    }
    let n = x_sample.n_rows();
    let targets: Vec<Vec<f64>> = (0..n)
        .map(|i| encode_target(p, &x_sample.row_f64(i)))
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    // round-robin fold assignment over the shuffled order
    let fold_of: Vec<usize> = {
        let mut fold_of = vec![0; n];
        for (pos, &item) in order.iter().enumerate() {
            fold_of[item] = pos % folds;
        }
        fold_of
    };

    let mut grid: Vec<f64> = lambda_grid.to_vec();
    grid.sort_by(|a, b| a.total_cmp(b));

    let mut best = grid[0];
    let mut best_err = f64::INFINITY;
    for &lambda in &grid {
        let mut fold_err = vec![0.0; folds];
        let mut fold_count = vec![0usize; folds];
        for i in 0..n {
            let code = encode_threshold_target(d, &targets[i], lambda)?;
            let recon = d.reconstruct(&code);
            let err: f64 = targets[i]
                .iter()
                .zip(&recon)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            fold_err[fold_of[i]] += err;
            fold_count[fold_of[i]] += 1;
        }
        let mean: f64 = fold_err
            .iter()
            .zip(&fold_count)
            .map(|(e, &c)| if c > 0 { e / c as f64 } else { 0.0 })
            .sum::<f64>()
            / folds as f64;
        if mean <= best_err {
            best_err = mean;
            best = lambda;
        }
    }
    Ok(best)
}

/// Threshold-encodes every row of `x`; output order matches input order.
pub fn encode_batch(
    d: &SparseDictionary,
    p: &ModelParams,
    x: &FeatureMatrix,
    lambda: f64,
) -> Result<Vec<SparseCode>> {
    (0..x.n_rows())
        .map(|i| encode_threshold(d, p, &x.row_f64(i), lambda))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn identity_dict(n: usize) -> SparseDictionary {
        let mut atoms = Mat::zeros(n, n);
        for c in 0..n {
            atoms.set(c, c, 1.0);
        }
        SparseDictionary::from_atoms(atoms, true).unwrap()
    }

    fn random_unit_dict(n_atoms: usize, dim: usize, seed: u64) -> SparseDictionary {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut atoms = Mat::zeros(n_atoms, dim);
        for c in 0..n_atoms {
            for v in atoms.row_mut(c) {
                *v = rng.random_range(-1.0..1.0);
            }
        }
        SparseDictionary::from_atoms(atoms, true).unwrap()
    }

    #[test]
    fn threshold_single_prox_step() {
        let d = identity_dict(2);
        let code = encode_threshold_target(&d, &[2.0, 0.1], 1.0).unwrap();
        assert_eq!(code.indices(), &[0]);
        assert_eq!(code.values(), &[1.5]);
    }

    #[test]
    fn zero_lambda_is_dense_correlation() {
        let d = random_unit_dict(5, 4, 1);
        let t = [0.3, -0.2, 0.9, 0.1];
        let code = encode_threshold_target(&d, &t, 0.0).unwrap();
        assert_eq!(code.nnz(), 5);
        for (c, v) in code.iter() {
            assert_eq!(v, dot(d.atom(c), &t));
        }
    }

    #[test]
    fn huge_lambda_kills_every_coefficient() {
        let d = random_unit_dict(5, 4, 2);
        let t = [0.3, -0.2, 0.9, 0.1];
        let max_corr = (0..5)
            .map(|c| libm::fabs(dot(d.atom(c), &t)))
            .fold(0.0, f64::max);
        let code = encode_threshold_target(&d, &t, 2.0 * max_corr + 0.1).unwrap();
        assert_eq!(code.nnz(), 0);
    }

    #[test]
    fn support_shrinks_as_lambda_grows() {
        let d = random_unit_dict(12, 8, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut last = usize::MAX;
        for step in 0..10 {
            let lambda = step as f64 * 0.15;
            let nnz = encode_threshold_target(&d, &t, lambda).unwrap().nnz();
            assert!(nnz <= last);
            last = nnz;
        }
    }

    #[test]
    fn cd_matches_threshold_on_orthonormal_atoms() {
        let d = identity_dict(4);
        let t = [1.4, -0.9, 0.2, 0.0];
        for lambda in [0.0, 0.3, 1.0, 2.5] {
            let a = encode_threshold_target(&d, &t, lambda).unwrap();
            let b = encode_lasso_cd_target(&d, &t, lambda, 1e-12, 100).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cd_solves_the_linear_system_at_zero_lambda() {
        // square, diagonally dominant (hence full-rank) dictionary
        let n = 4;
        let mut atoms = Mat::zeros(n, n);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in 0..n {
            for b in 0..n {
                atoms.set(a, b, if a == b { 2.0 } else { rng.random_range(-0.3..0.3) });
            }
        }
        let d = SparseDictionary::from_atoms(atoms.clone(), true).unwrap();
        let t = [0.7, -0.3, 0.5, 0.2];
        let code = encode_lasso_cd_target(&d, &t, 0.0, 1e-12, 10_000).unwrap();
        let recon = d.reconstruct(&code);
        for (r, &v) in recon.iter().zip(&t) {
            assert!((r - v).abs() < 1e-9, "residual {} vs {}", r, v);
        }

        // independent oracle: Gaussian elimination on the normalized atoms
        let mut m = vec![vec![0.0f64; n + 1]; n];
        for row in 0..n {
            for col in 0..n {
                m[row][col] = d.atom(col)[row];
            }
            m[row][n] = t[row];
        }
        for pivot in 0..n {
            let max_row = (pivot..n)
                .max_by(|&a, &b| m[a][pivot].abs().total_cmp(&m[b][pivot].abs()))
                .unwrap();
            m.swap(pivot, max_row);
            for row in (pivot + 1)..n {
                let f = m[row][pivot] / m[pivot][pivot];
                for col in pivot..=n {
                    m[row][col] -= f * m[pivot][col];
                }
            }
        }
        let mut solution = vec![0.0f64; n];
        for row in (0..n).rev() {
            let mut v = m[row][n];
            for col in (row + 1)..n {
                v -= m[row][col] * solution[col];
            }
            solution[row] = v / m[row][row];
        }
        let dense = code.densify(n);
        for (a, b) in dense.iter().zip(&solution) {
            assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn cd_objective_is_monotone_over_sweeps() {
        let d = random_unit_dict(10, 6, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda = 0.2;
        let objective = |code: &SparseCode| {
            let recon = d.reconstruct(code);
            let sq: f64 = t.iter().zip(&recon).map(|(a, b)| (a - b) * (a - b)).sum();
            sq + lambda * code.values().iter().map(|v| libm::fabs(*v)).sum::<f64>()
        };
        let mut last = objective(&SparseCode::default());
        for sweeps in 1..8 {
            let code = match encode_lasso_cd_target(&d, &t, lambda, 1e-300, sweeps) {
                Ok(code) => code,
                Err(Error::NotConverged { last, .. }) => last,
                Err(e) => panic!("{e}"),
            };
            let obj = objective(&code);
            assert!(obj <= last + 1e-12);
            last = obj;
        }
    }

    #[test]
    fn cd_satisfies_the_stationarity_certificate() {
        let tol = 1e-10;
        for seed in 0..20 {
            let d = random_unit_dict(15, 9, 100 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let t: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lambda = 0.15;
            let code = encode_lasso_cd_target(&d, &t, lambda, tol, 100_000).unwrap();
            let recon = d.reconstruct(&code);
            let residual: Vec<f64> = t.iter().zip(&recon).map(|(a, b)| a - b).collect();
            let dense = code.densify(d.n_atoms());
            for c in 0..d.n_atoms() {
                let g = dot(d.atom(c), &residual);
                if dense[c] == 0.0 {
                    assert!(g.abs() <= lambda / 2.0 + 10.0 * tol);
                } else {
                    let target = lambda / 2.0 * dense[c].signum();
                    assert!((g - target).abs() <= 10.0 * tol);
                }
            }
        }
    }

    #[test]
    fn cd_reports_non_convergence_with_its_iterate() {
        let d = random_unit_dict(8, 5, 21);
        let t = [0.9, -0.4, 0.3, 0.8, -0.1];
        match encode_lasso_cd_target(&d, &t, 0.01, 1e-300, 2) {
            Err(Error::NotConverged { sweeps, last }) => {
                assert_eq!(sweeps, 2);
                assert!(last.nnz() > 0);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn sparse_code_round_trips_dense_vectors() {
        let dense = [0.0, 1.5, 0.0, -0.25, 0.0, 3.0];
        let code = SparseCode::from_dense(&dense);
        assert_eq!(code.indices(), &[1, 3, 5]);
        assert_eq!(code.densify(6), dense);
    }

    #[test]
    fn cv_returns_the_only_grid_value() {
        let d = identity_dict(3);
        let p = small_model(3);
        let x = FeatureMatrix::from_vec(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
            .unwrap();
        let lambda = select_threshold_cv(&d, &p, &x, &[0.7], 3, 1).unwrap();
        assert_eq!(lambda, 0.7);
    }

    #[test]
    fn cv_is_deterministic() {
        let d = random_unit_dict(6, 4, 30);
        let p = small_model(4);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x = FeatureMatrix::from_vec(
            12,
            4,
            (0..48).map(|_| rng.random_range(-1.0f32..1.0)).collect(),
        )
        .unwrap();
        let grid = [0.05, 0.1, 0.2, 0.4, 0.8];
        let a = select_threshold_cv(&d, &p, &x, &grid, 4, 7).unwrap();
        let b = select_threshold_cv(&d, &p, &x, &grid, 4, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cv_recovers_one_sparse_supports() {
        // items built from single atoms of an orthonormal dictionary; the
        // chosen lambda must keep exactly the planted atom on held-out folds
        let n = 6;
        let d = identity_dict(n);
        let p = small_model(n);
        let n_items = 18;
        let mut data = vec![0.0f32; n_items * n];
        for i in 0..n_items {
            data[i * n + (i % n)] = 1.0;
        }
        let x = FeatureMatrix::from_vec(n_items, n, data).unwrap();
        let grid = [0.0, 0.1, 0.5, 1.0, 1.9];
        let lambda = select_threshold_cv(&d, &p, &x, &grid, 6, 5).unwrap();
        for i in 0..n_items {
            let code = encode_threshold(&d, &p, &x.row_f64(i), lambda).unwrap();
            assert_eq!(code.top_magnitude().unwrap().0, i % n);
            assert_eq!(code.nnz(), 1);
        }
    }

    #[test]
    fn batch_encode_equals_looped_encodes() {
        let d = random_unit_dict(7, 4, 40);
        let p = small_model(4);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let x = FeatureMatrix::from_vec(
            9,
            4,
            (0..36).map(|_| rng.random_range(-1.0f32..1.0)).collect(),
        )
        .unwrap();
        let batch = encode_batch(&d, &p, &x, 0.2).unwrap();
        assert_eq!(batch.len(), 9);
        for (i, code) in batch.iter().enumerate() {
            assert_eq!(*code, encode_threshold(&d, &p, &x.row_f64(i), 0.2).unwrap());
        }
    }

    #[test]
    fn dictionary_from_model_blocks() {
        use crate::model::{ModelConfig, Variant};
        // k_group = 0: atoms are exactly the group feature rows
        let cfg = ModelConfig {
            variant: Variant::Proposed,
            d_item: 2,
            d_group: 2,
            k_item: 0,
            k_group: 0,
            margin: 1.0,
            reg_weight: 0.0,
            reg_latent: 0.0,
        };
        let p = ModelParams::from_parts(
            cfg,
            Mat::zeros(2, 2),
            Mat::zeros(0, 2),
            Mat::zeros(1, 0),
            Mat::zeros(3, 0),
            vec![0.0],
            vec![0.0; 3],
        )
        .unwrap();
        let y = FeatureMatrix::from_vec(3, 2, vec![3.0, 4.0, 1.0, 0.0, 0.0, 2.0]).unwrap();
        let d = build_dictionary(&p, &y, false).unwrap();
        assert_eq!(d.atom(0), &[3.0, 4.0]);
        assert_eq!(d.atom_norms()[0], 5.0);
        assert!(!d.is_normalized());
        let dn = build_dictionary(&p, &y, true).unwrap();
        assert_eq!(dn.atom(0), &[0.6, 0.8]);
        assert_eq!(dn.atom_norms()[0], 5.0);

        // d_group = 0: atoms are the latent vectors alone
        let cfg_latent = ModelConfig {
            d_group: 0,
            k_group: 2,
            ..cfg
        };
        let p_latent = ModelParams::from_parts(
            cfg_latent,
            Mat::zeros(2, 2),
            Mat::zeros(0, 2),
            Mat::zeros(1, 0),
            Mat::from_vec(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
            vec![0.0],
            vec![0.0; 3],
        )
        .unwrap();
        let y_empty = FeatureMatrix::zeros(3, 0);
        let dl = build_dictionary(&p_latent, &y_empty, false).unwrap();
        assert_eq!(dl.atom(2), &[1.0, 1.0]);
    }

    #[test]
    fn zero_dictionary_is_rejected() {
        assert_eq!(
            SparseDictionary::from_atoms(Mat::zeros(3, 4), true).unwrap_err(),
            Error::ZeroDictionary
        );
    }

    /// Identity-weight model whose encode target is the item feature itself.
    fn small_model(dim: usize) -> ModelParams {
        use crate::model::{ModelConfig, Variant};
        let cfg = ModelConfig {
            variant: Variant::Proposed,
            d_item: dim,
            d_group: dim,
            k_item: 0,
            k_group: 0,
            margin: 1.0,
            reg_weight: 0.0,
            reg_latent: 0.0,
        };
        let mut w = Mat::zeros(dim, dim);
        for a in 0..dim {
            w.set(a, a, 1.0);
        }
        ModelParams::from_parts(
            cfg,
            w,
            Mat::zeros(0, dim),
            Mat::zeros(1, 0),
            Mat::zeros(dim, 0),
            vec![0.0],
            vec![0.0; dim],
        )
        .unwrap()
    }
}
