//! Link-score models over the bipartite graph: the latent-factorization
//! baseline and the feature-weighted variant that scores new items without
//! item latents, plus the hinge loss and parameter regularization.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::mat::{dot, dot_f32, Mat};
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which score function the model uses.
///
/// `Baseline` keeps separate bilinear terms for latents and observed
/// features; `Proposed` projects item features (and optionally item latents)
/// onto the concatenation of group features and group latents, which is what
/// lets it score items that have no trained latent vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Baseline,
    Proposed,
}

/// Model dimensions and loss hyperparameters.
///
/// `d_item`/`d_group` are the observed feature dims, `k_item`/`k_group` the
/// latent dims (zero disables the corresponding latent block). With
/// `k_item = 0` the proposed variant drops the item-latent projection
/// entirely; with `k_item = k_group = 0` only the observed-feature term
/// remains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConfig {
    pub variant: Variant,
    pub d_item: usize,
    pub d_group: usize,
    pub k_item: usize,
    pub k_group: usize,
    pub margin: f64,
    pub reg_weight: f64,
    pub reg_latent: f64,
}

impl ModelConfig {
    /// Dimension of the combined group-side vector `(y_c; z_c)`.
    pub fn joint_dim(&self) -> usize {
        self.d_group + self.k_group
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "margin must be positive and finite",
            });
        }
        if !(self.reg_weight >= 0.0 && self.reg_weight.is_finite())
            || !(self.reg_latent >= 0.0 && self.reg_latent.is_finite())
        {
            return Err(Error::InvalidParameter {
                what: "regularization coefficients must be non-negative and finite",
            });
        }
        match self.variant {
            Variant::Baseline => {
                if self.k_item == 0 || self.k_group == 0 {
                    return Err(Error::InvalidParameter {
                        what: "baseline variant requires k_item >= 1 and k_group >= 1",
                    });
                }
            }
            Variant::Proposed => {
                if self.joint_dim() == 0 || (self.d_item == 0 && self.k_item == 0) {
                    return Err(Error::NoModelTerms);
                }
            }
        }
        Ok(())
    }
}

/// How an item enters a score: an index into the trained item set, or a new
/// item that has features but no latent vector and no bias.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemRef {
    Known(usize),
    New,
}

/// All trainable parameters of a model, bound to fixed node counts.
///
/// Shapes by variant:
/// - proposed: `w_feat` is `d_item x (d_group + k_group)`, `w_latent` is
///   `k_item x (d_group + k_group)`;
/// - baseline: `w_feat` is `d_item x d_group`, `w_latent` is
///   `k_item x k_group`.
///
/// `z_item` is `n_items x k_item`, `z_group` is `n_groups x k_group`, and
/// the bias vectors have one entry per node. The item bias is kept for the
/// full score form even though rank training never moves it (it cancels in
/// every pairwise difference).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub(crate) config: ModelConfig,
    pub(crate) w_feat: Mat,
    pub(crate) w_latent: Mat,
    pub(crate) z_item: Mat,
    pub(crate) z_group: Mat,
    pub(crate) b_item: Vec<f64>,
    pub(crate) b_group: Vec<f64>,
}

fn expected_weight_shapes(cfg: &ModelConfig) -> ((usize, usize), (usize, usize)) {
    match cfg.variant {
        Variant::Proposed => (
            (cfg.d_item, cfg.joint_dim()),
            (cfg.k_item, cfg.joint_dim()),
        ),
        Variant::Baseline => ((cfg.d_item, cfg.d_group), (cfg.k_item, cfg.k_group)),
    }
}

impl ModelParams {
    /// Seeded random initialization: weights and latents i.i.d. uniform on
    /// `[-s, s)` with `s = 1/sqrt(fan-in)` of the block, biases zero.
    pub fn init(cfg: &ModelConfig, n_items: usize, n_groups: usize, seed: u64) -> Result<ModelParams> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ((fr, fc), (lr, lc)) = expected_weight_shapes(cfg);

        let mut fill = |mat: &mut Mat, fan_in: usize, rng: &mut ChaCha8Rng| {
            if mat.as_slice().is_empty() {
                return;
            }
            let s = 1.0 / libm::sqrt(fan_in as f64);
            for v in mat.as_mut_slice() {
                *v = rng.random_range(-s..s);
            }
        };

        let mut w_feat = Mat::zeros(fr, fc);
        let mut w_latent = Mat::zeros(lr, lc);
        let mut z_item = Mat::zeros(n_items, cfg.k_item);
        let mut z_group = Mat::zeros(n_groups, cfg.k_group);
        match cfg.variant {
            Variant::Proposed => {
                fill(&mut w_feat, cfg.d_item, &mut rng);
                fill(&mut w_latent, cfg.k_item, &mut rng);
            }
            Variant::Baseline => {
                // file order for the baseline is W (latent) then V (feature)
                fill(&mut w_latent, cfg.k_item, &mut rng);
                fill(&mut w_feat, cfg.d_item, &mut rng);
            }
        }
        fill(&mut z_item, cfg.k_item, &mut rng);
        fill(&mut z_group, cfg.k_group, &mut rng);

        Ok(ModelParams {
            config: *cfg,
            w_feat,
            w_latent,
            z_item,
            z_group,
            b_item: vec![0.0; n_items],
            b_group: vec![0.0; n_groups],
        })
    }

    /// Assembles a model from deserialized blocks, validating shapes and
    /// finiteness.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        config: ModelConfig,
        w_feat: Mat,
        w_latent: Mat,
        z_item: Mat,
        z_group: Mat,
        b_item: Vec<f64>,
        b_group: Vec<f64>,
    ) -> Result<ModelParams> {
        config.validate()?;
        let ((fr, fc), (lr, lc)) = expected_weight_shapes(&config);
        let checks = [
            ("w_feat rows", fr, w_feat.rows()),
            ("w_feat cols", fc, w_feat.cols()),
            ("w_latent rows", lr, w_latent.rows()),
            ("w_latent cols", lc, w_latent.cols()),
            ("z_item cols", config.k_item, z_item.cols()),
            ("z_group cols", config.k_group, z_group.cols()),
            ("z_item rows", b_item.len(), z_item.rows()),
            ("z_group rows", b_group.len(), z_group.rows()),
        ];
        for (what, expected, found) in checks {
            if expected != found {
                return Err(Error::ShapeMismatch {
                    what,
                    expected,
                    found,
                });
            }
        }
        let finite = w_feat.all_finite()
            && w_latent.all_finite()
            && z_item.all_finite()
            && z_group.all_finite()
            && b_item.iter().all(|v| v.is_finite())
            && b_group.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite {
                what: "model parameters",
            });
        }
        Ok(ModelParams {
            config,
            w_feat,
            w_latent,
            z_item,
            z_group,
            b_item,
            b_group,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn n_items(&self) -> usize {
        self.b_item.len()
    }

    pub fn n_groups(&self) -> usize {
        self.b_group.len()
    }

    pub fn w_feat(&self) -> &Mat {
        &self.w_feat
    }

    pub fn w_latent(&self) -> &Mat {
        &self.w_latent
    }

    pub fn z_item(&self) -> &Mat {
        &self.z_item
    }

    pub fn z_group(&self) -> &Mat {
        &self.z_group
    }

    pub fn b_item(&self) -> &[f64] {
        &self.b_item
    }

    pub fn b_group(&self) -> &[f64] {
        &self.b_group
    }

    pub fn b_item_mut(&mut self) -> &mut [f64] {
        &mut self.b_item
    }

    pub fn b_group_mut(&mut self) -> &mut [f64] {
        &mut self.b_group
    }

    pub fn w_feat_mut(&mut self) -> &mut Mat {
        &mut self.w_feat
    }

    pub fn w_latent_mut(&mut self) -> &mut Mat {
        &mut self.w_latent
    }

    pub fn z_item_mut(&mut self) -> &mut Mat {
        &mut self.z_item
    }

    pub fn z_group_mut(&mut self) -> &mut Mat {
        &mut self.z_group
    }

    fn check_item(&self, item: ItemRef) -> Result<()> {
        match item {
            ItemRef::Known(i) => {
                if i >= self.n_items() {
                    return Err(Error::IndexOutOfBounds {
                        what: "item",
                        index: i,
                        len: self.n_items(),
                    });
                }
            }
            ItemRef::New => {
                if self.config.variant == Variant::Baseline || self.config.k_item > 0 {
                    return Err(Error::NeedsItemLatents);
                }
            }
        }
        Ok(())
    }

    fn check_features(&self, x: &[f64], y: &FeatureMatrix) -> Result<()> {
        if x.len() != self.config.d_item {
            return Err(Error::ShapeMismatch {
                what: "item feature dim",
                expected: self.config.d_item,
                found: x.len(),
            });
        }
        if y.dim() != self.config.d_group {
            return Err(Error::ShapeMismatch {
                what: "group feature dim",
                expected: self.config.d_group,
                found: y.dim(),
            });
        }
        if y.n_rows() != self.n_groups() {
            return Err(Error::ShapeMismatch {
                what: "group feature rows",
                expected: self.n_groups(),
                found: y.n_rows(),
            });
        }
        Ok(())
    }

    /// Item-side projection split into the part dotted with observed group
    /// features (`head`), the part dotted with group latents (`tail`), and
    /// the item bias contribution.
    fn project_item(&self, x: &[f64], item: ItemRef) -> (Vec<f64>, Vec<f64>, f64) {
        let cfg = &self.config;
        let bias = match item {
            ItemRef::Known(i) => self.b_item[i],
            ItemRef::New => 0.0,
        };
        match cfg.variant {
            Variant::Proposed => {
                let mut joint = vec![0.0; cfg.joint_dim()];
                for (a, &xa) in x.iter().enumerate() {
                    crate::mat::axpy(&mut joint, xa, self.w_feat.row(a));
                }
                if let ItemRef::Known(i) = item {
                    let zi = self.z_item.row(i);
                    for (b, &zb) in zi.iter().enumerate() {
                        crate::mat::axpy(&mut joint, zb, self.w_latent.row(b));
                    }
                }
                let tail = joint.split_off(cfg.d_group);
                (joint, tail, bias)
            }
            Variant::Baseline => {
                let mut head = vec![0.0; cfg.d_group];
                for (a, &xa) in x.iter().enumerate() {
                    crate::mat::axpy(&mut head, xa, self.w_feat.row(a));
                }
                let mut tail = vec![0.0; cfg.k_group];
                if let ItemRef::Known(i) = item {
                    let zi = self.z_item.row(i);
                    for (b, &zb) in zi.iter().enumerate() {
                        crate::mat::axpy(&mut tail, zb, self.w_latent.row(b));
                    }
                }
                (head, tail, bias)
            }
        }
    }

    /// Link score for one `(item, group)` pair given the item's feature row
    /// and the group feature matrix.
    pub fn score(&self, x: &[f64], item: ItemRef, y: &FeatureMatrix, group: usize) -> Result<f64> {
        self.check_item(item)?;
        self.check_features(x, y)?;
        if group >= self.n_groups() {
            return Err(Error::IndexOutOfBounds {
                what: "group",
                index: group,
                len: self.n_groups(),
            });
        }
        let (head, tail, bias) = self.project_item(x, item);
        Ok(self.score_projected(&head, &tail, bias, y, group))
    }

    fn score_projected(
        &self,
        head: &[f64],
        tail: &[f64],
        bias: f64,
        y: &FeatureMatrix,
        group: usize,
    ) -> f64 {
        dot_f32(head, y.row(group)) + dot(tail, self.z_group.row(group)) + bias
            + self.b_group[group]
    }

    /// Scores of one item against every group. For `ItemRef::New` the item
    /// bias contributes zero.
    pub fn score_all_groups(
        &self,
        x: &[f64],
        item: ItemRef,
        y: &FeatureMatrix,
    ) -> Result<Vec<f64>> {
        self.check_item(item)?;
        self.check_features(x, y)?;
        let (head, tail, bias) = self.project_item(x, item);
        Ok((0..self.n_groups())
            .map(|c| self.score_projected(&head, &tail, bias, y, c))
            .collect())
    }

    /// `score(item, c_pos) - score(item, c_neg)`, computed without the item
    /// bias, which cancels in every pairwise difference.
    pub fn pair_score_diff(
        &self,
        x: &[f64],
        item: ItemRef,
        y: &FeatureMatrix,
        c_pos: usize,
        c_neg: usize,
    ) -> Result<f64> {
        self.check_item(item)?;
        self.check_features(x, y)?;
        let n = self.n_groups();
        for c in [c_pos, c_neg] {
            if c >= n {
                return Err(Error::IndexOutOfBounds {
                    what: "group",
                    index: c,
                    len: n,
                });
            }
        }
        let (head, tail, _) = self.project_item(x, item);
        let s_pos = self.score_projected(&head, &tail, 0.0, y, c_pos);
        let s_neg = self.score_projected(&head, &tail, 0.0, y, c_neg);
        Ok(s_pos - s_neg)
    }

    /// The l2 penalty on weight and latent blocks; biases are excluded.
    pub fn regularization(&self) -> f64 {
        self.config.reg_weight * (self.w_feat.frob_sq() + self.w_latent.frob_sq())
            + self.config.reg_latent * (self.z_item.frob_sq() + self.z_group.frob_sq())
    }
}

/// Hinge loss `max(0, margin - t)` on a score difference `t`.
pub fn hinge(t: f64, margin: f64) -> f64 {
    (margin - t).max(0.0)
}
