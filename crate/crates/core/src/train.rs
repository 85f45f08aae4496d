//! Stochastic training of the pairwise rank loss: per item, a linked group
//! must outscore a sampled non-linked group by the margin. Also carries the
//! exact full-loss oracle and the gradient of the loss with respect to input
//! item features, the hook an external feature extractor fine-tunes against.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::graph::{sample_negative_group, BipartiteGraph};
use crate::mat::{axpy, dot, scale_slice, Mat};
use crate::model::{hinge, ItemRef, ModelConfig, ModelParams, Variant};
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Optimizer settings. Margin and regularization strengths live in
/// [`ModelConfig`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Sampled (positive, negative) pairs drawn per item per epoch.
    pub pairs_per_item: usize,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 30,
            seed: 1,
            pairs_per_item: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "learning_rate must be non-negative and finite",
            });
        }
        if self.pairs_per_item == 0 {
            return Err(Error::InvalidParameter {
                what: "pairs_per_item must be at least 1",
            });
        }
        Ok(())
    }
}

/// Per-epoch traces of a training run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean sampled hinge loss over the epoch's steps.
    pub epoch_loss: Vec<f64>,
    /// Frobenius norm of the weight matrices after each epoch.
    pub epoch_weight_norm: Vec<f64>,
    /// Frobenius norm of the latent matrices after each epoch.
    pub epoch_latent_norm: Vec<f64>,
    pub epoch_seconds: Vec<f64>,
    /// Item visits skipped because no (positive, negative) pair exists.
    pub items_skipped: usize,
}

/// Wall-clock source for epoch timing. The core stays clock-free; callers
/// that want real timings inject one.
pub trait Clock {
    fn now_seconds(&self) -> f64;
}

/// Reports zero elapsed time everywhere.
pub struct NullClock;

impl Clock for NullClock {
    fn now_seconds(&self) -> f64 {
        0.0
    }
}

/// Counters returned by one [`sgd_epoch`] pass.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EpochStats {
    pub mean_loss: f64,
    pub steps: usize,
    pub items_skipped: usize,
}

/// Analytic gradients of one sampled pair's hinge loss with respect to every
/// parameter block it touches. All blocks are zero when the hinge is
/// inactive. The item-bias gradient is identically zero because the bias
/// cancels in the score difference; it is kept as a field so checks can
/// assert that.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleGradients {
    pub active: bool,
    pub loss: f64,
    pub w_feat: Mat,
    pub w_latent: Mat,
    pub z_item: Vec<f64>,
    pub z_group_pos: Vec<f64>,
    pub z_group_neg: Vec<f64>,
    pub b_item: f64,
    pub b_group_pos: f64,
    pub b_group_neg: f64,
}

fn check_bound(p: &ModelParams, g: &BipartiteGraph, x: &FeatureMatrix, y: &FeatureMatrix) -> Result<()> {
    if p.n_items() != g.n_items() {
        return Err(Error::ShapeMismatch {
            what: "model item count",
            expected: g.n_items(),
            found: p.n_items(),
        });
    }
    if p.n_groups() != g.n_groups() {
        return Err(Error::ShapeMismatch {
            what: "model group count",
            expected: g.n_groups(),
            found: p.n_groups(),
        });
    }
    if x.n_rows() != g.n_items() {
        return Err(Error::ShapeMismatch {
            what: "item feature rows",
            expected: g.n_items(),
            found: x.n_rows(),
        });
    }
    if x.dim() != p.config().d_item {
        return Err(Error::ShapeMismatch {
            what: "item feature dim",
            expected: p.config().d_item,
            found: x.dim(),
        });
    }
    if y.n_rows() != g.n_groups() {
        return Err(Error::ShapeMismatch {
            what: "group feature rows",
            expected: g.n_groups(),
            found: y.n_rows(),
        });
    }
    if y.dim() != p.config().d_group {
        return Err(Error::ShapeMismatch {
            what: "group feature dim",
            expected: p.config().d_group,
            found: y.dim(),
        });
    }
    Ok(())
}

/// Combined group-side difference vector for the proposed variant,
/// `(y_pos; z_pos) - (y_neg; z_neg)`.
fn joint_diff(p: &ModelParams, y: &FeatureMatrix, c_pos: usize, c_neg: usize) -> Vec<f64> {
    let d_group = p.config().d_group;
    let mut dg = vec![0.0; p.config().joint_dim()];
    let (yp, yn) = (y.row(c_pos), y.row(c_neg));
    for j in 0..d_group {
        dg[j] = yp[j] as f64 - yn[j] as f64;
    }
    let (zp, zn) = (p.z_group().row(c_pos), p.z_group().row(c_neg));
    for j in 0..p.config().k_group {
        dg[d_group + j] = zp[j] - zn[j];
    }
    dg
}

/// Exact gradients of `hinge(score(i, c_pos) - score(i, c_neg))` for a
/// training item `i` with `c_pos` linked and `c_neg` not linked.
pub fn triple_gradients(
    p: &ModelParams,
    g: &BipartiteGraph,
    item: usize,
    c_pos: usize,
    c_neg: usize,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
) -> Result<TripleGradients> {
    check_bound(p, g, x, y)?;
    if item >= g.n_items() {
        return Err(Error::IndexOutOfBounds {
            what: "item",
            index: item,
            len: g.n_items(),
        });
    }
    if !g.has_edge(c_pos, item) || g.has_edge(c_neg, item) {
        return Err(Error::InvalidParameter {
            what: "c_pos must be linked to the item and c_neg must not be",
        });
    }

    let cfg = *p.config();
    let x_row = x.row_f64(item);
    let t = p.pair_score_diff(&x_row, ItemRef::Known(item), y, c_pos, c_neg)?;
    let loss = hinge(t, cfg.margin);
    let active = t < cfg.margin;

    let mut grads = TripleGradients {
        active,
        loss,
        w_feat: Mat::zeros(p.w_feat().rows(), p.w_feat().cols()),
        w_latent: Mat::zeros(p.w_latent().rows(), p.w_latent().cols()),
        z_item: vec![0.0; cfg.k_item],
        z_group_pos: vec![0.0; cfg.k_group],
        z_group_neg: vec![0.0; cfg.k_group],
        b_item: 0.0,
        b_group_pos: 0.0,
        b_group_neg: 0.0,
    };
    if !active {
        return Ok(grads);
    }

    let zi = p.z_item().row(item);
    match cfg.variant {
        Variant::Proposed => {
            let dg = joint_diff(p, y, c_pos, c_neg);
            for (a, &xa) in x_row.iter().enumerate() {
                for (j, &d) in dg.iter().enumerate() {
                    grads.w_feat.set(a, j, -(xa * d));
                }
            }
            for (b, &zb) in zi.iter().enumerate() {
                for (j, &d) in dg.iter().enumerate() {
                    grads.w_latent.set(b, j, -(zb * d));
                }
            }
            for b in 0..cfg.k_item {
                grads.z_item[b] = -dot(p.w_latent().row(b), &dg);
            }
            // u_tail = latent half of the item projection x W_feat + z_i W_lat
            let mut u_tail = vec![0.0; cfg.k_group];
            for (a, &xa) in x_row.iter().enumerate() {
                axpy(&mut u_tail, xa, &p.w_feat().row(a)[cfg.d_group..]);
            }
            for (b, &zb) in zi.iter().enumerate() {
                axpy(&mut u_tail, zb, &p.w_latent().row(b)[cfg.d_group..]);
            }
            for j in 0..cfg.k_group {
                grads.z_group_pos[j] = -u_tail[j];
                grads.z_group_neg[j] = u_tail[j];
            }
        }
        Variant::Baseline => {
            let (yp, yn) = (y.row(c_pos), y.row(c_neg));
            let dy: Vec<f64> = yp
                .iter()
                .zip(yn)
                .map(|(&a, &b)| a as f64 - b as f64)
                .collect();
            let (zp, zn) = (p.z_group().row(c_pos), p.z_group().row(c_neg));
            let dz: Vec<f64> = zp.iter().zip(zn).map(|(a, b)| a - b).collect();
            for (a, &xa) in x_row.iter().enumerate() {
                for (j, &d) in dy.iter().enumerate() {
                    grads.w_feat.set(a, j, -(xa * d));
                }
            }
            for (b, &zb) in zi.iter().enumerate() {
                for (j, &d) in dz.iter().enumerate() {
                    grads.w_latent.set(b, j, -(zb * d));
                }
            }
            for b in 0..cfg.k_item {
                grads.z_item[b] = -dot(p.w_latent().row(b), &dz);
            }
            // w^T z_i drives both group-latent gradients
            let mut wt_zi = vec![0.0; cfg.k_group];
            for (b, &zb) in zi.iter().enumerate() {
                axpy(&mut wt_zi, zb, p.w_latent().row(b));
            }
            for j in 0..cfg.k_group {
                grads.z_group_pos[j] = -wt_zi[j];
                grads.z_group_neg[j] = wt_zi[j];
            }
        }
    }
    grads.b_group_pos = -1.0;
    grads.b_group_neg = 1.0;
    Ok(grads)
}

/// Gradient of one pair's hinge loss with respect to the input item feature
/// vector: `-W_feat (g_pos - g_neg)` while the hinge is active, zero
/// otherwise. Only the proposed variant has this linear path.
pub fn grad_wrt_item_feature(
    p: &ModelParams,
    item: ItemRef,
    x_row: &[f64],
    c_pos: usize,
    c_neg: usize,
    y: &FeatureMatrix,
) -> Result<Vec<f64>> {
    if p.config().variant != Variant::Proposed {
        return Err(Error::NoFeaturePath);
    }
    let cfg = *p.config();
    let t = p.pair_score_diff(x_row, item, y, c_pos, c_neg)?;
    let mut grad = vec![0.0; cfg.d_item];
    if t >= cfg.margin {
        return Ok(grad);
    }
    let dg = joint_diff(p, y, c_pos, c_neg);
    for (a, slot) in grad.iter_mut().enumerate() {
        *slot = -dot(p.w_feat().row(a), &dg);
    }
    Ok(grad)
}

/// One pass over the training items in seeded random order. Per item it
/// draws `pairs_per_item` (positive, negative) pairs, applies the hinge
/// gradient step, and shrinks the touched weight and latent blocks so that
/// one epoch applies, in expectation, the same l2 pull as one batch
/// gradient step on the regularizer.
pub fn sgd_epoch<R: Rng + ?Sized>(
    p: &mut ModelParams,
    g: &BipartiteGraph,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<EpochStats> {
    cfg.validate()?;
    check_bound(p, g, x, y)?;
    let mcfg = *p.config();
    let lr = cfg.learning_rate;
    let n_items = g.n_items();
    let n_groups = g.n_groups();
    let ppi = cfg.pairs_per_item;
    let planned_steps = (n_items * ppi).max(1);

    // per-touch shrink factors; each block's expected total shrink per epoch
    // is 2 * lr * reg (touch counts: weights every step, an item row ppi
    // times, a group row 2 * steps / n_groups times in expectation)
    let weight_factor = (1.0 - 2.0 * lr * mcfg.reg_weight / planned_steps as f64).max(0.0);
    let item_factor = (1.0 - 2.0 * lr * mcfg.reg_latent / ppi as f64).max(0.0);
    let group_factor =
        (1.0 - 2.0 * lr * mcfg.reg_latent * n_groups as f64 / (2.0 * planned_steps as f64))
            .max(0.0);

    let mut order: Vec<usize> = (0..n_items).collect();
    order.shuffle(rng);

    let mut loss_sum = 0.0;
    let mut steps = 0usize;
    let mut items_skipped = 0usize;

    for &i in &order {
        let linked = g.groups_of_item(i);
        if linked.is_empty() || linked.len() >= n_groups {
            items_skipped += 1;
            continue;
        }
        let x_row = x.row_f64(i);
        for _ in 0..ppi {
            let c_pos = linked[rng.random_range(0..linked.len())];
            let c_neg = sample_negative_group(g, i, rng)?;

            match mcfg.variant {
                Variant::Proposed => {
                    let dg = joint_diff(p, y, c_pos, c_neg);
                    // item projection u = x W_feat + z_i W_lat, pre-update
                    let mut u = vec![0.0; mcfg.joint_dim()];
                    for (a, &xa) in x_row.iter().enumerate() {
                        axpy(&mut u, xa, p.w_feat.row(a));
                    }
                    let zi_old = p.z_item.row(i).to_vec();
                    for (b, &zb) in zi_old.iter().enumerate() {
                        axpy(&mut u, zb, p.w_latent.row(b));
                    }
                    let t = dot(&u, &dg) + p.b_group[c_pos] - p.b_group[c_neg];
                    loss_sum += hinge(t, mcfg.margin);
                    steps += 1;

                    if t < mcfg.margin {
                        let mut wz_dg = vec![0.0; mcfg.k_item];
                        for (b, slot) in wz_dg.iter_mut().enumerate() {
                            *slot = dot(p.w_latent.row(b), &dg);
                        }
                        for (a, &xa) in x_row.iter().enumerate() {
                            axpy(p.w_feat.row_mut(a), lr * xa, &dg);
                        }
                        for (b, &zb) in zi_old.iter().enumerate() {
                            axpy(p.w_latent.row_mut(b), lr * zb, &dg);
                        }
                        axpy(p.z_item.row_mut(i), lr, &wz_dg);
                        axpy(p.z_group.row_mut(c_pos), lr, &u[mcfg.d_group..]);
                        axpy(p.z_group.row_mut(c_neg), -lr, &u[mcfg.d_group..]);
                        p.b_group[c_pos] += lr;
                        p.b_group[c_neg] -= lr;
                    }
                }
                Variant::Baseline => {
                    let (yp, yn) = (y.row(c_pos), y.row(c_neg));
                    let dy: Vec<f64> = yp
                        .iter()
                        .zip(yn)
                        .map(|(&a, &b)| a as f64 - b as f64)
                        .collect();
                    let (zp, zn) = (p.z_group.row(c_pos), p.z_group.row(c_neg));
                    let dz: Vec<f64> = zp.iter().zip(zn).map(|(a, b)| a - b).collect();
                    let zi_old = p.z_item.row(i).to_vec();

                    let mut v_dy = vec![0.0; mcfg.d_item];
                    for (a, slot) in v_dy.iter_mut().enumerate() {
                        *slot = dot(p.w_feat.row(a), &dy);
                    }
                    let mut w_dz = vec![0.0; mcfg.k_item];
                    for (b, slot) in w_dz.iter_mut().enumerate() {
                        *slot = dot(p.w_latent.row(b), &dz);
                    }
                    let t = dot(&x_row, &v_dy) + dot(&zi_old, &w_dz) + p.b_group[c_pos]
                        - p.b_group[c_neg];
                    loss_sum += hinge(t, mcfg.margin);
                    steps += 1;

                    if t < mcfg.margin {
                        let mut wt_zi = vec![0.0; mcfg.k_group];
                        for (b, &zb) in zi_old.iter().enumerate() {
                            axpy(&mut wt_zi, zb, p.w_latent.row(b));
                        }
                        for (a, &xa) in x_row.iter().enumerate() {
                            axpy(p.w_feat.row_mut(a), lr * xa, &dy);
                        }
                        for (b, &zb) in zi_old.iter().enumerate() {
                            axpy(p.w_latent.row_mut(b), lr * zb, &dz);
                        }
                        axpy(p.z_item.row_mut(i), lr, &w_dz);
                        axpy(p.z_group.row_mut(c_pos), lr, &wt_zi);
                        axpy(p.z_group.row_mut(c_neg), -lr, &wt_zi);
                        p.b_group[c_pos] += lr;
                        p.b_group[c_neg] -= lr;
                    }
                }
            }

            if mcfg.reg_weight > 0.0 {
                p.w_feat.scale(weight_factor);
                p.w_latent.scale(weight_factor);
            }
            if mcfg.reg_latent > 0.0 {
                scale_slice(p.z_item.row_mut(i), item_factor);
                scale_slice(p.z_group.row_mut(c_pos), group_factor);
                scale_slice(p.z_group.row_mut(c_neg), group_factor);
            }
        }
    }

    Ok(EpochStats {
        mean_loss: if steps > 0 { loss_sum / steps as f64 } else { 0.0 },
        steps,
        items_skipped,
    })
}

/// Initializes parameters and runs `epochs` SGD passes. Wall time per epoch
/// is read from `clock`.
pub fn train_with_clock(
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    g: &BipartiteGraph,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    clock: &dyn Clock,
) -> Result<(ModelParams, TrainReport)> {
    train_cfg.validate()?;
    let mut params = ModelParams::init(model_cfg, g.n_items(), g.n_groups(), train_cfg.seed)?;
    check_bound(&params, g, x, y)?;
    // separate stream from the init draws
    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut report = TrainReport::default();
    for _ in 0..train_cfg.epochs {
        let started = clock.now_seconds();
        let stats = sgd_epoch(&mut params, g, x, y, train_cfg, &mut rng)?;
        report.epoch_loss.push(stats.mean_loss);
        report
            .epoch_weight_norm
            .push(libm::sqrt(params.w_feat.frob_sq() + params.w_latent.frob_sq()));
        report
            .epoch_latent_norm
            .push(libm::sqrt(params.z_item.frob_sq() + params.z_group.frob_sq()));
        report.epoch_seconds.push(clock.now_seconds() - started);
        report.items_skipped += stats.items_skipped;
    }
    Ok((params, report))
}

/// [`train_with_clock`] with a null clock; epoch timings read as zero.
pub fn train(
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    g: &BipartiteGraph,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
) -> Result<(ModelParams, TrainReport)> {
    train_with_clock(model_cfg, train_cfg, g, x, y, &NullClock)
}

/// Exact rank loss: the full double sum of hinge losses over every
/// (linked, non-linked) group pair of every item, plus the regularizer.
/// Quadratic per item; meant for small graphs and oracle checks.
pub fn full_rank_loss(
    p: &ModelParams,
    g: &BipartiteGraph,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
) -> Result<f64> {
    check_bound(p, g, x, y)?;
    let margin = p.config().margin;
    let mut total = p.regularization();
    for i in 0..g.n_items() {
        let linked = g.groups_of_item(i);
        if linked.is_empty() || linked.len() >= g.n_groups() {
            continue;
        }
        let scores = item_scores_without_bias(p, &x.row_f64(i), i, y);
        for &cp in linked {
            for (cn, &sn) in scores.iter().enumerate() {
                if linked.binary_search(&cn).is_err() {
                    total += hinge(scores[cp] - sn, margin);
                }
            }
        }
    }
    Ok(total)
}

/// Mean hinge loss of one item under uniform pair sampling, as the exact
/// average over all of the item's (positive, negative) pairs. Zero when the
/// item has no pairs.
pub fn item_mean_pair_loss(
    p: &ModelParams,
    g: &BipartiteGraph,
    item: usize,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
) -> Result<f64> {
    check_bound(p, g, x, y)?;
    let linked = g.groups_of_item(item);
    let n_neg = g.n_groups() - linked.len();
    if linked.is_empty() || n_neg == 0 {
        return Ok(0.0);
    }
    let margin = p.config().margin;
    let scores = item_scores_without_bias(p, &x.row_f64(item), item, y);
    let mut sum = 0.0;
    for &cp in linked {
        for (cn, &sn) in scores.iter().enumerate() {
            if linked.binary_search(&cn).is_err() {
                sum += hinge(scores[cp] - sn, margin);
            }
        }
    }
    Ok(sum / (linked.len() * n_neg) as f64)
}

/// Scores of one known item against all groups with the item bias forced to
/// zero, so that pair differences match [`ModelParams::pair_score_diff`]
/// bit for bit.
fn item_scores_without_bias(
    p: &ModelParams,
    x_row: &[f64],
    item: usize,
    y: &FeatureMatrix,
) -> Vec<f64> {
    let saved = p.b_item()[item];
    if saved == 0.0 {
        return p
            .score_all_groups(x_row, ItemRef::Known(item), y)
            .expect("shapes were checked");
    }
    let mut q = p.clone();
    q.b_item_mut()[item] = 0.0;
    q.score_all_groups(x_row, ItemRef::Known(item), y)
        .expect("shapes were checked")
}
