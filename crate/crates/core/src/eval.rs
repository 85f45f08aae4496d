//! Ranking evaluation: per-item AUC over held-out edges and its mean across
//! items, the headline link-prediction metric.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::graph::EdgeSplit;
use crate::model::{ItemRef, ModelParams};
use alloc::vec::Vec;

/// Evaluation result. `mean_auc` is the equal-weight mean of `per_item_auc`
/// entries; items without held-out positives (or without any negative) are
/// skipped and counted.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub mean_auc: f64,
    pub per_item_auc: Vec<(usize, f64)>,
    pub n_items_evaluated: usize,
    pub n_items_skipped: usize,
}

/// AUC of positives against negatives with ties counting half, computed by
/// rank summation in `O((P + N) log (P + N))` rather than over all pairs.
pub fn auc(pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(Error::UndefinedAuc);
    }
    if !pos_scores.iter().chain(neg_scores).all(|v| v.is_finite()) {
        return Err(Error::NonFinite { what: "scores" });
    }
    let mut all: Vec<(f64, bool)> = Vec::with_capacity(pos_scores.len() + neg_scores.len());
    all.extend(pos_scores.iter().map(|&s| (s, true)));
    all.extend(neg_scores.iter().map(|&s| (s, false)));
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    // sum of average ranks of the positives (1-based, ties share a rank)
    let mut pos_rank_sum = 0.0;
    let mut start = 0;
    while start < all.len() {
        let mut end = start;
        while end < all.len() && all[end].0 == all[start].0 {
            end += 1;
        }
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        let ties_pos = all[start..end].iter().filter(|(_, p)| *p).count();
        pos_rank_sum += avg_rank * ties_pos as f64;
        start = end;
    }
    let p = pos_scores.len() as f64;
    let n = neg_scores.len() as f64;
    let u = pos_rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * n))
}

/// Mean per-item AUC on a split: for each item with held-out positives, the
/// positives are the held-out groups and the negatives are the groups the
/// item is linked to in neither the train nor the test edges.
pub fn mean_auc(
    p: &ModelParams,
    split: &EdgeSplit,
    x: &FeatureMatrix,
    y: &FeatureMatrix,
) -> Result<EvalReport> {
    let g = &split.train;
    if x.n_rows() != g.n_items() {
        return Err(Error::ShapeMismatch {
            what: "item feature rows",
            expected: g.n_items(),
            found: x.n_rows(),
        });
    }
    let mut per_item_auc = Vec::new();
    let mut skipped = 0usize;
    let mut sum = 0.0;
    for i in 0..g.n_items() {
        let test_pos = &split.test_positives[i];
        if test_pos.is_empty() {
            skipped += 1;
            continue;
        }
        let scores = p.score_all_groups(&x.row_f64(i), ItemRef::Known(i), y)?;
        // linked in train or test: excluded from the negatives
        let mut linked: Vec<usize> = g.groups_of_item(i).to_vec();
        linked.extend_from_slice(test_pos);
        linked.sort_unstable();
        let pos: Vec<f64> = test_pos.iter().map(|&c| scores[c]).collect();
        let neg: Vec<f64> = scores
            .iter()
            .enumerate()
            .filter(|(c, _)| linked.binary_search(c).is_err())
            .map(|(_, &s)| s)
            .collect();
        if neg.is_empty() {
            skipped += 1;
            continue;
        }
        let a = auc(&pos, &neg)?;
        sum += a;
        per_item_auc.push((i, a));
    }
    if per_item_auc.is_empty() {
        return Err(Error::NoEvaluableItems);
    }
    Ok(EvalReport {
        mean_auc: sum / per_item_auc.len() as f64,
        n_items_evaluated: per_item_auc.len(),
        n_items_skipped: skipped,
        per_item_auc,
    })
}

/// Quadratic pair-counting AUC, kept as the oracle the fast path is tested
/// against.
pub fn auc_pair_count(pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(Error::UndefinedAuc);
    }
    let mut wins = 0.0;
    for &p in pos_scores {
        for &n in neg_scores {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (pos_scores.len() * neg_scores.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{split_edges, BipartiteGraph};
    use crate::mat::Mat;
    use crate::model::{ModelConfig, Variant};
    use alloc::vec;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_separation_scores_one() {
        assert_eq!(auc(&[0.9], &[0.1, 0.2]).unwrap(), 1.0);
    }

    #[test]
    fn full_tie_scores_half() {
        assert_eq!(auc(&[0.5], &[0.5]).unwrap(), 0.5);
    }

    #[test]
    fn mixed_case_counts_three_of_four_pairs() {
        assert_eq!(auc(&[0.5, 0.2], &[0.4, 0.1]).unwrap(), 0.75);
        assert_eq!(auc_pair_count(&[0.5, 0.2], &[0.4, 0.1]).unwrap(), 0.75);
    }

    #[test]
    fn empty_sides_are_rejected() {
        assert_eq!(auc(&[], &[0.1]).unwrap_err(), Error::UndefinedAuc);
        assert_eq!(auc(&[0.1], &[]).unwrap_err(), Error::UndefinedAuc);
    }

    #[test]
    fn rank_sum_matches_pair_count_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n_pos = rng.random_range(1..30);
            let n_neg = rng.random_range(1..30);
            // coarse grid of values makes ties common
            let pos: Vec<f64> = (0..n_pos)
                .map(|_| rng.random_range(0..8) as f64 / 4.0)
                .collect();
            let neg: Vec<f64> = (0..n_neg)
                .map(|_| rng.random_range(0..8) as f64 / 4.0)
                .collect();
            assert_eq!(
                auc(&pos, &neg).unwrap(),
                auc_pair_count(&pos, &neg).unwrap()
            );
        }
    }

    #[test]
    fn auc_is_invariant_under_increasing_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let pos: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let neg: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let base = auc(&pos, &neg).unwrap();
            let affine = |v: f64| 3.5 * v + 2.0;
            let cubic = |v: f64| v * v * v + 0.1 * v;
            let map = |f: &dyn Fn(f64) -> f64, s: &[f64]| -> Vec<f64> {
                s.iter().map(|&v| f(v)).collect()
            };
            assert_eq!(auc(&map(&affine, &pos), &map(&affine, &neg)).unwrap(), base);
            assert_eq!(auc(&map(&cubic, &pos), &map(&cubic, &neg)).unwrap(), base);
        }
    }

    #[test]
    fn complementary_auc_sums_to_one_without_ties() {
        let pos = [0.91, 0.13, 0.55];
        let neg = [0.7, 0.2, 0.4, 0.8];
        let a = auc(&pos, &neg).unwrap();
        let b = auc(&neg, &pos).unwrap();
        assert_eq!(a + b, 1.0);
    }

    fn bias_only_model(n_items: usize, n_groups: usize, b_group: Vec<f64>) -> ModelParams {
        let cfg = ModelConfig {
            variant: Variant::Proposed,
            d_item: 1,
            d_group: 1,
            k_item: 0,
            k_group: 0,
            margin: 1.0,
            reg_weight: 0.0,
            reg_latent: 0.0,
        };
        ModelParams::from_parts(
            cfg,
            Mat::zeros(1, 1),
            Mat::zeros(0, 1),
            Mat::zeros(n_items, 0),
            Mat::zeros(n_groups, 0),
            vec![0.0; n_items],
            b_group,
        )
        .unwrap()
    }

    fn ring_split(n_groups: usize, n_items: usize) -> EdgeSplit {
        let edges: Vec<(usize, usize)> = (0..n_items)
            .flat_map(|i| [(i % n_groups, i), ((i + 1) % n_groups, i)])
            .collect();
        let g = BipartiteGraph::from_edges(n_groups, n_items, &edges).unwrap();
        split_edges(&g, 0.1, 13).unwrap()
    }

    #[test]
    fn constant_scores_average_half() {
        let split = ring_split(5, 4);
        let p = bias_only_model(4, 5, vec![0.0; 5]);
        let x = FeatureMatrix::zeros(4, 1);
        let y = FeatureMatrix::zeros(5, 1);
        let report = mean_auc(&p, &split, &x, &y).unwrap();
        assert_eq!(report.mean_auc, 0.5);
        assert_eq!(report.n_items_evaluated, 4);
    }

    #[test]
    fn oracle_scores_reach_one() {
        // one-hot features and w_feat as a held-out indicator give each item
        // a score of 10 on its held-out groups and 0 elsewhere
        let n_groups = 6;
        let n_items = 5;
        let split = ring_split(n_groups, n_items);
        let mut w = Mat::zeros(n_items, n_groups);
        for i in 0..n_items {
            for &c in &split.test_positives[i] {
                w.set(i, c, 10.0);
            }
        }
        let cfg = ModelConfig {
            variant: Variant::Proposed,
            d_item: n_items,
            d_group: n_groups,
            k_item: 0,
            k_group: 0,
            margin: 1.0,
            reg_weight: 0.0,
            reg_latent: 0.0,
        };
        let p = ModelParams::from_parts(
            cfg,
            w,
            Mat::zeros(0, n_groups),
            Mat::zeros(n_items, 0),
            Mat::zeros(n_groups, 0),
            vec![0.0; n_items],
            vec![0.0; n_groups],
        )
        .unwrap();
        let mut x = vec![0.0f32; n_items * n_items];
        for i in 0..n_items {
            x[i * n_items + i] = 1.0;
        }
        let mut y = vec![0.0f32; n_groups * n_groups];
        for c in 0..n_groups {
            y[c * n_groups + c] = 1.0;
        }
        let x = FeatureMatrix::from_vec(n_items, n_items, x).unwrap();
        let y = FeatureMatrix::from_vec(n_groups, n_groups, y).unwrap();
        let report = mean_auc(&p, &split, &x, &y).unwrap();
        assert_eq!(report.mean_auc, 1.0);
    }

    #[test]
    fn mean_auc_matches_quadratic_oracle() {
        // random model on a 6-group / 4-item instance
        let edges = [
            (0, 0),
            (1, 0),
            (2, 1),
            (3, 1),
            (4, 2),
            (5, 2),
            (0, 3),
            (5, 3),
        ];
        let g = BipartiteGraph::from_edges(6, 4, &edges).unwrap();
        let split = split_edges(&g, 0.1, 4).unwrap();
        let cfg = ModelConfig {
            variant: Variant::Proposed,
            d_item: 3,
            d_group: 2,
            k_item: 0,
            k_group: 2,
            margin: 1.0,
            reg_weight: 0.0,
            reg_latent: 0.0,
        };
        let p = ModelParams::init(&cfg, 4, 6, 17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = FeatureMatrix::from_vec(
            4,
            3,
            (0..12).map(|_| rng.random_range(-1.0f32..1.0)).collect(),
        )
        .unwrap();
        let y = FeatureMatrix::from_vec(
            6,
            2,
            (0..12).map(|_| rng.random_range(-1.0f32..1.0)).collect(),
        )
        .unwrap();
        let report = mean_auc(&p, &split, &x, &y).unwrap();
        for &(i, a) in &report.per_item_auc {
            let scores = p
                .score_all_groups(&x.row_f64(i), ItemRef::Known(i), &y)
                .unwrap();
            let mut linked: Vec<usize> = split.train.groups_of_item(i).to_vec();
            linked.extend_from_slice(&split.test_positives[i]);
            linked.sort_unstable();
            let pos: Vec<f64> = split.test_positives[i].iter().map(|&c| scores[c]).collect();
            let neg: Vec<f64> = scores
                .iter()
                .enumerate()
                .filter(|(c, _)| linked.binary_search(c).is_err())
                .map(|(_, &s)| s)
                .collect();
            assert_eq!(a, auc_pair_count(&pos, &neg).unwrap());
        }
    }

    #[test]
    fn mean_is_arithmetic_mean_of_items() {
        let split = ring_split(7, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = bias_only_model(6, 7, b);
        let x = FeatureMatrix::zeros(6, 1);
        let y = FeatureMatrix::zeros(7, 1);
        let report = mean_auc(&p, &split, &x, &y).unwrap();
        let mean: f64 = report.per_item_auc.iter().map(|(_, a)| a).sum::<f64>()
            / report.per_item_auc.len() as f64;
        assert_eq!(report.mean_auc, mean);
    }
}
