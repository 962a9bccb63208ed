//! Traditional (binary) assortment solvers: exact subset enumeration and the
//! revenue-ordered scan, both generic over any choice evaluator.

use std::time::Instant;

use rayon::prelude::*;

use crate::choice::{ChoiceModel, RefinementVector, RevenueVector, SolveResult};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lcmnl::{LogMnlSegment, MnlSegment};

/// Hard cap on exact enumeration: 2^25 subsets keeps a run under a minute on
/// desk hardware.
pub const ENUM_LIMIT: usize = 25;

/// Exact optimum over all binary assortments. Ties break toward the
/// lexicographically smallest bitmask, so the empty set wins when everything
/// is worthless.
pub fn enumerate_taop(instance: &Instance) -> Result<SolveResult> {
    enumerate_model_capped(&instance.model, &instance.r, ENUM_LIMIT, "enum")
}

/// Enumeration with an explicit cap, for callers that lower it.
pub fn enumerate_taop_capped(instance: &Instance, cap: usize) -> Result<SolveResult> {
    enumerate_model_capped(&instance.model, &instance.r, cap.min(ENUM_LIMIT), "enum")
}

fn enumerate_model_capped<M: ChoiceModel + Sync + ?Sized>(
    model: &M,
    r: &RevenueVector,
    cap: usize,
    solver: &str,
) -> Result<SolveResult> {
    let n = model.num_products();
    if n > cap {
        return Err(Error::SizeLimit {
            what: "products for exact enumeration",
            limit: cap as u64,
            actual: n as u64,
        });
    }
    let start = Instant::now();
    let total: u64 = 1 << n;
    // Associative merge: higher revenue wins, equal revenue keeps the smaller
    // mask, so the result is independent of how the range is partitioned.
    let merge = |a: (f64, u64), b: (f64, u64)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let (_, best_mask) = (0..total)
        .into_par_iter()
        .fold(
            || (f64::NEG_INFINITY, u64::MAX),
            |acc, mask| {
                let x = RefinementVector::from_bitmask(mask, n);
                merge(acc, (model.revenue(r, &x), mask))
            },
        )
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), merge);
    Ok(SolveResult::evaluated(
        model,
        r,
        RefinementVector::from_bitmask(best_mask, n),
        solver,
        start.elapsed().as_secs_f64(),
    ))
}

/// Generic enumeration entry point used by model-specific wrappers.
pub fn enumerate_model<M: ChoiceModel + Sync + ?Sized>(
    model: &M,
    r: &RevenueVector,
    cap: usize,
    solver: &str,
) -> Result<SolveResult> {
    enumerate_model_capped(model, r, cap, solver)
}

/// Best revenue-ordered assortment: scans the nested sets of the `i`
/// highest-revenue products (plus the empty set) and keeps the best.
pub fn revenue_ordered(instance: &Instance) -> SolveResult {
    revenue_ordered_model(&instance.model, &instance.r, "ro")
}

pub fn revenue_ordered_model<M: ChoiceModel + ?Sized>(
    model: &M,
    r: &RevenueVector,
    solver: &str,
) -> SolveResult {
    let start = Instant::now();
    let n = model.num_products();
    let order = r.descending_order();
    let mut x = RefinementVector::zeros(n);
    let mut best_x = x.clone();
    let mut best = model.revenue(r, &x);
    for &product in &order {
        x.set(product, 1.0);
        let revenue = model.revenue(r, &x);
        if revenue > best {
            best = revenue;
            best_x = x.clone();
        }
    }
    SolveResult::evaluated(model, r, best_x, solver, start.elapsed().as_secs_f64())
}

/// Optimal assortment for one MNL segment. Revenue-ordered assortments are
/// optimal for the MNL, so a prefix scan is exact; by the monotone-utility
/// property this value is also the segment's refined optimum.
pub fn mnl_segment_optimum(seg: &MnlSegment, r: &RevenueVector) -> SolveResult {
    revenue_ordered_model(seg, r, "segment-opt")
}

/// Same scan for a segment stored on the log scale.
pub fn log_segment_optimum(seg: &LogMnlSegment, r: &RevenueVector) -> SolveResult {
    revenue_ordered_model(seg, r, "segment-opt")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_gen::example_instances;
    use crate::lcmnl::LcmnlModel;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example2_enumeration_finds_the_reference_assortment() {
        let instance = example_instances().example2;
        let result = enumerate_taop(&instance).unwrap();
        assert_eq!(result.x.values(), &[1.0, 1.0, 0.0]);
        assert!((result.revenue - 66.24).abs() < 0.05);
    }

    #[test]
    fn single_product_is_offered() {
        let model = LcmnlModel::single(MnlSegment::new(1.0, vec![1.0]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![1.0]).unwrap();
        let result = enumerate_model(&model, &r, ENUM_LIMIT, "enum").unwrap();
        assert_eq!(result.x.values(), &[1.0]);
        assert_abs_diff_eq!(result.revenue, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_revenues_select_the_empty_set() {
        let model = LcmnlModel::single(MnlSegment::new(1.0, vec![1.0, 2.0]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![0.0, 0.0]).unwrap();
        let result = enumerate_model(&model, &r, ENUM_LIMIT, "enum").unwrap();
        assert_eq!(result.x.values(), &[0.0, 0.0]);
        assert_eq!(result.revenue, 0.0);
    }

    #[test]
    fn enumeration_rejects_oversized_instances() {
        let n = 26;
        let model =
            LcmnlModel::single(MnlSegment::new(1.0, vec![1.0; n]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![1.0; n]).unwrap();
        assert!(matches!(
            enumerate_model(&model, &r, ENUM_LIMIT, "enum"),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn example2_revenue_ordered_scan() {
        let instance = example_instances().example2;
        let result = revenue_ordered(&instance);
        // R(e1) = 50 exactly, R(e2) ≈ 66.24, R(e3) ≈ 66.236.
        assert_eq!(result.x.values(), &[1.0, 1.0, 0.0]);
        assert!((result.revenue - 66.24).abs() < 0.05);
    }

    #[test]
    fn revenue_ordered_single_product_includes_empty_set() {
        // A worthless product: the empty set wins.
        let model = LcmnlModel::single(MnlSegment::new(1.0, vec![5.0]).unwrap()).unwrap();
        let r = RevenueVector::new(vec![0.0]).unwrap();
        let result = revenue_ordered_model(&model, &r, "ro");
        assert_eq!(result.revenue, 0.0);
    }

    #[test]
    fn revenue_ordered_equal_revenues_scans_prefixes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(1..=6);
            let model = LcmnlModel::single(
                MnlSegment::new(
                    rng.random_range(0.2..2.0),
                    (0..n).map(|_| rng.random_range(0.2..2.0)).collect(),
                )
                .unwrap(),
            )
            .unwrap();
            let r = RevenueVector::new(vec![3.0; n]).unwrap();
            let scan = revenue_ordered_model(&model, &r, "ro");
            // Brute force over prefixes in index order (ties keep index order).
            let mut best = 0.0f64;
            let mut x = RefinementVector::zeros(n);
            for i in 0..n {
                x.set(i, 1.0);
                best = best.max(model.revenue(&r, &x));
            }
            assert_abs_diff_eq!(scan.revenue, best, epsilon = 1e-12);
        }
    }

    #[test]
    fn example2_segment_optima() {
        // Segment 2 of the worked example: the singleton {1} dominates the
        // longer prefixes (10000/101 ≈ 99.01 beats 75000/1101 ≈ 68.12).
        let seg = MnlSegment::new(1.0, vec![100.0, 1000.0, 0.1]).unwrap();
        let r = RevenueVector::new(vec![100.0, 65.0, 58.0]).unwrap();
        let result = mnl_segment_optimum(&seg, &r);
        assert_eq!(result.x.values(), &[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(result.revenue, 10000.0 / 101.0, epsilon = 1e-9);

        let seg1 = MnlSegment::new(1.0, vec![0.01, 100.0, 0.1]).unwrap();
        let result1 = mnl_segment_optimum(&seg1, &r);
        assert_eq!(result1.x.values(), &[1.0, 1.0, 0.0]);
        assert_abs_diff_eq!(result1.revenue, 6501.0 / 101.01, epsilon = 1e-9);
    }

    #[test]
    fn segment_optimum_zero_revenue() {
        let seg = MnlSegment::new(1.0, vec![1.0, 1.0]).unwrap();
        let r = RevenueVector::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(mnl_segment_optimum(&seg, &r).revenue, 0.0);
    }

    #[test]
    fn revenue_ordered_is_optimal_for_mnl() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let n = rng.random_range(1..=12);
            let seg = MnlSegment::new(
                rng.random_range(0.05..5.0),
                (0..n)
                    .map(|_| (rng.random_range(-3.0..3.0f64)).exp())
                    .collect(),
            )
            .unwrap();
            let r =
                RevenueVector::new((0..n).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
            let scan = mnl_segment_optimum(&seg, &r);
            let exact = enumerate_model(&seg, &r, ENUM_LIMIT, "enum").unwrap();
            assert!(
                (scan.revenue - exact.revenue).abs() <= 1e-10,
                "scan {} vs enum {}",
                scan.revenue,
                exact.revenue
            );
        }
    }

    #[test]
    fn revenue_ordered_never_beats_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..100 {
            let n = rng.random_range(1..=8);
            let m = rng.random_range(1..=3);
            let segments: Vec<MnlSegment> = (0..m)
                .map(|_| {
                    MnlSegment::new(
                        rng.random_range(0.1..3.0),
                        (0..n).map(|_| rng.random_range(0.1..3.0)).collect(),
                    )
                    .unwrap()
                })
                .collect();
            let theta = vec![1.0 / m as f64; m];
            let model = LcmnlModel::from_segments(segments, theta).unwrap();
            let r =
                RevenueVector::new((0..n).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
            let ro = revenue_ordered_model(&model, &r, "ro");
            let exact = enumerate_model(&model, &r, ENUM_LIMIT, "enum").unwrap();
            assert!(ro.revenue <= exact.revenue + 1e-12);
        }
    }
}
