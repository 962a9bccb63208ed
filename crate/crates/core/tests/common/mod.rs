//! Shared helpers for the integration suites: seeded instance sampling and
//! an exact-arithmetic reference LP solver.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use raop_core::instance::Instance;
use raop_core::instance_gen::{gen_lcmnl, Alignment, GeneratorConfig, PriceDist};
use raop_core::rcs::RcsModel;
use raop_core::simplex::{Constraint, LinearProgram, Sense};
use raop_core::RevenueVector;

pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Cycles deterministically through every generator setting combination:
/// 5 price distributions × 3 alignments × 3 revenue ratios × 2 epsilons.
pub fn settings_cycle(i: usize) -> (PriceDist, Alignment, f64, f64) {
    let alphas = [0.01, 0.1, 0.2];
    let epsilons = [0.01, 0.5];
    (
        PriceDist::ALL[i % 5],
        Alignment::ALL[(i / 5) % 3],
        alphas[(i / 15) % 3],
        epsilons[(i / 45) % 2],
    )
}

/// A generated mixture instance for sample index `i`, with its dimension
/// drawn from the given ranges.
pub fn random_lcmnl(
    i: usize,
    master_seed: u64,
    n_range: std::ops::RangeInclusive<usize>,
    m_range: std::ops::RangeInclusive<usize>,
) -> Instance {
    let seed = mix_seed(master_seed, i as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (price_dist, alignment, alpha_target, epsilon) = settings_cycle(i);
    let config = GeneratorConfig {
        n: rng.random_range(n_range),
        m: rng.random_range(m_range),
        epsilon,
        price_dist,
        alpha_target,
        alignment,
        seed: mix_seed(seed, 1),
    };
    gen_lcmnl(&config).expect("valid generator configuration")
}

/// A random consideration-set model with a random preference order and
/// non-decreasing revenues (in the preference labels).
pub fn random_rcs(i: usize, master_seed: u64, max_n: usize) -> (RcsModel, RevenueVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(master_seed, i as u64));
    let n = rng.random_range(1..=max_n);
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.999)).collect();
    let mut pref: Vec<usize> = (0..n).collect();
    pref.shuffle(&mut rng);
    let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..10.0)).collect();
    (
        RcsModel::new(lambda, pref).unwrap(),
        RevenueVector::new(r).unwrap(),
    )
}

/// Random bounded-feasible linear program: box variables plus rows anchored
/// at an interior point so the program is feasible by construction. All
/// data are dyadic rationals with few fractional bits, so every dot product
/// is exact in f64 and the float and exact-rational solvers see the *same*
/// program; in particular the anchor is exactly feasible for both.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let dyadic = |rng: &mut ChaCha8Rng, lo: i32, hi: i32, denom: f64| -> f64 {
        rng.random_range(lo..=hi) as f64 / denom
    };
    let nv = rng.random_range(2..=20);
    let bounds: Vec<(f64, f64)> = (0..nv)
        .map(|_| (0.0, dyadic(rng, 1, 6, 2.0)))
        .collect();
    let anchor: Vec<f64> = bounds
        .iter()
        .map(|(_, hi)| {
            let k = rng.random_range(0..=16);
            hi * k as f64 / 16.0
        })
        .collect();
    let rows = rng.random_range(1..=15);
    let constraints = (0..rows)
        .map(|_| {
            let coeffs: Vec<f64> = (0..nv).map(|_| dyadic(rng, -128, 128, 64.0)).collect();
            let at_anchor: f64 = coeffs.iter().zip(&anchor).map(|(a, x)| a * x).sum();
            match rng.random_range(0..4) {
                0 => Constraint {
                    coeffs,
                    sense: Sense::Eq,
                    rhs: at_anchor,
                },
                1 => Constraint {
                    coeffs,
                    sense: Sense::Ge,
                    rhs: at_anchor - dyadic(rng, 0, 32, 16.0),
                },
                _ => Constraint {
                    coeffs,
                    sense: Sense::Le,
                    rhs: at_anchor + dyadic(rng, 0, 32, 16.0),
                },
            }
        })
        .collect();
    LinearProgram {
        objective: (0..nv).map(|_| dyadic(rng, -64, 64, 64.0)).collect(),
        constraints,
        bounds,
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

#[derive(Debug, PartialEq)]
pub enum RationalOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Exact-arithmetic reference simplex (Bland's rule throughout). Mirrors the
/// float solver's interface but shares none of its code: every number is a
/// `BigRational`, so there is no tolerance anywhere.
pub fn solve_rational(lp: &LinearProgram) -> RationalOutcome {
    let n = lp.objective.len();
    let zero = BigRational::zero();

    // Shift variables to their lower bounds; upper bounds become rows.
    let mut rows: Vec<(Vec<BigRational>, Sense, BigRational)> = Vec::new();
    for c in &lp.constraints {
        let coeffs: Vec<BigRational> = c.coeffs.iter().map(|a| rat(*a)).collect();
        let shift: BigRational = coeffs
            .iter()
            .zip(&lp.bounds)
            .map(|(a, (lo, _))| a * rat(*lo))
            .sum();
        rows.push((coeffs, c.sense, rat(c.rhs) - shift));
    }
    for (j, (lo, hi)) in lp.bounds.iter().enumerate() {
        if hi.is_finite() {
            let mut coeffs = vec![zero.clone(); n];
            coeffs[j] = BigRational::from_integer(1.into());
            rows.push((coeffs, Sense::Le, rat(*hi) - rat(*lo)));
        }
    }
    for (coeffs, sense, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            *rhs = -rhs.clone();
            for a in coeffs.iter_mut() {
                *a = -a.clone();
            }
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let m = rows.len();
    let slack_count = rows
        .iter()
        .filter(|(_, s, _)| !matches!(s, Sense::Eq))
        .count();
    let total = n + slack_count + m;
    let mut body = vec![vec![zero.clone(); total + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let one = BigRational::from_integer(1.into());
    let mut next_slack = n;
    let mut next_artificial = n + slack_count;
    let artificial_start = n + slack_count;
    for (r, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        for (c, a) in coeffs.iter().enumerate() {
            body[r][c] = a.clone();
        }
        body[r][total] = rhs.clone();
        match sense {
            Sense::Le => {
                body[r][next_slack] = one.clone();
                basis[r] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                body[r][next_slack] = -one.clone();
                next_slack += 1;
                body[r][next_artificial] = one.clone();
                basis[r] = next_artificial;
                next_artificial += 1;
            }
            Sense::Eq => {
                body[r][next_artificial] = one.clone();
                basis[r] = next_artificial;
                next_artificial += 1;
            }
        }
    }
    let used = next_artificial;
    for row in body.iter_mut() {
        let rhs = row[total].clone();
        row.truncate(used);
        row.push(rhs);
    }

    let pivot = |body: &mut Vec<Vec<BigRational>>, basis: &mut Vec<usize>, row: usize, col: usize| {
        let inv = body[row][col].clone();
        for v in body[row].iter_mut() {
            *v /= inv.clone();
        }
        let prow = body[row].clone();
        for (r, brow) in body.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = brow[col].clone();
            if !f.is_zero() {
                for (v, p) in brow.iter_mut().zip(&prow) {
                    *v -= f.clone() * p;
                }
            }
        }
        basis[row] = col;
    };

    // Bland's-rule loop minimizing `cost`; returns false on unbounded.
    let run = |body: &mut Vec<Vec<BigRational>>,
               basis: &mut Vec<usize>,
               cost: &[BigRational],
               allowed: &[bool]|
     -> bool {
        loop {
            let mut reduced = cost.to_vec();
            for r in 0..body.len() {
                let cb = cost[basis[r]].clone();
                if !cb.is_zero() {
                    for c in 0..used {
                        let a = body[r][c].clone();
                        if !a.is_zero() {
                            reduced[c] -= cb.clone() * a;
                        }
                    }
                }
            }
            let entering = (0..used).find(|&c| allowed[c] && reduced[c].is_negative());
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for r in 0..body.len() {
                if body[r][col].is_positive() {
                    let ratio = body[r][used].clone() / body[r][col].clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            pivot(body, basis, row, col);
        }
    };

    if used > artificial_start {
        let mut phase1 = vec![zero.clone(); used];
        for c in phase1.iter_mut().skip(artificial_start) {
            *c = one.clone();
        }
        let allowed = vec![true; used];
        if !run(&mut body, &mut basis, &phase1, &allowed) {
            panic!("phase 1 cannot be unbounded");
        }
        let infeasibility: BigRational = (0..m)
            .filter(|&r| basis[r] >= artificial_start)
            .map(|r| body[r][used].clone())
            .sum();
        if infeasibility.is_positive() {
            return RationalOutcome::Infeasible;
        }
        for r in 0..m {
            if basis[r] >= artificial_start {
                if let Some(col) = (0..artificial_start).find(|&c| !body[r][c].is_zero()) {
                    pivot(&mut body, &mut basis, r, col);
                }
            }
        }
    }

    let mut cost = vec![zero.clone(); used];
    for (j, c) in lp.objective.iter().enumerate() {
        cost[j] = -rat(*c);
    }
    let mut allowed = vec![true; used];
    for flag in allowed.iter_mut().skip(artificial_start) {
        *flag = false;
    }
    if !run(&mut body, &mut basis, &cost, &allowed) {
        return RationalOutcome::Unbounded;
    }

    let mut shifted = vec![zero; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            shifted[b] = body[r][used].clone();
        }
    }
    let objective: BigRational = shifted
        .iter()
        .zip(&lp.objective)
        .zip(&lp.bounds)
        .map(|((w, c), (lo, _))| rat(*c) * (w + rat(*lo)))
        .sum();
    RationalOutcome::Optimal(objective.to_f64().expect("objective fits in f64"))
}
