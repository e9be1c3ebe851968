//! Hypervolume indicator in the minimization convention.
//!
//! [`hypervolume_exact`] uses a sort-and-sweep for two objectives and the WFG
//! limit-set recursion for three and four. [`hypervolume_mc`] is an unbiased
//! Monte-Carlo estimator used as an independent check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::par::{self, Exec};
use crate::pareto::dominates_unchecked;
use crate::rng::mix64;
use crate::{Error, Result};

/// Largest objective count handled by [`hypervolume_exact`].
pub const MAX_EXACT_DIM: usize = 4;

/// Exact Lebesgue measure of the union of boxes `[p, reference]`.
///
/// Points that are not strictly inside the reference box on every axis
/// contribute nothing and are dropped.
pub fn hypervolume_exact(front: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    let n = reference.len();
    if n == 0 {
        return Err(Error::Argument("empty reference point".into()));
    }
    if n > MAX_EXACT_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    for p in front {
        if p.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: p.len(),
            });
        }
    }
    let mut pts: Vec<Vec<f64>> = front
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .cloned()
        .collect();
    if pts.is_empty() {
        return Ok(0.0);
    }
    pts = nondominated(pts);
    Ok(match n {
        1 => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => sweep_2d(&mut pts, reference),
        _ => wfg(pts, reference),
    })
}

/// Removes dominated points and exact duplicates.
fn nondominated(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite objectives"));
    pts.dedup();
    let keep: Vec<bool> = (0..pts.len())
        .map(|i| !pts.iter().any(|q| dominates_unchecked(q, &pts[i])))
        .collect();
    pts.into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

fn sweep_2d(pts: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for p in pts.iter() {
        if p[1] < ceiling {
            volume += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    volume
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter().zip(reference).map(|(a, r)| r - a).product()
}

/// WFG: sum of exclusive contributions, each computed as the box volume minus
/// the hypervolume of the limit set of the points that follow it.
fn wfg(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    match pts.len() {
        0 => return 0.0,
        1 => return box_volume(&pts[0], reference),
        _ => {}
    }
    if reference.len() == 2 {
        return sweep_2d(&mut pts, reference);
    }
    // Sorting by the last objective keeps limit sets small.
    let last = reference.len() - 1;
    pts.sort_by(|a, b| b[last].partial_cmp(&a[last]).unwrap());
    (0..pts.len())
        .map(|i| {
            let p = &pts[i];
            let limited: Vec<Vec<f64>> = pts[i + 1..]
                .iter()
                .map(|q| q.iter().zip(p).map(|(a, b)| a.max(*b)).collect())
                .collect();
            box_volume(p, reference) - wfg(nondominated(limited), reference)
        })
        .sum()
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvEstimate {
    pub value: f64,
    pub std_error: f64,
}

const MC_CHUNK: usize = 1 << 15;

/// Fraction of uniform samples in `[lower, reference]` weakly dominated by
/// some front point, times the box volume.
///
/// Samples are drawn in fixed-size chunks with per-chunk generators, so the
/// estimate depends only on `seed`, not on the execution mode.
pub fn hypervolume_mc(
    front: &[Vec<f64>],
    reference: &[f64],
    lower: &[f64],
    n_samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<HvEstimate> {
    if n_samples == 0 {
        return Err(Error::Argument("n_samples must be positive".into()));
    }
    let n = reference.len();
    if lower.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: lower.len(),
        });
    }
    for p in front {
        if p.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: p.len(),
            });
        }
        if p.iter().zip(lower).any(|(a, l)| a < l) {
            return Err(Error::Argument(
                "lower bound must be below every front point".into(),
            ));
        }
    }
    let volume = box_volume(lower, reference);
    if front.is_empty() || volume <= 0.0 {
        return Ok(HvEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let hits: usize = par::map_indexed(chunks, exec, |c| {
        let count = MC_CHUNK.min(n_samples - c * MC_CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(c as u64)));
        let mut s = vec![0.0; n];
        let mut hits = 0usize;
        for _ in 0..count {
            for k in 0..n {
                s[k] = lower[k] + rng.random::<f64>() * (reference[k] - lower[k]);
            }
            if front.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let frac = hits as f64 / n_samples as f64;
    Ok(HvEstimate {
        value: frac * volume,
        std_error: volume * (frac * (1.0 - frac) / n_samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_cases() {
        assert_eq!(hypervolume_exact(&[vec![0.0, 0.0]], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hypervolume_exact(&[], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hypervolume_exact(&[vec![0.25]], &[1.0]).unwrap(), 0.75);
        assert_eq!(
            hypervolume_exact(&[vec![0.0, 0.0, 0.0]], &[1.0, 2.0, 3.0]).unwrap(),
            6.0
        );
    }

    #[test]
    fn two_point_union() {
        let front = vec![vec![0.2, 0.8], vec![0.6, 0.3]];
        let hv = hypervolume_exact(&front, &[1.0, 1.0]).unwrap();
        // Inclusion-exclusion: two boxes minus their shared corner [0.6,1]x[0.8,1].
        let oracle = 0.8 * 0.2 + 0.4 * 0.7 - 0.4 * 0.2;
        assert!((hv - oracle).abs() < 1e-15, "{hv}");
        assert!((hv - 0.36).abs() < 1e-12);
    }

    #[test]
    fn points_outside_reference_are_clipped() {
        let front = vec![vec![0.5, 0.5], vec![2.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(hypervolume_exact(&front, &[1.0, 1.0]).unwrap(), 0.25);
    }

    #[test]
    fn errors() {
        let p5 = vec![vec![0.0; 5]];
        assert!(matches!(
            hypervolume_exact(&p5, &[1.0; 5]),
            Err(Error::UnsupportedDimension(5))
        ));
        assert!(matches!(
            hypervolume_exact(&[vec![0.0]], &[1.0, 1.0]),
            Err(Error::Dimension { .. })
        ));
        assert!(hypervolume_mc(&[], &[1.0], &[0.0], 0, 1, Exec::Sequential).is_err());
        assert!(hypervolume_mc(&[vec![-1.0]], &[1.0], &[0.0], 10, 1, Exec::Sequential).is_err());
    }

    #[test]
    fn mc_trivial_cases() {
        let est = hypervolume_mc(&[vec![0.0, 0.0]], &[1.0, 1.0], &[0.0, 0.0], 100_000, 3, Exec::Parallel)
            .unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
        let empty = hypervolume_mc(&[], &[1.0, 1.0], &[0.0, 0.0], 100, 3, Exec::Parallel).unwrap();
        assert_eq!(empty.value, 0.0);
    }

    #[test]
    fn mc_converges_on_two_box_union() {
        let front = vec![vec![0.2, 0.8], vec![0.6, 0.3]];
        let est = hypervolume_mc(&front, &[1.0, 1.0], &[0.0, 0.0], 400_000, 11, Exec::Parallel).unwrap();
        assert!((est.value - 0.36).abs() < 4.0 * est.std_error, "{est:?}");
        let seq = hypervolume_mc(&front, &[1.0, 1.0], &[0.0, 0.0], 400_000, 11, Exec::Sequential).unwrap();
        assert_eq!(est, seq);
    }

    fn front_strategy(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, n), 1..9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adding_points_never_decreases_hv(
            front in front_strategy(3),
            extra in prop::collection::vec(0.0f64..1.2, 3),
        ) {
            let r = [1.0, 1.0, 1.0];
            let before = hypervolume_exact(&front, &r).unwrap();
            let mut grown = front.clone();
            grown.push(extra);
            prop_assert!(hypervolume_exact(&grown, &r).unwrap() >= before - 1e-12);
            // A point dominated by an existing member changes nothing.
            let mut dominated = front.clone();
            dominated.push(front[0].iter().map(|v| v + 0.01).collect());
            prop_assert!((hypervolume_exact(&dominated, &r).unwrap() - before).abs() < 1e-12);
        }

        #[test]
        fn hv_ignores_order(front in front_strategy(4)) {
            let r = [1.0; 4];
            let mut rev = front.clone();
            rev.reverse();
            let a = hypervolume_exact(&front, &r).unwrap();
            let b = hypervolume_exact(&rev, &r).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
