//! Lower real branch `W_{-1}` of the Lambert-W function.
//!
//! `W_{-1}` inverts `w -> w e^w` on `w <= -1`, mapping `[-1/e, 0)` onto
//! `(-inf, -1]`. Two entry points are provided: one taking `z` directly and
//! one taking `s = ln(-z)`, which stays usable when `-z` underflows (small
//! stationary velocities put `s` in the thousands).

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Distance `1 + e z` below which the argument counts as the branch point.
const BRANCH_TOL: f64 = 4.0 * f64::EPSILON;
/// Below this branch distance the series is used without refinement.
const SERIES_ONLY: f64 = 1e-6;
/// Below this branch distance the series seeds Halley instead of the
/// asymptotic logarithmic guess.
const SERIES_SEED: f64 = 0.5;
const MAX_ITER: usize = 50;

/// Series of `W` around the branch point in `p = -sqrt(2 (1 + e z))`.
const BRANCH_SERIES: [f64; 10] = [
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
];

/// `W_{-1}(z)` for `z` in `[-1/e, 0)`.
///
/// Arguments up to a few ulps below `-1/e` are treated as the branch point
/// and return `-1`.
pub fn lambert_w_minus1(z: f64) -> Result<f64> {
    if !z.is_finite() || z >= 0.0 {
        return Err(Error::domain(
            "lambert_w_minus1",
            format!("argument {z} must lie in [-1/e, 0)"),
        ));
    }
    let branch_distance = E.mul_add(z, 1.0);
    solve((-z).ln(), branch_distance)
}

/// `W_{-1}(-exp(s))` for `s <= -1`, evaluated without forming `exp(s)`.
pub fn lambert_w_minus1_neg_exp(s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::domain(
            "lambert_w_minus1_neg_exp",
            format!("log-argument {s} is not finite"),
        ));
    }
    solve(s, -(s + 1.0).exp_m1())
}

fn solve(log_neg_z: f64, branch_distance: f64) -> Result<f64> {
    if branch_distance < -BRANCH_TOL {
        return Err(Error::domain(
            "lambert_w_minus1",
            format!("argument below the branch point -1/e (1 + e z = {branch_distance:e})"),
        ));
    }
    if branch_distance <= BRANCH_TOL {
        return Ok(-1.0);
    }
    if branch_distance < SERIES_ONLY {
        return Ok(branch_series(branch_distance));
    }

    let mut w = if branch_distance < SERIES_SEED {
        branch_series(branch_distance)
    } else {
        let l1 = log_neg_z;
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    // Halley on g(w) = w + ln(-w) - ln(-z), which has the same root as
    // w e^w - z on w < -1 and never evaluates e^w.
    for _ in 0..MAX_ITER {
        let g = w + (-w).ln() - log_neg_z;
        let g1 = (w + 1.0) / w;
        let g2 = -1.0 / (w * w);
        let newton = g / g1;
        let step = newton / (1.0 - 0.5 * newton * g2 / g1);
        let next = (w - step).min(-1.0);
        let done = (next - w).abs() <= 1e-15 * w.abs();
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

fn branch_series(branch_distance: f64) -> f64 {
    let p = -(2.0 * branch_distance).sqrt();
    BRANCH_SERIES.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(z: f64) -> f64 {
        let (mut lo, mut hi) = (-50.0_f64, -1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            // x e^x decreases from ~0- to -1/e as x goes from -50 to -1
            if mid * mid.exp() > z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn branch_point_maps_to_minus_one() {
        assert_eq!(lambert_w_minus1(-1.0 / E).unwrap(), -1.0);
    }

    #[test]
    fn forward_evaluation_round_trips() {
        let z = -4.0 * (-4.0_f64).exp();
        assert!((lambert_w_minus1(z).unwrap() + 4.0).abs() < 1e-13);
    }

    #[test]
    fn matches_bisection_oracle() {
        let w = lambert_w_minus1(-0.2).unwrap();
        assert!((w - bisect(-0.2)).abs() < 1e-12);
        assert!((w + 2.5426).abs() < 1e-4);
        for &z in &[-0.36, -0.3, -0.1, -1e-3, -1e-8] {
            assert!(
                (lambert_w_minus1(z).unwrap() - bisect(z)).abs() < 1e-11,
                "z = {z}"
            );
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(lambert_w_minus1(0.0).is_err());
        assert!(lambert_w_minus1(0.1).is_err());
        assert!(lambert_w_minus1(-0.4).is_err());
        assert!(lambert_w_minus1(f64::NAN).is_err());
        assert!(lambert_w_minus1_neg_exp(-0.9).is_err());
    }

    #[test]
    fn log_entry_point_agrees_and_survives_underflow() {
        for &s in &[-1.0, -1.0 - 1e-6, -1.5, -3.0, -20.0, -200.0] {
            let a = lambert_w_minus1_neg_exp(s).unwrap();
            let b = lambert_w_minus1(-s.exp()).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs(), "s = {s}: {a} vs {b}");
        }
        // exp(-9990) underflows; y - ln y = 9990 still has a clean root.
        let w = lambert_w_minus1_neg_exp(-9990.0).unwrap();
        let y = -w;
        assert!(((y - y.ln()) - 9990.0).abs() < 1e-10);
    }

    #[test]
    fn series_region_residual() {
        for &d in &[1e-14, 1e-10, 5e-7, 2e-6, 1e-3, 0.3] {
            let z = (d - 1.0) / E;
            let w = lambert_w_minus1(z).unwrap();
            assert!(w <= -1.0);
            assert!(((w * w.exp() - z) / z).abs() < 1e-13, "d = {d}");
        }
    }
}
