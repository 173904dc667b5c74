//! Composite trapezoid helpers shared by the energy and noise evaluations.

/// Trapezoid integral of samples `ys` over abscissae `xs`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid integral of `f(i)` over a uniform grid of spacing `dx`.
pub fn trapezoid_uniform(n: usize, dx: f64, f: impl Fn(usize) -> f64) -> f64 {
    match n {
        0 | 1 => 0.0,
        _ => {
            let interior: f64 = (1..n - 1).map(&f).sum();
            dx * (interior + 0.5 * (f(0) + f(n - 1)))
        }
    }
}

/// Prefix and suffix trapezoid sums of a sampled series.
///
/// Window integrals are taken from whichever side has the smaller magnitude,
/// so windows deep in a decaying tail keep full relative precision instead
/// of cancelling two nearly equal prefix sums.
#[derive(Debug, Clone)]
pub struct RunningIntegral<'a> {
    times: &'a [f64],
    values: &'a [f64],
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl<'a> RunningIntegral<'a> {
    pub fn new(times: &'a [f64], values: &'a [f64]) -> Self {
        debug_assert_eq!(times.len(), values.len());
        let n = times.len();
        let panel = |i: usize| 0.5 * (times[i + 1] - times[i]) * (values[i] + values[i + 1]);
        let mut prefix = vec![0.0; n];
        for i in 1..n {
            prefix[i] = prefix[i - 1] + panel(i - 1);
        }
        let mut suffix = vec![0.0; n];
        for i in (0..n.saturating_sub(1)).rev() {
            suffix[i] = suffix[i + 1] + panel(i);
        }
        RunningIntegral {
            times,
            values,
            prefix,
            suffix,
        }
    }

    /// Index `k` of the panel `[t_k, t_{k+1}]` containing `tau`, and the
    /// integral of the linear interpolant over `[t_k, tau]`.
    fn locate(&self, tau: f64) -> (usize, f64) {
        let n = self.times.len();
        let j = self.times.partition_point(|&t| t <= tau);
        let k = j.saturating_sub(1).min(n.saturating_sub(2));
        if n < 2 {
            return (0, 0.0);
        }
        let (t, v) = (self.times, self.values);
        let s = (tau - t[k]).clamp(0.0, t[k + 1] - t[k]);
        let v_tau = v[k] + (v[k + 1] - v[k]) * s / (t[k + 1] - t[k]);
        (k, 0.5 * s * (v[k] + v_tau))
    }

    fn prefix_at(&self, tau: f64) -> f64 {
        let (k, part) = self.locate(tau);
        self.prefix[k] + part
    }

    fn suffix_at(&self, tau: f64) -> f64 {
        let (k, part) = self.locate(tau);
        self.suffix[k] - part
    }

    /// Integral of the piecewise-linear interpolant over `[lo, hi]`,
    /// with both ends clamped to the sample range.
    pub fn between(&self, lo: f64, hi: f64) -> f64 {
        if self.times.len() < 2 {
            return 0.0;
        }
        let p_hi = self.prefix_at(hi);
        let s_lo = self.suffix_at(lo);
        if p_hi.abs() <= s_lo.abs() {
            p_hi - self.prefix_at(lo)
        } else {
            s_lo - self.suffix_at(hi)
        }
    }
}

/// Trailing-window integrals `int_{t - window}^{t} values`, `None` where the
/// window would start before `times[0]`.
pub fn windowed_integrals(times: &[f64], values: &[f64], window: f64) -> Vec<Option<f64>> {
    let Some(&t0) = times.first() else {
        return Vec::new();
    };
    let running = RunningIntegral::new(times, values);
    times
        .iter()
        .map(|&t| {
            let start = t - window;
            // one-ulp slack so that t = t0 + window counts as covered
            if start < t0 - 1e-12 * window.max(1.0) {
                None
            } else {
                Some(running.between(start.max(t0), t))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_exact_for_linear() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&xs, &ys) - 2.5).abs() < 1e-14);
        assert!((trapezoid_uniform(11, 0.1, |i| ys[i]) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn window_of_exponential() {
        let n = 20001;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 1e-4).collect();
        let vals: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        let w = windowed_integrals(&times, &vals, 1.0);
        assert!(w[0].is_none());
        let last = w[n - 1].unwrap();
        let exact = (-1.0_f64).exp() - (-2.0_f64).exp();
        assert!((last - exact).abs() < 1e-8);
    }

    #[test]
    fn deep_tail_window_keeps_relative_precision() {
        let n = 40_001;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 1e-3).collect();
        let vals: Vec<f64> = times.iter().map(|t| (-2.0 * t).exp()).collect();
        let w = windowed_integrals(&times, &vals, 1.0);
        let exact = 0.5 * ((-78.0_f64).exp() - (-80.0_f64).exp());
        assert!((w[n - 1].unwrap() / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn both_sides_agree_mid_range() {
        let times: Vec<f64> = (0..101).map(|i| i as f64 * 0.01).collect();
        let vals: Vec<f64> = times.iter().map(|t| 1.0 + t * t).collect();
        let r = RunningIntegral::new(&times, &vals);
        let direct = r.prefix_at(0.735) - r.prefix_at(0.205);
        let reverse = r.suffix_at(0.205) - r.suffix_at(0.735);
        assert!((direct - reverse).abs() < 1e-14);
        assert!((r.between(0.205, 0.735) - direct).abs() < 1e-14);
    }

    #[test]
    fn window_start_between_samples() {
        let times = [0.0, 0.3, 1.0, 1.7];
        let vals = [2.0; 4];
        let w = windowed_integrals(&times, &vals, 1.0);
        assert_eq!(w[1], None);
        assert!((w[2].unwrap() - 2.0).abs() < 1e-14);
        assert!((w[3].unwrap() - 2.0).abs() < 1e-14);
    }
}
