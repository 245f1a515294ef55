//! Scalar summaries of a closed-loop run.

use crate::error::{Error, Result};
use crate::reduced_ode::detect_reaching_time;

/// Minimum number of samples in a decay-fit window.
pub const MIN_DECAY_SAMPLES: usize = 10;

/// Time series a metric set is computed from. Borrowed so that both a live
/// [`crate::heat_sim::Trajectory`] and a re-read CSV can be used.
#[derive(Debug, Clone, Copy)]
pub struct SeriesView<'a> {
    pub t: &'a [f64],
    pub sigma: &'a [f64],
    pub u: &'a [f64],
    pub norm_z: &'a [f64],
    /// Disturbance at each sample.
    pub disturbance: &'a [f64],
}

/// Constants needed alongside the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricContext {
    pub lambda: f64,
    pub b_star_phi: f64,
    pub dt: f64,
    pub band: f64,
    pub dwell: f64,
    pub decay_offset: f64,
    /// Reaching-time bound, when the law provides one.
    pub reach_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub t_reach: Option<f64>,
    pub reach_bound: Option<f64>,
    pub post_reach_sigma_sup: Option<f64>,
    pub decay_rate: Option<f64>,
    pub chattering_index: Option<f64>,
    pub sigma_defect: f64,
}

impl Metrics {
    pub fn reached(&self) -> bool {
        self.t_reach.is_some()
    }

    /// `Some(t_reach ≤ bound)` when both exist.
    pub fn within_bound(&self) -> Option<bool> {
        Some(self.t_reach? <= self.reach_bound?)
    }

    pub const FIELDS: [&'static str; 8] = [
        "t_reach",
        "reach_bound",
        "post_reach_sigma_sup",
        "decay_rate",
        "chattering_index",
        "sigma_defect",
        "reached",
        "within_bound",
    ];

    /// Values in the order of [`Metrics::FIELDS`]; absent values are empty.
    pub fn to_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            opt(self.t_reach),
            opt(self.reach_bound),
            opt(self.post_reach_sigma_sup),
            opt(self.decay_rate),
            opt(self.chattering_index),
            self.sigma_defect.to_string(),
            self.reached().to_string(),
            self.within_bound().map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

/// Least-squares rate `r` of `‖z‖ ≈ A e^{−r t}` over the samples with
/// `window.0 ≤ t ≤ window.1`.
pub fn fit_decay_rate(t: &[f64], norm: &[f64], window: (f64, f64)) -> Result<f64> {
    let mut n = 0usize;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for (k, (&tk, &zk)) in t.iter().zip(norm).enumerate() {
        if tk < window.0 || tk > window.1 {
            continue;
        }
        if !(zk > 0.0) {
            return Err(Error::NonPositiveNorm { index: k, value: zk });
        }
        let y = zk.ln();
        n += 1;
        st += tk;
        sy += y;
        stt += tk * tk;
        sty += tk * y;
    }
    if n < MIN_DECAY_SAMPLES {
        return Err(Error::WindowTooShort { samples: n, required: MIN_DECAY_SAMPLES });
    }
    let nf = n as f64;
    let denom = nf * stt - st * st;
    if !(denom > 0.0) {
        return Err(Error::WindowTooShort { samples: n, required: MIN_DECAY_SAMPLES });
    }
    Ok(-(nf * sty - st * sy) / denom)
}

/// Total variation of `u` per unit time over `window.0 ≤ t ≤ window.1`.
/// Zero when the window holds fewer than two samples.
pub fn chattering_index(t: &[f64], u: &[f64], window: (f64, f64)) -> f64 {
    let mut first = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut tv = 0.0;
    for (&tk, &uk) in t.iter().zip(u) {
        if tk < window.0 || tk > window.1 {
            continue;
        }
        if let Some((_, up)) = prev {
            tv += (uk - up).abs();
        } else {
            first = Some(tk);
        }
        prev = Some((tk, uk));
    }
    match (first, prev) {
        (Some(a), Some((b, _))) if b > a => tv / (b - a),
        _ => 0.0,
    }
}

/// Recomputes every metric from the series.
pub fn compute_metrics(s: &SeriesView<'_>, ctx: &MetricContext) -> Metrics {
    let n = s.t.len();
    let t_reach = detect_reaching_time(s.t, &[s.sigma], ctx.band, ctx.dwell);
    let t_end = s.t.last().copied().unwrap_or(0.0);

    let post_reach_sigma_sup =
        t_reach.map(|tr| s.t.iter().zip(s.sigma).filter(|(&t, _)| t >= tr).map(|(_, &x)| x.abs()).fold(0.0, f64::max));
    let decay_start = t_reach.unwrap_or(0.0) + ctx.decay_offset;
    let decay_rate = fit_decay_rate(s.t, s.norm_z, (decay_start, t_end)).ok();
    let chattering = t_reach.map(|tr| chattering_index(s.t, s.u, (tr, t_end)));

    let sigma_defect = (0..n.saturating_sub(1))
        .map(|k| {
            let fd = (s.sigma[k + 1] - s.sigma[k]) / ctx.dt;
            (fd - (ctx.lambda * s.sigma[k] + ctx.b_star_phi * (s.u[k] + s.disturbance[k]))).abs()
        })
        .fold(0.0, f64::max);

    Metrics {
        t_reach,
        reach_bound: ctx.reach_bound,
        post_reach_sigma_sup,
        decay_rate,
        chattering_index: chattering,
        sigma_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn exponential_decay_rate() {
        let t = times(1000, 1e-3);
        let z: Vec<f64> = t.iter().map(|&t| 3.0 * (-t).exp()).collect();
        assert!((fit_decay_rate(&t, &z, (0.0, 1.0)).unwrap() - 1.0).abs() < 1e-12);
        let c = vec![2.0; 1000];
        assert!(fit_decay_rate(&t, &c, (0.0, 1.0)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn decay_fit_errors() {
        let t = times(100, 0.1);
        let z = vec![1.0; 100];
        assert!(matches!(fit_decay_rate(&t, &z, (0.0, 0.5)), Err(Error::WindowTooShort { samples: 6, .. })));
        let mut bad = z.clone();
        bad[50] = 0.0;
        assert!(matches!(fit_decay_rate(&t, &bad, (0.0, 10.0)), Err(Error::NonPositiveNorm { index: 50, .. })));
    }

    #[test]
    fn alternating_control_chatters_at_full_rate() {
        let dt = 1e-4;
        let amp = 2.5 / 1.0114663656233298;
        let t = times(2001, dt);
        let u: Vec<f64> = (0..2001).map(|k| if k % 2 == 0 { amp } else { -amp }).collect();
        let ci = chattering_index(&t, &u, (0.0, 1.0));
        assert!((ci / (2.0 * amp / dt) - 1.0).abs() < 1e-9);
        assert_eq!(chattering_index(&t, &u, (5.0, 6.0)), 0.0);
        let smooth: Vec<f64> = t.to_vec();
        assert!((chattering_index(&t, &smooth, (0.0, 1.0)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn metrics_on_synthetic_series() {
        let dt = 1e-3;
        let t = times(3001, dt);
        let sigma: Vec<f64> = t.iter().map(|&x| (1.0 - x).max(0.0)).collect();
        let u = vec![0.0; t.len()];
        let norm: Vec<f64> = t.iter().map(|&x| (-0.5 * x).exp()).collect();
        let dist = vec![0.0; t.len()];
        let s = SeriesView { t: &t, sigma: &sigma, u: &u, norm_z: &norm, disturbance: &dist };
        let ctx = MetricContext {
            lambda: 0.0,
            b_star_phi: 1.0,
            dt,
            band: 1e-3,
            dwell: 0.05,
            decay_offset: 0.2,
            reach_bound: Some(1.5),
        };
        let m = compute_metrics(&s, &ctx);
        let tr = m.t_reach.unwrap();
        assert!((tr - 0.999).abs() < 2e-3);
        assert_eq!(m.within_bound(), Some(true));
        assert!(m.post_reach_sigma_sup.unwrap() <= 1e-3);
        assert!((m.decay_rate.unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(m.chattering_index, Some(0.0));
        assert!((m.sigma_defect - 1.0).abs() < 1e-6);
        assert_eq!(m.to_record().len(), Metrics::FIELDS.len());
    }

    #[test]
    fn unreached_run_has_no_post_reach_metrics() {
        let t = times(100, 0.01);
        let sigma = vec![1.0; 100];
        let zeros = vec![0.0; 100];
        let ones = vec![1.0; 100];
        let s = SeriesView { t: &t, sigma: &sigma, u: &zeros, norm_z: &ones, disturbance: &zeros };
        let ctx = MetricContext {
            lambda: 0.0,
            b_star_phi: 1.0,
            dt: 0.01,
            band: 1e-3,
            dwell: 0.05,
            decay_offset: 0.2,
            reach_bound: None,
        };
        let m = compute_metrics(&s, &ctx);
        assert!(!m.reached());
        assert_eq!(m.within_bound(), None);
        assert_eq!(m.post_reach_sigma_sup, None);
        assert_eq!(m.chattering_index, None);
        let rec = m.to_record();
        assert_eq!(rec[0], "");
        assert_eq!(rec[6], "false");
    }
}
