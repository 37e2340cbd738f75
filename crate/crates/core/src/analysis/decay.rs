use crate::error::{Error, Result};
use crate::integrator::Trajectory;

use super::inequalities::{nakao_constants, optimal_delta};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub t_start: f64,
    pub t_end: f64,
    /// `−slope` of the least-squares line through `(t, ln E)` on the window.
    pub beta_hat: f64,
    pub r2: f64,
    /// Rate guaranteed by the Nakao constants at the optimal δ.
    pub beta_paper: f64,
    pub delta_used: f64,
    /// `E(t) ≤ E(0)e^{−β̂t}(1 + fit_tol)` throughout the window.
    pub envelope_ok: bool,
}

impl DecayFit {
    /// Whether the measured rate is slower than the guaranteed one.
    pub fn slower_than_guaranteed(&self) -> bool {
        self.beta_hat < self.beta_paper
    }
}

/// Fits the continuous energy `E` of a trajectory on its trailing
/// `window_fraction`.
pub fn fit_decay(traj: &Trajectory, window_fraction: f64, fit_tol: f64) -> Result<DecayFit> {
    fit_decay_series(
        &traj.times(),
        &traj.series(|r| r.e),
        window_fraction,
        fit_tol,
        traj.config.gamma,
    )
}

pub fn fit_decay_series(
    times: &[f64],
    energy: &[f64],
    window_fraction: f64,
    fit_tol: f64,
    gamma: f64,
) -> Result<DecayFit> {
    if times.len() != energy.len() || times.len() < 2 {
        return Err(Error::Fit("need at least two (t, E) samples".into()));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Fit(format!(
            "window fraction must lie in (0, 1], got {window_fraction}"
        )));
    }
    let (t0, t_end) = (times[0], times[times.len() - 1]);
    let t_start = t_end - window_fraction * (t_end - t0);
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(energy)
        .filter(|(t, _)| **t >= t_start - 1e-12 * t_end.abs().max(1.0))
        .map(|(t, e)| (*t, *e))
        .collect();
    if window.len() < 2 {
        return Err(Error::Fit("window holds fewer than two samples".into()));
    }
    if let Some((t, e)) = window.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::Fit(format!("non-positive energy {e} at t = {t}")));
    }
    if !(energy[0] > 0.0) {
        return Err(Error::Fit(format!(
            "non-positive initial energy {}",
            energy[0]
        )));
    }

    let n = window.len() as f64;
    let mean_t = window.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_y = window.iter().map(|(_, e)| e.ln()).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (t, e) in &window {
        let (dt, dy) = (t - mean_t, e.ln() - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    let slope = sty / stt;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sty * sty / (stt * syy)).clamp(0.0, 1.0)
    };
    let beta_hat = -slope;
    let e0 = energy[0];
    let envelope_ok = window
        .iter()
        .all(|(t, e)| *e <= e0 * (-beta_hat * (t - t0)).exp() * (1.0 + fit_tol));

    let delta = optimal_delta(gamma)?.delta;
    let constants = nakao_constants(delta, gamma)?;
    Ok(DecayFit {
        t_start: window[0].0,
        t_end,
        beta_hat,
        r2,
        beta_paper: constants.beta,
        delta_used: delta,
        envelope_ok,
    })
}

/// Values at the integer times `0, 1, …, ⌊t_end⌋`, linearly interpolated.
pub fn unit_samples(times: &[f64], values: &[f64]) -> Vec<f64> {
    if times.is_empty() {
        return vec![];
    }
    let t_end = times[times.len() - 1];
    let mut out = vec![];
    let mut k = 0usize;
    let mut j = 0usize;
    while (k as f64) <= t_end + 1e-9 {
        let t = k as f64;
        while j + 1 < times.len() && times[j + 1] < t {
            j += 1;
        }
        let v = if j + 1 >= times.len() || times[j] >= t {
            values[j]
        } else {
            let theta = (t - times[j]) / (times[j + 1] - times[j]);
            values[j] + theta.min(1.0) * (values[j + 1] - values[j])
        };
        out.push(v);
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
    }

    #[test]
    fn exact_exponential() {
        let t = grid(400, 20.0);
        let e: Vec<f64> = t.iter().map(|t| 2.0 * (-0.5 * t).exp()).collect();
        let fit = fit_decay_series(&t, &e, 0.5, 0.05, 0.5).unwrap();
        assert!((fit.beta_hat - 0.5).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.envelope_ok);
        assert_eq!(fit.t_start, 10.0);
        assert!((fit.delta_used - 0.058).abs() < 1e-3);
    }

    #[test]
    fn modulated_exponential() {
        let t = grid(2000, 40.0);
        let e: Vec<f64> = t
            .iter()
            .map(|t| 2.0 * (-0.5 * t).exp() * (1.0 + 0.01 * t.sin()))
            .collect();
        let fit = fit_decay_series(&t, &e, 0.5, 0.05, 0.5).unwrap();
        assert!(fit.beta_hat >= 0.48 && fit.beta_hat <= 0.52);
        assert!(fit.r2 >= 0.99);
    }

    #[test]
    fn zero_energy_is_a_fit_error() {
        let t = grid(10, 1.0);
        assert!(matches!(
            fit_decay_series(&t, &[0.0; 11], 0.5, 0.05, 0.5),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn unit_sampling_interpolates() {
        let t = grid(30, 3.0);
        let v: Vec<f64> = t.iter().map(|t| 2.0 * t + 1.0).collect();
        let s = unit_samples(&t, &v);
        assert_eq!(s.len(), 4);
        for (k, x) in s.iter().enumerate() {
            assert!((x - (2.0 * k as f64 + 1.0)).abs() < 1e-12);
        }
        let t = vec![0.0, 0.3, 0.9, 1.4];
        let v = vec![0.0, 3.0, 9.0, 14.0];
        assert!((unit_samples(&t, &v)[1] - 10.0).abs() < 1e-12);
    }
}
