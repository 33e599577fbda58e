//! Finite-length scaling: variance and covariance estimation around
//! critical points, scaling-parameter extraction, and block-error
//! probability prediction for uncoupled and coupled ensembles.

use crate::peeling::TrajectoryRecord;
use crate::scalar::{real, Real};
use crate::{Error, Result};

/// Fitted scaling parameters of one ensemble.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit<F> {
    /// Peeling threshold of the expected evolution.
    pub eps_star: F,
    /// Dimensionless scaling parameter.
    pub alpha: F,
    /// Covariance decay rate per unit rescaled time.
    pub theta: F,
    /// Expected decodable fraction at the critical point.
    pub a_crit: F,
    /// Monte Carlo variance of the decodable fraction there.
    pub variance: F,
}

/// Standard Gaussian CDF.
pub fn gaussian_cdf<F: Real>(z: F) -> F {
    let sqrt2 = real::<F>(std::f64::consts::SQRT_2);
    real::<F>(0.5) * (-z / sqrt2).erfc_via_f64()
}

/// Standard Gaussian tail Q(z) = 1 - Phi(z).
pub fn gaussian_tail<F: Real>(z: F) -> F {
    let sqrt2 = real::<F>(std::f64::consts::SQRT_2);
    real::<F>(0.5) * (z / sqrt2).erfc_via_f64()
}

/// Sample variance of a(tau*) across the trajectories that survive to
/// tau*; requires at least two survivors.
pub fn variance_at_critical(trajectories: &[TrajectoryRecord], tau_star: f64) -> Result<f64> {
    let values: Vec<f64> = trajectories
        .iter()
        .filter_map(|t| t.a_at(tau_star))
        .collect();
    if values.len() < 2 {
        return Err(Error::InsufficientSurvivors(values.len()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var)
}

/// Scaling parameter from the critical ratio:
/// `alpha = a_crit / (sqrt(var) sqrt(scale) (eps_star - eps))`, where
/// `scale` is the block length for uncoupled ensembles and the lifting
/// factor for coupled ones.
pub fn estimate_alpha<F: Real>(
    a_crit: F,
    variance: F,
    scale: F,
    eps: F,
    eps_star: F,
) -> Result<F> {
    if variance <= F::zero() {
        return Err(Error::DegenerateScaling("variance must be positive".into()));
    }
    if eps >= eps_star {
        return Err(Error::DegenerateScaling(
            "alpha extraction needs eps < eps_star".into(),
        ));
    }
    Ok(a_crit / (variance.sqrt() * scale.sqrt() * (eps_star - eps)))
}

/// Empirical covariance of a(t) against the reference time `xi`,
/// normalized by the variance at `xi`, over the trajectories that
/// survive the whole window.
///
/// Times are in the caller's units (`TrajectoryRecord` stores
/// iterations over n; coupled-ensemble fits rescale by the coupling
/// length before fitting).
pub fn normalized_covariance(
    trajectories: &[TrajectoryRecord],
    taus: &[f64],
    xi: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    'traj: for t in trajectories {
        let mut row = Vec::with_capacity(taus.len() + 1);
        for &tau in taus.iter().chain(std::iter::once(&xi)) {
            match t.a_at(tau) {
                Some(a) => row.push(a),
                None => continue 'traj,
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::InsufficientSurvivors(rows.len()));
    }
    let n = rows.len() as f64;
    let cols = taus.len() + 1;
    let mut means = vec![0.0f64; cols];
    for row in &rows {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let xi_idx = cols - 1;
    let var_xi = rows
        .iter()
        .map(|r| (r[xi_idx] - means[xi_idx]).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    if var_xi <= 0.0 {
        return Err(Error::DegenerateScaling(
            "zero variance at the reference time".into(),
        ));
    }
    let mut out = Vec::with_capacity(taus.len());
    for (j, &tau) in taus.iter().enumerate() {
        let cov = rows
            .iter()
            .map(|r| (r[j] - means[j]) * (r[xi_idx] - means[xi_idx]))
            .sum::<f64>()
            / (n - 1.0);
        out.push((tau, cov / var_xi));
    }
    Ok(out)
}

/// Least-squares fit of `exp(-theta |t - xi|)` to normalized
/// covariance samples `(t, c)` around the reference `xi`.
pub fn fit_theta(samples: &[(f64, f64)], xi: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::FitFailed("need at least two covariance samples".into()));
    }
    let loss = |theta: f64| -> f64 {
        samples
            .iter()
            .map(|&(t, c)| ((-theta * (t - xi).abs()).exp() - c).powi(2))
            .sum()
    };
    // Golden-section on log(theta).
    let (mut lo, mut hi) = (-8.0f64, 8.0f64);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (loss(x1.exp()), loss(x2.exp()));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = loss(x1.exp());
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = loss(x2.exp());
        }
    }
    let theta = (0.5 * (lo + hi)).exp();
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::FitFailed(format!("non-positive decay rate {theta}")));
    }
    Ok(theta)
}

/// Block-error estimate for an uncoupled ensemble of length `n`:
/// `Q(alpha sqrt(n) (eps_star - eps))`.
pub fn predict_bler_block<F: Real>(n: usize, eps: F, eps_star: F, alpha: F) -> F {
    gaussian_tail(alpha * real::<F>(n as f64).sqrt() * (eps_star - eps))
}

/// Block-error estimate for a terminated coupled ensemble:
/// `1 - exp(-eps L / ((2 pi / theta) I))` with
/// `I = integral_0^{alpha sqrt(M) (eps_star - eps)} Phi(z) exp(z^2/2) dz`.
pub fn predict_bler_sc<F: Real>(
    m: usize,
    coupling_len: usize,
    eps: F,
    eps_star: F,
    alpha: F,
    theta: F,
) -> F {
    let z_max = alpha * real::<F>(m as f64).sqrt() * (eps_star - eps);
    let z64 = z_max.to_f64().unwrap_or(0.0);
    if z64 <= 0.0 {
        // Vanishing integral: certain failure in this regime.
        return F::one();
    }
    // exp(z^2/2) overflows past ~38; the survival probability is
    // already indistinguishable from one there.
    if z64 > 37.0 {
        return F::zero();
    }
    let integral = phi_exp_integral(z64, 1e-12);
    let eps_l = eps * real::<F>(coupling_len as f64);
    let denom = real::<F>(2.0 * std::f64::consts::PI) / theta * real::<F>(integral);
    let exponent = -(eps_l / denom);
    F::one() - exponent.exp()
}

/// Quadrature of `Phi(z) exp(z^2/2)` on `[0, z_max]`: composite
/// Simpson with node doubling until the relative change is below
/// `rel_tol`.
pub fn phi_exp_integral(z_max: f64, rel_tol: f64) -> f64 {
    let f = |z: f64| -> f64 {
        let phi = 0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2);
        phi * (0.5 * z * z).exp()
    };
    let composite = |n: usize| -> f64 {
        let h = z_max / n as f64;
        let mut sum = f(0.0) + f(z_max);
        for i in 1..n {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += weight * f(i as f64 * h);
        }
        sum * h / 3.0
    };
    let mut n = 64usize;
    let mut prev = composite(n);
    while n < (1 << 22) {
        n *= 2;
        let next = composite(n);
        if (next - prev).abs() <= rel_tol * next.abs() {
            return next;
        }
        prev = next;
    }
    prev
}
