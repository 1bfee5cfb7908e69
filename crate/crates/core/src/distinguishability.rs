//! Distinguishability functions over the symmetric group and the
//! indistinguishability probability `d_s`.
//!
//! Time-unresolved detection weighs each permutation `σ` by
//! `J(σ) = Π_n Tr(ρⁿ)^{C_n(σ)}`. Time-resolved detection at times `t` uses the
//! raw function `𝒥(t;σ) = Π_k ⟨t_k|ρ|t_{σ(k)}⟩` or its normalized form
//! `J̃(t;σ) = 𝒥(t;σ)/p(t) = exp(-η² Σ_k (t_k - t_{σ(k)})² / S)`.
//!
//! `d_s` is the group average of `J`, and equally the average over `t ~ p(t)`
//! of `λ(t)`, the group average of `J̃(t; ·)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::glynn;
use crate::permgroup::{factorial, z_fixed_point_sum, Permutation, MAX_GROUP_ORDER_N};
use crate::photon_model::{purity_approx, purity_order_n, GaussianModel, TimeSampler, TimeTuple};
use crate::stats::McEstimate;

use num_complex::Complex64;

/// Largest photon number accepted by [`DistFunctionB::ds_monte_carlo`].
pub const MAX_MONTE_CARLO_N: usize = 8;

/// Smallest sample count accepted by [`DistFunctionB::ds_monte_carlo`].
pub const MIN_MONTE_CARLO_SAMPLES: usize = 100;

/// How the cycle weights `Tr(ρⁿ)` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PurityMode {
    /// Closed-form higher-order purities.
    #[default]
    Exact,
    /// `Tr(ρⁿ) ≈ exp(-nη²)`.
    Approx,
}

/// `J(σ)` for time-unresolved detection.
#[derive(Debug, Clone, Copy)]
pub struct DistFunctionA<'a> {
    model: &'a GaussianModel,
    mode: PurityMode,
}

impl<'a> DistFunctionA<'a> {
    pub fn new(model: &'a GaussianModel) -> Self {
        Self::with_mode(model, PurityMode::Exact)
    }

    pub fn with_mode(model: &'a GaussianModel, mode: PurityMode) -> Self {
        Self { model, mode }
    }

    pub fn model(&self) -> &GaussianModel {
        self.model
    }

    pub fn mode(&self) -> PurityMode {
        self.mode
    }

    /// Weight of a single `n`-cycle: `Tr(ρⁿ)` or its exponential approximation.
    pub fn cycle_weight(&self, n: usize) -> Result<f64> {
        cycle_weight(self.model.eta(), n, self.mode)
    }

    /// `weights[n]` for `n = 0..=N`; index 0 is unused and set to 1.
    pub(crate) fn cycle_weights(&self) -> Result<Vec<f64>> {
        let mut w = vec![1.0];
        for n in 1..=self.model.n_photons() {
            w.push(self.cycle_weight(n)?);
        }
        Ok(w)
    }

    /// `J(σ) = Π_{n ≥ 2} Tr(ρⁿ)^{C_n(σ)}`.
    pub fn j_a(&self, sigma: &Permutation) -> Result<f64> {
        check_degree(sigma, self.model.n_photons())?;
        let e2 = self.model.eta().powi(2);
        match self.mode {
            PurityMode::Approx => {
                let moved = sigma.len() - sigma.fixed_points();
                Ok((-e2 * moved as f64).exp())
            }
            PurityMode::Exact => {
                let mut value = 1.0;
                for (n, count) in sigma.cycle_type().iter() {
                    if n >= 2 {
                        value *= purity_order_n(self.model.eta(), n)?.powi(count as i32);
                    }
                }
                Ok(value)
            }
        }
    }

    /// `(1/N!) Σ_σ J(σ)` in this function's purity mode.
    pub fn group_average(&self) -> Result<f64> {
        let n = self.model.n_photons();
        if n > MAX_GROUP_ORDER_N {
            return Err(Error::size(
                "photon number for exact d_s",
                n,
                MAX_GROUP_ORDER_N,
            ));
        }
        cycle_index(&self.cycle_weights()?, n)
    }
}

/// `J(σ)` precomputed for every element of a group listing.
pub(crate) fn j_a_table(df: &DistFunctionA<'_>, perms: &[Permutation]) -> Result<Vec<f64>> {
    let weights = df.cycle_weights()?;
    Ok(perms
        .iter()
        .map(|p| {
            p.cycle_type()
                .iter()
                .map(|(n, c)| weights[n].powi(c as i32))
                .product()
        })
        .collect())
}

fn cycle_weight(eta: f64, n: usize, mode: PurityMode) -> Result<f64> {
    match mode {
        PurityMode::Exact => purity_order_n(eta, n),
        PurityMode::Approx if n == 0 => {
            Err(Error::Domain("cycle length must be at least 1".into()))
        }
        PurityMode::Approx if n == 1 => Ok(1.0),
        PurityMode::Approx => Ok(purity_approx(eta, n)),
    }
}

/// Group average `(1/N!) Σ_σ Π_cycles w_len` through the cycle-index recurrence
/// `Z_m = (1/m) Σ_{k=1}^{m} w_k Z_{m-k}`. `weights[k]` for `k = 1..=n`.
fn cycle_index(weights: &[f64], n: usize) -> Result<f64> {
    let mut z = vec![1.0; n + 1];
    for m in 1..=n {
        let s: f64 = (1..=m).map(|k| weights[k] * z[m - k]).sum();
        z[m] = s / m as f64;
    }
    Ok(z[n])
}

fn check_degree(sigma: &Permutation, n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::Dimension(format!(
            "permutation of {} elements for {n} photons",
            sigma.len()
        )));
    }
    Ok(())
}

/// `d_s = (1/N!) Σ_σ J(σ)` with closed-form purities, `N ≤ 10`.
pub fn ds_exact(df: &DistFunctionA<'_>) -> Result<f64> {
    DistFunctionA::new(df.model).group_average()
}

/// Exact `d_s` for `N` photons with relative arrival uncertainty `eta`, without
/// the group-size limit. Sums over cycle types instead of group elements.
pub fn ds_cycle_index(n_photons: usize, eta: f64, mode: PurityMode) -> Result<f64> {
    if n_photons == 0 {
        return Err(Error::Domain("at least one photon is required".into()));
    }
    let mut w = vec![1.0];
    for n in 1..=n_photons {
        w.push(cycle_weight(eta, n, mode)?);
    }
    cycle_index(&w, n_photons)
}

/// `d_s ≈ exp(-η²N) Σ_{n=0}^{N} (e^{η²} - 1)ⁿ / n!`, valid for any `N`.
pub fn ds_closed_form(n_photons: usize, eta: f64) -> f64 {
    let e2 = eta * eta;
    (-e2 * n_photons as f64).exp() * z_fixed_point_sum(n_photons, e2.exp())
}

/// Time-resolved distinguishability functions.
#[derive(Debug, Clone, Copy)]
pub struct DistFunctionB<'a> {
    model: &'a GaussianModel,
}

impl<'a> DistFunctionB<'a> {
    pub fn new(model: &'a GaussianModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &GaussianModel {
        self.model
    }

    /// `Σ_k (t_k - t_{σ(k)})² / S`.
    fn exchange_exponent(&self, t: &TimeTuple, sigma: &Permutation) -> Result<f64> {
        let n = self.model.n_photons();
        t.check_len(n)?;
        check_degree(sigma, n)?;
        let s = self.model.spread_variance();
        Ok((0..n)
            .map(|k| {
                let d = t[k] - t[sigma.apply(k)];
                d * d
            })
            .sum::<f64>()
            / s)
    }

    /// `𝒥(t;σ) = (πS)^{-N/2} exp(-Σ t_k²/S - η² Σ (t_k - t_{σ(k)})²/S)`.
    pub fn j_b_raw(&self, t: &TimeTuple, sigma: &Permutation) -> Result<f64> {
        let exchange = self.exchange_exponent(t, sigma)?;
        let s = self.model.spread_variance();
        let n = self.model.n_photons() as f64;
        let square: f64 = t.as_slice().iter().map(|x| x * x).sum::<f64>() / s;
        let e2 = self.model.eta().powi(2);
        Ok((std::f64::consts::PI * s).powf(-n / 2.0) * (-square - e2 * exchange).exp())
    }

    /// `J̃(t;σ) = 𝒥(t;σ)/p(t) = exp(-η² Σ (t_k - t_{σ(k)})²/S)`.
    ///
    /// Fails with a numeric-range error where `p(t)` underflows.
    pub fn j_b_proper(&self, t: &TimeTuple, sigma: &Permutation) -> Result<f64> {
        let exchange = self.exchange_exponent(t, sigma)?;
        let density = crate::photon_model::time_density(self.model, t)?;
        if density < f64::MIN_POSITIVE {
            return Err(Error::NumericRange(format!(
                "detection-time density underflows at t = {:?}",
                t.as_slice()
            )));
        }
        Ok((-self.model.eta().powi(2) * exchange).exp())
    }

    /// `D_jk = exp(-η² (t_j - t_k)²/S)`, row-major.
    pub(crate) fn pair_weights(&self, t: &[f64]) -> Vec<f64> {
        pair_weights(self.model, t)
    }

    /// `λ(t) = (1/N!) Σ_σ J̃(t;σ)`, evaluated as `per(D)/N!`.
    pub fn lambda_t(&self, t: &TimeTuple) -> Result<f64> {
        let n = self.model.n_photons();
        if n > MAX_GROUP_ORDER_N {
            return Err(Error::size("photon number", n, MAX_GROUP_ORDER_N));
        }
        t.check_len(n)?;
        if n == 1 || self.model.eta() == 0.0 {
            return Ok(1.0);
        }
        let d: Vec<Complex64> = self
            .pair_weights(t.as_slice())
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect();
        Ok(glynn(&d, n).re / factorial(n))
    }

    /// Mean of `λ(t)` over `t ~ p(t)` with its standard error.
    pub fn ds_monte_carlo(&self, seed: u64, samples: usize) -> Result<McEstimate> {
        let n = self.model.n_photons();
        if n > MAX_MONTE_CARLO_N {
            return Err(Error::size(
                "photon number for Monte-Carlo d_s",
                n,
                MAX_MONTE_CARLO_N,
            ));
        }
        if samples < MIN_MONTE_CARLO_SAMPLES {
            return Err(Error::Domain(format!(
                "at least {MIN_MONTE_CARLO_SAMPLES} samples are required, got {samples}"
            )));
        }
        let sampler = TimeSampler::new(self.model)?;
        let values = (0..samples as u64)
            .into_par_iter()
            .map(|i| self.lambda_t(&sampler.draw(seed, i)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(McEstimate::from_samples(&values))
    }
}

pub(crate) fn pair_weights(model: &GaussianModel, t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let scale = model.eta().powi(2) / model.spread_variance();
    let mut d = vec![1.0; n * n];
    for j in 0..n {
        for k in j + 1..n {
            let diff = t[j] - t[k];
            let w = (-scale * diff * diff).exp();
            d[j * n + k] = w;
            d[k * n + j] = w;
        }
    }
    d
}
