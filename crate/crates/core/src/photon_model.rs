//! Gaussian single photons with Gaussian-distributed arrival times.
//!
//! Every photon has pulse width `T` and an arrival time drawn from a
//! centred Gaussian with standard deviation `Δτ`. The relative arrival-time
//! uncertainty is `η = Δτ / (2T)`. Photons share `(T, Δτ)` and may differ
//! in central frequency `Ω_k`.
//!
//! Time-basis matrix element of the internal state (obtained by integrating
//! the pure pulse over the arrival-time distribution):
//!
//! ```text
//! ⟨t|ρ|t'⟩ = (π S)^{-1/2} exp(-(t² + t'²) / (2S) - η² (t - t')² / S),   S = T² + Δτ²
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{circulant_det, CirculantSpec};
use crate::stats::sample_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    pulse_width: f64,
    arrival_spread: f64,
    frequencies: Vec<f64>,
}

impl GaussianModel {
    pub fn new(pulse_width: f64, arrival_spread: f64, frequencies: Vec<f64>) -> Result<Self> {
        if !(pulse_width.is_finite() && pulse_width > 0.0) {
            return Err(Error::Domain(format!(
                "pulse width must be positive, got {pulse_width}"
            )));
        }
        if !(arrival_spread.is_finite() && arrival_spread >= 0.0) {
            return Err(Error::Domain(format!(
                "arrival-time spread must be non-negative, got {arrival_spread}"
            )));
        }
        if frequencies.is_empty() {
            return Err(Error::Domain("at least one photon is required".into()));
        }
        if frequencies.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("central frequencies must be finite".into()));
        }
        if !(arrival_spread / (2.0 * pulse_width)).is_finite() {
            return Err(Error::Domain(
                "relative arrival uncertainty is not finite".into(),
            ));
        }
        Ok(Self {
            pulse_width,
            arrival_spread,
            frequencies,
        })
    }

    /// `n` photons at a common central frequency (taken as zero).
    pub fn uniform(n_photons: usize, pulse_width: f64, arrival_spread: f64) -> Result<Self> {
        Self::new(pulse_width, arrival_spread, vec![0.0; n_photons])
    }

    /// `T = 1` model with `Δτ = 2η`.
    pub fn from_eta(n_photons: usize, eta: f64) -> Result<Self> {
        Self::uniform(n_photons, 1.0, 2.0 * eta)
    }

    #[inline]
    pub fn n_photons(&self) -> usize {
        self.frequencies.len()
    }

    #[inline]
    pub fn pulse_width(&self) -> f64 {
        self.pulse_width
    }

    #[inline]
    pub fn arrival_spread(&self) -> f64 {
        self.arrival_spread
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `η = Δτ / (2T)`.
    #[inline]
    pub fn eta(&self) -> f64 {
        eta(self)
    }

    /// `S = T² + Δτ²`, the squared width of the averaged pulse.
    #[inline]
    pub fn spread_variance(&self) -> f64 {
        self.pulse_width * self.pulse_width + self.arrival_spread * self.arrival_spread
    }

    /// Pure photons (`Δτ = 0`).
    pub fn is_pure(&self) -> bool {
        self.arrival_spread == 0.0
    }

    pub fn to_config(&self, seed: Option<u64>) -> ModelConfig {
        ModelConfig {
            n: self.n_photons(),
            t: self.pulse_width,
            dtau: self.arrival_spread,
            omega: self.frequencies.clone(),
            seed,
        }
    }
}

/// JSON form `{"N": int, "T": real, "dtau": real, "omega": [reals], "seed": int}`.
///
/// `omega` may be omitted (all zero); `seed` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub dtau: f64,
    #[serde(default)]
    pub omega: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TryFrom<&ModelConfig> for GaussianModel {
    type Error = Error;

    fn try_from(c: &ModelConfig) -> Result<Self> {
        let omega = if c.omega.is_empty() {
            vec![0.0; c.n]
        } else if c.omega.len() == c.n {
            c.omega.clone()
        } else {
            return Err(Error::Config(format!(
                "omega has {} entries for N = {}",
                c.omega.len(),
                c.n
            )));
        };
        GaussianModel::new(c.t, c.dtau, omega)
    }
}

/// Detection times `(t_1, …, t_N)`, in the same units as `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTuple(Vec<f64>);

impl TimeTuple {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("detection times must be finite".into()));
        }
        Ok(Self(times))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::Dimension(format!(
                "{} detection times for {n} photons",
                self.len()
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for TimeTuple {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

pub fn eta(model: &GaussianModel) -> f64 {
    model.arrival_spread / (2.0 * model.pulse_width)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::Domain(format!(
            "eta must be finite and non-negative, got {eta}"
        )));
    }
    Ok(())
}

/// `(X₊², X₋²)` with `X±² = ½(1 ± √(1+4η²)/(1+2η²))`.
///
/// `X₋²` is evaluated as `2η⁴ / (a(a + s))`, `a = 1+2η²`, `s = √(1+4η²)`,
/// which avoids the cancellation in `1 - s/a` for small `η`.
pub fn x_squared(eta: f64) -> (f64, f64) {
    let e2 = eta * eta;
    let a = 1.0 + 2.0 * e2;
    let s = (1.0 + 4.0 * e2).sqrt();
    let minus = 2.0 * e2 * e2 / (a * (a + s));
    (1.0 - minus, minus)
}

/// Higher-order purity `Tr(ρⁿ) = (1+2η²)^{-n/2} (X₊ⁿ - X₋ⁿ)^{-1}`.
pub fn purity_order_n(eta: f64, n: usize) -> Result<f64> {
    check_eta(eta)?;
    if n == 0 {
        return Err(Error::Domain("purity order must be at least 1".into()));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let half_n = n as f64 / 2.0;
    let (xp2, xm2) = x_squared(eta);
    // X₊ⁿ - X₋ⁿ = X₊ⁿ (1 - (X₋/X₊)ⁿ)
    let ratio_n = (xm2 / xp2).powf(half_n);
    let ln_diff = half_n * xp2.ln() + (-ratio_n).ln_1p();
    let ln_purity = -half_n * (2.0 * eta * eta).ln_1p() - ln_diff;
    Ok(ln_purity.exp())
}

/// Exponential approximation `Tr(ρⁿ) ≈ exp(-n η²)`.
pub fn purity_approx(eta: f64, n: usize) -> f64 {
    (-(n as f64) * eta * eta).exp()
}

/// Generator of the circulant quadratic form whose determinant gives
/// `Tr(ρⁿ) = 1/√det A`.
///
/// Diagonal `1+2η²`, nearest neighbours (cyclically) `-η²`. For `n = 2` both
/// neighbours coincide and merge into a single `-2η²`; for `n = 1` the form is
/// the identity.
pub fn purity_circulant(eta: f64, n: usize) -> Result<CirculantSpec> {
    check_eta(eta)?;
    let e2 = eta * eta;
    let a = match n {
        0 => return Err(Error::Domain("purity order must be at least 1".into())),
        1 => vec![1.0],
        2 => vec![1.0 + 2.0 * e2, -2.0 * e2],
        _ => {
            let mut a = vec![0.0; n];
            a[0] = 1.0 + 2.0 * e2;
            a[1] = -e2;
            a[n - 1] = -e2;
            a
        }
    };
    CirculantSpec::new(a)
}

/// `Tr(ρⁿ)` through the circulant determinant.
pub fn purity_via_circulant(eta: f64, n: usize) -> Result<f64> {
    Ok(1.0 / circulant_det(&purity_circulant(eta, n)?).sqrt())
}

/// `⟨t|ρ|t'⟩` for the model's common internal state; real and symmetric.
pub fn rho_kernel(model: &GaussianModel, t: f64, t_prime: f64) -> f64 {
    let s = model.spread_variance();
    let e = model.eta();
    let d = t - t_prime;
    (PI * s).sqrt().recip() * (-(t * t + t_prime * t_prime) / (2.0 * s) - e * e * d * d / s).exp()
}

/// Averaged pulse `χ_k(t) = (πS)^{-1/4} exp(-iΩ_k t - t²/(2S))`, `photon` 0-based.
pub fn chi(model: &GaussianModel, photon: usize, t: f64) -> Result<Complex64> {
    let omega = *model.frequencies.get(photon).ok_or(Error::OutOfRange {
        what: "photon",
        index: photon,
        bound: model.n_photons(),
    })?;
    let s = model.spread_variance();
    let modulus = (PI * s).powf(-0.25) * (-t * t / (2.0 * s)).exp();
    Ok(Complex64::from_polar(modulus, -omega * t))
}

/// `|χ(t)|²`, identical for every photon.
#[inline]
pub(crate) fn marginal_density(model: &GaussianModel, t: f64) -> f64 {
    let s = model.spread_variance();
    (PI * s).sqrt().recip() * (-t * t / s).exp()
}

/// `p(t) = Π_k |χ_k(t_k)|²`.
pub fn time_density(model: &GaussianModel, t: &TimeTuple) -> Result<f64> {
    t.check_len(model.n_photons())?;
    Ok(t.as_slice()
        .iter()
        .map(|&tk| marginal_density(model, tk))
        .product())
}

/// Draws detection-time tuples from `p(t)`: every coordinate is `N(0, S/2)`.
///
/// Sample `index` uses its own random stream, so results do not depend on
/// the order or thread in which samples are drawn.
#[derive(Debug, Clone)]
pub(crate) struct TimeSampler {
    normal: Normal<f64>,
    n_photons: usize,
}

impl TimeSampler {
    pub(crate) fn new(model: &GaussianModel) -> Result<Self> {
        let sd = (model.spread_variance() / 2.0).sqrt();
        let normal = Normal::new(0.0, sd).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(Self {
            normal,
            n_photons: model.n_photons(),
        })
    }

    pub(crate) fn draw(&self, seed: u64, index: u64) -> TimeTuple {
        let mut rng = sample_rng(seed, index);
        TimeTuple(
            (0..self.n_photons)
                .map(|_| self.normal.sample(&mut rng))
                .collect(),
        )
    }
}

/// `count` i.i.d. draws from `p(t)`, deterministic per `(seed, sample index)`.
pub fn sample_times(model: &GaussianModel, seed: u64, count: usize) -> Result<Vec<TimeTuple>> {
    if count == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let sampler = TimeSampler::new(model)?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| sampler.draw(seed, i))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(t: f64, dtau: f64, n: usize) -> GaussianModel {
        GaussianModel::uniform(n, t, dtau).unwrap()
    }

    /// Trapezoid rule on a wide uniform grid; spectrally accurate for Gaussians.
    fn integrate(f: impl Fn(f64) -> f64, half_width: f64, points: usize) -> f64 {
        let h = 2.0 * half_width / (points - 1) as f64;
        (0..points)
            .map(|i| f(-half_width + i as f64 * h))
            .sum::<f64>()
            * h
    }

    #[test]
    fn eta_examples() {
        assert_eq!(model(1.0, 0.0, 1).eta(), 0.0);
        assert!((model(1.0, 0.2, 1).eta() - 0.1).abs() < 1e-15);
        assert!((model(2.0, 0.4, 1).eta() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn model_validation() {
        assert!(GaussianModel::uniform(2, 0.0, 0.1).is_err());
        assert!(GaussianModel::uniform(2, 1.0, -0.1).is_err());
        assert!(GaussianModel::uniform(0, 1.0, 0.1).is_err());
        assert!(GaussianModel::new(1.0, 0.1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn purity_examples() {
        for n in 1..10 {
            assert_eq!(purity_order_n(0.0, n).unwrap(), 1.0);
        }
        assert!((purity_order_n(0.1, 2).unwrap() - 0.980_580_675_690_920_2).abs() < 1e-15);
        // mpmath, 30 digits
        assert!((purity_order_n(0.1, 3).unwrap() - 0.970_873_786_407_767).abs() < 1e-15);
        assert!((purity_order_n(0.1, 5).unwrap() - 0.951_927_653_498_334_1).abs() < 1e-15);
        assert!(matches!(purity_order_n(0.1, 0), Err(Error::Domain(_))));
        assert!(purity_order_n(-0.1, 2).is_err());
    }

    #[test]
    fn x_identities() {
        for eta in [0.0, 1e-4, 0.05, 0.1, 0.5, 3.0, 50.0] {
            let (p, m) = x_squared(eta);
            let e2: f64 = eta * eta;
            assert!((p + m - 1.0).abs() < 1e-15);
            let expected = (1.0 + 4.0 * e2).sqrt() / (1.0 + 2.0 * e2);
            assert!((p - m - expected).abs() < 1e-14, "eta={eta}");
        }
    }

    #[test]
    fn purity_two_closed_form() {
        for eta in [0.0, 0.01, 0.1, 0.3, 1.0, 10.0, 50.0] {
            let e2: f64 = eta * eta;
            let expected = (1.0 + 4.0 * e2).sqrt().recip();
            let got = purity_order_n(eta, 2).unwrap();
            assert!((got - expected).abs() <= 1e-14 * expected, "eta={eta}");
        }
    }

    #[test]
    fn purity_matches_circulant() {
        for eta in [0.0, 0.05, 0.1, 0.2, 0.7] {
            for n in 1..=40 {
                let a = purity_order_n(eta, n).unwrap();
                let b = purity_via_circulant(eta, n).unwrap();
                assert!((a - b).abs() < 1e-12, "eta={eta} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn purity_monotone() {
        for eta in [0.05, 0.1, 0.3] {
            let values: Vec<f64> = (1..60).map(|n| purity_order_n(eta, n).unwrap()).collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0]));
        }
        for n in 2..10 {
            let values: Vec<f64> = (0..50)
                .map(|i| purity_order_n(i as f64 * 0.01, n).unwrap())
                .collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn approx_examples() {
        assert_eq!(purity_approx(0.0, 7), 1.0);
        assert!((purity_approx(0.1, 10) - 0.904_837_418_035_959_6).abs() < 1e-15);
        for n in 1..=20 {
            let exact = purity_order_n(0.125, n).unwrap();
            assert!((purity_approx(0.125, n) - exact).abs() / exact < 0.02);
        }
    }

    #[test]
    fn kernel_examples() {
        let m = model(1.0, 0.0, 1);
        assert!((rho_kernel(&m, 0.0, 0.0) - PI.sqrt().recip()).abs() < 1e-15);
        let m = model(1.0, 0.2, 1);
        let trace = integrate(|t| rho_kernel(&m, t, t), 12.0, 2001);
        assert!((trace - 1.0).abs() < 1e-12);
        assert_eq!(rho_kernel(&m, 0.3, -1.2), rho_kernel(&m, -1.2, 0.3));
    }

    #[test]
    fn kernel_matches_arrival_average_of_pure_pulses() {
        // ∫ dτ p(τ) φ_τ(t) φ_τ(t') by quadrature
        let (t_w, dtau) = (1.3, 0.7);
        let m = model(t_w, dtau, 1);
        let p = |tau: f64| (-(tau * tau) / (dtau * dtau)).exp() / (PI.sqrt() * dtau);
        let phi = |tau: f64, t: f64| {
            (-(t - tau) * (t - tau) / (2.0 * t_w * t_w)).exp() / (PI.powf(0.25) * t_w.sqrt())
        };
        for (t, tp) in [(0.0, 0.0), (0.5, -0.4), (1.7, 2.2), (-2.0, 0.3)] {
            let direct = integrate(|tau| p(tau) * phi(tau, t) * phi(tau, tp), 10.0, 4001);
            assert!((direct - rho_kernel(&m, t, tp)).abs() < 1e-12, "({t},{tp})");
        }
    }

    #[test]
    fn kernel_gram_matrix_is_psd() {
        let m = model(1.0, 0.6, 1);
        let pts = [-2.1, -1.0, -0.3, 0.0, 0.2, 0.9, 1.5, 2.4];
        let gram =
            nalgebra::DMatrix::from_fn(pts.len(), pts.len(), |i, j| rho_kernel(&m, pts[i], pts[j]));
        let min = gram.symmetric_eigenvalues().min();
        assert!(min >= -1e-10, "{min}");
    }

    #[test]
    fn chi_examples() {
        let m = GaussianModel::new(1.0, 0.2, vec![0.0, 3.0]).unwrap();
        for t in [-1.0, 0.0, 0.4, 2.5] {
            let a = chi(&m, 0, t).unwrap().norm_sqr();
            let b = chi(&m, 1, t).unwrap().norm_sqr();
            assert!((a - b).abs() < 1e-15);
        }
        let norm = integrate(|t| chi(&m, 1, t).unwrap().norm_sqr(), 12.0, 2001);
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(matches!(chi(&m, 2, 0.0), Err(Error::OutOfRange { .. })));

        let pure = GaussianModel::new(1.5, 0.0, vec![2.0]).unwrap();
        for t in [-1.0, 0.3] {
            let phi0 = (-t * t / (2.0 * 1.5 * 1.5f64)).exp() / (PI.powf(0.25) * 1.5f64.sqrt());
            assert!((chi(&pure, 0, t).unwrap().norm_sqr() - phi0 * phi0).abs() < 1e-15);
        }
    }

    #[test]
    fn time_density_examples() {
        let m = model(1.0, 0.0, 1);
        let p = time_density(&m, &TimeTuple::new(vec![0.0]).unwrap()).unwrap();
        assert!((p - PI.sqrt().recip()).abs() < 1e-15);

        let m3 = model(1.0, 0.3, 3);
        let t = TimeTuple::new(vec![0.1, -0.5, 1.2]).unwrap();
        let product: f64 = t
            .as_slice()
            .iter()
            .map(|&tk| {
                time_density(&model(1.0, 0.3, 1), &TimeTuple::new(vec![tk]).unwrap()).unwrap()
            })
            .product();
        assert!((time_density(&m3, &t).unwrap() - product).abs() < 1e-15);
        assert!(time_density(&m3, &TimeTuple::new(vec![0.0]).unwrap()).is_err());
    }

    #[test]
    fn sampled_times_have_expected_moments() {
        let m = model(1.0, 0.4, 2);
        let count = 40_000;
        let samples = sample_times(&m, 17, count).unwrap();
        let first: Vec<f64> = samples.iter().map(|t| t[0]).collect();
        let mean = first.iter().sum::<f64>() / count as f64;
        let var = first.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1) as f64;
        let expected_var = m.spread_variance() / 2.0;
        assert!(mean.abs() < 4.0 * (expected_var / count as f64).sqrt());
        // var of sample variance for a Gaussian: 2σ⁴/(n-1)
        let var_se = expected_var * (2.0 / (count - 1) as f64).sqrt();
        assert!((var - expected_var).abs() < 4.0 * var_se);
    }

    #[test]
    fn sampling_is_thread_count_independent() {
        let m = model(1.0, 0.4, 3);
        let a = sample_times(&m, 5, 500).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| sample_times(&m, 5, 500).unwrap());
        assert_eq!(a, b);
        assert!(sample_times(&m, 5, 0).is_err());
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"N": 2, "T": 1.0, "dtau": 0.2, "omega": [0.0, 1.5], "seed": 3}"#;
        let cfg: ModelConfig = serde_json::from_str(json).unwrap();
        let m = GaussianModel::try_from(&cfg).unwrap();
        assert_eq!(m.frequencies(), &[0.0, 1.5]);
        assert_eq!(m.to_config(Some(3)), cfg);

        let bad: ModelConfig =
            serde_json::from_str(r#"{"N": 2, "T": 1.0, "dtau": 0.2, "omega": [1.0]}"#).unwrap();
        assert!(matches!(
            GaussianModel::try_from(&bad),
            Err(Error::Config(_))
        ));
    }
}
