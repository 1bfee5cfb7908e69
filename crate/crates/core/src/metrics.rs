//! Total-variation distance to the indistinguishable case and the `1 - d_s`
//! bound on it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguishability::{ds_closed_form, ds_exact, j_a_table, pair_weights, DistFunctionA};
use crate::error::{Error, Result};
use crate::interference::{
    all_occupations, prob_a_ideal, prob_a_occupation, Experiment, OutputTuple, PairEvaluator,
};
use crate::permgroup::{factorial, MAX_GROUP_ORDER_N};
use crate::photon_model::{purity_order_n, TimeSampler};
use crate::stats::{pairwise_sum, McEstimate};

/// Photon limit for distances, which enumerate all `M^N` output tuples.
pub const MAX_TVD_N: usize = 4;
/// Mode limit for distances.
pub const MAX_TVD_M: usize = 8;
/// Smallest sample count for the time-resolved distance.
pub const MIN_TVD_B_SAMPLES: usize = 1000;

/// Slack allowed on `d_a ≤ 1 - d_s`.
pub const BOUND_SLACK: f64 = 1e-9;

/// Which `d_s` evaluation produced the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DsRoute {
    Exact,
    ClosedForm,
}

/// Both distances with the bound they must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistSummary {
    pub d_a: f64,
    pub d_b: McEstimate,
    pub ds: f64,
    pub ds_route: DsRoute,
    pub bound: f64,
    pub purity: f64,
    pub pass_a: bool,
    pub pass_b: bool,
}

fn check_tvd_size(exp: &Experiment) -> Result<()> {
    if exp.n_photons() > MAX_TVD_N {
        return Err(Error::size(
            "photon number for distances",
            exp.n_photons(),
            MAX_TVD_N,
        ));
    }
    if exp.n_modes() > MAX_TVD_M {
        return Err(Error::size(
            "mode number for distances",
            exp.n_modes(),
            MAX_TVD_M,
        ));
    }
    Ok(())
}

fn mixed_is_ideal(exp: &Experiment) -> bool {
    exp.n_photons() == 1 || exp.model().eta() == 0.0
}

/// `½ Σ_ℓ |p_ℓ - p̊_ℓ|` over all ordered tuples, time-unresolved detection.
pub fn tvd_a(exp: &Experiment) -> Result<f64> {
    check_tvd_size(exp)?;
    let n = exp.n_photons();
    let m = exp.n_modes();
    let mut ev = PairEvaluator::new(n)?;
    let ja = j_a_table(&DistFunctionA::new(exp.model()), ev.perms())?;
    ev.set_weights(&ja, mixed_is_ideal(exp));
    let order = ev.perms().len();
    let count = m.pow(n as u32);
    let diffs: Vec<f64> = (0..count)
        .into_par_iter()
        .map_init(
            || {
                (
                    vec![Complex64::new(0.0, 0.0); n * n],
                    vec![Complex64::new(0.0, 0.0); order],
                )
            },
            |(x, amps), i| {
                exp.fill_submatrix(&OutputTuple::from_index(i, n, m), x);
                let (p, q) = ev.eval(x, amps);
                (p - q).abs()
            },
        )
        .collect();
    Ok(0.5 * pairwise_sum(&diffs) / factorial(n))
}

/// The same distance summed over occupations instead of ordered tuples.
pub fn tvd_a_occupation(exp: &Experiment) -> Result<f64> {
    check_tvd_size(exp)?;
    let mut diffs = Vec::new();
    for occ in all_occupations(exp.n_photons(), exp.n_modes()) {
        let mixed = prob_a_occupation(exp, &occ)?;
        let ideal = occ.multiplicity() * prob_a_ideal(exp, &occ.to_tuple())?;
        diffs.push((mixed - ideal).abs());
    }
    Ok(0.5 * pairwise_sum(&diffs))
}

/// `½ ∫dt Σ_ℓ |p_ℓ(t) - p̊_ℓ(t)|`, estimated by sampling `t ~ p(t)`.
pub fn tvd_b(exp: &Experiment, seed: u64, samples: usize) -> Result<McEstimate> {
    check_tvd_size(exp)?;
    if samples < MIN_TVD_B_SAMPLES {
        return Err(Error::Domain(format!(
            "at least {MIN_TVD_B_SAMPLES} samples are required, got {samples}"
        )));
    }
    let n = exp.n_photons();
    let m = exp.n_modes();
    let ideal_only = mixed_is_ideal(exp);
    let template = PairEvaluator::new(n)?;
    let order = template.perms().len();
    let sampler = TimeSampler::new(exp.model())?;
    let count = m.pow(n as u32);
    let norm = 0.5 / factorial(n);
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map_init(
            || {
                (
                    template.clone(),
                    vec![Complex64::new(0.0, 0.0); n * n],
                    vec![Complex64::new(0.0, 0.0); order],
                    vec![0.0; order],
                )
            },
            |(ev, x, amps, weights), i| {
                let t = sampler.draw(seed, i);
                if !ideal_only {
                    let d = pair_weights(exp.model(), t.as_slice());
                    for (w, s) in weights.iter_mut().zip(ev.perms()) {
                        *w = (0..n).map(|k| d[k * n + s.apply(k)]).product();
                    }
                }
                ev.set_weights(weights, ideal_only);
                let phases = exp.phases(t.as_slice());
                let mut total = 0.0;
                for idx in 0..count {
                    exp.fill_submatrix(&OutputTuple::from_index(idx, n, m), x);
                    for (xi, ph) in x.iter_mut().zip(&phases) {
                        *xi *= ph;
                    }
                    let (p, q) = ev.eval(x, amps);
                    total += (p - q).abs();
                }
                norm * total
            },
        )
        .collect();
    Ok(McEstimate::from_samples(&values))
}

/// `1 - d_s` with `d_s` expressed through the two-photon purity `𝒫`:
///
/// ```text
/// d_s ≈ 𝒫^{(N-1)/2} + Σ_{n=2}^{N} 𝒫^{(N-n)/2} (1 - √𝒫)ⁿ / n!
/// ```
pub fn deviation_bound(n_photons: usize, purity: f64) -> Result<f64> {
    if n_photons == 0 {
        return Err(Error::Domain("at least one photon is required".into()));
    }
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::Domain(format!(
            "purity must lie in (0, 1], got {purity}"
        )));
    }
    let n = n_photons as f64;
    let root = purity.sqrt();
    let gap = 1.0 - root;
    let mut ds = purity.powf((n - 1.0) / 2.0);
    let mut gap_pow = gap;
    let mut fact = 1.0;
    for k in 2..=n_photons {
        gap_pow *= gap;
        fact *= k as f64;
        ds += root.powf(n - k as f64) * gap_pow / fact;
    }
    Ok((1.0 - ds).max(0.0))
}

/// Supremum of [`deviation_bound`] as the purity tends to zero, `1 - 1/N!`.
pub fn max_deviation_bound(n_photons: usize) -> f64 {
    1.0 - 1.0 / factorial(n_photons)
}

/// Purity at which [`deviation_bound`] equals `target`, by bisection.
pub fn required_purity(n_photons: usize, target: f64) -> Result<f64> {
    if n_photons == 0 {
        return Err(Error::Domain("at least one photon is required".into()));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain(format!(
            "target deviation must lie in (0, 1), got {target}"
        )));
    }
    let sup = max_deviation_bound(n_photons);
    if target >= sup {
        return Err(Error::Domain(format!(
            "deviation {target} is unreachable for {n_photons} photons; the bound never exceeds {sup}"
        )));
    }
    // bound is decreasing in the purity
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if deviation_bound(n_photons, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `η` whose approximate two-photon purity `e^{-2η²}` equals `purity`.
pub fn eta_for_purity(purity: f64) -> Result<f64> {
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::Domain(format!(
            "purity must lie in (0, 1], got {purity}"
        )));
    }
    Ok((-purity.ln() / 2.0).max(0.0).sqrt())
}

/// `d_s` by the exact group average where feasible, else the closed form.
pub fn ds_best(exp: &Experiment) -> Result<(f64, DsRoute)> {
    if exp.n_photons() <= MAX_GROUP_ORDER_N {
        Ok((ds_exact(&DistFunctionA::new(exp.model()))?, DsRoute::Exact))
    } else {
        Ok((
            ds_closed_form(exp.n_photons(), exp.model().eta()),
            DsRoute::ClosedForm,
        ))
    }
}

/// Both distances, `d_s`, and whether each distance respects `1 - d_s`.
pub fn summarize(exp: &Experiment, seed: u64, samples: usize) -> Result<DistSummary> {
    let d_a = tvd_a(exp)?;
    let d_b = tvd_b(exp, seed, samples)?;
    let (ds, ds_route) = ds_best(exp)?;
    let bound = 1.0 - ds;
    Ok(DistSummary {
        d_a,
        d_b,
        ds,
        ds_route,
        bound,
        purity: purity_order_n(exp.model().eta(), 2)?,
        pass_a: d_a <= bound + BOUND_SLACK,
        pass_b: d_b.estimate <= bound + 3.0 * d_b.std_error,
    })
}
