//! Brute-force reference computations used to validate the closed forms.
//!
//! - Discretized density operators on a uniform time grid.
//! - Tensor Gauss–Hermite quadrature over detection times.
//! - Explicit averaging of pure-photon probabilities over random arrival times.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::distinguishability::DistFunctionB;
use crate::error::{Error, Result};
use crate::interference::{Experiment, OutputTuple};
use crate::linalg::glynn;
use crate::permgroup::{factorial, Permutation};
use crate::photon_model::{rho_kernel, GaussianModel, TimeTuple};

/// Smallest accepted grid.
pub const MIN_GRID_POINTS: usize = 16;
/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 400;
/// Default half-width of the grid in units of `√S`.
pub const DEFAULT_GRID_HALF_WIDTH: f64 = 8.0;
/// Photon limit for the tensor-product oracles.
pub const MAX_ORACLE_N: usize = 3;
/// Largest Gauss–Hermite order.
pub const MAX_QUADRATURE_ORDER: usize = 64;
/// Required coverage, in standard deviations of `|χ(t)|²`, centred on zero.
pub const MIN_GRID_SPAN_SIGMAS: f64 = 6.0;

/// Uniform grid `t_i = t_min + i·step`, `i = 0..points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    points: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite() && t_max > t_min) {
            return Err(Error::Domain(format!(
                "grid bounds [{t_min}, {t_max}] are not increasing"
            )));
        }
        if points < MIN_GRID_POINTS {
            return Err(Error::Domain(format!(
                "a grid needs at least {MIN_GRID_POINTS} points, got {points}"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            points,
        })
    }

    /// `[-8√S, 8√S]` with 400 points.
    pub fn default_for(model: &GaussianModel) -> Self {
        Self::symmetric(model, DEFAULT_GRID_POINTS)
    }

    /// `[-8√S, 8√S]` with the given number of points.
    pub fn symmetric(model: &GaussianModel, points: usize) -> Self {
        let h = DEFAULT_GRID_HALF_WIDTH * model.spread_variance().sqrt();
        Self {
            t_min: -h,
            t_max: h,
            points: points.max(MIN_GRID_POINTS),
        }
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points)
            .map(|i| self.t_min + i as f64 * h)
            .collect()
    }

    /// Fails unless the grid covers `±3` standard deviations of a photon with
    /// averaged-pulse variance `s`.
    fn check_span(&self, s: f64) -> Result<()> {
        let half = 0.5 * MIN_GRID_SPAN_SIGMAS * (s / 2.0).sqrt();
        if self.t_min > -half || self.t_max < half {
            return Err(Error::Domain(format!(
                "grid [{}, {}] does not cover ±{half:.3} ({MIN_GRID_SPAN_SIGMAS} standard deviations)",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }
}

/// `K_ij = ⟨t_i|ρ|t_j⟩·step`.
fn kernel_matrix(model: &GaussianModel, grid: &TimeGrid) -> DMatrix<f64> {
    let t = grid.nodes();
    let h = grid.step();
    DMatrix::from_fn(t.len(), t.len(), |i, j| rho_kernel(model, t[i], t[j]) * h)
}

fn matrix_power(m: &DMatrix<f64>, mut n: usize) -> DMatrix<f64> {
    let mut result: Option<DMatrix<f64>> = None;
    let mut base = m.clone();
    loop {
        if n & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        n >>= 1;
        if n == 0 {
            break;
        }
        base = &base * &base;
    }
    result.expect("power is at least 1")
}

/// `Tr(Kⁿ)` for the discretized density operator.
pub fn grid_purity(model: &GaussianModel, n: usize, grid: &TimeGrid) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("purity order must be at least 1".into()));
    }
    grid.check_span(model.spread_variance())?;
    Ok(matrix_power(&kernel_matrix(model, grid), n).trace())
}

/// Pulse parameters of one photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonShape {
    pub pulse_width: f64,
    pub arrival_spread: f64,
}

/// `J(σ) = Tr(P_σ† ρ_1 ⊗ … ⊗ ρ_N)` for photons with individual `(T_k, Δτ_k)`
/// and a common central frequency, as a product of `Tr(K_{i_1} ⋯ K_{i_n})` over
/// the cycles of `σ`.
pub fn grid_j_a_general(
    shapes: &[PhotonShape],
    sigma: &Permutation,
    grid: &TimeGrid,
) -> Result<f64> {
    let n = shapes.len();
    if n > MAX_ORACLE_N {
        return Err(Error::size(
            "photon number for the grid oracle",
            n,
            MAX_ORACLE_N,
        ));
    }
    if sigma.len() != n {
        return Err(Error::Dimension(format!(
            "permutation of {} elements for {n} photons",
            sigma.len()
        )));
    }
    let kernels = shapes
        .iter()
        .map(|s| {
            let model = GaussianModel::uniform(1, s.pulse_width, s.arrival_spread)?;
            grid.check_span(model.spread_variance())?;
            Ok(kernel_matrix(&model, grid))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut value = 1.0;
    for cycle in sigma.cycles() {
        if cycle.len() == 1 {
            value *= kernels[cycle[0]].trace();
            continue;
        }
        let mut chain = kernels[cycle[0]].clone();
        for &k in &cycle[1..] {
            chain = &chain * &kernels[k];
        }
        value *= chain.trace();
    }
    Ok(value)
}

/// Gauss–Hermite nodes and weights for `∫ f(x) e^{-x²} dx`, from the
/// eigen-decomposition of the Jacobi matrix.
pub fn gauss_hermite(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::Domain("quadrature order must be at least 1".into()));
    }
    if order > MAX_QUADRATURE_ORDER {
        return Err(Error::size("quadrature order", order, MAX_QUADRATURE_ORDER));
    }
    let jacobi = DMatrix::from_fn(order, order, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            (
                eig.eigenvalues[i],
                PI.sqrt() * eig.eigenvectors[(0, i)].powi(2),
            )
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Visits every point of an `order^dim` tensor grid with its index tuple.
fn for_each_tensor_index(order: usize, dim: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0; dim];
    loop {
        f(&idx);
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            idx[d] += 1;
            if idx[d] < order {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn check_oracle_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_N {
        return Err(Error::size("photon number for quadrature", n, MAX_ORACLE_N));
    }
    Ok(())
}

/// `∫ dt 𝒥(t;σ)` by tensor Gauss–Hermite quadrature in `x = t/√S`.
pub fn quad_j_integral(model: &GaussianModel, sigma: &Permutation, order: usize) -> Result<f64> {
    let n = model.n_photons();
    check_oracle_size(n)?;
    let (x, w) = gauss_hermite(order)?;
    let df = DistFunctionB::new(model);
    let root_s = model.spread_variance().sqrt();
    // e^{x²} removes the quadrature weight function
    let scaled: Vec<f64> = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| wi * (xi * xi).exp())
        .collect();
    let mut total = 0.0;
    let mut err = None;
    for_each_tensor_index(order, n, |idx| {
        let t = TimeTuple::new(idx.iter().map(|&i| root_s * x[i]).collect()).expect("finite nodes");
        match df.j_b_raw(&t, sigma) {
            Ok(v) => total += idx.iter().map(|&i| scaled[i]).product::<f64>() * v,
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total * root_s.powi(n as i32))
}

/// Time-resolved density of `(ℓ, t)` computed from first principles: pure
/// photons with arrival times `τ_j`, `|per B(τ)|²/N!` with
/// `B_jk = U_{j,l_k} φ_j(t_k - τ_j)`, averaged over `τ_j` by Gauss–Hermite
/// quadrature.
pub fn quad_prob_b_mixture(
    exp: &Experiment,
    l: &OutputTuple,
    t: &TimeTuple,
    order: usize,
) -> Result<f64> {
    let n = exp.n_photons();
    check_oracle_size(n)?;
    if l.len() != n {
        return Err(Error::Dimension(format!(
            "output tuple of length {} for {n} photons",
            l.len()
        )));
    }
    t.check_len(n)?;
    if let Some(&p) = l.ports().iter().find(|&&p| p >= exp.n_modes()) {
        return Err(Error::OutOfRange {
            what: "output port",
            index: p,
            bound: exp.n_modes(),
        });
    }
    let model = exp.model();
    let tw = model.pulse_width();
    let omega = model.frequencies();
    let pulse = |j: usize, tau: f64, time: f64| {
        let d = time - tau;
        let amp = (PI * tw * tw).powf(-0.25) * (-d * d / (2.0 * tw * tw)).exp();
        Complex64::from_polar(amp, -omega[j] * time)
    };
    let prob_at = |tau: &[f64]| {
        let mut b = Vec::with_capacity(n * n);
        for (j, &tj) in tau.iter().enumerate() {
            for (k, &lk) in l.ports().iter().enumerate() {
                b.push(exp.unitary().get(j, lk) * pulse(j, tj, t[k]));
            }
        }
        glynn(&b, n).norm_sqr() / factorial(n)
    };
    if model.arrival_spread() == 0.0 {
        return Ok(prob_at(&vec![0.0; n]));
    }
    let (x, w) = gauss_hermite(order)?;
    let spread = model.arrival_spread();
    let mut total = 0.0;
    let mut tau = vec![0.0; n];
    for_each_tensor_index(order, n, |idx| {
        for (tj, &i) in tau.iter_mut().zip(idx) {
            *tj = spread * x[i];
        }
        let weight: f64 = idx.iter().map(|&i| w[i] / PI.sqrt()).product();
        total += weight * prob_at(&tau);
    });
    Ok(total)
}
