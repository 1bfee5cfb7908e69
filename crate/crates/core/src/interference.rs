//! Output probabilities of `N` photons entering ports `0..N` of an `M`-port
//! interferometer.
//!
//! Probabilities are indexed by ordered output tuples `ℓ = (l_1, …, l_N)`
//! with 0-based ports and normalized so that the sum over all `M^N` tuples is
//! one. An occupation `m` collects `N!/Π m_l!` tuples of equal probability.
//!
//! Time-unresolved detection:
//!
//! ```text
//! p_ℓ = (1/N!) Σ_σ J(σ) per(A^σ),   A^σ_jk = conj(U_{σ(j),l_k}) U_{j,l_k}
//! ```
//!
//! Time-resolved detection at times `t`, with `Ũ_{j,l}(t) = U_{j,l} χ_j(t)`:
//!
//! ```text
//! p_ℓ(t) = (1/N!) Σ_{σ₁,σ₂} J̃(t; σ₂⁻¹σ₁) conj(a_{σ₁}) a_{σ₂},   a_σ = Π_k Ũ_{σ(k),l_k}(t_k)
//! ```

use num_complex::Complex64;

use crate::distinguishability::{j_a_table, pair_weights, DistFunctionA};
use crate::error::{Error, Result};
use crate::linalg::{glynn, UnitaryMatrix, MAX_PERMANENT_N};
use crate::permgroup::{all_permutations, factorial, GroupTable, Permutation};
use crate::photon_model::{marginal_density, GaussianModel, TimeTuple};

/// Photon limit for the grouped time-unresolved path.
pub const MAX_PROB_A_N: usize = 9;
/// Photon limit for the direct double-sum time-unresolved path.
pub const MAX_PROB_A_DIRECT_N: usize = 7;
/// Photon limit for the grouped time-resolved path.
pub const MAX_PROB_B_N: usize = 8;
/// Photon limit for the direct double-sum time-resolved path.
pub const MAX_PROB_B_DIRECT_N: usize = 6;
/// Photon limit for ideal and classical probabilities.
pub const MAX_IDEAL_N: usize = 20;

/// Ordered output ports, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputTuple {
    ports: Vec<usize>,
}

impl OutputTuple {
    pub fn new(ports: Vec<usize>, n_modes: usize) -> Result<Self> {
        if ports.is_empty() {
            return Err(Error::Domain("output tuple is empty".into()));
        }
        if let Some(&p) = ports.iter().find(|&&p| p >= n_modes) {
            return Err(Error::OutOfRange {
                what: "output port",
                index: p,
                bound: n_modes,
            });
        }
        Ok(Self { ports })
    }

    /// Tuple number `index` in base-`M` order, first port most significant.
    pub fn from_index(mut index: usize, n_photons: usize, n_modes: usize) -> Self {
        let mut ports = vec![0; n_photons];
        for p in ports.iter_mut().rev() {
            *p = index % n_modes;
            index /= n_modes;
        }
        Self { ports }
    }

    pub fn ports(&self) -> &[usize] {
        &self.ports
    }

    pub fn len(&self) -> usize {
        self.ports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ports.is_empty()
    }

    pub fn to_occupation(&self, n_modes: usize) -> Result<Occupation> {
        let mut counts = vec![0; n_modes];
        for &p in &self.ports {
            *counts.get_mut(p).ok_or(Error::OutOfRange {
                what: "output port",
                index: p,
                bound: n_modes,
            })? += 1;
        }
        Ok(Occupation { counts })
    }
}

/// Photon counts per output port.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occupation {
    counts: Vec<usize>,
}

impl Occupation {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Domain("occupation has no ports".into()));
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::Domain("occupation holds no photons".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n_photons(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn n_modes(&self) -> usize {
        self.counts.len()
    }

    /// Sorted ordered tuple realizing this occupation.
    pub fn to_tuple(&self) -> OutputTuple {
        let ports = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(l, &c)| std::iter::repeat_n(l, c))
            .collect();
        OutputTuple { ports }
    }

    /// Number of ordered tuples with this occupation, `N!/Π m_l!`.
    pub fn multiplicity(&self) -> f64 {
        factorial(self.n_photons()) / self.counts.iter().map(|&c| factorial(c)).product::<f64>()
    }
}

/// All occupations of `n` photons in `m` ports, in reverse lexicographic order.
pub fn all_occupations(n_photons: usize, n_modes: usize) -> Vec<Occupation> {
    fn fill(rest: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Occupation>) {
        if slot + 1 == cur.len() {
            cur[slot] = rest;
            out.push(Occupation {
                counts: cur.clone(),
            });
            return;
        }
        for c in (0..=rest).rev() {
            cur[slot] = c;
            fill(rest - c, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if n_modes > 0 {
        fill(n_photons, 0, &mut vec![0; n_modes], &mut out);
    }
    out
}

/// Photons in ports `0..N` of an `M`-port interferometer.
#[derive(Debug, Clone)]
pub struct Experiment {
    model: GaussianModel,
    unitary: UnitaryMatrix,
}

impl Experiment {
    pub fn new(model: GaussianModel, unitary: UnitaryMatrix) -> Result<Self> {
        if model.n_photons() > unitary.dim() {
            return Err(Error::Dimension(format!(
                "{} photons do not fit in {} input ports",
                model.n_photons(),
                unitary.dim()
            )));
        }
        Ok(Self { model, unitary })
    }

    pub fn model(&self) -> &GaussianModel {
        &self.model
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    pub fn n_photons(&self) -> usize {
        self.model.n_photons()
    }

    pub fn n_modes(&self) -> usize {
        self.unitary.dim()
    }

    fn check_tuple(&self, l: &OutputTuple) -> Result<()> {
        if l.len() != self.n_photons() {
            return Err(Error::Dimension(format!(
                "output tuple of length {} for {} photons",
                l.len(),
                self.n_photons()
            )));
        }
        if let Some(&p) = l.ports.iter().find(|&&p| p >= self.n_modes()) {
            return Err(Error::OutOfRange {
                what: "output port",
                index: p,
                bound: self.n_modes(),
            });
        }
        Ok(())
    }

    /// `U_{j,l_k}`, row-major `N x N`.
    fn submatrix(&self, l: &OutputTuple) -> Vec<Complex64> {
        let n = self.n_photons();
        let mut a = Vec::with_capacity(n * n);
        for j in 0..n {
            for &lk in &l.ports {
                a.push(self.unitary.get(j, lk));
            }
        }
        a
    }

    /// `U_{j,l_k} e^{-iΩ_j t_k}`, the spatiotemporal submatrix divided by `|χ(t_k)|`.
    fn phased_submatrix(&self, l: &OutputTuple, t: &TimeTuple) -> Vec<Complex64> {
        let n = self.n_photons();
        let omega = self.model.frequencies();
        let mut a = Vec::with_capacity(n * n);
        for (j, w) in omega.iter().enumerate() {
            for (k, &lk) in l.ports.iter().enumerate() {
                a.push(self.unitary.get(j, lk) * Complex64::from_polar(1.0, -w * t[k]));
            }
        }
        a
    }

    fn check_times(&self, t: &TimeTuple) -> Result<()> {
        t.check_len(self.n_photons())
    }
}

/// Evaluation route for partially distinguishable probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// `N!` permanents weighted by the distinguishability function.
    #[default]
    Grouped,
    /// Double sum over pairs of permutations.
    Direct,
}

fn check_limit(n: usize, max: usize, what: &'static str) -> Result<()> {
    if n > max {
        return Err(Error::size(what, n, max));
    }
    Ok(())
}

/// `|per(M)|² / N!` for a row-major `N x N` matrix.
fn permanent_probability(a: &[Complex64], n: usize) -> f64 {
    glynn(a, n).norm_sqr() / factorial(n)
}

/// Time-unresolved probability of the ordered tuple `l`.
pub fn prob_a(exp: &Experiment, l: &OutputTuple) -> Result<f64> {
    prob_a_with(exp, l, EvalPath::Grouped)
}

pub fn prob_a_with(exp: &Experiment, l: &OutputTuple, path: EvalPath) -> Result<f64> {
    exp.check_tuple(l)?;
    let n = exp.n_photons();
    match path {
        EvalPath::Grouped => check_limit(n, MAX_PROB_A_N, "photon number")?,
        EvalPath::Direct => {
            check_limit(n, MAX_PROB_A_DIRECT_N, "photon number for the direct sum")?
        }
    }
    let u = exp.submatrix(l);
    if n == 1 || exp.model.eta() == 0.0 {
        return Ok(permanent_probability(&u, n));
    }
    let perms = all_permutations(n)?;
    let weights = j_a_table(&DistFunctionA::new(&exp.model), &perms)?;
    let total = match path {
        EvalPath::Grouped => {
            let mut a = vec![Complex64::new(0.0, 0.0); n * n];
            let mut sum = 0.0;
            for (sigma, &w) in perms.iter().zip(&weights) {
                for j in 0..n {
                    let sj = sigma.apply(j);
                    for k in 0..n {
                        a[j * n + k] = u[sj * n + k].conj() * u[j * n + k];
                    }
                }
                sum += w * glynn(&a, n).re;
            }
            sum
        }
        EvalPath::Direct => {
            let amps = amplitudes(&u, n, &perms);
            direct_sum(&perms, &amps, |rel| weights[rel.lex_rank()])
        }
    };
    Ok(total / factorial(n))
}

/// `a_σ = Π_k X_{σ(k),k}` for every permutation.
fn amplitudes(x: &[Complex64], n: usize, perms: &[Permutation]) -> Vec<Complex64> {
    perms
        .iter()
        .map(|s| (0..n).map(|k| x[s.apply(k) * n + k]).product())
        .collect()
}

/// `Σ_{i,j} w(σ_j⁻¹σ_i) conj(a_i) a_j` for a weight symmetric under inversion.
fn direct_sum(
    perms: &[Permutation],
    amps: &[Complex64],
    weight: impl Fn(&Permutation) -> f64,
) -> f64 {
    let mut sum = 0.0;
    for (i, si) in perms.iter().enumerate() {
        for (j, sj) in perms.iter().enumerate() {
            let rel = sj.inverse().compose(si).expect("equal degrees");
            sum += weight(&rel) * (amps[i].conj() * amps[j]).re;
        }
    }
    sum
}

/// Time-unresolved probability of the occupation `m`, `(N!/m!) p_ℓ`.
pub fn prob_a_occupation(exp: &Experiment, m: &Occupation) -> Result<f64> {
    check_occupation(exp, m)?;
    Ok(m.multiplicity() * prob_a(exp, &m.to_tuple())?)
}

fn check_occupation(exp: &Experiment, m: &Occupation) -> Result<()> {
    if m.n_modes() != exp.n_modes() {
        return Err(Error::Dimension(format!(
            "occupation over {} ports for {} modes",
            m.n_modes(),
            exp.n_modes()
        )));
    }
    if m.n_photons() != exp.n_photons() {
        return Err(Error::Dimension(format!(
            "occupation holds {} photons, experiment has {}",
            m.n_photons(),
            exp.n_photons()
        )));
    }
    Ok(())
}

/// Indistinguishable photons: `|per(U[0..N | ℓ])|² / N!`.
pub fn prob_a_ideal(exp: &Experiment, l: &OutputTuple) -> Result<f64> {
    exp.check_tuple(l)?;
    let n = exp.n_photons();
    check_limit(n, MAX_IDEAL_N.min(MAX_PERMANENT_N), "photon number")?;
    Ok(permanent_probability(&exp.submatrix(l), n))
}

/// Fully distinguishable photons: `per(|U[0..N | ℓ]|²) / N!`.
pub fn prob_a_classical(exp: &Experiment, l: &OutputTuple) -> Result<f64> {
    exp.check_tuple(l)?;
    let n = exp.n_photons();
    check_limit(n, MAX_IDEAL_N.min(MAX_PERMANENT_N), "photon number")?;
    let a: Vec<Complex64> = exp
        .submatrix(l)
        .iter()
        .map(|z| Complex64::new(z.norm_sqr(), 0.0))
        .collect();
    Ok(glynn(&a, n).re / factorial(n))
}

/// Time-resolved probability density of `(ℓ, t)`.
pub fn prob_b(exp: &Experiment, l: &OutputTuple, t: &TimeTuple) -> Result<f64> {
    prob_b_with(exp, l, t, EvalPath::Grouped)
}

pub fn prob_b_with(
    exp: &Experiment,
    l: &OutputTuple,
    t: &TimeTuple,
    path: EvalPath,
) -> Result<f64> {
    let density = density_of(exp, t)?;
    Ok(density * prob_b_conditional_with(exp, l, t, path)?)
}

fn density_of(exp: &Experiment, t: &TimeTuple) -> Result<f64> {
    exp.check_times(t)?;
    Ok(t.as_slice()
        .iter()
        .map(|&tk| marginal_density(&exp.model, tk))
        .product())
}

/// `p_ℓ(t) / p(t)`: the output distribution conditioned on detection times.
pub fn prob_b_conditional(exp: &Experiment, l: &OutputTuple, t: &TimeTuple) -> Result<f64> {
    prob_b_conditional_with(exp, l, t, EvalPath::Grouped)
}

pub fn prob_b_conditional_with(
    exp: &Experiment,
    l: &OutputTuple,
    t: &TimeTuple,
    path: EvalPath,
) -> Result<f64> {
    exp.check_tuple(l)?;
    exp.check_times(t)?;
    let n = exp.n_photons();
    match path {
        EvalPath::Grouped => check_limit(n, MAX_PROB_B_N, "photon number")?,
        EvalPath::Direct => {
            check_limit(n, MAX_PROB_B_DIRECT_N, "photon number for the direct sum")?
        }
    }
    let x = exp.phased_submatrix(l, t);
    if n == 1 || exp.model.eta() == 0.0 {
        return Ok(permanent_probability(&x, n));
    }
    let perms = all_permutations(n)?;
    let d = pair_weights(&exp.model, t.as_slice());
    let weight = |s: &Permutation| (0..n).map(|k| d[k * n + s.apply(k)]).product::<f64>();
    let total = match path {
        EvalPath::Grouped => {
            // F^σ_jk = conj(X_{j,σ⁻¹(k)}) X_{j,k}
            let mut f = vec![Complex64::new(0.0, 0.0); n * n];
            let mut sum = 0.0;
            for sigma in &perms {
                let inv = sigma.inverse();
                for j in 0..n {
                    for k in 0..n {
                        f[j * n + k] = x[j * n + inv.apply(k)].conj() * x[j * n + k];
                    }
                }
                sum += weight(sigma) * glynn(&f, n).re;
            }
            sum
        }
        EvalPath::Direct => {
            let amps = amplitudes(&x, n, &perms);
            direct_sum(&perms, &amps, weight)
        }
    };
    Ok(total / factorial(n))
}

/// Indistinguishable time-resolved density `|per(Ũ[0..N | (ℓ, t)])|² / N!`.
pub fn prob_b_ideal(exp: &Experiment, l: &OutputTuple, t: &TimeTuple) -> Result<f64> {
    exp.check_tuple(l)?;
    let density = density_of(exp, t)?;
    let n = exp.n_photons();
    check_limit(n, MAX_IDEAL_N.min(MAX_PERMANENT_N), "photon number")?;
    Ok(density * permanent_probability(&exp.phased_submatrix(l, t), n))
}

/// Evaluates `(mixed, ideal)` probability pairs over many output tuples with
/// the double-sum weights precomputed. Used for distance sums.
#[derive(Debug, Clone)]
pub(crate) struct PairEvaluator {
    n: usize,
    perms: Vec<Permutation>,
    table: GroupTable,
    // w[i * order + j] = weight(σ_j⁻¹ σ_i)
    w: Vec<f64>,
    ideal_only: bool,
}

/// Largest `N` for which [`PairEvaluator`] tabulates its `N! x N!` weights.
pub(crate) const MAX_PAIR_EVALUATOR_N: usize = 5;

impl PairEvaluator {
    pub(crate) fn new(n: usize) -> Result<Self> {
        let table = GroupTable::new(n, MAX_PAIR_EVALUATOR_N)?;
        let order = table.order();
        Ok(Self {
            n,
            perms: table.perms.clone(),
            table,
            w: vec![1.0; order * order],
            ideal_only: true,
        })
    }

    /// Sets the weights from `J` indexed like the group listing.
    pub(crate) fn set_weights(&mut self, by_perm: &[f64], ideal_only: bool) {
        let order = self.table.order();
        self.ideal_only = ideal_only;
        if ideal_only {
            return;
        }
        for i in 0..order {
            for j in 0..order {
                self.w[i * order + j] = by_perm[self.table.relative(i, j)];
            }
        }
    }

    pub(crate) fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// `(N!·p, N!·p̊)` for the row-major matrix `X_{j,k}`.
    pub(crate) fn eval(&self, x: &[Complex64], amps: &mut [Complex64]) -> (f64, f64) {
        let n = self.n;
        for (a, s) in amps.iter_mut().zip(&self.perms) {
            *a = (0..n).map(|k| x[s.apply(k) * n + k]).product();
        }
        let ideal = amps.iter().sum::<Complex64>().norm_sqr();
        if self.ideal_only {
            return (ideal, ideal);
        }
        let order = amps.len();
        let mut mixed = 0.0;
        for i in 0..order {
            let row = &self.w[i * order..(i + 1) * order];
            mixed += amps[i].norm_sqr();
            let ai = amps[i].conj();
            let mut cross = 0.0;
            for j in i + 1..order {
                cross += row[j] * (ai * amps[j]).re;
            }
            mixed += 2.0 * cross;
        }
        (mixed, ideal)
    }
}

impl Experiment {
    pub(crate) fn fill_submatrix(&self, l: &OutputTuple, out: &mut [Complex64]) {
        let n = self.n_photons();
        for j in 0..n {
            for (k, &lk) in l.ports.iter().enumerate() {
                out[j * n + k] = self.unitary.get(j, lk);
            }
        }
    }

    /// `phases[j * N + k] = e^{-iΩ_j t_k}`.
    pub(crate) fn phases(&self, t: &[f64]) -> Vec<Complex64> {
        let n = self.n_photons();
        let mut p = Vec::with_capacity(n * n);
        for &w in self.model.frequencies() {
            for &tk in t {
                p.push(Complex64::from_polar(1.0, -w * tk));
            }
        }
        p
    }
}
