//! Dense complex matrices, matrix permanents, Haar-random unitaries and
//! circulant determinants.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permgroup;

/// Max-norm tolerance on `U†U - I` for a matrix to count as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Largest permanent evaluated by the `O(2^N·N)` formulas.
pub const MAX_PERMANENT_N: usize = 30;

/// Largest permanent evaluated by the direct `N!` expansion.
pub const MAX_NAIVE_PERMANENT_N: usize = 9;

/// Dense complex matrix in row-major order with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(
                "matrix must have at least one row and column".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(i) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: i / cols,
                col: i % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    /// Builds a matrix from separate real and imaginary row lists.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let rows = re.len();
        if im.len() != rows {
            return Err(Error::Dimension(
                "real and imaginary parts differ in rows".into(),
            ));
        }
        let cols = re.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for (r, (re_row, im_row)) in re.iter().zip(im).enumerate() {
            if re_row.len() != cols || im_row.len() != cols {
                return Err(Error::Dimension(format!("row {r} has inconsistent length")));
            }
            data.extend(
                re_row
                    .iter()
                    .zip(im_row)
                    .map(|(&a, &b)| Complex64::new(a, b)),
            );
        }
        Self::from_row_major(rows, cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            data[k * n + k] = Complex64::new(1.0, 0.0);
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Submatrix on the given rows and columns; indices may repeat.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<ComplexMatrix> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::OutOfRange {
                what: "row",
                index: r,
                bound: self.rows,
            });
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::OutOfRange {
                what: "column",
                index: c,
                bound: self.cols,
            });
        }
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let (rows, cols) = (self.cols, self.rows);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(self.get(c, r).conj());
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                for c in 0..other.cols {
                    data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// `max |(A†A - I)_{ij}|`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Result<Self> {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|z| format!("{z:.6}")).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Square matrix whose unitarity was checked to [`UNITARITY_TOLERANCE`].
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: ComplexMatrix,
}

impl UnitaryMatrix {
    /// Validates unitarity; matrices outside tolerance are rejected, never
    /// repaired.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "unitary must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let residual = m.unitarity_residual();
        if residual > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary {
                residual,
                tolerance: UNITARITY_TOLERANCE,
            });
        }
        Ok(Self { m })
    }

    /// Number of modes `M`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.m.get(r, c)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn residual(&self) -> f64 {
        self.m.unitarity_residual()
    }

    pub fn to_json(&self) -> UnitaryJson {
        let n = self.dim();
        let re = (0..n)
            .map(|r| self.m.row(r).iter().map(|z| z.re).collect())
            .collect();
        let im = (0..n)
            .map(|r| self.m.row(r).iter().map(|z| z.im).collect())
            .collect();
        UnitaryJson { m: n, re, im }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parsed: UnitaryJson = serde_json::from_str(&text)?;
        parsed.try_into()
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary({:?})", self.m)
    }
}

/// On-disk unitary: `{"m": M, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryJson {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<UnitaryJson> for UnitaryMatrix {
    type Error = Error;

    fn try_from(j: UnitaryJson) -> Result<Self> {
        if j.re.len() != j.m {
            return Err(Error::Dimension(format!(
                "declared m = {} but {} rows given",
                j.m,
                j.re.len()
            )));
        }
        UnitaryMatrix::new(ComplexMatrix::from_parts(&j.re, &j.im)?)
    }
}

/// Selects the permanent algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermanentMethod {
    #[default]
    Glynn,
    Ryser,
    Naive,
}

/// `per(A) = Σ_σ Π_k A_{σ(k),k}` using Glynn's formula with Gray-code updates.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    permanent_with(m, PermanentMethod::Glynn)
}

pub fn permanent_with(m: &ComplexMatrix, method: PermanentMethod) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    match method {
        PermanentMethod::Naive => permanent_naive(m),
        _ if n > MAX_PERMANENT_N => Err(Error::size("permanent size", n, MAX_PERMANENT_N)),
        PermanentMethod::Glynn => Ok(glynn(m.as_slice(), n)),
        PermanentMethod::Ryser => Ok(ryser(m.as_slice(), n)),
    }
}

/// Direct sum over all `N!` permutations.
pub fn permanent_naive(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n > MAX_NAIVE_PERMANENT_N {
        return Err(Error::size(
            "naive permanent size",
            n,
            MAX_NAIVE_PERMANENT_N,
        ));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for sigma in permgroup::iterate_group(n)? {
        let mut prod = Complex64::new(1.0, 0.0);
        for k in 0..n {
            prod *= m.get(sigma.apply(k), k);
        }
        total += prod;
    }
    Ok(total)
}

/// Glynn: `per(A) = 2^{1-n} Σ_δ (Π δ_k) Π_j Σ_k δ_k a_{kj}`, `δ_0 = +1`.
/// `a` is row-major `n x n`.
pub(crate) fn glynn(a: &[Complex64], n: usize) -> Complex64 {
    if n == 1 {
        return a[0];
    }
    let mut sums: Vec<Complex64> = (0..n).map(|j| (0..n).map(|k| a[k * n + j]).sum()).collect();
    let mut delta = vec![1.0f64; n];
    let mut sign = 1.0;
    let mut total: Complex64 = sums.iter().product();
    let count: u64 = 1 << (n - 1);
    for g in 1..count {
        let row = g.trailing_zeros() as usize + 1;
        delta[row] = -delta[row];
        let factor = 2.0 * delta[row];
        let base = row * n;
        for (j, s) in sums.iter_mut().enumerate() {
            *s += a[base + j] * factor;
        }
        sign = -sign;
        let prod: Complex64 = sums.iter().product();
        total += prod * sign;
    }
    total / count as f64
}

/// Ryser: `per(A) = (-1)^n Σ_{S ⊆ cols} (-1)^{|S|} Π_i Σ_{j∈S} a_{ij}`,
/// subsets visited in Gray-code order.
pub(crate) fn ryser(a: &[Complex64], n: usize) -> Complex64 {
    let mut sums = vec![Complex64::new(0.0, 0.0); n];
    let mut in_set = vec![false; n];
    let mut size = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    let count: u64 = 1 << n;
    for g in 1..count {
        let col = g.trailing_zeros() as usize;
        let add = !in_set[col];
        in_set[col] = add;
        if add {
            size += 1;
            for (i, s) in sums.iter_mut().enumerate() {
                *s += a[i * n + col];
            }
        } else {
            size -= 1;
            for (i, s) in sums.iter_mut().enumerate() {
                *s -= a[i * n + col];
            }
        }
        let prod: Complex64 = sums.iter().product();
        if size % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 0 {
        total
    } else {
        -total
    }
}

/// Haar-random `m x m` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` folded back into `Q`. Deterministic in `seed`.
pub fn haar_unitary(m: usize, seed: u64) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::Domain("unitary dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(m * m);
    for _ in 0..m * m {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        entries.push(Complex64::new(re, im) * FRAC_1_SQRT_2);
    }
    let z = DMatrix::from_row_slice(m, m, &entries);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..m {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..m {
            q[(row, c)] *= phase;
        }
    }
    UnitaryMatrix::new(ComplexMatrix::from_nalgebra(&q)?)
}

/// Balanced beam splitter `[[1, 1], [1, -1]] / √2` (second diagonal entry
/// negated).
pub fn beam_splitter_50_50() -> UnitaryMatrix {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let m = ComplexMatrix::from_row_major(2, 2, vec![h, h, h, -h])
        .expect("constant matrix is well formed");
    UnitaryMatrix::new(m).expect("balanced beam splitter is unitary")
}

/// Real circulant matrix given by its first column `a`:
/// `A_{jk} = a_{(j-k) mod n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec {
    pub a: Vec<f64>,
}

impl CirculantSpec {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Domain(
                "circulant generator must be non-empty".into(),
            ));
        }
        Ok(Self { a })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Generator polynomial `f(x) = Σ_k a_k x^k` at `x = e^{2πij/n}`.
    fn symbol(&self, j: usize) -> Complex64 {
        let n = self.n();
        self.a
            .iter()
            .enumerate()
            .map(|(k, &ak)| {
                let angle = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                Complex64::from_polar(ak, angle)
            })
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |j, k| self.a[(j + n - k) % n])
    }
}

/// `det A = Π_{j=0}^{n-1} f(ξ^j)`, `ξ = e^{2πi/n}`.
///
/// For a real generator `f(ξ^{n-j}) = conj f(ξ^j)`, so the product is taken
/// over conjugate pairs as `|f(ξ^j)|²`, leaving no imaginary residue.
pub fn circulant_det(spec: &CirculantSpec) -> f64 {
    let n = spec.n();
    let mut det = spec.symbol(0).re;
    for j in 1..=(n - 1) / 2 {
        det *= spec.symbol(j).norm_sqr();
    }
    if n % 2 == 0 {
        det *= spec.symbol(n / 2).re;
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn permanent_small_examples() {
        let id = ComplexMatrix::identity(3);
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        for method in [
            PermanentMethod::Glynn,
            PermanentMethod::Ryser,
            PermanentMethod::Naive,
        ] {
            assert!((permanent_with(&id, method).unwrap() - 1.0).norm() < 1e-14);
            assert!((permanent_with(&ones, method).unwrap() - 6.0).norm() < 1e-13);
        }
        let swap = ComplexMatrix::from_parts(
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
            &[vec![0.0; 2], vec![0.0; 2]],
        )
        .unwrap();
        assert_eq!(permanent_naive(&swap).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(
            permanent_naive(&ComplexMatrix::identity(2)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let ones4 = ComplexMatrix::from_fn(4, 4, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(permanent_naive(&ones4).unwrap(), Complex64::new(24.0, 0.0));
    }

    #[test]
    fn permanent_errors() {
        let rect = ComplexMatrix::from_fn(2, 3, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(permanent(&rect), Err(Error::Dimension(_))));
        assert!(matches!(
            permanent_naive(&random_matrix(10, 1)),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn fast_permanents_match_naive_6x6() {
        let m = random_matrix(6, 99);
        let naive = permanent_naive(&m).unwrap();
        assert!(rel_err(permanent(&m).unwrap(), naive) < 1e-12);
        assert!(rel_err(permanent_with(&m, PermanentMethod::Ryser).unwrap(), naive) < 1e-12);
    }

    #[test]
    fn zero_row_gives_zero_permanent() {
        let mut m = random_matrix(5, 3).as_slice().to_vec();
        for z in &mut m[10..15] {
            *z = Complex64::new(0.0, 0.0);
        }
        let m = ComplexMatrix::from_row_major(5, 5, m).unwrap();
        assert!(permanent(&m).unwrap().norm() < 1e-14);
        assert!(permanent_with(&m, PermanentMethod::Ryser).unwrap().norm() < 1e-14);
    }

    #[test]
    fn haar_examples() {
        let one = haar_unitary(1, 5).unwrap();
        assert!((one.get(0, 0).norm() - 1.0).abs() < 1e-14);

        let u = haar_unitary(8, 42).unwrap();
        assert!(u.residual() <= UNITARITY_TOLERANCE);
        let again = haar_unitary(8, 42).unwrap();
        assert_eq!(u, again);
        assert_ne!(u, haar_unitary(8, 43).unwrap());
    }

    #[test]
    fn haar_unitarity_up_to_32() {
        for m in [2, 5, 16, 32] {
            assert!(haar_unitary(m, m as u64).unwrap().residual() <= UNITARITY_TOLERANCE);
        }
    }

    #[test]
    fn haar_first_entry_is_uniform_on_phase() {
        // For Haar U, |U_00|² ~ Beta(1, m-1) with mean 1/m, and arg U_00 is uniform.
        let m = 4;
        let samples = 4000;
        let mut mean_abs2 = 0.0;
        let mut mean_phase = Complex64::new(0.0, 0.0);
        for seed in 0..samples {
            let z = haar_unitary(m, seed).unwrap().get(0, 0);
            mean_abs2 += z.norm_sqr();
            mean_phase += z / z.norm();
        }
        mean_abs2 /= samples as f64;
        mean_phase /= samples as f64;
        // sd of Beta(1,3) is ~0.19; 4000 samples -> se ~0.003
        assert!((mean_abs2 - 0.25).abs() < 0.015, "{mean_abs2}");
        assert!(mean_phase.norm() < 0.06, "{mean_phase}");
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = ComplexMatrix::from_parts(
            &[vec![1.0, 0.0], vec![0.0, 1.0 + 1e-8]],
            &[vec![0.0; 2], vec![0.0; 2]],
        )
        .unwrap();
        assert!(matches!(
            UnitaryMatrix::new(m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = ComplexMatrix::from_row_major(
            1,
            2,
            vec![Complex64::new(0.0, 0.0), Complex64::new(f64::NAN, 0.0)],
        );
        assert!(matches!(err, Err(Error::NonFinite { row: 0, col: 1 })));
    }

    #[test]
    fn beam_splitter_convention() {
        let bs = beam_splitter_50_50();
        assert!(bs.residual() < 1e-15);
        for r in 0..2 {
            for c in 0..2 {
                assert!((bs.get(r, c).norm() - FRAC_1_SQRT_2).abs() < 1e-15);
            }
        }
        assert!(bs.get(1, 1).re < 0.0);
    }

    #[test]
    fn circulant_examples() {
        assert_eq!(circulant_det(&CirculantSpec::new(vec![3.5]).unwrap()), 3.5);
        let eta2: f64 = 0.01;
        let two = CirculantSpec::new(vec![1.0 + 2.0 * eta2, -2.0 * eta2]).unwrap();
        assert!((circulant_det(&two) - 1.04).abs() < 1e-14);

        let five = CirculantSpec::new(vec![1.0 + 2.0 * eta2, -eta2, 0.0, 0.0, -eta2]).unwrap();
        let lu = five.to_dense().lu().determinant();
        assert!((circulant_det(&five) - lu).abs() / lu < 1e-12);
    }

    #[test]
    fn circulant_matches_lu_for_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=12 {
            for _ in 0..5 {
                let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let spec = CirculantSpec::new(a).unwrap();
                let lu = spec.to_dense().lu().determinant();
                let det = circulant_det(&spec);
                assert!(
                    (det - lu).abs() <= 1e-10 * lu.abs().max(1e-12),
                    "n={n}: {det} vs {lu}"
                );
            }
        }
    }

    #[test]
    fn unitary_json_round_trip_is_bit_exact() {
        let u = haar_unitary(8, 42).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.json");
        u.write_json(&path).unwrap();
        assert_eq!(UnitaryMatrix::read_json(&path).unwrap(), u);
    }

    #[test]
    fn unitary_json_reader_validates() {
        let bad = UnitaryJson {
            m: 2,
            re: vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            im: vec![vec![0.0; 2], vec![0.0; 2]],
        };
        assert!(matches!(
            UnitaryMatrix::try_from(bad),
            Err(Error::NotUnitary { .. })
        ));
        let wrong_m = UnitaryJson {
            m: 3,
            re: vec![vec![1.0]],
            im: vec![vec![0.0]],
        };
        assert!(UnitaryMatrix::try_from(wrong_m).is_err());
    }
}
