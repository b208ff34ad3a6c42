//! Periodic grids, the discrete Fourier pair, and static Fourier multipliers.
//!
//! All transforms in the crate use one convention. The forward transform
//! discretizes the continuous `f_hat(xi) = \int f(x) e^{-i x xi} dx` on the
//! nodes `x_j = -L/2 + j dx`:
//!
//! ```text
//! f_hat(xi_k) = dx * sum_j f(x_j) e^{-i xi_k x_j},      xi_k = 2 pi k / L
//! f(x_j)      = (1/L) * sum_k f_hat(xi_k) e^{i xi_k x_j}
//! ```
//!
//! so Plancherel reads `sum_j |f_j|^2 dx = (1/L) sum_k |f_hat_k|^2`, i.e. the
//! continuous `(1/2pi) \int |f_hat|^2 dxi` with `dxi = 2 pi / L`. Spectra are
//! stored in FFT order: indices `0..n/2` carry `k = 0..n/2-1`, the rest carry
//! `k = -n/2..-1`. The unpaired Nyquist mode sits at index `n/2`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Sign with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

struct GridInner {
    n: usize,
    length: f64,
    dx: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid on `[-L/2, L/2)`.
///
/// Cloning is cheap; FFT plans are shared and safe to use from several
/// threads at once (scratch space is allocated per call).
#[derive(Clone)]
pub struct GridSpec {
    inner: Arc<GridInner>,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n
                && self.inner.length.to_bits() == other.inner.length.to_bits())
    }
}

pub fn make_grid(n: usize, length: f64) -> Result<GridSpec> {
    GridSpec::new(n, length)
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 8"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length = {length} must be positive and finite"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                length,
                dx: length / n as f64,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn dx(&self) -> f64 {
        self.inner.dx
    }

    /// Spacing of the spectral grid, `2 pi / L`.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::TAU / self.inner.length
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.inner.length + j as f64 * self.inner.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.node(j)).collect()
    }

    /// Integer wavenumber stored at spectral index `idx`.
    pub fn wavenumber(&self, idx: usize) -> i64 {
        let n = self.n();
        if idx < n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    /// Spectral index holding wavenumber `k`, for `-n/2 <= k < n/2`.
    pub fn index_of(&self, k: i64) -> usize {
        let n = self.n() as i64;
        debug_assert!(-n / 2 <= k && k < n / 2);
        k.rem_euclid(n) as usize
    }

    pub fn nyquist_index(&self) -> usize {
        self.n() / 2
    }

    /// Index of the mode paired with `idx` under `k -> -k`.
    pub fn mirror_index(&self, idx: usize) -> usize {
        (self.n() - idx) % self.n()
    }

    pub fn frequency(&self, idx: usize) -> f64 {
        self.wavenumber(idx) as f64 * self.dxi()
    }

    /// Frequencies in storage (FFT) order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.frequency(i)).collect()
    }

    /// Frequencies in ascending order, `-n/2 .. n/2-1` times `2 pi / L`.
    pub fn sorted_frequencies(&self) -> Vec<f64> {
        let half = self.n() as i64 / 2;
        (-half..half).map(|k| k as f64 * self.dxi()).collect()
    }

    /// Same grid scaled to twice the length with the same spacing.
    pub fn doubled(&self) -> Result<Self> {
        Self::new(2 * self.n(), 2.0 * self.length())
    }

    /// Same domain at twice the resolution.
    pub fn refined(&self) -> Result<Self> {
        Self::new(2 * self.n(), self.length())
    }

    fn phase(&self, idx: usize) -> f64 {
        // e^{i xi_k L / 2} = (-1)^k
        if self.wavenumber(idx).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Forward transform of real samples.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex> {
        assert_eq!(values.len(), self.n());
        let mut buf: Vec<Complex> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.inner.forward.process(&mut buf);
        let dx = self.dx();
        for (idx, c) in buf.iter_mut().enumerate() {
            *c *= dx * self.phase(idx);
        }
        buf
    }

    /// Inverse transform; the result is complex unless the input is Hermitian.
    pub fn inverse(&self, spectrum: &[Complex]) -> Vec<Complex> {
        assert_eq!(spectrum.len(), self.n());
        let scale = 1.0 / self.length();
        let mut buf: Vec<Complex> = spectrum
            .iter()
            .enumerate()
            .map(|(idx, &c)| c * (scale * self.phase(idx)))
            .collect();
        self.inner.inverse.process(&mut buf);
        buf
    }

    pub fn inverse_real(&self, spectrum: &[Complex]) -> Vec<f64> {
        self.inverse(spectrum).into_iter().map(|c| c.re).collect()
    }

    /// Evaluate a symbol on the grid, after checking that it maps real
    /// fields to real fields.
    ///
    /// Paired modes must satisfy `m(-xi) = conj(m(xi))`. The Nyquist mode
    /// takes the real part of that pairing; odd symbols therefore vanish
    /// there.
    pub fn symbol_table(&self, symbol: &MultiplierSymbol) -> Result<Vec<Complex>> {
        let n = self.n();
        let mut table: Vec<Complex> = (0..n).map(|i| symbol.eval(self.frequency(i))).collect();
        if let Some(idx) = table.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::BrokenSymmetry {
                name: symbol.name().to_string(),
                k: self.wavenumber(idx),
            });
        }
        for idx in 1..n / 2 {
            let a = table[idx];
            let b = table[self.mirror_index(idx)];
            if (b - a.conj()).norm() > 1e-12 * (1.0 + a.norm()) {
                return Err(Error::BrokenSymmetry {
                    name: symbol.name().to_string(),
                    k: self.wavenumber(idx),
                });
            }
        }
        if table[0].im.abs() > 1e-12 * (1.0 + table[0].norm()) {
            return Err(Error::BrokenSymmetry {
                name: symbol.name().to_string(),
                k: 0,
            });
        }
        table[0].im = 0.0;
        let nyq = self.nyquist_index();
        let xi = self.frequency(nyq);
        let paired = 0.5 * (symbol.eval(xi) + symbol.eval(-xi).conj());
        table[nyq] = Complex::new(paired.re, 0.0);
        Ok(table)
    }

    /// Weighted spectral sum `(1/L) sum_k w(xi_k) |c_k|^2`.
    pub fn spectral_sum(&self, spectrum: &[Complex], weight: impl Fn(f64) -> f64) -> f64 {
        let scale = 1.0 / self.length();
        spectrum
            .iter()
            .enumerate()
            .map(|(idx, c)| weight(self.frequency(idx)) * c.norm_sqr())
            .sum::<f64>()
            * scale
    }

    /// Periodic trapezoid rule, `dx * sum_j g(x_j)`.
    pub fn quadrature(&self, integrand: impl Fn(f64, usize) -> f64) -> f64 {
        (0..self.n())
            .map(|j| integrand(self.node(j), j))
            .sum::<f64>()
            * self.dx()
    }
}

/// A real function sampled on a grid, with a cached spectrum.
#[derive(Clone)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl Field {
    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} samples supplied for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            spectrum: OnceLock::new(),
        })
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self {
            grid: grid.clone(),
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self::from_fn(grid, |_| 0.0)
    }

    /// Build a field from spectral coefficients.
    ///
    /// The coefficients are projected onto the Hermitian subspace first, so
    /// the cached spectrum is exactly the transform of the stored samples.
    pub fn from_spectrum(grid: &GridSpec, spectrum: Vec<Complex>) -> Result<Self> {
        if spectrum.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} coefficients supplied for a grid of {} points",
                spectrum.len(),
                grid.n()
            )));
        }
        let projected = hermitian_projection(grid, &spectrum);
        let values = grid.inverse_real(&projected);
        let cell = OnceLock::new();
        let _ = cell.set(projected);
        Ok(Self {
            grid: grid.clone(),
            values,
            spectrum: cell,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex] {
        self.spectrum
            .get_or_init(|| self.grid.forward(&self.values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, factor: f64) -> Field {
        Field::from_values(&self.grid, self.values.iter().map(|v| v * factor).collect())
            .expect("same length")
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Field::from_values(&self.grid, values)
    }
}

fn hermitian_projection(grid: &GridSpec, spectrum: &[Complex]) -> Vec<Complex> {
    (0..grid.n())
        .map(|idx| 0.5 * (spectrum[idx] + spectrum[grid.mirror_index(idx)].conj()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Synchronize one representation of `field` from the other.
///
/// `Forward` fills the spectrum from the samples, `Inverse` recomputes the
/// samples from the spectrum.
pub fn transform(field: &Field, direction: Direction) -> Field {
    match direction {
        Direction::Forward => {
            let out = field.clone();
            out.spectrum();
            out
        }
        Direction::Inverse => Field::from_spectrum(field.grid(), field.spectrum().to_vec())
            .expect("spectrum length matches its own grid"),
    }
}

/// A Fourier multiplier `m(xi)`.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    eval: Arc<dyn Fn(f64) -> Complex + Send + Sync>,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("MultiplierSymbol").field(&self.name).finish()
    }
}

impl MultiplierSymbol {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> Complex + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(f),
        }
    }

    pub fn real(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(name, move |xi| Complex::new(f(xi), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi: f64) -> Complex {
        (self.eval)(xi)
    }

    pub fn identity() -> Self {
        Self::real("1", |_| 1.0)
    }

    /// `-i sgn(xi)`, the Hilbert transform.
    pub fn hilbert() -> Self {
        Self::new("-i sgn(xi)", |xi| Complex::new(0.0, -sgn(xi)))
    }

    /// `i xi`, i.e. `d/dx`.
    pub fn derivative() -> Self {
        Self::new("i xi", |xi| Complex::new(0.0, xi))
    }

    /// `1/(1+|xi|)`, the inverse of `1 + H d/dx`.
    pub fn regularizer() -> Self {
        Self::real("1/(1+|xi|)", |xi| 1.0 / (1.0 + xi.abs()))
    }

    /// `i xi/(1+|xi|)`, the operator `d/dx (1 + H d/dx)^{-1}`.
    pub fn regularized_derivative() -> Self {
        Self::new("i xi/(1+|xi|)", |xi| {
            Complex::new(0.0, xi / (1.0 + xi.abs()))
        })
    }

    pub fn homogeneous(order: f64) -> Self {
        Self::real(format!("|xi|^{order}"), move |xi| {
            if xi == 0.0 {
                if order == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                xi.abs().powf(order)
            }
        })
    }

    pub fn bessel(order: f64) -> Self {
        Self::real(format!("(1+xi^2)^({order}/2)"), move |xi| {
            (1.0 + xi * xi).powf(0.5 * order)
        })
    }

    pub fn tilde(order: f64) -> Self {
        Self::real(format!("(1+|xi|)^{order}"), move |xi| {
            (1.0 + xi.abs()).powf(order)
        })
    }
}

pub fn apply_multiplier(field: &Field, symbol: &MultiplierSymbol) -> Result<Field> {
    let table = field.grid().symbol_table(symbol)?;
    Ok(apply_table(field, &table))
}

/// Multiply by a precomputed, already validated symbol table.
pub fn apply_table(field: &Field, table: &[Complex]) -> Field {
    let spectrum = field
        .spectrum()
        .iter()
        .zip(table)
        .map(|(u, m)| u * m)
        .collect();
    Field::from_spectrum(field.grid(), spectrum).expect("table has grid length")
}

pub fn hilbert_transform(field: &Field) -> Field {
    apply_multiplier(field, &MultiplierSymbol::hilbert()).expect("Hilbert symbol is Hermitian")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionalKind {
    /// `D^s`, symbol `|xi|^s`.
    Homogeneous,
    /// `J^s`, symbol `(1+xi^2)^{s/2}`.
    Bessel,
    /// `(1 + H d/dx)^s`, symbol `(1+|xi|)^s`.
    Tilde,
}

pub fn fractional_operator(field: &Field, kind: FractionalKind, order: f64) -> Result<Field> {
    if !order.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "operator order {order} is not finite"
        )));
    }
    let symbol = match kind {
        FractionalKind::Homogeneous => {
            if order < 0.0 {
                let spec = field.spectrum();
                let mean = spec[0].re;
                let scale = spec.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
                if mean.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::NonzeroMean { order, mean });
                }
            }
            MultiplierSymbol::homogeneous(order)
        }
        FractionalKind::Bessel => MultiplierSymbol::bessel(order),
        FractionalKind::Tilde => MultiplierSymbol::tilde(order),
    };
    apply_multiplier(field, &symbol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn grid_frequencies_for_two_pi() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let xs: Vec<f64> = g.sorted_frequencies();
        let expected: Vec<f64> = (-4..4).map(|k| k as f64).collect();
        assert!(max_diff(&xs, &expected) < 1e-15);
    }

    #[test]
    fn grid_spacing() {
        let g = make_grid(1024, 64.0 * PI).unwrap();
        assert_eq!(g.dx(), 64.0 * PI / 1024.0);
        assert_eq!(g.dx() * g.n() as f64, g.length());
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(make_grid(7, 10.0).is_err());
        assert!(make_grid(4, 10.0).is_err());
        assert!(make_grid(1000, 10.0).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -1.0).is_err());
    }

    #[test]
    fn frequency_grid_symmetric_except_nyquist() {
        let g = make_grid(16, 3.0).unwrap();
        for idx in 1..8 {
            assert_eq!(g.frequency(idx), -g.frequency(g.mirror_index(idx)));
        }
        assert_eq!(g.wavenumber(g.nyquist_index()), -8);
    }

    #[test]
    fn cosine_has_two_modes() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, f64::cos);
        let spec = f.spectrum();
        for (idx, c) in spec.iter().enumerate() {
            let k = g.wavenumber(idx);
            if k.abs() == 1 {
                // dx * n/2 = L/2 = pi
                assert!((c.re - PI).abs() < 1e-12 && c.im.abs() < 1e-12);
            } else {
                assert!(c.norm() < 1e-13, "k={k} {c}");
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let g = make_grid(256, 20.0).unwrap();
        let f = Field::from_fn(&g, |x| (-(x - 1.0).powi(2)).exp() * (3.0 * x).sin() + 0.2);
        let back = transform(&transform(&f, Direction::Forward), Direction::Inverse);
        let scale = f.max_abs();
        assert!(max_diff(f.values(), back.values()) < 1e-12 * scale);
    }

    #[test]
    fn gaussian_plancherel() {
        let g = make_grid(1024, 64.0 * PI).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let physical = g.quadrature(|_, j| f.values()[j].powi(2));
        let spectral = g.spectral_sum(f.spectrum(), |_| 1.0);
        let exact = (PI / 2.0).sqrt();
        assert!((physical - exact).abs() < 1e-10);
        assert!((spectral - physical).abs() < 1e-12 * physical);
    }

    #[test]
    fn multipliers_on_cosine() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, f64::cos);
        let id = apply_multiplier(&f, &MultiplierSymbol::identity()).unwrap();
        assert!(max_diff(id.values(), f.values()) < 1e-14);
        let d = apply_multiplier(&f, &MultiplierSymbol::derivative()).unwrap();
        let minus_sin: Vec<f64> = g.nodes().iter().map(|x| -x.sin()).collect();
        assert!(max_diff(d.values(), &minus_sin) < 1e-13);
        let r = apply_multiplier(&f, &MultiplierSymbol::regularizer()).unwrap();
        let half: Vec<f64> = g.nodes().iter().map(|x| 0.5 * x.cos()).collect();
        assert!(max_diff(r.values(), &half) < 1e-14);
    }

    #[test]
    fn non_hermitian_symbol_is_flagged() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, f64::cos);
        let bad = MultiplierSymbol::new("i", |_| Complex::new(0.0, 1.0));
        assert!(matches!(
            apply_multiplier(&f, &bad),
            Err(Error::BrokenSymmetry { .. })
        ));
        let shift = MultiplierSymbol::real("heaviside", |xi| if xi > 0.0 { 1.0 } else { 0.0 });
        assert!(apply_multiplier(&f, &shift).is_err());
    }

    #[test]
    fn odd_symbols_vanish_at_nyquist() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let nyq = g.nyquist_index();
        for s in [MultiplierSymbol::hilbert(), MultiplierSymbol::derivative()] {
            assert_eq!(g.symbol_table(&s).unwrap()[nyq], Complex::new(0.0, 0.0));
        }
        let even = g.symbol_table(&MultiplierSymbol::regularizer()).unwrap();
        assert_eq!(even[nyq].re, 1.0 / 9.0);
    }

    #[test]
    fn hilbert_of_cosines() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        for k in 1..5 {
            let kf = k as f64;
            let f = Field::from_fn(&g, |x| (kf * x).cos());
            let h = hilbert_transform(&f);
            let sin: Vec<f64> = g.nodes().iter().map(|x| (kf * x).sin()).collect();
            assert!(max_diff(h.values(), &sin) < 1e-13);
        }
        let c = Field::from_fn(&g, |_| 3.0);
        assert!(hilbert_transform(&c).max_abs() < 1e-15);
    }

    #[test]
    fn fractional_examples() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, |x| x.cos() + 0.3 * (2.0 * x).sin());
        let j0 = fractional_operator(&f, FractionalKind::Bessel, 0.0).unwrap();
        assert!(max_diff(j0.values(), f.values()) < 1e-14);
        let c = Field::from_fn(&g, f64::cos);
        let t1 = fractional_operator(&c, FractionalKind::Tilde, 1.0).unwrap();
        let two_cos: Vec<f64> = g.nodes().iter().map(|x| 2.0 * x.cos()).collect();
        assert!(max_diff(t1.values(), &two_cos) < 1e-13);
        // mean-zero input is fine for negative homogeneous order
        let inv = fractional_operator(&c, FractionalKind::Homogeneous, -1.0).unwrap();
        assert!(max_diff(inv.values(), c.values()) < 1e-13);
        let shifted = Field::from_fn(&g, |x| 1.0 + x.cos());
        assert!(matches!(
            fractional_operator(&shifted, FractionalKind::Homogeneous, -0.5),
            Err(Error::NonzeroMean { .. })
        ));
    }

    #[test]
    fn from_spectrum_caches_consistent_spectrum() {
        let g = make_grid(32, 5.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp() * (1.0 + x));
        let rebuilt = Field::from_spectrum(&g, f.spectrum().to_vec()).unwrap();
        let fresh = g.forward(rebuilt.values());
        for (a, b) in fresh.iter().zip(rebuilt.spectrum()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn concurrent_transforms() {
        let g = make_grid(512, 30.0).unwrap();
        let fields: Vec<Field> = (0..8)
            .map(|i| Field::from_fn(&g, move |x| (-(x - i as f64).powi(2)).exp()))
            .collect();
        let serial: Vec<Vec<Complex>> = fields.iter().map(|f| g.forward(f.values())).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = fields
                .iter()
                .map(|f| s.spawn(|| g.forward(f.values())))
                .collect();
            for (h, expected) in handles.into_iter().zip(&serial) {
                assert_eq!(&h.join().unwrap(), expected);
            }
        });
    }
}
