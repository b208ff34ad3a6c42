//! Nonlinear time stepping.
//!
//! In Fourier variables the equation reads
//!
//! ```text
//! d/dt u_hat = b(xi) (u_hat + v_hat / 2),   v = u^2,   b(xi) = -i xi/(1+|xi|)
//! ```
//!
//! Two solvers are provided: classical RK4 on this ODE system, and Picard
//! iteration of the Duhamel map on a uniform time grid.

use crate::diagnostics::{norm_hs, norm_weighted, step_diagnostics, StepDiagnostics};
use crate::error::{BlowUp, Error, Result};
use crate::semigroup::{dispersion_table, group_table};
use crate::spectral::{Complex, Field, GridSpec};

/// Samples of a solution at increasing times, all on one grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Field>,
    diagnostics: Vec<StepDiagnostics>,
    s: f64,
    r: f64,
}

impl Trajectory {
    pub fn new(initial: Field, s: f64, r: f64) -> Self {
        let d = step_diagnostics(&initial, s, r);
        Self {
            times: vec![0.0],
            states: vec![initial],
            diagnostics: vec![d],
            s,
            r,
        }
    }

    pub fn push(&mut self, t: f64, state: Field) -> Result<()> {
        let last = *self.times.last().expect("non-empty");
        if !(t > last) {
            return Err(Error::InvalidStep(format!(
                "time {t} does not follow {last}"
            )));
        }
        if state.grid() != self.states[0].grid() {
            return Err(Error::GridMismatch);
        }
        self.diagnostics
            .push(step_diagnostics(&state, self.s, self.r));
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Field] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid(&self) -> &GridSpec {
        self.states[0].grid()
    }

    pub fn initial(&self) -> &Field {
        &self.states[0]
    }

    pub fn last(&self) -> (f64, &Field) {
        let i = self.times.len() - 1;
        (self.times[i], &self.states[i])
    }

    /// Recorded state whose time matches `t` to `1e-9` relative.
    pub fn state_at(&self, t: f64) -> Option<&Field> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times
            .iter()
            .position(|&ti| (ti - t).abs() <= tol)
            .map(|i| &self.states[i])
    }
}

/// Largest retained wavenumber magnitude satisfies `3|k| <= n`.
pub fn dealias_mask(grid: &GridSpec) -> Vec<bool> {
    let n = grid.n() as i64;
    (0..grid.n())
        .map(|idx| 3 * grid.wavenumber(idx).abs() <= n)
        .collect()
}

/// Zero every mode with `|k| > n/3`.
pub fn dealias(field: &Field) -> Field {
    let mask = dealias_mask(field.grid());
    let spectrum = field
        .spectrum()
        .iter()
        .zip(&mask)
        .map(|(&c, &keep)| if keep { c } else { Complex::new(0.0, 0.0) })
        .collect();
    Field::from_spectrum(field.grid(), spectrum).expect("grid length")
}

/// Precomputed tables for the spectral right-hand side.
#[derive(Debug, Clone)]
pub struct RboSystem {
    grid: GridSpec,
    dispersion: Vec<Complex>,
    mask: Vec<bool>,
    nonlinear: bool,
}

impl RboSystem {
    pub fn new(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            dispersion: dispersion_table(grid),
            mask: dealias_mask(grid),
            nonlinear: true,
        }
    }

    /// The linear equation `u_t = A u` only.
    pub fn linear(grid: &GridSpec) -> Self {
        Self {
            nonlinear: false,
            ..Self::new(grid)
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Dealiased spectrum of `u^2`, where `u` is itself dealiased first.
    pub fn square_spectrum(&self, spectrum: &[Complex]) -> Vec<Complex> {
        let filtered: Vec<Complex> = spectrum
            .iter()
            .zip(&self.mask)
            .map(|(&c, &keep)| if keep { c } else { Complex::new(0.0, 0.0) })
            .collect();
        let u = self.grid.inverse_real(&filtered);
        let v: Vec<f64> = u.iter().map(|x| x * x).collect();
        let mut v_hat = self.grid.forward(&v);
        for (c, &keep) in v_hat.iter_mut().zip(&self.mask) {
            if !keep {
                *c = Complex::new(0.0, 0.0);
            }
        }
        v_hat
    }

    /// `b (u_hat + v_hat / 2)`.
    pub fn rhs_spectrum(&self, spectrum: &[Complex]) -> Vec<Complex> {
        if !self.nonlinear {
            return spectrum
                .iter()
                .zip(&self.dispersion)
                .map(|(u, b)| b * u)
                .collect();
        }
        let v_hat = self.square_spectrum(spectrum);
        spectrum
            .iter()
            .zip(&v_hat)
            .zip(&self.dispersion)
            .map(|((u, v), b)| b * (u + 0.5 * v))
            .collect()
    }

    /// Spectrum of the nonlinear term alone, `b v_hat / 2`.
    pub fn nonlinear_spectrum(&self, spectrum: &[Complex]) -> Vec<Complex> {
        self.square_spectrum(spectrum)
            .iter()
            .zip(&self.dispersion)
            .map(|(v, b)| 0.5 * b * v)
            .collect()
    }

    pub fn rk4_spectrum(&self, spectrum: &[Complex], dt: f64) -> Vec<Complex> {
        let stage = |base: &[Complex], k: &[Complex], h: f64| -> Vec<Complex> {
            base.iter().zip(k).map(|(u, k)| u + k * h).collect()
        };
        let k1 = self.rhs_spectrum(spectrum);
        let k2 = self.rhs_spectrum(&stage(spectrum, &k1, 0.5 * dt));
        let k3 = self.rhs_spectrum(&stage(spectrum, &k2, 0.5 * dt));
        let k4 = self.rhs_spectrum(&stage(spectrum, &k3, dt));
        spectrum
            .iter()
            .enumerate()
            .map(|(i, u)| u + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
            .collect()
    }
}

fn all_finite(spectrum: &[Complex]) -> bool {
    spectrum
        .iter()
        .all(|c| c.re.is_finite() && c.im.is_finite())
}

/// `A u + f(u)` as a field.
pub fn rhs(field: &Field) -> Field {
    let system = RboSystem::new(field.grid());
    Field::from_spectrum(field.grid(), system.rhs_spectrum(field.spectrum())).expect("grid length")
}

pub fn rk4_step(state: &Field, dt: f64) -> Result<Field> {
    step_with(&RboSystem::new(state.grid()), state, dt)
}

pub fn step_with(system: &RboSystem, state: &Field, dt: f64) -> Result<Field> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(format!("dt = {dt} must be positive")));
    }
    let next = system.rk4_spectrum(state.spectrum(), dt);
    if !all_finite(&next) {
        return Err(Error::BlowUp(Box::new(BlowUp {
            time: dt,
            last_finite: Trajectory::new(state.clone(), 1.0, 0.0),
        })));
    }
    Field::from_spectrum(state.grid(), next)
}

/// Regularity and weight used for the per-sample diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub s: f64,
    pub r: f64,
    pub nonlinear: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            s: 1.0,
            r: 2.0,
            nonlinear: true,
        }
    }
}

/// Number of steps of size `dt` covering `[0, t_final]`.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidStep(format!("T = {t_final} must be >= 0")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(format!("dt = {dt} must be positive")));
    }
    let steps = (t_final / dt).round();
    if (steps * dt - t_final).abs() > 1e-9 * t_final.max(1.0) {
        return Err(Error::InvalidStep(format!(
            "T = {t_final} is not a whole number of steps of {dt}"
        )));
    }
    Ok(steps as usize)
}

pub fn evolve(phi: &Field, t_final: f64, dt: f64, stride: usize) -> Result<Trajectory> {
    evolve_with(phi, t_final, dt, stride, EvolveOptions::default())
}

/// RK4 from `phi` to `t_final`, recording every `stride` steps and at the end.
pub fn evolve_with(
    phi: &Field,
    t_final: f64,
    dt: f64,
    stride: usize,
    options: EvolveOptions,
) -> Result<Trajectory> {
    if stride == 0 {
        return Err(Error::InvalidStep("stride must be at least 1".into()));
    }
    let steps = step_count(t_final, dt)?;
    let system = if options.nonlinear {
        RboSystem::new(phi.grid())
    } else {
        RboSystem::linear(phi.grid())
    };
    let mut traj = Trajectory::new(phi.clone(), options.s, options.r);
    let mut spectrum = phi.spectrum().to_vec();
    for step in 1..=steps {
        let next = system.rk4_spectrum(&spectrum, dt);
        if !all_finite(&next) {
            return Err(Error::BlowUp(Box::new(BlowUp {
                time: step as f64 * dt,
                last_finite: traj,
            })));
        }
        spectrum = next;
        if step % stride == 0 || step == steps {
            let state = Field::from_spectrum(phi.grid(), spectrum.clone())?;
            traj.push(step as f64 * dt, state)?;
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    /// Length of the time interval.
    pub t_final: f64,
    /// Number of time nodes including both ends.
    pub nt: usize,
    /// Stop once `sup_t ||u^{m+1} - u^m||_{s,2} < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Regularity of the convergence norm.
    pub s: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            t_final: 0.25,
            nt: 101,
            tol: 1e-10,
            max_iter: 60,
            s: 1.0,
        }
    }
}

impl PicardConfig {
    fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidPicard(format!(
                "T = {} must be positive",
                self.t_final
            )));
        }
        if self.nt < 2 {
            return Err(Error::InvalidPicard(format!(
                "nt = {} must be at least 2",
                self.nt
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidPicard(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidPicard("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn node_spacing(&self) -> f64 {
        self.t_final / (self.nt - 1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    /// `d_{m+1} / d_m` for successive sup-norm differences.
    pub rates: Vec<f64>,
    pub differences: Vec<f64>,
    pub iterations: usize,
    /// `sup_t ||u - Phi(u)||_{s,2}` at the returned iterate.
    pub residual: f64,
    /// `sup_t ||E(t) phi - u(t)||_{s,2}`, the radius of the ball the fixed
    /// point actually occupies.
    pub ball_radius: f64,
}

impl PicardOutcome {
    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }
}

struct DuhamelMap {
    system: RboSystem,
    /// `F(l * dtau)` for `l = 0..nt`.
    propagators: Vec<Vec<Complex>>,
    free: Vec<Vec<Complex>>,
    dtau: f64,
}

impl DuhamelMap {
    fn new(phi: &Field, cfg: &PicardConfig) -> Self {
        let grid = phi.grid();
        let dtau = cfg.node_spacing();
        let propagators: Vec<Vec<Complex>> = (0..cfg.nt)
            .map(|l| group_table(grid, l as f64 * dtau))
            .collect();
        let free = propagators
            .iter()
            .map(|f| f.iter().zip(phi.spectrum()).map(|(a, b)| a * b).collect())
            .collect();
        Self {
            system: RboSystem::new(grid),
            propagators,
            free,
            dtau,
        }
    }

    /// `Phi(u)(t_i) = E(t_i) phi + \int_0^{t_i} E(t_i - tau) f(u(tau)) dtau`,
    /// trapezoid rule on the nodes.
    fn apply(&self, u: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
        let forcing: Vec<Vec<Complex>> = u
            .iter()
            .map(|s| self.system.nonlinear_spectrum(s))
            .collect();
        let n = self.system.grid().n();
        (0..u.len())
            .map(|i| {
                let mut out = self.free[i].clone();
                if i == 0 {
                    return out;
                }
                let mut acc = vec![Complex::new(0.0, 0.0); n];
                for (m, f) in forcing.iter().enumerate().take(i + 1) {
                    let w = if m == 0 || m == i { 0.5 } else { 1.0 };
                    let prop = &self.propagators[i - m];
                    for ((a, p), g) in acc.iter_mut().zip(prop).zip(f) {
                        *a += w * p * g;
                    }
                }
                for (o, a) in out.iter_mut().zip(&acc) {
                    *o += a * self.dtau;
                }
                out
            })
            .collect()
    }
}

fn sup_distance(grid: &GridSpec, a: &[Vec<Complex>], b: &[Vec<Complex>], s: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff: Vec<Complex> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            let f = Field::from_spectrum(grid, diff).expect("grid length");
            norm_hs(&f, s).hypot(norm_weighted(&f, 2.0))
        })
        .fold(0.0, f64::max)
}

/// Iterate the Duhamel map from `u^0(t) = E(t) phi` to a fixed point.
pub fn picard_solve(phi: &Field, cfg: &PicardConfig) -> Result<PicardOutcome> {
    cfg.validate()?;
    let grid = phi.grid();
    let map = DuhamelMap::new(phi, cfg);
    let mut current = map.free.clone();
    let mut differences = Vec::new();
    let mut rates = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let next = map.apply(&current);
        let d = sup_distance(grid, &next, &current, cfg.s);
        if let Some(&prev) = differences.last() {
            if prev > 0.0 {
                rates.push(d / prev);
            }
        }
        differences.push(d);
        current = next;
        if !d.is_finite() {
            break;
        }
        if d < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations,
            last_difference: *differences.last().unwrap_or(&f64::NAN),
            rates,
        });
    }
    let residual = sup_distance(grid, &map.apply(&current), &current, cfg.s);
    let ball_radius = sup_distance(grid, &map.free, &current, cfg.s);
    let dtau = cfg.node_spacing();
    let mut states = current.into_iter();
    let first = Field::from_spectrum(grid, states.next().expect("nt >= 2"))?;
    let mut trajectory = Trajectory::new(first, cfg.s, 2.0);
    for (i, spec) in states.enumerate() {
        trajectory.push((i + 1) as f64 * dtau, Field::from_spectrum(grid, spec)?)?;
    }
    Ok(PicardOutcome {
        trajectory,
        rates,
        differences,
        iterations,
        residual,
        ball_radius,
    })
}

/// Starting interval `1 / (8 (||phi||_{s,2} + 1))`.
pub fn heuristic_contraction_time(phi: &Field, s: f64) -> f64 {
    let norm = norm_hs(phi, s).hypot(norm_weighted(phi, 2.0));
    1.0 / (8.0 * (norm + 1.0))
}

/// Halve `T` from the heuristic start until Picard converges with every
/// observed rate below `1/2`.
pub fn choose_contraction_time(phi: &Field, base: &PicardConfig) -> Result<PicardOutcome> {
    let mut t = heuristic_contraction_time(phi, base.s);
    for _ in 0..30 {
        let cfg = PicardConfig {
            t_final: t,
            ..*base
        };
        if let Ok(outcome) = picard_solve(phi, &cfg) {
            if outcome.max_rate() < 0.5 {
                return Ok(outcome);
            }
        }
        t *= 0.5;
    }
    Err(Error::InvalidPicard(
        "no contracting interval found after 30 halvings".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::conserved_q;
    use crate::semigroup::{group_apply, group_factor, symbol_b};
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn rhs_of_zero_and_constant() {
        let g = make_grid(64, 20.0).unwrap();
        assert_eq!(rhs(&Field::zeros(&g)).max_abs(), 0.0);
        let c = Field::from_fn(&g, |_| 0.7);
        assert!(rhs(&c).max_abs() < 1e-15);
    }

    #[test]
    fn rhs_linear_part_on_cosine() {
        // b(+-1) = -+ i/2: the linear term maps cos x to (1/2) sin x
        let g = make_grid(64, 2.0 * PI).unwrap();
        let u = Field::from_fn(&g, f64::cos);
        let lin = RboSystem::linear(&g);
        let out = Field::from_spectrum(&g, lin.rhs_spectrum(u.spectrum())).unwrap();
        let b1 = symbol_b(1.0);
        assert_eq!(b1, Complex::new(0.0, -0.5));
        let expected = Field::from_fn(&g, |x| 0.5 * x.sin());
        assert!(max_diff(&out, &expected) < 1e-14);
    }

    #[test]
    fn dealias_examples() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let low = Field::from_fn(&g, |x| (3.0 * x).cos() + (21.0 * x).sin());
        assert!(max_diff(&dealias(&low), &low) < 1e-13);
        let noise = Field::from_fn(&g, |x| {
            (0..32)
                .map(|k| ((k * k) as f64 * 0.37 + k as f64 * x).sin())
                .sum()
        });
        let cut = dealias(&noise);
        for (idx, c) in cut.spectrum().iter().enumerate() {
            if 3 * g.wavenumber(idx).abs() > 64 {
                assert_eq!(c.norm(), 0.0);
            }
        }
    }

    #[test]
    fn dealiased_square_matches_convolution() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let n = 32_i64;
        let modes: Vec<(i64, f64, f64)> = vec![
            (0, 0.3, 0.0),
            (2, 0.5, -0.2),
            (5, -0.1, 0.4),
            (10, 0.2, 0.1),
        ];
        let f = Field::from_fn(&g, |x| {
            modes
                .iter()
                .map(|&(k, a, b)| a * (k as f64 * x).cos() + b * (k as f64 * x).sin())
                .sum()
        });
        let sys = RboSystem::new(&g);
        let got = sys.square_spectrum(f.spectrum());
        // direct convolution: (u^2)_hat_k = (1/L) sum_{p+q=k} u_hat_p u_hat_q
        let spec = f.spectrum();
        for idx in 0..32 {
            let k = g.wavenumber(idx);
            let mut acc = Complex::new(0.0, 0.0);
            for p in -n / 2..n / 2 {
                let q = k - p;
                if q < -n / 2 || q >= n / 2 {
                    continue;
                }
                acc += spec[g.index_of(p)] * spec[g.index_of(q)];
            }
            acc /= g.length();
            if 3 * k.abs() > n {
                acc = Complex::new(0.0, 0.0);
            }
            assert!((got[idx] - acc).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn rk4_zero_and_linear_mode() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let z = rk4_step(&Field::zeros(&g), 0.1).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        let lin = RboSystem::linear(&g);
        let u = Field::from_fn(&g, f64::cos);
        let dt = 0.01;
        let next = step_with(&lin, &u, dt).unwrap();
        let k1 = g.index_of(1);
        let ratio = next.spectrum()[k1] / u.spectrum()[k1];
        assert!((ratio - group_factor(dt, 1.0)).norm() < 1e-11);
        assert!(rk4_step(&u, 0.0).is_err());
    }

    #[test]
    fn evolve_zero_time() {
        let g = make_grid(64, 20.0).unwrap();
        let phi = Field::from_fn(&g, |x| (-x * x).exp());
        let traj = evolve(&phi, 0.0, 1e-3, 1).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.times(), &[0.0]);
    }

    #[test]
    fn evolve_rejects_fractional_step_count() {
        let g = make_grid(64, 20.0).unwrap();
        let phi = Field::zeros(&g);
        assert!(evolve(&phi, 1.0, 0.3, 1).is_err());
        assert!(evolve(&phi, -1.0, 0.1, 1).is_err());
        assert!(evolve(&phi, 1.0, 0.1, 0).is_err());
    }

    #[test]
    fn evolve_records_on_stride_and_final() {
        let g = make_grid(64, 20.0).unwrap();
        let phi = Field::from_fn(&g, |x| 0.3 * (-x * x).exp());
        let traj = evolve(&phi, 0.5, 0.1, 2).unwrap();
        let t = traj.times();
        assert_eq!(t.len(), 4);
        assert!((t[1] - 0.2).abs() < 1e-12 && (t[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mean_mode_and_q_preserved() {
        let g = make_grid(256, 16.0 * PI).unwrap();
        let phi = Field::from_fn(&g, |x| (-x * x).exp());
        let traj = evolve(&phi, 1.0, 1e-2, 10).unwrap();
        let m0 = phi.spectrum()[0];
        let q0 = conserved_q(&phi);
        for s in traj.states() {
            assert!((s.spectrum()[0] - m0).norm() < 1e-12);
            assert!((conserved_q(s) - q0).abs() < 1e-9 * q0);
        }
    }

    #[test]
    fn small_data_follows_linear_group() {
        let g = make_grid(256, 16.0 * PI).unwrap();
        let phi = Field::from_fn(&g, |x| 1e-6 * (-x * x).exp());
        let traj = evolve(&phi, 1.0, 1e-2, 100).unwrap();
        let lin = group_apply(1.0, &phi);
        assert!(max_diff(traj.last().1, &lin) < 1e-9);
    }

    #[test]
    fn picard_zero_data() {
        let g = make_grid(64, 20.0).unwrap();
        let out = picard_solve(&Field::zeros(&g), &PicardConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.rates.is_empty());
        assert_eq!(out.trajectory.len(), 101);
    }

    #[test]
    fn picard_rejects_bad_config() {
        let g = make_grid(64, 20.0).unwrap();
        let phi = Field::zeros(&g);
        for cfg in [
            PicardConfig {
                t_final: 0.0,
                ..Default::default()
            },
            PicardConfig {
                nt: 1,
                ..Default::default()
            },
            PicardConfig {
                tol: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                picard_solve(&phi, &cfg),
                Err(Error::InvalidPicard(_))
            ));
        }
    }

    #[test]
    fn picard_residual_small() {
        let g = make_grid(256, 16.0 * PI).unwrap();
        let phi = Field::from_fn(&g, |x| 0.5 * (-x * x).exp());
        let cfg = PicardConfig {
            t_final: 0.2,
            nt: 21,
            ..Default::default()
        };
        let out = picard_solve(&phi, &cfg).unwrap();
        assert!(out.residual < 2.0 * cfg.tol);
        assert!(out.ball_radius > 0.0);
        assert!(out.max_rate() < 0.5);
    }
}
