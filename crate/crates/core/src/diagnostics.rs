//! Norms and functionals evaluated on fields and trajectories.
//!
//! Weighted norms are truncated to the computational domain `[-L/2, L/2)`;
//! every report carries `L` so results at two domain sizes can be compared.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::spectral::{Complex, Field};

/// `||u||_{H^s}` from the spectral weight `(1 + xi^2)^s`.
pub fn norm_hs(field: &Field, s: f64) -> f64 {
    field
        .grid()
        .spectral_sum(field.spectrum(), |xi| (1.0 + xi * xi).powf(s))
        .sqrt()
}

/// `|| |x|^r u ||_{L^2}` by the trapezoid rule on the grid.
pub fn norm_weighted(field: &Field, r: f64) -> f64 {
    let values = field.values();
    field
        .grid()
        .quadrature(|x, j| weight(x, r) * values[j] * values[j])
        .sqrt()
}

fn weight(x: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        x.abs().powf(2.0 * r)
    }
}

pub fn l2_norm_sq(field: &Field) -> f64 {
    let values = field.values();
    field.grid().quadrature(|_, j| values[j] * values[j])
}

/// Squared norm of the weighted Sobolev space, `||u||_s^2 + |||x|^r u||_0^2`.
pub fn sigma_norm_sq(field: &Field, s: f64, r: f64) -> f64 {
    norm_hs(field, s).powi(2) + norm_weighted(field, r).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub h_s: f64,
    pub l2_r: f64,
    pub sigma_sr: f64,
    pub r: f64,
    pub s: f64,
    pub length: f64,
}

pub fn norm_report(field: &Field, s: f64, r: f64) -> NormReport {
    let h_s = norm_hs(field, s);
    let l2_r = norm_weighted(field, r);
    NormReport {
        h_s,
        l2_r,
        sigma_sr: h_s.hypot(l2_r),
        r,
        s,
        length: field.grid().length(),
    }
}

/// `Q(u) = (1/2pi) \int (1 + |xi|) |u_hat|^2 dxi`, conserved by the flow.
pub fn conserved_q(field: &Field) -> f64 {
    field
        .grid()
        .spectral_sum(field.spectrum(), |xi| 1.0 + xi.abs())
}

/// `u_hat(0) = \int u dx`.
pub fn mean_mode(field: &Field) -> f64 {
    let values = field.values();
    field.grid().quadrature(|_, j| values[j])
}

/// Brezis-Gallouet monitor `||f||_inf / (1 + sqrt(log(1 + ||f||_s)) ||f||_{1/2})`.
pub fn bg_ratio(field: &Field, s: f64) -> f64 {
    let sup = field.max_abs();
    if sup == 0.0 {
        return 0.0;
    }
    let denom = 1.0 + (1.0 + norm_hs(field, s)).ln().sqrt() * norm_hs(field, 0.5);
    sup / denom
}

/// Kato-Ponce quotient `||J^s(fg)||_0 / (||f||_inf ||J^s g||_0 + ||g||_inf ||J^s f||_0)`.
pub fn kato_ponce_ratio(f: &Field, g: &Field, s: f64) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let product: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b)
        .collect();
    let fg = Field::from_values(f.grid(), product)?;
    let denom = f.max_abs() * norm_hs(g, s) + g.max_abs() * norm_hs(f, s);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(norm_hs(&fg, s) / denom)
}

/// Per-sample scalars recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub norm_h_s: f64,
    pub norm_l2_r: f64,
    pub q: f64,
    pub mean_mode: f64,
}

pub fn step_diagnostics(field: &Field, s: f64, r: f64) -> StepDiagnostics {
    StepDiagnostics {
        norm_h_s: norm_hs(field, s),
        norm_l2_r: norm_weighted(field, r),
        q: conserved_q(field),
        mean_mode: mean_mode(field),
    }
}

/// The unique-continuation functional `2 t2 phi_hat(0) + \int_0^{t2} ||u||_0^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IFunctional {
    pub t2: f64,
    pub phi_hat_0: f64,
    pub integral_term: f64,
    pub i_value: f64,
}

pub fn i_functional(traj: &Trajectory, t2: f64) -> Result<IFunctional> {
    let times = traj.times();
    let last = *times.last().expect("trajectory is never empty");
    let slack = 1e-9 * last.max(1.0);
    if !(t2 >= 0.0 && t2 <= last + slack) {
        return Err(Error::InvalidExperiment(format!(
            "t2 = {t2} outside the recorded range [0, {last}]"
        )));
    }
    let l2: Vec<f64> = traj.states().iter().map(l2_norm_sq).collect();
    let mut integral = 0.0;
    for w in 0..times.len().saturating_sub(1) {
        let (a, b) = (times[w], times[w + 1]);
        if a >= t2 - slack {
            break;
        }
        if b <= t2 + slack {
            integral += 0.5 * (b - a) * (l2[w] + l2[w + 1]);
        } else {
            let frac = (t2 - a) / (b - a);
            let end = l2[w] + frac * (l2[w + 1] - l2[w]);
            integral += 0.5 * (t2 - a) * (l2[w] + end);
            break;
        }
    }
    let phi_hat_0 = mean_mode(&traj.states()[0]);
    Ok(IFunctional {
        t2,
        phi_hat_0,
        integral_term: integral,
        i_value: 2.0 * t2 * phi_hat_0 + integral,
    })
}

pub const DEFAULT_JUMP_WIDTH: usize = 4;

/// Estimate `d^2 u_hat / dxi^2 (0+) - d^2 u_hat / dxi^2 (0-)`.
///
/// Each side is fitted by a polynomial of degree `min(width, 4)` through the
/// modes `k = 0..=width` (least squares when `width > 4`).
pub fn jump_second_derivative(field: &Field, width: usize) -> Result<Complex> {
    let grid = field.grid();
    let n = grid.n();
    if width < 2 || width > n / 4 {
        return Err(Error::StencilWidth { width, n });
    }
    let degree = width.min(4);
    let rows = width + 1;
    let design = DMatrix::from_fn(rows, degree + 1, |i, m| (i as f64).powi(m as i32));
    let spec = field.spectrum();
    let mut rhs = DMatrix::zeros(rows, 4);
    for i in 0..rows {
        let plus = spec[grid.index_of(i as i64)];
        let minus = spec[grid.index_of(-(i as i64))];
        rhs[(i, 0)] = plus.re;
        rhs[(i, 1)] = plus.im;
        rhs[(i, 2)] = minus.re;
        rhs[(i, 3)] = minus.im;
    }
    let svd = design.svd(true, true);
    let coeffs = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::InvalidExperiment(format!("jump fit failed: {e}")))?;
    // k -> -k leaves the quadratic coefficient unchanged
    let dxi = grid.dxi();
    let second = |col: usize| 2.0 * coeffs[(2, col)] / (dxi * dxi);
    let plus = Complex::new(second(0), second(1));
    let minus = Complex::new(second(2), second(3));
    Ok(plus - minus)
}

/// Everything measured at `t2` for the unique-continuation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UCReport {
    pub t2: f64,
    pub phi_hat_0: f64,
    pub integral_term: f64,
    pub i_value: f64,
    pub measured_jump: Complex,
    pub predicted_jump: Complex,
}

impl UCReport {
    /// `|measured - predicted| / |predicted|`, or the absolute error when
    /// the prediction vanishes.
    pub fn jump_relative_error(&self) -> f64 {
        let diff = (self.measured_jump - self.predicted_jump).norm();
        let scale = self.predicted_jump.norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

/// Predicted jump `2i I(t)` of `d^2 u_hat / dxi^2` at the origin.
pub fn predicted_jump(i_value: f64) -> Complex {
    Complex::new(0.0, 2.0 * i_value)
}

pub fn uc_report(traj: &Trajectory, t2: f64, width: usize) -> Result<UCReport> {
    let i = i_functional(traj, t2)?;
    let state = traj
        .state_at(t2)
        .ok_or_else(|| Error::InvalidExperiment(format!("no recorded state at t2 = {t2}")))?;
    let measured_jump = jump_second_derivative(state, width)?;
    Ok(UCReport {
        t2,
        phi_hat_0: i.phi_hat_0,
        integral_term: i.integral_term,
        i_value: i.i_value,
        measured_jump,
        predicted_jump: predicted_jump(i.i_value),
    })
}

/// Fitted envelope `exp(c2 exp(c3 t))` lying above a positive series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleExponential {
    pub c2: f64,
    pub c3: f64,
}

impl DoubleExponential {
    pub fn eval(&self, t: f64) -> f64 {
        (self.c2 * (self.c3 * t).exp()).exp()
    }
}

/// Least-squares line through `log log y(t)`, shifted up to dominate every
/// sample. Needs `y > 1` throughout.
pub fn fit_double_exponential(times: &[f64], values: &[f64]) -> Option<DoubleExponential> {
    if times.len() < 2 || times.len() != values.len() || values.iter().any(|&v| !(v > 1.0)) {
        return None;
    }
    let y: Vec<f64> = values.iter().map(|v| v.ln().ln()).collect();
    let a = DMatrix::from_fn(times.len(), 2, |i, c| if c == 0 { 1.0 } else { times[i] });
    let b = DVector::from_vec(y.clone());
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let slope = sol[1];
    let lift = times
        .iter()
        .zip(&y)
        .map(|(t, yi)| yi - slope * t)
        .fold(f64::NEG_INFINITY, f64::max);
    Some(DoubleExponential {
        c2: lift.exp(),
        c3: slope,
    })
}
