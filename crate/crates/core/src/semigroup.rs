//! The linear group `E(t) = e^{tA}` with symbol `F(t, xi) = e^{b(xi) t}`,
//! its frequency derivatives, and polynomial bounds in weighted spaces.

use crate::error::{Error, Result};
use crate::spectral::{apply_table, sgn, Complex, Field, GridSpec, MultiplierSymbol};

/// Dispersion symbol `b(xi) = -i xi / (1 + |xi|)`.
pub fn symbol_b(xi: f64) -> Complex {
    Complex::new(0.0, -xi / (1.0 + xi.abs()))
}

/// `F(t, xi) = e^{b(xi) t}`.
pub fn group_factor(t: f64, xi: f64) -> Complex {
    (symbol_b(xi) * t).exp()
}

pub fn group_symbol(t: f64) -> MultiplierSymbol {
    MultiplierSymbol::new(format!("exp(b(xi) {t})"), move |xi| group_factor(t, xi))
}

/// `b(xi_k)` on the grid; zero at the Nyquist mode.
pub fn dispersion_table(grid: &GridSpec) -> Vec<Complex> {
    grid.symbol_table(&MultiplierSymbol::new("b(xi)", symbol_b))
        .expect("b is odd and purely imaginary")
}

/// `F(t, xi_k)` on the grid, exponentiated from [`dispersion_table`] so the
/// discrete group is unitary and satisfies the group law exactly.
pub fn group_table(grid: &GridSpec, t: f64) -> Vec<Complex> {
    dispersion_table(grid)
        .into_iter()
        .map(|b| (b * t).exp())
        .collect()
}

/// Apply the linear group for time `t` (any sign).
pub fn group_apply(t: f64, field: &Field) -> Field {
    apply_table(field, &group_table(field.grid(), t))
}

/// `c * delta^{(order)}` supported at `xi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub order: usize,
    pub coefficient: Complex,
}

/// `d^j/dxi^j F(t, xi)` split into its value away from the origin and the
/// distributional terms concentrated there.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeValue {
    pub order: usize,
    pub t: f64,
    pub xi: f64,
    pub regular: Complex,
    /// Ordered by decreasing delta order.
    pub singular: Vec<DeltaTerm>,
}

pub const MAX_DERIVATIVE_ORDER: usize = 5;

fn check_order(j: usize) -> Result<()> {
    if (1..=MAX_DERIVATIVE_ORDER).contains(&j) {
        Ok(())
    } else {
        Err(Error::DerivativeOrder(j))
    }
}

/// Coefficients of `Q_j` in `d^j F = F * Q_j(w)`, `w = 1/(1+|xi|)`, on the
/// half line with sign `s`.
///
/// On either half line `dw/dxi = -s w^2` and `d(b t)/dxi = -i t w^2`, which
/// gives `Q_{j+1} = -s w^2 Q_j' - i t w^2 Q_j` with `Q_0 = 1`.
fn derivative_polynomial(j: usize, t: f64, s: f64) -> Vec<Complex> {
    let mut q = vec![Complex::new(1.0, 0.0)];
    let mit = Complex::new(0.0, -t);
    for _ in 0..j {
        let mut next = vec![Complex::new(0.0, 0.0); q.len() + 2];
        for (m, &c) in q.iter().enumerate() {
            // -s w^2 * m c w^{m-1}
            if m > 0 {
                next[m + 1] += c * (-s * m as f64);
            }
            next[m + 2] += c * mit;
        }
        q = next;
    }
    q
}

fn eval_polynomial(coeffs: &[Complex], w: f64) -> Complex {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// Regular part of `d^j F / dxi^j` at `xi != 0`.
pub fn regular_part(j: usize, t: f64, xi: f64) -> Result<Complex> {
    check_order(j)?;
    if xi == 0.0 {
        return Err(Error::SignDiscontinuity);
    }
    let w = 1.0 / (1.0 + xi.abs());
    Ok(group_factor(t, xi) * eval_polynomial(&derivative_polynomial(j, t, sgn(xi)), w))
}

/// One-sided limits `(xi -> 0+, xi -> 0-)` of the regular part.
pub fn regular_one_sided_limits(j: usize, t: f64) -> (Complex, Complex) {
    let plus = eval_polynomial(&derivative_polynomial(j, t, 1.0), 1.0);
    let minus = eval_polynomial(&derivative_polynomial(j, t, -1.0), 1.0);
    (plus, minus)
}

/// Jump of the regular part of order `j` across the origin.
pub fn regular_jump(j: usize, t: f64) -> Complex {
    let (plus, minus) = regular_one_sided_limits(j, t);
    plus - minus
}

/// Delta terms of `d^j F`: each jump of a lower-order regular part
/// differentiates into a delta that is carried up to order `j`.
pub fn singular_terms(j: usize, t: f64) -> Result<Vec<DeltaTerm>> {
    check_order(j)?;
    // Q_0 and Q_1 are even in xi, so jumps start at order 2.
    Ok((2..j)
        .map(|m| DeltaTerm {
            order: j - 1 - m,
            coefficient: regular_jump(m, t),
        })
        .collect())
}

pub fn group_xi_derivative(j: usize, t: f64, xi: f64) -> Result<DerivativeValue> {
    Ok(DerivativeValue {
        order: j,
        t,
        xi,
        regular: regular_part(j, t, xi)?,
        singular: singular_terms(j, t)?,
    })
}

/// Norms of the initial datum entering the weighted group bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InitialNorms {
    /// `||phi||_s`
    pub sobolev: f64,
    /// `||phi||_0`
    pub l2: f64,
    /// `||x phi||_0`, `||x^2 phi||_0`, `||x^3 phi||_0`
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub x3: Option<f64>,
}

/// Right-hand side of the weighted group estimate for `||E(t) phi||^2_{s,r}`.
///
/// The bound is `||phi||_s^2 + sum_m c_m ||x^m phi||_0^2`; `coefficients[m]`
/// holds `c_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupBound {
    pub r: u32,
    pub t: f64,
    pub coefficients: Vec<f64>,
}

impl GroupBound {
    /// `moments_vanish` must be true for `r = 3`; it asserts `phi_hat(0) = 0`.
    pub fn new(r: u32, t: f64, moments_vanish: bool) -> Result<Self> {
        let t2 = t * t;
        let t4 = t2 * t2;
        let coefficients = match r {
            0 => vec![1.0],
            1 => vec![t2, 1.0],
            2 => vec![4.0 * t2 + t4, t2, 1.0],
            3 => {
                if !moments_vanish {
                    return Err(Error::MomentConditionRequired);
                }
                vec![
                    36.0 * t2 + 36.0 * t4 + t4 * t2,
                    36.0 * t2 + 9.0 * t4,
                    9.0 * t2,
                    1.0,
                ]
            }
            other => return Err(Error::UnsupportedWeight(other)),
        };
        Ok(Self { r, t, coefficients })
    }

    pub fn evaluate(&self, norms: &InitialNorms) -> Result<f64> {
        let moments = [
            Some(norms.l2),
            norms.x1.or(if self.r == 0 { Some(0.0) } else { None }),
            norms.x2,
            norms.x3,
        ];
        let names = ["||phi||_0", "||x phi||_0", "||x^2 phi||_0", "||x^3 phi||_0"];
        let mut total = norms.sobolev * norms.sobolev;
        for (m, &c) in self.coefficients.iter().enumerate() {
            let value = moments[m].ok_or(Error::MissingNorm(names[m]))?;
            total += c * value * value;
        }
        Ok(total)
    }
}

pub fn weighted_group_norm_bound(
    r: u32,
    t: f64,
    norms: &InitialNorms,
    moments_vanish: bool,
) -> Result<f64> {
    GroupBound::new(r, t, moments_vanish)?.evaluate(norms)
}

/// `d^j/dxi^j phi_hat(0) = (-i)^j \int x^j phi(x) dx` for `j = 0..=jmax`.
pub fn moment_defect(field: &Field, jmax: usize) -> Vec<Complex> {
    let grid = field.grid();
    let values = field.values();
    (0..=jmax)
        .map(|j| {
            let moment = grid.quadrature(|x, i| x.powi(j as i32) * values[i]);
            Complex::new(0.0, -1.0).powu(j as u32) * moment
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Closed forms valid on `xi > 0`, written out term by term.
    fn closed_form_positive(j: usize, t: f64, xi: f64) -> Complex {
        let w = 1.0 / (1.0 + xi);
        let f = group_factor(t, xi);
        let it = c(0.0, t);
        let mit = -it;
        let s = 1.0;
        let terms = match j {
            1 => mit * w.powi(2),
            2 => 2.0 * it * s * w.powi(3) + mit.powu(2) * w.powi(4),
            3 => {
                -6.0 * it * w.powi(4) - 2.0 * mit.powu(2) * (s + 2.0) * w.powi(5)
                    + mit.powu(3) * w.powi(6)
            }
            4 => {
                24.0 * it * s * w.powi(5) + 4.0 * mit.powu(2) * (4.0 + 5.0 * s) * w.powi(6)
                    - 2.0 * mit.powu(3) * (s + 5.0) * w.powi(7)
                    + mit.powu(4) * w.powi(8)
            }
            5 => {
                -120.0 * it * w.powi(6)
                    + it.powu(2) * (-120.0 * s - 120.0) * w.powi(7)
                    + it.powu(3) * (-90.0 * s - 30.0) * w.powi(8)
                    + it.powu(4) * (-10.0 * s - 10.0) * w.powi(9)
                    + mit.powu(5) * w.powi(10)
            }
            _ => unreachable!(),
        };
        terms * f
    }

    #[test]
    fn b_examples() {
        assert_eq!(symbol_b(0.0), c(0.0, 0.0));
        assert_eq!(symbol_b(1.0), c(0.0, -0.5));
        for xi in [0.1, 1.0, 7.5, 1e6] {
            assert_eq!(symbol_b(-xi), -symbol_b(xi));
            assert!(symbol_b(xi).norm() < 1.0);
            assert_eq!(symbol_b(xi).re, 0.0);
        }
    }

    #[test]
    fn first_derivative_vanishes_at_t_zero() {
        for xi in [-2.0, 0.3, 5.0] {
            assert_eq!(regular_part(1, 0.0, xi).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn second_derivative_example() {
        // (0.25 i - 0.0625) e^{-i/2}
        let expected = c(-0.0625, 0.25) * c(0.0, -0.5).exp();
        let got = regular_part(2, 1.0, 1.0).unwrap();
        assert!((got - expected).norm() < 1e-15);
        // centered differences of F in xi
        let h = 1e-4;
        let f = |x: f64| group_factor(1.0, x);
        let fd = (f(1.0 + h) - 2.0 * f(1.0) + f(1.0 - h)) / (h * h);
        assert!((fd - expected).norm() / expected.norm() < 1e-6);
    }

    #[test]
    fn recurrence_matches_closed_forms_on_positive_axis() {
        for j in 1..=5 {
            for &(t, xi) in &[(0.7, 0.2), (2.0, 1.5), (-1.3, 4.0), (10.0, 0.05)] {
                let a = regular_part(j, t, xi).unwrap();
                let b = closed_form_positive(j, t, xi);
                assert!(
                    (a - b).norm() <= 1e-12 * (1.0 + b.norm()),
                    "j={j} t={t} xi={xi}"
                );
            }
        }
    }

    #[test]
    fn singular_terms_for_low_orders() {
        let t = 1.7;
        assert!(singular_terms(1, t).unwrap().is_empty());
        assert!(singular_terms(2, t).unwrap().is_empty());
        let s3 = singular_terms(3, t).unwrap();
        assert_eq!(
            s3,
            vec![DeltaTerm {
                order: 0,
                coefficient: c(0.0, 4.0 * t)
            }]
        );
        let s4 = singular_terms(4, t).unwrap();
        assert_eq!(s4.len(), 2);
        assert_eq!((s4[0].order, s4[0].coefficient), (1, c(0.0, 4.0 * t)));
        assert_eq!(s4[1].order, 0);
        assert!((s4[1].coefficient - c(12.0 * t * t, 0.0)).norm() < 1e-12);
        let s5 = singular_terms(5, t).unwrap();
        assert_eq!(
            s5.iter().map(|d| d.order).collect::<Vec<_>>(),
            vec![2, 1, 0]
        );
        let j4 = c(0.0, 48.0 * t - 24.0 * t.powi(3));
        assert!((s5[2].coefficient - j4).norm() < 1e-10);
    }

    #[test]
    fn derivative_order_bounds() {
        assert!(matches!(
            group_xi_derivative(0, 1.0, 1.0),
            Err(Error::DerivativeOrder(0))
        ));
        assert!(matches!(
            group_xi_derivative(6, 1.0, 1.0),
            Err(Error::DerivativeOrder(6))
        ));
        assert!(matches!(
            group_xi_derivative(2, 1.0, 0.0),
            Err(Error::SignDiscontinuity)
        ));
    }

    #[test]
    fn second_order_limits_differ_by_four_i_t() {
        let (p, m) = regular_one_sided_limits(2, 0.8);
        assert!((p - m - c(0.0, 3.2)).norm() < 1e-15);
    }

    #[test]
    fn bound_coefficients() {
        let norms = InitialNorms {
            sobolev: 2.0,
            l2: 1.0,
            x1: Some(1.0),
            x2: Some(1.0),
            x3: Some(1.0),
        };
        let r0 = weighted_group_norm_bound(0, 3.0, &norms, false).unwrap();
        assert_eq!(r0, 5.0);
        let r2 = GroupBound::new(2, 0.0, false).unwrap();
        assert_eq!(r2.coefficients, vec![0.0, 0.0, 1.0]);
        let r3 = GroupBound::new(3, 1.0, true).unwrap();
        assert_eq!(r3.coefficients, vec![73.0, 45.0, 9.0, 1.0]);
        assert!(matches!(
            GroupBound::new(3, 1.0, false),
            Err(Error::MomentConditionRequired)
        ));
        let missing = InitialNorms { x1: None, ..norms };
        assert!(weighted_group_norm_bound(1, 1.0, &missing, false).is_err());
    }

    #[test]
    fn moment_examples() {
        let g = make_grid(1024, 64.0 * PI).unwrap();
        let odd = Field::from_fn(&g, |x| x * (-x * x).exp());
        assert!(moment_defect(&odd, 0)[0].norm() < 1e-14);
        let gauss = Field::from_fn(&g, |x| (-x * x).exp());
        assert!((moment_defect(&gauss, 0)[0].re - PI.sqrt()).abs() < 1e-10);
        let hermite = Field::from_fn(&g, |x| (1.0 - 2.0 * x * x) * (-x * x).exp());
        assert!(moment_defect(&hermite, 0)[0].norm() < 1e-10);
        // d/dxi phi_hat(0) = -i sqrt(pi)/2 for x e^{-x^2}
        let d1 = moment_defect(&odd, 1)[1];
        assert!((d1 - c(0.0, -PI.sqrt() / 2.0)).norm() < 1e-10);
    }

    #[test]
    fn group_law_and_isometry() {
        let g = make_grid(512, 40.0).unwrap();
        let phi = Field::from_fn(&g, |x| (-(x - 1.0).powi(2)).exp() * (1.0 + 0.5 * x));
        let back = group_apply(-1.0, &group_apply(1.0, &phi));
        let err = back
            .values()
            .iter()
            .zip(phi.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12);
        let e0 = group_apply(0.0, &phi);
        assert_eq!(e0.values().len(), phi.values().len());
        for (a, b) in e0.values().iter().zip(phi.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
