//! Adaptive 1-D quadrature for complex-valued integrands.
//!
//! Uses the embedded 7-point Gauss / 15-point Kronrod pair on a worklist of
//! subintervals, always splitting the interval with the largest error
//! estimate. The Kronrod value is kept, the |K15 - G7| difference drives
//! subdivision.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Integration domain and termination control.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    /// Spec over `[lower, upper]` with the default tolerances
    /// (abs 1e-10, rel 1e-9) and subdivision budget.
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::InvalidArgument(format!(
                "quadrature bounds must be finite with lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

// Gauss-Kronrod 7/15 nodes and weights (positive half, QUADPACK values).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    lower: f64,
    upper: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, lower: f64, upper: f64) -> Panel {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;

    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        // Gauss nodes are the odd-index Kronrod nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }

    kronrod *= half;
    gauss *= half;
    Panel {
        lower,
        upper,
        value: kronrod,
        error: (kronrod - gauss).norm(),
    }
}

/// Integrate a complex-valued function over `[spec.lower, spec.upper]`.
///
/// The result is refined until the accumulated error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`. Exceeding `max_subdivisions`
/// without convergence is an explicit error, never a silent partial result.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    spec.validate()?;

    let mut panels = vec![gk15(&f, spec.lower, spec.upper)];
    let mut subdivisions = 0usize;

    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let bound = spec.abs_tol.max(spec.rel_tol * total.norm());
        if error <= bound {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                subdivisions,
                error_estimate: error,
            });
        }

        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("panel list is never empty");
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.lower + panel.upper);
        if !(panel.lower < mid && mid < panel.upper) {
            // Interval has collapsed to machine precision; give up honestly.
            return Err(Error::QuadratureNonConvergence {
                subdivisions,
                error_estimate: error,
            });
        }
        panels.push(gk15(&f, panel.lower, mid));
        panels.push(gk15(&f, mid, panel.upper));
        subdivisions += 1;
    }
}

/// Integrate a real-valued function, returning the real part of the
/// complex machinery's result.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    integrate_complex(|x| Complex64::new(f(x), 0.0), spec).map(|v| v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn plain_gaussian_integral() {
        let spec = QuadratureSpec::new(-10.0, 10.0);
        let result = integrate_complex(|z| Complex64::new((-z * z).exp(), 0.0), &spec).unwrap();
        assert!((result.re - PI.sqrt()).abs() < 1e-12, "got {}", result.re);
        assert!(result.im.abs() < 1e-14);
    }

    #[test]
    fn imaginary_gaussian_integral() {
        let spec = QuadratureSpec::new(-10.0, 10.0);
        let result = integrate_complex(|z| Complex64::new(0.0, (-z * z).exp()), &spec).unwrap();
        assert!(result.re.abs() < 1e-14);
        assert!((result.im - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn shifted_gaussian_with_linear_phase() {
        // Closed form, derived independently of the quadrature path:
        // integral of exp(-(z-c)^2/(2 s^2) + i k z) = s sqrt(2 pi) exp(i k c - k^2 s^2 / 2)
        let (c, s, k) = (3.0, 1.0, 1.0);
        let expected = Complex64::new(0.0, k * c).exp()
            * Complex64::new(s * (2.0 * PI).sqrt() * (-0.5 * k * k * s * s).exp(), 0.0);

        let spec = QuadratureSpec::new(-30.0, 30.0);
        let result = integrate_complex(
            |z| (Complex64::new(-(z - c) * (z - c) / (2.0 * s * s), 0.0)
                + Complex64::new(0.0, k * z))
            .exp(),
            &spec,
        )
        .unwrap();
        assert!((result - expected).norm() < 1e-11, "got {result}, expected {expected}");
    }

    #[test]
    fn linearity() {
        let spec = QuadratureSpec::new(-12.0, 12.0);
        let f = |z: f64| Complex64::new((-z * z).exp(), 0.0);
        let g = |z: f64| Complex64::new((-(z - 1.0) * (z - 1.0) / 2.0).exp(), 0.0);
        let alpha = Complex64::new(0.7, -0.3);
        let beta = Complex64::new(-1.2, 2.5);

        let lhs = integrate_complex(|z| alpha * f(z) + beta * g(z), &spec).unwrap();
        let rhs = alpha * integrate_complex(f, &spec).unwrap()
            + beta * integrate_complex(g, &spec).unwrap();
        let bound = 2.0 * spec.abs_tol.max(spec.rel_tol * lhs.norm());
        assert!((lhs - rhs).norm() < bound);
    }

    #[test]
    fn non_convergence_is_an_error() {
        // Far too oscillatory for the allowed three subdivisions.
        let spec = QuadratureSpec {
            lower: -1.0,
            upper: 1.0,
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 3,
        };
        let result = integrate_complex(|z| Complex64::new((1000.0 * z).cos(), 0.0), &spec);
        assert!(matches!(
            result,
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn invalid_bounds_rejected() {
        let spec = QuadratureSpec::new(2.0, -2.0);
        assert!(integrate_real(|_| 1.0, &spec).is_err());
    }
}
