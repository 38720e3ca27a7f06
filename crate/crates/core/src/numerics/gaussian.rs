//! Closed-form integrals of complex Gaussians.
//!
//! Everything here reduces to one identity: for Re(a) > 0,
//! integral of exp(-a z^2 + b z + c) dz = sqrt(pi/a) exp(b^2/(4a) + c).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// integral of exp(A z^2 + B z + C) dz over the real line, Re(A) < 0.
pub fn gaussian_integral(a2: Complex64, a1: Complex64, a0: Complex64) -> Result<Complex64> {
    if a2.re >= 0.0 {
        return Err(Error::NotNormalizable(format!(
            "quadratic coefficient must have negative real part, got {a2}"
        )));
    }
    let a = -a2;
    Ok((PI / a).sqrt() * (a1 * a1 / (4.0 * a) + a0).exp())
}

/// L2 norm of z -> exp(q z^2 + l z + c) over the real line, i.e.
/// sqrt(integral of exp(2 Re(q) z^2 + 2 Re(l) z + 2 Re(c))).
pub fn gaussian_l2_norm(quadratic: Complex64, linear: Complex64, constant: Complex64) -> Result<f64> {
    let a = -2.0 * quadratic.re;
    if a <= 0.0 {
        return Err(Error::NotNormalizable(format!(
            "Gaussian exponent must decay, quadratic coefficient {quadratic}"
        )));
    }
    let b = 2.0 * linear.re;
    let c = 2.0 * constant.re;
    Ok(((PI / a).sqrt() * (b * b / (4.0 * a) + c).exp()).sqrt())
}

/// Overlap <g1|g2> of two unit-normalized Gaussians
/// g_j(z) = N_j exp(-w_j (z - c_j)^2 + i k_j z), with N_j > 0 fixing
/// unit L2 norm. Centers may be complex; Re(w_j) > 0 is required.
pub fn gaussian_overlap_analytic(
    c1: Complex64,
    c2: Complex64,
    w1: Complex64,
    w2: Complex64,
    k1: f64,
    k2: f64,
) -> Result<Complex64> {
    if w1.re <= 0.0 || w2.re <= 0.0 {
        return Err(Error::NotNormalizable(format!(
            "inverse-width parameters must have positive real part, got {w1}, {w2}"
        )));
    }
    let n1 = unit_norm_constant(c1, w1, k1)?;
    let n2 = unit_norm_constant(c2, w2, k2)?;

    // conj(g1)(z) g2(z) = N1 N2 exp(A z^2 + B z + C) for real z.
    let w1c = w1.conj();
    let c1c = c1.conj();
    let a = -(w1c + w2);
    let b = 2.0 * w1c * c1c + 2.0 * w2 * c2 + Complex64::new(0.0, k2 - k1);
    let c = -w1c * c1c * c1c - w2 * c2 * c2;
    Ok(n1 * n2 * gaussian_integral(a, b, c)?)
}

/// Normalization constant N for exp(-w (z-c)^2 + i k z), so that the
/// product has unit L2 norm.
fn unit_norm_constant(c: Complex64, w: Complex64, k: f64) -> Result<f64> {
    // exponent: -w z^2 + (2 w c + i k) z - w c^2
    let norm = gaussian_l2_norm(-w, 2.0 * w * c + Complex64::new(0.0, k), -w * c * c)?;
    Ok(1.0 / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_complex, QuadratureSpec};

    fn gaussian(z: f64, c: Complex64, w: Complex64, k: f64) -> Complex64 {
        let zc = Complex64::new(z, 0.0) - c;
        (-w * zc * zc + Complex64::new(0.0, k * z)).exp()
    }

    #[test]
    fn self_overlap_is_one() {
        let c = Complex64::new(1.3, 0.0);
        let w = Complex64::new(0.4, 0.9);
        let ov = gaussian_overlap_analytic(c, c, w, w, 2.0, 2.0).unwrap();
        assert!((ov - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn separated_real_gaussians() {
        // Textbook result: equal real widths w, equal phase slopes,
        // centers Delta apart -> overlap exp(-w Delta^2 / 2).
        let w = Complex64::new(0.5, 0.0);
        let delta = 1.7;
        let ov = gaussian_overlap_analytic(
            Complex64::new(0.0, 0.0),
            Complex64::new(delta, 0.0),
            w,
            w,
            0.3,
            0.3,
        )
        .unwrap();
        let expected = (-w.re * delta * delta / 2.0).exp();
        assert!((ov.re - expected).abs() < 1e-13);
        assert!(ov.im.abs() < 1e-13);
    }

    #[test]
    fn generic_complex_case_matches_quadrature() {
        let c1 = Complex64::new(-0.8, 0.2);
        let c2 = Complex64::new(1.1, -0.4);
        let w1 = Complex64::new(0.35, 0.6);
        let w2 = Complex64::new(0.5, -0.25);
        let (k1, k2) = (1.2, -0.7);

        let analytic = gaussian_overlap_analytic(c1, c2, w1, w2, k1, k2).unwrap();

        // Quadrature oracle with explicitly normalized integrands.
        let spec = QuadratureSpec::new(-40.0, 40.0).with_tolerances(1e-13, 1e-12);
        let n1 = integrate_complex(|z| {
            let g = gaussian(z, c1, w1, k1);
            Complex64::new(g.norm_sqr(), 0.0)
        }, &spec)
        .unwrap()
        .re
        .sqrt();
        let n2 = integrate_complex(|z| {
            let g = gaussian(z, c2, w2, k2);
            Complex64::new(g.norm_sqr(), 0.0)
        }, &spec)
        .unwrap()
        .re
        .sqrt();
        let raw = integrate_complex(
            |z| gaussian(z, c1, w1, k1).conj() * gaussian(z, c2, w2, k2),
            &spec,
        )
        .unwrap();
        let oracle = raw / (n1 * n2);

        assert!(
            (analytic - oracle).norm() < 1e-10,
            "analytic {analytic} vs quadrature {oracle}"
        );
    }

    #[test]
    fn cauchy_schwarz_bound() {
        // |<g1|g2>| <= 1 for a spread of parameters.
        let cases = [
            (0.0, 0.0, 0.3, 0.0, 1.0, 0.1, 0.0, -3.0),
            (2.0, -1.0, 1.5, 2.0, 0.7, -0.6, 4.0, 4.0),
            (-0.5, 0.9, 0.2, 0.8, 0.2, 0.8, -1.0, 2.5),
        ];
        for (c1r, c1i, w1r, w1i, w2r, w2i, k1, k2) in cases {
            let ov = gaussian_overlap_analytic(
                Complex64::new(c1r, c1i),
                Complex64::new(c1i, c1r),
                Complex64::new(w1r, w1i),
                Complex64::new(w2r, w2i),
                k1,
                k2,
            )
            .unwrap();
            assert!(ov.norm() <= 1.0 + 1e-12, "overlap {} exceeds 1", ov.norm());
        }
    }

    #[test]
    fn non_normalizable_input_rejected() {
        let c = Complex64::new(0.0, 0.0);
        let bad = Complex64::new(-0.1, 0.5);
        let good = Complex64::new(0.4, 0.0);
        assert!(gaussian_overlap_analytic(c, c, bad, good, 0.0, 0.0).is_err());
        assert!(gaussian_overlap_analytic(c, c, good, bad, 0.0, 0.0).is_err());
    }
}
