//! The entangled Stern-Gerlach spinor wavepacket.
//!
//! The state at time t is an equal-weight superposition of two Gaussian
//! branches tied to the spin projections along z. The sign conventions used
//! everywhere in this crate:
//!
//! * up_z branch (phi-plus): center -t^2 mu_c b / 2m, mean momentum
//!   -mu_c b t, the Paris / Bob side;
//! * down_z branch (phi-minus): center +t^2 mu_c b / 2m, mean momentum
//!   +mu_c b t, the Tokyo / Alice side.
//!
//! Both branches share the complex width sigma0^2 + i t hbar / 2m. The
//! transverse (x, y) factor is carried analytically and never mixes with
//! the z or spin statistics at k_y = 0.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    gaussian_l2_norm, gaussian_overlap_analytic, Complex, I,
};

/// Physical constants of the experiment, in a coherent unit system.
/// Defaults are the dimensionless internal units hbar = m = mu_c = b =
/// sigma0 = 1, B0 = k_y = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    /// Magnetic moment mu_c.
    pub mu_c: f64,
    /// Field gradient b.
    pub b: f64,
    /// Uniform field B0.
    pub b0: f64,
    /// Particle mass m.
    pub m: f64,
    /// Initial packet width sigma0.
    pub sigma0: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Initial transverse wavenumber k_y.
    pub k_y: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            mu_c: 1.0,
            b: 1.0,
            b0: 0.0,
            m: 1.0,
            sigma0: 1.0,
            hbar: 1.0,
            k_y: 0.0,
        }
    }
}

impl PhysParams {
    /// Illustrative silver-atom-like magnitudes in SI units. All acceptance
    /// checks run in the dimensionless defaults; this preset exists for
    /// realism-flavored exploration only.
    pub fn silver_like() -> Self {
        Self {
            mu_c: 9.27e-24,
            b: 1.0e3,
            b0: 0.0,
            m: 1.79e-25,
            sigma0: 1.0e-5,
            hbar: 1.054_571_817e-34,
            k_y: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.mu_c, self.b, self.b0, self.m, self.sigma0, self.hbar, self.k_y,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidParams(format!("m must be positive, got {}", self.m)));
        }
        if self.sigma0 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        Ok(())
    }

    /// Field names accepted by `set_field` / `get_field` and the flat
    /// key=value config format.
    pub const FIELD_NAMES: [&'static str; 7] =
        ["mu_c", "b", "b0", "m", "sigma0", "hbar", "k_y"];

    pub fn set_field(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "mu_c" => self.mu_c = value,
            "b" => self.b = value,
            "b0" => self.b0 = value,
            "m" => self.m = value,
            "sigma0" => self.sigma0 = value,
            "hbar" => self.hbar = value,
            "k_y" => self.k_y = value,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown parameter `{key}` (expected one of {:?})",
                    Self::FIELD_NAMES
                )))
            }
        }
        Ok(())
    }

    pub fn get_field(&self, key: &str) -> Result<f64> {
        Ok(match key {
            "mu_c" => self.mu_c,
            "b" => self.b,
            "b0" => self.b0,
            "m" => self.m,
            "sigma0" => self.sigma0,
            "hbar" => self.hbar,
            "k_y" => self.k_y,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown parameter `{key}` (expected one of {:?})",
                    Self::FIELD_NAMES
                )))
            }
        })
    }

    /// Complex width sigma0^2 + i t hbar / 2m.
    pub fn complex_width(&self, t: f64) -> Complex {
        Complex::new(self.sigma0 * self.sigma0, t * self.hbar / (2.0 * self.m))
    }

    /// Branch center magnitude t^2 mu_c b / 2m.
    pub fn center_magnitude(&self, t: f64) -> f64 {
        t * t * self.mu_c * self.b / (2.0 * self.m)
    }

    /// Branch momentum magnitude mu_c b t.
    pub fn momentum_magnitude(&self, t: f64) -> f64 {
        self.mu_c * self.b * t
    }
}

/// Which of the two entangled branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Kinematic and normalization data of one branch Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchGeometry {
    pub center_z: f64,
    pub mean_momentum_z: f64,
    /// sigma0^2 + i t hbar / 2m.
    pub complex_width: Complex,
    /// Constant unimodular phase exp(-+ i t mu_c B0 / hbar).
    pub global_phase: Complex,
    /// L2 norm of the raw branch Gaussian; 1/norm is the computed
    /// normalization constant of the unit-norm branch.
    pub norm: f64,
    /// hbar copied in so the branch is self-contained for evaluation.
    pub hbar: f64,
}

impl BranchGeometry {
    /// Position-space standard deviation |Sigma| / sigma0.
    pub fn position_sd(&self) -> f64 {
        let sigma0_sq = self.complex_width.re;
        self.complex_width.norm() / sigma0_sq.sqrt()
    }

    /// Momentum-space standard deviation hbar / (2 sigma0).
    pub fn momentum_sd(&self) -> f64 {
        self.hbar / (2.0 * self.complex_width.re.sqrt())
    }

    /// Unit-normalized branch amplitude at z.
    pub fn amplitude(&self, z: f64) -> Complex {
        let dz = z - self.center_z;
        let envelope = (-Complex::new(dz * dz, 0.0) / (4.0 * self.complex_width)).exp();
        let phase = (I * (self.mean_momentum_z / self.hbar) * z).exp();
        self.global_phase * phase * envelope / self.norm
    }

    /// |amplitude|^2, a normal density in z.
    pub fn position_pdf(&self, z: f64) -> f64 {
        let s = self.position_sd();
        let dz = z - self.center_z;
        (-dz * dz / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())
    }

    /// Momentum density, a normal density centered on mean_momentum_z.
    pub fn momentum_pdf(&self, p: f64) -> f64 {
        let s = self.momentum_sd();
        let dp = p - self.mean_momentum_z;
        (-dp * dp / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())
    }
}

/// Geometry of one branch at time t.
pub fn branch_geometry(sign: Sign, t: f64, p: &PhysParams) -> BranchGeometry {
    let width = p.complex_width(t);
    let sigma0 = p.sigma0;
    // L2 norm of exp(-(z-c)^2 / 4 Sigma): sqrt(|Sigma|/sigma0 * sqrt(2 pi)).
    let norm = ((width.norm() / sigma0) * (2.0 * PI).sqrt()).sqrt();
    // Plus branch: center -c_t, momentum -mu b t, phase exp(-i t mu B0/hbar).
    let orientation = -sign.factor();
    BranchGeometry {
        center_z: orientation * p.center_magnitude(t),
        mean_momentum_z: orientation * p.momentum_magnitude(t),
        complex_width: width,
        global_phase: (I * orientation * t * p.mu_c * p.b0 / p.hbar).exp(),
        norm,
        hbar: p.hbar,
    }
}

/// Both branch geometries, (plus, minus).
pub fn branch_kinematics(t: f64, p: &PhysParams) -> (BranchGeometry, BranchGeometry) {
    (branch_geometry(Sign::Plus, t, p), branch_geometry(Sign::Minus, t, p))
}

/// Unit-normalized branch amplitude phi_sign(z, t).
pub fn branch_phi(sign: Sign, z: f64, t: f64, p: &PhysParams) -> Complex {
    branch_geometry(sign, t, p).amplitude(z)
}

/// <phi_plus | phi_minus> over z, both branches unit-normalized.
pub fn branch_overlap(t: f64, p: &PhysParams) -> Complex {
    let plus = branch_geometry(Sign::Plus, t, p);
    let minus = branch_geometry(Sign::Minus, t, p);
    let w = 1.0 / (4.0 * plus.complex_width);
    let overlap = gaussian_overlap_analytic(
        Complex::new(plus.center_z, 0.0),
        Complex::new(minus.center_z, 0.0),
        w,
        w,
        plus.mean_momentum_z / p.hbar,
        minus.mean_momentum_z / p.hbar,
    )
    .expect("branch widths always have positive real part");
    plus.global_phase.conj() * minus.global_phase * overlap
}

/// Two-component spin amplitude at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorAmplitude {
    pub up: Complex,
    pub down: Complex,
}

impl SpinorAmplitude {
    pub fn density(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }
}

/// Which transcription of the transverse y factor to use. `Verbatim`
/// reproduces the printed form, whose cross term lacks the imaginary unit
/// carried by its siblings; `PhaseCorrected` restores it, which makes the
/// y marginal drift at the group velocity hbar k_y / m. The two coincide
/// at k_y = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransverseForm {
    #[default]
    Verbatim,
    PhaseCorrected,
}

/// Exponent coefficients (quadratic, linear, constant) of the transverse
/// y factor, without the shared x^2 part.
fn transverse_y_exponent(form: TransverseForm, t: f64, p: &PhysParams) -> (Complex, Complex, Complex) {
    let width = p.complex_width(t);
    let sigma0_sq = p.sigma0 * p.sigma0;
    let quadratic = -1.0 / (4.0 * width);
    let linear = match form {
        TransverseForm::Verbatim => {
            // Real denominator as printed: sigma0^2 + t hbar / 2m.
            Complex::new(sigma0_sq * p.k_y / (sigma0_sq + t * p.hbar / (2.0 * p.m)), 0.0)
        }
        TransverseForm::PhaseCorrected => I * sigma0_sq * p.k_y / width,
    };
    let constant = Complex::new(-sigma0_sq * p.k_y * p.k_y, 0.0)
        + sigma0_sq * sigma0_sq * p.k_y * p.k_y / width;
    (quadratic, linear, constant)
}

/// Raw (unnormalized) transverse factor M(x, y).
fn transverse_raw(form: TransverseForm, x: f64, y: f64, t: f64, p: &PhysParams) -> Complex {
    let width = p.complex_width(t);
    let (_, linear, constant) = transverse_y_exponent(form, t, p);
    let quad = -Complex::new(x * x + y * y, 0.0) / (4.0 * width);
    (quad + linear * y + constant).exp()
}

/// L2 norms (Nx, Ny) of the raw transverse factors.
fn transverse_norms(form: TransverseForm, t: f64, p: &PhysParams) -> (f64, f64) {
    let width = p.complex_width(t);
    let quadratic = -1.0 / (4.0 * width);
    let nx = gaussian_l2_norm(quadratic, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0))
        .expect("complex width has positive real part");
    let (qy, ly, cy) = transverse_y_exponent(form, t, p);
    let ny = gaussian_l2_norm(qy, ly, cy).expect("complex width has positive real part");
    (nx, ny)
}

/// Unit-normalized transverse factor.
pub fn transverse_amplitude(form: TransverseForm, x: f64, y: f64, t: f64, p: &PhysParams) -> Complex {
    let (nx, ny) = transverse_norms(form, t, p);
    transverse_raw(form, x, y, t, p) / (nx * ny)
}

/// Overall prefactor multiplying the raw branch Gaussians and raw M(x, y)
/// so that the full 3-D state has unit norm, carrying the exact evolution
/// phase exp(-i t^3 mu_c^2 b^2 / 6 m hbar) and the Sigma^(-3/2) phase.
pub fn normalization_constant(form: TransverseForm, t: f64, p: &PhysParams) -> Complex {
    let width = p.complex_width(t);
    let geom = branch_geometry(Sign::Plus, t, p);
    let (nx, ny) = transverse_norms(form, t, p);
    let action = -t * t * t * p.mu_c * p.mu_c * p.b * p.b / (6.0 * p.m * p.hbar);
    let phase = (I * (action - 1.5 * width.arg())).exp();
    phase / (2.0_f64.sqrt() * geom.norm * nx * ny)
}

/// The printed closed-form normalization constant, for diagnostics:
/// exp(-i t^3 mu_c^2 b^2 / 6 m hbar) (1/sqrt 2) [sigma0/sqrt(2 pi)]^{3/2}
/// (sigma0^2 + i hbar t / 2m)^{-3/2}.
pub fn c0_verbatim(t: f64, p: &PhysParams) -> Complex {
    let width = p.complex_width(t);
    let action = -t * t * t * p.mu_c * p.mu_c * p.b * p.b / (6.0 * p.m * p.hbar);
    (I * action).exp()
        * (p.sigma0 / (2.0 * PI).sqrt()).powf(1.5)
        * width.powf(-1.5)
        / 2.0_f64.sqrt()
}

/// Full entangled state at a spacetime point (verbatim transverse form).
pub fn evaluate_state(x: f64, y: f64, z: f64, t: f64, p: &PhysParams) -> SpinorAmplitude {
    evaluate_state_in(TransverseForm::Verbatim, x, y, z, t, p)
}

/// Full entangled state with an explicit transverse transcription choice.
pub fn evaluate_state_in(
    form: TransverseForm,
    x: f64,
    y: f64,
    z: f64,
    t: f64,
    p: &PhysParams,
) -> SpinorAmplitude {
    let c = normalization_constant(form, t, p);
    let m = transverse_raw(form, x, y, t, p);
    let plus = branch_geometry(Sign::Plus, t, p);
    let minus = branch_geometry(Sign::Minus, t, p);
    // Raw branch Gaussians: amplitude() times the norm they divided out.
    let chi_plus = plus.amplitude(z) * plus.norm;
    let chi_minus = minus.amplitude(z) * minus.norm;
    SpinorAmplitude {
        up: c * m * chi_plus,
        down: c * m * chi_minus,
    }
}

/// Position density in z and its spin-resolved parts; the transverse
/// coordinates are integrated out analytically. Each part integrates
/// to 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfTriple {
    pub total: f64,
    pub up_part: f64,
    pub down_part: f64,
}

pub fn position_pdf_z(z: f64, t: f64, p: &PhysParams) -> PdfTriple {
    let (plus, minus) = branch_kinematics(t, p);
    let up_part = 0.5 * plus.position_pdf(z);
    let down_part = 0.5 * minus.position_pdf(z);
    PdfTriple {
        total: up_part + down_part,
        up_part,
        down_part,
    }
}

/// Momentum-space branch amplitude: the Fourier transform of branch_phi
/// with kernel exp(-i p z / hbar) / sqrt(2 pi hbar).
pub fn momentum_amplitude(sign: Sign, p_z: f64, t: f64, p: &PhysParams) -> Complex {
    let geom = branch_geometry(sign, t, p);
    let w = 1.0 / (4.0 * geom.complex_width);
    let k = geom.mean_momentum_z / p.hbar;
    let q = Complex::new(k - p_z / p.hbar, 0.0);
    let prefactor = geom.global_phase / (geom.norm * (2.0 * PI * p.hbar).sqrt());
    prefactor * (PI / w).sqrt() * (I * q * geom.center_z - q * q / (4.0 * w)).exp()
}

/// Sampling/integration window covering both branches out to
/// `n_sigmas` position standard deviations.
pub fn z_bounds(t: f64, p: &PhysParams, n_sigmas: f64) -> (f64, f64) {
    let (plus, minus) = branch_kinematics(t, p);
    let s = plus.position_sd();
    let lo = plus.center_z.min(minus.center_z) - n_sigmas * s;
    let hi = plus.center_z.max(minus.center_z) + n_sigmas * s;
    (lo, hi)
}

/// Normalized 1-D z-restriction of the state, including the exact
/// time-dependent phase, so that it solves the 1-D Schroedinger equation
/// with H = p_z^2/2m + mu_c (B0 + b z) sigma_z.
pub fn spinor_z_restriction(z: f64, t: f64, p: &PhysParams) -> SpinorAmplitude {
    let width = p.complex_width(t);
    let plus = branch_geometry(Sign::Plus, t, p);
    let minus = branch_geometry(Sign::Minus, t, p);
    let action = -t * t * t * p.mu_c * p.mu_c * p.b * p.b / (6.0 * p.m * p.hbar);
    let c1 = (I * action).exp()
        * width.powf(-0.5)
        * (p.sigma0 / (2.0 * PI).sqrt()).sqrt()
        / 2.0_f64.sqrt();
    SpinorAmplitude {
        up: c1 * plus.amplitude(z) * plus.norm,
        down: c1 * minus.amplitude(z) * minus.norm,
    }
}

/// Uniform z grid for the residual diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct ZGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl ZGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn at(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }
}

/// Relative residual || i hbar d_t psi - H psi || / || H psi || of the 1-D
/// z-restriction, with central finite differences in t and z. Diagnostic:
/// discretization limits the floor, so treat the value as a report, not a
/// proof.
pub fn schrodinger_residual(t: f64, grid: ZGrid, p: &PhysParams) -> Result<f64> {
    p.validate()?;
    if grid.points < 64 {
        return Err(Error::GridTooCoarse {
            points: grid.points,
            min: 64,
        });
    }
    if !(grid.min < grid.max) {
        return Err(Error::InvalidArgument(format!(
            "grid bounds must satisfy min < max, got [{}, {}]",
            grid.min, grid.max
        )));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "residual diagnostic needs t > 0, got {t}"
        )));
    }

    let n = grid.points;
    let h = grid.step();
    let dt = (1e-5 * t.max(1.0)).min(0.5 * t);

    let sample = |time: f64| -> Vec<SpinorAmplitude> {
        (0..n).map(|i| spinor_z_restriction(grid.at(i), time, p)).collect()
    };
    let now = sample(t);
    let fwd = sample(t + dt);
    let bwd = sample(t - dt);

    let hbar = p.hbar;
    let kinetic = -hbar * hbar / (2.0 * p.m);
    let mut residual_sq = 0.0;
    let mut h_psi_sq = 0.0;
    for i in 1..n - 1 {
        let z = grid.at(i);
        let potential = p.mu_c * (p.b0 + p.b * z);

        let lap_up = (now[i + 1].up - 2.0 * now[i].up + now[i - 1].up) / (h * h);
        let lap_dn = (now[i + 1].down - 2.0 * now[i].down + now[i - 1].down) / (h * h);
        let h_up = kinetic * lap_up + potential * now[i].up;
        let h_dn = kinetic * lap_dn - potential * now[i].down;

        let dt_up = (fwd[i].up - bwd[i].up) / (2.0 * dt);
        let dt_dn = (fwd[i].down - bwd[i].down) / (2.0 * dt);

        let r_up = I * hbar * dt_up - h_up;
        let r_dn = I * hbar * dt_dn - h_dn;
        residual_sq += r_up.norm_sqr() + r_dn.norm_sqr();
        h_psi_sq += h_up.norm_sqr() + h_dn.norm_sqr();
    }
    Ok((residual_sq / h_psi_sq).sqrt())
}
