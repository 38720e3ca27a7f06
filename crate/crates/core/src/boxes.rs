//! Finite-dimensional model of the split-box experiment with one particle
//! entangled between its path and its spin.
//!
//! The Hilbert space is path (Paris, Tokyo) tensor spin (up, down), with
//! basis order {Paris up, Paris down, Tokyo up, Tokyo down}. The shared
//! state is Psi2 = (Paris up + Tokyo down) / sqrt 2, matching the
//! continuous model's branch-spin pairing: Paris carries up_z, Tokyo
//! carries down_z.

use crate::error::{Error, Result};
use crate::measurement::{OutcomeLabel, Setting};
use crate::numerics::Complex;

/// Probabilities below this are treated as exactly zero outcomes.
const ZERO_PROB: f64 = 1e-30;

/// Pure path-spin state on the four-dimensional basis above.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpinState {
    amps: [Complex; 4],
}

impl PathSpinState {
    /// Build from amplitudes; must be unit-normalized within 1e-12.
    pub fn new(amps: [Complex; 4]) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "path-spin amplitudes must be unit-normalized, |psi|^2 = {norm_sq}"
            )));
        }
        Ok(Self { amps })
    }

    /// Product state path (x) spin from single-qubit amplitude pairs.
    pub fn product(path: [Complex; 2], spin: [Complex; 2]) -> Result<Self> {
        Self::new([
            path[0] * spin[0],
            path[0] * spin[1],
            path[1] * spin[0],
            path[1] * spin[1],
        ])
    }

    pub fn amplitudes(&self) -> &[Complex; 4] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Reduced path state (2x2, trace over spin).
    pub fn reduced_path(&self) -> [[Complex; 2]; 2] {
        let a = &self.amps;
        let mut rho = [[Complex::new(0.0, 0.0); 2]; 2];
        for p1 in 0..2 {
            for p2 in 0..2 {
                for s in 0..2 {
                    rho[p1][p2] += a[2 * p1 + s] * a[2 * p2 + s].conj();
                }
            }
        }
        rho
    }

    /// Reduced spin state (2x2, trace over path).
    pub fn reduced_spin(&self) -> [[Complex; 2]; 2] {
        let a = &self.amps;
        let mut rho = [[Complex::new(0.0, 0.0); 2]; 2];
        for s1 in 0..2 {
            for s2 in 0..2 {
                for p in 0..2 {
                    rho[s1][s2] += a[2 * p + s1] * a[2 * p + s2].conj();
                }
            }
        }
        rho
    }
}

/// The post-split entangled state (Paris up + Tokyo down) / sqrt 2.
pub fn make_psi2() -> PathSpinState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    PathSpinState {
        amps: [
            Complex::new(r, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(r, 0.0),
        ],
    }
}

fn setting_labels(setting: Setting) -> Result<[OutcomeLabel; 2]> {
    match setting {
        Setting::PositionZ => Ok([OutcomeLabel::Tokyo, OutcomeLabel::Paris]),
        Setting::SpinZ | Setting::SpinX => Ok([OutcomeLabel::SpinPlus, OutcomeLabel::SpinMinus]),
        Setting::MomentumZ => Err(Error::InvalidArgument(
            "the discrete boxes model has no momentum observable".into(),
        )),
    }
}

fn apply_projector(state: &PathSpinState, setting: Setting, outcome: OutcomeLabel) -> Result<[Complex; 4]> {
    let a = state.amps;
    let zero = Complex::new(0.0, 0.0);
    let projected = match (setting, outcome) {
        (Setting::PositionZ, OutcomeLabel::Tokyo) => [zero, zero, a[2], a[3]],
        (Setting::PositionZ, OutcomeLabel::Paris) => [a[0], a[1], zero, zero],
        (Setting::SpinZ, OutcomeLabel::SpinPlus) => [a[0], zero, a[2], zero],
        (Setting::SpinZ, OutcomeLabel::SpinMinus) => [zero, a[1], zero, a[3]],
        (Setting::SpinX, OutcomeLabel::SpinPlus) => {
            let paris = 0.5 * (a[0] + a[1]);
            let tokyo = 0.5 * (a[2] + a[3]);
            [paris, paris, tokyo, tokyo]
        }
        (Setting::SpinX, OutcomeLabel::SpinMinus) => {
            let paris = 0.5 * (a[0] - a[1]);
            let tokyo = 0.5 * (a[2] - a[3]);
            [paris, -paris, tokyo, -tokyo]
        }
        (Setting::MomentumZ, _) => {
            return Err(Error::InvalidArgument(
                "the discrete boxes model has no momentum observable".into(),
            ))
        }
        (s, o) => {
            return Err(Error::InvalidArgument(format!(
                "outcome label {o:?} does not belong to setting {s}"
            )))
        }
    };
    Ok(projected)
}

/// Born-rule projection: probability of `outcome` under `setting` and the
/// renormalized post-measurement state. A zero-probability outcome yields
/// `(0.0, None)`.
pub fn project(
    state: &PathSpinState,
    setting: Setting,
    outcome: OutcomeLabel,
) -> Result<(f64, Option<PathSpinState>)> {
    let projected = apply_projector(state, setting, outcome)?;
    let prob: f64 = projected.iter().map(|c| c.norm_sqr()).sum();
    if prob <= ZERO_PROB {
        return Ok((0.0, None));
    }
    let scale = prob.sqrt();
    let amps = projected.map(|c| c / scale);
    Ok((prob, Some(PathSpinState { amps })))
}

/// 4x4 Hermitian matrix carrier for steered ensembles.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    m: [[Complex; 4]; 4],
}

impl DensityMatrix4 {
    pub fn zero() -> Self {
        Self {
            m: [[Complex::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn from_pure(state: &PathSpinState) -> Self {
        let mut m = [[Complex::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = state.amps[i] * state.amps[j].conj();
            }
        }
        Self { m }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex {
        self.m[i][j]
    }

    pub fn trace(&self) -> Complex {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    /// Tr(rho^2), real part.
    pub fn purity(&self) -> f64 {
        let mut total = Complex::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                total += self.m[i][j] * self.m[j][i];
            }
        }
        total.re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut m = self.m;
        for row in &mut m {
            for v in row.iter_mut() {
                *v *= factor;
            }
        }
        Self { m }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        for i in 0..4 {
            for j in 0..4 {
                self.m[i][j] += factor * other.m[i][j];
            }
        }
    }

    /// Largest entrywise |difference| against another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    /// Path marginal (2x2, trace over spin). Basis index is 2*path + spin.
    pub fn reduced_path(&self) -> [[Complex; 2]; 2] {
        let mut rho = [[Complex::new(0.0, 0.0); 2]; 2];
        for p1 in 0..2 {
            for p2 in 0..2 {
                for s in 0..2 {
                    rho[p1][p2] += self.m[2 * p1 + s][2 * p2 + s];
                }
            }
        }
        rho
    }

    /// Spin marginal (2x2, trace over path).
    pub fn reduced_spin(&self) -> [[Complex; 2]; 2] {
        let mut rho = [[Complex::new(0.0, 0.0); 2]; 2];
        for s1 in 0..2 {
            for s2 in 0..2 {
                for p in 0..2 {
                    rho[s1][s2] += self.m[2 * p + s1][2 * p + s2];
                }
            }
        }
        rho
    }

    /// Hermiticity, trace window [0, 1] and positive semidefiniteness
    /// (smallest eigenvalue >= -1e-10). Sub-normalized matrices pass.
    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            for j in 0..4 {
                let diff = (self.m[i][j] - self.m[j][i].conj()).norm();
                if diff > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not Hermitian at ({i},{j}): asymmetry {diff:e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if tr.im.abs() > 1e-12 || tr.re < -1e-12 || tr.re > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "trace {tr} outside [0, 1]"
            )));
        }
        let min_eig = self
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not positive semidefinite: min eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    /// Eigenvalues of the Hermitian matrix, via the real symmetric
    /// embedding [[X, -Y], [Y, X]] whose spectrum doubles each eigenvalue.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut embed = [[0.0f64; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                embed[i][j] = self.m[i][j].re;
                embed[i][j + 4] = -self.m[i][j].im;
                embed[i + 4][j] = self.m[i][j].im;
                embed[i + 4][j + 4] = self.m[i][j].re;
            }
        }
        let mut eigs = jacobi_eigenvalues(embed);
        // Doubled spectrum: after sorting, adjacent pairs coincide.
        eigs.sort_by(f64::total_cmp);
        [eigs[0], eigs[2], eigs[4], eigs[6]]
    }
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric 8x8 matrix.
fn jacobi_eigenvalues(mut a: [[f64; 8]; 8]) -> [f64; 8] {
    const N: usize = 8;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() < 1e-15 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs = [0.0; 8];
    for (i, e) in eigs.iter_mut().enumerate() {
        *e = a[i][i];
    }
    eigs
}

/// Trace distance T(rho, sigma) = (1/2) ||rho - sigma||_1, by
/// eigendecomposition of the Hermitian difference.
pub fn trace_distance(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> f64 {
    let mut diff = rho.clone();
    diff.add_scaled(sigma, -1.0);
    0.5 * diff.eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

/// One steered ensemble member: outcome label, its probability and the
/// normalized post-measurement state.
#[derive(Debug, Clone)]
pub struct AssemblageMember {
    pub label: OutcomeLabel,
    pub probability: f64,
    pub state: DensityMatrix4,
}

/// The steered ensemble Alice prepares at Bob's side by choosing
/// `setting`.
#[derive(Debug, Clone)]
pub struct Assemblage {
    pub setting: Setting,
    pub members: Vec<AssemblageMember>,
}

impl Assemblage {
    /// Setting-averaged state sum_a p(a) rho_a.
    pub fn average_state(&self) -> DensityMatrix4 {
        let mut avg = DensityMatrix4::zero();
        for member in &self.members {
            avg.add_scaled(&member.state, member.probability);
        }
        avg
    }

    pub fn probability_sum(&self) -> f64 {
        self.members.iter().map(|m| m.probability).sum()
    }
}

/// Enumerate every outcome of `setting` on `state`. Zero-probability
/// outcomes carry no post-state and are omitted.
pub fn assemblage(state: &PathSpinState, setting: Setting) -> Result<Assemblage> {
    let mut members = Vec::new();
    for label in setting_labels(setting)? {
        let (probability, post) = project(state, setting, label)?;
        if let Some(post) = post {
            members.push(AssemblageMember {
                label,
                probability,
                state: DensityMatrix4::from_pure(&post),
            });
        }
    }
    Ok(Assemblage { setting, members })
}

fn max_2x2_diff(a: &[[Complex; 2]; 2], b: &[[Complex; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Largest pairwise deviation between the path marginals of the
/// assemblages' averaged states. This is the quantity non-signaling pins
/// to zero: the spatial statistics anywhere (detection probabilities and
/// path coherences) cannot depend on which observable was measured. It is
/// the discrete counterpart of the outcome-averaged steered pdf equaling
/// the unconditioned position marginal.
pub fn assemblage_average_deviation(assemblages: &[Assemblage]) -> Result<f64> {
    if assemblages.len() < 2 {
        return Err(Error::InvalidArgument(
            "non-signaling comparison needs at least two assemblages".into(),
        ));
    }
    let marginals: Vec<[[Complex; 2]; 2]> = assemblages
        .iter()
        .map(|a| a.average_state().reduced_path())
        .collect();
    let mut worst = 0.0f64;
    for i in 0..marginals.len() {
        for j in (i + 1)..marginals.len() {
            worst = worst.max(max_2x2_diff(&marginals[i], &marginals[j]));
        }
    }
    Ok(worst)
}

/// Non-signaling deviation of `state` across measurement settings, on the
/// path marginal of the setting-averaged states.
pub fn nonsignaling_check(state: &PathSpinState, settings: &[Setting]) -> Result<f64> {
    let assemblages: Vec<Assemblage> = settings
        .iter()
        .map(|&s| assemblage(state, s))
        .collect::<Result<_>>()?;
    assemblage_average_deviation(&assemblages)
}

/// Diagnostic companion to `nonsignaling_check`: the deviation of the FULL
/// 4x4 setting-averaged states. Settings that dephase different coherences
/// (sigma_x versus the path/spin-z pair) leave different cross-location
/// coherences behind, so for the entangled state this is large (1/4) even
/// though nothing locally observable changes; the steering signature lives
/// in exactly those conditional correlations.
pub fn full_average_deviation(state: &PathSpinState, settings: &[Setting]) -> Result<f64> {
    if settings.len() < 2 {
        return Err(Error::InvalidArgument(
            "non-signaling comparison needs at least two settings".into(),
        ));
    }
    let averages: Vec<DensityMatrix4> = settings
        .iter()
        .map(|&s| assemblage(state, s).map(|a| a.average_state()))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..averages.len() {
        for j in (i + 1)..averages.len() {
            worst = worst.max(averages[i].max_abs_diff(&averages[j]));
        }
    }
    Ok(worst)
}

/// Pairwise trace distances between the members of two assemblages, and
/// the largest distance from any member of `a1` to its closest member of
/// `a2`.
#[derive(Debug, Clone)]
pub struct SteeringReport {
    pub row_labels: Vec<OutcomeLabel>,
    pub col_labels: Vec<OutcomeLabel>,
    pub matrix: Vec<Vec<f64>>,
    pub max_min_distance: f64,
}

pub fn steering_distinguishability(a1: &Assemblage, a2: &Assemblage) -> SteeringReport {
    let matrix: Vec<Vec<f64>> = a1
        .members
        .iter()
        .map(|m1| {
            a2.members
                .iter()
                .map(|m2| trace_distance(&m1.state, &m2.state))
                .collect()
        })
        .collect();
    let max_min_distance = matrix
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .fold(0.0f64, f64::max);
    SteeringReport {
        row_labels: a1.members.iter().map(|m| m.label).collect(),
        col_labels: a2.members.iter().map(|m| m.label).collect(),
        matrix,
        max_min_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::outcome_probabilities;
    use crate::wavefunction::PhysParams;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn psi2_is_maximally_path_spin_mixed() {
        let psi2 = make_psi2();
        assert!((psi2.norm_sqr() - 1.0).abs() < 1e-15);

        let path = psi2.reduced_path();
        let spin = psi2.reduced_spin();
        for rho in [path, spin] {
            assert!((rho[0][0].re - 0.5).abs() < 1e-15);
            assert!((rho[1][1].re - 0.5).abs() < 1e-15);
            assert!(rho[0][1].norm() < 1e-15);
            assert!(rho[1][0].norm() < 1e-15);
        }
    }

    #[test]
    fn spin_down_collapses_to_tokyo() {
        let psi2 = make_psi2();
        let (prob, post) = project(&psi2, Setting::SpinZ, OutcomeLabel::SpinMinus).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        let post = post.unwrap();
        let expected = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for (a, e) in post.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-14);
        }
    }

    #[test]
    fn finding_the_particle_at_tokyo() {
        let psi2 = make_psi2();
        let (prob, post) = project(&psi2, Setting::PositionZ, OutcomeLabel::Tokyo).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        let post = post.unwrap();
        assert!((post.amplitudes()[3].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spin_x_plus_delocalizes() {
        let psi2 = make_psi2();
        let (prob, post) = project(&psi2, Setting::SpinX, OutcomeLabel::SpinPlus).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        let post = post.unwrap();
        // (Paris + Tokyo)/sqrt2 (x) up_x = (1/2, 1/2, 1/2, 1/2).
        for a in post.amplitudes() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_probability_outcome_has_no_state() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let paris_up_x =
            PathSpinState::product([c(1.0, 0.0), c(0.0, 0.0)], [c(r, 0.0), c(r, 0.0)]).unwrap();
        let (prob, post) = project(&paris_up_x, Setting::SpinX, OutcomeLabel::SpinMinus).unwrap();
        assert_eq!(prob, 0.0);
        assert!(post.is_none());
    }

    #[test]
    fn rejects_momentum_and_mismatched_labels() {
        let psi2 = make_psi2();
        assert!(project(&psi2, Setting::MomentumZ, OutcomeLabel::Tokyo).is_err());
        assert!(project(&psi2, Setting::PositionZ, OutcomeLabel::SpinPlus).is_err());
        assert!(assemblage(&psi2, Setting::MomentumZ).is_err());
    }

    #[test]
    fn assemblages_are_complete_and_pure() {
        let psi2 = make_psi2();
        for setting in [Setting::PositionZ, Setting::SpinZ, Setting::SpinX] {
            let asm = assemblage(&psi2, setting).unwrap();
            assert!((asm.probability_sum() - 1.0).abs() < 1e-12);
            for member in &asm.members {
                member.state.validate().unwrap();
                assert!(
                    (member.state.purity() - 1.0).abs() < 1e-10,
                    "{setting}/{:?} purity {}",
                    member.label,
                    member.state.purity()
                );
            }
        }
    }

    #[test]
    fn nonsignaling_holds_for_psi2_and_products() {
        let psi2 = make_psi2();
        let all = [Setting::PositionZ, Setting::SpinZ, Setting::SpinX];
        let dev = nonsignaling_check(&psi2, &all).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let product =
            PathSpinState::product([c(1.0, 0.0), c(0.0, 0.0)], [c(r, 0.0), c(r, 0.0)]).unwrap();
        let dev = nonsignaling_check(&product, &all).unwrap();
        assert!(dev < 1e-12, "product deviation {dev}");

        assert!(nonsignaling_check(&psi2, &[Setting::SpinZ]).is_err());
    }

    #[test]
    fn full_averages_expose_the_dephasing_mismatch() {
        // Path-z and spin-z measurements kill the same coherence of Psi2,
        // sigma_x a different one; the full 4x4 averages therefore differ
        // by exactly 1/4 while every local marginal stays put.
        let psi2 = make_psi2();
        let zs = [Setting::PositionZ, Setting::SpinZ];
        assert!(full_average_deviation(&psi2, &zs).unwrap() < 1e-12);
        let all = [Setting::PositionZ, Setting::SpinZ, Setting::SpinX];
        let dev = full_average_deviation(&psi2, &all).unwrap();
        assert!((dev - 0.25).abs() < 1e-12, "full deviation {dev}");
    }

    #[test]
    fn corrupted_assemblage_signals() {
        // Negative control: drop the post-state renormalization, so each
        // member carries rho scaled by its own probability.
        let psi2 = make_psi2();
        let honest = assemblage(&psi2, Setting::PositionZ).unwrap();
        let corrupted = Assemblage {
            setting: Setting::PositionZ,
            members: honest
                .members
                .iter()
                .map(|m| AssemblageMember {
                    label: m.label,
                    probability: m.probability,
                    state: m.state.scaled(m.probability),
                })
                .collect(),
        };
        let dev = assemblage_average_deviation(&[honest, corrupted]).unwrap();
        assert!(dev > 0.1, "corruption went unnoticed: deviation {dev}");
    }

    #[test]
    fn eigenvalues_of_a_pure_projector() {
        let rho = DensityMatrix4::from_pure(&make_psi2());
        let mut eigs = rho.eigenvalues();
        eigs.sort_by(f64::total_cmp);
        assert!((eigs[3] - 1.0).abs() < 1e-12);
        for e in &eigs[..3] {
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_limits() {
        let psi2 = make_psi2();
        let rho = DensityMatrix4::from_pure(&psi2);
        assert!(trace_distance(&rho, &rho) < 1e-14);

        // Orthogonal pure states are perfectly distinguishable.
        let tokyo_down =
            PathSpinState::new([c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let paris_up =
            PathSpinState::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let d = trace_distance(
            &DensityMatrix4::from_pure(&tokyo_down),
            &DensityMatrix4::from_pure(&paris_up),
        );
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn position_and_spin_z_assemblages_coincide() {
        let psi2 = make_psi2();
        let pos = assemblage(&psi2, Setting::PositionZ).unwrap();
        let spin = assemblage(&psi2, Setting::SpinZ).unwrap();
        let report = steering_distinguishability(&pos, &spin);
        assert!(report.max_min_distance < 1e-12);
        let zero_entries = report
            .matrix
            .iter()
            .flatten()
            .filter(|d| **d < 1e-12)
            .count();
        assert!(zero_entries >= 2, "matrix {:?}", report.matrix);
    }

    #[test]
    fn position_vs_spin_x_reaches_sqrt3_over_2() {
        let psi2 = make_psi2();
        let pos = assemblage(&psi2, Setting::PositionZ).unwrap();
        let x = assemblage(&psi2, Setting::SpinX).unwrap();
        let report = steering_distinguishability(&pos, &x);
        let expected = 3.0f64.sqrt() / 2.0;
        assert!(
            (report.max_min_distance - expected).abs() < 1e-9,
            "max-min {} vs {expected}",
            report.max_min_distance
        );
        // Every pairwise distance here equals the pure-state value
        // sqrt(1 - |<a|b>|^2) with overlap 1/2; check the oracle formula.
        let oracle = (1.0f64 - 0.25).sqrt();
        for row in &report.matrix {
            for d in row {
                assert!((d - oracle).abs() < 1e-9, "distance {d} vs {oracle}");
            }
        }
    }

    #[test]
    fn identical_settings_are_indistinguishable() {
        let psi2 = make_psi2();
        let a = assemblage(&psi2, Setting::SpinX).unwrap();
        let b = assemblage(&psi2, Setting::SpinX).unwrap();
        let report = steering_distinguishability(&a, &b);
        assert!(report.max_min_distance < 1e-12);
    }

    #[test]
    fn discrete_probabilities_match_separated_continuous_limit() {
        // For fully separated branches the continuous sigma_x law gives
        // 1/2 each, the discrete model exactly 1/2.
        let p = PhysParams::default();
        let continuous = outcome_probabilities(Setting::SpinX, 20.0, &p);
        let psi2 = make_psi2();
        let discrete = assemblage(&psi2, Setting::SpinX).unwrap();
        for (cont, disc) in continuous.iter().zip(&discrete.members) {
            assert!(
                (cont.1 - disc.probability).abs() < 1e-9,
                "{:?}: {} vs {}",
                cont.0,
                cont.1,
                disc.probability
            );
        }
    }

    #[test]
    fn density_matrix_validation_rejects_bad_inputs() {
        let mut bad = DensityMatrix4::from_pure(&make_psi2());
        bad.m[0][1] = c(0.3, 0.0);
        assert!(bad.validate().is_err());

        let overweight = DensityMatrix4::from_pure(&make_psi2()).scaled(1.5);
        assert!(overweight.validate().is_err());
    }
}
