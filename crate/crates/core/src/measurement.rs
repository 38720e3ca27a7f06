//! The collapse postulate for Alice's four measurement settings.
//!
//! Alice's devices sit on the Tokyo side (the down_z / phi-minus branch).
//! Position, spin-z and momentum measurements therefore have a
//! negative-result channel: her device registers nothing and the global
//! state still collapses, onto the Paris branch. A sigma_x measurement has
//! no such channel; both outcomes fire at her device and leave the packet
//! delocalized over both sides.

use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::wavefunction::{branch_geometry, branch_overlap, BranchGeometry, PhysParams, Sign};

/// Probabilities this close to 0 or 1 are snapped exact; they are below
/// the resolution of a 53-bit uniform draw.
const PROB_SNAP_EPS: f64 = 1e-15;

/// Guard for the singular sigma_x-minus state near t = 0.
pub const SEPARABILITY_EPS: f64 = 1e-10;

/// Alice's measurement choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    PositionZ,
    SpinZ,
    SpinX,
    MomentumZ,
}

impl Setting {
    pub const ALL: [Setting; 4] = [
        Setting::PositionZ,
        Setting::SpinZ,
        Setting::SpinX,
        Setting::MomentumZ,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Setting::PositionZ => "position_z",
            Setting::SpinZ => "spin_z",
            Setting::SpinX => "spin_x",
            Setting::MomentumZ => "momentum_z",
        }
    }

    pub fn parse(s: &str) -> Result<Setting> {
        match s {
            "position_z" => Ok(Setting::PositionZ),
            "spin_z" => Ok(Setting::SpinZ),
            "spin_x" => Ok(Setting::SpinX),
            "momentum_z" => Ok(Setting::MomentumZ),
            _ => Err(Error::Parse(format!(
                "unknown setting `{s}` (expected position_z, spin_z, spin_x or momentum_z)"
            ))),
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spin state label of a collapsed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinLabel {
    UpZ,
    DownZ,
    UpX,
    DownX,
}

impl SpinLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpinLabel::UpZ => "up_z",
            SpinLabel::DownZ => "down_z",
            SpinLabel::UpX => "up_x",
            SpinLabel::DownX => "down_x",
        }
    }

    pub fn parse(s: &str) -> Result<SpinLabel> {
        match s {
            "up_z" => Ok(SpinLabel::UpZ),
            "down_z" => Ok(SpinLabel::DownZ),
            "up_x" => Ok(SpinLabel::UpX),
            "down_x" => Ok(SpinLabel::DownX),
            _ => Err(Error::Parse(format!("unknown spin label `{s}`"))),
        }
    }
}

/// Where the collapsed wavefunction lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Tokyo,
    Paris,
    Delocalized,
}

impl Location {
    pub fn as_str(&self) -> &'static str {
        match self {
            Location::Tokyo => "tokyo",
            Location::Paris => "paris",
            Location::Delocalized => "delocalized",
        }
    }

    pub fn parse(s: &str) -> Result<Location> {
        match s {
            "tokyo" => Ok(Location::Tokyo),
            "paris" => Ok(Location::Paris),
            "delocalized" => Ok(Location::Delocalized),
            _ => Err(Error::Parse(format!("unknown location `{s}`"))),
        }
    }
}

/// Outcome label used in probability tables and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeLabel {
    /// Tokyo side (Alice's detector fires).
    Tokyo,
    /// Paris side (Alice's detector registers nothing).
    Paris,
    /// Spin eigenvalue +hbar/2.
    SpinPlus,
    /// Spin eigenvalue -hbar/2.
    SpinMinus,
}

impl OutcomeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeLabel::Tokyo => "tokyo",
            OutcomeLabel::Paris => "paris",
            OutcomeLabel::SpinPlus => "+hbar/2",
            OutcomeLabel::SpinMinus => "-hbar/2",
        }
    }
}

/// What Alice's device recorded for one atom. `detected_locally == false`
/// encodes a negative result: the device registered nothing, and `value`
/// holds the eigenvalue inferred for the remote branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub setting: Setting,
    pub value: f64,
    pub detected_locally: bool,
}

/// Post-measurement state descriptor. Position and momentum eigenstates
/// are symbolic (they are not square-integrable); the Gaussian forms carry
/// enough geometry to evaluate their position density.
#[derive(Debug, Clone, PartialEq)]
pub enum CollapsedState {
    PositionEigenstate {
        z: f64,
        spin: SpinLabel,
        location: Location,
    },
    SingleBranchGaussian {
        branch: Sign,
        geometry: BranchGeometry,
        location: Location,
    },
    BranchSuperposition {
        relative_sign: Sign,
        spin: SpinLabel,
        plus: BranchGeometry,
        minus: BranchGeometry,
        /// Re<phi_plus|phi_minus> at collapse time.
        overlap_re: f64,
    },
    MomentumEigenstate {
        p: f64,
        spin: SpinLabel,
        location: Location,
    },
}

/// Structural form of a collapsed state, the `bob_form` of protocol records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateForm {
    PositionEigenstate,
    SingleBranchGaussian,
    BranchSuperposition,
    MomentumEigenstate,
}

impl StateForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateForm::PositionEigenstate => "position_eigenstate",
            StateForm::SingleBranchGaussian => "single_branch_gaussian",
            StateForm::BranchSuperposition => "branch_superposition",
            StateForm::MomentumEigenstate => "momentum_eigenstate",
        }
    }

    pub fn parse(s: &str) -> Result<StateForm> {
        match s {
            "position_eigenstate" => Ok(StateForm::PositionEigenstate),
            "single_branch_gaussian" => Ok(StateForm::SingleBranchGaussian),
            "branch_superposition" => Ok(StateForm::BranchSuperposition),
            "momentum_eigenstate" => Ok(StateForm::MomentumEigenstate),
            _ => Err(Error::Parse(format!("unknown state form `{s}`"))),
        }
    }
}

/// Branch-to-spin assignment: phi-plus carries up_z, phi-minus down_z.
pub fn branch_spin(sign: Sign) -> SpinLabel {
    match sign {
        Sign::Plus => SpinLabel::UpZ,
        Sign::Minus => SpinLabel::DownZ,
    }
}

/// Branch-to-side assignment: phi-plus is the Paris/Bob side, phi-minus
/// the Tokyo/Alice side.
pub fn branch_location(sign: Sign) -> Location {
    match sign {
        Sign::Plus => Location::Paris,
        Sign::Minus => Location::Tokyo,
    }
}

impl CollapsedState {
    pub fn form(&self) -> StateForm {
        match self {
            CollapsedState::PositionEigenstate { .. } => StateForm::PositionEigenstate,
            CollapsedState::SingleBranchGaussian { .. } => StateForm::SingleBranchGaussian,
            CollapsedState::BranchSuperposition { .. } => StateForm::BranchSuperposition,
            CollapsedState::MomentumEigenstate { .. } => StateForm::MomentumEigenstate,
        }
    }

    pub fn spin_label(&self) -> SpinLabel {
        match self {
            CollapsedState::PositionEigenstate { spin, .. } => *spin,
            CollapsedState::SingleBranchGaussian { branch, .. } => branch_spin(*branch),
            CollapsedState::BranchSuperposition { spin, .. } => *spin,
            CollapsedState::MomentumEigenstate { spin, .. } => *spin,
        }
    }

    pub fn location(&self) -> Location {
        match self {
            CollapsedState::PositionEigenstate { location, .. } => *location,
            CollapsedState::SingleBranchGaussian { location, .. } => *location,
            CollapsedState::BranchSuperposition { .. } => Location::Delocalized,
            CollapsedState::MomentumEigenstate { location, .. } => *location,
        }
    }
}

/// Outcome labels and Born probabilities for a setting at time t.
///
/// PositionZ and MomentumZ resolve the branch (side), each 1/2. SpinZ is
/// 1/2 each. SpinX follows the branch-superposition norms
/// (1 +- Re<phi_plus|phi_minus>)/2.
pub fn outcome_probabilities(setting: Setting, t: f64, p: &PhysParams) -> Vec<(OutcomeLabel, f64)> {
    match setting {
        Setting::PositionZ | Setting::MomentumZ => vec![
            (OutcomeLabel::Tokyo, 0.5),
            (OutcomeLabel::Paris, 0.5),
        ],
        Setting::SpinZ => vec![
            (OutcomeLabel::SpinPlus, 0.5),
            (OutcomeLabel::SpinMinus, 0.5),
        ],
        Setting::SpinX => {
            let re = branch_overlap(t, p).re;
            let mut plus = 0.5 * (1.0 + re);
            let mut minus = 0.5 * (1.0 - re);
            if minus < PROB_SNAP_EPS {
                plus = 1.0;
                minus = 0.0;
            } else if plus < PROB_SNAP_EPS {
                plus = 0.0;
                minus = 1.0;
            }
            vec![
                (OutcomeLabel::SpinPlus, plus),
                (OutcomeLabel::SpinMinus, minus),
            ]
        }
    }
}

/// Sample one measurement: the outcome Alice's apparatus reports and the
/// collapsed global state.
pub fn measure(
    setting: Setting,
    t: f64,
    p: &PhysParams,
    rng: &mut RngStream,
) -> (Outcome, CollapsedState) {
    match setting {
        Setting::PositionZ => {
            let tokyo = rng.bernoulli(0.5);
            let sign = if tokyo { Sign::Minus } else { Sign::Plus };
            let geom = branch_geometry(sign, t, p);
            let z = geom.center_z + geom.position_sd() * rng.normal();
            let state = CollapsedState::PositionEigenstate {
                z,
                spin: branch_spin(sign),
                location: branch_location(sign),
            };
            (
                Outcome {
                    setting,
                    value: z,
                    detected_locally: tokyo,
                },
                state,
            )
        }
        Setting::SpinZ => {
            let tokyo = rng.bernoulli(0.5);
            let sign = if tokyo { Sign::Minus } else { Sign::Plus };
            let geom = branch_geometry(sign, t, p);
            let value = match sign {
                Sign::Plus => 0.5 * p.hbar,
                Sign::Minus => -0.5 * p.hbar,
            };
            let state = CollapsedState::SingleBranchGaussian {
                branch: sign,
                geometry: geom,
                location: branch_location(sign),
            };
            (
                Outcome {
                    setting,
                    value,
                    detected_locally: tokyo,
                },
                state,
            )
        }
        Setting::SpinX => {
            let probs = outcome_probabilities(setting, t, p);
            let p_plus = probs[0].1;
            let plus = rng.uniform() < p_plus;
            let (relative_sign, spin, value) = if plus {
                (Sign::Plus, SpinLabel::UpX, 0.5 * p.hbar)
            } else {
                (Sign::Minus, SpinLabel::DownX, -0.5 * p.hbar)
            };
            let state = CollapsedState::BranchSuperposition {
                relative_sign,
                spin,
                plus: branch_geometry(Sign::Plus, t, p),
                minus: branch_geometry(Sign::Minus, t, p),
                overlap_re: branch_overlap(t, p).re,
            };
            (
                Outcome {
                    setting,
                    value,
                    detected_locally: true,
                },
                state,
            )
        }
        Setting::MomentumZ => {
            let tokyo = rng.bernoulli(0.5);
            let sign = if tokyo { Sign::Minus } else { Sign::Plus };
            let geom = branch_geometry(sign, t, p);
            let p_z = geom.mean_momentum_z + geom.momentum_sd() * rng.normal();
            let state = CollapsedState::MomentumEigenstate {
                p: p_z,
                spin: branch_spin(sign),
                location: branch_location(sign),
            };
            (
                Outcome {
                    setting,
                    value: p_z,
                    detected_locally: tokyo,
                },
                state,
            )
        }
    }
}

/// Collapse caused by Alice's detector registering nothing: the state
/// localizes on the Paris branch. Defined for PositionZ, SpinZ and
/// MomentumZ; sigma_x has no negative-result channel.
pub fn remote_collapse(
    setting: Setting,
    local_outcome_absent: bool,
    t: f64,
    p: &PhysParams,
) -> Result<CollapsedState> {
    if !local_outcome_absent {
        return Err(Error::InvalidArgument(
            "remote collapse applies only when the local outcome is absent".into(),
        ));
    }
    let geom = branch_geometry(Sign::Plus, t, p);
    match setting {
        Setting::PositionZ => Ok(CollapsedState::PositionEigenstate {
            z: geom.center_z,
            spin: SpinLabel::UpZ,
            location: Location::Paris,
        }),
        Setting::SpinZ => Ok(CollapsedState::SingleBranchGaussian {
            branch: Sign::Plus,
            geometry: geom,
            location: Location::Paris,
        }),
        Setting::MomentumZ => Ok(CollapsedState::MomentumEigenstate {
            p: geom.mean_momentum_z,
            spin: SpinLabel::UpZ,
            location: Location::Paris,
        }),
        Setting::SpinX => Err(Error::InvalidArgument(
            "sigma_x has no negative-result channel: both outcomes occur at Alice's device"
                .into(),
        )),
    }
}

/// Position density of a steered (collapsed) state. Eigenstate forms are
/// symbolic and rejected; the superposition forms show interference.
pub fn steered_pdf(collapsed: &CollapsedState, z: f64) -> Result<f64> {
    match collapsed {
        CollapsedState::PositionEigenstate { .. } => Err(Error::NotNormalizable(
            "position eigenstate is a delta distribution; report it symbolically".into(),
        )),
        CollapsedState::MomentumEigenstate { .. } => Err(Error::NotNormalizable(
            "momentum eigenstate has no normalizable position density".into(),
        )),
        CollapsedState::SingleBranchGaussian { geometry, .. } => Ok(geometry.position_pdf(z)),
        CollapsedState::BranchSuperposition {
            relative_sign,
            plus,
            minus,
            overlap_re,
            ..
        } => {
            let denom = 2.0 * (1.0 + relative_sign.factor() * overlap_re);
            if denom.abs() <= SEPARABILITY_EPS {
                return Err(Error::NotNormalizable(format!(
                    "branch superposition with relative sign {relative_sign:?} is singular \
                     (norm {denom:.3e}); evolve past the separability threshold first"
                )));
            }
            let amp = plus.amplitude(z) + relative_sign.factor() * minus.amplitude(z);
            Ok(amp.norm_sqr() / denom)
        }
    }
}
