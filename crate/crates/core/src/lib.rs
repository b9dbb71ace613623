//! Three Kuramoto oscillators with inertia under pairwise and triadic
//! (2-simplex) coupling.
//!
//! The model and integrator are generic over the scalar type; the
//! classification, scanning and continuation layers work in `f64`.

pub mod acceptance;
pub mod classifier;
pub mod continuation;
pub mod integrator;
pub mod model;
pub mod scalar;
pub mod scan;
pub mod stability;

pub use classifier::{
    classify, detect_switching, peak_sequence, summarize, summarize_all, ClassifierTolerances, ObservableSummary,
    StateLabel, StateTag,
};
pub use continuation::{detect_hysteresis, sweep, BifurcationBranch, InitPolicy, SweepAxis, SweepSpec};
pub use integrator::{integrate, settle, IntegrateError, IntegratorConfig, Trajectory};
pub use model::{
    phase_locked_offset, rhs, stability_boundaries, sync_velocity, Convention, Derivative,
    ModelParams, PhaseState,
};
pub use scalar::{wrap_angle, Scalar};
pub use scan::{render_map, scan_plane, ScanCellResult, ScanGrid};
pub use stability::{jacobian_eigen, StabilityError};

pub type Params = ModelParams<f64>;
pub type State = PhaseState<f64>;
pub type Config = IntegratorConfig<f64>;
pub type Traj = Trajectory<f64>;

pub type Params32 = ModelParams<f32>;
pub type State32 = PhaseState<f32>;
pub type Config32 = IntegratorConfig<f32>;
pub type Traj32 = Trajectory<f32>;
