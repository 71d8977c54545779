//! The concentration function
//! `φ_{f0}(ε) = inf_{h ∈ H: ‖h - f0‖ < ε} ‖h‖_H² - log P(‖Z‖ < ε)`:
//! decentering term, small-ball term, tabulated profiles and checks.

pub mod box_qp;
pub mod checks;
pub mod profile;
pub mod small_ball;
pub mod waterfill;

pub use box_qp::{phi_a_box, phi_a_box_with, solve_box_qp, BoxOptions, BoxSolution};
pub use checks::{sandwich_check, shift_bound_check, Corruption, SandwichReport, ShiftReport};
pub use profile::{
    build_series_profile, build_sup_profile, phi_inverse, solve_epsilon_n, zeta_lower, ConcentrationProfile,
    KLNeighborhoodSpec, NormKind, ProfileCheck, Provenance, SeriesProfileSettings, WHITE_NOISE_LOWER_C,
};
pub use small_ball::{small_ball_series, small_ball_sup_mc, QuadForm, SmallBallEstimate, SmallBallMethod};
pub use waterfill::{phi_a_waterfill, phi_a_waterfill_with_tail, WaterfillSolution};
