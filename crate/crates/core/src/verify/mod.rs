//! The N = 2 leaf two-form, its Hamiltonian flow, and the verification
//! suites that compare the different descriptions of the dynamics.

mod checks;
mod form;
mod report;
mod suites;

pub use checks::{
    calibrate_sign, degeneration_check, degeneration_error, degeneration_grid, expected_potential_sign,
    flow_equivalence_test, general_n_spinless_form_check, leaf_form_checks, pointwise_flow_residuals,
    rational_limit_check, sign_calibration, spin_drift, spinless_limit_test, z0_drift, CalibrationOutcome,
    BROKEN_THRESHOLD, ISOSPECTRAL_TOLERANCE, PROBE_Z,
};
pub use form::{
    closedness_residual, hamiltonian_vector_field, identity8_residual, leaf_coupling, spinless_form,
    spinless_form_field, spinless_form_orientation, symplectic_flow, two_form_n2, PairPotentialSign,
    SpinlessFormFlow, SymplecticFlow, TwoFormN2, WConvention, DEGENERACY_THRESHOLD,
};
pub use report::{Check, ReportBuilder, VerificationReport};
pub use suites::{
    calibrated_sign, random_cell_point, random_leaf_state, random_n2_data, random_positions, random_rs_state,
    random_spin_state, resolve_sign, run_suite, run_suites, state_backends, test_backends, SignChoice, Suite,
    VerifyOptions, DEFAULT_SEED, SUITE_ETA,
};
