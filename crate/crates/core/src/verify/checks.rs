use num_complex::Complex64;

use super::form::{
    closedness_residual, identity8_sides, max_deviation, spinless_form, spinless_form_orientation, symplectic_flow,
    two_form_n2, PairPotentialSign, SpinlessFormFlow, SymplecticFlow, WConvention,
};
use super::report::{ReportBuilder, VerificationReport};
use crate::dynamics::{
    integrate, n2_flow_rhs, spin_rs_rhs, IntegratorOptions, LeafFlow, N2LeafState, RsFlow, RsState, SignConvention,
    SpinFlow, SpinState, Trajectory,
};
use crate::elliptic::{BranchDatum, Lattice};
use crate::error::{Error, Result};
use crate::lax::{f3_squared_from_z0, isospectral_drift, normalize_z0, solve_z0, N2Data};

/// Drift below which a sign convention counts as isospectral.
pub const ISOSPECTRAL_TOLERANCE: f64 = 1e-8;
/// Drift above which a sign convention counts as broken.
pub const BROKEN_THRESHOLD: f64 = 1e-3;

/// Spectral point used when comparing traces of powers of the Lax matrix.
pub const PROBE_Z: Complex64 = Complex64::new(0.31, 0.47);

pub(crate) fn precise_options(samples: usize) -> IntegratorOptions {
    IntegratorOptions::with_tolerances(1e-12, 1e-14).samples(samples)
}

fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn leaf_view(s: &SpinState) -> [Complex64; 4] {
    [s.x[0], s.x[1], s.f[(0, 0)], s.f[(1, 1)]]
}

fn leaf_coords(s: &N2LeafState) -> [Complex64; 4] {
    [s.x1, s.x2, s.f1, s.f2]
}

fn array_deviation(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    a.iter().zip(b).map(|(p, q)| rel(*p, *q)).fold(0.0, f64::max)
}

fn energy_drift<S>(traj: &Trajectory<S>, energy: impl Fn(&S) -> Complex64) -> f64 {
    let h0 = energy(traj.first());
    traj.states.iter().map(|s| rel(energy(s), h0)).fold(0.0, f64::max)
}

/// Re-solves `z0` at every snapshot of an N = 2 spin trajectory and returns
/// the largest distance from the normalized initial value.
pub fn z0_drift(traj: &Trajectory<SpinState>, lattice: &Lattice) -> Result<f64> {
    let first = solve_z0(&N2Data::from_spin(traj.first())?, None, lattice)?;
    let mut guess = first.z0;
    let mut worst = 0.0f64;
    for s in &traj.states {
        let sol = solve_z0(&N2Data::from_spin(s)?, Some(guess), lattice)?;
        guess = sol.z0;
        worst = worst.max((sol.z0 - first.z0).norm());
    }
    Ok(worst)
}

/// Integrates the three N = 2 descriptions from one leaf point: the leaf
/// flow, the Hamiltonian flow of the leaf form, and the spin equations on
/// the embedded state with `f12 = f21 = f3`. Compares positions and
/// diagonal velocities pairwise, and checks energy, `z0` and the induced
/// second-order system along the way.
pub fn flow_equivalence_test(
    initial: &N2LeafState,
    t_end: f64,
    tol: f64,
    sign: SignConvention,
    convention: WConvention,
    lattice: &Lattice,
) -> Result<VerificationReport> {
    let mut rep = ReportBuilder::new("flow-equivalence");
    initial.validate(lattice)?;
    let data = N2Data::from_leaf(initial, lattice)?;
    let opts = precise_options(101);
    let span = (0.0, t_end);

    let a = integrate(&LeafFlow { lattice }, initial, span, &opts)?;
    let b = integrate(&SymplecticFlow { lattice, convention }, initial, span, &opts)?;
    let c = integrate(&SpinFlow { lattice, sign }, &data.spin_state(real(1.0)), span, &opts)?;

    let (mut ab, mut ac, mut bc) = (0.0f64, 0.0f64, 0.0f64);
    let (mut chart, mut second_order, mut balance) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..a.states.len() {
        let (sa, sb) = (leaf_coords(&a.states[k]), leaf_coords(&b.states[k]));
        let sc = leaf_view(&c.states[k]);
        ab = ab.max(array_deviation(&sa, &sb));
        ac = ac.max(array_deviation(&sa, &sc));
        bc = bc.max(array_deviation(&sb, &sc));

        let leaf = &a.states[k];
        let spin = &c.states[k];
        let f3_sq = f3_squared_from_z0(leaf, lattice)?;
        chart = chart.max(rel(f3_sq, spin.f[(0, 1)] * spin.f[(1, 0)]));
        let leaf_data = N2Data { f3_sq, ..N2Data::from_leaf(leaf, lattice)? };
        let accel = n2_flow_rhs(leaf, lattice)?[2];
        let (_, rhs) = identity8_sides(&leaf_data, leaf.z0, lattice)?;
        second_order = second_order.max(rel(accel, rhs));
        let (_, fdot) = spin_rs_rhs(spin, lattice, sign)?;
        balance = balance.max((fdot[(0, 0)] + fdot[(1, 1)]).norm());
    }
    let leaf_tol = if convention == WConvention::OddCombination { 1e-9 } else { tol };
    rep.check("leaf-vs-symplectic", ab, leaf_tol)
        .check("leaf-vs-spin", ac, tol)
        .check("symplectic-vs-spin", bc, tol);

    rep.check("energy-drift-leaf", energy_drift(&a, |s| s.f1 + s.f2), 1e-8)
        .check("energy-drift-symplectic", energy_drift(&b, |s| s.f1 + s.f2), 1e-8)
        .check("energy-drift-spin", energy_drift(&c, |s| s.f[(0, 0)] + s.f[(1, 1)]), 1e-8);
    rep.check("z0-drift-spin", z0_drift(&c, lattice)?, 1e-8);
    rep.check("chart-f3sq-vs-spin", chart, tol);
    rep.check("second-order-system", second_order, 1e-8);
    rep.check("momentum-balance-spin", balance, 1e-12);

    if (initial.z0 - initial.eta).norm() < 1e-14 {
        let rs0 = RsState::new(vec![initial.x1, initial.x2], vec![initial.f1, initial.f2], initial.eta)?;
        let d = integrate(&RsFlow { lattice }, &rs0, span, &opts)?;
        let worst = a
            .states
            .iter()
            .zip(&d.states)
            .map(|(l, r)| array_deviation(&leaf_coords(l), &[r.x[0], r.x[1], r.f[0], r.f[1]]))
            .fold(0.0, f64::max);
        rep.check("leaf-vs-spinless-rs", worst, tol);
    }
    rep.note(format!(
        "t in [0, {t_end}], rel_tol 1e-12; W convention {}; spin sign {:?}",
        convention.name(),
        sign
    ));
    Ok(rep.finish(None, Some(convention.name().to_string())))
}

/// Pointwise comparison of [`symplectic_flow`] with the leaf flow at one
/// state, plus `dH(X_H)`.
pub fn pointwise_flow_residuals(state: &N2LeafState, convention: WConvention, lattice: &Lattice) -> Result<(f64, f64)> {
    let x = symplectic_flow(&two_form_n2(state, convention, lattice)?, state)?;
    let y = n2_flow_rhs(state, lattice)?;
    let agreement = x.iter().zip(&y).map(|(p, q)| rel(*p, *q)).fold(0.0, f64::max);
    Ok((agreement, (x[2] + x[3]).norm()))
}

/// Outcome of integrating the spin equations under both signs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationOutcome {
    pub selected: SignConvention,
    pub drift_printed: f64,
    pub drift_flipped: f64,
}

impl CalibrationOutcome {
    pub fn drift(&self, sign: SignConvention) -> f64 {
        match sign {
            SignConvention::Printed => self.drift_printed,
            SignConvention::Flipped => self.drift_flipped,
        }
    }
}

fn spectral_orders(n: usize) -> Vec<u32> {
    (1..=n.min(3) as u32).collect()
}

/// Isospectral drift of the spin flow under `sign`; a failed integration
/// counts as infinite drift.
pub fn spin_drift(initial: &SpinState, sign: SignConvention, t_end: f64, lattice: &Lattice) -> Result<f64> {
    let branch = BranchDatum::principal(PROBE_Z, initial.eta, lattice)?;
    let traj = match integrate(&SpinFlow { lattice, sign }, initial, (0.0, t_end), &precise_options(51)) {
        Ok(t) => t,
        Err(_) => return Ok(f64::INFINITY),
    };
    let report = isospectral_drift(&traj, PROBE_Z, &branch, &spectral_orders(initial.n()), lattice)?;
    Ok(if report.skipped.is_empty() { report.drift } else { f64::INFINITY })
}

/// Integrates the spin equations under both signs and selects the one whose
/// Lax spectrum is conserved.
pub fn calibrate_sign(initial: &SpinState, t_end: f64, lattice: &Lattice) -> Result<CalibrationOutcome> {
    let n = initial.n();
    let off_diagonal = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j);
    if off_diagonal.clone().all(|(i, j)| initial.f[(i, j)].norm() == 0.0) {
        return Err(Error::Calibration("diagonal F: both signs give Fdot = 0".into()));
    }
    let drift_printed = spin_drift(initial, SignConvention::Printed, t_end, lattice)?;
    let drift_flipped = spin_drift(initial, SignConvention::Flipped, t_end, lattice)?;
    let good = |d: f64| d < ISOSPECTRAL_TOLERANCE;
    let bad = |d: f64| d > BROKEN_THRESHOLD;
    let selected = match (good(drift_printed), good(drift_flipped)) {
        (true, false) if bad(drift_flipped) => SignConvention::Printed,
        (false, true) if bad(drift_printed) => SignConvention::Flipped,
        (true, true) => {
            return Err(Error::Calibration(format!(
                "degenerate state: both signs isospectral ({drift_printed:.2e}, {drift_flipped:.2e})"
            )))
        }
        _ => {
            return Err(Error::Calibration(format!(
                "no clean separation: printed drift {drift_printed:.2e}, flipped drift {drift_flipped:.2e}"
            )))
        }
    };
    Ok(CalibrationOutcome {
        selected,
        drift_printed,
        drift_flipped,
    })
}

/// [`calibrate_sign`] as a report.
pub fn sign_calibration(initial: &SpinState, t_end: f64, lattice: &Lattice) -> Result<(CalibrationOutcome, VerificationReport)> {
    let outcome = calibrate_sign(initial, t_end, lattice)?;
    let mut rep = ReportBuilder::new("sign-calibration");
    rep.check("selected-drift", outcome.drift(outcome.selected), ISOSPECTRAL_TOLERANCE)
        .check_exceeds("rejected-drift", outcome.drift(outcome.selected.other()), BROKEN_THRESHOLD)
        .note(format!(
            "N = {}: drift printed {:.3e}, flipped {:.3e}",
            initial.n(),
            outcome.drift_printed,
            outcome.drift_flipped
        ));
    let name = format!("{:?}", outcome.selected).to_lowercase();
    Ok((outcome, rep.finish(None, Some(name))))
}

/// Spinless limit at one state: `f3^2 = f1 f2` gives `z0 = eta`, `z0 = eta`
/// gives `f3^2 = f1 f2`, and the leaf form at `z0 = eta` against the
/// two-body spinless form.
pub fn spinless_limit_test(
    x1: Complex64,
    x2: Complex64,
    f1: Complex64,
    f2: Complex64,
    eta: Complex64,
    lattice: &Lattice,
) -> Result<VerificationReport> {
    let mut rep = ReportBuilder::new("spinless-limit");
    let data = N2Data {
        x1,
        x2,
        f1,
        f2,
        f3_sq: f1 * f2,
        eta,
    };
    let sol = solve_z0(&data, None, lattice)?;
    rep.check("z0-equals-eta", (sol.z0 - normalize_z0(eta, eta, lattice)).norm(), 1e-9);
    let leaf = data.leaf(eta);
    let f3_sq = f3_squared_from_z0(&leaf, lattice)?;
    rep.check("f3sq-equals-f1f2", rel(f3_sq, f1 * f2), 1e-9);

    let leaf_form = two_form_n2(&leaf, WConvention::OddCombination, lattice)?.matrix;
    let rs = RsState::new(vec![x1, x2], vec![f1, f2], eta)?;
    let spinless = spinless_form(&rs, PairPotentialSign::AsPrinted, lattice)?;
    rep.check("dx1-dx2-coefficients", rel(leaf_form[(0, 1)], spinless[(0, 1)]), 1e-12);
    let mut block_sum = 0.0f64;
    let mut block_diff = 0.0f64;
    for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
        block_sum = block_sum.max((leaf_form[(i, j)] + spinless[(i, j)]).norm());
        block_diff = block_diff.max((leaf_form[(i, j)] - spinless[(i, j)]).norm());
    }
    rep.check("dlnf-dx-blocks-opposite", block_sum, 1e-15);
    rep.check_exceeds("dlnf-dx-blocks-not-equal", block_diff, 1.0);
    rep.note("dx1^dx2 coefficients agree; the dln f ^ dx blocks carry opposite overall signs");
    Ok(rep.finish(None, Some(WConvention::OddCombination.name().into())))
}

/// The sign relation between the spinless form and the spin equations: the
/// pair-potential sign that reproduces the RS equations is the one that
/// goes with `sign`.
pub fn expected_potential_sign(sign: SignConvention) -> PairPotentialSign {
    match sign {
        SignConvention::Printed => PairPotentialSign::AsPrinted,
        SignConvention::Flipped => PairPotentialSign::Negated,
    }
}

/// Integrates the Hamiltonian flow of `H = sum f_i` for the spinless
/// N-body form under both pair-potential signs and compares each with the
/// RS equations of motion. The form's own time orientation is detected and
/// undone before integrating.
pub fn general_n_spinless_form_check(
    state: &RsState,
    t_end: f64,
    tol: f64,
    expected: PairPotentialSign,
    lattice: &Lattice,
) -> Result<VerificationReport> {
    let mut rep = ReportBuilder::new("form-general-n");
    state.validate(lattice)?;
    let opts = precise_options(61);
    let span = (0.0, t_end);
    let reference = integrate(&RsFlow { lattice }, state, span, &opts)?;

    let mut deviations = Vec::new();
    for sign in [PairPotentialSign::AsPrinted, PairPotentialSign::Negated] {
        let (orientation, mismatch) = spinless_form_orientation(state, sign, lattice)?;
        rep.check_max("orientation-mismatch", mismatch, 1e-12);
        let flow = SpinlessFormFlow {
            lattice,
            sign,
            orientation,
        };
        let dev = match integrate(&flow, state, span, &opts) {
            Ok(t) => t
                .states
                .iter()
                .zip(&reference.states)
                .map(|(p, q)| max_deviation(q, p))
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        let orientation = if orientation > 0.0 { "forward" } else { "reversed" };
        rep.note(format!("{sign:?}: deviation {dev:.3e}, form flow orientation {orientation}"));
        deviations.push((sign, dev));
    }
    let dev = |s: PairPotentialSign| deviations.iter().find(|(t, _)| *t == s).map(|(_, d)| *d).unwrap();
    let matching: Vec<_> = deviations.iter().filter(|(_, d)| *d < tol).map(|(s, _)| format!("{s:?}")).collect();
    rep.note(format!("N = {}: signs matching the RS equations: [{}]", state.n(), matching.join(", ")));
    rep.check("expected-sign-deviation", dev(expected), tol);
    if state.eta.norm() > 0.0 {
        rep.check_exceeds("other-sign-deviation", dev(expected.other()), tol);
    }
    Ok(rep.finish(None, Some(format!("{expected:?}").to_lowercase())))
}

/// Flow equivalence on the rational backend plus invariance of the N = 2
/// spin flow under `f12 -> f12 / lambda`, `f21 -> f21 lambda`.
pub fn rational_limit_check(initial: &N2LeafState, lambda: Complex64, sign: SignConvention) -> Result<VerificationReport> {
    let lattice = Lattice::rational();
    let mut rep = ReportBuilder::new("rational-limit");
    let flow = flow_equivalence_test(initial, 5.0, 1e-6, sign, WConvention::OddCombination, &lattice)?;
    rep.absorb(Some("flow"), &flow);

    let data = N2Data::from_leaf(initial, &lattice)?;
    let opts = precise_options(101);
    let field = SpinFlow { lattice: &lattice, sign };
    let unit = integrate(&field, &data.spin_state(real(1.0)), (0.0, 5.0), &opts)?;
    let scaled = integrate(&field, &data.spin_state(lambda), (0.0, 5.0), &opts)?;
    let mut traj = 0.0f64;
    let mut product = 0.0f64;
    for (p, q) in unit.states.iter().zip(&scaled.states) {
        traj = traj.max(array_deviation(&leaf_view(p), &leaf_view(q)));
        product = product.max(rel(q.f[(0, 1)] * q.f[(1, 0)], p.f[(0, 1)] * p.f[(1, 0)]));
    }
    rep.check("gauge-trajectory", traj, 1e-10);
    rep.check("gauge-f12f21", product, 1e-10);
    let (mut z0_gap, mut guess_p, mut guess_q) = (0.0f64, None, None);
    for (p, q) in unit.states.iter().zip(&scaled.states) {
        let zp = solve_z0(&N2Data::from_spin(p)?, guess_p, &lattice)?.z0;
        let zq = solve_z0(&N2Data::from_spin(q)?, guess_q, &lattice)?.z0;
        z0_gap = z0_gap.max((zp - zq).norm());
        (guess_p, guess_q) = (Some(zp), Some(zq));
    }
    rep.check("gauge-z0", z0_gap, 1e-10);

    let f3 = data.f3();
    let direct = SpinState::new(
        vec![data.x1, data.x2],
        nalgebra::DMatrix::from_row_slice(2, 2, &[data.f1, f3, f3, data.f2]),
        data.eta,
    )?;
    let again = integrate(&field, &direct, (0.0, 5.0), &opts)?;
    rep.check("unit-gauge-bitwise", if again == unit { 0.0 } else { f64::INFINITY }, 1.0);
    rep.note(format!("lambda = {lambda}"));
    Ok(rep.finish(None, Some(format!("{sign:?}").to_lowercase())))
}

/// Largest relative gap between elliptic and trigonometric sigma and zeta
/// on `grid`, for the lattice with half-periods `omega1` and `i * height`.
pub fn degeneration_error(omega1: f64, height: f64, grid: &[Complex64]) -> Result<f64> {
    let ell = Lattice::rectangular(omega1, height)?;
    let trig = Lattice::trigonometric(real(omega1))?;
    let mut worst = 0.0f64;
    for &z in grid {
        worst = worst.max(rel(ell.sigma(z)?, trig.sigma(z)?));
        worst = worst.max(rel(ell.zeta(z)?, trig.zeta(z)?));
    }
    Ok(worst)
}

/// Fixed grid for the degeneration check: a rectangle of points off the
/// real period lattice.
pub fn degeneration_grid() -> Vec<Complex64> {
    let re = [-3.7, -1.9, -0.6, 0.8, 2.2, 4.1];
    let im = [-0.9, -0.3, 0.4, 1.1];
    re.iter().flat_map(|&a| im.iter().map(move |&b| Complex64::new(a, b))).collect()
}

/// Convergence of the elliptic functions to the trigonometric ones as the
/// imaginary period grows: errors must decrease along `heights` and the
/// last must be below `tol`.
pub fn degeneration_check(omega1: f64, heights: &[f64], tol: f64) -> Result<VerificationReport> {
    let mut rep = ReportBuilder::new("degeneration");
    let grid = degeneration_grid();
    let errors = heights
        .iter()
        .map(|&t| degeneration_error(omega1, t, &grid))
        .collect::<Result<Vec<_>>>()?;
    let worst_ratio = errors.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    rep.check("monotone-decrease", worst_ratio, 1.0);
    rep.check("final-error", *errors.last().unwrap_or(&f64::NAN), tol);
    for (t, e) in heights.iter().zip(&errors) {
        rep.note(format!("omega1 = {omega1}, omega3 = {t}i: error {e:.3e}"));
    }
    Ok(rep.finish(None, None))
}

/// Closedness and pointwise flow checks at one leaf state.
pub fn leaf_form_checks(state: &N2LeafState, lattice: &Lattice) -> Result<VerificationReport> {
    let mut rep = ReportBuilder::new("leaf-form");
    let (agreement, energy) = pointwise_flow_residuals(state, WConvention::OddCombination, lattice)?;
    rep.check("symplectic-vs-leaf-pointwise", agreement, 1e-12)
        .check("dH-of-XH", energy, 1e-13)
        .check("closedness", closedness_residual(state, WConvention::OddCombination, lattice, 1e-5)?, 1e-8);
    let det = two_form_n2(state, WConvention::OddCombination, lattice)?.determinant();
    rep.check_exceeds("nondegeneracy", det.norm(), 1e-12);
    Ok(rep.finish(None, Some(WConvention::OddCombination.name().into())))
}
