use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checks::{
    calibrate_sign, degeneration_check, expected_potential_sign, flow_equivalence_test, general_n_spinless_form_check,
    leaf_form_checks, precise_options, rational_limit_check, sign_calibration, spin_drift, spinless_limit_test, z0_drift,
    ISOSPECTRAL_TOLERANCE,
};
use super::form::{identity8_residual, WConvention};
use super::report::{ReportBuilder, VerificationReport};
use crate::dynamics::{integrate, RsState, SignConvention, SpinFlow, SpinState};
use crate::elliptic::{sigma_three_term_residual, zeta_sigma_residual, BranchDatum, Lattice};
use crate::error::{Error, Result};
use crate::lax::{
    det_condition_n2, f3_squared_from_z0, lax_gauged_n2, lax_spin, solve_z0, N2Data, PrefactorPolicy,
};

pub const DEFAULT_SEED: u64 = 20240617;

/// Coupling used by all randomly generated states; below the smallest
/// generated separation so `x_i - x_j + eta` stays off the lattice.
pub const SUITE_ETA: Complex64 = Complex64::new(0.15, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EllipticIdentities,
    FunctionTheory,
    #[serde(rename = "identity-8")]
    Identity8,
    Z0Chart,
    Isospectral,
    FlowEquivalence,
    SpinlessLimit,
    FormGeneralN,
    RationalLimit,
    SignCalibration,
    Degeneration,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::EllipticIdentities,
        Suite::FunctionTheory,
        Suite::Identity8,
        Suite::Z0Chart,
        Suite::Isospectral,
        Suite::FlowEquivalence,
        Suite::SpinlessLimit,
        Suite::FormGeneralN,
        Suite::RationalLimit,
        Suite::SignCalibration,
        Suite::Degeneration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EllipticIdentities => "elliptic-identities",
            Suite::FunctionTheory => "function-theory",
            Suite::Identity8 => "identity-8",
            Suite::Z0Chart => "z0-chart",
            Suite::Isospectral => "isospectral",
            Suite::FlowEquivalence => "flow-equivalence",
            Suite::SpinlessLimit => "spinless-limit",
            Suite::FormGeneralN => "form-general-n",
            Suite::RationalLimit => "rational-limit",
            Suite::SignCalibration => "sign-calibration",
            Suite::Degeneration => "degeneration",
        }
    }

    /// Parses a comma-separated list; `all` selects every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Suite::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn salt(self) -> u64 {
        // distinct odd multipliers keep the per-suite streams apart
        (self as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    pub fn rng(self, seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed ^ self.salt())
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Which sign the spin equations use in the suites that need one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignChoice {
    /// Run the calibration first and use its selection.
    #[default]
    Auto,
    Printed,
    Flipped,
}

impl SignChoice {
    pub fn fixed(self) -> Option<SignConvention> {
        match self {
            SignChoice::Auto => None,
            SignChoice::Printed => Some(SignConvention::Printed),
            SignChoice::Flipped => Some(SignConvention::Flipped),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: Option<u64>,
    #[serde(default)]
    pub sign: SignChoice,
    #[serde(default)]
    pub w_convention: WConvention,
    /// Per-check tolerance replacements, keyed by check name.
    #[serde(default)]
    pub tolerance_overrides: BTreeMap<String, f64>,
}

/// Backends exercised by the function-level suites.
pub fn test_backends() -> Vec<(&'static str, Lattice)> {
    vec![
        ("square", Lattice::rectangular(1.0, 1.0).expect("valid lattice")),
        (
            "skew",
            Lattice::elliptic(Complex64::new(1.0, 0.0), Complex64::new(0.3, 1.1)).expect("valid lattice"),
        ),
        ("trigonometric", Lattice::trigonometric(Complex64::new(1.0, 0.0)).expect("valid lattice")),
        ("rational", Lattice::rational()),
    ]
}

/// Backends for the N = 2 state suites: the rectangular lattice and its
/// two degenerations.
pub fn state_backends() -> Vec<(&'static str, Lattice)> {
    test_backends().into_iter().filter(|(name, _)| *name != "skew").collect()
}

/// Uniform point in the centred fundamental cell (or a box for the
/// degenerate backends).
pub fn random_cell_point<R: Rng>(rng: &mut R, lattice: &Lattice) -> Complex64 {
    let (a, b): (f64, f64) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    match lattice.mode() {
        crate::elliptic::LatticeMode::Elliptic => 2.0 * a * lattice.omega1() + 2.0 * b * lattice.omega3(),
        crate::elliptic::LatticeMode::Trigonometric => 2.0 * a * lattice.omega1() + Complex64::new(0.0, 2.0 * b),
        crate::elliptic::LatticeMode::Rational => Complex64::new(2.0 * a, 2.0 * b),
    }
}

/// Random N = 2 data: `x2` in [0.1, 0.5], `x1 - x2` in [0.2, 0.8],
/// `f1, f2` in [0.5, 2], `f3^2 / (f1 f2)` in [0.1, 0.9], `eta = 0.15`.
pub fn random_n2_data<R: Rng>(rng: &mut R) -> N2Data {
    let x2 = rng.random_range(0.1..0.5);
    let delta = rng.random_range(0.2..0.8);
    let f1 = rng.random_range(0.5..2.0);
    let f2 = rng.random_range(0.5..2.0);
    let ratio = rng.random_range(0.1..0.9);
    N2Data {
        x1: Complex64::new(x2 + delta, 0.0),
        x2: Complex64::new(x2, 0.0),
        f1: Complex64::new(f1, 0.0),
        f2: Complex64::new(f2, 0.0),
        f3_sq: Complex64::new(ratio * f1 * f2, 0.0),
        eta: SUITE_ETA,
    }
}

/// Random positions with consecutive gaps in [0.2, 0.5] and small
/// imaginary parts, which keep real trajectories away from the real-axis
/// poles of the pair potential.
pub fn random_positions<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let mut x = Vec::with_capacity(n);
    let mut re = rng.random_range(0.1..0.3);
    for i in 0..n {
        let im = if i == 0 { 0.0 } else { rng.random_range(0.02..0.08) };
        x.push(Complex64::new(re, im));
        re += rng.random_range(0.2..0.5);
    }
    x.reverse();
    x
}

/// Random spin state with diagonal entries in [0.5, 2] and off-diagonal
/// entries in [0.2, 0.8].
pub fn random_spin_state<R: Rng>(rng: &mut R, n: usize) -> SpinState {
    let x = random_positions(rng, n);
    let f = DMatrix::from_fn(n, n, |i, j| {
        let v = if i == j { rng.random_range(0.5..2.0) } else { rng.random_range(0.2..0.8) };
        Complex64::new(v, 0.0)
    });
    SpinState::new(x, f, SUITE_ETA).expect("generated state is valid")
}

pub fn random_rs_state<R: Rng>(rng: &mut R, n: usize) -> RsState {
    let x = random_positions(rng, n);
    let f = (0..n).map(|_| Complex64::new(rng.random_range(0.5..2.0), 0.0)).collect();
    RsState::new(x, f, SUITE_ETA).expect("generated state is valid")
}

/// A leaf state built from random spin data with complex positions.
pub fn random_leaf_state<R: Rng>(rng: &mut R, lattice: &Lattice) -> Result<crate::dynamics::N2LeafState> {
    let mut data = random_n2_data(rng);
    data.x1 += Complex64::new(0.0, rng.random_range(0.02..0.08));
    let z0 = solve_z0(&data, None, lattice)?.z0;
    Ok(data.leaf(z0))
}

struct Ctx<'a> {
    seed: u64,
    sign: SignConvention,
    convention: WConvention,
    overrides: &'a BTreeMap<String, f64>,
}

impl Ctx<'_> {
    fn builder(&self, suite: Suite) -> ReportBuilder {
        ReportBuilder::new(suite.name()).with_overrides(self.overrides)
    }
}

fn suite_elliptic_identities(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::EllipticIdentities;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    for (name, lattice) in test_backends() {
        let (mut three, mut zs) = (0.0f64, 0.0f64);
        let mut taken = 0;
        while taken < 1000 {
            let p: Vec<Complex64> = (0..4).map(|_| random_cell_point(&mut rng, &lattice)).collect();
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let args = [a + c, a - c, b + d, b - d, a + d, a - d, b + c, b - c, a + b, a - b, c + d, c - d, a, b, c, a + b + c];
            if args.iter().any(|&z| lattice.distance_to_lattice(z) < 1e-3) {
                continue;
            }
            taken += 1;
            three = three.max(sigma_three_term_residual(a, b, c, d, &lattice)?.relative());
            zs = zs.max(zeta_sigma_residual(a, b, c, &lattice)?.relative());
        }
        rep.check(format!("{name}/sigma-three-term"), three, 1e-10)
            .check(format!("{name}/zeta-sigma"), zs, 1e-10);
    }
    rep.note("1000 samples per backend");
    Ok(rep.finish(Some(ctx.seed), None))
}

fn suite_function_theory(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::FunctionTheory;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    let h = 1e-5;
    for (name, l) in test_backends() {
        let (mut parity, mut dlog, mut dzeta, mut quasi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut taken = 0;
        while taken < 100 {
            let z = random_cell_point(&mut rng, &l);
            if l.distance_to_lattice(z) < 0.2 {
                continue;
            }
            taken += 1;
            let (s, zt, p) = (l.sigma(z)?, l.zeta(z)?, l.wp(z)?);
            parity = parity
                .max((l.sigma(-z)? + s).norm() / s.norm())
                .max((l.zeta(-z)? + zt).norm() / zt.norm())
                .max((l.wp(-z)? - p).norm() / p.norm());
            let log_derivative = (l.sigma(z + h)? / l.sigma(z - h)?).ln() / (2.0 * h);
            dlog = dlog.max((log_derivative - zt).norm() / zt.norm().max(1.0));
            let zeta_derivative = (l.zeta(z + h)? - l.zeta(z - h)?) / (2.0 * h);
            dzeta = dzeta.max((zeta_derivative + p).norm() / p.norm().max(1.0));
            if let Some(eta3) = l.eta3() {
                let (w1, w3) = (l.omega1(), l.omega3());
                for (w, e) in [(w1, l.eta1()), (w3, eta3)] {
                    let shifted = l.sigma(z + 2.0 * w)?;
                    let expected = -s * (2.0 * e * (z + w)).exp();
                    quasi = quasi.max((shifted - expected).norm() / expected.norm());
                }
            }
        }
        rep.check(format!("{name}/parity"), parity, 1e-12)
            .check(format!("{name}/log-sigma-derivative"), dlog, 1e-8)
            .check(format!("{name}/zeta-derivative"), dzeta, 1e-8);
        if let Some(legendre) = l.legendre_residual() {
            rep.check(format!("{name}/quasi-periodicity"), quasi, 1e-10)
                .check(format!("{name}/legendre"), legendre, 1e-12);
        }
    }
    Ok(rep.finish(Some(ctx.seed), None))
}

fn suite_identity8(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::Identity8;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    for (name, lattice) in state_backends() {
        let (mut worst, mut solver) = (0.0f64, 0.0f64);
        for _ in 0..500 {
            let data = random_n2_data(&mut rng);
            let sol = solve_z0(&data, None, &lattice)?;
            solver = solver.max(sol.residual);
            worst = worst.max(identity8_residual(&data, sol.z0, &lattice)?);
        }
        rep.check(format!("{name}/identity-8"), worst, 1e-9)
            .check(format!("{name}/det-residual"), solver, 1e-10);
    }
    rep.note("500 random states per backend, z0 from the solver");
    Ok(rep.finish(Some(ctx.seed), None))
}

fn suite_z0_chart(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::Z0Chart;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    for (name, lattice) in state_backends() {
        let (mut spinless, mut round_trip, mut pairing) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..50 {
            let mut data = random_n2_data(&mut rng);
            let sol = solve_z0(&data, None, &lattice)?;
            let back = f3_squared_from_z0(&data.leaf(sol.z0), &lattice)?;
            round_trip = round_trip.max((back - data.f3_sq).norm());
            pairing = pairing.max(det_condition_n2(&data, sol.paired_root, &lattice)?.norm());
            data.f3_sq = data.f1 * data.f2;
            spinless = spinless.max((solve_z0(&data, None, &lattice)?.z0 - data.eta).norm());
        }
        rep.check(format!("{name}/spinless-z0-eta"), spinless, 1e-9)
            .check(format!("{name}/round-trip"), round_trip, 1e-9)
            .check(format!("{name}/paired-root"), pairing, 1e-9);
    }
    let rational = Lattice::rational();
    let mut closed = 0.0f64;
    for _ in 0..50 {
        let data = random_n2_data(&mut rng);
        let d = data.delta();
        let eta = data.eta;
        let big_d = eta * eta - d * d;
        let z0_sq = -data.f3_sq * d * d * eta * eta / (data.f1 * data.f2 * big_d - data.f3_sq * eta * eta);
        let z0 = solve_z0(&data, None, &rational)?.z0;
        closed = closed.max((z0 * z0 - z0_sq).norm());
    }
    rep.check("rational/closed-form", closed, 1e-10);
    Ok(rep.finish(Some(ctx.seed), None))
}

fn suite_isospectral(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::Isospectral;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    let lattice = Lattice::rectangular(1.0, 1.0)?;
    for n in [2, 3] {
        let state = random_spin_state(&mut rng, n);
        rep.check(format!("drift-n{n}"), spin_drift(&state, ctx.sign, 5.0, &lattice)?, ISOSPECTRAL_TOLERANCE);
        if n == 2 {
            let traj = integrate(&SpinFlow { lattice: &lattice, sign: ctx.sign }, &state, (0.0, 5.0), &precise_options(51))?;
            rep.check("z0-drift-n2", z0_drift(&traj, &lattice)?, 1e-8);
        }
    }

    let (mut spectrum, mut det) = (0.0f64, 0.0f64);
    let state = random_spin_state(&mut rng, 2);
    let data = N2Data::from_spin(&state)?;
    let mut taken = 0;
    while taken < 20 {
        let z = random_cell_point(&mut rng, &lattice);
        let near = [z, z + data.eta, z - data.eta, z + data.x1 + data.eta, z + data.x2 + data.eta];
        if near.iter().any(|&w| lattice.distance_to_lattice(w) < 0.05) {
            continue;
        }
        taken += 1;
        let branch = BranchDatum::principal(z, data.eta, &lattice)?;
        let a = lax_spin(&state, z, &branch, &lattice)?.matrix;
        let g = lax_gauged_n2(&data, z, &branch, PrefactorPolicy::WithSqrtPrefactor, &lattice)?.matrix;
        let (ta, tg) = (a.trace(), g.trace());
        let (da, dg) = (a.determinant(), g.determinant());
        spectrum = spectrum
            .max((ta - tg).norm() / ta.norm().max(1.0))
            .max((da - dg).norm() / da.norm().max(1.0));
        let stripped = lax_gauged_n2(&data, z, &branch, PrefactorPolicy::Stripped, &lattice)?.matrix;
        let cond = det_condition_n2(&data, z, &lattice)?;
        det = det.max((stripped.determinant() - cond).norm() / cond.norm());
    }
    rep.check("gauge-spectrum", spectrum, 1e-10)
        .check("det-factorization", det, 1e-12);
    Ok(rep.finish(Some(ctx.seed), Some(format!("{:?}", ctx.sign).to_lowercase())))
}

fn suite_flow_equivalence(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::FlowEquivalence;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    let lattice = Lattice::rectangular(1.0, 1.0)?;
    for _ in 0..100 {
        let state = random_leaf_state(&mut rng, &lattice)?;
        rep.absorb(Some("pointwise"), &leaf_form_checks(&state, &lattice)?);
    }
    for _ in 0..3 {
        let state = random_leaf_state(&mut rng, &lattice)?;
        let r = flow_equivalence_test(&state, 5.0, 1e-6, ctx.sign, ctx.convention, &lattice)?;
        rep.absorb(None, &r);
    }
    let mut data = random_n2_data(&mut rng);
    data.x1 += Complex64::new(0.0, 0.05);
    let spinless = data.leaf(data.eta);
    rep.absorb(
        Some("spinless"),
        &flow_equivalence_test(&spinless, 5.0, 1e-6, ctx.sign, ctx.convention, &lattice)?,
    );
    rep.note("100 pointwise states; 3 generic and 1 spinless trajectory over t in [0, 5]");
    Ok(rep.finish(Some(ctx.seed), Some(ctx.convention.name().into())))
}

fn suite_spinless_limit(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::SpinlessLimit;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    for (name, lattice) in state_backends() {
        for _ in 0..50 {
            let d = random_n2_data(&mut rng);
            rep.absorb(Some(name), &spinless_limit_test(d.x1, d.x2, d.f1, d.f2, d.eta, &lattice)?);
        }
    }
    rep.note("dx1^dx2 coefficients agree; the dln f ^ dx blocks carry opposite overall signs");
    Ok(rep.finish(Some(ctx.seed), Some(WConvention::OddCombination.name().into())))
}

fn suite_form_general_n(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::FormGeneralN;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    let expected = expected_potential_sign(ctx.sign);
    let runs = [(2, Lattice::rational(), 3.0, 1e-8, "n2-rational"), (3, Lattice::rectangular(1.0, 1.0)?, 2.0, 1e-6, "n3-elliptic")];
    for (n, lattice, t_end, tol, name) in runs {
        let state = random_rs_state(&mut rng, n);
        let r = general_n_spinless_form_check(&state, t_end, tol, expected, &lattice)?;
        for note in &r.notes {
            rep.note(format!("{name}: {note}"));
        }
        rep.absorb(Some(name), &r);
    }
    Ok(rep.finish(Some(ctx.seed), Some(format!("{expected:?}").to_lowercase())))
}

fn suite_rational_limit(ctx: &Ctx) -> Result<VerificationReport> {
    let suite = Suite::RationalLimit;
    let mut rng = suite.rng(ctx.seed);
    let mut rep = ctx.builder(suite);
    let rational = Lattice::rational();
    let generic = random_leaf_state(&mut rng, &rational)?;
    rep.absorb(None, &rational_limit_check(&generic, Complex64::new(2.5, 0.0), ctx.sign)?);
    let mut data = random_n2_data(&mut rng);
    data.x1 += Complex64::new(0.0, 0.05);
    let spinless = data.leaf(data.eta);
    let flow = flow_equivalence_test(&spinless, 5.0, 1e-9, ctx.sign, WConvention::OddCombination, &rational)?;
    if let Some(c) = flow.check("leaf-vs-spinless-rs") {
        rep.check("spinless-vs-rs", c.residual, c.tolerance);
    }
    rep.note("lambda = 2.5 for the gauge rescaling");
    Ok(rep.finish(Some(ctx.seed), Some(format!("{:?}", ctx.sign).to_lowercase())))
}

fn suite_sign_calibration(seed: u64, overrides: &BTreeMap<String, f64>) -> Result<(SignConvention, VerificationReport)> {
    let suite = Suite::SignCalibration;
    let mut rng = suite.rng(seed);
    let mut rep = ReportBuilder::new(suite.name()).with_overrides(overrides);
    let elliptic = Lattice::rectangular(1.0, 1.0)?;
    let mut selections = Vec::new();
    for n in [2, 3] {
        let state = random_spin_state(&mut rng, n);
        let (outcome, r) = sign_calibration(&state, 5.0, &elliptic)?;
        rep.absorb(Some(&format!("elliptic-n{n}")), &r);
        for note in &r.notes {
            rep.note(format!("elliptic: {note}"));
        }
        selections.push(outcome.selected);
        if n == 2 {
            let (outcome, r) = sign_calibration(&state, 5.0, &Lattice::rational())?;
            rep.absorb(Some("rational-n2"), &r);
            for note in &r.notes {
                rep.note(format!("rational: {note}"));
            }
            selections.push(outcome.selected);
        }
    }
    let selected = selections[0];
    let disagreements = selections.iter().filter(|s| **s != selected).count();
    rep.check("backend-agreement", disagreements as f64, 0.5);
    rep.note(format!("selected convention: {}", format!("{selected:?}").to_lowercase()));
    Ok((selected, rep.finish(Some(seed), Some(format!("{selected:?}").to_lowercase()))))
}

fn suite_degeneration(ctx: &Ctx) -> Result<VerificationReport> {
    let r = degeneration_check(5.0, &[5.0, 10.0, 20.0], 1e-8)?;
    let mut rep = ctx.builder(Suite::Degeneration);
    rep.absorb(None, &r);
    for n in &r.notes {
        rep.note(n.clone());
    }
    Ok(rep.finish(Some(ctx.seed), None))
}

/// Resolves the spin-equation sign: either fixed, or by running the
/// calibration suite (whose report is returned for reuse).
pub fn resolve_sign(choice: SignChoice, seed: u64) -> Result<(SignConvention, Option<VerificationReport>)> {
    match choice.fixed() {
        Some(s) => Ok((s, None)),
        None => {
            let (s, r) = suite_sign_calibration(seed, &BTreeMap::new())?;
            Ok((s, Some(r)))
        }
    }
}

/// Quick calibration on a single N = 2 state, used where a full suite run
/// is not wanted.
pub fn calibrated_sign(seed: u64) -> Result<SignConvention> {
    let mut rng = Suite::SignCalibration.rng(seed);
    let state = random_spin_state(&mut rng, 2);
    Ok(calibrate_sign(&state, 5.0, &Lattice::rectangular(1.0, 1.0)?)?.selected)
}

/// Runs the given suites (in parallel) and returns their reports sorted by
/// suite name. A suite that errors out yields a failing report carrying the
/// error message.
pub fn run_suites(suites: &[Suite], opts: &VerifyOptions) -> Result<Vec<VerificationReport>> {
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let overrides = &opts.tolerance_overrides;
    let mut reports = Vec::new();

    let (sign, calibration) = match opts.sign.fixed() {
        Some(s) => (s, None),
        None => match suite_sign_calibration(seed, overrides) {
            Ok((s, r)) => (s, Some(r)),
            Err(e) => return Err(Error::Calibration(format!("automatic sign selection failed: {e}"))),
        },
    };
    if suites.contains(&Suite::SignCalibration) {
        match calibration {
            Some(r) => reports.push(r),
            None => reports.push(errored(Suite::SignCalibration, seed, suite_sign_calibration(seed, overrides).map(|x| x.1))),
        }
    }

    let ctx = Ctx {
        seed,
        sign,
        convention: opts.w_convention,
        overrides,
    };
    let rest: Vec<Suite> = suites.iter().copied().filter(|s| *s != Suite::SignCalibration).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = rest
            .iter()
            .map(|&suite| {
                let ctx = &ctx;
                scope.spawn(move || errored(suite, seed, run_one(suite, ctx)))
            })
            .collect();
        for h in handles {
            reports.push(h.join().expect("suite thread panicked"));
        }
    });
    reports.sort_by(|a, b| a.suite.cmp(&b.suite));
    Ok(reports)
}

fn run_one(suite: Suite, ctx: &Ctx) -> Result<VerificationReport> {
    match suite {
        Suite::EllipticIdentities => suite_elliptic_identities(ctx),
        Suite::FunctionTheory => suite_function_theory(ctx),
        Suite::Identity8 => suite_identity8(ctx),
        Suite::Z0Chart => suite_z0_chart(ctx),
        Suite::Isospectral => suite_isospectral(ctx),
        Suite::FlowEquivalence => suite_flow_equivalence(ctx),
        Suite::SpinlessLimit => suite_spinless_limit(ctx),
        Suite::FormGeneralN => suite_form_general_n(ctx),
        Suite::RationalLimit => suite_rational_limit(ctx),
        Suite::SignCalibration => suite_sign_calibration(ctx.seed, ctx.overrides).map(|x| x.1),
        Suite::Degeneration => suite_degeneration(ctx),
    }
}

fn errored(suite: Suite, seed: u64, result: Result<VerificationReport>) -> VerificationReport {
    result.unwrap_or_else(|e| {
        let mut rep = ReportBuilder::new(suite.name());
        rep.check("completed", f64::INFINITY, 1.0).note(format!("error: {e}"));
        rep.finish(Some(seed), None)
    })
}

/// Runs a single suite with the given options.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerificationReport> {
    Ok(run_suites(&[suite], opts)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(Suite::parse_list("degeneration,identity-8").unwrap(), vec![Suite::Identity8, Suite::Degeneration]);
        assert_eq!(Suite::parse_list("all").unwrap().len(), 11);
    }

    #[test]
    fn generators_are_seeded() {
        let a = random_n2_data(&mut Suite::Identity8.rng(1));
        let b = random_n2_data(&mut Suite::Identity8.rng(1));
        let c = random_n2_data(&mut Suite::Z0Chart.rng(1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
