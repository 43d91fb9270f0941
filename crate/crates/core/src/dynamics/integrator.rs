//! Dormand-Prince 5(4) with the standard fourth-order continuous extension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::flows::VectorField;
use super::state::PhaseState;
use super::trajectory::{IntegratorStats, Trajectory};
use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step control and sampling for [`integrate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Explicit snapshot times; overrides `sample_count` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_times: Option<Vec<f64>>,
    /// Number of uniform snapshots over the span, endpoints included.
    pub sample_count: usize,
    /// Stop when the field's pole distance drops below this.
    pub pole_guard: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            sample_times: None,
            sample_count: 201,
            pole_guard: 1e-6,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorOptions {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn samples(mut self, count: usize) -> Self {
        self.sample_count = count;
        self
    }

    pub fn at_times(mut self, times: Vec<f64>) -> Self {
        self.sample_times = Some(times);
        self
    }

    fn resolve_times(&self, t0: f64, t1: f64) -> Result<Vec<f64>> {
        let times = match &self.sample_times {
            Some(ts) => ts.clone(),
            None => {
                if self.sample_count < 2 {
                    return Err(Error::Config("sample_count must be at least 2".into()));
                }
                let m = (self.sample_count - 1) as f64;
                (0..self.sample_count)
                    .map(|k| if k + 1 == self.sample_count { t1 } else { t0 + (t1 - t0) * k as f64 / m })
                    .collect()
            }
        };
        if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("sample times must be strictly increasing".into()));
        }
        if times[0] < t0 || times[times.len() - 1] > t1 {
            return Err(Error::Config("sample times must lie inside the span".into()));
        }
        Ok(times)
    }
}

fn error_norm(err: &[Complex64], y: &[Complex64], y_new: &[Complex64], rtol: f64, atol: f64) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn axpy(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) -> Vec<Complex64> {
    let mut out = y.to_vec();
    for &(c, k) in terms {
        if c != 0.0 {
            let hc = h * c;
            for (o, ki) in out.iter_mut().zip(k) {
                *o += hc * ki;
            }
        }
    }
    out
}

struct Evaluator<'a, F: VectorField> {
    field: &'a F,
    template: &'a F::State,
    evals: usize,
}

impl<F: VectorField> Evaluator<'_, F> {
    fn eval(&mut self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.evals += 1;
        let d = self.field.derivative(&self.template.with_flat(y))?;
        if d.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("vector field"));
        }
        Ok(d)
    }
}

/// Integrates `field` from `initial` over `t_span` with adaptive steps,
/// returning snapshots at the requested sample times (dense output).
///
/// Fails with [`Error::PoleProximity`] if the trajectory comes within
/// `opts.pole_guard` of a singularity, and with [`Error::StepSizeUnderflow`]
/// if the step size collapses.
pub fn integrate<F: VectorField>(
    field: &F,
    initial: &F::State,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory<F::State>> {
    let (t0, t1) = t_span;
    let (rtol, atol) = (opts.rel_tol, opts.abs_tol);
    for tol in [rtol, atol] {
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::Config(format!("tolerance {tol} outside (0, 1e-2]")));
        }
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Config(format!("invalid time span [{t0}, {t1}]")));
    }
    let sample_times = opts.resolve_times(t0, t1)?;

    let guard = field.pole_distance(initial);
    if guard < opts.pole_guard {
        return Err(Error::PoleProximity { t: t0, distance: guard });
    }

    let mut ev = Evaluator {
        field,
        template: initial,
        evals: 0,
    };
    let mut y = initial.to_flat();
    let mut k1 = ev.eval(&y)?;

    let mut times = Vec::with_capacity(sample_times.len());
    let mut states = Vec::with_capacity(sample_times.len());
    let mut next = 0usize;
    while next < sample_times.len() && sample_times[next] <= t0 {
        times.push(sample_times[next]);
        states.push(initial.with_flat(&y));
        next += 1;
    }

    let mut h = initial_step(&mut ev, &y, &k1, t1 - t0, rtol, atol)?;
    let mut t = t0;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut last_rejected = false;

    while t < t1 {
        if steps + rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let final_step = t + h >= t1;
        if final_step {
            h = t1 - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }

        let stages = (|| -> Result<_> {
            let k2 = ev.eval(&axpy(&y, h, &[(A21, &k1)]))?;
            let k3 = ev.eval(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = ev.eval(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = ev.eval(&axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = ev.eval(&axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ))?;
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = ev.eval(&y_new)?;
            Ok((k2, k3, k4, k5, k6, k7, y_new))
        })();

        let (_k2, k3, k4, k5, k6, k7, y_new) = match stages {
            Ok(s) => s,
            Err(Error::Domain { .. }) | Err(Error::NonFinite(_)) => {
                // a stage landed on a singularity: retry with a shorter step
                rejected += 1;
                last_rejected = true;
                h *= 0.25;
                continue;
            }
            Err(e) => return Err(e),
        };

        let err_vec: Vec<Complex64> = (0..y.len())
            .map(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
            .collect();
        let err = error_norm(&err_vec, &y, &y_new, rtol, atol);

        if err <= 1.0 {
            let t_new = if final_step { t1 } else { t + h };
            // continuous extension
            while next < sample_times.len() && sample_times[next] <= t_new {
                let ts = sample_times[next];
                let ys = if ts == t_new {
                    y_new.clone()
                } else {
                    let theta = (ts - t) / h;
                    let theta1 = 1.0 - theta;
                    (0..y.len())
                        .map(|i| {
                            let r2 = y_new[i] - y[i];
                            let r3 = h * k1[i] - r2;
                            let r4 = r2 - h * k7[i] - r3;
                            let r5 = h
                                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                                    + D7 * k7[i]);
                            y[i] + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)))
                        })
                        .collect()
                };
                times.push(ts);
                states.push(initial.with_flat(&ys));
                next += 1;
            }

            t = t_new;
            y = y_new;
            k1 = k7;
            steps += 1;

            let guard = field.pole_distance(&initial.with_flat(&y));
            if guard < opts.pole_guard {
                return Err(Error::PoleProximity { t, distance: guard });
            }

            let mut factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if last_rejected {
                factor = factor.min(1.0);
            }
            h *= factor;
            last_rejected = false;
        } else {
            rejected += 1;
            last_rejected = true;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    }

    Ok(Trajectory {
        times,
        states,
        stats: IntegratorStats {
            steps,
            rejected_steps: rejected,
            rhs_evaluations: ev.evals,
            rel_tol: rtol,
            abs_tol: atol,
        },
    })
}

fn initial_step<F: VectorField>(
    ev: &mut Evaluator<'_, F>,
    y: &[Complex64],
    f0: &[Complex64],
    span: f64,
    rtol: f64,
    atol: f64,
) -> Result<f64> {
    let zeros = vec![Complex64::new(0.0, 0.0); y.len()];
    let d0 = error_norm(y, y, y, rtol, atol);
    let d1 = error_norm(f0, y, y, rtol, atol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let d2 = match ev.eval(&y1) {
        Ok(f1) => {
            let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
            error_norm(&diff, y, &zeros, rtol, atol) / h0
        }
        Err(_) => return Ok(h0 * 1e-3),
    };
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::flows::Reversed;

    /// y' = A y on a flat complex vector, for testing.
    #[derive(Clone, Debug, PartialEq)]
    struct Flat(Vec<Complex64>);
    impl PhaseState for Flat {
        fn to_flat(&self) -> Vec<Complex64> {
            self.0.clone()
        }
        fn with_flat(&self, y: &[Complex64]) -> Self {
            Flat(y.to_vec())
        }
        fn coordinate_names(&self) -> Vec<String> {
            (0..self.0.len()).map(|i| format!("y{i}")).collect()
        }
    }

    struct Constant(Vec<Complex64>);
    impl VectorField for Constant {
        type State = Flat;
        fn derivative(&self, _: &Flat) -> Result<Vec<Complex64>> {
            Ok(self.0.clone())
        }
    }

    struct Rotation(Complex64);
    impl VectorField for Rotation {
        type State = Flat;
        fn derivative(&self, s: &Flat) -> Result<Vec<Complex64>> {
            Ok(s.0.iter().map(|y| self.0 * y).collect())
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_field_is_constant() {
        let y0 = Flat(vec![c(1.5, -0.2), c(0.3, 0.0)]);
        let tr = integrate(&Constant(vec![c(0.0, 0.0); 2]), &y0, (0.0, 3.0), &IntegratorOptions::default()).unwrap();
        assert_eq!(tr.times.len(), 201);
        assert!(tr.states.iter().all(|s| *s == y0));
    }

    #[test]
    fn constant_field_is_linear() {
        let y0 = Flat(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        let v = vec![c(0.5, -1.0), c(-2.0, 0.25)];
        let opts = IntegratorOptions::with_tolerances(1e-10, 1e-12).samples(11);
        let tr = integrate(&Constant(v.clone()), &y0, (1.0, 4.0), &opts).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            for ((y, y0), v) in s.0.iter().zip(&y0.0).zip(&v) {
                assert!((y - (y0 + v * (t - 1.0))).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_is_accurate_at_sample_times() {
        let lam = c(-0.3, 2.0);
        let y0 = Flat(vec![c(1.0, 0.0)]);
        let opts = IntegratorOptions::with_tolerances(1e-11, 1e-13).at_times(vec![0.0, 0.37, 1.1, 2.0]);
        let tr = integrate(&Rotation(lam), &y0, (0.0, 2.0), &opts).unwrap();
        assert_eq!(tr.times, vec![0.0, 0.37, 1.1, 2.0]);
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s.0[0] - (lam * t).exp()).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let lam = c(0.1, 3.0);
        let y0 = Flat(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let end = |rtol: f64| {
            let o = IntegratorOptions::with_tolerances(rtol, rtol * 1e-2).samples(2);
            integrate(&Rotation(lam), &y0, (0.0, 5.0), &o).unwrap().states[1].0.clone()
        };
        let reference = end(1e-13);
        let err = |y: Vec<Complex64>| y.iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let (e8, e9) = (err(end(1e-8)), err(end(1e-9)));
        assert!(e9 < e8 / 3.0, "e8 = {e8:e}, e9 = {e9:e}");
    }

    #[test]
    fn forward_then_backward_returns() {
        let lam = c(0.05, 1.3);
        let y0 = Flat(vec![c(0.7, 0.1)]);
        let o = IntegratorOptions::with_tolerances(1e-11, 1e-13).samples(2);
        let fwd = integrate(&Rotation(lam), &y0, (0.0, 4.0), &o).unwrap();
        let back = integrate(&Reversed(Rotation(lam)), fwd.last(), (0.0, 4.0), &o).unwrap();
        assert!((back.last().0[0] - y0.0[0]).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_options() {
        let y0 = Flat(vec![c(1.0, 0.0)]);
        let f = Constant(vec![c(1.0, 0.0)]);
        assert!(integrate(&f, &y0, (0.0, 1.0), &IntegratorOptions::with_tolerances(0.1, 1e-6)).is_err());
        assert!(integrate(&f, &y0, (1.0, 0.0), &IntegratorOptions::default()).is_err());
        assert!(integrate(&f, &y0, (0.0, 1.0), &IntegratorOptions::default().samples(1)).is_err());
    }
}
