use crate::error::{Error, Result};
use crate::ode::{IntegratorConfig, State, Stepper, VectorField};

/// Initial separation and renormalisation length.
pub const LYAPUNOV_OFFSET: f64 = 1e-8;
const TRANSIENT_FRACTION: f64 = 0.1;

/// Reference and perturbed copies integrated as one system so both share the
/// same step sequence.
struct Paired<F> {
    inner: F,
}

impl<F: VectorField> VectorField for Paired<F> {
    fn dim(&self) -> usize {
        2 * self.inner.dim()
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let n = self.inner.dim();
        let (xa, xb) = x.split_at(n);
        let (da, db) = dx.split_at_mut(n);
        self.inner.eval(t, xa, da);
        self.inner.eval(t, xb, db);
    }
}

/// Largest Lyapunov exponent by the two-trajectory (Benettin) method.
///
/// The separation is renormalised to [`LYAPUNOV_OFFSET`] every
/// `renorm_interval`; the log stretch factors of the first 10% of intervals
/// are discarded and the rest averaged per unit time. `cfg.t_final` is
/// ignored in favour of `horizon`.
pub fn largest_lyapunov<F: VectorField + ?Sized>(
    field: &F,
    x0: &State,
    cfg: &IntegratorConfig,
    horizon: f64,
    renorm_interval: f64,
) -> Result<f64> {
    if !(renorm_interval > 0.0) || !(horizon >= 2.0 * renorm_interval) || !horizon.is_finite() {
        return Err(Error::domain(format!(
            "need horizon >= 2 * renorm_interval > 0, got horizon {horizon}, interval {renorm_interval}"
        )));
    }
    let n = field.dim();
    if x0.dim() != n {
        return Err(Error::domain("initial state dimension mismatch"));
    }
    let intervals = (horizon / renorm_interval).round() as usize;
    let skip = (intervals as f64 * TRANSIENT_FRACTION).floor() as usize;

    let offset = LYAPUNOV_OFFSET / (n as f64).sqrt();
    let mut joint = x0.x.clone();
    joint.extend(x0.x.iter().map(|v| v + offset));
    let mut stepper = Stepper::new(Paired { inner: field }, State::new(x0.t, joint), cfg)?;

    let mut sum = 0.0;
    for k in 1..=intervals {
        let target = x0.t + k as f64 * renorm_interval;
        while stepper.state().t < target {
            stepper.step(target)?;
        }
        let x = &stepper.state().x;
        let (xa, xb) = x.split_at(n);
        let dist = xa
            .iter()
            .zip(xb)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();
        if !(dist > 0.0) || !dist.is_finite() {
            return Err(Error::NumericalBlowup {
                t: stepper.state().t,
                stage: 0,
            });
        }
        if k > skip {
            sum += (dist / LYAPUNOV_OFFSET).ln();
        }
        let scale = LYAPUNOV_OFFSET / dist;
        let renormed: Vec<f64> = xa
            .iter()
            .chain(xa.iter().zip(xb).map(|(a, b)| a + (b - a) * scale).collect::<Vec<_>>().iter())
            .copied()
            .collect();
        stepper.reset_state(renormed)?;
    }
    Ok(sum / ((intervals - skip) as f64 * renorm_interval))
}
