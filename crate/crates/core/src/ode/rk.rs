use super::{State, StepRecord, VectorField};
use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// B5 minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) fn eval_checked<F: VectorField + ?Sized>(
    field: &F,
    t: f64,
    x: &[f64],
    stage: usize,
) -> Result<Vec<f64>> {
    let mut dx = vec![0.0; x.len()];
    field.eval(t, x, &mut dx);
    if x.iter().chain(dx.iter()).all(|v| v.is_finite()) {
        Ok(dx)
    } else {
        Err(Error::NumericalBlowup { t, stage })
    }
}

fn check_step(s: &State, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain(format!("step size must be positive, got {h}")));
    }
    if !s.is_finite() {
        return Err(Error::NumericalBlowup { t: s.t, stage: 0 });
    }
    Ok(())
}

/// One classical RK4 step.
pub fn rk4_step<F: VectorField + ?Sized>(field: &F, s: &State, h: f64) -> Result<State> {
    check_step(s, h)?;
    let k1 = eval_checked(field, s.t, &s.x, 1)?;
    Ok(rk4_from(field, s, h, k1)?.0)
}

/// RK4 with a precomputed first stage; returns the end state and the four
/// stage slopes.
pub(crate) fn rk4_from<F: VectorField + ?Sized>(
    field: &F,
    s: &State,
    h: f64,
    k1: Vec<f64>,
) -> Result<(State, Vec<Vec<f64>>)> {
    let n = s.x.len();
    let axpy = |k: &[f64], a: f64| -> Vec<f64> { (0..n).map(|i| s.x[i] + a * k[i]).collect() };
    let k2 = eval_checked(field, s.t + 0.5 * h, &axpy(&k1, 0.5 * h), 2)?;
    let k3 = eval_checked(field, s.t + 0.5 * h, &axpy(&k2, 0.5 * h), 3)?;
    let k4 = eval_checked(field, s.t + h, &axpy(&k3, h), 4)?;
    let x: Vec<f64> = (0..n)
        .map(|i| s.x[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0)
        .collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalBlowup { t: s.t + h, stage: 4 });
    }
    Ok((State::new(s.t + h, x), vec![k1, k2, k3, k4]))
}

/// One Dormand-Prince 5(4) step with the scaled max-norm error estimate.
///
/// The returned record is marked accepted when the estimate is at most 1.
pub fn rk45_step<F: VectorField + ?Sized>(
    field: &F,
    s: &State,
    h: f64,
    rtol: f64,
    atol: f64,
) -> Result<StepRecord> {
    check_step(s, h)?;
    let k1 = eval_checked(field, s.t, &s.x, 1)?;
    dopri_from(field, s, h, k1, rtol, atol)
}

/// Dormand-Prince step given the slope at the start (FSAL reuse).
/// Consumes six further right-hand-side evaluations.
pub(crate) fn dopri_from<F: VectorField + ?Sized>(
    field: &F,
    s: &State,
    h: f64,
    k1: Vec<f64>,
    rtol: f64,
    atol: f64,
) -> Result<StepRecord> {
    let n = s.x.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(k1);
    let mut xs = vec![0.0; n];
    for stage in 1..7 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += A[stage][j] * kj[i];
            }
            xs[i] = s.x[i] + h * acc;
        }
        k.push(eval_checked(field, s.t + C[stage] * h, &xs, stage + 1)?);
    }
    // The seventh stage point is the fifth-order solution (B5 == A[6]).
    let x_end = xs;

    let mut err = 0.0f64;
    for i in 0..n {
        // E sums to zero, so measuring slopes relative to k1 is exact for
        // constant fields.
        let delta = h * (1..7).map(|j| E[j] * (k[j][i] - k[0][i])).sum::<f64>();
        let scale = atol + rtol * s.x[i].abs().max(x_end[i].abs());
        err = err.max(delta.abs() / scale);
    }
    if !err.is_finite() {
        return Err(Error::NumericalBlowup { t: s.t + h, stage: 7 });
    }

    Ok(StepRecord {
        start: s.clone(),
        end: State::new(s.t + h, x_end),
        h,
        error_estimate: err,
        accepted: err <= 1.0,
        stage_slopes: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::FnField;

    fn decay() -> FnField<impl Fn(f64, &[f64], &mut [f64])> {
        FnField::new(1, |_t, x: &[f64], dx: &mut [f64]| dx[0] = -x[0])
    }

    #[test]
    fn rk4_zero_field_is_identity() {
        let f = FnField::new(1, |_t, _x: &[f64], dx: &mut [f64]| dx[0] = 0.0);
        let out = rk4_step(&f, &State::new(0.0, vec![5.0]), 0.1).unwrap();
        assert_eq!(out.t, 0.1);
        assert_eq!(out.x, vec![5.0]);
    }

    #[test]
    fn rk4_unit_field_is_exact() {
        let f = FnField::new(1, |_t, _x: &[f64], dx: &mut [f64]| dx[0] = 1.0);
        let out = rk4_step(&f, &State::new(0.0, vec![0.0]), 0.25).unwrap();
        assert_eq!(out, State::new(0.25, vec![0.25]));
    }

    #[test]
    fn rk4_decay_matches_quartic_taylor() {
        // 1 - h + h^2/2 - h^3/6 + h^4/24 at h = 0.1
        let h: f64 = 0.1;
        let taylor = 1.0 - h + h * h / 2.0 - h.powi(3) / 6.0 + h.powi(4) / 24.0;
        let out = rk4_step(&decay(), &State::new(0.0, vec![1.0]), h).unwrap();
        assert!((out.x[0] - taylor).abs() < 1e-15);
        assert!((out.x[0] - 0.904_837_50).abs() < 1e-9);
    }

    #[test]
    fn rk4_reports_blowup_stage() {
        let f = FnField::new(1, |t, _x: &[f64], dx: &mut [f64]| {
            dx[0] = if t > 0.0 { f64::NAN } else { 1.0 }
        });
        match rk4_step(&f, &State::new(0.0, vec![0.0]), 0.1) {
            Err(Error::NumericalBlowup { stage, t }) => {
                assert_eq!(stage, 2);
                assert!((t - 0.05).abs() < 1e-15);
            }
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn rk4_rejects_non_positive_step() {
        assert!(rk4_step(&decay(), &State::new(0.0, vec![1.0]), 0.0).is_err());
        assert!(rk4_step(&decay(), &State::new(0.0, vec![1.0]), -0.1).is_err());
    }

    #[test]
    fn rk45_constant_field_has_zero_error() {
        let f = FnField::new(2, |_t, _x: &[f64], dx: &mut [f64]| {
            dx[0] = 3.0;
            dx[1] = -0.5;
        });
        let rec = rk45_step(&f, &State::new(0.0, vec![1.0, 2.0]), 0.3, 1e-6, 1e-9).unwrap();
        assert_eq!(rec.error_estimate, 0.0);
        assert!(rec.accepted);
        assert_eq!(rec.stage_slopes.len(), 7);
        assert!((rec.end.x[0] - 1.9).abs() < 1e-15);
    }

    #[test]
    fn rk45_decay_error_bounds_true_error() {
        let (rtol, atol) = (1e-6, 1e-9);
        let rec = rk45_step(&decay(), &State::new(0.0, vec![1.0]), 0.1, rtol, atol).unwrap();
        assert!(rec.error_estimate > 0.0);
        let true_err = (rec.end.x[0] - (-0.1f64).exp()).abs();
        assert!(true_err <= 10.0 * rec.error_estimate * (atol + rtol));
    }

    #[test]
    fn rk45_error_estimate_scales_fifth_order() {
        let s = State::new(0.0, vec![1.0]);
        let e1 = rk45_step(&decay(), &s, 0.1, 1e-6, 1e-9).unwrap().error_estimate;
        let e2 = rk45_step(&decay(), &s, 0.05, 1e-6, 1e-9).unwrap().error_estimate;
        let ratio = e1 / e2;
        assert!((24.0..=40.0).contains(&ratio), "ratio {ratio}");
    }

    // Fifth-order weights (same as the last row of A, so the pair is FSAL).
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];

    #[test]
    fn tableau_is_consistent() {
        for (row, c) in A.iter().zip(C) {
            assert!((row.iter().sum::<f64>() - c).abs() < 1e-14);
        }
        for j in 0..6 {
            assert_eq!(A[6][j], B5[j]);
        }
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
        assert!((B5.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rk45_last_slope_is_slope_at_end() {
        let rec = rk45_step(&decay(), &State::new(0.0, vec![1.0]), 0.2, 1e-6, 1e-9).unwrap();
        assert_eq!(rec.stage_slopes[6][0], -rec.end.x[0]);
    }
}
