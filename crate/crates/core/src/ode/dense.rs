use super::{State, StepRecord};
use crate::error::{Error, Result};

/// Cubic Hermite interpolation inside an accepted step at fraction `theta`.
///
/// Uses the endpoint states and the first and last stage slopes, so no extra
/// right-hand-side evaluations are needed. `theta` of 0 and 1 return the
/// endpoints bit-for-bit.
pub fn dense_interpolate(rec: &StepRecord, theta: f64) -> Result<State> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain(format!("theta must lie in [0, 1], got {theta}")));
    }
    if !rec.accepted {
        return Err(Error::domain("dense output requires an accepted step"));
    }
    let (Some(s0), Some(s1)) = (rec.stage_slopes.first(), rec.stage_slopes.last()) else {
        return Err(Error::domain("step record carries no stage slopes"));
    };
    if theta == 0.0 {
        return Ok(rec.start.clone());
    }
    if theta == 1.0 {
        return Ok(rec.end.clone());
    }

    let h = rec.end.t - rec.start.t;
    let th2 = theta * theta;
    let th3 = th2 * theta;
    let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
    let h10 = th3 - 2.0 * th2 + theta;
    let h01 = -2.0 * th3 + 3.0 * th2;
    let h11 = th3 - th2;
    let x: Vec<f64> = rec
        .start
        .x
        .iter()
        .zip(&rec.end.x)
        .zip(s0.iter().zip(s1))
        .map(|((&a, &b), (&da, &db))| h00 * a + h * h10 * da + h01 * b + h * h11 * db)
        .collect();
    Ok(State::new(rec.start.t + theta * h, x))
}
