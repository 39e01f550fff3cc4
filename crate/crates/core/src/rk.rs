//! Dormand–Prince 5(4) embedded Runge–Kutta integration.

use crate::error::{Error, Result};
use crate::scalar::Real;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-size control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, h_init: 1e-4, h_min: 1e-14, h_max: 0.1, max_steps: 2_000_000 }
    }
}

/// One Dormand–Prince step from `(t, y)`; returns the fifth-order solution
/// and the embedded error estimate.
pub fn dp5_step<T: Real, F: Fn(T, &[T], &mut [T])>(f: &F, t: T, y: &[T], h: T) -> (Vec<T>, Vec<T>) {
    let n = y.len();
    let mut k = vec![vec![T::zero(); n]; 7];
    let mut tmp = vec![T::zero(); n];
    f(t, y, &mut k[0]);
    for s in 1..7 {
        for i in 0..n {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate().take(s) {
                acc = acc + T::of(A[s][j]) * kj[i];
            }
            tmp[i] = y[i] + h * acc;
        }
        let mut ks = vec![T::zero(); n];
        f(t + T::of(C[s]) * h, &tmp, &mut ks);
        k[s] = ks;
    }
    let y_new = tmp;
    let err = (0..n)
        .map(|i| h * (0..7).fold(T::zero(), |acc, s| acc + T::of(E[s]) * k[s][i]))
        .collect();
    (y_new, err)
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Integrates `y′ = f(t, y)` from `t0` to `t_end`, landing exactly on each
/// of `stops` (sorted, inside the interval). The observer sees every
/// accepted step as `(t_prev, y_prev, t, y)`.
pub fn integrate<T, F, O>(
    f: &F,
    t0: T,
    y0: Vec<T>,
    t_end: T,
    stops: &[T],
    ctl: &StepControl,
    mut observer: O,
) -> Result<(T, Vec<T>)>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
    O: FnMut(T, &[T], T, &[T]) -> Control,
{
    let (mut t, mut y) = (t0, y0);
    let mut h = T::of(ctl.h_init).min(t_end - t0);
    let mut next_stop = stops.iter().position(|&s| s > t0).unwrap_or(stops.len());
    for _ in 0..ctl.max_steps {
        if t >= t_end {
            return Ok((t, y));
        }
        let mut target = t_end;
        if next_stop < stops.len() && stops[next_stop] < target {
            target = stops[next_stop];
        }
        let clipped = t + h >= target;
        let step = if clipped { target - t } else { h };
        let (y_new, err) = dp5_step(f, t, &y, step);
        let norm = error_norm(&y, &y_new, &err, ctl);
        if !norm.is_finite() {
            h = step * T::of(0.2);
        } else if norm <= 1.0 {
            let t_new = if clipped { target } else { t + step };
            if clipped && next_stop < stops.len() && target == stops[next_stop] {
                next_stop += 1;
            }
            let ctrl = observer(t, &y, t_new, &y_new);
            t = t_new;
            y = y_new;
            if ctrl == Control::Stop {
                return Ok((t, y));
            }
            let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            let base = if clipped { h.max(step) } else { step };
            h = (base * T::of(grow)).min(T::of(ctl.h_max));
        } else {
            h = step * T::of((0.9 * norm.powf(-0.2)).clamp(0.2, 1.0));
        }
        if h.to64() < ctl.h_min {
            return Err(Error::StepCollapse { r: t.to64(), h: h.to64() });
        }
    }
    Err(Error::Numerical(format!("step limit {} reached at t = {}", ctl.max_steps, t)))
}

fn error_norm<T: Real>(y: &[T], y_new: &[T], err: &[T], ctl: &StepControl) -> f64 {
    let n = y.len() as f64;
    let s: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = ctl.atol + ctl.rtol * a.to64().abs().max(b.to64().abs());
            (e.to64() / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}
