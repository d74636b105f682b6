//! Scalar SECB mathematics.
//!
//! A solution of the backward problem obeys the slow-evolution constraint
//! when `||u(T) - u(s)|| <= K*delta` for a known time `s < T`. Two constants
//! govern the resulting stability theory:
//!
//! * `s_star`, the critical constraint time `T*log(M/delta - K)/log(M/delta)`;
//!   choosing `s < s_star` improves on the classical two-constraint bound.
//! * `Lambda`, the unique root of `x = K + x^(s/T)`, which replaces `M/delta`
//!   as the amplification factor in the stability estimate
//!   `||u1(t) - u2(t)|| <= 2*Lambda^(t/T)*delta`.

use crate::error::{positive, Error, Result};

/// Default relative tolerance for the fixed-point iteration.
pub const DEFAULT_LAMBDA_TOL: f64 = 1e-12;

/// Iteration cap; hitting it signals pathological inputs.
pub const MAX_FIXED_POINT_ITERATIONS: usize = 1_000_000;

/// Scalar constraint data: noise radius `delta`, SECB ratio `K`, constraint
/// time `s`, continuation boundary `T`, and an optional a priori bound `M`
/// (used only for `s_star` and the Hölder comparison).
#[derive(Debug, Clone, PartialEq)]
pub struct SecbParams {
    pub delta: f64,
    pub secb_ratio: f64,
    pub secb_time: f64,
    pub horizon: f64,
    pub apriori_bound: Option<f64>,
}

impl SecbParams {
    pub fn new(
        delta: f64,
        secb_ratio: f64,
        secb_time: f64,
        horizon: f64,
        apriori_bound: Option<f64>,
    ) -> Result<Self> {
        if !positive(delta) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if !positive(secb_ratio) {
            return Err(Error::InvalidParameter(format!(
                "K must be positive, got {secb_ratio}"
            )));
        }
        if !positive(horizon) {
            return Err(Error::InvalidParameter(format!(
                "T must be positive, got {horizon}"
            )));
        }
        if !positive(secb_time) || secb_time >= horizon {
            return Err(Error::InvalidParameter(format!(
                "s must lie in (0, T) = (0, {horizon}), got {secb_time}"
            )));
        }
        if let Some(m) = apriori_bound {
            if !positive(m) {
                return Err(Error::InvalidParameter(format!(
                    "M must be positive, got {m}"
                )));
            }
            if secb_ratio + 1.0 >= m / delta {
                return Err(Error::InvalidParameter(format!(
                    "K + 1 must be below M/delta; got K = {secb_ratio}, M/delta = {}",
                    m / delta
                )));
            }
        }
        Ok(Self {
            delta,
            secb_ratio,
            secb_time,
            horizon,
            apriori_bound,
        })
    }
}

/// Root of `x = K + x^(s/T)` together with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRoot {
    /// The amplification constant `Lambda`.
    pub lambda: f64,
    /// `|Lambda - K - Lambda^(s/T)|` at termination.
    pub residual: f64,
    /// Number of fixed-point steps taken.
    pub iterations: usize,
}

/// Position of the chosen constraint time relative to `s_star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SRegime {
    /// `s < s_star`: the SECB bound beats the classical Hölder bound.
    Improves,
    /// `s = s_star` (within tolerance): `Lambda = M/delta`, the bounds agree.
    MatchesHolder,
    /// `s > s_star`: the SECB bound is weaker.
    Degrades,
}

/// Critical constraint time `T*log(M/delta - K)/log(M/delta)`.
///
/// Satisfies `M/delta = K + (M/delta)^(s_star/T)` by construction.
pub fn s_star(delta: f64, apriori_bound: f64, secb_ratio: f64, horizon: f64) -> Result<f64> {
    if !positive(delta)
        || !positive(apriori_bound)
        || !positive(horizon)
        || !secb_ratio.is_finite()
        || secb_ratio < 0.0
    {
        return Err(Error::InvalidParameter(
            "s_star requires delta > 0, M > 0, K >= 0, T > 0".into(),
        ));
    }
    let ratio = apriori_bound / delta;
    if ratio <= secb_ratio {
        return Err(Error::InvalidParameter(format!(
            "M/delta = {ratio} must exceed K = {secb_ratio}"
        )));
    }
    if ratio <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "M/delta = {ratio} must exceed 1"
        )));
    }
    Ok(horizon * (ratio - secb_ratio).ln() / ratio.ln())
}

/// Solves `x = K + x^(s/T)` by the fixed-point iteration `z_{n+1} = K + z_n^(s/T)`
/// started at `z_1 = K + 1`.
///
/// The iteration stops once the step falls below `tol` relative to the iterate
/// and then keeps going while the step still shrinks, so the returned residual
/// is at round-off level. `tol` is relative; see [`DEFAULT_LAMBDA_TOL`].
pub fn solve_lambda(secb_ratio: f64, secb_time: f64, horizon: f64, tol: f64) -> Result<LambdaRoot> {
    if !secb_ratio.is_finite() || secb_ratio < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "K must be nonnegative, got {secb_ratio}"
        )));
    }
    if !positive(horizon) {
        return Err(Error::InvalidParameter(format!(
            "T must be positive, got {horizon}"
        )));
    }
    if !positive(secb_time) || secb_time >= horizon {
        return Err(Error::InvalidParameter(format!(
            "s must be < T and positive; got s = {secb_time}, T = {horizon}"
        )));
    }
    if !positive(tol) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }

    let exponent = secb_time / horizon;
    let mut z = secb_ratio + 1.0;
    let mut iterations = 0usize;
    let mut within_tol = false;
    let mut last_step = f64::INFINITY;
    let mut polish_steps = 0usize;

    loop {
        if iterations >= MAX_FIXED_POINT_ITERATIONS {
            return Err(Error::IterationLimit {
                max_iterations: MAX_FIXED_POINT_ITERATIONS,
                last: z,
            });
        }
        let next = secb_ratio + z.powf(exponent);
        let step = (next - z).abs();
        iterations += 1;
        z = next;
        if step <= tol * z {
            within_tol = true;
        }
        if within_tol {
            // Drive the iterate to a floating-point stationary point so the
            // residual lands at round-off rather than at tol level.
            if step == 0.0 || step >= last_step {
                break;
            }
            polish_steps += 1;
            if polish_steps > 200 {
                break;
            }
        }
        last_step = step;
    }

    let residual = (z - secb_ratio - z.powf(exponent)).abs();
    Ok(LambdaRoot {
        lambda: z,
        residual,
        iterations,
    })
}

/// SECB stability bound `2*Lambda^(t/T)*delta`.
pub fn stability_bound(t: f64, horizon: f64, lambda: f64, delta: f64) -> Result<f64> {
    check_time_range(t, horizon)?;
    if !positive(lambda) || !positive(delta) {
        return Err(Error::InvalidParameter(
            "stability bound needs Lambda > 0, delta > 0".into(),
        ));
    }
    Ok(2.0 * lambda.powf(t / horizon) * delta)
}

/// Classical two-constraint bound `2*M^(t/T)*delta^(1 - t/T)`.
pub fn holder_bound(t: f64, horizon: f64, apriori_bound: f64, delta: f64) -> Result<f64> {
    check_time_range(t, horizon)?;
    if !positive(apriori_bound) || !positive(delta) {
        return Err(Error::InvalidParameter(
            "Hölder bound needs M > 0, delta > 0".into(),
        ));
    }
    Ok(2.0 * apriori_bound.powf(t / horizon) * delta.powf(1.0 - t / horizon))
}

/// Compares the chosen `s` against `s_star`; relative ties within 1e-9 count
/// as equal.
pub fn classify_s(params: &SecbParams) -> Result<SRegime> {
    let m = params.apriori_bound.ok_or(Error::MissingAprioriBound)?;
    let critical = s_star(params.delta, m, params.secb_ratio, params.horizon)?;
    let tol = 1e-9 * critical.abs();
    if (params.secb_time - critical).abs() <= tol {
        Ok(SRegime::MatchesHolder)
    } else if params.secb_time < critical {
        Ok(SRegime::Improves)
    } else {
        Ok(SRegime::Degrades)
    }
}

fn check_time_range(t: f64, horizon: f64) -> Result<()> {
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::TimeOutOfRange {
            t,
            min: 0.0,
            max: horizon,
        });
    }
    Ok(())
}
