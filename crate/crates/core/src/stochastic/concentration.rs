//! Empirical check of the Gaussian-type tail
//! `P(‖Zᵉ - Z‖∞ > ρ) ≲ exp(-c ρ² / ε²)`.

use super::{ensemble, EnsembleSummary, SdeError, Seed};
use crate::model::{InitialCondition, Params};
use crate::scalar::Scalar;

/// Tail points with fewer exceedances are too noisy to fit.
pub const MIN_EXCEEDANCES: usize = 5;

/// Slack allowed when a fitted tail is transferred to another noise level.
pub const TRANSFER_SAFETY: f64 = 3.0;

/// Least-squares fit of `ln P = -c x` with `x = ρ²/ε²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit<T> {
    pub c_hat: T,
    /// `(ρ, x, ln P)` for every usable grid point.
    pub points: Vec<(T, T, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferCheck<T> {
    pub epsilon: T,
    pub safety: T,
    pub summary: EnsembleSummary<T>,
    /// `(ρ, empirical tail, safety · exp(-ĉ ρ²/ε²))`.
    pub bounds: Vec<(T, T, T)>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport<T> {
    pub epsilon: T,
    pub summary: EnsembleSummary<T>,
    /// `ε = 0`: every deviation vanishes and nothing is fitted.
    pub degenerate: bool,
    pub fit: Option<TailFit<T>>,
    /// `ln P` is nonincreasing in `ρ²` over the usable points, and drops
    /// somewhere.
    pub log_tail_decreasing: bool,
    pub transfer: Option<TransferCheck<T>>,
}

fn fit_tail<T: Scalar>(summary: &EnsembleSummary<T>) -> Result<TailFit<T>, SdeError> {
    let eps_sq = summary.epsilon * summary.epsilon;
    let points: Vec<(T, T, T)> = summary
        .tail
        .iter()
        .filter(|t| t.rho > T::zero() && t.exceedances >= MIN_EXCEEDANCES)
        .map(|t| (t.rho, t.rho * t.rho / eps_sq, t.probability.ln()))
        .collect();
    if points.len() < 2 {
        return Err(SdeError::InsufficientExceedances {
            usable: points.len(),
            required: MIN_EXCEEDANCES,
        });
    }
    let sxy: T = points.iter().map(|(_, x, y)| *x * *y).sum();
    let sxx: T = points.iter().map(|(_, x, _)| *x * *x).sum();
    Ok(TailFit {
        c_hat: -sxy / sxx,
        points,
    })
}

fn decreasing<T: Scalar>(fit: &TailFit<T>) -> bool {
    let ys: Vec<T> = fit.points.iter().map(|p| p.2).collect();
    ys.windows(2).all(|w| w[1] <= w[0]) && ys.last() < ys.first()
}

/// Runs an ensemble at `p.epsilon`, fits `ĉ`, and tests the fitted bound at
/// `transfer_epsilon` (default `2ε`) with the same seed and grid.
#[allow(clippy::too_many_arguments)]
pub fn concentration_check<T: Scalar>(
    p: &Params<T>,
    ic: &InitialCondition<T>,
    t_end: T,
    h: T,
    n_rep: usize,
    rho_grid: &[T],
    seed: &Seed,
    transfer_epsilon: Option<T>,
) -> Result<ConcentrationReport<T>, SdeError> {
    let summary = ensemble(p, ic, t_end, h, n_rep, seed, rho_grid)?;
    if p.epsilon == T::zero() {
        return Ok(ConcentrationReport {
            epsilon: p.epsilon,
            summary,
            degenerate: true,
            fit: None,
            log_tail_decreasing: false,
            transfer: None,
        });
    }
    let fit = fit_tail(&summary)?;
    let log_tail_decreasing = decreasing(&fit);

    let eps2 = transfer_epsilon.unwrap_or(p.epsilon * T::of(2.0));
    let other = ensemble(&p.with_epsilon(eps2), ic, t_end, h, n_rep, seed, rho_grid)?;
    let safety = T::of(TRANSFER_SAFETY);
    let bounds: Vec<(T, T, T)> = other
        .tail
        .iter()
        .map(|t| {
            let bound = safety * (-fit.c_hat * t.rho * t.rho / (eps2 * eps2)).exp();
            (t.rho, t.probability, bound)
        })
        .collect();
    let holds = bounds.iter().all(|(_, emp, bound)| emp <= bound);
    Ok(ConcentrationReport {
        epsilon: p.epsilon,
        summary,
        degenerate: false,
        fit: Some(fit),
        log_tail_decreasing,
        transfer: Some(TransferCheck {
            epsilon: eps2,
            safety,
            summary: other,
            bounds,
            holds,
        }),
    })
}
