//! Residual checks of the norm, number, energy and momentum laws.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::modes::VacuumChoice;
use crate::observables::Ensemble;

/// Central-difference step used by the time-derivative laws.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Norm,
    NumberContinuity,
    EnergyBalance,
    Momentum,
}

impl Law {
    pub const ALL: [Law; 4] = [Law::Norm, Law::NumberContinuity, Law::EnergyBalance, Law::Momentum];

    pub fn name(self) -> &'static str {
        match self {
            Law::Norm => "norm",
            Law::NumberContinuity => "number_continuity",
            Law::EnergyBalance => "energy_balance",
            Law::Momentum => "momentum",
        }
    }

    fn uses_time_derivative(self) -> bool {
        matches!(self, Law::NumberContinuity | Law::EnergyBalance)
    }
}

impl std::str::FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Law::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidParam { name: "law", reason: format!("unknown law {s:?}") })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub law: Law,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Grid points dropped because they sit within one FD step of a kink in `g`.
    pub excluded: Vec<f64>,
}

/// Runs one law over `grid` with the default step.
pub fn verify(
    law: Law,
    grid: &[f64],
    params: &PhysicalParams,
    vacuum: VacuumChoice,
    tol: f64,
) -> Result<ResidualReport> {
    let ensemble = Ensemble::new(params, vacuum)?;
    verify_with(&ensemble, law, grid, tol, FD_STEP)
}

/// Like [`verify`] on a prebuilt ensemble and an explicit FD step.
pub fn verify_with(
    ensemble: &Ensemble,
    law: Law,
    grid: &[f64],
    tol: f64,
    h: f64,
) -> Result<ResidualReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam { name: "tol", reason: format!("must be positive, got {tol}") });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParam { name: "h", reason: format!("must be positive, got {h}") });
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParam {
            name: "time_grid",
            reason: "must be finite and strictly increasing".into(),
        });
    }

    let tau = ensemble.params().tau_s;
    let near_kink = |t: f64| {
        ensemble.vacuum() == VacuumChoice::History
            && ((t.abs() < h) || (tau > 0.0 && (t - tau).abs() < h))
    };
    let (times, excluded): (Vec<f64>, Vec<f64>) = if law.uses_time_derivative() {
        grid.iter().partition(|&&t| !near_kink(t))
    } else {
        (grid.to_vec(), Vec::new())
    };

    let residuals: Vec<f64> = times.par_iter().map(|&t| residual(ensemble, law, t, h)).collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(ResidualReport {
        law,
        pass: max_residual < tol && residuals.iter().all(|r| r.is_finite()),
        times,
        residuals,
        max_residual,
        tol,
        excluded,
    })
}

fn residual(e: &Ensemble, law: Law, t: f64, h: f64) -> f64 {
    let cut = e.table().n_max();
    let ell = e.params().ell;
    match law {
        Law::Norm => (0..=cut)
            .map(|n| (e.spinor(n, t).norm_density() - 1.0 / ell).abs())
            .fold(0.0, f64::max),
        Law::NumberContinuity => {
            let dn = (e.correlators_with_cutoff(t + h, cut).n_dep
                - e.correlators_with_cutoff(t - h, cut).n_dep)
                / (2.0 * h);
            let c = e.correlators_with_cutoff(t, cut);
            (dn + 2.0 * e.coupling(t) * c.anom.im).abs()
        }
        Law::EnergyBalance => {
            let total = |s: f64| e.energies_from(&e.correlators_with_cutoff(s, cut)).total;
            let de = (total(t + h) - total(t - h)) / (2.0 * h);
            let c = e.correlators_with_cutoff(t, cut);
            (de - e.coupling_rate(t) * c.g2() / 2.0).abs()
        }
        // Θ carries no x dependence on a uniform ring, so its gradient term is exactly zero.
        Law::Momentum => e.fluxes_and_stress(t).momentum_density.abs(),
    }
}

/// `n` evenly spaced points on `[a, b]`, endpoints included.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
