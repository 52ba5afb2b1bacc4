//! Reduced-unit parameterization of the quenched ring condensate.
//!
//! Lengths are measured in healing lengths and times in `1/Δμ` of the
//! interacting regime, with `ħ = m = g₀ρ₀ = 1`. The coupling ramps linearly
//! from zero at `t = 0` to its final value at `t = τ_s`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// How the condensate chemical potential is evaluated while the coupling ramps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuConvention {
    /// `μ(t) = V + g(t)ρ₀`, the value that keeps the background stationary.
    #[default]
    Instantaneous,
    /// `μ = V + Δμ` at every `t ≥ 0`.
    Final,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Ring circumference.
    pub ell: f64,
    /// Duration of the linear ramp. Zero selects the sudden quench.
    pub tau_s: f64,
    /// External potential offset `V/Δμ`.
    pub v_ext: f64,
    /// Largest mode index kept in the mode sums.
    pub n_max: usize,
    /// Relative tolerance for the truncated mode sums.
    pub rel_tol: f64,
    pub mu_convention: MuConvention,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            ell: 20.0,
            tau_s: 1.0,
            v_ext: 0.0,
            n_max: 2000,
            rel_tol: 1e-8,
            mu_convention: MuConvention::Instantaneous,
        }
    }
}

impl PhysicalParams {
    pub fn new(ell: f64, tau_s: f64) -> Result<Self> {
        let p = Self {
            ell,
            tau_s,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_v_ext(mut self, v_ext: f64) -> Self {
        self.v_ext = v_ext;
        self
    }

    pub fn with_mu_convention(mut self, c: MuConvention) -> Self {
        self.mu_convention = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParam {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return bad("ell", "must be finite and > 0");
        }
        if !(self.tau_s.is_finite() && self.tau_s >= 0.0) {
            return bad("tau_s", "must be finite and >= 0");
        }
        if !self.v_ext.is_finite() {
            return bad("v_ext", "must be finite");
        }
        if self.n_max < 1 {
            return bad("n_max", "must be >= 1");
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return bad("rel_tol", "must be finite and > 0");
        }
        Ok(())
    }

    pub fn is_sudden(&self) -> bool {
        self.tau_s == 0.0
    }

    pub fn regime(&self, t: f64) -> Regime {
        Regime::at(t, self.tau_s)
    }
}

/// The three time regimes of the quench.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `t < 0`, no interactions.
    Free,
    /// `0 ≤ t ≤ τ_s` with `τ_s > 0`, coupling ramping.
    Switching,
    /// `t > τ_s` (or `t ≥ 0` for the sudden quench).
    Interacting,
}

impl Regime {
    pub fn at(t: f64, tau_s: f64) -> Self {
        if t < 0.0 {
            Regime::Free
        } else if tau_s > 0.0 && t <= tau_s {
            Regime::Switching
        } else {
            Regime::Interacting
        }
    }
}

/// `g(t)/g₀` for the linear ramp. The sudden limit `τ_s = 0` jumps to one at `t = 0`.
pub fn coupling_fraction(t: f64, tau_s: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else if t >= tau_s {
        1.0
    } else {
        t / tau_s
    }
}

/// `d(g/g₀)/dt`, defined away from the kinks at `t = 0` and `t = τ_s`.
pub fn coupling_rate(t: f64, tau_s: f64) -> f64 {
    if tau_s > 0.0 && (0.0..=tau_s).contains(&t) {
        1.0 / tau_s
    } else {
        0.0
    }
}

/// Condensate chemical potential in units of `Δμ`.
pub fn chemical_potential(t: f64, params: &PhysicalParams) -> f64 {
    match params.mu_convention {
        MuConvention::Instantaneous => params.v_ext + coupling_fraction(t, params.tau_s),
        MuConvention::Final if t >= 0.0 => params.v_ext + 1.0,
        MuConvention::Final => params.v_ext,
    }
}

/// Wavenumber and frequencies of ring mode `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub n: i64,
    pub k: f64,
    /// Free-particle frequency `k²/2`.
    pub omega: f64,
    /// Bogoliubov frequency `√(ω² + 2ω)`.
    pub big_omega: f64,
}

impl Dispersion {
    pub fn new(n: i64, ell: f64) -> Self {
        let k = 2.0 * PI * n as f64 / ell;
        let omega = 0.5 * k * k;
        let big_omega = (omega * omega + 2.0 * omega).sqrt();
        Self {
            n,
            k,
            omega,
            big_omega,
        }
    }

    /// `Ω − ω`, formed without cancellation.
    pub fn gap(&self) -> f64 {
        if self.omega == 0.0 {
            0.0
        } else {
            2.0 * self.omega / (self.big_omega + self.omega)
        }
    }

    /// `1 − (Ω − ω)`, formed without cancellation.
    pub fn one_minus_gap(&self) -> f64 {
        if self.omega == 0.0 {
            1.0
        } else {
            self.gap() / (self.big_omega + self.omega)
        }
    }
}

pub fn dispersion(n: i64, ell: f64) -> Dispersion {
    Dispersion::new(n, ell)
}
