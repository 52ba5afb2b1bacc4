//! Piecewise-exact time parts of the ring modes.
//!
//! Mode `n` starts as the free plane wave `e^{−iωt}(1, 0)/√ℓ`. During the ramp
//! it is a combination of the Airy doublets [`switching_basis`], afterwards a
//! combination of the Bogoliubov doublet [`post_basis`] and its σ₁-conjugate.
//! The combination coefficients follow from continuity at `t = 0` and
//! `t = τ_s`, projected out with [`symplectic_bracket`].
//!
//! Fractional powers of negative numbers are taken on the real branch,
//! `(−x)^{1/3} = −x^{1/3}`. With it the argument `σ_n(t)` is real and
//! negative for `t ≥ 0`, and the doublets solve the ramp equation exactly:
//! eliminating `v` gives `s'' = −ω(ω + 2t/τ_s)s` for `s = u + v`.

use crate::airy::airy_all;
use crate::error::{domain, Error, Result};
use crate::model::{coupling_fraction, Dispersion, PhysicalParams, Regime};
use crate::spinor::{symplectic_bracket, NambuSpinor};
use num_complex::Complex64;
use rayon::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which vacuum the expectation values are taken in.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum VacuumChoice {
    /// The state evolved from the free vacuum before the quench.
    #[default]
    History,
    /// An instantaneous vacuum of the interacting regime; `(α, β)` fix the
    /// zero-mode doublet.
    Quasiparticle { alpha: f64, beta: f64 },
}

impl VacuumChoice {
    pub fn quasiparticle(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParam {
                name: "alpha",
                reason: format!("quasiparticle vacuum needs alpha > 0, got ({alpha}, {beta})"),
            });
        }
        Ok(VacuumChoice::Quasiparticle { alpha, beta })
    }

    /// The vacuum of minimal depletion at `t0`.
    pub fn minimal_depletion(t0: f64) -> Self {
        let (alpha, beta) = minimal_depletion_vacuum(t0);
        VacuumChoice::Quasiparticle { alpha, beta }
    }
}

/// Continuity coefficients of one mode. `gamma*` join the free and ramp
/// regimes and are absent for the sudden quench and the zero mode; `eta*`
/// expand the mode on `{Ψ⁽¹⁾, σ₁Ψ⁽¹⁾*}` in the interacting regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingCoefficients {
    pub gamma1: Option<Complex64>,
    pub gamma2: Option<Complex64>,
    pub eta1: Complex64,
    pub eta2: Complex64,
}

impl MatchingCoefficients {
    /// `|η1|² − |η2|² − 1`, zero for a unit-norm mode.
    pub fn bogoliubov_defect(&self) -> f64 {
        self.eta1.norm_sqr() - self.eta2.norm_sqr() - 1.0
    }
}

fn require_ramp_mode(n: i64, params: &PhysicalParams) -> Result<Dispersion> {
    if n == 0 {
        return domain("the zero mode has no Airy representation");
    }
    if params.tau_s <= 0.0 {
        return domain("the sudden quench has no switching regime");
    }
    Ok(Dispersion::new(n, params.ell))
}

/// Rate `dσ_n/dt = −(2ω/τ_s)^{1/3}`.
pub fn sigma_rate(n: i64, params: &PhysicalParams) -> Result<f64> {
    let d = require_ramp_mode(n, params)?;
    Ok(-(2.0 * d.omega / params.tau_s).cbrt())
}

/// Airy argument `σ_n(t) = −ω(τ_s/2ω)^{2/3}(ω + 2t/τ_s)`.
pub fn sigma_arg(n: i64, t: f64, params: &PhysicalParams) -> Result<f64> {
    let d = require_ramp_mode(n, params)?;
    let c = (params.tau_s / (2.0 * d.omega)).cbrt();
    Ok(-d.omega * c * c * (d.omega + 2.0 * t / params.tau_s))
}

/// The Airy doublets `(Γ⁽¹⁾, Γ⁽²⁾)` solving the mode equation while the
/// coupling ramps. Outside `[0, τ_s]` they continue the ramp analytically.
pub fn switching_basis(
    n: i64,
    t: f64,
    params: &PhysicalParams,
) -> Result<(NambuSpinor, NambuSpinor)> {
    let d = require_ramp_mode(n, params)?;
    let sigma = sigma_arg(n, t, params)?;
    let rate = sigma_rate(n, params)?;
    let a = airy_all(sigma)?;
    let norm = 1.0 / params.ell.sqrt();
    let c = I * (rate / d.omega);
    let doublet = |f: f64, fp: f64| {
        let f = Complex64::new(f, 0.0);
        NambuSpinor::new((f + c * fp) * norm, (f - c * fp) * norm)
    };
    Ok((doublet(a.ai, a.aip), doublet(a.bi, a.bip)))
}

/// Positive-norm Bogoliubov doublet `Ψ⁽¹⁾_n(t)` of the interacting regime.
/// Its partner is `σ₁Ψ⁽¹⁾*`, see [`NambuSpinor::conjugate_partner`].
pub fn post_basis(n: i64, t: f64, ell: f64) -> Result<NambuSpinor> {
    if n == 0 {
        return domain("post_basis: use qp_zero_mode for n = 0");
    }
    Ok(post_basis_for(&Dispersion::new(n, ell), t, ell))
}

fn post_basis_for(d: &Dispersion, t: f64, ell: f64) -> NambuSpinor {
    let a = d.gap();
    let denom = a * (1.0 + d.one_minus_gap());
    debug_assert!(denom > 0.0);
    let amp = 1.0 / (ell * denom).sqrt();
    let phase = Complex64::from_polar(amp, -d.big_omega * t);
    NambuSpinor::new(phase, phase * (-d.one_minus_gap()))
}

/// History zero mode: free for `t < 0`, quadratic phase during the ramp, and
/// linear growth `v = i(t − τ_s/2)/√ℓ` afterwards.
pub fn zero_mode_history(t: f64, params: &PhysicalParams) -> NambuSpinor {
    let norm = 1.0 / params.ell.sqrt();
    let tau = params.tau_s;
    // (u, v) = ½(1,1) + c(1,−1) with c the coefficient of (1,−1)
    let c = match Regime::at(t, tau) {
        Regime::Free => return NambuSpinor::real(norm, 0.0),
        Regime::Switching => Complex64::new(0.5, -0.5 * t * t / tau),
        Regime::Interacting => Complex64::new(0.5, 0.5 * tau - t),
    };
    let half = Complex64::new(0.5, 0.0);
    NambuSpinor::new((half + c) * norm, (half - c) * norm)
}

/// Zero-mode doublet `Ψ⁽¹⁾_0` of the instantaneous vacuum `(α, β)`.
pub fn qp_zero_mode(t: f64, alpha: f64, beta: f64, ell: f64) -> Result<NambuSpinor> {
    if !(alpha > 0.0) {
        return domain(format!("qp_zero_mode: alpha must be > 0, got {alpha}"));
    }
    Ok(qp_zero_mode_unchecked(t, alpha, beta, ell))
}

fn qp_zero_mode_unchecked(t: f64, alpha: f64, beta: f64, ell: f64) -> NambuSpinor {
    let norm = 1.0 / ell.sqrt();
    let c = Complex64::new(0.5 / alpha, beta);
    // Π̃₀ = (½ − it, ½ + it)
    let pu = Complex64::new(0.5, -t);
    let pv = Complex64::new(0.5, t);
    NambuSpinor::new((alpha + c * pu) * norm, (-alpha + c * pv) * norm)
}

/// `(α, β)` of the instantaneous vacuum whose depletion is minimal at `t0`.
pub fn minimal_depletion_vacuum(t0: f64) -> (f64, f64) {
    let alpha = (1.0 + 4.0 * t0 * t0).sqrt() / 2.0;
    (alpha, -t0 / alpha)
}

fn project(x: &NambuSpinor, b1: &NambuSpinor, b2: &NambuSpinor) -> (Complex64, Complex64) {
    let c1 = symplectic_bracket(b2, x) / symplectic_bracket(b2, b1);
    let c2 = symplectic_bracket(b1, x) / symplectic_bracket(b1, b2);
    (c1, c2)
}

/// Zero-mode coefficients on the `(α, β)` doublet.
fn zero_mode_eta(alpha: f64, beta: f64, tau_s: f64) -> (Complex64, Complex64) {
    let h = Complex64::new(0.5, 0.5 * tau_s);
    let eta1 = alpha + h * Complex64::new(0.5 / alpha, -beta);
    let eta2 = alpha - h * Complex64::new(0.5 / alpha, beta);
    (eta1, eta2)
}

/// Continuity coefficients of mode `n` for the given vacuum.
///
/// For `n ≠ 0` they do not depend on the vacuum. The history zero mode is
/// expanded on the `α = ½, β = 0` doublet.
pub fn match_coefficients(
    n: i64,
    params: &PhysicalParams,
    vacuum: VacuumChoice,
) -> Result<MatchingCoefficients> {
    params.validate()?;
    if n == 0 {
        let (alpha, beta) = match vacuum {
            VacuumChoice::History => (0.5, 0.0),
            VacuumChoice::Quasiparticle { alpha, beta } => {
                VacuumChoice::quasiparticle(alpha, beta)?;
                (alpha, beta)
            }
        };
        let (eta1, eta2) = zero_mode_eta(alpha, beta, params.tau_s);
        return Ok(MatchingCoefficients {
            gamma1: None,
            gamma2: None,
            eta1,
            eta2,
        });
    }

    let ell = params.ell;
    let d = Dispersion::new(n, ell);
    let start = NambuSpinor::real(1.0 / ell.sqrt(), 0.0);
    let tau = params.tau_s;

    let (gamma, joined) = if params.is_sudden() {
        (None, start)
    } else {
        let (g1_0, g2_0) = switching_basis(n, 0.0, params)?;
        let (gamma1, gamma2) = project(&start, &g1_0, &g2_0);
        let (g1_t, g2_t) = switching_basis(n, tau, params)?;
        (Some((gamma1, gamma2)), gamma1 * g1_t + gamma2 * g2_t)
    };
    let psi1 = post_basis_for(&d, tau, ell);
    let psi2 = psi1.conjugate_partner();
    let (eta1, eta2) = project(&joined, &psi1, &psi2);
    Ok(MatchingCoefficients {
        gamma1: gamma.map(|g| g.0),
        gamma2: gamma.map(|g| g.1),
        eta1,
        eta2,
    })
}

fn assemble(
    d: &Dispersion,
    t: f64,
    params: &PhysicalParams,
    vacuum: VacuumChoice,
    coeffs: &MatchingCoefficients,
) -> Result<NambuSpinor> {
    let ell = params.ell;
    if let VacuumChoice::Quasiparticle { alpha, beta } = vacuum {
        return Ok(if d.n == 0 {
            qp_zero_mode_unchecked(t, alpha, beta, ell)
        } else {
            post_basis_for(d, t, ell)
        });
    }
    if d.n == 0 {
        return Ok(zero_mode_history(t, params));
    }
    if t == 0.0 {
        // the matching condition, without the rounding of the ramp basis
        return Ok(NambuSpinor::new(Complex64::new(1.0 / ell.sqrt(), 0.0), Complex64::default()));
    }
    Ok(match params.regime(t) {
        Regime::Free => {
            NambuSpinor::new(Complex64::from_polar(1.0 / ell.sqrt(), -d.omega * t), Complex64::default())
        }
        Regime::Switching => {
            let (g1, g2) = switching_basis(d.n, t, params)?;
            let (c1, c2) = (coeffs.gamma1.unwrap(), coeffs.gamma2.unwrap());
            c1 * g1 + c2 * g2
        }
        Regime::Interacting => {
            let psi = post_basis_for(d, t, ell);
            coeffs.eta1 * psi + coeffs.eta2 * psi.conjugate_partner()
        }
    })
}

/// Time part of the mode that the chosen vacuum is built on.
///
/// * [`VacuumChoice::History`]: the history mode `Φ_n(t)`, continuous at
///   `t = 0` and `t = τ_s`.
/// * [`VacuumChoice::Quasiparticle`]: the interacting-regime doublet
///   `Ψ⁽¹⁾_n(t)`. That vacuum describes a condensate assumed to be in the
///   interacting regime, so the doublet is returned for every `t`.
pub fn evaluate_mode(
    n: i64,
    t: f64,
    params: &PhysicalParams,
    vacuum: VacuumChoice,
) -> Result<NambuSpinor> {
    let d = Dispersion::new(n, params.ell);
    let coeffs = match (vacuum, n) {
        (VacuumChoice::History, n) if n != 0 => match_coefficients(n, params, vacuum)?,
        _ => MatchingCoefficients {
            gamma1: None,
            gamma2: None,
            eta1: Complex64::new(1.0, 0.0),
            eta2: Complex64::default(),
        },
    };
    if let VacuumChoice::Quasiparticle { alpha, beta } = vacuum {
        VacuumChoice::quasiparticle(alpha, beta)?;
    }
    assemble(&d, t, params, vacuum, &coeffs)
}

/// Matching coefficients for modes `0..=n_max`, computed once and shared.
#[derive(Debug, Clone)]
pub struct ModeTable {
    params: PhysicalParams,
    vacuum: VacuumChoice,
    dispersions: Vec<Dispersion>,
    coeffs: Vec<MatchingCoefficients>,
}

impl ModeTable {
    pub fn new(params: &PhysicalParams, vacuum: VacuumChoice) -> Result<Self> {
        params.validate()?;
        if let VacuumChoice::Quasiparticle { alpha, beta } = vacuum {
            VacuumChoice::quasiparticle(alpha, beta)?;
        }
        let n_max = params.n_max as i64;
        let coeffs = (0..=n_max)
            .into_par_iter()
            .map(|n| match_coefficients(n, params, vacuum))
            .collect::<Result<Vec<_>>>()?;
        let dispersions = (0..=n_max).map(|n| Dispersion::new(n, params.ell)).collect();
        Ok(Self {
            params: params.clone(),
            vacuum,
            dispersions,
            coeffs,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn vacuum(&self) -> VacuumChoice {
        self.vacuum
    }

    pub fn n_max(&self) -> usize {
        self.params.n_max
    }

    pub fn dispersion(&self, n: usize) -> &Dispersion {
        &self.dispersions[n]
    }

    pub fn coefficients(&self, n: usize) -> &MatchingCoefficients {
        &self.coeffs[n]
    }

    /// Time part of mode `n ≥ 0` (modes `±n` share it).
    pub fn spinor(&self, n: usize, t: f64) -> NambuSpinor {
        assemble(&self.dispersions[n], t, &self.params, self.vacuum, &self.coeffs[n])
            .expect("mode table holds validated parameters")
    }

    /// Coupling `g/g₀` felt by the modes at `t`. Instantaneous vacua live in
    /// the interacting regime.
    pub fn coupling(&self, t: f64) -> f64 {
        match self.vacuum {
            VacuumChoice::History => coupling_fraction(t, self.params.tau_s),
            VacuumChoice::Quasiparticle { .. } => 1.0,
        }
    }
}
