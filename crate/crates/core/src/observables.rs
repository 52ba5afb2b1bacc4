//! Vacuum mode sums and the physical channels derived from them.
//!
//! All channels are intensive and `x`-independent. With `f = g/g₀`, the
//! coupling felt by the modes, and mode time parts `(u_n, v_n)`:
//!
//! ```text
//! ρ_χ   = Σ_n |v_n|²            ⟨ψ²⟩ = Σ_n u_n v̄_n        grad = Σ_n k_n²|v_n|²
//! Ĝ²    = 2(ρ_χ + Re⟨ψ²⟩)       (normal-ordered density variance over ρ₀)
//! E_χ   = ½grad + (V + f)ρ_χ + f(ρ_χ + Re⟨ψ²⟩)
//! E_ζ   = −μ ρ_χ
//! P_ζ   = −μℓ ∂_tρ_χ = 2μℓ f Im⟨ψ²⟩
//! ```
//!
//! The variance follows from `δρ = φ₀*χ + φ₀χ†` at leading order:
//! `⟨:δρ²:⟩ = ρ₀(⟨ψ²⟩ + ⟨ψ†²⟩ + 2⟨ψ†ψ⟩)`. Modes `±n` share their time part,
//! so each sum is the `n = 0` term plus twice the sum over `n ≥ 1`.
//! Terms are computed in parallel and reduced in ascending `n` with
//! compensated summation, so results do not depend on the thread count.

use crate::error::Result;
use crate::model::{chemical_potential, PhysicalParams};
use crate::modes::{ModeTable, VacuumChoice};
use crate::numeric::{CompensatedSum, ComplexCompensatedSum};
use crate::spinor::NambuSpinor;
use num_complex::Complex64;
use rayon::prelude::*;

/// Smallest cutoff at which the adaptive sum may stop.
const FIRST_CHECKPOINT: usize = 64;
/// Number of log-spaced blocks used to fit the tail.
const TAIL_BLOCKS: usize = 10;

/// Estimated truncation remainders, one per channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelTails {
    pub n_dep: f64,
    pub anom: f64,
    pub grad: f64,
}

impl ChannelTails {
    pub fn max(&self) -> f64 {
        self.n_dep.max(self.anom).max(self.grad)
    }
}

/// Vacuum correlators at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub t: f64,
    /// `⟨ψ†ψ⟩ = ρ_χ`.
    pub n_dep: f64,
    /// `⟨ψ²⟩`.
    pub anom: Complex64,
    /// `⟨∂ψ†∂ψ⟩`.
    pub grad: f64,
    pub tails: ChannelTails,
    /// Largest mode index included.
    pub cutoff: usize,
    /// False when some channel's tail exceeds `10·rel_tol·|value|`.
    pub converged: bool,
}

impl CorrelatorSet {
    pub fn tail_bound(&self) -> f64 {
        self.tails.max()
    }

    /// `Ĝ² = G⁽²⁾/ρ₀`.
    pub fn g2(&self) -> f64 {
        2.0 * (self.n_dep + self.anom.re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub e_chi: f64,
    pub e_zeta: f64,
    pub total: f64,
    pub g2: f64,
}

/// Energy flux, stress and momentum channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxStress {
    pub s_chi: f64,
    pub s_zeta: f64,
    pub theta_chi: f64,
    pub theta_zeta: f64,
    pub momentum_density: f64,
}

/// Weighted contribution of the pair `±n` (or of `n = 0`).
#[derive(Debug, Clone, Copy)]
struct ModeTerm {
    dep: f64,
    anom: Complex64,
    grad: f64,
}

/// Mode sums for one parameter set and vacuum.
#[derive(Debug, Clone)]
pub struct Ensemble {
    table: ModeTable,
}

impl Ensemble {
    pub fn new(params: &PhysicalParams, vacuum: VacuumChoice) -> Result<Self> {
        Ok(Self {
            table: ModeTable::new(params, vacuum)?,
        })
    }

    pub fn from_table(table: ModeTable) -> Self {
        Self { table }
    }

    pub fn params(&self) -> &PhysicalParams {
        self.table.params()
    }

    pub fn vacuum(&self) -> VacuumChoice {
        self.table.vacuum()
    }

    pub fn table(&self) -> &ModeTable {
        &self.table
    }

    /// Coupling `g/g₀` felt by the modes.
    pub fn coupling(&self, t: f64) -> f64 {
        self.table.coupling(t)
    }

    /// `d(g/g₀)/dt`.
    pub fn coupling_rate(&self, t: f64) -> f64 {
        match self.vacuum() {
            VacuumChoice::History => crate::model::coupling_rate(t, self.params().tau_s),
            VacuumChoice::Quasiparticle { .. } => 0.0,
        }
    }

    /// Chemical potential used for the condensate energy.
    pub fn mu(&self, t: f64) -> f64 {
        match self.vacuum() {
            VacuumChoice::History => chemical_potential(t, self.params()),
            VacuumChoice::Quasiparticle { .. } => self.params().v_ext + 1.0,
        }
    }

    fn weight(n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            2.0
        }
    }

    fn term(&self, n: usize, t: f64) -> ModeTerm {
        let s = self.table.spinor(n, t);
        let w = Self::weight(n);
        let k = self.table.dispersion(n).k;
        let v2 = s.v.norm_sqr();
        ModeTerm {
            dep: w * v2,
            anom: w * s.u * s.v.conj(),
            grad: w * k * k * v2,
        }
    }

    fn terms(&self, range: std::ops::RangeInclusive<usize>, t: f64) -> Vec<ModeTerm> {
        range.into_par_iter().map(|n| self.term(n, t)).collect()
    }

    /// Correlators with the adaptive cutoff: the sum stops at the first
    /// checkpoint (64, 128, …) where every channel's tail estimate is below
    /// `rel_tol·|value|`, or at `n_max`.
    pub fn correlators(&self, t: f64) -> CorrelatorSet {
        let n_max = self.table.n_max();
        let rel_tol = self.params().rel_tol;
        let mut terms: Vec<ModeTerm> = Vec::with_capacity(n_max + 1);
        let mut next = FIRST_CHECKPOINT.min(n_max);
        loop {
            let start = terms.len();
            terms.extend(self.terms(start..=next, t));
            let set = reduce(t, &terms, rel_tol);
            let done = next == n_max
                || (set.tails.n_dep <= rel_tol * set.n_dep.abs()
                    && set.tails.anom <= rel_tol * set.anom.norm()
                    && set.tails.grad <= rel_tol * set.grad.abs());
            if done {
                return set;
            }
            next = (next * 2).min(n_max);
        }
    }

    /// Correlators summed over exactly `0 ≤ n ≤ cutoff` (clamped to `n_max`).
    pub fn correlators_with_cutoff(&self, t: f64, cutoff: usize) -> CorrelatorSet {
        let cutoff = cutoff.min(self.table.n_max());
        let terms = self.terms(0..=cutoff, t);
        reduce(t, &terms, self.params().rel_tol)
    }

    pub fn depletion(&self, t: f64) -> f64 {
        self.correlators(t).n_dep
    }

    pub fn density_variance(&self, t: f64) -> f64 {
        self.correlators(t).g2()
    }

    pub fn energies(&self, t: f64) -> EnergyBreakdown {
        self.energies_from(&self.correlators(t))
    }

    pub fn energies_from(&self, c: &CorrelatorSet) -> EnergyBreakdown {
        let f = self.coupling(c.t);
        let e_chi =
            0.5 * c.grad + (self.params().v_ext + f) * c.n_dep + f * (c.n_dep + c.anom.re);
        let e_zeta = -self.mu(c.t) * c.n_dep;
        EnergyBreakdown {
            e_chi,
            e_zeta,
            total: e_chi + e_zeta,
            g2: c.g2(),
        }
    }

    /// Contribution of the pair `±n` to `E_χ + E_ζ` with the instantaneous
    /// chemical potential: `w[ω|v|² + f(|v|² + Re(u v̄))]`.
    pub fn mode_energy(&self, n: usize, t: f64) -> f64 {
        let s = self.table.spinor(n, t);
        let f = self.coupling(t);
        let omega = self.table.dispersion(n).omega;
        let v2 = s.v.norm_sqr();
        Self::weight(n) * (omega * v2 + f * (v2 + (s.u * s.v.conj()).re))
    }

    /// `P_ζ = −μℓ ∂_tρ_χ`, with the derivative taken from the per-mode
    /// identity `∂_t|v|² = −2f Im(u v̄)`.
    pub fn power_zeta(&self, t: f64) -> f64 {
        self.power_zeta_from(&self.correlators(t))
    }

    pub fn power_zeta_from(&self, c: &CorrelatorSet) -> f64 {
        2.0 * self.mu(c.t) * self.params().ell * self.coupling(c.t) * c.anom.im
    }

    /// Central-difference version of [`Ensemble::power_zeta`] at a fixed cutoff.
    ///
    /// Modes with `Ω·h` of order one or more are aliased, so keep the cutoff
    /// below the point where that happens.
    pub fn power_zeta_fd(&self, t: f64, h: f64, cutoff: usize) -> f64 {
        let dn = (self.correlators_with_cutoff(t + h, cutoff).n_dep
            - self.correlators_with_cutoff(t - h, cutoff).n_dep)
            / (2.0 * h);
        -self.mu(t) * self.params().ell * dn
    }

    /// Energy flux, stress and momentum.
    ///
    /// `s_chi = Re⟨∂ψ†(∂_t − iμ)ψ⟩` and the momentum density `Im⟨ψ†∂ψ⟩` are
    /// accumulated over signed `n`, so they vanish by cancellation of the
    /// `±n` pairs rather than by assumption.
    pub fn fluxes_and_stress(&self, t: f64) -> FluxStress {
        self.fluxes_and_stress_from(&self.correlators(t))
    }

    pub fn fluxes_and_stress_from(&self, c: &CorrelatorSet) -> FluxStress {
        let t = c.t;
        let f = self.coupling(t);
        let mu = self.mu(t);
        let pairs: Vec<(f64, f64)> = (1..=c.cutoff)
            .into_par_iter()
            .map(|n| {
                let s = self.table.spinor(n, t);
                let d = self.table.dispersion(n);
                // v' = i(ωv + f(u+v)), so conj(v)' = −i(ω v̄ + f(ū+v̄))
                let dvc = Complex64::new(0.0, -1.0) * (d.omega * s.v.conj() + f * (s.u + s.v).conj());
                let flux = |k: f64| (Complex64::new(0.0, k) * s.v * (dvc - Complex64::new(0.0, mu) * s.v.conj())).re;
                let mom = |k: f64| -k * s.v.norm_sqr();
                (flux(d.k) + flux(-d.k), mom(d.k) + mom(-d.k))
            })
            .collect();
        let mut s_chi = CompensatedSum::new();
        let mut p = CompensatedSum::new();
        for (s, m) in pairs {
            s_chi.add(s);
            p.add(m);
        }
        FluxStress {
            s_chi: s_chi.value(),
            // every term of S_ζ carries ∂_xφ₀ or ∂_xζ, both zero for a uniform ring
            s_zeta: 0.0,
            theta_chi: -c.grad,
            theta_zeta: -0.5 * f * c.g2(),
            momentum_density: p.value(),
        }
    }

    /// Mode time part, exposed for residual checks.
    pub fn spinor(&self, n: usize, t: f64) -> NambuSpinor {
        self.table.spinor(n, t)
    }
}

fn reduce(t: f64, terms: &[ModeTerm], rel_tol: f64) -> CorrelatorSet {
    let mut dep = CompensatedSum::new();
    let mut anom = ComplexCompensatedSum::new();
    let mut grad = CompensatedSum::new();
    for term in terms {
        dep.add(term.dep);
        anom.add(term.anom);
        grad.add(term.grad);
    }
    let cutoff = terms.len() - 1;
    let tails = ChannelTails {
        n_dep: tail_estimate(terms.iter().map(|m| m.dep.abs()), cutoff),
        anom: tail_estimate(terms.iter().map(|m| m.anom.norm()), cutoff),
        grad: tail_estimate(terms.iter().map(|m| m.grad.abs()), cutoff),
    };
    let (n_dep, anom, grad) = (dep.value(), anom.value(), grad.value());
    let converged = tails.n_dep <= 10.0 * rel_tol * n_dep.abs()
        && tails.anom <= 10.0 * rel_tol * anom.norm()
        && tails.grad <= 10.0 * rel_tol * grad.abs();
    CorrelatorSet {
        t,
        n_dep,
        anom,
        grad,
        tails,
        cutoff,
        converged,
    }
}

/// Fits `C n^{−p}` to block averages of `|term_n|` over the last decade
/// `[N/10, N]` and returns `∫_N^∞ C n^{−p} dn`. Infinite when `p ≤ 1`.
pub(crate) fn tail_estimate(magnitudes: impl Iterator<Item = f64>, cutoff: usize) -> f64 {
    let mags: Vec<f64> = magnitudes.collect();
    let lo = (cutoff / 10).max(1);
    if cutoff < 20 {
        // too few modes for a fit; fall back to the last term times the count
        return mags.last().copied().unwrap_or(0.0) * cutoff as f64;
    }
    let (llo, lhi) = ((lo as f64).ln(), ((cutoff + 1) as f64).ln());
    let mut xs = Vec::with_capacity(TAIL_BLOCKS);
    let mut ys = Vec::with_capacity(TAIL_BLOCKS);
    let mut all_zero = true;
    for b in 0..TAIL_BLOCKS {
        let a = (llo + (lhi - llo) * b as f64 / TAIL_BLOCKS as f64).exp().round() as usize;
        let z = (llo + (lhi - llo) * (b + 1) as f64 / TAIL_BLOCKS as f64).exp().round() as usize;
        let (a, z) = (a.max(lo), z.min(cutoff + 1));
        if z <= a {
            continue;
        }
        let block = &mags[a..z];
        let mean = block.iter().sum::<f64>() / block.len() as f64;
        if mean > 0.0 {
            all_zero = false;
            // geometric centre of the block
            xs.push((((a as f64) * ((z - 1) as f64).max(a as f64)).sqrt()).ln());
            ys.push(mean.ln());
        }
    }
    if all_zero {
        return 0.0;
    }
    if xs.len() < 3 {
        return f64::INFINITY;
    }
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let p = -slope;
    if !(p > 1.0) {
        return f64::INFINITY;
    }
    let n = cutoff as f64 + 0.5;
    intercept.exp() * n.powf(1.0 - p) / (p - 1.0)
}

/// One-shot correlators; builds the mode table internally.
pub fn correlators(t: f64, params: &PhysicalParams, vacuum: VacuumChoice) -> Result<CorrelatorSet> {
    Ok(Ensemble::new(params, vacuum)?.correlators(t))
}

pub fn depletion(t: f64, params: &PhysicalParams, vacuum: VacuumChoice) -> Result<f64> {
    Ok(Ensemble::new(params, vacuum)?.depletion(t))
}

pub fn density_variance(t: f64, params: &PhysicalParams, vacuum: VacuumChoice) -> Result<f64> {
    Ok(Ensemble::new(params, vacuum)?.density_variance(t))
}

pub fn energies(t: f64, params: &PhysicalParams, vacuum: VacuumChoice) -> Result<EnergyBreakdown> {
    Ok(Ensemble::new(params, vacuum)?.energies(t))
}

pub fn power_zeta(t: f64, params: &PhysicalParams, vacuum: VacuumChoice) -> Result<f64> {
    Ok(Ensemble::new(params, vacuum)?.power_zeta(t))
}

pub fn fluxes_and_stress(
    t: f64,
    params: &PhysicalParams,
    vacuum: VacuumChoice,
) -> Result<FluxStress> {
    Ok(Ensemble::new(params, vacuum)?.fluxes_and_stress(t))
}
