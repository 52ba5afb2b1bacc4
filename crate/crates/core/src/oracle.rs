//! Brute-force validators: classical RK4 integration of the mode equation and
//! of the condensate-correction equation, refined by step halving until the
//! Richardson error estimate meets the requested tolerance.
//!
//! The mesh always has nodes at `t = 0` and `t = τ_s`, where the coupling
//! has kinks.

use crate::error::{Error, Result};
use crate::model::{coupling_fraction, Dispersion, PhysicalParams};
use crate::spinor::NambuSpinor;
use num_complex::Complex64;
use std::collections::HashMap;

/// Initial step is `INITIAL_STEP / (1 + Ω)`.
const INITIAL_STEP: f64 = 0.05;
const MAX_STEPS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub values: Vec<T>,
    /// Richardson estimate of the largest error relative to the largest value.
    pub error_estimate: f64,
}

impl<T: Copy> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, T)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, T)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Value at a mesh node, if `t` is one.
    pub fn at_node(&self, t: f64) -> Option<T> {
        let i = self.times.binary_search_by(|s| s.total_cmp(&t)).ok()?;
        Some(self.values[i])
    }
}

/// Mesh of `[0, t_end]` with `steps` uniform steps per segment, the segments
/// being split at `τ_s` when it lies inside.
fn mesh(t_end: f64, tau_s: f64, steps: usize) -> Vec<f64> {
    let mut bounds = vec![0.0];
    if tau_s > 0.0 && tau_s < t_end {
        bounds.push(tau_s);
    }
    bounds.push(t_end);
    let mut out = vec![0.0];
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / steps as f64;
        for i in 1..steps {
            out.push(a + i as f64 * h);
        }
        out.push(b);
    }
    out
}

fn rk4_path<const N: usize>(
    times: &[f64],
    y0: [f64; N],
    rhs: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
) -> Vec<[f64; N]> {
    let axpy = |y: &[f64; N], a: f64, k: &[f64; N]| {
        let mut out = *y;
        for i in 0..N {
            out[i] += a * k[i];
        }
        out
    };
    let mut ys = Vec::with_capacity(times.len());
    let mut y = y0;
    ys.push(y);
    for w in times.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let mid = t + 0.5 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(mid, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(mid, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(w[1], &axpy(&y, h, &k3));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        ys.push(y);
    }
    ys
}

fn max_abs<const N: usize>(ys: &[[f64; N]]) -> f64 {
    ys.iter()
        .flat_map(|y| y.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Refines by step halving until `max|y_2N − y_N|/15 ≤ tol·max|y|` on the
/// shared nodes.
fn integrate_refined<const N: usize>(
    t_end: f64,
    tau_s: f64,
    initial_steps: usize,
    y0: [f64; N],
    tol: f64,
    rhs: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
) -> Result<Trajectory<[f64; N]>> {
    let mut steps = initial_steps.max(1);
    let mut coarse_t = mesh(t_end, tau_s, steps);
    let mut coarse = rk4_path(&coarse_t, y0, rhs);
    loop {
        if coarse_t.len() * 2 > MAX_STEPS {
            return Err(Error::Integration(format!(
                "step halving did not reach tolerance {tol:e} within {MAX_STEPS} steps"
            )));
        }
        steps *= 2;
        let fine_t = mesh(t_end, tau_s, steps);
        let fine = rk4_path(&fine_t, y0, rhs);
        let mut diff = 0.0f64;
        for (i, yc) in coarse.iter().enumerate() {
            let yf = &fine[2 * i];
            debug_assert_eq!(coarse_t[i], fine_t[2 * i]);
            for k in 0..N {
                diff = diff.max((yf[k] - yc[k]).abs());
            }
        }
        let scale = max_abs(&fine).max(f64::MIN_POSITIVE);
        let estimate = diff / 15.0 / scale;
        if !estimate.is_finite() {
            return Err(Error::Integration("non-finite values in trajectory".into()));
        }
        if estimate <= tol {
            return Ok(Trajectory {
                times: fine_t,
                values: fine,
                error_estimate: estimate,
            });
        }
        coarse_t = fine_t;
        coarse = fine;
    }
}

fn bdg_rhs(omega: f64, tau_s: f64) -> impl FnMut(f64, &[f64; 4]) -> [f64; 4] {
    move |t, y| {
        let f = coupling_fraction(t, tau_s);
        // u' = −i(ωu + f(u+v)),  v' = i(ωv + f(u+v))
        let (ur, ui, vr, vi) = (y[0], y[1], y[2], y[3]);
        let ar = omega * ur + f * (ur + vr);
        let ai = omega * ui + f * (ui + vi);
        let br = omega * vr + f * (ur + vr);
        let bi = omega * vi + f * (ui + vi);
        [ai, -ar, -bi, br]
    }
}

fn to_spinor(y: &[f64; 4]) -> NambuSpinor {
    NambuSpinor::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
}

fn check_span(t_end: f64, tol: f64) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParam {
            name: "t_end",
            reason: format!("must be finite and > 0, got {t_end}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam {
            name: "step_tol",
            reason: format!("must be > 0, got {tol}"),
        });
    }
    Ok(())
}

/// Integrates mode `n` of `iσ₃Φ' = ωΦ + (g/g₀)(1+σ₁)Φ` from `(1, 0)/√ℓ` at `t = 0`.
pub fn integrate_bdg(
    n: i64,
    t_end: f64,
    params: &PhysicalParams,
    step_tol: f64,
) -> Result<Trajectory<NambuSpinor>> {
    params.validate()?;
    check_span(t_end, step_tol)?;
    let d = Dispersion::new(n, params.ell);
    let y0 = [1.0 / params.ell.sqrt(), 0.0, 0.0, 0.0];
    let per_segment = ((t_end * (1.0 + d.big_omega + 1.0) / INITIAL_STEP).ceil() as usize).max(4);
    let traj = integrate_refined(
        t_end,
        params.tau_s,
        per_segment,
        y0,
        step_tol,
        &mut bdg_rhs(d.omega, params.tau_s),
    )?;
    Ok(Trajectory {
        times: traj.times,
        values: traj.values.iter().map(to_spinor).collect(),
        error_estimate: traj.error_estimate,
    })
}

/// Single pass with a fixed number of uniform steps per segment.
pub fn integrate_bdg_with_steps(
    n: i64,
    t_end: f64,
    params: &PhysicalParams,
    steps: usize,
) -> Result<Trajectory<NambuSpinor>> {
    params.validate()?;
    check_span(t_end, 1.0)?;
    let d = Dispersion::new(n, params.ell);
    let times = mesh(t_end, params.tau_s, steps.max(1));
    let y0 = [1.0 / params.ell.sqrt(), 0.0, 0.0, 0.0];
    let ys = rk4_path(&times, y0, &mut bdg_rhs(d.omega, params.tau_s));
    Ok(Trajectory {
        times,
        values: ys.iter().map(to_spinor).collect(),
        error_estimate: f64::NAN,
    })
}

/// Vacuum sources of the correction equation at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaSource {
    /// Depletion `⟨ψ†ψ⟩`.
    pub n_dep: f64,
    /// Anomalous average `⟨ψ²⟩`.
    pub anom: Complex64,
}

/// Right-hand side `w'` of the co-rotating correction equation
/// `i w' = f(w + w*) + 2f(2ρ_χ + ⟨ψ²⟩)`.
pub fn zeta_rhs(f: f64, w: Complex64, src: &ZetaSource) -> Complex64 {
    let drive = f * 2.0 * w.re + 2.0 * f * (2.0 * src.n_dep + src.anom);
    Complex64::new(0.0, -1.0) * drive
}

/// Integrates the condensate correction in the co-rotating variable `w`,
/// `ζ = e^{−iΘ(t)} w / (2√ρ₀)` with `Θ' = μ(t)`, from `w(0) = 0`.
///
/// With this scaling `ρ_ζ = Re w`. Substituting into the correction equation
/// and using `μ = V + gρ₀` removes the chemical-potential phase and all
/// explicit `ρ₀`, leaving `i w' = f(w + w*) + 2f(2ρ_χ + ⟨ψ²⟩)`. Its real part
/// is `(Re w)' = 2f Im⟨ψ²⟩ = −ρ_χ'`, and `(Im w)' = −f Ĝ²`.
///
/// `source` must return the depletion and anomalous average at any
/// `t ∈ [0, t_end]`; it is called once per distinct stage time.
pub fn integrate_zeta(
    t_end: f64,
    params: &PhysicalParams,
    mut source: impl FnMut(f64) -> ZetaSource,
    step_tol: f64,
) -> Result<Trajectory<Complex64>> {
    params.validate()?;
    check_span(t_end, step_tol)?;
    let tau = params.tau_s;
    let mut cache: HashMap<u64, ZetaSource> = HashMap::new();
    let mut rhs = |t: f64, y: &[f64; 2]| {
        let src = *cache.entry(t.to_bits()).or_insert_with(|| source(t));
        let dw = zeta_rhs(coupling_fraction(t, tau), Complex64::new(y[0], y[1]), &src);
        [dw.re, dw.im]
    };
    let initial = ((t_end / INITIAL_STEP).ceil() as usize).max(4);
    let traj = integrate_refined(t_end, tau, initial, [0.0, 0.0], step_tol, &mut rhs)?;
    Ok(Trajectory {
        times: traj.times,
        values: traj
            .values
            .iter()
            .map(|y| Complex64::new(y[0], y[1]))
            .collect(),
        error_estimate: traj.error_estimate,
    })
}
