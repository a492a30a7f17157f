//! Floating-point verification: integrate the real 3D system, measure
//! Poincaré return times on the section {y = 0, x > 0}, and test
//! isochronicity claims empirically. Verdicts are evidence, not proof.

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::error::ArithError;
use crate::gauss::GaussianRational;
use crate::manifold::ManifoldApprox;
use crate::sysmodel::RealSystemSpec;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("parameter assignment is not real: {0}")]
    NonRealParameter(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("state became non-finite at t = {0} (divergence)")]
    Divergence(f64),
    #[error("no section crossing within the time budget ({0} time units)")]
    NonOscillatory(f64),
}

/// A polynomial vector field compiled to f64 term lists.
#[derive(Debug, Clone)]
pub struct NumSystem {
    fx: Vec<(u32, u32, u32, f64)>,
    fy: Vec<(u32, u32, u32, f64)>,
    fu: Vec<(u32, u32, u32, f64)>,
    /// σ of the underlying real spec; fixes the section crossing direction.
    pub orientation: i8,
    /// Complex manifold coefficients h_ab for on-manifold initialization,
    /// evaluated at the same parameter point.
    manifold: Vec<(u32, u32, f64, f64)>,
}

fn to_real_f64(v: &GaussianRational, what: &str) -> Result<f64, NumError> {
    if !v.im.is_zero() {
        return Err(NumError::NonRealParameter(format!("{what} = {v}")));
    }
    Ok(v.re.to_f64().expect("finite rational"))
}

impl NumSystem {
    /// Compile a real spec at an exact numeric parameter assignment.
    pub fn new(spec: &RealSystemSpec, values: &[GaussianRational]) -> Result<NumSystem, NumError> {
        for (i, v) in values.iter().enumerate() {
            if !v.im.is_zero() {
                return Err(NumError::NonRealParameter(format!(
                    "{} = {v}",
                    spec.params.name(i)
                )));
            }
        }
        let compile = |terms: &crate::sysmodel::TermMap| -> Result<Vec<(u32, u32, u32, f64)>, NumError> {
            let mut out = Vec::with_capacity(terms.len() + 1);
            for (&(k, j, l), c) in terms {
                let v = c.eval(values)?;
                out.push((k, j, l, to_real_f64(&v, "coefficient")?));
            }
            Ok(out)
        };
        let sigma = spec.orientation as f64;
        let d = to_real_f64(&spec.d.eval(values)?, "d")?;
        let mut fx = compile(&spec.x_terms)?;
        fx.push((0, 1, 0, -sigma));
        let mut fy = compile(&spec.y_terms)?;
        fy.push((1, 0, 0, sigma));
        let mut fu = compile(&spec.u_terms)?;
        fu.push((0, 0, 1, -d));
        Ok(NumSystem {
            fx,
            fy,
            fu,
            orientation: spec.orientation,
            manifold: Vec::new(),
        })
    }

    /// Attach a center-manifold approximation (complex coordinates) for
    /// `initial_state_on_manifold`.
    pub fn with_manifold(
        mut self,
        h: &ManifoldApprox,
        values: &[GaussianRational],
    ) -> Result<NumSystem, NumError> {
        let mut out = Vec::with_capacity(h.coeffs.len());
        for (&(a, b), c) in &h.coeffs {
            let v = c.eval(values)?;
            out.push((
                a,
                b,
                v.re.to_f64().expect("finite"),
                v.im.to_f64().expect("finite"),
            ));
        }
        self.manifold = out;
        Ok(self)
    }

    pub fn eval(&self, s: [f64; 3]) -> [f64; 3] {
        let each = |terms: &[(u32, u32, u32, f64)]| -> f64 {
            terms
                .iter()
                .map(|&(k, j, l, c)| c * s[0].powi(k as i32) * s[1].powi(j as i32) * s[2].powi(l as i32))
                .sum()
        };
        [each(&self.fx), each(&self.fy), each(&self.fu)]
    }

    /// u = h(x, y) on the attached manifold (0.0 when none is attached).
    pub fn manifold_height(&self, x: f64, y: f64) -> f64 {
        // h(z, w) at z = x + iy, w = conj(z); the sum is real for a
        // reality-respecting manifold, keep the real part
        let mut re_acc = 0.0;
        for &(a, b, hre, him) in &self.manifold {
            let (zr, zi) = cpow(x, y, a);
            let (wr, wi) = cpow(x, -y, b);
            let (mr, mi) = (zr * wr - zi * wi, zr * wi + zi * wr);
            re_acc += hre * mr - him * mi;
        }
        re_acc
    }

    /// Initial state at amplitude `a` on the section, lifted to the manifold
    /// when one is attached.
    pub fn initial_state_on_manifold(&self, a: f64) -> [f64; 3] {
        [a, 0.0, self.manifold_height(a, 0.0)]
    }
}

fn cpow(mut br: f64, mut bi: f64, mut e: u32) -> (f64, f64) {
    let (mut ar, mut ai) = (1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            let nr = ar * br - ai * bi;
            ai = ar * bi + ai * br;
            ar = nr;
        }
        let nr = br * br - bi * bi;
        bi = 2.0 * br * bi;
        br = nr;
        e >>= 1;
    }
    (ar, ai)
}

// Dormand–Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
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
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    sys: &'a NumSystem,
    tol: f64,
}

impl Stepper<'_> {
    /// One accepted adaptive step from (t, s); returns (t_new, s_new,
    /// h_next_suggestion, derivative at t).
    fn step(
        &self,
        t: f64,
        s: [f64; 3],
        h_try: f64,
    ) -> Result<(f64, [f64; 3], f64, [f64; 3]), NumError> {
        let mut h = h_try;
        let k0 = self.sys.eval(s);
        for _ in 0..60 {
            if h < 1e-14 {
                return Err(NumError::StepUnderflow(t));
            }
            let mut k = [[0.0f64; 3]; 7];
            k[0] = k0;
            for stage in 0..6 {
                let mut y = s;
                for (i, ki) in k.iter().enumerate().take(stage + 1) {
                    for c in 0..3 {
                        y[c] += h * A[stage][i] * ki[c];
                    }
                }
                k[stage + 1] = self.sys.eval(y);
            }
            let mut y5 = s;
            let mut y4 = s;
            for (i, ki) in k.iter().enumerate() {
                for c in 0..3 {
                    y5[c] += h * B5[i] * ki[c];
                    y4[c] += h * B4[i] * ki[c];
                }
            }
            if y5.iter().any(|v| !v.is_finite()) {
                return Err(NumError::Divergence(t));
            }
            let mut err: f64 = 0.0;
            for c in 0..3 {
                let sc = self.tol + self.tol * s[c].abs().max(y5[c].abs());
                err = err.max(((y5[c] - y4[c]) / sc).abs());
            }
            if err <= 1.0 {
                let grow = (0.9 * err.max(1e-10).powf(-0.2)).min(5.0);
                return Ok((t + h, y5, h * grow, k0));
            }
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
        Err(NumError::StepUnderflow(t))
    }
}

/// Integrate from `s0` to `t_end`; returns the accepted-step trajectory
/// including both endpoints (the final step is shortened to land exactly).
pub fn integrate(
    sys: &NumSystem,
    s0: [f64; 3],
    t_end: f64,
    tol: f64,
) -> Result<Vec<(f64, [f64; 3])>, NumError> {
    assert!((1e-13..=1e-6).contains(&tol), "tol out of supported range");
    let stepper = Stepper { sys, tol };
    let mut out = vec![(0.0, s0)];
    let mut t = 0.0;
    let mut s = s0;
    let mut h = (t_end / 100.0).min(1e-2).max(1e-6);
    while t < t_end {
        let h_try = h.min(t_end - t);
        let (tn, sn, hn, _) = stepper.step(t, s, h_try)?;
        t = tn;
        s = sn;
        h = hn;
        out.push((t, s));
        if out.len() > 50_000_000 {
            return Err(NumError::StepUnderflow(t));
        }
    }
    Ok(out)
}

/// Integrate from a known state to an exact target time (used by the
/// crossing refinement; assumes the interval is short).
fn state_at(sys: &NumSystem, s0: [f64; 3], dt: f64, tol: f64) -> Result<[f64; 3], NumError> {
    if dt == 0.0 {
        return Ok(s0);
    }
    let stepper = Stepper { sys, tol };
    let mut t = 0.0;
    let mut s = s0;
    let mut h = dt;
    while t < dt {
        let (tn, sn, hn, _) = stepper.step(t, s, h.min(dt - t))?;
        t = tn;
        s = sn;
        h = hn;
    }
    Ok(s)
}

/// Successive crossing times of the half-plane {y = 0, x > 0}, taken in the
/// direction sign(dy/dt) = σ, refined to |y| ≤ 1e−12.
pub fn poincare_periods(
    sys: &NumSystem,
    s0: [f64; 3],
    n_returns: usize,
    tol: f64,
) -> Result<Vec<f64>, NumError> {
    assert!(n_returns >= 1);
    let sigma = sys.orientation as f64;
    let budget = 2.0 * std::f64::consts::PI * (n_returns as f64 + 2.0) * 2.0;
    let stepper = Stepper { sys, tol };
    let mut crossings = Vec::with_capacity(n_returns);
    let mut t = 0.0;
    let mut s = s0;
    let mut h = 1e-3;
    let mut last_crossing = f64::NEG_INFINITY;
    while crossings.len() < n_returns {
        if t > budget {
            return Err(NumError::NonOscillatory(budget));
        }
        let (tn, sn, hn, ds) = stepper.step(t, s, h)?;
        // direction-consistent sign change of y over the step, away from the
        // crossing just found
        let crossed = s[1] * sn[1] < 0.0
            && ds[1] * sigma > 0.0
            && sn[0] > 0.0
            && t - last_crossing > 0.1;
        if crossed {
            // bisection on the step by re-integration from the step start
            let (mut lo, mut hi) = (0.0, tn - t);
            let mut t_cross = tn;
            let mut y_cross = sn[1];
            for _ in 0..80 {
                if y_cross.abs() <= 1e-12 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let sm = state_at(sys, s, mid, tol)?;
                if (sm[1] > 0.0) == (sn[1] > 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                t_cross = t + mid;
                y_cross = sm[1];
            }
            let sc = state_at(sys, s, t_cross - t, tol)?;
            debug_assert!(sc[1].abs() <= 1e-10);
            if sc[0] > 0.0 {
                crossings.push(t_cross);
                last_crossing = t_cross;
            }
        }
        t = tn;
        s = sn;
        h = hn;
    }
    Ok(crossings)
}

#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub amplitude: f64,
    pub return_times: Vec<f64>,
    /// Mean gap over the last half of the returns (transients decay first).
    pub mean_period: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Default)]
pub struct PeriodScan {
    pub points: Vec<ScanPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    IsochronousConsistent,
    DeviationDetected,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::IsochronousConsistent => write!(f, "isochronous-consistent"),
            Verdict::DeviationDetected => write!(f, "deviation-detected"),
        }
    }
}

/// Measure periods at one amplitude (start on the section; on the manifold
/// when the system carries one).
pub fn scan_amplitude(
    sys: &NumSystem,
    amplitude: f64,
    n_returns: usize,
    tol: f64,
) -> Result<ScanPoint, NumError> {
    let s0 = sys.initial_state_on_manifold(amplitude);
    let times = poincare_periods(sys, s0, n_returns, tol)?;
    let mut gaps = Vec::with_capacity(times.len().saturating_sub(1));
    let mut prev = 0.0;
    for (i, &t) in times.iter().enumerate() {
        if i > 0 {
            gaps.push(t - prev);
        }
        prev = t;
    }
    let tail = &gaps[gaps.len() / 2..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok(ScanPoint {
        amplitude,
        return_times: times,
        mean_period: mean,
        deviation: (mean - 2.0 * std::f64::consts::PI).abs(),
    })
}

pub fn scan(
    sys: &NumSystem,
    amplitudes: &[f64],
    n_returns: usize,
    tol: f64,
) -> Result<PeriodScan, NumError> {
    let mut points = Vec::with_capacity(amplitudes.len());
    for &a in amplitudes {
        points.push(scan_amplitude(sys, a, n_returns, tol)?);
    }
    Ok(PeriodScan { points })
}

pub fn isochronicity_verdict(scan: &PeriodScan, epsilon: f64) -> Verdict {
    assert!(!scan.points.is_empty(), "empty scan");
    if scan.points.iter().all(|p| p.deviation <= epsilon) {
        Verdict::IsochronousConsistent
    } else {
        Verdict::DeviationDetected
    }
}

/// Least-squares slope of log(deviation) against log(amplitude).
pub fn loglog_slope(scan: &PeriodScan) -> f64 {
    let pts: Vec<(f64, f64)> = scan
        .points
        .iter()
        .map(|p| (p.amplitude.ln(), p.deviation.max(1e-300).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamSet;
    use crate::sysmodel::TermMap;
    use std::f64::consts::PI;

    fn linear_system() -> NumSystem {
        let ps = ParamSet::empty();
        let spec = RealSystemSpec {
            params: ps.clone(),
            d: crate::scalar::Scalar::one(&ps),
            orientation: 1,
            x_terms: TermMap::new(),
            y_terms: TermMap::new(),
            u_terms: TermMap::new(),
            max_degree: 2,
        };
        NumSystem::new(&spec, &[]).unwrap()
    }

    #[test]
    fn linear_rotation_returns_to_start() {
        let sys = linear_system();
        let tol = 1e-12;
        let traj = integrate(&sys, [1.0, 0.0, 0.0], 2.0 * PI, tol).unwrap();
        let (_, end) = traj.last().unwrap();
        let err = ((end[0] - 1.0).powi(2) + end[1].powi(2)).sqrt();
        assert!(err < 10.0 * tol.sqrt() * tol.sqrt().sqrt(), "endpoint error {err}");
        assert!(err < 1e-9, "endpoint error {err}");
    }

    #[test]
    fn halving_tol_reduces_linear_error() {
        let sys = linear_system();
        let mut prev = f64::INFINITY;
        for tol in [1e-7, 1e-9, 1e-11] {
            let traj = integrate(&sys, [1.0, 0.0, 0.0], 2.0 * PI, tol).unwrap();
            let (_, end) = traj.last().unwrap();
            let err = ((end[0] - 1.0).powi(2) + end[1].powi(2)).sqrt();
            assert!(err < prev, "error did not shrink: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn u_component_decays_exponentially() {
        // u̇ = −u decouples in the linear system: u(t) = u0·e^{−t}
        let sys = linear_system();
        let traj = integrate(&sys, [0.1, 0.0, 0.05], 3.0, 1e-12).unwrap();
        let (t, end) = traj.last().unwrap();
        let expect = 0.05 * (-t).exp();
        assert!((end[2] - expect).abs() / expect < 1e-8);
    }

    #[test]
    fn linear_poincare_gaps_are_two_pi() {
        let sys = linear_system();
        let times = poincare_periods(&sys, [1.0, 0.0, 0.0], 5, 1e-12).unwrap();
        assert_eq!(times.len(), 5);
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            let gap = t - prev;
            assert!(
                (gap - 2.0 * PI).abs() < 1e-10,
                "gap {i} = {gap}"
            );
            prev = t;
        }
        let scan = scan(&sys, &[0.5, 1.0], 4, 1e-12).unwrap();
        assert_eq!(isochronicity_verdict(&scan, 1e-8), Verdict::IsochronousConsistent);
    }
}
