//! The normal-form engine: formal series f and g and the isochronous
//! constants p'_m, q'_m of a complexified 3D system, computed degree by
//! degree over exact symbolic scalars.
//!
//! For the series f(z, w, u) = z + Σ c_{αβγ} z^α w^β u^γ the defining
//! identity is
//!
//! ```text
//! df/dT − f = z · Σ_{m≥1} p'_m (zw)^m
//! ```
//!
//! and at each non-resonant monomial the homological equation gives
//! c_{αβγ} = −R/(α−β−1+i·d·γ) where R collects already-known lower-order
//! data; the resonant monomials z^{m+1}w^m carry no c (normalized to zero)
//! and define p'_m = R instead. The series g(w, z, u) = w + Σ e_{αβγ}
//! w^α z^β u^γ mirrors this with
//!
//! ```text
//! dg/dT + g = w · Σ_{m≥1} q'_m (zw)^m
//! ```
//!
//! (sign convention fixed by the worked quadratic examples; see README).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::error::{ArithError, UsageError};
use crate::gauss::GaussianRational;
use crate::params::ParamSet;
use crate::poly::ParamPoly;
use crate::scalar::Scalar;
use crate::series::{Key, TriPoly};
use crate::sysmodel::{named_substitution, ComplexSystemSpec, TermMap};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(
        "degenerate divisor at monomial ({0}, {1}, {2}): \
         the nonzero declaration of d does not hold"
    )]
    Degenerate(u32, u32, u32),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Usage(#[from] UsageError),
}

/// One of the two normal-form series.
///
/// For the f-series, keys are (z-exp, w-exp, u-exp); for the g-series they
/// are (w-exp, z-exp, u-exp), matching the roles of the two leading
/// variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub coeffs: BTreeMap<Key, Scalar>,
    pub truncation_degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub series: PhaseSeries,
    /// Resonant monomials whose coefficient was normalized to zero.
    pub normalization_witness: Vec<Key>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRecord {
    pub m: u32,
    pub p: Scalar,
    pub q: Scalar,
    /// τ'_m = p'_m + q'_m.
    pub tau: Scalar,
    /// μ'_m = p'_m − q'_m; not a singular point quantity in general.
    pub mu: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    pub records: Vec<ConstantRecord>,
    /// Human-readable record of the substitution chain applied first.
    pub reduced_under: Vec<String>,
    pub caveat: String,
}

pub const REPORT_CAVEAT: &str = "tau'_m and mu'_m equal the true period quantities tau_m, \
     mu_m only when p'_1 = q'_1 = ... = p'_{m-1} = q'_{m-1} = 0 on this (possibly reduced) \
     system; mu'_m is not a singular point quantity in general.";

enum Target {
    F,
    G,
}

/// Compute the f-series and p'_1 … p'_M.
pub fn compute_f(
    spec: &ComplexSystemSpec,
    m_max: u32,
) -> Result<(CoefficientTable, Vec<Scalar>), EngineError> {
    solve(spec, m_max, Target::F)
}

/// Compute the g-series and q'_1 … q'_M.
pub fn compute_g(
    spec: &ComplexSystemSpec,
    m_max: u32,
) -> Result<(CoefficientTable, Vec<Scalar>), EngineError> {
    solve(spec, m_max, Target::G)
}

fn swap_keys(m: &TermMap) -> TermMap {
    m.iter().map(|(&(k, j, l), c)| ((j, k, l), c.clone())).collect()
}

/// The shared recursion. Both series are solved in "leading variable first"
/// coordinates: for f that is (z, w, u) directly; for g, (w, z, u), with the
/// right-hand-side maps key-swapped to match. The divisor for g flips the
/// sign of its real part.
fn solve(
    spec: &ComplexSystemSpec,
    m_max: u32,
    target: Target,
) -> Result<(CoefficientTable, Vec<Scalar>), EngineError> {
    assert!(m_max >= 1, "order must be at least 1");
    let params = &spec.params;
    let trunc = 2 * m_max + 1;
    let (first, second, third, sign) = match target {
        Target::F => (spec.z_terms.clone(), spec.w_terms.clone(), spec.u_terms.clone(), 1i64),
        Target::G => (
            swap_keys(&spec.w_terms),
            swap_keys(&spec.z_terms),
            swap_keys(&spec.u_terms),
            -1i64,
        ),
    };
    let i_d = spec.d.mul(&Scalar::i(params));

    let mut coeffs: BTreeMap<Key, Scalar> = BTreeMap::new();
    coeffs.insert((1, 0, 0), Scalar::one(params));
    let mut witness = Vec::new();
    let mut constants = Vec::with_capacity(m_max as usize);
    // r[key] accumulates the known lower-order contributions to the residual
    // coefficient at `key`
    let mut r: BTreeMap<Key, Scalar> = BTreeMap::new();

    let push = |r: &mut BTreeMap<Key, Scalar>, (a, b, g): Key, cv: &Scalar| {
        let mut acc = |key: Key, contrib: Scalar| {
            if key.0 + key.1 + key.2 > trunc || contrib.is_zero() {
                return;
            }
            match r.remove(&key) {
                Some(prev) => {
                    let sum = prev.add(&contrib);
                    if !sum.is_zero() {
                        r.insert(key, sum);
                    }
                }
                None => {
                    r.insert(key, contrib);
                }
            }
        };
        if a >= 1 {
            let fac = cv.scale(&GaussianRational::from_int(a as i64));
            for (&(k, j, l), tc) in &first {
                acc((a - 1 + k, b + j, g + l), fac.mul(tc));
            }
        }
        if b >= 1 {
            let fac = cv.scale(&GaussianRational::from_int(b as i64));
            for (&(k, j, l), tc) in &second {
                acc((a + k, b - 1 + j, g + l), fac.mul(tc));
            }
        }
        if g >= 1 {
            let fac = cv.scale(&GaussianRational::from_int(g as i64));
            for (&(k, j, l), tc) in &third {
                acc((a + k, b + j, g - 1 + l), fac.mul(tc));
            }
        }
    };
    push(&mut r, (1, 0, 0), &Scalar::one(params));

    for n in 2..=trunc {
        for a in (0..=n).rev() {
            for b in 0..=(n - a) {
                let g = n - a - b;
                let key = (a, b, g);
                let nl = match r.remove(&key) {
                    Some(v) => v,
                    None => {
                        if !(g == 0 && a == b + 1) {
                            continue; // coefficient is zero, contributes nothing
                        }
                        Scalar::zero(params)
                    }
                };
                if g == 0 && a == b + 1 {
                    // resonant monomial: coefficient normalized to zero,
                    // residual becomes the m-th constant (m = b)
                    witness.push(key);
                    constants.push(nl);
                    continue;
                }
                let divisor = Scalar::from_int(params, sign * (a as i64 - b as i64 - 1))
                    .add(&i_d.scale(&GaussianRational::from_int(g as i64)));
                if divisor.is_zero() {
                    return Err(EngineError::Degenerate(a, b, g));
                }
                let c = nl.div(&divisor)?.neg();
                if !c.is_zero() {
                    push(&mut r, key, &c);
                    coeffs.insert(key, c);
                }
            }
        }
    }
    debug_assert_eq!(constants.len(), m_max as usize);
    Ok((
        CoefficientTable {
            series: PhaseSeries {
                coeffs,
                truncation_degree: trunc,
            },
            normalization_witness: witness,
        },
        constants,
    ))
}

/// Apply an ordered chain of named substitutions to a complex spec.
pub fn apply_subs_chain(
    spec: &ComplexSystemSpec,
    chain: &[Vec<(String, String)>],
) -> Result<(ComplexSystemSpec, Vec<String>), EngineError> {
    let mut current = spec.clone();
    let mut log = Vec::new();
    for step in chain {
        let (targets, values) = named_substitution(&current.params, step)?;
        for (name, expr) in step {
            log.push(format!("{name} -> {expr}"));
        }
        current = current.substitute_params(&targets, &values)?;
    }
    Ok((current, log))
}

/// Run both series on the (optionally reduced) spec and assemble the report.
pub fn constants_report(
    spec: &ComplexSystemSpec,
    m_max: u32,
    chain: &[Vec<(String, String)>],
) -> Result<ConstantsReport, EngineError> {
    let (reduced, log) = apply_subs_chain(spec, chain)?;
    let (_, ps) = compute_f(&reduced, m_max)?;
    let (_, qs) = compute_g(&reduced, m_max)?;
    let records = ps
        .into_iter()
        .zip(qs)
        .enumerate()
        .map(|(idx, (p, q))| ConstantRecord {
            m: idx as u32 + 1,
            tau: p.add(&q),
            mu: p.sub(&q),
            p,
            q,
        })
        .collect();
    Ok(ConstantsReport {
        records,
        reduced_under: log,
        caveat: REPORT_CAVEAT.to_string(),
    })
}

/// Per-order real polynomial conditions equivalent to p'_m = q'_m = 0 on the
/// real parameter domain: real and imaginary parts of the numerators, with
/// declared-nonzero single-parameter factors removed and duplicates (up to
/// sign) merged.
pub fn vanishing_conditions(
    report: &ConstantsReport,
    params: &ParamSet,
) -> Result<Vec<(u32, Vec<ParamPoly>)>, UsageError> {
    let mut out = Vec::new();
    for rec in &report.records {
        let mut conditions: Vec<ParamPoly> = Vec::new();
        for s in [&rec.p, &rec.q] {
            let (re, im) = s.real_imag_split()?;
            for part in [re, im] {
                if part.is_zero() {
                    continue;
                }
                let cleaned = strip_nonzero_factors(part, params).canonical();
                if cleaned.is_constant() {
                    // a nonzero constant condition cannot vanish; keep it so
                    // the caller sees the inconsistency
                    conditions.push(cleaned);
                    continue;
                }
                if !conditions.contains(&cleaned) {
                    conditions.push(cleaned);
                }
            }
        }
        out.push((rec.m, conditions));
    }
    Ok(out)
}

fn strip_nonzero_factors(mut p: ParamPoly, params: &ParamSet) -> ParamPoly {
    for v in 0..params.len() {
        if !params.descriptor(v).declared_nonzero {
            continue;
        }
        let factor = ParamPoly::param(params, v);
        while let Some(q) = p.exact_div(&factor) {
            p = q;
        }
    }
    p
}

/// The f-series defining identity, as a series that must be identically
/// zero through the truncation degree:
/// ∂f/∂z·Ż + ∂f/∂w·ẇ + ∂f/∂u·u̇ − f − z·Σ p'_m (zw)^m.
pub fn residual_f(
    spec: &ComplexSystemSpec,
    table: &CoefficientTable,
    constants: &[Scalar],
) -> TriPoly {
    let params = &spec.params;
    let trunc = table.series.truncation_degree;
    let f = TriPoly::from_terms(
        params,
        table.series.coeffs.iter().map(|(&k, c)| (k, c.clone())),
    );
    let (fz, fw, fu) = spec.rhs();
    let mut res = f
        .diff(0)
        .mul_truncated(&fz, trunc)
        .add(&f.diff(1).mul_truncated(&fw, trunc))
        .add(&f.diff(2).mul_truncated(&fu, trunc))
        .sub(&f);
    for (idx, p) in constants.iter().enumerate() {
        let m = idx as u32 + 1;
        res.accumulate((m + 1, m, 0), &p.neg());
    }
    res.truncated(trunc)
}

/// The g-series defining identity (zero series):
/// ∂g/∂z·Ż + ∂g/∂w·ẇ + ∂g/∂u·u̇ + g − w·Σ q'_m (zw)^m.
pub fn residual_g(
    spec: &ComplexSystemSpec,
    table: &CoefficientTable,
    constants: &[Scalar],
) -> TriPoly {
    let params = &spec.params;
    let trunc = table.series.truncation_degree;
    // the g-table is keyed (w-exp, z-exp, u-exp); swap into (z, w, u)
    let g = TriPoly::from_terms(
        params,
        table
            .series
            .coeffs
            .iter()
            .map(|(&(a, b, c), v)| ((b, a, c), v.clone())),
    );
    let (fz, fw, fu) = spec.rhs();
    let mut res = g
        .diff(0)
        .mul_truncated(&fz, trunc)
        .add(&g.diff(1).mul_truncated(&fw, trunc))
        .add(&g.diff(2).mul_truncated(&fu, trunc))
        .add(&g);
    for (idx, q) in constants.iter().enumerate() {
        let m = idx as u32 + 1;
        res.accumulate((m, m + 1, 0), &q.neg());
    }
    res.truncated(trunc)
}
