//! On-disk JSON formats: system files (input) and report files (output).
//!
//! Expressions stay strings in the expression grammar so exactness survives
//! the round trip. Linear terms are written explicitly in system files and
//! checked against `orientation`/`d` on load, then stripped (the in-memory
//! specs carry nonlinear terms only).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::UsageError;
use crate::expr::{parse_scalar, print_scalar};
use crate::manifold::ManifoldApprox;
use crate::nfengine::ConstantsReport;
use crate::params::{ParamDescriptor, ParamSet};
use crate::scalar::Scalar;
use crate::sysmodel::{ComplexSystemSpec, RealSystemSpec, TermMap};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRec {
    pub k: u32,
    pub j: u32,
    pub l: u32,
    pub c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamRec {
    pub name: String,
    pub real: bool,
    pub nonzero: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct EquationsRec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<Vec<TermRec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dy: Option<Vec<TermRec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dz: Option<Vec<TermRec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dw: Option<Vec<TermRec>>,
    pub du: Vec<TermRec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub name: String,
    /// "real" (x, y, u coordinates, needs `orientation`) or "complex"
    /// (z, w, u, already in the rotated time T).
    pub form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i8>,
    pub parameters: Vec<ParamRec>,
    pub d: String,
    pub equations: EquationsRec,
}

#[derive(Debug, Clone)]
pub enum LoadedSystem {
    Real(RealSystemSpec),
    Complex(ComplexSystemSpec),
}

impl LoadedSystem {
    /// The complex-form spec the engine consumes.
    pub fn complexified(&self) -> ComplexSystemSpec {
        match self {
            LoadedSystem::Real(spec) => spec.complexify(),
            LoadedSystem::Complex(spec) => spec.clone(),
        }
    }

    pub fn params(&self) -> &ParamSet {
        match self {
            LoadedSystem::Real(spec) => &spec.params,
            LoadedSystem::Complex(spec) => &spec.params,
        }
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError { msg: msg.into() }
}

fn parse_terms(
    label: &str,
    recs: &[TermRec],
    params: &ParamSet,
) -> Result<TermMap, UsageError> {
    let mut out = TermMap::new();
    for rec in recs {
        let c = parse_scalar(&rec.c, params)
            .map_err(|e| usage(format!("{label} term ({},{},{}): {e}", rec.k, rec.j, rec.l)))?;
        if out.contains_key(&(rec.k, rec.j, rec.l)) {
            return Err(usage(format!(
                "{label}: duplicate term ({},{},{})",
                rec.k, rec.j, rec.l
            )));
        }
        out.insert((rec.k, rec.j, rec.l), c);
    }
    Ok(out)
}

/// Pop the coefficient at `key`, defaulting to zero when absent.
fn take_linear(terms: &mut TermMap, key: (u32, u32, u32), params: &ParamSet) -> Scalar {
    terms.remove(&key).unwrap_or_else(|| Scalar::zero(params))
}

fn expect_linear(
    label: &str,
    found: &Scalar,
    expected: &Scalar,
) -> Result<(), UsageError> {
    if found != expected {
        return Err(usage(format!(
            "{label}: linear term is {}, expected {}",
            print_scalar(found),
            print_scalar(expected)
        )));
    }
    Ok(())
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<SystemFile, UsageError> {
        serde_json::from_str(text).map_err(|e| usage(format!("malformed system file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Build and validate the in-memory spec: parse every expression, check
    /// the explicit linear terms, strip them, and run the structural
    /// validator.
    pub fn into_system(&self) -> Result<LoadedSystem, UsageError> {
        let params = ParamSet::new(
            self.parameters
                .iter()
                .map(|p| ParamDescriptor::new(&p.name, p.real, p.nonzero))
                .collect(),
        )?;
        let d = parse_scalar(&self.d, &params).map_err(|e| usage(format!("d: {e}")))?;
        let eq = &self.equations;
        let max_degree = |maps: [&TermMap; 3]| -> u32 {
            maps.iter()
                .flat_map(|m| m.keys())
                .map(|&(k, j, l)| k + j + l)
                .max()
                .unwrap_or(2)
                .max(2)
        };
        let loaded = match self.form.as_str() {
            "real" => {
                let sigma = self
                    .orientation
                    .ok_or_else(|| usage("real form requires `orientation`"))?;
                if sigma != 1 && sigma != -1 {
                    return Err(usage(format!("orientation must be +1 or -1, got {sigma}")));
                }
                let (dx, dy) = match (&eq.dx, &eq.dy) {
                    (Some(dx), Some(dy)) => (dx, dy),
                    _ => return Err(usage("real form requires `dx` and `dy` equations")),
                };
                let mut x_terms = parse_terms("dx", dx, &params)?;
                let mut y_terms = parse_terms("dy", dy, &params)?;
                let mut u_terms = parse_terms("du", &eq.du, &params)?;
                let s = Scalar::from_int(&params, sigma as i64);
                expect_linear("dx", &take_linear(&mut x_terms, (0, 1, 0), &params), &s.neg())?;
                expect_linear("dy", &take_linear(&mut y_terms, (1, 0, 0), &params), &s)?;
                expect_linear("du", &take_linear(&mut u_terms, (0, 0, 1), &params), &d.neg())?;
                for terms in [&mut x_terms, &mut y_terms, &mut u_terms] {
                    terms.retain(|_, c| !c.is_zero());
                }
                LoadedSystem::Real(RealSystemSpec {
                    max_degree: max_degree([&x_terms, &y_terms, &u_terms]),
                    params,
                    d,
                    orientation: sigma,
                    x_terms,
                    y_terms,
                    u_terms,
                })
            }
            "complex" => {
                let (dz, dw) = match (&eq.dz, &eq.dw) {
                    (Some(dz), Some(dw)) => (dz, dw),
                    _ => return Err(usage("complex form requires `dz` and `dw` equations")),
                };
                let mut z_terms = parse_terms("dz", dz, &params)?;
                let mut w_terms = parse_terms("dw", dw, &params)?;
                let mut u_terms = parse_terms("du", &eq.du, &params)?;
                let one = Scalar::one(&params);
                let i_d = d.mul(&Scalar::i(&params));
                expect_linear("dz", &take_linear(&mut z_terms, (1, 0, 0), &params), &one)?;
                expect_linear("dw", &take_linear(&mut w_terms, (0, 1, 0), &params), &one.neg())?;
                expect_linear("du", &take_linear(&mut u_terms, (0, 0, 1), &params), &i_d)?;
                for terms in [&mut z_terms, &mut w_terms, &mut u_terms] {
                    terms.retain(|_, c| !c.is_zero());
                }
                LoadedSystem::Complex(ComplexSystemSpec {
                    max_degree: max_degree([&z_terms, &w_terms, &u_terms]),
                    params,
                    d,
                    z_terms,
                    w_terms,
                    u_terms,
                })
            }
            other => return Err(usage(format!("unknown form {other:?}"))),
        };
        let report = match &loaded {
            LoadedSystem::Real(spec) => spec.validate(),
            LoadedSystem::Complex(spec) => spec.validate(),
        };
        if !report.is_valid() {
            return Err(usage(format!(
                "system file fails validation: {}",
                report.violations.join("; ")
            )));
        }
        Ok(loaded)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantRec {
    pub m: u32,
    pub p: String,
    pub q: String,
    pub tau: String,
    pub mu: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionRec {
    pub m: u32,
    pub conditions: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldCoeffRec {
    pub a: u32,
    pub b: u32,
    pub h: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldBlock {
    pub degree: u32,
    pub coefficients: Vec<ManifoldCoeffRec>,
    pub residual_is_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant_plane_cofactor: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPointRec {
    pub amplitude: f64,
    pub mean_period: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanBlock {
    pub verdict: String,
    pub epsilon: f64,
    pub points: Vec<ScanPointRec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    /// SHA-256 of the exact input file bytes, lowercase hex.
    pub input_sha256: String,
    pub substitutions: Vec<String>,
    pub constants: Vec<ConstantRec>,
    pub caveat: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<ConditionRec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifold: Option<ManifoldBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
}

pub fn input_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

impl ReportFile {
    pub fn from_constants(input_bytes: &[u8], report: &ConstantsReport) -> ReportFile {
        ReportFile {
            input_sha256: input_hash(input_bytes),
            substitutions: report.reduced_under.clone(),
            constants: report
                .records
                .iter()
                .map(|r| ConstantRec {
                    m: r.m,
                    p: print_scalar(&r.p),
                    q: print_scalar(&r.q),
                    tau: print_scalar(&r.tau),
                    mu: print_scalar(&r.mu),
                })
                .collect(),
            caveat: report.caveat.clone(),
            conditions: None,
            manifold: None,
            scan: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ReportFile, UsageError> {
        serde_json::from_str(text).map_err(|e| usage(format!("malformed report file: {e}")))
    }
}

pub fn manifold_block(
    h: &ManifoldApprox,
    residual_is_zero: bool,
    cofactor: Option<String>,
) -> ManifoldBlock {
    ManifoldBlock {
        degree: h.degree,
        coefficients: h
            .coeffs
            .iter()
            .map(|(&(a, b), c)| ManifoldCoeffRec {
                a,
                b,
                h: print_scalar(c),
            })
            .collect(),
        residual_is_zero,
        invariant_plane_cofactor: cofactor,
    }
}
