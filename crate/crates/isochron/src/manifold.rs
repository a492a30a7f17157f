//! Polynomial approximation of the local center manifold u = h(z, w) and
//! reduction of the 3D system onto it.
//!
//! In complex coordinates the invariance equation
//!
//! ```text
//! ∂h/∂z·Ż + ∂h/∂w·ẇ = u̇ |_{u=h}
//! ```
//!
//! is diagonal degree by degree: the z^a w^b coefficient satisfies
//! (a − b − i·d)·h_ab = known lower-order data, and the divisor never
//! vanishes for real nonzero d.

use std::collections::BTreeMap;

use crate::nfengine::EngineError;
use crate::scalar::Scalar;
use crate::series::TriPoly;
use crate::sysmodel::{ComplexSystemSpec, TermMap};

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldApprox {
    /// h_ab for z^a w^b, 2 ≤ a+b ≤ degree; zero coefficients omitted.
    pub coeffs: BTreeMap<(u32, u32), Scalar>,
    pub degree: u32,
}

impl ManifoldApprox {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_tripoly(&self, spec: &ComplexSystemSpec) -> TriPoly {
        TriPoly::from_terms(
            &spec.params,
            self.coeffs.iter().map(|(&(a, b), c)| ((a, b, 0), c.clone())),
        )
    }
}

/// Solve the invariance equation through total degree `n_max`.
pub fn compute_manifold(
    spec: &ComplexSystemSpec,
    n_max: u32,
) -> Result<ManifoldApprox, EngineError> {
    assert!(n_max >= 2, "manifold degree must be at least 2");
    let params = &spec.params;
    let (fz, fw, fu) = spec.rhs();
    let i_d = spec.d.mul(&Scalar::i(params));
    let mut h = TriPoly::zero(params);
    for n in 2..=n_max {
        // every right-hand side is evaluated on the manifold u = h
        let residual = h
            .diff(0)
            .mul_truncated(&fz.substitute_u(&h, n), n)
            .add(&h.diff(1).mul_truncated(&fw.substitute_u(&h, n), n))
            .sub(&fu.substitute_u(&h, n));
        for a in 0..=n {
            let b = n - a;
            let k = residual.coeff((a, b, 0));
            if k.is_zero() {
                continue;
            }
            let divisor = Scalar::from_int(params, a as i64 - b as i64).sub(&i_d);
            if divisor.is_zero() {
                return Err(EngineError::Degenerate(a, b, 0));
            }
            let c = k.div(&divisor)?.neg();
            h.accumulate((a, b, 0), &c);
        }
    }
    Ok(ManifoldApprox {
        coeffs: h.terms().map(|(&(a, b, _), c)| ((a, b), c.clone())).collect(),
        degree: n_max,
    })
}

/// The invariance residual ∂h/∂z·Ż + ∂h/∂w·ẇ − u̇|_{u=h}, truncated at the
/// manifold degree; zero iff `h` solves the invariance equation to that
/// order.
pub fn manifold_residual(spec: &ComplexSystemSpec, h: &ManifoldApprox) -> TriPoly {
    let ht = h.as_tripoly(spec);
    let (fz, fw, fu) = spec.rhs();
    let n = h.degree;
    ht.diff(0)
        .mul_truncated(&fz.substitute_u(&ht, n), n)
        .add(&ht.diff(1).mul_truncated(&fw.substitute_u(&ht, n), n))
        .sub(&fu.substitute_u(&ht, n))
        .truncated(n)
}

/// The (z, w)-system on the manifold, truncated at the manifold degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced2d {
    pub params: crate::params::ParamSet,
    /// Nonlinear coefficients of dz/dT = z + …, keyed (k, j) for z^k w^j.
    pub z_terms: BTreeMap<(u32, u32), Scalar>,
    pub w_terms: BTreeMap<(u32, u32), Scalar>,
    pub max_degree: u32,
}

impl Reduced2d {
    /// View the planar system as a 3D complex spec with a decoupled
    /// du/dT = i·u, so the engine can run on it unchanged.
    pub fn embed_complex(&self) -> ComplexSystemSpec {
        let lift = |m: &BTreeMap<(u32, u32), Scalar>| -> TermMap {
            m.iter().map(|(&(k, j), c)| ((k, j, 0), c.clone())).collect()
        };
        ComplexSystemSpec {
            params: self.params.clone(),
            d: Scalar::one(&self.params),
            z_terms: lift(&self.z_terms),
            w_terms: lift(&self.w_terms),
            u_terms: TermMap::new(),
            max_degree: self.max_degree,
        }
    }
}

/// Substitute u ← h into the z- and w-equations.
pub fn reduce_on_manifold(spec: &ComplexSystemSpec, h: &ManifoldApprox) -> Reduced2d {
    let ht = h.as_tripoly(spec);
    let n = h.degree;
    let (fz, fw, _) = spec.rhs();
    let rz = fz.substitute_u(&ht, n);
    let rw = fw.substitute_u(&ht, n);
    let collect = |p: &TriPoly, skip: (u32, u32)| -> BTreeMap<(u32, u32), Scalar> {
        p.terms()
            .filter(|(&(k, j, _), _)| (k, j) != skip)
            .map(|(&(k, j, _), c)| ((k, j), c.clone()))
            .collect()
    };
    debug_assert!(rz.coeff((1, 0, 0)).is_one());
    debug_assert!(rw
        .coeff((0, 1, 0))
        .add(&Scalar::one(&spec.params))
        .is_zero());
    Reduced2d {
        params: spec.params.clone(),
        z_terms: collect(&rz, (1, 0)),
        w_terms: collect(&rw, (0, 1)),
        max_degree: n,
    }
}
