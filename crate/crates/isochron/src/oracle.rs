//! Independent cross-check of the normal-form engine: the same series are
//! found by undetermined coefficients, materializing at every total degree
//! the full coefficient-matching linear system and solving it.
//!
//! The degree-n system is diagonal (that is exactly why the series exist
//! uniquely), so "solving" is one division per unknown — but the residual
//! data is produced by whole-series products over `TriPoly`, a completely
//! different code path from the engine's incremental convolution.

use std::collections::BTreeMap;

use crate::gauss::GaussianRational;
use crate::nfengine::{CoefficientTable, EngineError, PhaseSeries};
use crate::scalar::Scalar;
use crate::series::{Key, TriPoly};
use crate::sysmodel::ComplexSystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesTarget {
    F,
    G,
}

/// One degree of the undetermined-coefficients process, kept for inspection:
/// the unknowns, the diagonal of the system and the right-hand side.
#[derive(Debug, Clone)]
pub struct DenseStage {
    pub degree: u32,
    /// Unknown monomial keys in (z, w, u) exponents; the resonant key (if
    /// present at this degree) has a unit pivot and solves for the constant.
    pub keys: Vec<Key>,
    pub diagonal: Vec<Scalar>,
    pub rhs: Vec<Scalar>,
}

/// Solve for the f- or g-series through order `m_max` by dense coefficient
/// matching. Contract identical to `compute_f`/`compute_g`.
pub fn dense_solve(
    spec: &ComplexSystemSpec,
    m_max: u32,
    target: SeriesTarget,
) -> Result<(CoefficientTable, Vec<Scalar>, Vec<DenseStage>), EngineError> {
    assert!(m_max >= 1, "order must be at least 1");
    let params = &spec.params;
    let trunc = 2 * m_max + 1;
    let (fz, fw, fu) = spec.rhs();
    let i = Scalar::i(params);
    let i_d = spec.d.mul(&i);

    // the series lives in (z, w, u) exponents regardless of target
    let seed = match target {
        SeriesTarget::F => (1, 0, 0),
        SeriesTarget::G => (0, 1, 0),
    };
    let mut series = TriPoly::monomial(params, seed, Scalar::one(params));
    let mut constants = Vec::new();
    let mut witness = Vec::new();
    let mut stages = Vec::new();

    for n in 2..=trunc {
        // residual of the defining identity with the series known through
        // degree n−1: its degree-n part is the inhomogeneity
        let transported = series
            .diff(0)
            .mul_truncated(&fz, n)
            .add(&series.diff(1).mul_truncated(&fw, n))
            .add(&series.diff(2).mul_truncated(&fu, n));
        let residual = match target {
            SeriesTarget::F => transported.sub(&series),
            SeriesTarget::G => transported.add(&series),
        };
        let mut keys = Vec::new();
        let mut diagonal = Vec::new();
        let mut rhs = Vec::new();
        for a in (0..=n).rev() {
            for b in 0..=(n - a) {
                let g = n - a - b;
                let key = (a, b, g);
                let resonant = match target {
                    SeriesTarget::F => g == 0 && a == b + 1,
                    SeriesTarget::G => g == 0 && b == a + 1,
                };
                let k = residual.coeff(key);
                if resonant {
                    keys.push(key);
                    diagonal.push(Scalar::one(params));
                    rhs.push(k.clone());
                    constants.push(k);
                    witness.push(match target {
                        SeriesTarget::F => key,
                        // the g-table convention is (w-exp, z-exp, u-exp)
                        SeriesTarget::G => (b, a, g),
                    });
                    continue;
                }
                // a new series term c·z^a w^b u^g feeds the residual
                // coefficient at its own key through the linear part only
                let divisor = match target {
                    SeriesTarget::F => Scalar::from_int(params, a as i64 - b as i64 - 1)
                        .add(&i_d.scale(&GaussianRational::from_int(g as i64))),
                    SeriesTarget::G => Scalar::from_int(params, a as i64 - b as i64 + 1)
                        .add(&i_d.scale(&GaussianRational::from_int(g as i64))),
                };
                if divisor.is_zero() {
                    return Err(EngineError::Degenerate(a, b, g));
                }
                if k.is_zero() {
                    continue;
                }
                let c = k.div(&divisor)?.neg();
                keys.push(key);
                diagonal.push(divisor);
                rhs.push(k);
                series.accumulate(key, &c);
            }
        }
        stages.push(DenseStage {
            degree: n,
            keys,
            diagonal,
            rhs,
        });
    }

    let coeffs: BTreeMap<Key, Scalar> = series
        .terms()
        .map(|(&(a, b, g), c)| {
            let key = match target {
                SeriesTarget::F => (a, b, g),
                SeriesTarget::G => (b, a, g),
            };
            (key, c.clone())
        })
        .collect();
    Ok((
        CoefficientTable {
            series: PhaseSeries {
                coeffs,
                truncation_degree: trunc,
            },
            normalization_witness: witness,
        },
        constants,
        stages,
    ))
}
