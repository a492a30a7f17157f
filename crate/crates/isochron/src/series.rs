//! Sparse trivariate polynomials in the phase variables (z, w, u) with
//! `Scalar` coefficients, truncated by total degree where noted.
//!
//! This is the workhorse for residual checks, the dense solver, and the
//! center-manifold reduction: everything that multiplies whole series
//! rather than extracting single coefficients.

use std::collections::BTreeMap;

use crate::params::ParamSet;
use crate::scalar::Scalar;

/// Exponent triple (z, w, u).
pub type Key = (u32, u32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct TriPoly {
    params: ParamSet,
    terms: BTreeMap<Key, Scalar>,
}

impl TriPoly {
    pub fn zero(params: &ParamSet) -> Self {
        TriPoly {
            params: params.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(params: &ParamSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Key, Scalar)>,
    {
        let mut p = TriPoly::zero(params);
        for (k, c) in terms {
            p.accumulate(k, &c);
        }
        p
    }

    pub fn monomial(params: &ParamSet, key: Key, c: Scalar) -> Self {
        TriPoly::from_terms(params, [(key, c)])
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: Key) -> Scalar {
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(&self.params))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|&(a, b, c)| a + b + c)
            .max()
            .unwrap_or(0)
    }

    /// Add `c` to the coefficient at `key`, dropping the term if it cancels.
    pub fn accumulate(&mut self, key: Key, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(prev) => {
                let sum = prev.add(c);
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add(&self, other: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.accumulate(*k, c);
        }
        out
    }

    pub fn sub(&self, other: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.accumulate(*k, &c.neg());
        }
        out
    }

    pub fn neg(&self) -> TriPoly {
        TriPoly {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> TriPoly {
        if c.is_zero() {
            return TriPoly::zero(&self.params);
        }
        TriPoly {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(k, v)| (*k, v.mul(c))).collect(),
        }
    }

    /// Product with all terms of total degree above `max_degree` discarded.
    pub fn mul_truncated(&self, other: &TriPoly, max_degree: u32) -> TriPoly {
        let mut out = TriPoly::zero(&self.params);
        for (&(a1, b1, c1), v1) in &self.terms {
            if a1 + b1 + c1 > max_degree {
                continue;
            }
            for (&(a2, b2, c2), v2) in &other.terms {
                let key = (a1 + a2, b1 + b2, c1 + c2);
                if key.0 + key.1 + key.2 > max_degree {
                    continue;
                }
                out.accumulate(key, &v1.mul(v2));
            }
        }
        out
    }

    /// Drop all terms of total degree above `max_degree`.
    pub fn truncated(&self, max_degree: u32) -> TriPoly {
        TriPoly {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(&(a, b, c), _)| a + b + c <= max_degree)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Partial derivative in the variable selected by index 0 = z, 1 = w,
    /// 2 = u.
    pub fn diff(&self, var: usize) -> TriPoly {
        let mut out = TriPoly::zero(&self.params);
        for (&(a, b, c), v) in &self.terms {
            let e = [a, b, c][var];
            if e == 0 {
                continue;
            }
            let mut key = [a, b, c];
            key[var] = e - 1;
            out.accumulate(
                (key[0], key[1], key[2]),
                &v.scale(&crate::gauss::GaussianRational::from_int(e as i64)),
            );
        }
        out
    }

    /// Substitute u by a (z, w)-polynomial, truncating at `max_degree`.
    /// `h` must not depend on u.
    pub fn substitute_u(&self, h: &TriPoly, max_degree: u32) -> TriPoly {
        debug_assert!(h.terms.keys().all(|&(_, _, c)| c == 0));
        // cache powers of h
        let max_u = self.terms.keys().map(|&(_, _, c)| c).max().unwrap_or(0);
        let one = TriPoly::monomial(&self.params, (0, 0, 0), Scalar::one(&self.params));
        let mut powers = vec![one];
        for p in 1..=max_u {
            let next = powers[(p - 1) as usize].mul_truncated(h, max_degree);
            powers.push(next);
        }
        let mut out = TriPoly::zero(&self.params);
        for (&(a, b, c), v) in &self.terms {
            if a + b > max_degree {
                continue;
            }
            let hp = &powers[c as usize];
            for (&(ha, hb, _), hv) in &hp.terms {
                let key = (a + ha, b + hb, 0);
                if key.0 + key.1 > max_degree {
                    continue;
                }
                out.accumulate(key, &v.mul(hv));
            }
        }
        out
    }

    /// Exact evaluation at a phase point with all parameters already numeric
    /// (the scalar coefficients must be constants).
    pub fn eval_constant(
        &self,
        z: &crate::gauss::GaussianRational,
        w: &crate::gauss::GaussianRational,
        u: &crate::gauss::GaussianRational,
    ) -> crate::gauss::GaussianRational {
        use crate::gauss::GaussianRational as G;
        let mut acc = G::zero();
        for (&(a, b, c), v) in &self.terms {
            let coeff = v
                .as_constant()
                .expect("eval_constant requires constant coefficients");
            let m = &(&z.pow(a) * &w.pow(b)) * &u.pow(c);
            acc = &acc + &(&coeff * &m);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ParamDescriptor, ParamSet};

    fn params() -> ParamSet {
        ParamSet::new(vec![ParamDescriptor::real_nonzero("c0")]).unwrap()
    }

    fn s(ps: &ParamSet, n: i64) -> Scalar {
        Scalar::from_int(ps, n)
    }

    #[test]
    fn product_and_truncation() {
        let ps = params();
        // (z + w)^2 = z^2 + 2zw + w^2
        let p = TriPoly::from_terms(&ps, [((1, 0, 0), s(&ps, 1)), ((0, 1, 0), s(&ps, 1))]);
        let sq = p.mul_truncated(&p, 10);
        assert_eq!(sq.coeff((2, 0, 0)), s(&ps, 1));
        assert_eq!(sq.coeff((1, 1, 0)), s(&ps, 2));
        assert_eq!(sq.coeff((0, 2, 0)), s(&ps, 1));
        assert_eq!(sq.num_terms(), 3);
        // truncation below the product degree kills everything
        assert!(p.mul_truncated(&p, 1).is_zero());
    }

    #[test]
    fn derivative() {
        let ps = params();
        let p = TriPoly::from_terms(&ps, [((2, 1, 3), s(&ps, 5))]);
        assert_eq!(p.diff(0).coeff((1, 1, 3)), s(&ps, 10));
        assert_eq!(p.diff(1).coeff((2, 0, 3)), s(&ps, 5));
        assert_eq!(p.diff(2).coeff((2, 1, 2)), s(&ps, 15));
        assert!(p.diff(0).diff(0).diff(0).is_zero());
    }

    #[test]
    fn substitute_u_expands_powers() {
        let ps = params();
        // u^2 with u <- z*w gives z^2 w^2
        let p = TriPoly::monomial(&ps, (0, 0, 2), s(&ps, 1));
        let h = TriPoly::monomial(&ps, (1, 1, 0), s(&ps, 3));
        let r = p.substitute_u(&h, 10);
        assert_eq!(r.coeff((2, 2, 0)), s(&ps, 9));
        assert_eq!(r.num_terms(), 1);
        // truncation applies to the expansion
        assert!(p.substitute_u(&h, 3).is_zero());
    }

    #[test]
    fn cancellation_removes_terms() {
        let ps = params();
        let p = TriPoly::monomial(&ps, (1, 0, 0), s(&ps, 4));
        let q = p.sub(&p);
        assert!(q.is_zero());
        assert_eq!(q.num_terms(), 0);
    }
}
