//! Sparse multivariate polynomials over Q(i) in the declared parameters.
//!
//! Monomials are ordered graded-lexicographically with the parameter
//! declaration order; the maximal stored monomial is the leading term.
//! No zero coefficients are ever stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::gauss::GaussianRational;
use crate::params::ParamSet;

/// Exponent vector, one entry per parameter; ordered graded-lex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, or None when not divisible.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in the parameters with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoly {
    params: ParamSet,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl ParamPoly {
    pub fn zero(params: &ParamSet) -> Self {
        ParamPoly {
            params: params.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(params: &ParamSet, c: GaussianRational) -> Self {
        let mut p = ParamPoly::zero(params);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; params.len()]), c);
        }
        p
    }

    pub fn one(params: &ParamSet) -> Self {
        ParamPoly::constant(params, GaussianRational::one())
    }

    pub fn from_int(params: &ParamSet, n: i64) -> Self {
        ParamPoly::constant(params, GaussianRational::from_int(n))
    }

    /// The polynomial consisting of the single parameter `index`.
    pub fn param(params: &ParamSet, index: usize) -> Self {
        assert!(index < params.len(), "parameter index out of range");
        let mut exps = vec![0; params.len()];
        exps[index] = 1;
        let mut p = ParamPoly::zero(params);
        p.terms.insert(Monomial(exps), GaussianRational::one());
        p
    }

    pub fn from_terms(
        params: &ParamSet,
        terms: impl IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    ) -> Self {
        let mut p = ParamPoly::zero(params);
        for (exps, c) in terms {
            assert_eq!(exps.len(), params.len(), "exponent vector length mismatch");
            p.add_term(Monomial(exps), c);
        }
        p
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.leading_monomial().is_constant())
    }

    /// The constant term.
    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&Monomial(vec![0; self.params.len()]))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Largest monomial in graded-lex order. Panics on the zero polynomial.
    pub fn leading_monomial(&self) -> &Monomial {
        self.terms.keys().next_back().expect("zero polynomial has no leading term")
    }

    pub fn leading_coefficient(&self) -> &GaussianRational {
        self.terms.values().next_back().expect("zero polynomial has no leading term")
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_params(&self, other: &ParamPoly) {
        assert!(
            self.params == other.params,
            "mismatched parameter sets: {} vs {}",
            self.params,
            other.params
        );
    }

    pub fn add(&self, other: &ParamPoly) -> ParamPoly {
        self.check_same_params(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ParamPoly) -> ParamPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ParamPoly {
        let mut out = ParamPoly::zero(&self.params);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &ParamPoly) -> ParamPoly {
        self.check_same_params(other);
        let mut out = ParamPoly::zero(&self.params);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero(&self.params);
        }
        let mut out = ParamPoly::zero(&self.params);
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = ParamPoly::one(&self.params);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Conjugate every coefficient (parameters treated as real symbols).
    pub fn conj(&self) -> ParamPoly {
        let mut out = ParamPoly::zero(&self.params);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.conj());
        }
        out
    }

    /// Exact evaluation at a full parameter assignment.
    pub fn eval(&self, assignment: &[GaussianRational]) -> GaussianRational {
        assert_eq!(assignment.len(), self.params.len(), "assignment length mismatch");
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &assignment[i].pow(e);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Exact polynomial division; `None` when the division is not exact.
    pub fn exact_div(&self, divisor: &ParamPoly) -> Option<ParamPoly> {
        self.check_same_params(divisor);
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = ParamPoly::zero(&self.params);
        let dlm = divisor.leading_monomial().clone();
        let dlc = divisor.leading_coefficient().clone();
        while !rem.is_zero() {
            let rlm = rem.leading_monomial().clone();
            let q_mono = rlm.div(&dlm)?;
            let q_coef = rem.leading_coefficient() / &dlc;
            let mut single = ParamPoly::zero(&self.params);
            single.terms.insert(q_mono, q_coef);
            rem = rem.sub(&single.mul(divisor));
            quot = quot.add(&single);
        }
        Some(quot)
    }

    /// View as univariate in `var` with `ParamPoly` coefficients, dense by degree.
    pub fn to_univariate(&self, var: usize) -> Vec<ParamPoly> {
        let deg = self.degree_in(var) as usize;
        let mut coeffs = vec![ParamPoly::zero(&self.params); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut rest = m.clone();
            rest.0[var] = 0;
            coeffs[e].add_term(rest, c.clone());
        }
        coeffs
    }

    /// Inverse of `to_univariate`.
    pub fn from_univariate(params: &ParamSet, var: usize, coeffs: &[ParamPoly]) -> ParamPoly {
        let mut out = ParamPoly::zero(params);
        for (e, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut m2 = m.clone();
                m2.0[var] += e as u32;
                out.add_term(m2, v.clone());
            }
        }
        out
    }

    /// Scale factor `s` and primitive part `p` with `self = s * p`, where `p`
    /// has Gaussian-integer coefficients of rational content 1 and a
    /// sign-canonical leading coefficient (positive real part, or positive
    /// imaginary part when the real part is zero). The scale is a nonzero
    /// rational, so the split is unique. Returns None for the zero polynomial.
    pub fn content_split(&self) -> Option<(GaussianRational, ParamPoly)> {
        if self.is_zero() {
            return None;
        }
        // common denominator of all real/imag parts
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = num_integer::lcm(den.clone(), c.re.denom().clone());
            den = num_integer::lcm(den, c.im.denom().clone());
        }
        // integer gcd across every component
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let re = c.re.numer() * (&den / c.re.denom());
            let im = c.im.numer() * (&den / c.im.denom());
            g = num_integer::gcd(g, re);
            g = num_integer::gcd(g, im);
        }
        let mut scale = GaussianRational::from_rational(BigRational::new(g, den));
        let mut prim = ParamPoly::zero(&self.params);
        let inv = scale.inv().expect("content of nonzero poly is nonzero");
        for (m, c) in &self.terms {
            prim.terms.insert(m.clone(), c * &inv);
        }
        // sign-normalize the leading coefficient
        let lc = prim.leading_coefficient();
        if lc.re.is_negative() || (lc.re.is_zero() && lc.im.is_negative()) {
            let minus = GaussianRational::from_int(-1);
            prim = prim.scale(&minus);
            scale = &scale * &minus;
        }
        Some((scale, prim))
    }

    /// Primitive, sign-canonical representative of `self` (content dropped).
    pub fn canonical(&self) -> ParamPoly {
        match self.content_split() {
            None => self.clone(),
            Some((_, p)) => p,
        }
    }

    /// Re-express over `target`, which must contain every parameter that
    /// actually occurs. Used after substitutions shrink the parameter set.
    pub fn reindex(&self, target: &ParamSet) -> ParamPoly {
        let map: Vec<Option<usize>> = (0..self.params.len())
            .map(|i| target.index_of(self.params.name(i)))
            .collect();
        let mut out = ParamPoly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let j = map[i].unwrap_or_else(|| {
                        panic!("parameter `{}` not present in target set", self.params.name(i))
                    });
                    exps[j] = e;
                }
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// True when the parameter actually occurs.
    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }
}
