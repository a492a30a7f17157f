//! Normalized rational functions in the parameters: the coefficient field of
//! everything symbolic.
//!
//! A `Scalar` is `num/den` with the gcd divided out and the denominator
//! scaled to rational content 1 with a sign-canonical leading coefficient.
//! Equal values therefore have identical representations (when simplification
//! is enabled), and equality is decided by cross-multiplication either way.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::OnceLock;

use crate::error::{ArithError, UsageError};
use crate::gauss::GaussianRational;
use crate::gcd::poly_gcd;
use crate::params::ParamSet;
use crate::poly::ParamPoly;

static SIMPLIFY: OnceLock<AtomicBool> = OnceLock::new();

fn simplify_flag() -> &'static AtomicBool {
    SIMPLIFY.get_or_init(|| {
        let off = std::env::var("ISOCHRON_GCD")
            .map(|v| v.eq_ignore_ascii_case("off"))
            .unwrap_or(false);
        AtomicBool::new(!off)
    })
}

/// Whether gcd reduction of rational functions is active (`ISOCHRON_GCD=off`
/// disables it; only representation size is affected, never correctness).
pub fn simplification_enabled() -> bool {
    simplify_flag().load(Ordering::Relaxed)
}

pub fn set_simplification(enabled: bool) {
    simplify_flag().store(enabled, Ordering::Relaxed);
}

#[derive(Debug, Clone)]
pub struct Scalar {
    num: ParamPoly,
    den: ParamPoly,
}

impl Scalar {
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Scalar { num, den }.normalized())
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        let den = ParamPoly::one(p.params());
        Scalar { num: p, den }.normalized()
    }

    pub fn from_gauss(params: &ParamSet, c: GaussianRational) -> Self {
        Scalar::from_poly(ParamPoly::constant(params, c))
    }

    pub fn from_int(params: &ParamSet, n: i64) -> Self {
        Scalar::from_poly(ParamPoly::from_int(params, n))
    }

    pub fn zero(params: &ParamSet) -> Self {
        Scalar::from_poly(ParamPoly::zero(params))
    }

    pub fn one(params: &ParamSet) -> Self {
        Scalar::from_poly(ParamPoly::one(params))
    }

    pub fn i(params: &ParamSet) -> Self {
        Scalar::from_gauss(params, GaussianRational::i())
    }

    pub fn param(params: &ParamSet, index: usize) -> Self {
        Scalar::from_poly(ParamPoly::param(params, index))
    }

    pub fn num(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den(&self) -> &ParamPoly {
        &self.den
    }

    pub fn params(&self) -> &ParamSet {
        self.num.params()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// True when the value is a plain polynomial (denominator 1).
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant() && self.den.constant_term().is_one()
    }

    /// The constant value, when the scalar is free of parameters.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(&self.num.constant_term() / &self.den.constant_term())
        } else {
            None
        }
    }

    fn normalized(self) -> Scalar {
        let Scalar { mut num, mut den } = self;
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Scalar {
                den: ParamPoly::one(num.params()),
                num,
            };
        }
        if simplification_enabled() && !den.is_constant() {
            let g = poly_gcd(&num, &den);
            if !g.is_constant() {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        // canonical scale: denominator primitive with sign-canonical lead
        let (s, den_prim) = den.content_split().expect("nonzero denominator");
        let num = num.scale(&s.inv().expect("nonzero content"));
        Scalar { num, den: den_prim }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.den == other.den {
            return Scalar {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .normalized();
        }
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Scalar { num, den }.normalized()
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    pub fn scale(&self, c: &GaussianRational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero(self.params());
        }
        // scaling the numerator by a nonzero constant preserves all invariants
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Scalar {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
        }
        .normalized())
    }

    pub fn inv(&self) -> Result<Scalar, ArithError> {
        Scalar::one(self.params()).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Scalar, ArithError> {
        if e < 0 {
            if self.is_zero() {
                return Err(ArithError::ZeroToNegativePower);
            }
            return self.inv()?.pow(-e);
        }
        let mut acc = Scalar::one(self.params());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Conjugate under the assumption that all parameters are real symbols.
    pub fn conj(&self) -> Scalar {
        Scalar {
            num: self.num.conj(),
            den: self.den.conj(),
        }
        .normalized()
    }

    /// Exact evaluation; the assignment covers all parameters in order.
    pub fn eval(&self, assignment: &[GaussianRational]) -> Result<GaussianRational, ArithError> {
        let d = self.den.eval(assignment);
        if d.is_zero() {
            let point = assignment
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{}={}", self.params().name(i), v))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(ArithError::DenominatorVanishes { point });
        }
        Ok(&self.num.eval(assignment) / &d)
    }

    /// Substitute every parameter by the scalar of the same index in
    /// `values` (each over `target`).
    pub fn substitute(&self, target: &ParamSet, values: &[Scalar]) -> Result<Scalar, ArithError> {
        assert_eq!(values.len(), self.params().len(), "one value per parameter");
        let num = subst_poly(&self.num, target, values)?;
        let den = subst_poly(&self.den, target, values)?;
        if den.is_zero() {
            return Err(ArithError::DenominatorVanishes {
                point: "parameter substitution".to_string(),
            });
        }
        num.div(&den)
    }

    /// Real and imaginary part of the numerator, as polynomials with real
    /// coefficients, treating declared-real parameters as real symbols.
    /// The scalar vanishes on the real parameter domain (away from
    /// denominator zeros) iff both parts are zero.
    pub fn real_imag_split(&self) -> Result<(ParamPoly, ParamPoly), UsageError> {
        for v in 0..self.params().len() {
            if (self.num.depends_on(v) || self.den.depends_on(v))
                && !self.params().descriptor(v).declared_real
            {
                return Err(UsageError::new(format!(
                    "parameter `{}` is not declared real",
                    self.params().name(v)
                )));
            }
        }
        let mut re_terms = Vec::new();
        let mut im_terms = Vec::new();
        for (m, c) in self.num.terms() {
            re_terms.push((m.0.clone(), GaussianRational::from_rational(c.re.clone())));
            im_terms.push((m.0.clone(), GaussianRational::from_rational(c.im.clone())));
        }
        Ok((
            ParamPoly::from_terms(self.params(), re_terms),
            ParamPoly::from_terms(self.params(), im_terms),
        ))
    }
}

fn subst_poly(
    p: &ParamPoly,
    target: &ParamSet,
    values: &[Scalar],
) -> Result<Scalar, ArithError> {
    let mut acc = Scalar::zero(target);
    for (m, c) in p.terms() {
        let mut t = Scalar::from_gauss(target, c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = t.mul(&values[i].pow(e as i64)?);
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        // cross-multiplied equality; independent of simplification state
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Scalar {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamDescriptor;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn params() -> ParamSet {
        ParamSet::new(vec![
            ParamDescriptor::real_nonzero("c0"),
            ParamDescriptor::real("c1"),
            ParamDescriptor::real("c2"),
            ParamDescriptor::real("c3"),
        ])
        .unwrap()
    }

    fn rand_gauss(rng: &mut StdRng) -> GaussianRational {
        let part = |rng: &mut StdRng| {
            BigRational::new(
                BigInt::from(rng.gen_range(-20i64..=20)),
                BigInt::from(rng.gen_range(1i64..=7)),
            )
        };
        GaussianRational::new(part(rng), part(rng))
    }

    fn rand_poly(ps: &ParamSet, rng: &mut StdRng) -> ParamPoly {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..6) {
            let exps: Vec<u32> = (0..ps.len()).map(|_| rng.gen_range(0..3)).collect();
            terms.push((exps, rand_gauss(rng)));
        }
        ParamPoly::from_terms(ps, terms)
    }

    #[test]
    fn inverse_cancels() {
        let ps = params();
        let c0 = Scalar::param(&ps, 0);
        let lin = c0.sub(&Scalar::from_gauss(
            &ps,
            &GaussianRational::i() * &GaussianRational::from_int(2),
        ));
        let prod = lin.inv().unwrap().mul(&lin);
        assert!(prod.is_one());
    }

    #[test]
    fn normalization_is_idempotent() {
        let ps = params();
        let a = Scalar::new(
            ParamPoly::param(&ps, 1).scale(&GaussianRational::from_ratio(3, 2)),
            ParamPoly::param(&ps, 0).scale(&GaussianRational::from_int(-4)),
        )
        .unwrap();
        let again = Scalar::new(a.num().clone(), a.den().clone()).unwrap();
        assert_eq!(a.num(), again.num());
        assert_eq!(a.den(), again.den());
        // equal fractions normalize to identical representations
        let b = Scalar::new(
            a.num().mul(&ParamPoly::param(&ps, 2)).scale(&GaussianRational::from_int(6)),
            a.den().mul(&ParamPoly::param(&ps, 2)).scale(&GaussianRational::from_int(6)),
        )
        .unwrap();
        assert_eq!(a.num(), b.num());
        assert_eq!(a.den(), b.den());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let ps = params();
        let one = Scalar::one(&ps);
        assert_eq!(one.div(&Scalar::zero(&ps)), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn eval_is_a_field_homomorphism() {
        let ps = params();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let p = Scalar::from_poly(rand_poly(&ps, &mut rng));
            let q = Scalar::from_poly(rand_poly(&ps, &mut rng));
            let theta: Vec<GaussianRational> =
                (0..ps.len()).map(|_| rand_gauss(&mut rng)).collect();
            let sum = p.add(&q).eval(&theta).unwrap();
            assert_eq!(sum, &p.eval(&theta).unwrap() + &q.eval(&theta).unwrap());
            let prod = p.mul(&q).eval(&theta).unwrap();
            assert_eq!(prod, &p.eval(&theta).unwrap() * &q.eval(&theta).unwrap());
        }
    }

    #[test]
    fn eval_denominator_vanishes_names_the_point() {
        let ps = params();
        let s = Scalar::param(&ps, 1).div(&Scalar::param(&ps, 0)).unwrap();
        let theta = vec![
            GaussianRational::zero(),
            GaussianRational::one(),
            GaussianRational::zero(),
            GaussianRational::zero(),
        ];
        match s.eval(&theta) {
            Err(ArithError::DenominatorVanishes { point }) => {
                assert!(point.contains("c0=0"));
            }
            other => panic!("expected vanishing denominator, got {other:?}"),
        }
    }

    #[test]
    fn split_of_real_poly_is_itself() {
        let ps = params();
        let p = Scalar::param(&ps, 1).add(&Scalar::from_int(&ps, 2));
        let (re, im) = p.real_imag_split().unwrap();
        assert_eq!(re, p.num().clone());
        assert!(im.is_zero());
    }

    #[test]
    fn split_matches_eval_at_real_points() {
        let ps = params();
        let mut rng = StdRng::seed_from_u64(11);
        let i = Scalar::i(&ps);
        let a = Scalar::param(&ps, 0)
            .mul(&i)
            .add(&Scalar::param(&ps, 2))
            .div(&Scalar::param(&ps, 0).add(&Scalar::from_int(&ps, 1)))
            .unwrap();
        for _ in 0..20 {
            let theta: Vec<GaussianRational> = (0..ps.len())
                .map(|_| {
                    GaussianRational::from_rational(BigRational::new(
                        BigInt::from(rng.gen_range(1i64..=9)),
                        BigInt::from(rng.gen_range(1i64..=4)),
                    ))
                })
                .collect();
            let (re, im) = a.real_imag_split().unwrap();
            let lhs = a.eval(&theta).unwrap();
            let den = a.den().eval(&theta);
            let rhs = &(&re.eval(&theta) + &(&GaussianRational::i() * &im.eval(&theta))) / &den;
            assert_eq!(lhs, rhs);
        }
    }
}
