//! System specifications: real 3D systems with a center-focus linear part,
//! their complexified concomitants, and the transforms between them.
//!
//! A real spec encodes
//!
//! ```text
//! dx/dt = -σ·y + X(x, y, u)
//! dy/dt =  σ·x + Y(x, y, u)
//! du/dt = -d·u + U(x, y, u)
//! ```
//!
//! with σ ∈ {+1, −1} and X, Y, U polynomial of total degree ≥ 2. The
//! complexification z = x + i·y, w = x − i·y, t = −i·σ·T puts every such
//! system into the normalized form
//!
//! ```text
//! dz/dT = z + Z(z, w, u)
//! dw/dT = -w + W(z, w, u)
//! du/dT = i·d_eff·u + U~(z, w, u),      d_eff = σ·d
//! ```
//!
//! which is the only shape the normal-form engine consumes.

use std::collections::BTreeMap;

use crate::error::{ArithError, UsageError};
use crate::gauss::GaussianRational;
use crate::params::ParamSet;
use crate::scalar::Scalar;
use crate::series::{Key, TriPoly};

pub type TermMap = BTreeMap<Key, Scalar>;

#[derive(Debug, Clone, PartialEq)]
pub struct RealSystemSpec {
    pub params: ParamSet,
    /// Linear decay rate of u: du/dt contains −d·u.
    pub d: Scalar,
    /// σ: sign of the rotation (dx/dt ⊃ −σ·y, dy/dt ⊃ σ·x).
    pub orientation: i8,
    /// Nonlinear coefficients of dx/dt, keyed by (k, j, l) for x^k y^j u^l.
    pub x_terms: TermMap,
    pub y_terms: TermMap,
    pub u_terms: TermMap,
    pub max_degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSystemSpec {
    pub params: ParamSet,
    /// Effective rate: du/dT = i·d·u + h.o.t.
    pub d: Scalar,
    /// Nonlinear coefficients of dz/dT, keyed by (k, j, l) for z^k w^j u^l.
    pub z_terms: TermMap,
    pub w_terms: TermMap,
    pub u_terms: TermMap,
    pub max_degree: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_terms(report: &mut ValidationReport, label: &str, terms: &TermMap, max_degree: u32) {
    for (&(k, j, l), c) in terms {
        let deg = k + j + l;
        if deg < 2 {
            report.violations.push(format!(
                "{label}: term ({k},{j},{l}) has total degree {deg} < 2; linear parts are implicit"
            ));
        }
        if deg > max_degree {
            report.violations.push(format!(
                "{label}: term ({k},{j},{l}) exceeds max_degree {max_degree}"
            ));
        }
        if c.is_zero() {
            report
                .violations
                .push(format!("{label}: stored zero coefficient at ({k},{j},{l})"));
        }
    }
}

/// `d` counts as provably nonzero when its numerator is a single monomial
/// whose parameters are all declared nonzero.
fn check_d(report: &mut ValidationReport, d: &Scalar, params: &ParamSet) {
    if d.is_zero() {
        report.violations.push("d is identically zero".to_string());
        return;
    }
    if d.num().num_terms() != 1 {
        report.violations.push(
            "d is not provably nonzero: numerator is not a single monomial".to_string(),
        );
        return;
    }
    for v in 0..params.len() {
        if (d.num().depends_on(v) || d.den().depends_on(v))
            && !params.descriptor(v).declared_nonzero
        {
            report.violations.push(format!(
                "d depends on `{}`, which is not declared nonzero",
                params.name(v)
            ));
        }
        if (d.num().depends_on(v) || d.den().depends_on(v))
            && !params.descriptor(v).declared_real
        {
            report
                .violations
                .push(format!("d depends on `{}`, which is not declared real", params.name(v)));
        }
    }
}

impl RealSystemSpec {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.orientation != 1 && self.orientation != -1 {
            report
                .violations
                .push(format!("orientation must be +1 or -1, got {}", self.orientation));
        }
        if self.max_degree < 2 {
            report
                .violations
                .push(format!("max_degree must be >= 2, got {}", self.max_degree));
        }
        check_d(&mut report, &self.d, &self.params);
        check_terms(&mut report, "x_terms", &self.x_terms, self.max_degree);
        check_terms(&mut report, "y_terms", &self.y_terms, self.max_degree);
        check_terms(&mut report, "u_terms", &self.u_terms, self.max_degree);
        report
    }

    /// Right-hand sides including the linear part, as series in (x, y, u).
    pub fn rhs(&self) -> (TriPoly, TriPoly, TriPoly) {
        let sigma = Scalar::from_int(&self.params, self.orientation as i64);
        let mut fx = TriPoly::from_terms(&self.params, term_vec(&self.params, &self.x_terms));
        fx.accumulate((0, 1, 0), &sigma.neg());
        let mut fy = TriPoly::from_terms(&self.params, term_vec(&self.params, &self.y_terms));
        fy.accumulate((1, 0, 0), &sigma);
        let mut fu = TriPoly::from_terms(&self.params, term_vec(&self.params, &self.u_terms));
        fu.accumulate((0, 0, 1), &self.d.neg());
        (fx, fy, fu)
    }

    /// The complexified concomitant, normalized to dz/dT = z + h.o.t.
    pub fn complexify(&self) -> ComplexSystemSpec {
        let params = &self.params;
        let sigma = self.orientation as i64;
        // t = −i·σ·T rescales every right-hand side by −i·σ
        let tscale = &GaussianRational::i().pow(3) * &GaussianRational::from_int(sigma);

        let mut zc = TriPoly::zero(params);
        let mut wc = TriPoly::zero(params);
        let mut uc = TriPoly::zero(params);
        for (&key, c) in &self.x_terms {
            let m = real_monomial(params, key);
            // X contributes to both (z+w components) with weight 1
            zc = zc.add(&m.scale(c));
            wc = wc.add(&m.scale(c));
        }
        for (&key, c) in &self.y_terms {
            let m = real_monomial(params, key);
            // Y enters as +i·Y in the z-equation, −i·Y in the w-equation
            let ic = c.mul(&Scalar::i(params));
            zc = zc.add(&m.scale(&ic));
            wc = wc.sub(&m.scale(&ic));
        }
        for (&key, c) in &self.u_terms {
            let m = real_monomial(params, key);
            uc = uc.add(&m.scale(c));
        }
        let zc = zc.scale(&Scalar::from_gauss(params, tscale.clone()));
        let wc = wc.scale(&Scalar::from_gauss(params, tscale.clone()));
        let uc = uc.scale(&Scalar::from_gauss(params, tscale));

        ComplexSystemSpec {
            params: params.clone(),
            d: self.d.scale(&GaussianRational::from_int(sigma)),
            z_terms: tri_to_map(&zc),
            w_terms: tri_to_map(&wc),
            u_terms: tri_to_map(&uc),
            max_degree: self.max_degree,
        }
    }

    pub fn substitute_params(
        &self,
        target: &ParamSet,
        values: &[Scalar],
    ) -> Result<RealSystemSpec, ArithError> {
        let d = self.d.substitute(target, values)?;
        if d.is_zero() {
            return Err(ArithError::DenominatorVanishes {
                point: "substitution sends d to zero".to_string(),
            });
        }
        Ok(RealSystemSpec {
            params: target.clone(),
            d,
            orientation: self.orientation,
            x_terms: subst_map(&self.x_terms, target, values)?,
            y_terms: subst_map(&self.y_terms, target, values)?,
            u_terms: subst_map(&self.u_terms, target, values)?,
            max_degree: self.max_degree,
        })
    }
}

impl ComplexSystemSpec {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.max_degree < 2 {
            report
                .violations
                .push(format!("max_degree must be >= 2, got {}", self.max_degree));
        }
        if self.d.is_zero() {
            report.violations.push("d is identically zero".to_string());
        }
        check_terms(&mut report, "z_terms", &self.z_terms, self.max_degree);
        check_terms(&mut report, "w_terms", &self.w_terms, self.max_degree);
        check_terms(&mut report, "u_terms", &self.u_terms, self.max_degree);
        report
    }

    /// Right-hand sides including the linear part, as series in (z, w, u).
    pub fn rhs(&self) -> (TriPoly, TriPoly, TriPoly) {
        let one = Scalar::one(&self.params);
        let mut fz = TriPoly::from_terms(&self.params, term_vec(&self.params, &self.z_terms));
        fz.accumulate((1, 0, 0), &one);
        let mut fw = TriPoly::from_terms(&self.params, term_vec(&self.params, &self.w_terms));
        fw.accumulate((0, 1, 0), &one.neg());
        let mut fu = TriPoly::from_terms(&self.params, term_vec(&self.params, &self.u_terms));
        fu.accumulate((0, 0, 1), &self.d.mul(&Scalar::i(&self.params)));
        (fz, fw, fu)
    }

    /// Invert complexification. `orientation` selects which of the two real
    /// preimages to return (the transform is 2-to-1 without it).
    ///
    /// Errors when the reality conditions fail; conjugation treats every
    /// occurring parameter as a real symbol.
    pub fn realify(&self, orientation: i8) -> Result<RealSystemSpec, UsageError> {
        assert!(orientation == 1 || orientation == -1, "orientation must be ±1");
        let params = &self.params;
        // reality: W_{kjl} = −conj(Z_{jkl}) and U~_{kjl} = −conj(U~_{jkl})
        let zero = Scalar::zero(params);
        let mut keys: Vec<Key> = self.z_terms.keys().copied().collect();
        keys.extend(self.w_terms.keys().map(|&(k, j, l)| (j, k, l)));
        keys.sort_unstable();
        keys.dedup();
        for (k, j, l) in keys {
            let zc = self.z_terms.get(&(k, j, l)).unwrap_or(&zero);
            let wc = self.w_terms.get(&(j, k, l)).unwrap_or(&zero);
            if *wc != zc.conj().neg() {
                return Err(UsageError::new(format!(
                    "reality condition fails: w-coefficient ({j},{k},{l}) is not \
                     the negated conjugate of z-coefficient ({k},{j},{l})"
                )));
            }
        }
        let mut ukeys: Vec<Key> = self.u_terms.keys().copied().collect();
        ukeys.extend(self.u_terms.keys().map(|&(k, j, l)| (j, k, l)));
        ukeys.sort_unstable();
        ukeys.dedup();
        for (k, j, l) in ukeys {
            let a = self.u_terms.get(&(k, j, l)).unwrap_or(&zero);
            let b = self.u_terms.get(&(j, k, l)).unwrap_or(&zero);
            if *b != a.conj().neg() {
                return Err(UsageError::new(format!(
                    "reality condition fails: u-coefficient ({j},{k},{l}) is not \
                     the negated conjugate of u-coefficient ({k},{j},{l})"
                )));
            }
        }

        // X + iY = i·σ·Z∘S⁻¹, X − iY = i·σ·W∘S⁻¹, U = i·σ·U~∘S⁻¹
        let sigma = orientation as i64;
        let iscale = Scalar::from_gauss(
            params,
            &GaussianRational::i() * &GaussianRational::from_int(sigma),
        );
        let zr = complex_map_in_real(params, &self.z_terms).scale(&iscale);
        let wr = complex_map_in_real(params, &self.w_terms).scale(&iscale);
        let ur = complex_map_in_real(params, &self.u_terms).scale(&iscale);
        let half = Scalar::from_gauss(params, GaussianRational::from_ratio(1, 2));
        let x = zr.add(&wr).scale(&half);
        let y = zr.sub(&wr).scale(&half.mul(&Scalar::i(params)).neg());
        Ok(RealSystemSpec {
            params: params.clone(),
            d: self.d.scale(&GaussianRational::from_int(sigma)),
            orientation,
            x_terms: tri_to_map(&x),
            y_terms: tri_to_map(&y),
            u_terms: tri_to_map(&ur),
            max_degree: self.max_degree,
        })
    }

    /// Decide symbolically whether the plane u = 0 is invariant; when it is,
    /// return the cofactor K with du/dT = K·u.
    pub fn check_invariant_plane(&self) -> (bool, Option<TriPoly>) {
        if self.u_terms.keys().any(|&(_, _, l)| l == 0) {
            return (false, None);
        }
        let mut cofactor = TriPoly::monomial(
            &self.params,
            (0, 0, 0),
            self.d.mul(&Scalar::i(&self.params)),
        );
        for (&(k, j, l), c) in &self.u_terms {
            cofactor.accumulate((k, j, l - 1), c);
        }
        (true, Some(cofactor))
    }

    pub fn substitute_params(
        &self,
        target: &ParamSet,
        values: &[Scalar],
    ) -> Result<ComplexSystemSpec, ArithError> {
        let d = self.d.substitute(target, values)?;
        if d.is_zero() {
            return Err(ArithError::DenominatorVanishes {
                point: "substitution sends d to zero".to_string(),
            });
        }
        Ok(ComplexSystemSpec {
            params: target.clone(),
            d,
            z_terms: subst_map(&self.z_terms, target, values)?,
            w_terms: subst_map(&self.w_terms, target, values)?,
            u_terms: subst_map(&self.u_terms, target, values)?,
            max_degree: self.max_degree,
        })
    }
}

/// Embed a planar system ẋ = −σy + X(x,y), ẏ = σx + Y(x,y) as a 3D spec
/// with a decoupled contracting u̇ = −u. Constants of the embedded system
/// coincide with the planar ones.
pub fn embed_2d(
    params: &ParamSet,
    x_terms: &BTreeMap<(u32, u32), Scalar>,
    y_terms: &BTreeMap<(u32, u32), Scalar>,
    orientation: i8,
    max_degree: u32,
) -> RealSystemSpec {
    let lift = |m: &BTreeMap<(u32, u32), Scalar>| -> TermMap {
        m.iter().map(|(&(k, j), c)| ((k, j, 0), c.clone())).collect()
    };
    RealSystemSpec {
        params: params.clone(),
        d: Scalar::one(params),
        orientation,
        x_terms: lift(x_terms),
        y_terms: lift(y_terms),
        u_terms: TermMap::new(),
        max_degree,
    }
}

/// Build the target parameter set and substitution vector for a batch of
/// named substitutions `name -> expression`, where each expression may
/// reference surviving parameters only.
pub fn named_substitution(
    params: &ParamSet,
    subs: &[(String, String)],
) -> Result<(ParamSet, Vec<Scalar>), UsageError> {
    let names: Vec<&str> = subs.iter().map(|(n, _)| n.as_str()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(UsageError::new(format!("parameter `{n}` substituted twice")));
        }
    }
    let target = params.without(&names)?;
    let mut values = Vec::with_capacity(params.len());
    for v in 0..params.len() {
        let name = params.name(v);
        match subs.iter().find(|(n, _)| n == name) {
            Some((_, expr)) => {
                let s = crate::expr::parse_scalar(expr, &target)
                    .map_err(|e| UsageError::new(format!("substitution for `{name}`: {e}")))?;
                values.push(s);
            }
            None => {
                let idx = target.index_of(name).expect("kept parameter");
                values.push(Scalar::param(&target, idx));
            }
        }
    }
    Ok((target, values))
}

fn term_vec(params: &ParamSet, m: &TermMap) -> Vec<(Key, Scalar)> {
    let _ = params;
    m.iter().map(|(&k, c)| (k, c.clone())).collect()
}

fn tri_to_map(p: &TriPoly) -> TermMap {
    p.terms().map(|(&k, c)| (k, c.clone())).collect()
}

fn subst_map(m: &TermMap, target: &ParamSet, values: &[Scalar]) -> Result<TermMap, ArithError> {
    let mut out = TermMap::new();
    for (&k, c) in m {
        let v = c.substitute(target, values)?;
        if !v.is_zero() {
            out.insert(k, v);
        }
    }
    Ok(out)
}

/// x^k y^j u^l written in (z, w, u): ((z+w)/2)^k ((z−w)/(2i))^j u^l.
fn real_monomial(params: &ParamSet, (k, j, l): Key) -> TriPoly {
    let half = Scalar::from_gauss(params, GaussianRational::from_ratio(1, 2));
    let mhalf_i = half.mul(&Scalar::i(params)).neg();
    // (z − w)/(2i) = −(i/2)z + (i/2)w
    let x = TriPoly::from_terms(params, [((1, 0, 0), half.clone()), ((0, 1, 0), half)]);
    let y = TriPoly::from_terms(
        params,
        [((1, 0, 0), mhalf_i.clone()), ((0, 1, 0), mhalf_i.neg())],
    );
    monomial_product(params, &x, &y, (k, j, l))
}

/// z^k w^j u^l written in (x, y, u): (x+iy)^k (x−iy)^j u^l, with the output
/// keys read as (x-exponent, y-exponent, u-exponent).
fn complex_monomial_in_real(params: &ParamSet, key: Key) -> TriPoly {
    let one = Scalar::one(params);
    let i = Scalar::i(params);
    let z = TriPoly::from_terms(params, [((1, 0, 0), one.clone()), ((0, 1, 0), i.clone())]);
    let w = TriPoly::from_terms(params, [((1, 0, 0), one), ((0, 1, 0), i.neg())]);
    monomial_product(params, &z, &w, key)
}

fn monomial_product(params: &ParamSet, first: &TriPoly, second: &TriPoly, (k, j, l): Key) -> TriPoly {
    let mut acc = TriPoly::monomial(params, (0, 0, l), Scalar::one(params));
    for _ in 0..k {
        acc = acc.mul_truncated(first, u32::MAX);
    }
    for _ in 0..j {
        acc = acc.mul_truncated(second, u32::MAX);
    }
    acc
}

fn complex_map_in_real(params: &ParamSet, m: &TermMap) -> TriPoly {
    let mut acc = TriPoly::zero(params);
    for (&key, c) in m {
        acc = acc.add(&complex_monomial_in_real(params, key).scale(c));
    }
    acc
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::params::ParamDescriptor;

    pub(crate) fn moon_rand_params() -> ParamSet {
        ParamSet::new(vec![
            ParamDescriptor::real_nonzero("c0"),
            ParamDescriptor::real("c1"),
            ParamDescriptor::real("c2"),
            ParamDescriptor::real("c3"),
        ])
        .unwrap()
    }

    /// dx/dt = y, dy/dt = −x − xu, du/dt = −c0u + c1x² + c2xy + c3y².
    pub(crate) fn moon_rand() -> RealSystemSpec {
        let ps = moon_rand_params();
        let s = |t: &str| parse_scalar(t, &ps).unwrap();
        RealSystemSpec {
            params: ps.clone(),
            d: s("c0"),
            orientation: -1,
            x_terms: TermMap::new(),
            y_terms: [((1, 0, 1), s("-1"))].into_iter().collect(),
            u_terms: [
                ((2, 0, 0), s("c1")),
                ((1, 1, 0), s("c2")),
                ((0, 2, 0), s("c3")),
            ]
            .into_iter()
            .collect(),
            max_degree: 2,
        }
    }

    #[test]
    fn moon_rand_is_valid() {
        assert!(moon_rand().validate().is_valid());
    }

    #[test]
    fn invalid_specs_are_reported() {
        let mut spec = moon_rand();
        spec.orientation = 2;
        spec.x_terms
            .insert((1, 0, 0), Scalar::one(&spec.params)); // linear term stored
        spec.u_terms
            .insert((0, 0, 2), Scalar::zero(&spec.params)); // zero coefficient
        let report = spec.validate();
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn moon_rand_complexification_matches_hand_expansion() {
        // du/dT = −i·c0·u + (i/4)(c1−c3−i·c2)z² + (i/2)(c1+c3)zw
        //         + (i/4)(c1−c3+i·c2)w²
        let spec = moon_rand().complexify();
        assert!(spec.validate().is_valid());
        let ps = &spec.params;
        let s = |t: &str| parse_scalar(t, ps).unwrap();
        assert_eq!(spec.d, s("-c0"));
        assert_eq!(spec.u_terms[&(2, 0, 0)], s("(i/4)*(c1 - c3 - i*c2)"));
        assert_eq!(spec.u_terms[&(1, 1, 0)], s("(i/2)*(c1 + c3)"));
        assert_eq!(spec.u_terms[&(0, 2, 0)], s("(i/4)*(c1 - c3 + i*c2)"));
        // −xu complexifies: dz/dT gets (−iσ)(x+iy parts) with only X≡0, Y=−xu
        // dz/dT = z + (i·(−1))·i·(−xu)∘S = z − (z+w)u/2 ... with σ=−1 the
        // scale is +i, giving +u(z+w)/2
        assert_eq!(spec.z_terms[&(1, 0, 1)], s("1/2"));
        assert_eq!(spec.z_terms[&(0, 1, 1)], s("1/2"));
        assert_eq!(spec.w_terms[&(1, 0, 1)], s("-1/2"));
        assert_eq!(spec.w_terms[&(0, 1, 1)], s("-1/2"));
    }

    #[test]
    fn complexify_realify_roundtrip() {
        let spec = moon_rand();
        let back = spec.complexify().realify(spec.orientation).unwrap();
        assert_eq!(spec, back);
        // embedded 2D system, positive orientation
        let ps = ParamSet::new(vec![ParamDescriptor::real("a")]).unwrap();
        let a = Scalar::param(&ps, 0);
        let e = embed_2d(
            &ps,
            &[((2, 0), a.clone())].into_iter().collect(),
            &[((1, 1), a)].into_iter().collect(),
            1,
            3,
        );
        assert!(e.validate().is_valid());
        let back = e.complexify().realify(1).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn linear_system_complexifies_to_linear() {
        let ps = ParamSet::new(vec![ParamDescriptor::real_nonzero("dd")]).unwrap();
        let spec = RealSystemSpec {
            params: ps.clone(),
            d: Scalar::param(&ps, 0),
            orientation: 1,
            x_terms: TermMap::new(),
            y_terms: TermMap::new(),
            u_terms: TermMap::new(),
            max_degree: 2,
        };
        let c = spec.complexify();
        assert!(c.z_terms.is_empty() && c.w_terms.is_empty() && c.u_terms.is_empty());
        assert_eq!(c.d, Scalar::param(&ps, 0));
        let r = c.realify(1).unwrap();
        assert_eq!(r, spec);
    }

    #[test]
    fn invariant_plane_detection() {
        // generic Moon–Rand: z², zw, w² terms survive on u = 0
        let generic = moon_rand().complexify();
        assert_eq!(generic.check_invariant_plane().0, false);

        // c1 = c2 = c3 = 0: invariant with cofactor i·(−c0)
        let ps = generic.params.clone();
        let target = ps.without(&["c1", "c2", "c3"]).unwrap();
        let values = vec![
            Scalar::param(&target, 0),
            Scalar::zero(&target),
            Scalar::zero(&target),
            Scalar::zero(&target),
        ];
        let reduced = generic.substitute_params(&target, &values).unwrap();
        let (inv, cof) = reduced.check_invariant_plane();
        assert!(inv);
        let cof = cof.unwrap();
        assert_eq!(cof.num_terms(), 1);
        assert_eq!(
            cof.coeff((0, 0, 0)),
            parse_scalar("-i*c0", &target).unwrap()
        );
    }

    #[test]
    fn substitution_reduces_moon_rand_u_equation() {
        let spec = moon_rand();
        let target = spec.params.without(&["c1", "c2", "c3"]).unwrap();
        let values = vec![
            Scalar::param(&target, 0),
            Scalar::zero(&target),
            Scalar::zero(&target),
            Scalar::zero(&target),
        ];
        let reduced = spec.substitute_params(&target, &values).unwrap();
        assert!(reduced.u_terms.is_empty());
        assert_eq!(reduced.d, Scalar::param(&target, 0));
        assert!(reduced.validate().is_valid());
    }
}
