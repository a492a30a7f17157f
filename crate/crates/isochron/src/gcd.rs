//! Multivariate polynomial gcd over Q(i).
//!
//! Content/primitive-part recursion on a chosen main variable, with a
//! subresultant polynomial remainder sequence for the primitive parts.
//! Results are canonicalized (rational content 1, sign-canonical leading
//! coefficient), so `poly_gcd(a, b)` is deterministic.

use crate::gauss::GaussianRational;
use crate::poly::ParamPoly;

/// Greatest common divisor, canonicalized. Panics when both inputs are zero.
pub fn poly_gcd(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    assert!(
        !(a.is_zero() && b.is_zero()),
        "gcd of two zero polynomials is undefined"
    );
    if a.is_zero() {
        return unit_normalize(b.canonical());
    }
    if b.is_zero() {
        return unit_normalize(a.canonical());
    }
    unit_normalize(gcd_inner(a, b).canonical())
}

/// Rotate by the Gaussian unit that gives the leading coefficient a positive
/// real part and nonnegative imaginary part; this makes the gcd (defined only
/// up to units) a single deterministic polynomial.
fn unit_normalize(p: ParamPoly) -> ParamPoly {
    use crate::gauss::GaussianRational;
    use num_traits::Signed;
    let lc = p.leading_coefficient();
    let units = [
        GaussianRational::one(),
        GaussianRational::i(),
        GaussianRational::from_int(-1),
        &GaussianRational::zero() - &GaussianRational::i(),
    ];
    for u in &units {
        let rotated = u * &lc;
        if rotated.re.is_positive() && !rotated.im.is_negative() {
            return p.scale(u);
        }
    }
    unreachable!("a nonzero Gaussian rational has a unique such rotation")
}

fn gcd_inner(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    let params = a.params();
    // any common divisor of a constant is a constant
    if a.is_constant() || b.is_constant() {
        return ParamPoly::one(params);
    }
    // the gcd can only involve variables common to both inputs
    let common: Vec<usize> = (0..params.len())
        .filter(|&v| a.depends_on(v) && b.depends_on(v))
        .collect();
    if common.is_empty() {
        return ParamPoly::one(params);
    }
    // fast path: a divisor of a polynomial in one variable is itself (up to
    // units) a polynomial in that variable, so when either input is
    // univariate the whole gcd reduces to Euclid over Q(i)[v]
    if let Some(v) = single_variable(a) {
        return univariate_against(a, b, v);
    }
    if let Some(v) = single_variable(b) {
        return univariate_against(b, a, v);
    }

    // main variable: smallest min-degree keeps the PRS short
    let var = *common
        .iter()
        .min_by_key(|&&v| a.degree_in(v).min(b.degree_in(v)))
        .unwrap();

    let ua = a.to_univariate(var);
    let ub = b.to_univariate(var);
    let (cont_a, pp_a) = content_primitive(&ua);
    let (cont_b, pp_b) = content_primitive(&ub);
    let cont_gcd = gcd_inner(&cont_a, &cont_b);

    let pp_gcd = subresultant_gcd(pp_a, pp_b);
    let (_, pp_gcd) = content_primitive(&pp_gcd);
    let pp_gcd_joined = join(params, var, &pp_gcd);
    cont_gcd.mul(&pp_gcd_joined)
}

/// The single variable a polynomial depends on, if there is exactly one.
fn single_variable(p: &ParamPoly) -> Option<usize> {
    let mut found = None;
    for v in 0..p.params().len() {
        if p.depends_on(v) {
            if found.is_some() {
                return None;
            }
            found = Some(v);
        }
    }
    found
}

/// gcd of a univariate polynomial `uni` (in variable `v`) with an arbitrary
/// polynomial: Euclid against the v-polynomials obtained by grouping the
/// other input's terms by their non-v monomial part.
fn univariate_against(uni: &ParamPoly, other: &ParamPoly, v: usize) -> ParamPoly {
    use std::collections::BTreeMap;
    let params = uni.params();
    let mut g = dense_coeffs(uni, v);
    let mut groups: BTreeMap<Vec<u32>, Vec<(u32, GaussianRational)>> = BTreeMap::new();
    for (m, c) in other.terms() {
        let mut rest = m.0.clone();
        let e = rest[v];
        rest[v] = 0;
        groups.entry(rest).or_default().push((e, c.clone()));
    }
    for terms in groups.values() {
        let deg = terms.iter().map(|&(e, _)| e).max().unwrap() as usize;
        let mut part = vec![GaussianRational::zero(); deg + 1];
        for (e, c) in terms {
            part[*e as usize] = &part[*e as usize] + c;
        }
        g = uni_gcd(g, part);
        if g.len() == 1 {
            return ParamPoly::one(params);
        }
    }
    let terms: Vec<(Vec<u32>, GaussianRational)> = g
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| {
            let mut exps = vec![0u32; params.len()];
            exps[v] = e as u32;
            (exps, c)
        })
        .collect();
    ParamPoly::from_terms(params, terms)
}

fn dense_coeffs(p: &ParamPoly, v: usize) -> Vec<GaussianRational> {
    let deg = p.degree_in(v) as usize;
    let mut out = vec![GaussianRational::zero(); deg + 1];
    for (m, c) in p.terms() {
        out[m.0[v] as usize] = &out[m.0[v] as usize] + c;
    }
    out
}

fn uni_trim(p: &mut Vec<GaussianRational>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

/// Monic Euclidean gcd over Q(i)[v] on dense coefficient vectors.
fn uni_gcd(mut f: Vec<GaussianRational>, mut g: Vec<GaussianRational>) -> Vec<GaussianRational> {
    uni_trim(&mut f);
    uni_trim(&mut g);
    while !(g.len() == 1 && g[0].is_zero()) {
        if g.len() == 1 {
            return vec![GaussianRational::one()];
        }
        // f mod g
        while f.len() >= g.len() && !(f.len() == 1 && f[0].is_zero()) {
            let shift = f.len() - g.len();
            let q = &f.last().unwrap().clone() / g.last().unwrap();
            for (i, gc) in g.iter().enumerate() {
                let t = &q * gc;
                f[shift + i] = &f[shift + i] - &t;
            }
            uni_trim(&mut f);
            if f.iter().all(|c| c.is_zero()) {
                f = vec![GaussianRational::zero()];
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    // make monic
    let lead = f.last().unwrap().clone();
    if !lead.is_one() {
        let inv = lead.inv().expect("nonzero leading coefficient");
        for c in f.iter_mut() {
            *c = &*c * &inv;
        }
    }
    f
}

/// Content (gcd of the univariate coefficients) and primitive part.
fn content_primitive(coeffs: &[ParamPoly]) -> (ParamPoly, Vec<ParamPoly>) {
    let nonzero: Vec<&ParamPoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    debug_assert!(!nonzero.is_empty());
    let mut content = nonzero[0].canonical();
    for c in &nonzero[1..] {
        if content.is_constant() {
            break;
        }
        content = gcd_inner(&content, c).canonical();
    }
    let prim = coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                c.clone()
            } else {
                c.exact_div(&content).expect("content divides coefficient")
            }
        })
        .collect();
    (content, prim)
}

fn join(params: &crate::params::ParamSet, var: usize, coeffs: &[ParamPoly]) -> ParamPoly {
    ParamPoly::from_univariate(params, var, coeffs)
}

fn deg(p: &[ParamPoly]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).expect("zero polynomial")
}

fn trim(p: &mut Vec<ParamPoly>) {
    while let Some(last) = p.last() {
        if last.is_zero() && p.len() > 1 {
            p.pop();
        } else {
            break;
        }
    }
}

fn is_zero_uni(p: &[ParamPoly]) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// Pseudo-remainder prem(f, g) = lc(g)^(deg f - deg g + 1) * f mod g.
fn pseudo_rem(f: &[ParamPoly], g: &[ParamPoly]) -> Vec<ParamPoly> {
    let dg = deg(g);
    let lc_g = g[dg].clone();
    let mut r: Vec<ParamPoly> = f.to_vec();
    let mut steps = deg(&r) as i64 - dg as i64 + 1;
    while !is_zero_uni(&r) && deg(&r) >= dg {
        let dr = deg(&r);
        let lead = r[dr].clone();
        // r = lc_g * r - lead * x^(dr-dg) * g
        for c in r.iter_mut() {
            *c = c.mul(&lc_g);
        }
        for (i, gc) in g.iter().enumerate() {
            let idx = dr - dg + i;
            r[idx] = r[idx].sub(&lead.mul(gc));
        }
        trim(&mut r);
        steps -= 1;
    }
    // keep the classical normalization lc(g)^(d+1) * f mod g
    while steps > 0 {
        for c in r.iter_mut() {
            *c = c.mul(&lc_g);
        }
        steps -= 1;
    }
    r
}

/// Divide every coefficient of `r` by `divisor`; falls back to the primitive
/// part when a division is not exact (defensive; gcd correctness only needs
/// the sequence to stay proportional to the true remainders).
fn divide_or_primitive(r: &[ParamPoly], divisor: &ParamPoly) -> Vec<ParamPoly> {
    let mut out = Vec::with_capacity(r.len());
    for c in r {
        if c.is_zero() {
            out.push(c.clone());
            continue;
        }
        match c.exact_div(divisor) {
            Some(q) => out.push(q),
            None => {
                let (_, prim) = content_primitive(r);
                return prim;
            }
        }
    }
    out
}

/// Subresultant PRS gcd of two primitive univariate polynomials with
/// `ParamPoly` coefficients. Returns an un-normalized gcd candidate.
fn subresultant_gcd(mut f: Vec<ParamPoly>, mut g: Vec<ParamPoly>) -> Vec<ParamPoly> {
    trim(&mut f);
    trim(&mut g);
    if deg(&f) < deg(&g) {
        std::mem::swap(&mut f, &mut g);
    }
    let params = f[0].params().clone();
    let one = ParamPoly::one(&params);
    // Brown's subresultant sequence; signs are dropped since only exactness
    // of the divisions matters for a gcd.
    let mut gc = one.clone();
    let mut h = one.clone();
    loop {
        let delta = (deg(&f) - deg(&g)) as u32;
        let r = pseudo_rem(&f, &g);
        if is_zero_uni(&r) {
            return g;
        }
        if deg(&r) == 0 {
            // nonzero constant remainder: coprime in the main variable
            return vec![one];
        }
        let divisor = gc.mul(&h.pow(delta));
        let next = divide_or_primitive(&r, &divisor);
        f = g;
        g = next;
        trim(&mut f);
        trim(&mut g);
        gc = f[deg(&f)].clone();
        h = match delta {
            0 => h,
            1 => gc.clone(),
            _ => gc
                .pow(delta)
                .exact_div(&h.pow(delta - 1))
                .unwrap_or_else(|| gc.clone()),
        };
    }
}
