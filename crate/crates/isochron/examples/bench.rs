//! Quick timing harness for symbolic engine runs (not part of the test
//! suite): `cargo run --release --example bench -- <case> <order>`.

use std::collections::BTreeMap;
use std::time::Instant;

use isochron::expr::parse_scalar;
use isochron::nfengine::{compute_f, compute_g};
use isochron::params::{ParamDescriptor, ParamSet};
use isochron::sysmodel::{ComplexSystemSpec, RealSystemSpec};

fn moon_rand() -> ComplexSystemSpec {
    let ps = ParamSet::new(vec![
        ParamDescriptor::real_nonzero("c0"),
        ParamDescriptor::real("c1"),
        ParamDescriptor::real("c2"),
        ParamDescriptor::real("c3"),
    ])
    .unwrap();
    let s = |t: &str| parse_scalar(t, &ps).unwrap();
    RealSystemSpec {
        params: ps.clone(),
        d: s("c0"),
        orientation: -1,
        x_terms: BTreeMap::new(),
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
    .complexify()
}

fn quad() -> ComplexSystemSpec {
    let ps = ParamSet::new(vec![
        ParamDescriptor::real_nonzero("r"),
        ParamDescriptor::complex("a1"),
        ParamDescriptor::complex("b1"),
        ParamDescriptor::complex("c1"),
        ParamDescriptor::complex("a2"),
        ParamDescriptor::complex("b2"),
        ParamDescriptor::complex("c2"),
        ParamDescriptor::complex("a3"),
        ParamDescriptor::complex("b3"),
        ParamDescriptor::complex("c3"),
    ])
    .unwrap();
    let s = |t: &str| parse_scalar(t, &ps).unwrap();
    ComplexSystemSpec {
        params: ps.clone(),
        d: s("r"),
        z_terms: [
            ((2, 0, 0), s("a1")),
            ((1, 1, 0), s("b1")),
            ((1, 0, 1), s("c1")),
        ]
        .into_iter()
        .collect(),
        w_terms: [
            ((1, 1, 0), s("-a2")),
            ((0, 2, 0), s("-b2")),
            ((0, 1, 1), s("-c2")),
        ]
        .into_iter()
        .collect(),
        u_terms: [
            ((1, 0, 1), s("a3")),
            ((0, 1, 1), s("b3")),
            ((0, 0, 2), s("c3")),
        ]
        .into_iter()
        .collect(),
        max_degree: 2,
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let case = args.get(1).map(String::as_str).unwrap_or("moon");
    let order: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2);
    let spec = match case {
        "moon" => moon_rand(),
        "quad" => quad(),
        other => panic!("unknown case {other}"),
    };
    let t = Instant::now();
    let (_, p) = compute_f(&spec, order).unwrap();
    println!("f done in {:?}; p_{} terms: {}", t.elapsed(), order, p[order as usize - 1].num().num_terms());
    let t = Instant::now();
    let (_, q) = compute_g(&spec, order).unwrap();
    println!("g done in {:?}; q_{} terms: {}", t.elapsed(), order, q[order as usize - 1].num().num_terms());
}
