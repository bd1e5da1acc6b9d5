//! Seeded random generators for graded functions, matrices and coordinate
//! changes, used by property tests and the CLI self-checks.

use std::collections::BTreeMap;

use rand::Rng;

use crate::gfun::{DomainSpec, Exponents, GradedFunction};
use crate::gmat::GradedMatrix;
use crate::grading::{standard_order, Degree};
use crate::morph::CoordMorphism;
use crate::scalars::{rat, Interval, Rational, ScalarExpr};

pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as TestRng;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

/// All monomials of weight `min_weight..=max_weight` (capped by the truncation).
pub fn monomials(dom: &DomainSpec, min_weight: u32, max_weight: u32) -> Vec<Exponents> {
    let q = dom.generators().len();
    let max_weight = max_weight.min(dom.truncation());
    let mut out = Vec::new();
    let mut cur = vec![0i16; q];
    fn rec(dom: &DomainSpec, i: usize, left: u32, min: u32, used: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i == cur.len() {
            if used >= min {
                out.push(cur.clone());
            }
            return;
        }
        let cap = if dom.is_odd(i) { left.min(1) } else { left };
        for e in 0..=cap {
            cur[i] = e as i16;
            rec(dom, i + 1, left - e, min, used + e, cur, out);
        }
        cur[i] = 0;
    }
    rec(dom, 0, max_weight, min_weight, 0, &mut cur, &mut out);
    out
}

/// A small polynomial in the base variables with integer coefficients.
pub fn scalar<R: Rng>(rng: &mut R, dom: &DomainSpec) -> ScalarExpr {
    let mut s = ScalarExpr::from_int(rng.gen_range(-3..=3));
    for v in dom.base_vars() {
        if rng.gen_bool(0.5) {
            let c = ScalarExpr::from_int(rng.gen_range(-2..=2));
            s = &s + &(&c * &ScalarExpr::var(v));
        }
    }
    s
}

fn nonzero_int<R: Rng>(rng: &mut R) -> i64 {
    let v = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// A random homogeneous function of the given degree with weight in
/// `min_weight..=T`; each admissible monomial is kept with probability `density`.
pub fn homogeneous<R: Rng>(rng: &mut R, dom: &DomainSpec, degree: &Degree, min_weight: u32, density: f64) -> GradedFunction {
    let mut f = GradedFunction::zero(dom);
    for e in monomials(dom, min_weight, dom.truncation()) {
        let m = GradedFunction::monomial(dom, e, ScalarExpr::one());
        if !m.is_homogeneous_of(degree) || !rng.gen_bool(density) {
            continue;
        }
        f = &f + &m.scale(&scalar(rng, dom));
    }
    f
}

/// A random matrix of the given shape and degree.
pub fn matrix<R: Rng>(rng: &mut R, dom: &DomainSpec, rows: &[usize], cols: &[usize], degree: &Degree, density: f64) -> GradedMatrix {
    let order = standard_order(dom.n()).unwrap();
    let lab = |shape: &[usize]| -> Vec<Degree> {
        shape
            .iter()
            .zip(&order)
            .flat_map(|(&k, d)| std::iter::repeat(*d).take(k))
            .collect()
    };
    let (rl, cl) = (lab(rows), lab(cols));
    let mut entries = Vec::new();
    for r in &rl {
        for c in &cl {
            entries.push(homogeneous(rng, dom, &(*r + *c + *degree), 0, density));
        }
    }
    GradedMatrix::new(dom, rows.to_vec(), cols.to_vec(), *degree, entries).expect("degree-legal by construction")
}

/// A random degree-zero matrix whose diagonal blocks have invertible bodies.
pub fn invertible_matrix<R: Rng>(rng: &mut R, dom: &DomainSpec, shape: &[usize], density: f64) -> GradedMatrix {
    let zero = Degree::zero(dom.n()).unwrap();
    loop {
        let m = matrix(rng, dom, shape, shape, &zero, density);
        let id = GradedMatrix::identity(dom, shape.to_vec());
        let k = GradedFunction::constant(dom, ScalarExpr::from_int(nonzero_int(rng) * 3));
        let m = m.checked_add(&id.scalar_mul(&k).unwrap()).unwrap();
        if m.block_inverse().is_ok() {
            return m;
        }
    }
}

/// A random coordinate change of the general shape: every target coordinate
/// gets a random value of its own degree. Bodies of base values are affine
/// with a nonzero slope on the matching source variable, and generator values
/// contain a nonzero multiple of the matching source generator, so the result
/// is invertible whenever the shapes agree.
pub fn morphism<R: Rng>(rng: &mut R, source: &DomainSpec, target: &DomainSpec, density: f64) -> CoordMorphism {
    let zero = Degree::zero(source.n()).unwrap();
    let mut values = Vec::new();
    for (i, _) in target.base_vars().iter().enumerate() {
        let mut v = homogeneous(rng, source, &zero, 1, density);
        let mut body = ScalarExpr::from_int(rng.gen_range(-2..=2));
        for (j, x) in source.base_vars().iter().enumerate() {
            let c = if i == j { nonzero_int(rng) } else { rng.gen_range(-1..=1) };
            body = &body + &(&ScalarExpr::from_int(c) * &ScalarExpr::var(x));
        }
        v = &v + &GradedFunction::constant(source, body);
        values.push(v);
    }
    for (k, g) in target.generators().iter().enumerate() {
        let mut v = homogeneous(rng, source, &g.degree, 1, density);
        let rank = target.generators()[..k].iter().filter(|h| h.degree == g.degree).count();
        let matching = source.generators().iter().filter(|h| h.degree == g.degree).nth(rank);
        if let Some(h) = matching {
            let c = GradedFunction::constant(source, ScalarExpr::from_int(nonzero_int(rng)));
            v = &v + &(&c * &GradedFunction::coordinate(source, &h.name).unwrap());
        }
        values.push(v);
    }
    CoordMorphism::new(source, target, values).expect("degree-legal by construction")
}

fn small_poly<R: Rng>(rng: &mut R, x: &str) -> ScalarExpr {
    let a = ScalarExpr::from_int(rng.gen_range(-2..=2));
    let b = ScalarExpr::from_int(rng.gen_range(-2..=2));
    &a + &(&b * &ScalarExpr::var(x))
}

fn positive_rational<R: Rng>(rng: &mut R) -> Rational {
    const CHOICES: [(i64, i64); 5] = [(1, 1), (2, 1), (1, 2), (3, 1), (2, 3)];
    let (p, q) = CHOICES[rng.gen_range(0..CHOICES.len())];
    rat(p, q)
}

/// Generators of a `1|(1,1,1)` Z2^2 chart: the base variable, then the
/// generators of degree (1,1), (0,1), (1,0).
pub(crate) fn z22_names(dom: &DomainSpec) -> Option<(String, String, String, String)> {
    if dom.n() != 2 || dom.dimension().counts() != [1, 1, 1, 1] {
        return None;
    }
    let g = dom.generators();
    Some((dom.base_vars()[0].clone(), g[0].name.clone(), g[1].name.clone(), g[2].name.clone()))
}

/// A transition between `1|(1,1,1)` Z2^2 charts of the shape
///
/// ```text
/// X = s x + b + g(x) y ξη            Ξ = c ξ + k(x) y η
/// Y = u y + h(x) ξη + p(x) y^3        H = d η + l(x) y ξ
/// ```
///
/// with `s > 0`. With `unit_y` the coefficient `u` is 1, otherwise a random
/// nonzero constant. The source box is the preimage of the target box, if
/// the target declares one.
pub fn ct1_type<R: Rng>(rng: &mut R, target: &DomainSpec, unit_y: bool) -> CoordMorphism {
    let (tx, ty, txi, teta) = z22_names(target).expect("a 1|(1,1,1) Z2^2 chart");
    let s = positive_rational(rng);
    let b = rat(rng.gen_range(-2..=2), 2);
    let mut builder = DomainSpec::builder(2)
        .name("mu")
        .base("x")
        .generator("y", "(1,1)".parse().unwrap())
        .generator("xi", "(0,1)".parse().unwrap())
        .generator("eta", "(1,0)".parse().unwrap())
        .truncation(target.truncation());
    if let Some(iv) = target.interval(&tx) {
        let lo = (&iv.lo - &b) / &s;
        let hi = (&iv.hi - &b) / &s;
        builder = builder.interval("x", Interval::new(lo, hi).unwrap());
    }
    let src = builder.build().unwrap();
    let f = |s: &str| GradedFunction::parse(&src, s).unwrap();
    let sc = |e: ScalarExpr| GradedFunction::constant(&src, e);
    let mono = |c: ScalarExpr, m: &str| &sc(c) * &f(m);
    let u = if unit_y {
        ScalarExpr::one()
    } else {
        ScalarExpr::from_int(nonzero_int(rng))
    };
    let x_val = &sc(&ScalarExpr::from_rational(s) * &ScalarExpr::var("x") + ScalarExpr::from_rational(b))
        + &mono(small_poly(rng, "x"), "y*xi*eta");
    let y_val = &(&mono(u, "y") + &mono(small_poly(rng, "x"), "xi*eta")) + &mono(small_poly(rng, "x"), "y^3");
    let xi_val = &mono(ScalarExpr::from_int(nonzero_int(rng)), "xi") + &mono(small_poly(rng, "x"), "y*eta");
    let eta_val = &mono(ScalarExpr::from_int(nonzero_int(rng)), "eta") + &mono(small_poly(rng, "x"), "y*xi");
    let mut named = BTreeMap::new();
    named.insert(tx, x_val);
    named.insert(ty, y_val);
    named.insert(txi, xi_val);
    named.insert(teta, eta_val);
    CoordMorphism::from_named(&src, target, &named).expect("degree-legal by construction")
}

/// Source chart `x | xi1..xiq` over Z2 for a `1|q` target, with the given box on `x`.
fn z2_source(target: &DomainSpec, x_box: Option<Interval>) -> DomainSpec {
    let mut b = DomainSpec::builder(1).name("mu").base("x").truncation(target.truncation());
    for i in 1..=target.generators().len() {
        b = b.generator(&format!("xi{i}"), "(1)".parse().unwrap());
    }
    if let Some(iv) = x_box {
        b = b.interval("x", iv);
    }
    b.build().unwrap()
}

fn z2_base(target: &DomainSpec) -> String {
    assert!(target.n() == 1 && target.base_vars().len() == 1, "a 1|q Z2 chart");
    target.base_vars()[0].clone()
}

/// An odd shear of a `1|q` Z2 chart with identity body:
/// `y = x + (even nilpotent part)`, `eta = A xi + (higher odd terms)` with `A`
/// unitriangular up to a nonzero diagonal.
pub fn z2_shear<R: Rng>(rng: &mut R, target: &DomainSpec) -> CoordMorphism {
    let y = z2_base(target);
    let src = z2_source(target, target.interval(&y).cloned());
    let q = src.generators().len();
    let xi = |i: usize| GradedFunction::coordinate(&src, &format!("xi{}", i + 1)).unwrap();
    let sc = |e: ScalarExpr| GradedFunction::constant(&src, e);
    let even = Degree::zero(1).unwrap();
    let odd: Degree = "(1)".parse().unwrap();
    let mut named = BTreeMap::new();
    let mut body = sc(ScalarExpr::var("x"));
    for e in monomials(&src, 2, src.truncation()) {
        if mono_is(&src, &e, &even) && rng.gen_bool(0.6) {
            body = &body + &GradedFunction::monomial(&src, e, small_poly(rng, "x"));
        }
    }
    named.insert(y, body);
    for (k, g) in target.generators().iter().enumerate() {
        let mut v = &sc(ScalarExpr::from_int(nonzero_int(rng))) * &xi(k);
        for j in k + 1..q {
            if rng.gen_bool(0.5) {
                v = &v + &(&sc(ScalarExpr::from_int(rng.gen_range(-2..=2))) * &xi(j));
            }
        }
        for e in monomials(&src, 3, src.truncation()) {
            if mono_is(&src, &e, &odd) && rng.gen_bool(0.5) {
                v = &v + &GradedFunction::monomial(&src, e, small_poly(rng, "x"));
            }
        }
        named.insert(g.name.clone(), v);
    }
    CoordMorphism::from_named(&src, target, &named).expect("degree-legal by construction")
}

/// An affine change of the base of a `1|q` Z2 chart, `y = s x + b` with
/// `s > 0`, with generators renamed only. The source box is the preimage of
/// the target box.
pub fn z2_affine<R: Rng>(rng: &mut R, target: &DomainSpec) -> CoordMorphism {
    let y = z2_base(target);
    let s = positive_rational(rng);
    let b = rat(rng.gen_range(-2..=2), 2);
    let x_box = target
        .interval(&y)
        .map(|iv| Interval::new((&iv.lo - &b) / &s, (&iv.hi - &b) / &s).unwrap());
    let src = z2_source(target, x_box);
    let mut named = BTreeMap::new();
    let body = &ScalarExpr::from_rational(s) * &ScalarExpr::var("x");
    named.insert(y, GradedFunction::constant(&src, &body + &ScalarExpr::from_rational(b)));
    for (k, g) in target.generators().iter().enumerate() {
        named.insert(g.name.clone(), GradedFunction::coordinate(&src, &format!("xi{}", k + 1)).unwrap());
    }
    CoordMorphism::from_named(&src, target, &named).expect("degree-legal by construction")
}

fn mono_is(dom: &DomainSpec, e: &[i16], d: &Degree) -> bool {
    GradedFunction::monomial(dom, e.to_vec(), ScalarExpr::one()).is_homogeneous_of(d)
}

/// A section coefficient `sum c * bump(x) * monomial` with integer `c` on a
/// chart with one base variable, using the given compactly supported
/// symbols. Monomials
/// for which `skip` holds are left out.
pub fn compact_coefficient<R: Rng>(
    rng: &mut R,
    dom: &DomainSpec,
    bumps: &[&str],
    density: f64,
    skip: impl Fn(&[i16]) -> bool,
) -> GradedFunction {
    let x = dom.base_vars()[0].clone();
    let mut f = GradedFunction::zero(dom);
    for e in monomials(dom, 0, dom.truncation()) {
        if skip(&e) || !rng.gen_bool(density) {
            continue;
        }
        let bump = bumps[rng.gen_range(0..bumps.len())];
        let c = &ScalarExpr::apply(bump, vec![ScalarExpr::var(&x)]) * &ScalarExpr::from_int(nonzero_int(rng));
        f = &f + &GradedFunction::monomial(dom, e, c);
    }
    f
}
