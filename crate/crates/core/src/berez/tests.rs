use super::*;
use crate::random;
use crate::scalars::{rat, Interval, ScalarExpr};

fn f(dom: &DomainSpec, s: &str) -> GradedFunction {
    GradedFunction::parse(dom, s).unwrap()
}

fn z2(names: [&str; 3], x_box: Option<&str>) -> DomainSpec {
    let mut b = DomainSpec::builder(1)
        .base(names[0])
        .generator(names[1], "(1)".parse().unwrap())
        .generator(names[2], "(1)".parse().unwrap());
    if let Some(iv) = x_box {
        b = b.interval(names[0], Interval::parse(iv).unwrap());
    }
    b.build().unwrap()
}

fn z22(names: [&str; 4], t: u32, x_box: Option<&str>) -> DomainSpec {
    let mut b = DomainSpec::builder(2)
        .base(names[0])
        .generator(names[1], "(1,1)".parse().unwrap())
        .generator(names[2], "(0,1)".parse().unwrap())
        .generator(names[3], "(1,0)".parse().unwrap())
        .truncation(t);
    if let Some(iv) = x_box {
        b = b.interval(names[0], Interval::parse(iv).unwrap());
    }
    b.build().unwrap()
}

fn morphism(src: &DomainSpec, tgt: &DomainSpec, pairs: &[(&str, &str)]) -> CoordMorphism {
    let named = pairs.iter().map(|(k, v)| (k.to_string(), f(src, v))).collect();
    CoordMorphism::from_named(src, tgt, &named).unwrap()
}

fn ct2() -> CoordMorphism {
    let mu = z2(["x", "xi1", "xi2"], Some("[0,1]"));
    let nu = z2(["y", "eta1", "eta2"], Some("[0,1]"));
    morphism(&mu, &nu, &[("y", "x + xi1*xi2"), ("eta1", "xi1"), ("eta2", "xi2")])
}

fn ct1(t: u32) -> CoordMorphism {
    let mu = z22(["x", "y", "xi", "eta"], t, Some("[0,1]"));
    let nu = z22(["X", "Y", "XI", "H"], t, Some("[0,1]"));
    morphism(&mu, &nu, &[("X", "x"), ("Y", "y + xi*eta"), ("XI", "xi"), ("H", "eta")])
}

fn registry() -> IntegralRegistry {
    IntegralRegistry::parse(
        "integral alpha [0,1] = 1\nsupport alpha compact\nintegral beta [0,1] = 2\nsupport beta compact\n",
    )
    .unwrap()
}

/// Section with coefficient `g` in the target chart of `phi`, completed to
/// the source chart.
fn glued(phi: &CoordMorphism, g: Coefficient) -> BerSection {
    let mut s = BerSection::new();
    s.add_chart("mu", phi.source()).unwrap();
    s.add_chart("nu", phi.target()).unwrap();
    s.set_coefficient("nu", g).unwrap();
    s.add_transition("mu", "nu", phi.clone()).unwrap();
    s.complete().unwrap();
    s
}

fn function(s: &BerSection, chart: &str) -> GradedFunction {
    match s.coefficient(chart).unwrap() {
        Coefficient::Function(g) => g.clone(),
        Coefficient::Laurent(_) => panic!("expected a function"),
    }
}

fn laurent(s: &BerSection, chart: &str) -> LaurentFunction {
    match s.coefficient(chart).unwrap() {
        Coefficient::Laurent(l) => l.clone(),
        Coefficient::Function(_) => panic!("expected a Laurent series"),
    }
}

#[test]
fn volume_factors() {
    assert_eq!(ber_volume_transform(&ct2()).unwrap(), f(ct2().source(), "1"));
    assert_eq!(ber_volume_transform(&ct1(4)).unwrap(), f(ct1(4).source(), "1"));
    let mu = z2(["x", "xi1", "xi2"], None);
    let nu = z2(["y", "eta1", "eta2"], None);
    let scale = morphism(&mu, &nu, &[("y", "2*x"), ("eta1", "3*xi1"), ("eta2", "xi2 + xi1")]);
    assert_eq!(ber_volume_transform(&scale).unwrap(), f(&mu, "2/3"));
    let v = BerVolume::new(&nu, None).unwrap();
    assert_eq!(v.to_string(), "[Omega(y, eta1, eta2)]");
    let (w, k) = BerVolume::new(&mu, None).unwrap().transform(&scale).unwrap();
    assert_eq!(w.chart(), &nu);
    assert_eq!(k, f(&mu, "2/3"));
}

#[test]
fn berezin_integral_examples() {
    let reg = registry();
    let mu = z2(["x", "xi1", "xi2"], Some("[0,1]"));
    assert_eq!(integrate_z2(&f(&mu, "alpha(x)*xi1*xi2 + x"), &reg).unwrap(), rat(1, 1));
    assert_eq!(integrate_z2(&f(&mu, "x*xi1 + 3"), &reg).unwrap(), rat(0, 1));
    let open = z2(["x", "xi1", "xi2"], None);
    assert!(integrate_z2(&f(&open, "xi1*xi2"), &reg).is_err());
}

#[test]
fn z2_counterexample() {
    let phi = ct2();
    let s = glued(&phi, Coefficient::Function(f(phi.target(), "y")));
    let reg = registry();
    assert_eq!(function(&s, "mu"), f(phi.source(), "x + xi1*xi2"));
    assert_eq!(integrate_z2(&function(&s, "nu"), &reg).unwrap(), rat(0, 1));
    assert_eq!(integrate_z2(&function(&s, "mu"), &reg).unwrap(), rat(1, 1));
    assert!(s.glue_check().unwrap().ok());
}

#[test]
fn z22_counterexample() {
    let phi = ct1(4);
    let g = f(phi.target(), "alpha(X)*Y");
    assert!(!is_compact_support_in_y(&g).unwrap());
    let s = glued(&phi, Coefficient::Function(g));
    let reg = registry();
    assert_eq!(function(&s, "mu"), f(phi.source(), "alpha(x)*y + alpha(x)*xi*eta"));
    assert_eq!(integrate_z22_naive(&function(&s, "nu"), &reg).unwrap(), rat(0, 1));
    assert_eq!(integrate_z22_naive(&function(&s, "mu"), &reg).unwrap(), rat(1, 1));
    assert_eq!(integrate_z22_naive(&GradedFunction::zero(phi.source()), &reg).unwrap(), rat(0, 1));
}

#[test]
fn compact_support_criterion() {
    let d = z22(["X", "Y", "XI", "H"], 4, None);
    assert!(is_compact_support_in_y(&f(&d, "alpha(X)*XI*H")).unwrap());
    assert!(is_compact_support_in_y(&f(&d, "alpha(X)*Y^2*XI*H")).unwrap());
    assert!(!is_compact_support_in_y(&f(&d, "alpha(X)*Y + XI*H")).unwrap());
    assert!(is_compact_support_in_y(&f(&z2(["x", "a", "b"], None), "x")).is_err());
}

#[test]
fn laurent_pullback_of_inverse_pole() {
    let phi = ct1(4);
    let l = LaurentFunction::parse(phi.target(), "Y", "Y^-1").unwrap();
    let pulled = l.pullback(&phi).unwrap();
    let want = LaurentFunction::parse(phi.source(), "y", "y^-1 - y^-2*xi*eta").unwrap();
    assert!(pulled.agrees_with(&want), "{pulled}");
    let id = CoordMorphism::identity(phi.target());
    let g = LaurentFunction::parse(phi.target(), "Y", "alpha(X)*Y^-2*XI*H + X*Y^-1 + Y").unwrap();
    assert!(g.pullback(&id).unwrap().agrees_with(&g));
}

#[test]
fn laurent_pullback_needs_localizable_pole() {
    let mu = z22(["x", "y", "xi", "eta"], 4, None);
    let nu = z22(["X", "Y", "XI", "H"], 4, None);
    let phi = morphism(&mu, &nu, &[("X", "x"), ("Y", "xi*eta"), ("XI", "xi"), ("H", "eta")]);
    let l = LaurentFunction::parse(&nu, "Y", "Y^-1").unwrap();
    assert!(l.pullback(&phi).is_err());
}

#[test]
fn residue_examples() {
    let reg = registry();
    let d = z22(["x", "y", "xi", "eta"], 6, Some("[0,1]"));
    let l = LaurentFunction::parse(&d, "y", "alpha(x)*y^-1*xi*eta + x*y^-2").unwrap();
    assert_eq!(integrate_z22_residue(&l, &reg).unwrap(), rat(1, 1));
    let p = LaurentFunction::parse(&d, "y", "alpha(x)*xi*eta + y").unwrap();
    assert_eq!(integrate_z22_residue(&p, &reg).unwrap(), rat(0, 1));
}

#[test]
fn residue_invariant_under_ct1() {
    let reg = registry();
    let phi = ct1(6);
    let g = LaurentFunction::parse(phi.target(), "Y", "alpha(X)*Y^-1*XI*H").unwrap();
    let s = glued(&phi, Coefficient::Laurent(g));
    assert_eq!(integrate_z22_residue(&laurent(&s, "nu"), &reg).unwrap(), rat(1, 1));
    assert_eq!(integrate_z22_residue(&laurent(&s, "mu"), &reg).unwrap(), rat(1, 1));
    assert!(s.glue_check().unwrap().ok());
}

#[test]
fn randomized_residue_invariance_and_coherence() {
    let reg = registry();
    let nu = z22(["X", "Y", "XI", "H"], 6, Some("[-1,2]"));
    for seed in 0..6 {
        let mut rng = random::rng(seed);
        let phi = random::ct1_type(&mut rng, &nu, seed % 2 == 0);
        let g = LaurentFunction::parse(
            &nu,
            "Y",
            "alpha(X)*Y^-1*XI*H + beta(X)*Y^-2*XI*H + X*alpha(X)*Y^-1 + beta(X)*XI*H + alpha(X)*Y^-3*XI*H",
        )
        .unwrap();
        let s = glued(&phi, Coefficient::Laurent(g.clone()));
        let a = integrate_z22_residue(&g, &reg).unwrap();
        let b = integrate_z22_residue(&laurent(&s, "mu"), &reg).unwrap();
        assert_eq!(a, b, "seed {seed}");

        // Coherence: (psi o phi)~* = phi~* o psi~*.
        let psi = random::ct1_type(&mut rng, phi.source(), true);
        let comp = phi.compose(&psi).unwrap();
        let lhs = g.pullback(&comp).unwrap();
        let rhs = g.pullback(&phi).unwrap().pullback(&psi).unwrap();
        assert!(lhs.agrees_with(&rhs), "seed {seed}: {lhs} vs {rhs}");
    }
}

#[test]
fn naive_invariance_for_compact_sections() {
    let reg = registry();
    let nu = z22(["X", "Y", "XI", "H"], 4, Some("[-1,2]"));
    for seed in 0..8 {
        let mut rng = random::rng(100 + seed);
        let phi = random::ct1_type(&mut rng, &nu, true);
        let g = random::compact_coefficient(&mut rng, &nu, &["alpha", "beta"], 0.6, |e| e == [1, 0, 0]);
        assert!(is_compact_support_in_y(&g).unwrap());
        let s = glued(&phi, Coefficient::Function(g.clone()));
        let pulled = function(&s, "mu");
        assert!(is_compact_support_in_y(&pulled).unwrap(), "seed {seed}");
        assert_eq!(
            integrate_z22_naive(&g, &reg).unwrap(),
            integrate_z22_naive(&pulled, &reg).unwrap(),
            "seed {seed}"
        );
    }
}

#[test]
fn z2_invariance_under_shears_and_affine_maps() {
    let reg = registry();
    let nu = DomainSpec::builder(1)
        .base("y")
        .generator("eta1", "(1)".parse().unwrap())
        .generator("eta2", "(1)".parse().unwrap())
        .generator("eta3", "(1)".parse().unwrap())
        .interval("y", Interval::parse("[-1,2]").unwrap())
        .build()
        .unwrap();
    for seed in 0..8 {
        let mut rng = random::rng(200 + seed);
        let phi = if seed % 2 == 0 {
            random::z2_shear(&mut rng, &nu)
        } else {
            random::z2_affine(&mut rng, &nu)
        };
        let g = random::compact_coefficient(&mut rng, &nu, &["alpha", "beta"], 0.7, |_| false);
        let s = glued(&phi, Coefficient::Function(g.clone()));
        assert_eq!(
            integrate_z2(&g, &reg).unwrap(),
            integrate_z2(&function(&s, "mu"), &reg).unwrap(),
            "seed {seed}"
        );
    }
}

#[test]
fn glue_check_reports_mismatch_and_coherence() {
    let phi = ct2();
    let mut s = BerSection::new();
    s.add_chart("mu", phi.source()).unwrap();
    s.add_chart("nu", phi.target()).unwrap();
    s.set_coefficient("nu", Coefficient::Function(f(phi.target(), "y"))).unwrap();
    s.set_coefficient("mu", Coefficient::Function(f(phi.source(), "x"))).unwrap();
    s.add_transition("mu", "nu", phi.clone()).unwrap();
    let r = s.glue_check().unwrap();
    assert!(!r.ok());
    assert_eq!(r.overlaps[0].expected, "x + xi1*xi2");

    // Three charts: mu -> nu -> rho and mu -> rho.
    let rho = z2(["z", "t1", "t2"], None);
    let nu_open = z2(["y", "eta1", "eta2"], None);
    let mu_open = z2(["x", "xi1", "xi2"], None);
    let a = morphism(&mu_open, &nu_open, &[("y", "x + xi1*xi2"), ("eta1", "xi1"), ("eta2", "2*xi2")]);
    let b = morphism(&nu_open, &rho, &[("z", "3*y"), ("t1", "eta1 + eta2"), ("t2", "eta2")]);
    let mut s = BerSection::new();
    s.add_chart("mu", &mu_open).unwrap();
    s.add_chart("nu", &nu_open).unwrap();
    s.add_chart("rho", &rho).unwrap();
    s.set_coefficient("rho", Coefficient::Function(f(&rho, "z*t1*t2 + sin(z)"))).unwrap();
    s.add_transition("nu", "rho", b.clone()).unwrap();
    s.add_transition("mu", "nu", a.clone()).unwrap();
    s.add_transition("mu", "rho", b.compose(&a).unwrap()).unwrap();
    s.complete().unwrap();
    let r = s.glue_check().unwrap();
    assert_eq!(r.overlaps.len(), 3);
    assert_eq!(r.coherence.len(), 1);
    assert!(r.ok());
    assert!(s.add_transition("rho", "mu", a).is_err());
}

fn degs(list: &[&str]) -> Vec<Degree> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn delta_complex() {
    let c = DeltaComplex::new(&degs(&["(0,0)", "(1,1)", "(0,1)"]), None, 6).unwrap();
    assert_eq!(c.gamma(), "(0,1)".parse().unwrap());
    let d = c.delta();
    assert!((&d * &d).is_zero());
    let om = c.omega();
    assert_eq!(c.cohomological_degree(&om), Some(3));
    assert!(c.apply(&om).unwrap().is_zero());
    assert!(DeltaComplex::new(&degs(&["(0,0)"]), Some("(1,1)".parse().unwrap()), 6).is_err());
    let big = random::monomials(c.domain(), 5, 5).pop().unwrap();
    let k = GradedFunction::monomial(c.domain(), big, ScalarExpr::one());
    assert!(matches!(c.apply(&k), Err(Error::Truncation(_))));
}

#[test]
fn delta_squares_to_zero_on_random_elements() {
    use rand::Rng;
    let shapes = [
        vec!["(0)", "(1)"],
        vec!["(1)", "(1)", "(0)"],
        vec!["(0,0)", "(1,0)", "(0,1)", "(1,1)"],
        vec!["(0,1,1)", "(1,0,0)"],
    ];
    for (i, shape) in shapes.iter().enumerate() {
        let c = DeltaComplex::new(&degs(shape), None, 6).unwrap();
        let mut rng = random::rng(300 + i as u64);
        let mut k = GradedFunction::zero(c.domain());
        for e in random::monomials(c.domain(), 0, 2) {
            if rng.gen_bool(0.5) {
                k = &k + &GradedFunction::monomial(c.domain(), e, ScalarExpr::from_int(rng.gen_range(-3..=3)));
            }
        }
        let dk = c.apply(&k).unwrap();
        assert!(c.apply(&dk).unwrap().is_zero(), "shape {shape:?}");
        assert!(c.apply(&c.omega()).unwrap().is_zero(), "shape {shape:?}");
    }
}
