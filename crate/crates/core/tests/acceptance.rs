//! Acceptance suite: one line per criterion, exact comparisons throughout.
//! Runs without the libtest harness so the lines are always shown.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use zgraded::berez::{self, BerSection, Coefficient, DeltaComplex, LaurentFunction};
use zgraded::random::{self, TestRng};
use zgraded::scalars::rat;
use zgraded::{
    koszul_sign, Convention, CoordMorphism, Degree, DomainSpec, FormAlgebra, GradedFunction, GradedMatrix,
    IntegralRegistry, Interval, ScalarExpr, Sign,
};

type Check = std::result::Result<String, String>;

fn deg(s: &str) -> Degree {
    s.parse().unwrap()
}

fn f(dom: &DomainSpec, s: &str) -> GradedFunction {
    GradedFunction::parse(dom, s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn z2(base: &str, gens: &[&str], t: Option<u32>, x_box: Option<&str>) -> DomainSpec {
    let mut b = DomainSpec::builder(1).base(base);
    for g in gens {
        b = b.generator(g, deg("(1)"));
    }
    if let Some(t) = t {
        b = b.truncation(t);
    }
    if let Some(iv) = x_box {
        b = b.interval(base, Interval::parse(iv).unwrap());
    }
    b.build().unwrap()
}

fn z22(names: [&str; 4], t: u32, x_box: Option<&str>) -> DomainSpec {
    let mut b = DomainSpec::builder(2)
        .base(names[0])
        .generator(names[1], deg("(1,1)"))
        .generator(names[2], deg("(0,1)"))
        .generator(names[3], deg("(1,0)"))
        .truncation(t);
    if let Some(iv) = x_box {
        b = b.interval(names[0], Interval::parse(iv).unwrap());
    }
    b.build().unwrap()
}

fn morphism(src: &DomainSpec, tgt: &DomainSpec, pairs: &[(&str, &str)]) -> CoordMorphism {
    let named: BTreeMap<String, GradedFunction> = pairs.iter().map(|(k, v)| (k.to_string(), f(src, v))).collect();
    CoordMorphism::from_named(src, tgt, &named).unwrap()
}

fn registry() -> IntegralRegistry {
    IntegralRegistry::parse("integral alpha [0,1] = 1\nsupport alpha compact\nintegral beta [0,1] = 2\nsupport beta compact\n")
        .unwrap()
}

/// A section given on the target chart of `phi`, carried to its source.
fn glued(phi: &CoordMorphism, g: Coefficient) -> std::result::Result<Coefficient, String> {
    let mut s = BerSection::new();
    let e = |e: zgraded::Error| e.to_string();
    s.add_chart("mu", phi.source()).map_err(e)?;
    s.add_chart("nu", phi.target()).map_err(e)?;
    s.set_coefficient("nu", g).map_err(e)?;
    s.add_transition("mu", "nu", phi.clone()).map_err(e)?;
    s.complete().map_err(e)?;
    Ok(s.coefficient("mu").unwrap().clone())
}

fn as_function(c: Coefficient) -> GradedFunction {
    match c {
        Coefficient::Function(g) => g,
        Coefficient::Laurent(_) => unreachable!("function sections stay functions"),
    }
}

fn as_laurent(c: Coefficient) -> LaurentFunction {
    match c {
        Coefficient::Laurent(l) => l,
        Coefficient::Function(_) => unreachable!("Laurent sections stay Laurent"),
    }
}

// 1 ------------------------------------------------------------------------

/// "xyzw - xylp" -> "x*y*z*w - x*y*l*p".
fn spell(expansion: &str) -> String {
    expansion
        .split_whitespace()
        .map(|tok| match tok {
            "+" | "-" => tok.to_string(),
            _ => tok.chars().map(String::from).collect::<Vec<_>>().join("*"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

const ROWS: [[&str; 4]; 4] = [["x", "a", "b", "c"], ["d", "y", "e", "f"], ["g", "h", "z", "l"], ["m", "n", "p", "w"]];

fn det_case(symbols: &[(&str, Option<&str>)], shape: [usize; 8], expected: &str) -> Check {
    let mut b = DomainSpec::builder(3).truncation(4);
    for (s, d) in symbols {
        b = match d {
            None => b.base(s),
            Some(d) => b.generator(s, deg(d)),
        };
    }
    let dom = b.build().unwrap();
    let data = ROWS.iter().map(|r| r.iter().map(|s| f(&dom, s)).collect()).collect();
    let m = GradedMatrix::from_rows(&dom, shape.to_vec(), shape.to_vec(), deg("(0,0,0)"), data).map_err(|e| e.to_string())?;
    let det = m.z2n_det().map_err(|e| e.to_string())?;
    let want = f(&dom, &spell(expected));
    ensure(det == want, || format!("got {det}"))?;
    let printed = det.to_string();
    Ok(format!("{} terms", printed.matches(" + ").count() + printed.matches(" - ").count() + 1))
}

fn c1_determinants() -> Check {
    let a = det_case(
        &[
            ("x", None),
            ("a", Some("(0,1,1)")),
            ("b", Some("(1,0,1)")),
            ("c", Some("(1,1,0)")),
            ("d", Some("(0,1,1)")),
            ("y", None),
            ("e", Some("(1,1,0)")),
            ("f", Some("(1,0,1)")),
            ("g", Some("(1,0,1)")),
            ("h", Some("(1,1,0)")),
            ("z", None),
            ("l", Some("(0,1,1)")),
            ("m", Some("(1,1,0)")),
            ("n", Some("(1,0,1)")),
            ("p", Some("(0,1,1)")),
            ("w", None),
        ],
        [1, 1, 1, 1, 0, 0, 0, 0],
        "xyzw - xylp - xehw - xfhp + xeln - xfzn \
         - adzw + adlp + aegw + afgp - aelm + afzm \
         - bdhw + bdln - bygw + bfgn + bylm + bfhm \
         - cdhp - cdzn - cygp + cegn - cyzm + cehm",
    )?;
    let b = det_case(
        &[
            ("x", None),
            ("a", None),
            ("b", Some("(1,1,0)")),
            ("c", Some("(1,0,1)")),
            ("d", None),
            ("y", None),
            ("e", Some("(1,1,0)")),
            ("f", Some("(1,0,1)")),
            ("g", Some("(1,1,0)")),
            ("h", Some("(1,1,0)")),
            ("z", None),
            ("l", Some("(0,1,1)")),
            ("m", Some("(1,0,1)")),
            ("n", Some("(1,0,1)")),
            ("p", Some("(0,1,1)")),
            ("w", None),
        ],
        [0, 2, 1, 1, 0, 0, 0, 0],
        "xyzw - xylp - xehw - xfhp + xeln - xfzn \
         - adzw + adlp + aegw + afgp - aelm + afzm \
         + bdhw - bdln - bygw - bfgn + bylm + bfhm \
         + cdhp + cdzn - cygp - cegn - cyzm + cehm",
    )?;
    Ok(format!("1|(1,1,1): {a}; 0|(2,1,1): {b}"))
}

// 2 ------------------------------------------------------------------------

fn c2_quaternions() -> Check {
    let one = deg("(0,0,0)");
    let (i, j, k) = (deg("(0,1,1)"), deg("(1,0,1)"), deg("(1,1,0)"));
    let s = |a: &Degree, b: &Degree| koszul_sign(a, b).unwrap();
    for (a, b) in [(&i, &j), (&j, &k), (&k, &i)] {
        ensure(s(a, b) == Sign::Minus && s(b, a) == Sign::Minus, || format!("{a} and {b} should anticommute"))?;
    }
    for a in [&one, &i, &j, &k] {
        ensure(s(&one, a) == Sign::Plus && s(a, &one) == Sign::Plus, || format!("1 and {a} should commute"))?;
    }
    // The same rule inside the algebra of graded functions.
    let dom = DomainSpec::builder(3)
        .generator("i", i)
        .generator("j", j)
        .generator("k", k)
        .truncation(2)
        .build()
        .unwrap();
    for (a, b) in [("i", "j"), ("j", "k"), ("k", "i")] {
        let ab = &f(&dom, a) * &f(&dom, b);
        let ba = &f(&dom, b) * &f(&dom, a);
        ensure(ab == -&ba && !ab.is_zero(), || format!("{a}{b} = {ab}, {b}{a} = {ba}"))?;
    }
    Ok("ij=-ji, jk=-kj, ki=-ik, 1 central".into())
}

// 3 ------------------------------------------------------------------------

fn matrix_domains() -> Vec<(DomainSpec, Vec<Vec<usize>>)> {
    vec![
        (z2("x", &["xi1", "xi2", "xi3"], Some(3), None), vec![vec![1, 1], vec![2, 1], vec![1, 2]]),
        (
            z22(["x", "y", "xi", "eta"], 4, None),
            vec![vec![1, 1, 1, 1], vec![2, 0, 1, 1], vec![1, 1, 1, 0], vec![1, 0, 1, 1]],
        ),
    ]
}

/// Block diagonal matrix with the even-labeled block `a` first.
fn block_diag(a: &GradedMatrix, d: &GradedMatrix) -> GradedMatrix {
    let dom = a.domain();
    let shape: Vec<usize> = a.row_shape().iter().zip(d.row_shape()).map(|(x, y)| x + y).collect();
    let (na, nd) = (a.nrows(), d.nrows());
    let zero = GradedFunction::zero(dom);
    let mut entries = Vec::new();
    for r in 0..na + nd {
        for c in 0..na + nd {
            entries.push(match (r < na, c < na) {
                (true, true) => a.get(r, c).clone(),
                (false, false) => d.get(r - na, c - na).clone(),
                _ => zero.clone(),
            });
        }
    }
    GradedMatrix::new(dom, shape.clone(), shape, Degree::zero(dom.n()).unwrap(), entries).unwrap()
}

fn c3_ber_multiplicative() -> Check {
    let mut pairs = 0;
    let mut special = 0;
    for (dom, shapes) in matrix_domains() {
        let order = zgraded::standard_order(dom.n()).unwrap();
        for seed in 0..100u64 {
            let mut rng = random::rng(3000 + seed);
            let shape = &shapes[seed as usize % shapes.len()];
            let l = random::invertible_matrix(&mut rng, &dom, shape, 0.5);
            let m = random::invertible_matrix(&mut rng, &dom, shape, 0.5);
            let e = |e: zgraded::Error| format!("seed {seed}: {e}");
            let lhs = l.checked_mul(&m).map_err(e)?.z2n_ber().map_err(e)?;
            let rhs = &l.z2n_ber().map_err(e)? * &m.z2n_ber().map_err(e)?;
            ensure(lhs == rhs, || format!("Z2^{} seed {seed}: {lhs} != {rhs}", dom.n()))?;
            pairs += 1;
            if seed % 5 == 0 {
                // Block diagonal: even-labeled block A, odd-labeled block D.
                let parts = |keep_even: bool| -> Vec<usize> {
                    shape
                        .iter()
                        .zip(&order)
                        .map(|(&k, d)| if d.is_even() == keep_even { k } else { 0 })
                        .collect()
                };
                let a = random::invertible_matrix(&mut rng, &dom, &parts(true), 0.5);
                let d = random::invertible_matrix(&mut rng, &dom, &parts(false), 0.5);
                let ber = block_diag(&a, &d).z2n_ber().map_err(e)?;
                let want = &a.z2n_det().map_err(e)? * &d.z2n_det().map_err(e)?.invert().map_err(e)?;
                ensure(ber == want, || format!("block diagonal seed {seed}: {ber} != {want}"))?;
                // Unitriangular factors have Berezinian one.
                let (u, _, lo) = l.udl_decompose().map_err(e)?;
                let one = GradedFunction::one(&dom);
                ensure(u.z2n_ber().map_err(e)? == one && lo.z2n_ber().map_err(e)? == one, || {
                    format!("unitriangular seed {seed}")
                })?;
                special += 1;
            }
        }
    }
    Ok(format!("{pairs} products, {special} block-diagonal and unitriangular cases"))
}

// 4 ------------------------------------------------------------------------

fn c4_udl_inverse() -> Check {
    let mut count = 0;
    for (dom, shapes) in matrix_domains() {
        for seed in 0..100u64 {
            let mut rng = random::rng(4000 + seed);
            let shape = &shapes[seed as usize % shapes.len()];
            let l = random::invertible_matrix(&mut rng, &dom, shape, 0.5);
            let e = |e: zgraded::Error| format!("seed {seed}: {e}");
            let (u, d, lo) = l.udl_decompose().map_err(e)?;
            ensure(u.checked_mul(&d).map_err(e)?.checked_mul(&lo).map_err(e)? == l, || format!("UDL seed {seed}"))?;
            let inv = l.block_inverse().map_err(e)?;
            let id = GradedMatrix::identity(&dom, shape.clone());
            ensure(l.checked_mul(&inv).map_err(e)? == id, || format!("right inverse seed {seed}"))?;
            ensure(inv.checked_mul(&l).map_err(e)? == id, || format!("left inverse seed {seed}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} matrices"))
}

// 5 ------------------------------------------------------------------------

fn c5_chain_rule() -> Check {
    let mut count = 0;
    let z2_doms = [
        z2("x", &["xi1", "xi2"], None, None),
        z2("u", &["th1", "th2"], None, None),
        z2("p", &["r1", "r2"], None, None),
    ];
    let z22_doms = [
        z22(["x", "y", "xi", "eta"], 3, None),
        z22(["u", "v", "zeta", "theta"], 3, None),
        z22(["p", "q", "r", "s"], 3, None),
    ];
    for (doms, label) in [(&z2_doms, "Z2"), (&z22_doms, "Z2^2")] {
        for seed in 0..50u64 {
            let mut rng = random::rng(5000 + seed);
            let phi = random::morphism(&mut rng, &doms[0], &doms[1], 0.5);
            let psi = random::morphism(&mut rng, &doms[1], &doms[2], 0.5);
            let e = |e: zgraded::Error| format!("{label} seed {seed}: {e}");
            let comp = psi.compose(&phi).map_err(e)?;
            let lhs = comp.modified_jacobian().map_err(e)?;
            let pulled = psi
                .modified_jacobian()
                .map_err(e)?
                .map_entries(phi.source(), |x| phi.pullback(x))
                .map_err(e)?;
            let rhs = pulled.checked_mul(&phi.modified_jacobian().map_err(e)?).map_err(e)?;
            // With even generators the algebra is truncated at weight T and
            // derivatives are determined up to weight T - 1; without them
            // nothing is truncated.
            let dom = phi.source();
            let has_even = dom.generators().iter().any(|g| g.degree.is_even());
            let t = if has_even { dom.truncation() - 1 } else { dom.truncation() };
            ensure(lhs.truncated(t) == rhs.truncated(t), || format!("{label} seed {seed}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} composable pairs"))
}

// 6 ------------------------------------------------------------------------

fn c6_pullback_golden() -> Check {
    let mu = z2("x", &["xi1", "xi2"], None, None);
    let nu = z2("y", &["eta1", "eta2"], None, None);
    let ct2 = morphism(&mu, &nu, &[("y", "x + xi1*xi2"), ("eta1", "xi1"), ("eta2", "xi2")]);
    let got = ct2.pullback(&f(&nu, "sin(y)")).map_err(|e| e.to_string())?;
    ensure(got == f(&mu, "sin(x) + cos(x)*xi1*xi2"), || format!("sin: {got}"))?;
    ensure(got.to_string() == "sin(x) + cos(x)*xi1*xi2", || format!("printed {got}"))?;

    let src = z22(["x", "y", "xi", "eta"], 4, None);
    let tgt = DomainSpec::builder(2).base("u").build().unwrap();
    let shift = morphism(&src, &tgt, &[("u", "x + y^2")]);
    let got = shift.pullback(&f(&tgt, "F(u)")).map_err(|e| e.to_string())?;
    let want = f(&src, "F(x) + F'(x)*y^2 + 1/2*F''(x)*y^4");
    ensure(got == want, || format!("Taylor: {got}"))?;
    Ok(format!("{}; {}", "sin(x) + cos(x)*xi1*xi2", got))
}

// 7 ------------------------------------------------------------------------

fn random_superfunction(rng: &mut TestRng, dom: &DomainSpec) -> GradedFunction {
    let atoms = ["F(x, y)", "sin(x)", "G(y)", "x*y"];
    let mut g = GradedFunction::zero(dom);
    for e in random::monomials(dom, 0, dom.truncation()) {
        if rng.gen_bool(0.7) {
            let c = &random::scalar(rng, dom) * &ScalarExpr::parse(atoms[rng.gen_range(0..atoms.len())]).unwrap();
            g = &g + &GradedFunction::monomial(dom, e, c);
        }
    }
    g
}

fn c7_dd_zero() -> Check {
    let dom = DomainSpec::builder(1)
        .base("x")
        .base("y")
        .generator("xi1", deg("(1)"))
        .generator("xi2", deg("(1)"))
        .build()
        .unwrap();
    let mut count = 0;
    for conv in [Convention::Deligne, Convention::BernsteinLeites] {
        let alg = FormAlgebra::new(&dom, conv, 2).map_err(|e| e.to_string())?;
        for seed in 0..100u64 {
            let mut rng = random::rng(7000 + seed);
            let g = random_superfunction(&mut rng, &dom);
            let e = |e: zgraded::Error| format!("{conv} seed {seed}: {e}");
            let w = alg.lift(&g).map_err(e)?;
            let dw = alg.d(&w).map_err(e)?;
            let ddw = alg.d(&dw).map_err(e)?;
            ensure(ddw.is_zero(), || format!("{conv} seed {seed}: d(d f) = {ddw}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} functions on a 2|2 domain, both conventions"))
}

// 8 ------------------------------------------------------------------------

fn c8_counterexamples() -> Check {
    let reg = registry();
    let e = |e: zgraded::Error| e.to_string();
    let mu = z2("x", &["xi1", "xi2"], None, Some("[0,1]"));
    let nu = z2("y", &["eta1", "eta2"], None, Some("[0,1]"));
    let ct2 = morphism(&mu, &nu, &[("y", "x + xi1*xi2"), ("eta1", "xi1"), ("eta2", "xi2")]);
    let g = f(&nu, "y");
    let fm = as_function(glued(&ct2, Coefficient::Function(g.clone()))?);
    let (a, b) = (berez::integrate_z2(&g, &reg).map_err(e)?, berez::integrate_z2(&fm, &reg).map_err(e)?);
    ensure(a == rat(0, 1) && b == rat(1, 1), || format!("Z2: {a} vs {b}"))?;

    let mu = z22(["x", "y", "xi", "eta"], 4, Some("[0,1]"));
    let nu = z22(["X", "Y", "XI", "H"], 4, Some("[0,1]"));
    let ct1 = morphism(&mu, &nu, &[("X", "x"), ("Y", "y + xi*eta"), ("XI", "xi"), ("H", "eta")]);
    let g = f(&nu, "alpha(X)*Y");
    let fm = as_function(glued(&ct1, Coefficient::Function(g.clone()))?);
    ensure(fm == f(&mu, "alpha(x)*y + alpha(x)*xi*eta"), || format!("pulled back {fm}"))?;
    let (c, d) = (
        berez::integrate_z22_naive(&g, &reg).map_err(e)?,
        berez::integrate_z22_naive(&fm, &reg).map_err(e)?,
    );
    ensure(c == rat(0, 1) && d == rat(1, 1), || format!("Z2^2: {c} vs {d}"))?;
    Ok(format!("Z2: {a} vs {b}; Z2^2: {c} vs {d}"))
}

// 9 ------------------------------------------------------------------------

fn c9_compact_invariance() -> Check {
    let reg = registry();
    let nu = z22(["X", "Y", "XI", "H"], 4, Some("[-1,2]"));
    let mut nonzero = 0;
    for seed in 0..50u64 {
        let mut rng = random::rng(9000 + seed);
        let phi = random::ct1_type(&mut rng, &nu, true);
        let g = random::compact_coefficient(&mut rng, &nu, &["alpha", "beta"], 0.6, |e| e == [1, 0, 0]);
        let e = |e: zgraded::Error| format!("seed {seed}: {e}");
        ensure(berez::is_compact_support_in_y(&g).map_err(e)?, || format!("seed {seed}: generator"))?;
        let fm = as_function(glued(&phi, Coefficient::Function(g.clone()))?);
        ensure(berez::is_compact_support_in_y(&fm).map_err(e)?, || format!("seed {seed}: criterion not stable"))?;
        let (a, b) = (berez::integrate_z22_naive(&g, &reg).map_err(e)?, berez::integrate_z22_naive(&fm, &reg).map_err(e)?);
        ensure(a == b, || format!("Z2^2 seed {seed}: {a} vs {b}"))?;
        if a != rat(0, 1) {
            nonzero += 1;
        }
    }
    let nu = z2("y", &["eta1", "eta2", "eta3"], None, Some("[-1,2]"));
    let mut z2_count = 0;
    for seed in 0..50u64 {
        let mut rng = random::rng(9500 + seed);
        let phi = if seed % 2 == 0 {
            random::z2_shear(&mut rng, &nu)
        } else {
            random::z2_affine(&mut rng, &nu)
        };
        let g = random::compact_coefficient(&mut rng, &nu, &["alpha", "beta"], 0.7, |_| false);
        let e = |e: zgraded::Error| format!("Z2 seed {seed}: {e}");
        let fm = as_function(glued(&phi, Coefficient::Function(g.clone()))?);
        let (a, b) = (berez::integrate_z2(&g, &reg).map_err(e)?, berez::integrate_z2(&fm, &reg).map_err(e)?);
        ensure(a == b, || format!("Z2 seed {seed}: {a} vs {b}"))?;
        z2_count += 1;
    }
    Ok(format!("50 CT1-type transitions ({nonzero} nonzero integrals), {z2_count} Z2 shears and affine maps"))
}

// 10 -----------------------------------------------------------------------

fn random_laurent(rng: &mut TestRng, dom: &DomainSpec) -> LaurentFunction {
    let mut terms = Vec::new();
    for k in -3i32..=2 {
        for odd in ["", "*XI*H", "*XI", "*H"] {
            if !rng.gen_bool(0.35) {
                continue;
            }
            let bump = if rng.gen_bool(0.5) { "alpha" } else { "beta" };
            let c: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { -1 } else { 1 };
            terms.push(format!("{c}*{bump}(X)*Y^{k}{odd}"));
        }
    }
    if terms.is_empty() {
        terms.push("alpha(X)*Y^-1*XI*H".into());
    }
    LaurentFunction::parse(dom, "Y", &terms.join(" + ")).unwrap()
}

fn c10_residue() -> Check {
    let reg = registry();
    let mu = z22(["x", "y", "xi", "eta"], 4, None);
    let nu4 = z22(["X", "Y", "XI", "H"], 4, None);
    let ct1 = morphism(&mu, &nu4, &[("X", "x"), ("Y", "y + xi*eta"), ("XI", "xi"), ("H", "eta")]);
    let e = |e: zgraded::Error| e.to_string();
    let pulled = LaurentFunction::parse(&nu4, "Y", "Y^-1").map_err(e)?.pullback(&ct1).map_err(e)?;
    let want = LaurentFunction::parse(&mu, "y", "y^-1 - y^-2*xi*eta").map_err(e)?;
    ensure(pulled.agrees_with(&want), || format!("Y^-1 pulls back to {pulled}"))?;

    let nu = z22(["X", "Y", "XI", "H"], 6, Some("[-1,2]"));
    let mut coherent = 0;
    let mut invariant = 0;
    let mut nonzero = 0;
    for seed in 0..50u64 {
        let mut rng = random::rng(10_000 + seed);
        let phi = random::ct1_type(&mut rng, &nu, seed % 2 == 0);
        let g = random_laurent(&mut rng, &nu);
        let e = |e: zgraded::Error| format!("seed {seed}: {e}");
        let fm = as_laurent(glued(&phi, Coefficient::Laurent(g.clone()))?);
        let (a, b) = (
            berez::integrate_z22_residue(&g, &reg).map_err(e)?,
            berez::integrate_z22_residue(&fm, &reg).map_err(e)?,
        );
        ensure(a == b, || format!("residue seed {seed}: {a} vs {b}"))?;
        invariant += 1;
        if a != rat(0, 1) {
            nonzero += 1;
        }
        if seed < 30 {
            let psi = random::ct1_type(&mut rng, phi.source(), seed % 3 == 0);
            let comp = phi.compose(&psi).map_err(e)?;
            let lhs = g.pullback(&comp).map_err(e)?;
            let rhs = g.pullback(&phi).map_err(e)?.pullback(&psi).map_err(e)?;
            ensure(lhs.agrees_with(&rhs), || format!("coherence seed {seed}"))?;
            coherent += 1;
        }
    }
    Ok(format!("Y^-1 -> {pulled}; {coherent} coherent pairs; {invariant} invariant sections ({nonzero} nonzero)"))
}

// 11 -----------------------------------------------------------------------

fn c11_delta() -> Check {
    let mut shapes = 0;
    for seed in 0..40u64 {
        let mut rng = random::rng(11_000 + seed);
        let n = 1 + (seed as usize % 3);
        let rank = 1 + rng.gen_range(0..4);
        let module: Vec<Degree> = (0..rank)
            .map(|_| {
                let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
                Degree::new(&bits).unwrap()
            })
            .collect();
        let e = |e: zgraded::Error| format!("seed {seed}: {e}");
        let c = DeltaComplex::new(&module, None, 6).map_err(e)?;
        let d = c.delta();
        ensure((&d * &d).is_zero(), || format!("seed {seed}: delta^2 = {}", &d * &d))?;
        for _ in 0..5 {
            let mut k = GradedFunction::zero(c.domain());
            for m in random::monomials(c.domain(), 0, 4) {
                if rng.gen_bool(0.3) {
                    k = &k + &GradedFunction::monomial(c.domain(), m, ScalarExpr::from_int(rng.gen_range(-3..=3)));
                }
            }
            let k = k.truncated(2);
            let ddk = c.apply(&c.apply(&k).map_err(e)?).map_err(e)?;
            ensure(ddk.is_zero(), || format!("seed {seed}: delta(delta k) = {ddk}"))?;
        }
        let om = c.apply(&c.omega()).map_err(e)?;
        ensure(om.is_zero(), || format!("seed {seed}: delta(Omega) = {om}"))?;
        shapes += 1;
    }
    Ok(format!("{shapes} module shapes of rank <= 4 at weight 6"))
}

// 12 -----------------------------------------------------------------------

fn c12_invert_continuity() -> Check {
    let doms = [
        z2("x", &["xi1", "xi2", "xi3"], None, None),
        z22(["x", "y", "xi", "eta"], 4, None),
    ];
    let targets = [
        z2("u", &["t1", "t2", "t3"], None, None),
        z22(["u", "v", "zeta", "theta"], 4, None),
    ];
    let mut inverted = 0;
    let mut continuous = 0;
    for (dom, tgt) in doms.iter().zip(&targets) {
        let zero = Degree::zero(dom.n()).unwrap();
        for seed in 0..100u64 {
            let mut rng = random::rng(12_000 + seed);
            let body = GradedFunction::constant(dom, ScalarExpr::from_int(rng.gen_range(1..=4)));
            let g = &random::homogeneous(&mut rng, dom, &zero, 0, 0.6) + &body;
            let g = if g.epsilon().is_zero() { &g + &body } else { g };
            let e = |e: zgraded::Error| format!("seed {seed}: {e}");
            let inv = g.invert().map_err(e)?;
            ensure(&g * &inv == GradedFunction::one(dom), || format!("seed {seed}: f * f^-1 != 1"))?;
            inverted += 1;

            let phi = random::morphism(&mut rng, dom, tgt, 0.5);
            let odd = zgraded::standard_order(dom.n()).unwrap()[1 << (dom.n() - 1)];
            let min_weight = rng.gen_range(0..3);
            let h = random::homogeneous(&mut rng, tgt, &odd, min_weight, 0.6);
            let v = phi.pullback(&h).map_err(e)?.j_valuation();
            ensure(v.is_none_or(|v| h.j_valuation().is_some_and(|w| v >= w)), || {
                format!("seed {seed}: valuation {v:?} < {:?}", h.j_valuation())
            })?;
            continuous += 1;
        }
    }
    Ok(format!("{inverted} inverses, {continuous} pullbacks"))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 12] = [
        ("Z2^3-determinant golden test", 5, c1_determinants),
        ("quaternion sign table", 1, c2_quaternions),
        ("Berezinian multiplicativity", 60, c3_ber_multiplicative),
        ("UDL and inverse round-trips", 60, c4_udl_inverse),
        ("chain rule for modified Jacobians", 60, c5_chain_rule),
        ("pullback golden test", 1, c6_pullback_golden),
        ("d^2 = 0 in both conventions", 30, c7_dd_zero),
        ("integration counterexamples", 5, c8_counterexamples),
        ("compact-support invariance", 60, c9_compact_invariance),
        ("residue theory", 60, c10_residue),
        ("delta-complex", 60, c11_delta),
        ("invertibility and continuity", 60, c12_invert_continuity),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(d) if took > Duration::from_secs(*limit) => Err(format!("{d}; took longer than {limit} s")),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        if result.is_err() {
            failed += 1;
        }
        println!("{tag} criterion {:>2}: {name} [{:.2} s] {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
