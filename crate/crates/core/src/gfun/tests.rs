use super::*;
use crate::grading::Degree;

fn deg(s: &str) -> Degree {
    s.parse().unwrap()
}

/// x | xi1, xi2 over Z2.
pub(crate) fn z2_dom(t: u32) -> DomainSpec {
    DomainSpec::builder(1)
        .base("x")
        .generator("xi1", deg("(1)"))
        .generator("xi2", deg("(1)"))
        .truncation(t)
        .build()
        .unwrap()
}

/// x | y, xi, eta over Z2^2.
pub(crate) fn z22_dom(t: u32) -> DomainSpec {
    DomainSpec::builder(2)
        .base("x")
        .generator("y", deg("(1,1)"))
        .generator("xi", deg("(0,1)"))
        .generator("eta", deg("(1,0)"))
        .truncation(t)
        .build()
        .unwrap()
}

fn f(dom: &DomainSpec, s: &str) -> GradedFunction {
    GradedFunction::parse(dom, s).unwrap()
}

#[test]
fn products_follow_koszul_rule() {
    let d = z2_dom(2);
    assert!((&f(&d, "xi1") * &f(&d, "xi1")).is_zero());
    assert_eq!(&f(&d, "xi2") * &f(&d, "xi1"), -&f(&d, "xi1*xi2"));
    assert_eq!(&f(&d, "x + xi1*xi2") * &f(&d, "xi1"), f(&d, "x*xi1"));
    let e = z22_dom(4);
    assert_eq!((&f(&e, "y") * &f(&e, "y")).to_string(), "y^2");
    assert_eq!(&f(&e, "xi") * &f(&e, "y"), -&f(&e, "y*xi"));
    assert_eq!(&f(&e, "eta") * &f(&e, "xi"), f(&e, "xi*eta"));
}

#[test]
fn body_and_valuation() {
    let d = z2_dom(2);
    assert_eq!(f(&d, "x + x^2*xi1*xi2").epsilon(), ScalarExpr::var("x"));
    assert_eq!(f(&d, "sin(x) + cos(x)*xi1*xi2").epsilon().to_string(), "sin(x)");
    assert_eq!(f(&d, "3 + xi1").j_valuation(), Some(0));
    assert_eq!(f(&d, "xi1*xi2").j_valuation(), Some(2));
    assert_eq!(GradedFunction::zero(&d).j_valuation(), None);
}

#[test]
fn inversion() {
    let d = z2_dom(2);
    assert_eq!(f(&d, "1 + xi1*xi2").invert().unwrap(), f(&d, "1 - xi1*xi2"));
    assert!(matches!(f(&d, "xi1").invert(), Err(Error::NotInvertible(_))));
    let e = z22_dom(3);
    assert_eq!(f(&e, "1 - y").invert().unwrap(), f(&e, "1 + y + y^2 + y^3"));
    let g = f(&e, "x + y + xi*eta + F(x)*y*xi*eta");
    assert_eq!(&g * &g.invert().unwrap(), GradedFunction::one(&e));
}

#[test]
fn partial_derivatives() {
    let d = z2_dom(2);
    assert_eq!(f(&d, "xi2*xi1").partial("xi1").unwrap(), -&f(&d, "xi2"));
    assert_eq!(f(&d, "x^2").partial("x").unwrap(), f(&d, "2*x"));
    let e = z22_dom(4);
    assert_eq!(f(&e, "y^3").partial("y").unwrap(), f(&e, "3*y^2"));
    assert_eq!(f(&e, "y*xi").partial("xi").unwrap(), -&f(&e, "y"));
    assert!(matches!(f(&e, "y").partial("z"), Err(Error::UnknownVariable(_))));
}

#[test]
fn taylor_expansion() {
    let d = z2_dom(2);
    assert_eq!(f(&d, "sin(x + xi1*xi2)"), f(&d, "sin(x) + cos(x)*xi1*xi2"));
    assert_eq!(f(&d, "F(x)").to_string(), "F(x)");
    let e = z22_dom(4);
    assert_eq!(f(&e, "F(x + y^2)"), f(&e, "F(x) + F'(x)*y^2 + 1/2*F''(x)*y^4"));
    let two = f(&e, "G(x + y^2, x + y*xi*eta)");
    let expect = f(
        &e,
        "G(x, x) + D[G,(1,0)](x, x)*y^2 + D[G,(0,1)](x, x)*y*xi*eta + 1/2*D[G,(2,0)](x, x)*y^4",
    );
    assert_eq!(two, expect);
    assert!(GradedFunction::parse(&e, "F(y)").is_err());
}

#[test]
fn printing_round_trip() {
    let e = z22_dom(4);
    for s in [
        "x*y*xi*eta - 3",
        "(x + 1)/(x^2 + 1)*y - xi*eta/2",
        "F(x)*x^2*y^2 + y*xi*eta",
        "-1/3*y^4",
    ] {
        let a = f(&e, s);
        let printed = a.to_string();
        let b = f(&e, &printed);
        assert_eq!(a, b, "{s} -> {printed}");
        assert_eq!(printed, b.to_string());
    }
    assert_eq!(f(&e, "1 + xi*eta + 2*y").to_string(), "1 + 2*y + xi*eta");
}

#[test]
fn domain_validation() {
    let bad = DomainSpec::builder(2).generator("z", deg("(0,0)")).truncation(2).build();
    assert!(matches!(bad, Err(Error::Degree(_))));
    let low = DomainSpec::builder(1)
        .generator("a", deg("(1)"))
        .generator("b", deg("(1)"))
        .truncation(1)
        .build();
    assert!(matches!(low, Err(Error::Config(_))));
    let mixed = DomainSpec::builder(2).generator("a", deg("(1,0,1)")).build();
    assert!(matches!(mixed, Err(Error::Config(_))));
}
