//! Multivariate gcd over Q by recursive primitive pseudo-remainder sequences.

use std::collections::BTreeMap;

use super::atom::AtomId;
use super::poly::{mono_exp, Mono, Poly};

/// A gcd of `a` and `b`, defined up to a nonzero rational factor.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.make_primitive();
    }
    if b.is_zero() {
        return a.make_primitive();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.make_primitive();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg: Mono = ma
        .iter()
        .filter_map(|&(v, e)| {
            let f = mono_exp(&mb, v);
            (f > 0).then_some((v, e.min(f)))
        })
        .collect();
    let a1 = a.div_mono(&ma);
    let b1 = b.div_mono(&mb);
    let g = gcd_no_monomial(a1, b1);
    g.mul_mono(&mg, &num_traits::One::one())
}

fn gcd_no_monomial(a: Poly, b: Poly) -> Poly {
    {
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a.terms.len() == 1 || b.terms.len() == 1 {
            // One side is a monomial and neither has a monomial factor left.
            return Poly::one();
        }
        let va = a.atoms();
        let vb = b.atoms();
        // An atom present on one side only cannot occur in the gcd: replace
        // that side by its content with respect to the atom.
        if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
            return gcd(&content_in(&a, v), &b);
        }
        if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
            return gcd(&a, &content_in(&b, v));
        }
        let v = *va
            .iter()
            .min_by_key(|&&v| a.degree_in(v).max(b.degree_in(v)))
            .unwrap();
        let ca = content_in(&a, v);
        let cb = content_in(&b, v);
        let pa = a.div_exact(&ca).expect("content divides");
        let pb = b.div_exact(&cb).expect("content divides");
        let gc = gcd(&ca, &cb);
        let gp = prs(pa, pb, v);
        gc.mul(&gp).make_primitive()
    }
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &Poly, v: AtomId) -> Poly {
    let coeffs = p.coeffs_in(v);
    let mut it = coeffs.into_values();
    let mut g = it.next().unwrap_or_default();
    for c in it {
        if g.is_constant() {
            break;
        }
        g = gcd(&g, &c);
    }
    if g.is_constant() {
        Poly::one()
    } else {
        g.make_primitive()
    }
}

fn primitive_in(p: &Poly, v: AtomId) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").make_primitive()
}

fn leading_in(p: &Poly, v: AtomId) -> (u32, Poly) {
    let coeffs: BTreeMap<u32, Poly> = p.coeffs_in(v);
    let (d, c) = coeffs.into_iter().next_back().unwrap();
    (d, c)
}

fn pseudo_rem(p: &Poly, q: &Poly, v: AtomId) -> Poly {
    let (dq, lq) = leading_in(q, v);
    let mut r = p.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let (dr, lr) = leading_in(&r, v);
        if dr < dq {
            return r;
        }
        let shift: Mono = if dr > dq { vec![(v, dr - dq)] } else { Vec::new() };
        let t = lr.mul_mono(&shift, &num_traits::One::one()).mul(q);
        r = lq.mul(&r).sub(&t);
    }
}

/// gcd of two polynomials primitive in `v`.
fn prs(mut p: Poly, mut q: Poly, v: AtomId) -> Poly {
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            return primitive_in(&q, v);
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        p = q;
        q = primitive_in(&r, v);
    }
}
