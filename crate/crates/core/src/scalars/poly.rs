//! Sparse multivariate polynomials over Q in interned atoms.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::{self, AtomId};

/// Sorted by atom id, exponents positive.
pub(crate) type Mono = Vec<(AtomId, u32)>;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Mono, BigRational>,
}

pub(crate) fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `a / b` if `b` divides `a`.
pub(crate) fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &(v, e) in a {
        if j < b.len() && b[j].0 == v {
            if b[j].1 > e {
                return None;
            }
            if e > b[j].1 {
                out.push((v, e - b[j].1));
            }
            j += 1;
        } else if j < b.len() && b[j].0 < v {
            return None;
        } else {
            out.push((v, e));
        }
    }
    if j < b.len() {
        return None;
    }
    Some(out)
}

pub(crate) fn mono_exp(m: &Mono, v: AtomId) -> u32 {
    m.iter().find(|(a, _)| *a == v).map(|p| p.1).unwrap_or(0)
}

fn mono_without(m: &Mono, v: AtomId) -> Mono {
    m.iter().copied().filter(|(a, _)| *a != v).collect()
}

/// Lexicographic order with smaller atom ids more significant. A genuine
/// monomial order, used for exact division.
pub(crate) fn lex_cmp(a: &Mono, b: &Mono) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) => {
                if x.0 < y.0 {
                    return Ordering::Greater;
                }
                if x.0 > y.0 {
                    return Ordering::Less;
                }
                match x.1.cmp(&y.1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                }
            }
        }
    }
}

/// Canonical structural order used for printing and normalization: degrevlex
/// on variables (alphabetical, earlier names more significant), then lex on
/// function atoms.
pub(crate) fn canonical_cmp(a: &Mono, b: &Mono) -> Ordering {
    let split = |m: &Mono| {
        let mut vars = Vec::new();
        let mut funs = Vec::new();
        for &(id, e) in m {
            let k = atom::key(id);
            if atom::is_var(id) {
                vars.push((k, e));
            } else {
                funs.push((k, e));
            }
        }
        vars.sort();
        funs.sort();
        (vars, funs)
    };
    let (va, fa) = split(a);
    let (vb, fb) = split(b);
    let da: u32 = va.iter().map(|p| p.1).sum();
    let db: u32 = vb.iter().map(|p| p.1).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    // Reverse lex: scanning from the least significant variable, the
    // monomial with the smaller exponent is larger.
    let mut names: Vec<_> = va.iter().chain(vb.iter()).map(|p| p.0.clone()).collect();
    names.sort();
    names.dedup();
    for name in names.iter().rev() {
        let ea = va.iter().find(|p| &p.0 == name).map(|p| p.1).unwrap_or(0);
        let eb = vb.iter().find(|p| &p.0 == name).map(|p| p.1).unwrap_or(0);
        if ea != eb {
            return eb.cmp(&ea);
        }
    }
    // Function atoms: lexicographic with earlier keys more significant.
    let mut names: Vec<_> = fa.iter().chain(fb.iter()).map(|p| p.0.clone()).collect();
    names.sort();
    names.dedup();
    for name in names.iter() {
        let ea = fa.iter().find(|p| &p.0 == name).map(|p| p.1).unwrap_or(0);
        let eb = fb.iter().find(|p| &p.0 == name).map(|p| p.1).unwrap_or(0);
        if ea != eb {
            return ea.cmp(&eb);
        }
    }
    Ordering::Equal
}

impl Poly {
    pub(crate) fn zero() -> Poly {
        Poly::default()
    }

    pub(crate) fn constant(c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub(crate) fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub(crate) fn atom(id: AtomId) -> Poly {
        Poly::monomial(vec![(id, 1)], BigRational::one())
    }

    pub(crate) fn monomial(m: Mono, c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Vec::new()))
    }

    pub(crate) fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.get(&Vec::new()).cloned();
        }
        None
    }

    pub(crate) fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub(crate) fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    pub(crate) fn mul_mono(&self, m: &Mono, c: &BigRational) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (mono_mul(k, m), v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub(crate) fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub(crate) fn atoms(&self) -> Vec<AtomId> {
        let mut v: Vec<AtomId> = self.terms.keys().flat_map(|m| m.iter().map(|p| p.0)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub(crate) fn degree_in(&self, v: AtomId) -> u32 {
        self.terms.keys().map(|m| mono_exp(m, v)).max().unwrap_or(0)
    }

    /// Coefficients as polynomials in the remaining atoms, keyed by power of `v`.
    pub(crate) fn coeffs_in(&self, v: AtomId) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = mono_exp(m, v);
            out.entry(e)
                .or_default()
                .terms
                .insert(mono_without(m, v), c.clone());
        }
        out
    }

    pub(crate) fn lex_leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    pub(crate) fn canonical_leading(&self) -> Option<(&Mono, &BigRational)> {
        if self.terms.len() == 1 {
            return self.terms.iter().next();
        }
        self.terms.iter().max_by(|a, b| canonical_cmp(a.0, b.0))
    }

    /// Minimal exponent of every atom dividing all terms.
    pub(crate) fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Vec::new();
        };
        let mut acc = first.clone();
        for m in it {
            acc = acc
                .iter()
                .filter_map(|&(v, e)| {
                    let f = mono_exp(m, v);
                    (f > 0).then_some((v, e.min(f)))
                })
                .collect();
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    pub(crate) fn div_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (mono_div(k, m).expect("monomial does not divide"), c.clone()))
                .collect(),
        }
    }

    /// Exact division, `None` if `d` does not divide `self`.
    pub(crate) fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if d.terms.len() == 1 {
            let (m, c) = d.terms.iter().next().unwrap();
            let inv = c.recip();
            let mut out = Poly::zero();
            for (k, v) in &self.terms {
                out.terms.insert(mono_div(k, m)?, v * &inv);
            }
            return Some(out);
        }
        let (dm, dc) = d.lex_leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let dinv = dc.recip();
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = rem.lex_leading() {
            let qm = mono_div(rm, &dm)?;
            let qc = rc * &dinv;
            rem = rem.sub(&d.mul_mono(&qm, &qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Integer content of the numerators and lcm of denominators, used to
    /// rescale to an integral primitive polynomial with positive lex leader.
    pub(crate) fn make_primitive(&self) -> Poly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        let mut k = BigRational::new(l, g);
        if self.lex_leading().unwrap().1.is_negative() {
            k = -k;
        }
        self.scale(&k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::atom::{intern, AtomData};

    fn v(name: &str) -> Poly {
        Poly::atom(intern(AtomData::Var(name.into())))
    }

    #[test]
    fn exact_division() {
        let (x, y) = (v("px"), v("py"));
        let a = x.add(&y).mul(&x.sub(&y));
        let q = a.div_exact(&x.add(&y)).unwrap();
        assert_eq!(q, x.sub(&y));
        assert!(a.div_exact(&x.add(&Poly::one())).is_none());
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let p = v("pa").add(&Poly::one());
        assert_eq!(p.pow(3), p.mul(&p).mul(&p));
    }
}
