//! Truncated formal power series in Z2^n-graded generators with scalar
//! coefficients, multiplied by the Koszul sign rule.

mod display;
mod domain;
mod taylor;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::parse::{parse_expr, Ast};
use crate::scalars::ScalarExpr;

pub use domain::{Coordinate, DomainBuilder, DomainSpec, Generator, MAX_GENERATORS};
pub(crate) use domain::{DomainData, Symbol};
pub use taylor::taylor_substitute;
pub(crate) use display::render_terms;
pub(crate) use taylor::taylor_compose;

/// Exponents of the generators in canonical order.
pub type Exponents = Vec<i16>;

pub(crate) fn weight(e: &[i16]) -> i32 {
    e.iter().map(|&v| v as i32).sum()
}

/// Sign and product of two monomials, `None` when an odd generator would
/// appear twice. The boolean is true for a minus sign.
pub(crate) fn mono_product(dom: &DomainData, a: &[i16], b: &[i16]) -> Option<(Exponents, bool)> {
    let mut out = Vec::with_capacity(a.len());
    let mut odd_a = 0u64;
    for i in 0..a.len() {
        let s = a[i] + b[i];
        if (dom.odd_mask >> i) & 1 == 1 && s > 1 {
            return None;
        }
        if a[i] & 1 == 1 {
            odd_a |= 1 << i;
        }
        out.push(s);
    }
    let mut parity = 0u32;
    if odd_a != 0 {
        for (j, &bj) in b.iter().enumerate() {
            if bj & 1 == 1 {
                let higher = if j + 1 >= 64 { 0 } else { !0u64 << (j + 1) };
                parity += (odd_a & dom.anti[j] & higher).count_ones();
            }
        }
    }
    Some((out, parity & 1 == 1))
}

pub(crate) fn mono_degree(dom: &DomainData, e: &[i16]) -> Degree {
    let mut bits = 0u32;
    for (i, &v) in e.iter().enumerate() {
        if v & 1 == 1 {
            bits ^= dom.gens[i].degree.bits();
        }
    }
    Degree::from_bits(dom.n, bits)
}

pub(crate) fn add_into(map: &mut BTreeMap<Exponents, ScalarExpr>, k: Exponents, v: ScalarExpr) {
    if v.is_zero() {
        return;
    }
    match map.entry(k) {
        Entry::Vacant(e) => {
            e.insert(v);
        }
        Entry::Occupied(mut e) => {
            let s = &*e.get() + &v;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// An element of the truncated algebra of a domain: finitely many terms
/// `f_alpha(x) * mu^alpha` with weight at most the truncation order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedFunction {
    dom: DomainSpec,
    terms: BTreeMap<Exponents, ScalarExpr>,
}

impl GradedFunction {
    pub fn zero(dom: &DomainSpec) -> Self {
        GradedFunction {
            dom: dom.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dom: &DomainSpec) -> Self {
        GradedFunction::constant(dom, ScalarExpr::one())
    }

    pub fn constant(dom: &DomainSpec, c: ScalarExpr) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; dom.generators().len()], c);
        }
        GradedFunction {
            dom: dom.clone(),
            terms,
        }
    }

    /// A base variable or a generator, by name.
    pub fn coordinate(dom: &DomainSpec, name: &str) -> Result<Self> {
        if dom.base_index(name).is_some() {
            return Ok(GradedFunction::constant(dom, ScalarExpr::var(name)));
        }
        let i = dom
            .gen_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; dom.generators().len()];
        e[i] = 1;
        Ok(GradedFunction::monomial(dom, e, ScalarExpr::one()))
    }

    /// `c * mu^e`. Returns zero if the weight exceeds the truncation order or
    /// an odd exponent exceeds one.
    pub fn monomial(dom: &DomainSpec, e: Exponents, c: ScalarExpr) -> Self {
        assert_eq!(e.len(), dom.generators().len(), "exponent vector length");
        let mut terms = BTreeMap::new();
        let ok = e.iter().all(|&v| v >= 0)
            && weight(&e) <= dom.truncation() as i32
            && e.iter().enumerate().all(|(i, &v)| !dom.is_odd(i) || v <= 1);
        if ok && !c.is_zero() {
            terms.insert(e, c);
        }
        GradedFunction {
            dom: dom.clone(),
            terms,
        }
    }

    pub(crate) fn from_terms(dom: &DomainSpec, terms: BTreeMap<Exponents, ScalarExpr>) -> Self {
        debug_assert!(terms.values().all(|v| !v.is_zero()));
        GradedFunction {
            dom: dom.clone(),
            terms,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.dom
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[i16]) -> ScalarExpr {
        self.terms.get(e).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    /// Coefficient of the product of the named generators, each to the first
    /// power unless repeated.
    pub fn coefficient_of(&self, gens: &[&str]) -> Result<ScalarExpr> {
        let mut e = vec![0i16; self.dom.generators().len()];
        for g in gens {
            let i = self
                .dom
                .gen_index(g)
                .ok_or_else(|| Error::UnknownVariable(g.to_string()))?;
            e[i] += 1;
        }
        Ok(self.coefficient(&e))
    }

    /// The body: coefficient of the empty monomial.
    pub fn epsilon(&self) -> ScalarExpr {
        self.coefficient(&vec![0; self.dom.generators().len()])
    }

    /// Minimal weight of a term; `None` for zero (valuation +infinity).
    pub fn j_valuation(&self) -> Option<u32> {
        self.terms.keys().map(|e| weight(e) as u32).min()
    }

    /// The common degree of all terms, `Ok(None)` for zero.
    pub fn degree(&self) -> Result<Option<Degree>> {
        let d = self.dom.data();
        let mut out: Option<Degree> = None;
        for e in self.terms.keys() {
            let g = mono_degree(d, e);
            match out {
                None => out = Some(g),
                Some(h) if h != g => {
                    return Err(Error::Degree(format!("function mixes degrees {h} and {g}")));
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// True if every term has degree `d` (vacuously for zero).
    pub fn is_homogeneous_of(&self, d: &Degree) -> bool {
        let data = self.dom.data();
        self.terms.keys().all(|e| mono_degree(data, e) == *d)
    }

    fn check_domain(&self, other: &GradedFunction) -> Result<()> {
        if self.dom != other.dom {
            return Err(Error::DomainMismatch("operands live on different domains".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &GradedFunction) -> Result<GradedFunction> {
        self.check_domain(other)?;
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            add_into(&mut terms, k.clone(), v.clone());
        }
        Ok(GradedFunction::from_terms(&self.dom, terms))
    }

    pub fn checked_sub(&self, other: &GradedFunction) -> Result<GradedFunction> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &GradedFunction) -> Result<GradedFunction> {
        self.check_domain(other)?;
        let d = self.dom.data();
        let t = d.truncation as i32;
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let wa = weight(ea);
            for (eb, cb) in &other.terms {
                if wa + weight(eb) > t {
                    continue;
                }
                if let Some((e, neg)) = mono_product(d, ea, eb) {
                    let c = ca * cb;
                    add_into(&mut terms, e, if neg { -c } else { c });
                }
            }
        }
        Ok(GradedFunction::from_terms(&self.dom, terms))
    }

    /// Multiply by a scalar (degree zero, central).
    pub fn scale(&self, c: &ScalarExpr) -> GradedFunction {
        if c.is_zero() {
            return GradedFunction::zero(&self.dom);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        GradedFunction::from_terms(&self.dom, terms)
    }

    pub fn scale_rational(&self, c: &BigRational) -> GradedFunction {
        self.scale(&ScalarExpr::from_rational(c.clone()))
    }

    pub fn pow(&self, e: u32) -> GradedFunction {
        let mut acc = GradedFunction::one(&self.dom);
        for _ in 0..e {
            acc = &acc * self;
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Multiplicative inverse, defined when the body is nonzero.
    pub fn invert(&self) -> Result<GradedFunction> {
        let f0 = self.epsilon();
        if f0.is_zero() {
            return Err(Error::NotInvertible(format!("body of `{self}` is zero")));
        }
        let f0inv = f0.inv()?;
        let one = GradedFunction::one(&self.dom);
        let t = &one - &self.scale(&f0inv);
        if t.is_zero() {
            return Ok(GradedFunction::constant(&self.dom, f0inv));
        }
        // f^-1 = f0^-1 * sum_{l <= T} t^l, evaluated by Horner's rule.
        let mut s = one.clone();
        for _ in 0..self.dom.truncation() {
            s = &one + &(&t * &s);
        }
        Ok(s.scale(&f0inv))
    }

    /// Partial derivative by a base variable (coefficientwise) or a generator
    /// (left derivation of the generator's degree).
    pub fn partial(&self, var: &str) -> Result<GradedFunction> {
        if self.dom.base_index(var).is_some() {
            return Ok(self.map_coefficients(|c| c.differentiate(var)));
        }
        let k = self
            .dom
            .gen_index(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        Ok(self.partial_generator(k))
    }

    pub(crate) fn partial_generator(&self, k: usize) -> GradedFunction {
        let d = self.dom.data();
        let lower = if k == 0 { 0 } else { (1u64 << k) - 1 };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let ek = e[k];
            if ek == 0 {
                continue;
            }
            let mut odd = 0u64;
            for (i, &v) in e.iter().enumerate().take(k) {
                if v & 1 == 1 {
                    odd |= 1 << i;
                }
            }
            let neg = (odd & lower & d.anti[k]).count_ones() & 1 == 1;
            let mut e2 = e.clone();
            e2[k] -= 1;
            let c2 = c.scale(&BigRational::from_integer(ek.into()));
            add_into(&mut terms, e2, if neg { -c2 } else { c2 });
        }
        GradedFunction::from_terms(&self.dom, terms)
    }

    pub fn map_coefficients(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> GradedFunction {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            add_into(&mut terms, k.clone(), f(v));
        }
        GradedFunction::from_terms(&self.dom, terms)
    }

    /// Terms of weight at most `k`.
    pub fn truncated(&self, k: u32) -> GradedFunction {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| weight(e) <= k as i32)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        GradedFunction::from_terms(&self.dom, terms)
    }

    /// Reinterpret on another domain with the same generators, dropping terms
    /// above its truncation order.
    pub fn restrict_to(&self, dom: &DomainSpec) -> Result<GradedFunction> {
        let same = dom.n() == self.dom.n()
            && dom.generators() == self.dom.generators()
            && dom.base_vars() == self.dom.base_vars();
        if !same {
            return Err(Error::DomainMismatch("domains differ beyond truncation".into()));
        }
        let t = dom.truncation() as i32;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| weight(e) <= t)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Ok(GradedFunction::from_terms(dom, terms))
    }

    /// True when no generator occurs, i.e. the function is a pure scalar.
    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        if self.terms.keys().all(|e| e.iter().all(|&v| v == 0)) {
            Some(self.epsilon())
        } else {
            None
        }
    }

    pub fn parse(dom: &DomainSpec, src: &str) -> Result<GradedFunction> {
        eval_graded(&parse_expr(src)?, dom)
    }
}

pub(crate) fn eval_graded(ast: &Ast, dom: &DomainSpec) -> Result<GradedFunction> {
    Ok(match ast {
        Ast::Num(n) => GradedFunction::constant(dom, ScalarExpr::from_rational(BigRational::from_integer(n.clone()))),
        Ast::Ident { name, column } => match GradedFunction::coordinate(dom, name) {
            Ok(f) => f,
            Err(_) => return Err(Error::parse(1, *column, format!("unknown identifier `{name}`"))),
        },
        Ast::Call {
            name,
            deriv,
            args,
            column,
        } => {
            let args = args.iter().map(|a| eval_graded(a, dom)).collect::<Result<Vec<_>>>()?;
            let deriv = deriv.clone().unwrap_or_else(|| vec![0; args.len()]);
            if let Some(scalars) = args.iter().map(|a| a.as_scalar()).collect::<Option<Vec<_>>>() {
                GradedFunction::constant(dom, ScalarExpr::apply_derivative(name, deriv, scalars))
            } else {
                let slots: Vec<String> = (0..args.len()).map(|i| format!("#{i}")).collect();
                let f = ScalarExpr::apply_derivative(
                    name,
                    deriv,
                    slots.iter().map(|s| ScalarExpr::var(s)).collect(),
                );
                taylor_compose(dom, &f, &slots, &args).map_err(|e| match e {
                    Error::Degree(m) => Error::parse(1, *column, m),
                    other => other,
                })?
            }
        }
        Ast::Neg(a) => -&eval_graded(a, dom)?,
        Ast::Add(a, b) => &eval_graded(a, dom)? + &eval_graded(b, dom)?,
        Ast::Sub(a, b) => &eval_graded(a, dom)? - &eval_graded(b, dom)?,
        Ast::Mul(a, b) => &eval_graded(a, dom)? * &eval_graded(b, dom)?,
        Ast::Div(a, b, col) => {
            let d = eval_graded(b, dom)?;
            let inv = d
                .invert()
                .map_err(|_| Error::parse(1, *col, "division by a function with zero body"))?;
            &eval_graded(a, dom)? * &inv
        }
        Ast::Pow(a, e, col) => {
            let b = eval_graded(a, dom)?;
            if *e < 0 {
                b.invert()
                    .map_err(|_| Error::parse(1, *col, "negative power of a function with zero body"))?
                    .pow((-*e) as u32)
            } else {
                b.pow(*e as u32)
            }
        }
    })
}

impl<'a> Add<&'a GradedFunction> for &'a GradedFunction {
    type Output = GradedFunction;
    /// Panics on domain mismatch; use `checked_add` at API boundaries.
    fn add(self, o: &GradedFunction) -> GradedFunction {
        self.checked_add(o).expect("domain mismatch")
    }
}

impl<'a> Sub<&'a GradedFunction> for &'a GradedFunction {
    type Output = GradedFunction;
    fn sub(self, o: &GradedFunction) -> GradedFunction {
        self.checked_sub(o).expect("domain mismatch")
    }
}

impl<'a> Mul<&'a GradedFunction> for &'a GradedFunction {
    type Output = GradedFunction;
    fn mul(self, o: &GradedFunction) -> GradedFunction {
        self.checked_mul(o).expect("domain mismatch")
    }
}

impl Neg for &GradedFunction {
    type Output = GradedFunction;
    fn neg(self) -> GradedFunction {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect();
        GradedFunction::from_terms(&self.dom, terms)
    }
}

#[cfg(test)]
mod tests;
