use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{DomainSpec, GradedFunction};
use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::scalars::ScalarExpr;

/// `F(args)` for an opaque function symbol `F` of the given arity, expanded
/// as a Taylor series around the bodies of the arguments.
pub fn taylor_substitute(symbol: &str, args: &[GradedFunction]) -> Result<GradedFunction> {
    let dom = args
        .first()
        .map(|a| a.domain().clone())
        .ok_or_else(|| Error::Config("taylor_substitute needs at least one argument".into()))?;
    let slots: Vec<String> = (0..args.len()).map(|i| format!("#{i}")).collect();
    let f = ScalarExpr::apply(symbol, slots.iter().map(|s| ScalarExpr::var(s)).collect());
    taylor_compose(&dom, &f, &slots, args)
}

/// Substitute degree-zero graded functions for the variables `vars` of the
/// scalar `f`: `sum over beta of (1/beta!) (d^beta f)(s0) n^beta` where
/// `args = s0 + n` splits off the bodies. Variables of `f` not listed are left
/// untouched.
pub(crate) fn taylor_compose(
    dom: &DomainSpec,
    f: &ScalarExpr,
    vars: &[String],
    args: &[GradedFunction],
) -> Result<GradedFunction> {
    assert_eq!(vars.len(), args.len());
    let zero = Degree::zero(dom.n())?;
    for a in args {
        if a.domain() != dom {
            return Err(Error::DomainMismatch("Taylor argument on another domain".into()));
        }
        if !a.is_homogeneous_of(&zero) {
            return Err(Error::Degree(format!(
                "argument `{a}` of a scalar function must have degree {zero}"
            )));
        }
    }
    let mut at_body = BTreeMap::new();
    let mut nil: Vec<(usize, GradedFunction)> = Vec::new();
    for (i, a) in args.iter().enumerate() {
        let body = a.epsilon();
        at_body.insert(vars[i].clone(), body.clone());
        let rest = a - &GradedFunction::constant(dom, body);
        if !rest.is_zero() {
            nil.push((i, rest));
        }
    }
    let mut out = GradedFunction::zero(dom);
    let mut walk = Walk {
        dom,
        vars,
        nil: &nil,
        at_body: &at_body,
        out: &mut out,
    };
    walk.visit(0, f.clone(), GradedFunction::one(dom), BigRational::one(), 0, 0)?;
    Ok(out)
}

struct Walk<'a> {
    dom: &'a DomainSpec,
    vars: &'a [String],
    nil: &'a [(usize, GradedFunction)],
    at_body: &'a BTreeMap<String, ScalarExpr>,
    out: &'a mut GradedFunction,
}

impl Walk<'_> {
    /// Multi-indices are enumerated in nondecreasing slot order; `run` counts
    /// how often the last slot `last` has been used so far.
    fn visit(
        &mut self,
        start: usize,
        deriv: ScalarExpr,
        prod: GradedFunction,
        coef: BigRational,
        order: u32,
        run: u32,
    ) -> Result<()> {
        let value = deriv.substitute(self.at_body).scale(&coef);
        *self.out = &*self.out + &prod.scale(&value);
        if order >= self.dom.truncation() {
            return Ok(());
        }
        for k in start..self.nil.len() {
            let (slot, n) = &self.nil[k];
            let next = &prod * n;
            if next.is_zero() {
                continue;
            }
            let d = deriv.differentiate(&self.vars[*slot]);
            if d.is_zero() {
                continue;
            }
            let mult = if k == start && order > 0 { run + 1 } else { 1 };
            let c = &coef / BigRational::from_integer(BigInt::from(mult));
            self.visit(k, d, next, c, order + 1, mult)?;
        }
        Ok(())
    }
}
