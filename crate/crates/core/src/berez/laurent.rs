//! Laurent series in one even generator of nonzero degree: the localization
//! used by the residue integral.
//!
//! A truncated algebra cannot be localized (the pole variable is nilpotent
//! there), so every value carries a precision: all terms of weight up to the
//! precision are exact, everything above is unknown and dropped. Weights count
//! negative exponents negatively.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gfun::{add_into, eval_graded, mono_product, weight, DomainSpec, Exponents, GradedFunction};
use crate::morph::CoordMorphism;
use crate::parse::{parse_expr, Ast};
use crate::scalars::{fmt_power, ScalarExpr};

#[derive(Clone, Debug)]
pub struct LaurentFunction {
    dom: DomainSpec,
    pole: usize,
    terms: BTreeMap<Exponents, ScalarExpr>,
    /// `None` for an exact finite expression.
    precision: Option<i32>,
}

fn min_prec(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn shift(p: Option<i32>, v: Option<i32>) -> Option<i32> {
    match (p, v) {
        (Some(p), Some(v)) => Some(p + v),
        _ => None,
    }
}

/// Index of the pole generator, which must be even of nonzero degree.
fn pole_index(dom: &DomainSpec, pole: &str) -> Result<usize> {
    let i = dom
        .gen_index(pole)
        .ok_or_else(|| Error::UnknownVariable(format!("`{pole}` is not a generator of the domain")))?;
    if dom.is_odd(i) {
        return Err(Error::Degree(format!("pole variable `{pole}` must be even")));
    }
    Ok(i)
}

impl LaurentFunction {
    fn build(dom: &DomainSpec, pole: usize, terms: BTreeMap<Exponents, ScalarExpr>, precision: Option<i32>) -> Self {
        let terms = match precision {
            Some(p) => terms.into_iter().filter(|(e, _)| weight(e) <= p).collect(),
            None => terms,
        };
        LaurentFunction {
            dom: dom.clone(),
            pole,
            terms,
            precision,
        }
    }

    pub fn zero(dom: &DomainSpec, pole: &str) -> Result<Self> {
        Ok(LaurentFunction::build(dom, pole_index(dom, pole)?, BTreeMap::new(), None))
    }

    /// A truncated function, known up to the truncation order of its domain.
    pub fn from_graded(f: &GradedFunction, pole: &str) -> Result<Self> {
        let dom = f.domain();
        let terms = f.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        let p = Some(dom.truncation() as i32);
        Ok(LaurentFunction::build(dom, pole_index(dom, pole)?, terms, p))
    }

    /// A function whose terms are all there is: no unknown tail.
    pub fn exact(f: &GradedFunction, pole: &str) -> Result<Self> {
        let dom = f.domain();
        let terms = f.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        Ok(LaurentFunction::build(dom, pole_index(dom, pole)?, terms, None))
    }

    /// `pole^k` as an exact element.
    pub fn pole_power(dom: &DomainSpec, pole: &str, k: i16) -> Result<Self> {
        let i = pole_index(dom, pole)?;
        let mut e = vec![0; dom.generators().len()];
        e[i] = k;
        let mut terms = BTreeMap::new();
        terms.insert(e, ScalarExpr::one());
        Ok(LaurentFunction::build(dom, i, terms, None))
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.dom
    }

    pub fn pole(&self) -> &str {
        &self.dom.generators()[self.pole].name
    }

    pub fn precision(&self) -> Option<i32> {
        self.precision
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest pole exponent, or `None` for zero.
    pub fn min_pole_exponent(&self) -> Option<i16> {
        self.terms.keys().map(|e| e[self.pole]).min()
    }

    /// Minimal weight of a term.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.keys().map(|e| weight(e)).min()
    }

    /// Coefficient of a monomial; an error if that monomial lies beyond the
    /// known precision.
    pub fn coefficient(&self, e: &[i16]) -> Result<ScalarExpr> {
        if let Some(p) = self.precision {
            if weight(e) > p {
                return Err(Error::Truncation(format!(
                    "coefficient of weight {} requested but the series is only known up to weight {p}",
                    weight(e)
                )));
            }
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(ScalarExpr::zero))
    }

    /// The part without negative exponents, if there are none.
    pub fn to_graded(&self) -> Option<GradedFunction> {
        if self.min_pole_exponent().is_some_and(|k| k < 0) {
            return None;
        }
        let mut out = GradedFunction::zero(&self.dom);
        for (e, c) in &self.terms {
            out = &out + &GradedFunction::monomial(&self.dom, e.clone(), c.clone());
        }
        Some(out)
    }

    fn check(&self, o: &LaurentFunction) -> Result<()> {
        if self.dom != o.dom || self.pole != o.pole {
            return Err(Error::DomainMismatch("Laurent series over different domains or poles".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &LaurentFunction) -> Result<LaurentFunction> {
        self.check(o)?;
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            add_into(&mut terms, k.clone(), v.clone());
        }
        Ok(LaurentFunction::build(&self.dom, self.pole, terms, min_prec(self.precision, o.precision)))
    }

    pub fn neg(&self) -> LaurentFunction {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect();
        LaurentFunction::build(&self.dom, self.pole, terms, self.precision)
    }

    pub fn checked_sub(&self, o: &LaurentFunction) -> Result<LaurentFunction> {
        self.checked_add(&o.neg())
    }

    pub fn scale(&self, c: &ScalarExpr) -> LaurentFunction {
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        LaurentFunction::build(&self.dom, self.pole, terms, self.precision)
    }

    pub fn checked_mul(&self, o: &LaurentFunction) -> Result<LaurentFunction> {
        self.check(o)?;
        // An unknown tail of one factor meets the lowest term of the other.
        let p = min_prec(shift(self.precision, o.valuation()), shift(o.precision, self.valuation()));
        let p = if self.is_zero() || o.is_zero() { None } else { p };
        let d = self.dom.data();
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                if p.is_some_and(|p| weight(ea) + weight(eb) > p) {
                    continue;
                }
                if let Some((e, neg)) = mono_product(d, ea, eb) {
                    let c = ca * cb;
                    add_into(&mut terms, e, if neg { -c } else { c });
                }
            }
        }
        Ok(LaurentFunction::build(&self.dom, self.pole, terms, p))
    }

    /// Inverse in the localization: write `f = c y^k (1 + s)` with `c y^k`
    /// the pure pole term of lowest exponent, require every term of `s` to
    /// have positive weight, and sum the geometric series.
    pub fn invert(&self) -> Result<LaurentFunction> {
        let pure = |e: &Exponents| e.iter().enumerate().all(|(i, &v)| v == 0 || i == self.pole);
        let (lead_e, lead_c) = self
            .terms
            .iter()
            .filter(|(e, _)| pure(e))
            .min_by_key(|(e, _)| e[self.pole])
            .ok_or_else(|| Error::NotInvertible(format!("`{self}` has no pure power of the pole variable")))?;
        let k = lead_e[self.pole];
        let c_inv = lead_c.inv()?;
        let lead_inv = LaurentFunction::pole_power(&self.dom, self.pole(), -k)?.scale(&c_inv);
        let one = LaurentFunction::pole_power(&self.dom, self.pole(), 0)?;
        let s = self.checked_mul(&lead_inv)?.checked_sub(&one)?;
        if let Some(v) = s.valuation() {
            if v < 1 {
                return Err(Error::NotInvertible(format!(
                    "`{self}` is not a unit times a power of `{}`",
                    self.pole()
                )));
            }
        }
        // Terms of s^l have weight at least l, so l up to the precision (or
        // the truncation order for exact input) suffices.
        let cap = s.precision.unwrap_or(self.dom.truncation() as i32).max(0);
        let mut sum = one.clone();
        let mut pow = one.clone();
        let mut exhausted = false;
        for _ in 0..cap {
            pow = pow.checked_mul(&s)?.neg();
            if pow.is_zero() && pow.precision.is_none() {
                exhausted = true;
                break;
            }
            sum = sum.checked_add(&pow)?;
        }
        if !exhausted && !s.is_zero() {
            let p = min_prec(sum.precision, Some(cap));
            sum = LaurentFunction::build(&self.dom, self.pole, sum.terms, p);
        }
        sum.checked_mul(&lead_inv)
    }

    pub fn pow(&self, k: i32) -> Result<LaurentFunction> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut acc = LaurentFunction::pole_power(&self.dom, self.pole(), 0)?;
        for _ in 0..k.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    /// True if both agree on every term up to the smaller precision.
    pub fn agrees_with(&self, o: &LaurentFunction) -> bool {
        if self.check(o).is_err() {
            return false;
        }
        let p = min_prec(self.precision, o.precision);
        let keep = |e: &Exponents| p.is_none_or(|p| weight(e) <= p);
        let a: BTreeMap<_, _> = self.terms.iter().filter(|(e, _)| keep(e)).collect();
        let b: BTreeMap<_, _> = o.terms.iter().filter(|(e, _)| keep(e)).collect();
        a == b
    }

    /// Parse an expression in which the pole variable may carry negative
    /// powers, e.g. `alpha(X)*Y^-1*XI*H`.
    pub fn parse(dom: &DomainSpec, pole: &str, src: &str) -> Result<LaurentFunction> {
        pole_index(dom, pole)?;
        eval_laurent(&parse_expr(src)?, dom, pole)
    }

    /// `phi~*`: the pullback extended to the localization. The source pole
    /// is the unique source generator of the same degree as the target pole,
    /// and its pullback must be that generator times a unit.
    pub fn pullback(&self, phi: &CoordMorphism) -> Result<LaurentFunction> {
        if phi.target() != &self.dom {
            return Err(Error::DomainMismatch("Laurent series is not on the target domain".into()));
        }
        let src = phi.source();
        let pdeg = self.dom.generators()[self.pole].degree;
        let cands: Vec<_> = src.generators().iter().filter(|g| g.degree == pdeg).collect();
        if cands.len() != 1 {
            return Err(Error::Unsupported(format!(
                "the source needs exactly one generator of degree {pdeg} to carry the pole"
            )));
        }
        let spole = cands[0].name.clone();
        let tgens = self.dom.generators();
        let images: Vec<LaurentFunction> = tgens
            .iter()
            .map(|g| LaurentFunction::from_graded(phi.value(&g.name).unwrap(), &spole))
            .collect::<Result<_>>()?;
        let y = &images[self.pole];
        let lead = y
            .terms
            .iter()
            .filter(|(e, _)| e.iter().enumerate().all(|(i, &v)| v == 0 || src.generators()[i].name == spole))
            .map(|(e, _)| e.iter().map(|&v| v as i32).sum::<i32>())
            .min();
        if lead != Some(1) {
            return Err(Error::NotInvertible(format!(
                "pullback of `{}` is not `{spole}` times a unit",
                self.pole()
            )));
        }
        let y_inv = y.invert()?;
        let vars = self.dom.base_vars().to_vec();
        let bases: Vec<GradedFunction> = vars.iter().map(|v| phi.value(v).unwrap().clone()).collect();
        let mut out = LaurentFunction::zero(src, &spole)?;
        for (e, c) in &self.terms {
            let coef = crate::gfun::taylor_compose(src, c, &vars, &bases)?;
            let mut t = LaurentFunction::from_graded(&coef, &spole)?;
            for (k, &ek) in e.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                let base = if ek < 0 { &y_inv } else { &images[k] };
                for _ in 0..ek.unsigned_abs() {
                    t = t.checked_mul(base)?;
                }
            }
            out = out.checked_add(&t)?;
        }
        // Unknown terms of the input have weight above its precision, and the
        // pullback does not lower weights.
        let p = min_prec(out.precision, self.precision);
        Ok(LaurentFunction::build(src, out.pole, out.terms, p))
    }
}

fn eval_laurent(ast: &Ast, dom: &DomainSpec, pole: &str) -> Result<LaurentFunction> {
    let plain = |f: GradedFunction| LaurentFunction::exact(&f, pole);
    Ok(match ast {
        Ast::Num(_) | Ast::Ident { .. } => plain(eval_graded(ast, dom)?)?,
        Ast::Call { args, .. } => {
            let f = eval_graded(ast, dom)?;
            // A symbol applied to non-scalar arguments is a truncated Taylor series.
            let exact = args.iter().all(|a| eval_graded(a, dom).map(|g| g.as_scalar().is_some()).unwrap_or(false));
            if exact {
                plain(f)?
            } else {
                LaurentFunction::from_graded(&f, pole)?
            }
        }
        Ast::Neg(a) => eval_laurent(a, dom, pole)?.neg(),
        Ast::Add(a, b) => eval_laurent(a, dom, pole)?.checked_add(&eval_laurent(b, dom, pole)?)?,
        Ast::Sub(a, b) => eval_laurent(a, dom, pole)?.checked_sub(&eval_laurent(b, dom, pole)?)?,
        Ast::Mul(a, b) => eval_laurent(a, dom, pole)?.checked_mul(&eval_laurent(b, dom, pole)?)?,
        Ast::Div(a, b, col) => {
            let d = eval_laurent(b, dom, pole)?
                .invert()
                .map_err(|e| Error::parse(1, *col, e.to_string()))?;
            eval_laurent(a, dom, pole)?.checked_mul(&d)?
        }
        Ast::Pow(a, e, col) => {
            let b = eval_laurent(a, dom, pole)?;
            let k = i32::try_from(*e).map_err(|_| Error::parse(1, *col, "exponent out of range"))?;
            b.pow(k).map_err(|e| Error::parse(1, *col, e.to_string()))?
        }
    })
}

impl PartialEq for LaurentFunction {
    fn eq(&self, o: &LaurentFunction) -> bool {
        self.dom == o.dom && self.pole == o.pole && self.terms == o.terms && self.precision == o.precision
    }
}

impl fmt::Display for LaurentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dom.data();
        let s = crate::gfun::render_terms(d, self.terms.iter().map(|(e, c)| (e.as_slice(), c)), &|i, p| {
            if p < 0 {
                format!("{}^{p}", d.gens[i].name)
            } else {
                fmt_power(&d.gens[i].name, p as u32)
            }
        });
        write!(f, "{s}")
    }
}
