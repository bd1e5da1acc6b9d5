//! Exact scalars: rational functions over Q in variables and opaque function
//! symbols, kept in a canonical reduced form.

pub(crate) mod atom;
mod gcd;
pub(crate) mod poly;
mod registry;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::parse::{parse_expr, Ast};
use atom::{AtomData, AtomId};
use poly::{Mono, Poly};

pub use registry::{definite_integral, Interval, IntegralEntry, IntegralRegistry};

pub type Rational = BigRational;

/// Symbols with built-in derivative relations: sin' = cos, cos' = -sin,
/// exp' = exp. No other identities (such as sin^2 + cos^2 = 1) are applied.
const BUILTINS: [&str; 3] = ["sin", "cos", "exp"];

/// A reduced fraction `num/den` with `gcd(num, den) = 1` and the canonical
/// leading coefficient of `den` equal to one. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        ScalarExpr::from_rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        ScalarExpr::from_rational(BigRational::from_integer(v.into()))
    }

    pub fn from_rational(c: Rational) -> Self {
        ScalarExpr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn var(name: &str) -> Self {
        ScalarExpr::from_poly(Poly::atom(atom::intern(AtomData::Var(name.to_string()))))
    }

    /// The opaque function `name` applied to `args`.
    pub fn apply(name: &str, args: Vec<ScalarExpr>) -> Self {
        let deriv = vec![0; args.len()];
        ScalarExpr::apply_derivative(name, deriv, args)
    }

    /// `name` differentiated `deriv[i]` times in slot i, applied to `args`.
    pub fn apply_derivative(name: &str, deriv: Vec<u32>, args: Vec<ScalarExpr>) -> Self {
        assert_eq!(deriv.len(), args.len(), "derivative index must match arity");
        if args.len() == 1 && BUILTINS.contains(&name) && deriv[0] > 0 {
            let k = deriv[0];
            let base = ScalarExpr::apply(name, args.clone());
            return match name {
                "exp" => base,
                _ => {
                    // sin -> cos -> -sin -> -cos -> sin
                    let start = if name == "sin" { 0 } else { 1 };
                    let (sym, negate) = match (start + k) % 4 {
                        0 => ("sin", false),
                        1 => ("cos", false),
                        2 => ("sin", true),
                        _ => ("cos", true),
                    };
                    let v = ScalarExpr::apply(sym, args);
                    if negate {
                        -v
                    } else {
                        v
                    }
                }
            };
        }
        let id = atom::intern(AtomData::Fun {
            name: name.to_string(),
            deriv,
            args,
        });
        ScalarExpr::from_poly(Poly::atom(id))
    }

    pub(crate) fn from_poly(p: Poly) -> Self {
        ScalarExpr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Build `num/den`, reducing by the gcd and normalizing the denominator.
    fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        if num.is_zero() {
            return Ok(ScalarExpr::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(ScalarExpr::from_poly(num.scale(&c.recip())));
        }
        let g = gcd::gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lead = den.canonical_leading().unwrap().1.recip();
        Ok(ScalarExpr {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// True when the denominator is 1.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub(crate) fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero scalar".into()));
        }
        ScalarExpr::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &ScalarExpr) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(ScalarExpr {
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        }
        .renormalized())
    }

    /// Powers of a reduced fraction stay reduced; only the denominator
    /// scaling may need fixing.
    fn renormalized(self) -> Self {
        if self.den.is_one() || self.num.is_zero() {
            return self;
        }
        let lead = self.den.canonical_leading().unwrap().1.recip();
        if lead.is_one() {
            return self;
        }
        ScalarExpr {
            num: self.num.scale(&lead),
            den: self.den.scale(&lead),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Partial derivative with respect to the variable `var`, using the chain
    /// rule through function arguments.
    pub fn differentiate(&self, var: &str) -> Self {
        let dn = poly_derivative(&self.num, var);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_derivative(&self.den, var);
        let n = ScalarExpr::from_poly(self.num.clone());
        let d = ScalarExpr::from_poly(self.den.clone());
        let top = &(&dn * &d) - &(&n * &dd);
        top.checked_div(&(&d * &d)).expect("denominator is nonzero")
    }

    /// Simultaneous substitution of variables by scalars.
    pub fn substitute(&self, map: &BTreeMap<String, ScalarExpr>) -> Self {
        if map.is_empty() {
            return self.clone();
        }
        let mut images: HashMap<AtomId, Option<ScalarExpr>> = HashMap::new();
        let n = subst_poly(&self.num, map, &mut images);
        if self.den.is_one() {
            return n;
        }
        let d = subst_poly(&self.den, map, &mut images);
        n.checked_div(&d).expect("substitution made a denominator vanish")
    }

    /// Evaluate at a rational point. Opaque symbols stay symbolic.
    pub fn evaluate(&self, point: &BTreeMap<String, Rational>) -> Result<Self> {
        let map: BTreeMap<String, ScalarExpr> = point
            .iter()
            .map(|(k, v)| (k.clone(), ScalarExpr::from_rational(v.clone())))
            .collect();
        let mut images = HashMap::new();
        let n = subst_poly(&self.num, &map, &mut images);
        let d = subst_poly(&self.den, &map, &mut images);
        if d.is_zero() {
            return Err(Error::NotInvertible(format!("denominator of {self} vanishes at the point")));
        }
        n.checked_div(&d)
    }

    /// Variables occurring anywhere, including inside function arguments.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for id in self.num.atoms().into_iter().chain(self.den.atoms()) {
            match &*atom::data(id) {
                AtomData::Var(n) => {
                    out.insert(n.clone());
                }
                AtomData::Fun { args, .. } => {
                    for a in args {
                        out.extend(a.free_vars());
                    }
                }
            }
        }
        out
    }

    /// True when `var` occurs nowhere in the expression.
    pub fn is_free_of(&self, var: &str) -> bool {
        !self.free_vars().contains(var)
    }

    pub fn parse(src: &str) -> Result<Self> {
        eval_ast(&parse_expr(src)?)
    }

}

fn eval_ast(ast: &Ast) -> Result<ScalarExpr> {
    Ok(match ast {
        Ast::Num(n) => ScalarExpr::from_rational(BigRational::from_integer(n.clone())),
        Ast::Ident { name, .. } => ScalarExpr::var(name),
        Ast::Call {
            name, deriv, args, ..
        } => {
            let args = args.iter().map(eval_ast).collect::<Result<Vec<_>>>()?;
            let deriv = deriv.clone().unwrap_or_else(|| vec![0; args.len()]);
            ScalarExpr::apply_derivative(name, deriv, args)
        }
        Ast::Neg(a) => -eval_ast(a)?,
        Ast::Add(a, b) => &eval_ast(a)? + &eval_ast(b)?,
        Ast::Sub(a, b) => &eval_ast(a)? - &eval_ast(b)?,
        Ast::Mul(a, b) => &eval_ast(a)? * &eval_ast(b)?,
        Ast::Div(a, b, col) => {
            let d = eval_ast(b)?;
            if d.is_zero() {
                return Err(Error::parse(1, *col, "division by zero"));
            }
            eval_ast(a)?.checked_div(&d)?
        }
        Ast::Pow(a, e, col) => {
            let b = eval_ast(a)?;
            if *e < 0 && b.is_zero() {
                return Err(Error::parse(1, *col, "negative power of zero"));
            }
            b.pow(*e as i32)?
        }
    })
}

fn atom_derivative(id: AtomId, var: &str) -> ScalarExpr {
    match &*atom::data(id) {
        AtomData::Var(n) => {
            if n == var {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            }
        }
        AtomData::Fun { name, deriv, args } => {
            let mut acc = ScalarExpr::zero();
            for (i, a) in args.iter().enumerate() {
                let da = a.differentiate(var);
                if da.is_zero() {
                    continue;
                }
                let mut d = deriv.clone();
                d[i] += 1;
                acc = &acc + &(&ScalarExpr::apply_derivative(name, d, args.clone()) * &da);
            }
            acc
        }
    }
}

/// Formal partial derivative of `p` with respect to the atom `a`.
fn formal_partial(p: &Poly, a: AtomId) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let e = poly::mono_exp(m, a);
        if e == 0 {
            continue;
        }
        let mut m2: Mono = m.clone();
        if e == 1 {
            m2.retain(|x| x.0 != a);
        } else {
            for x in m2.iter_mut() {
                if x.0 == a {
                    x.1 -= 1;
                }
            }
        }
        out = out.add(&Poly::monomial(m2, c * BigRational::from_integer(e.into())));
    }
    out
}

fn poly_derivative(p: &Poly, var: &str) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for a in p.atoms() {
        let da = atom_derivative(a, var);
        if da.is_zero() {
            continue;
        }
        acc = &acc + &(&ScalarExpr::from_poly(formal_partial(p, a)) * &da);
    }
    acc
}

fn atom_image(
    id: AtomId,
    map: &BTreeMap<String, ScalarExpr>,
    cache: &mut HashMap<AtomId, Option<ScalarExpr>>,
) -> Option<ScalarExpr> {
    if let Some(v) = cache.get(&id) {
        return v.clone();
    }
    let img = match &*atom::data(id) {
        AtomData::Var(n) => map.get(n).cloned(),
        AtomData::Fun { name, deriv, args } => {
            let new_args: Vec<ScalarExpr> = args.iter().map(|a| a.substitute(map)).collect();
            if &new_args == args {
                None
            } else {
                Some(ScalarExpr::apply_derivative(name, deriv.clone(), new_args))
            }
        }
    };
    cache.insert(id, img.clone());
    img
}

fn subst_poly(
    p: &Poly,
    map: &BTreeMap<String, ScalarExpr>,
    cache: &mut HashMap<AtomId, Option<ScalarExpr>>,
) -> ScalarExpr {
    let atoms = p.atoms();
    let images: Vec<(AtomId, ScalarExpr)> = atoms
        .iter()
        .filter_map(|&a| atom_image(a, map, cache).map(|v| (a, v)))
        .collect();
    if images.is_empty() {
        return ScalarExpr::from_poly(p.clone());
    }
    if images.iter().all(|(_, v)| v.is_polynomial()) {
        // Stay in the polynomial ring.
        let mut out = Poly::zero();
        let mut pow_cache: HashMap<(AtomId, u32), Poly> = HashMap::new();
        for (m, c) in &p.terms {
            let mut t = Poly::constant(c.clone());
            for &(a, e) in m {
                match images.iter().find(|x| x.0 == a) {
                    Some((_, v)) => {
                        let pw = pow_cache.entry((a, e)).or_insert_with(|| v.num.pow(e)).clone();
                        t = t.mul(&pw);
                    }
                    None => t = t.mul_mono(&vec![(a, e)], &BigRational::one()),
                }
                if t.is_zero() {
                    break;
                }
            }
            out = out.add(&t);
        }
        return ScalarExpr::from_poly(out);
    }
    let mut acc = ScalarExpr::zero();
    for (m, c) in &p.terms {
        let mut t = ScalarExpr::from_rational(c.clone());
        for &(a, e) in m {
            let f = match images.iter().find(|x| x.0 == a) {
                Some((_, v)) => v.pow(e as i32).expect("nonnegative power"),
                None => ScalarExpr::from_poly(Poly::monomial(vec![(a, e)], BigRational::one())),
            };
            t = &t * &f;
        }
        acc = &acc + &t;
    }
    acc
}

impl<'a> Add<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, o: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = self.num.add(&o.num);
            if self.den.is_one() {
                return ScalarExpr::from_poly(num);
            }
            return ScalarExpr::from_parts(num, self.den.clone()).unwrap();
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        ScalarExpr::from_parts(num, self.den.mul(&o.den)).unwrap()
    }
}

impl<'a> Sub<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, o: &ScalarExpr) -> ScalarExpr {
        self + &(-o)
    }
}

impl<'a> Mul<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, o: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || o.is_zero() {
            return ScalarExpr::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return ScalarExpr::from_poly(self.num.mul(&o.num));
        }
        // Cross-cancel before multiplying; both inputs are reduced.
        let g1 = gcd::gcd(&self.num, &o.den);
        let g2 = gcd::gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        if let Some(c) = den.constant_value() {
            return ScalarExpr::from_poly(num.scale(&c.recip()));
        }
        let lead = den.canonical_leading().unwrap().1.recip();
        ScalarExpr {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, o: ScalarExpr) -> ScalarExpr {
        &self + &o
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, o: ScalarExpr) -> ScalarExpr {
        &self - &o
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, o: ScalarExpr) -> ScalarExpr {
        &self * &o
    }
}

impl From<i64> for ScalarExpr {
    fn from(v: i64) -> Self {
        ScalarExpr::from_int(v)
    }
}

impl From<Rational> for ScalarExpr {
    fn from(v: Rational) -> Self {
        ScalarExpr::from_rational(v)
    }
}

impl FromStr for ScalarExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScalarExpr::parse(s)
    }
}

// ---- printing ----

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn fmt_atom(id: AtomId) -> String {
    match &*atom::data(id) {
        AtomData::Var(n) => n.clone(),
        AtomData::Fun { name, deriv, args } => {
            let args_s: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            let args_s = args_s.join(", ");
            if deriv.iter().all(|d| *d == 0) {
                format!("{name}({args_s})")
            } else if deriv.len() == 1 && deriv[0] <= 3 {
                format!("{name}{}({args_s})", "'".repeat(deriv[0] as usize))
            } else {
                let d: Vec<String> = deriv.iter().map(|d| d.to_string()).collect();
                format!("D[{name},({})]({args_s})", d.join(","))
            }
        }
    }
}

pub(crate) fn fmt_power(base: &str, e: u32) -> String {
    if e == 1 {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

/// Factors of a monomial in printing order: variables alphabetically, then
/// function atoms.
pub(crate) fn mono_factors(m: &Mono) -> Vec<String> {
    let mut keyed: Vec<_> = m.iter().map(|&(a, e)| (atom::key(a), fmt_power(&fmt_atom(a), e))).collect();
    keyed.sort();
    keyed.into_iter().map(|p| p.1).collect()
}

/// Join a coefficient and factor strings into one signed term.
pub(crate) fn fmt_term(c: &Rational, factors: &[String]) -> String {
    if factors.is_empty() {
        return fmt_rational(c);
    }
    let body = factors.join("*");
    if c.is_one() {
        body
    } else if (-c).is_one() {
        format!("-{body}")
    } else {
        format!("{}*{body}", fmt_rational(c))
    }
}

pub(crate) fn join_terms(terms: &[String]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = terms[0].clone();
    for t in &terms[1..] {
        if let Some(rest) = t.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(t);
        }
    }
    s
}

fn fmt_poly(p: &Poly) -> String {
    let mut terms: Vec<(&Mono, &Rational)> = p.terms.iter().collect();
    terms.sort_by(|a, b| poly::canonical_cmp(b.0, a.0));
    let strs: Vec<String> = terms.iter().map(|(m, c)| fmt_term(c, &mono_factors(m))).collect();
    join_terms(&strs)
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = fmt_poly(&self.num);
        if self.den.is_one() {
            return write!(f, "{n}");
        }
        let n = if self.num.terms.len() > 1 { format!("({n})") } else { n };
        let single_atom = self.den.terms.len() == 1 && {
            let (m, c) = self.den.terms.iter().next().unwrap();
            c.is_one() && m.len() == 1
        };
        let d = fmt_poly(&self.den);
        if single_atom {
            write!(f, "{n}/{d}")
        } else {
            write!(f, "{n}/({d})")
        }
    }
}
