//! Registered definite integrals of opaque symbols and closed-form
//! integration over coordinate boxes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::atom::{self, AtomData, AtomId};
use super::poly::Poly;
use super::{fmt_rational, Rational, ScalarExpr};
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Config(format!(
                "interval [{}, {}] is empty",
                fmt_rational(&lo),
                fmt_rational(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn parse(src: &str) -> Result<Self> {
        let t = src.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::parse(1, 1, format!("expected an interval like [0,1], got `{t}`")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::parse(1, 1, format!("expected two endpoints in `{t}`")));
        }
        let lo = parse_rational(parts[0])?;
        let hi = parse_rational(parts[1])?;
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

pub(crate) fn parse_rational(src: &str) -> Result<Rational> {
    let e = ScalarExpr::parse(src.trim())?;
    e.as_rational()
        .ok_or_else(|| Error::parse(1, 1, format!("`{}` is not a rational number", src.trim())))
}

/// `integral of symbol over interval = value`; `compact` marks the symbol as
/// compactly supported in the interior of the interval.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegralEntry {
    pub symbol: String,
    pub interval: Interval,
    pub value: Rational,
    pub compact: bool,
}

#[derive(Clone, Default, Debug)]
pub struct IntegralRegistry {
    entries: BTreeMap<String, Vec<IntegralEntry>>,
}

impl IntegralRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, symbol: &str, interval: Interval, value: Rational) {
        let list = self.entries.entry(symbol.to_string()).or_default();
        list.retain(|e| e.interval != interval);
        list.push(IntegralEntry {
            symbol: symbol.to_string(),
            interval,
            value,
            compact: false,
        });
    }

    /// Flag every registered interval of `symbol` as containing its support.
    pub fn set_compact(&mut self, symbol: &str) -> Result<()> {
        let list = self
            .entries
            .get_mut(symbol)
            .ok_or_else(|| Error::Config(format!("`{symbol}` has no registered integral")))?;
        for e in list {
            e.compact = true;
        }
        Ok(())
    }

    pub fn entries(&self, symbol: &str) -> &[IntegralEntry] {
        self.entries.get(symbol).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn is_compact(&self, symbol: &str) -> bool {
        self.entries(symbol).iter().any(|e| e.compact)
    }

    /// Parse lines `integral alpha [0,1] = 1` and `support alpha compact`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut reg = IntegralRegistry::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "integral" => {
                    let rest = line["integral".len()..].trim();
                    let (lhs, value) = rest
                        .split_once('=')
                        .ok_or_else(|| Error::parse(lineno, 1, "expected `integral NAME [a,b] = VALUE`"))?;
                    let lhs = lhs.trim();
                    let open = lhs
                        .find('[')
                        .ok_or_else(|| Error::parse(lineno, 1, "missing interval"))?;
                    let name = lhs[..open].trim();
                    if name.is_empty() {
                        return Err(Error::parse(lineno, 1, "missing symbol name"));
                    }
                    let interval = Interval::parse(&lhs[open..]).map_err(|e| e.at_line(lineno))?;
                    let value = parse_rational(value).map_err(|e| e.at_line(lineno))?;
                    reg.register(name, interval, value);
                }
                "support" if words.len() == 3 && words[2] == "compact" => {
                    reg.set_compact(words[1])?;
                }
                other => {
                    return Err(Error::parse(lineno, 1, format!("unknown registry directive `{other}`")));
                }
            }
        }
        Ok(reg)
    }
}

/// If `e` is `a*v + b` for a single variable `v`, return `(v, a, b)`.
fn affine_in_one_var(e: &ScalarExpr) -> Option<(String, Rational, Rational)> {
    if !e.is_polynomial() {
        return None;
    }
    let mut var: Option<(String, Rational)> = None;
    let mut b = Rational::zero();
    for (m, c) in &e.numerator().terms {
        match m.as_slice() {
            [] => b = c.clone(),
            [(id, 1)] => match &*atom::data(*id) {
                AtomData::Var(n) if var.is_none() => var = Some((n.clone(), c.clone())),
                _ => return None,
            },
            _ => return None,
        }
    }
    var.map(|(v, a)| (v, a, b))
}

fn power_integral(iv: &Interval, e: u32) -> Rational {
    let k = e as i32 + 1;
    let hi = num_traits::pow(iv.hi.clone(), k as usize);
    let lo = num_traits::pow(iv.lo.clone(), k as usize);
    (hi - lo) / Rational::from_integer(BigInt::from(k))
}

/// The registered entry of a compactly supported `name` whose support lies
/// inside `image`.
fn compact_entry<'a>(reg: &'a IntegralRegistry, name: &str, image: &Interval) -> Option<&'a IntegralEntry> {
    reg.entries(name)
        .iter()
        .find(|e| e.compact && image.contains(&e.interval))
}

/// Terms `sum_j c_j v^j * name^(k)(a*v + b)` sharing one symbol and argument,
/// keyed by `k` then `j`.
type Moments = BTreeMap<u32, BTreeMap<u32, Rational>>;

/// Integrate by parts down to `k = 0`; boundary terms vanish because the
/// support lies inside the image interval. Only the zeroth moment of a
/// symbol is known, so a surviving `v^j` with `j > 0` is an error.
fn reduce_moments(name: &str, a: &Rational, mut m: Moments, value: &Rational) -> Result<Rational> {
    let top = m.keys().next_back().copied().unwrap_or(0);
    for k in (1..=top).rev() {
        let Some(layer) = m.remove(&k) else { continue };
        for (j, c) in layer {
            if j == 0 {
                continue;
            }
            let d = -(c * Rational::from_integer(j.into())) / a;
            *m.entry(k - 1).or_default().entry(j - 1).or_insert_with(Rational::zero) += d;
        }
    }
    let mut total = Rational::zero();
    for (j, c) in m.remove(&0).unwrap_or_default() {
        if c.is_zero() {
            continue;
        }
        if j > 0 {
            return Err(Error::NotIntegrable(format!("moment of order {j} of `{name}` is not registered")));
        }
        total += c * value / a.abs();
    }
    Ok(total)
}

fn image_of(iv: &Interval, a: &Rational, b: &Rational) -> Interval {
    let p = a * &iv.lo + b;
    let q = a * &iv.hi + b;
    Interval {
        lo: p.clone().min(q.clone()),
        hi: p.max(q),
    }
}

/// Definite integral of `expr` over the box given by `bounds`. Supported
/// integrands: polynomials in the box variables plus terms with a single
/// registered symbol (or derivative) of an affine argument. Compactly
/// supported symbols are handled by change of variables and integration by
/// parts; other symbols only over exactly their registered interval.
pub fn definite_integral(
    expr: &ScalarExpr,
    bounds: &BTreeMap<String, Interval>,
    reg: &IntegralRegistry,
) -> Result<Rational> {
    if !expr.is_polynomial() {
        return Err(Error::NotIntegrable(format!("`{expr}` is not polynomial in the box variables")));
    }
    let num: &Poly = expr.numerator();
    let mut total = Rational::zero();
    // (symbol, variable, a, b) -> moments, plus the registered value.
    let mut groups: BTreeMap<(String, String, Rational, Rational), (Moments, Rational)> = BTreeMap::new();
    for (m, c) in &num.terms {
        let mut var_exps: BTreeMap<String, u32> = BTreeMap::new();
        let mut fun: Option<AtomId> = None;
        for &(id, e) in m {
            match &*atom::data(id) {
                AtomData::Var(n) => {
                    if !bounds.contains_key(n) {
                        return Err(Error::NotIntegrable(format!("variable `{n}` has no integration bounds")));
                    }
                    var_exps.insert(n.clone(), e);
                }
                AtomData::Fun { .. } => {
                    if fun.is_some() || e != 1 {
                        return Err(Error::NotIntegrable(format!(
                            "products of opaque symbols are not integrable in `{expr}`"
                        )));
                    }
                    fun = Some(id);
                }
            }
        }
        let Some(id) = fun else {
            let mut value = c.clone();
            for (v, iv) in bounds {
                value *= power_integral(iv, var_exps.get(v).copied().unwrap_or(0));
            }
            total += value;
            continue;
        };
        let AtomData::Fun { name, deriv, args } = &*atom::data(id) else {
            unreachable!()
        };
        if args.len() != 1 {
            return Err(Error::NotIntegrable(format!("multi-argument symbol `{name}` is not integrable")));
        }
        let (v, a, b) = affine_in_one_var(&args[0])
            .ok_or_else(|| Error::NotIntegrable(format!("argument of `{name}` is not affine in one variable")))?;
        let iv = bounds
            .get(&v)
            .ok_or_else(|| Error::NotIntegrable(format!("variable `{v}` has no integration bounds")))?;
        let mut value = c.clone();
        for (w, ivw) in bounds {
            if *w != v {
                value *= power_integral(ivw, var_exps.get(w).copied().unwrap_or(0));
            }
        }
        let j = var_exps.get(&v).copied().unwrap_or(0);
        let k = deriv[0];
        let image = image_of(iv, &a, &b);
        if let Some(entry) = compact_entry(reg, name, &image) {
            let slot = groups
                .entry((name.clone(), v.clone(), a.clone(), b.clone()))
                .or_insert_with(|| (Moments::new(), entry.value.clone()));
            *slot.0.entry(k).or_default().entry(j).or_insert_with(Rational::zero) += value;
            continue;
        }
        if reg.entries(name).is_empty() {
            return Err(Error::NotIntegrable(format!("no registered integral for `{name}`")));
        }
        let exact = reg.entries(name).iter().find(|e| e.interval == image);
        match exact {
            Some(e) if j == 0 && k == 0 => total += value * &e.value / a.abs(),
            _ => {
                return Err(Error::NotIntegrable(format!(
                    "no registered integral of `{name}` matches the interval {image}"
                )))
            }
        }
    }
    for ((name, _, a, _), (m, value)) in groups {
        total += reduce_moments(&name, &a, m, &value)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn setup() -> (IntegralRegistry, BTreeMap<String, Interval>) {
        let reg = IntegralRegistry::parse("integral alpha [0,1] = 1\nsupport alpha compact\n").unwrap();
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), Interval::new(rat(0, 1), rat(1, 1)).unwrap());
        (reg, b)
    }

    fn integ(src: &str) -> Result<Rational> {
        let (reg, b) = setup();
        definite_integral(&ScalarExpr::parse(src).unwrap(), &b, &reg)
    }

    #[test]
    fn polynomials_and_registered_symbols() {
        assert_eq!(integ("3*x^2 + 1").unwrap(), rat(2, 1));
        assert_eq!(integ("alpha(x)").unwrap(), rat(1, 1));
        assert_eq!(integ("5*alpha'(x)").unwrap(), rat(0, 1));
        assert_eq!(integ("x*alpha'(x)").unwrap(), rat(-1, 1));
        assert!(integ("x^2*alpha(x)").is_err());
        assert!(integ("beta(x)").is_err());
        // A total derivative integrates to zero even though its pieces need
        // unregistered moments.
        assert_eq!(integ("x^2*alpha'(x) + 2*x*alpha(x)").unwrap(), rat(0, 1));
        assert_eq!(integ("x^2*alpha''(x)").unwrap(), rat(2, 1));
    }

    #[test]
    fn change_of_variables() {
        let (reg, _) = setup();
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), Interval::new(rat(-1, 2), rat(0, 1)).unwrap());
        let e = ScalarExpr::parse("2*alpha(2*x + 1)").unwrap();
        assert_eq!(definite_integral(&e, &b, &reg).unwrap(), rat(1, 1));
    }
}
