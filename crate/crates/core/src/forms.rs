//! Differential forms on a graded domain, as functions on an extended domain
//! with one extra generator `dμ` per coordinate `μ`.
//!
//! In the Deligne convention the grading group gains a leading cohomological
//! bit: `deg dμ = (1, deg μ)`, so the Koszul rule of the extended domain is
//! exactly the sign `(-1)^{kl + <ω1, ω2>}`. In the Bernstein-Leites
//! convention (Z2 only) `dμ` has parity `1 + parity(μ)` and signs follow the
//! total parity; `dξ` of an odd `ξ` becomes a degree-zero generator.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gfun::{DomainSpec, GradedFunction};
use crate::grading::Degree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    Deligne,
    BernsteinLeites,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deligne" => Ok(Convention::Deligne),
            "bernstein-leites" | "bl" => Ok(Convention::BernsteinLeites),
            _ => Err(Error::Config(format!(
                "unknown convention `{s}` (expected deligne or bernstein-leites)"
            ))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Deligne => "deligne",
            Convention::BernsteinLeites => "bernstein-leites",
        })
    }
}

/// The algebra of forms over a base domain.
#[derive(Clone, Debug)]
pub struct FormAlgebra {
    base: DomainSpec,
    ext: DomainSpec,
    convention: Convention,
    /// Whether each generator of the extended domain is a differential.
    is_differential: Vec<bool>,
    /// `(coordinate name, its differential's name)` in coordinate order.
    pairs: Vec<(String, String)>,
}

/// An element of a [`FormAlgebra`].
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    convention: Convention,
    value: GradedFunction,
}

impl FormAlgebra {
    /// Forms over `base` with up to `max_form_degree` differentials per term.
    /// Names of differentials are `d` followed by the coordinate name.
    pub fn new(base: &DomainSpec, convention: Convention, max_form_degree: u32) -> Result<Self> {
        let n = base.n();
        if convention == Convention::BernsteinLeites && n != 1 {
            return Err(Error::Unsupported(
                "the Bernstein-Leites convention is implemented for Z2 domains only".into(),
            ));
        }
        let ext_n = match convention {
            Convention::Deligne => n + 1,
            Convention::BernsteinLeites => 1,
        };
        let lift = |d: &Degree| -> Result<Degree> {
            match convention {
                Convention::Deligne => {
                    let mut c = vec![0u8];
                    c.extend(d.components());
                    Degree::new(&c)
                }
                Convention::BernsteinLeites => Ok(*d),
            }
        };
        let differential = |d: &Degree| -> Result<Degree> {
            match convention {
                Convention::Deligne => {
                    let mut c = vec![1u8];
                    c.extend(d.components());
                    Degree::new(&c)
                }
                Convention::BernsteinLeites => Degree::new(&[1 - d.parity()]),
            }
        };
        let mut b = DomainSpec::builder(ext_n).truncation(base.truncation() + max_form_degree);
        if convention == Convention::BernsteinLeites {
            b = b.allow_zero_degree();
        }
        if let Some(name) = base.name() {
            b = b.name(&format!("forms({name})"));
        }
        for v in base.base_vars() {
            b = b.base(v);
        }
        for g in base.generators() {
            b = b.generator(&g.name, lift(&g.degree)?);
        }
        let mut pairs = Vec::new();
        for c in base.coordinates() {
            let dn = format!("d{}", c.name);
            if base.base_index(&dn).is_some() || base.gen_index(&dn).is_some() {
                return Err(Error::Config(format!(
                    "the differential `{dn}` clashes with a coordinate of the domain"
                )));
            }
            b = b.generator(&dn, differential(&c.degree)?);
            pairs.push((c.name, dn));
        }
        for (v, iv) in base.bounds() {
            b = b.interval(v, iv.clone());
        }
        let ext = b.build()?;
        let is_differential = ext
            .generators()
            .iter()
            .map(|g| pairs.iter().any(|(_, d)| *d == g.name))
            .collect();
        Ok(FormAlgebra {
            base: base.clone(),
            ext,
            convention,
            is_differential,
            pairs,
        })
    }

    pub fn base(&self) -> &DomainSpec {
        &self.base
    }

    pub fn extended_domain(&self) -> &DomainSpec {
        &self.ext
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    fn wrap(&self, value: GradedFunction) -> Form {
        Form {
            convention: self.convention,
            value,
        }
    }

    /// A function on the base domain as a 0-form.
    pub fn lift(&self, f: &GradedFunction) -> Result<Form> {
        if f.domain() != &self.base {
            return Err(Error::DomainMismatch("function is not on the base domain".into()));
        }
        let map: Vec<usize> = self
            .base
            .generators()
            .iter()
            .map(|g| self.ext.gen_index(&g.name).unwrap())
            .collect();
        let q = self.ext.generators().len();
        let mut out = GradedFunction::zero(&self.ext);
        for (e, c) in f.terms() {
            let mut e2 = vec![0i16; q];
            for (i, &v) in e.iter().enumerate() {
                e2[map[i]] = v;
            }
            out = &out + &GradedFunction::monomial(&self.ext, e2, c.clone());
        }
        Ok(self.wrap(out))
    }

    /// The differential `dμ` of a coordinate.
    pub fn differential(&self, coord: &str) -> Result<Form> {
        let (_, dn) = self
            .pairs
            .iter()
            .find(|(c, _)| c == coord)
            .ok_or_else(|| Error::UnknownVariable(coord.to_string()))?;
        Ok(self.wrap(GradedFunction::coordinate(&self.ext, dn)?))
    }

    /// Parse an expression in the coordinates and their differentials.
    pub fn parse(&self, src: &str) -> Result<Form> {
        Ok(self.wrap(GradedFunction::parse(&self.ext, src)?))
    }

    fn check(&self, w: &Form) -> Result<()> {
        if w.convention != self.convention || w.value.domain() != &self.ext {
            return Err(Error::DomainMismatch("form belongs to another form algebra".into()));
        }
        Ok(())
    }

    pub fn product(&self, a: &Form, b: &Form) -> Result<Form> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(a.value.checked_mul(&b.value)?))
    }

    /// `d = Σ dμ ∂_μ` over all coordinates. The partial derivatives act as
    /// left derivations on the extended algebra, treating differentials as
    /// constants.
    pub fn d(&self, w: &Form) -> Result<Form> {
        self.check(w)?;
        let mut out = GradedFunction::zero(&self.ext);
        for (c, dn) in &self.pairs {
            let p = w.value.partial(c)?;
            if p.is_zero() {
                continue;
            }
            let dmu = GradedFunction::coordinate(&self.ext, dn)?;
            out = &out + &(&dmu * &p);
        }
        Ok(self.wrap(out))
    }

    /// Number of differentials in each term; `None` for mixed or zero forms.
    pub fn form_degree(&self, w: &Form) -> Option<u32> {
        let mut out = None;
        for (e, _) in w.value.terms() {
            let k = self.weight_of(e);
            match out {
                None => out = Some(k),
                Some(j) if j != k => return None,
                _ => {}
            }
        }
        out
    }

    fn weight_of(&self, e: &[i16]) -> u32 {
        e.iter()
            .zip(&self.is_differential)
            .filter(|(_, &d)| d)
            .map(|(&v, _)| v as u32)
            .sum()
    }

    /// The part of `w` made of terms with exactly `k` differentials.
    pub fn component(&self, w: &Form, k: u32) -> Form {
        let terms: BTreeMap<_, _> = w
            .value
            .terms()
            .filter(|(e, _)| self.weight_of(e) == k)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        self.wrap(GradedFunction::from_terms(&self.ext, terms))
    }

    /// Differential monomials of the terms of `w`, each as the list of
    /// `(differential name, power)` pairs.
    pub fn differential_monomials(&self, w: &Form) -> Vec<Vec<(String, u32)>> {
        let gens = self.ext.generators();
        let mut out: Vec<Vec<(String, u32)>> = w
            .value
            .terms()
            .map(|(e, _)| {
                e.iter()
                    .enumerate()
                    .filter(|(i, &v)| self.is_differential[*i] && v > 0)
                    .map(|(i, &v)| (gens[i].name.clone(), v as u32))
                    .collect()
            })
            .collect();
        out.dedup();
        out
    }
}

impl Form {
    pub fn value(&self) -> &GradedFunction {
        &self.value
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}
