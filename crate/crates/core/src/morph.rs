//! Coordinate morphisms between graded domains, given by the pullbacks of the
//! target coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::gfun::{taylor_compose, DomainSpec, GradedFunction};
use crate::gmat::GradedMatrix;
use crate::grading::Degree;
use crate::scalars::{Interval, Rational, ScalarExpr};

/// Outcome of the check that the body map sends the source box into the
/// target box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseImage {
    /// The target declares no boxes.
    NotRequired,
    /// All constrained body components are affine and map the source box inside.
    Verified,
    /// Some constrained component is not affine or its source variables are unbounded.
    Unchecked,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordMorphism {
    source: DomainSpec,
    target: DomainSpec,
    values: Vec<GradedFunction>,
    base_image: BaseImage,
}

impl CoordMorphism {
    /// Build from the pullbacks of the target coordinates, listed in the order
    /// of `target.coordinates()`.
    pub fn new(source: &DomainSpec, target: &DomainSpec, values: Vec<GradedFunction>) -> Result<Self> {
        let coords = target.coordinates();
        if values.len() != coords.len() {
            return Err(Error::Config(format!(
                "expected {} coordinate values, got {}",
                coords.len(),
                values.len()
            )));
        }
        if source.n() != target.n() {
            return Err(Error::DomainMismatch(format!(
                "source is Z2^{} but target is Z2^{}",
                source.n(),
                target.n()
            )));
        }
        for (c, v) in coords.iter().zip(&values) {
            if v.domain() != source {
                return Err(Error::DomainMismatch(format!("value for `{}` is not on the source domain", c.name)));
            }
            if !v.is_homogeneous_of(&c.degree) {
                return Err(Error::Degree(format!(
                    "degree condition violated: `{}` has degree {} but its value `{v}` does not",
                    c.name, c.degree
                )));
            }
        }
        let base_image = check_base_image(source, target, &values)?;
        Ok(CoordMorphism {
            source: source.clone(),
            target: target.clone(),
            values,
            base_image,
        })
    }

    /// Build from `name = value` pairs; every target coordinate must be given.
    pub fn from_named(source: &DomainSpec, target: &DomainSpec, named: &BTreeMap<String, GradedFunction>) -> Result<Self> {
        for k in named.keys() {
            if target.base_index(k).is_none() && target.gen_index(k).is_none() {
                return Err(Error::UnknownVariable(format!("`{k}` is not a coordinate of the target")));
            }
        }
        let values = target
            .coordinates()
            .iter()
            .map(|c| {
                named
                    .get(&c.name)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("no value given for target coordinate `{}`", c.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        CoordMorphism::new(source, target, values)
    }

    pub fn identity(dom: &DomainSpec) -> Self {
        let values = dom
            .coordinates()
            .iter()
            .map(|c| GradedFunction::coordinate(dom, &c.name).unwrap())
            .collect();
        CoordMorphism::new(dom, dom, values).expect("identity is degree-legal")
    }

    pub fn source(&self) -> &DomainSpec {
        &self.source
    }

    pub fn target(&self) -> &DomainSpec {
        &self.target
    }

    pub fn values(&self) -> &[GradedFunction] {
        &self.values
    }

    /// The pullback of the named target coordinate.
    pub fn value(&self, name: &str) -> Option<&GradedFunction> {
        let i = match self.target.base_index(name) {
            Some(i) => i,
            None => self.target.base_vars().len() + self.target.gen_index(name)?,
        };
        self.values.get(i)
    }

    pub fn base_image(&self) -> BaseImage {
        self.base_image
    }

    fn base_values(&self) -> &[GradedFunction] {
        &self.values[..self.target.base_vars().len()]
    }

    fn gen_values(&self) -> &[GradedFunction] {
        &self.values[self.target.base_vars().len()..]
    }

    /// `phi^* f`: expand every coefficient around the bodies of the base
    /// values and replace generator monomials by products of generator values.
    pub fn pullback(&self, f: &GradedFunction) -> Result<GradedFunction> {
        if f.domain() != &self.target {
            return Err(Error::DomainMismatch("function is not on the target domain".into()));
        }
        let src = &self.source;
        let vars: Vec<String> = self.target.base_vars().to_vec();
        let gens = self.gen_values();
        // Powers of each generator value, filled on demand.
        let mut powers: Vec<Vec<GradedFunction>> = gens.iter().map(|_| vec![GradedFunction::one(src)]).collect();
        let mut out = GradedFunction::zero(src);
        for (e, c) in f.terms() {
            let mut sigma = GradedFunction::one(src);
            for (k, &ek) in e.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                let ek = ek as usize;
                while powers[k].len() <= ek {
                    let next = powers[k].last().unwrap() * &gens[k];
                    powers[k].push(next);
                }
                sigma = &sigma * &powers[k][ek];
                if sigma.is_zero() {
                    break;
                }
            }
            if sigma.is_zero() {
                continue;
            }
            let coef = taylor_compose(src, c, &vars, self.base_values())?;
            out = &out + &(&coef * &sigma);
        }
        Ok(out)
    }

    /// `self ∘ inner`: first `inner`, then `self`. Pullbacks compose the other
    /// way round.
    pub fn compose(&self, inner: &CoordMorphism) -> Result<CoordMorphism> {
        if inner.target != self.source {
            return Err(Error::DomainMismatch(
                "the inner morphism's target is not the outer morphism's source".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .map(|v| inner.pullback(v))
            .collect::<Result<Vec<_>>>()?;
        CoordMorphism::new(&inner.source, &self.target, values)
    }

    /// Rows indexed by target coordinates, columns by source coordinates.
    /// Entry `(B, A)` is `(-1)^<a, a+b> d_{mu^A}(phi^* nu^B)` with `a`, `b`
    /// the degrees of `mu^A`, `nu^B`; with this sign the Jacobian of a
    /// composite is the product of Jacobians.
    pub fn modified_jacobian(&self) -> Result<GradedMatrix> {
        let scoords = self.source.coordinates();
        let tcoords = self.target.coordinates();
        let mut entries = Vec::with_capacity(scoords.len() * tcoords.len());
        for (b, v) in tcoords.iter().zip(&self.values) {
            for a in &scoords {
                let d = v.partial(&a.name)?;
                let minus = a.degree.dot(&(a.degree + b.degree)) == 1;
                entries.push(if minus { -&d } else { d });
            }
        }
        let zero = Degree::zero(self.source.n())?;
        GradedMatrix::new(
            &self.source,
            self.target.dimension().counts(),
            self.source.dimension().counts(),
            zero,
            entries,
        )
    }

    /// The tangent map at a point of the source body: the body of the
    /// Jacobian evaluated there. Opaque functions stay symbolic.
    pub fn tangent_matrix_at(&self, point: &BTreeMap<String, Rational>) -> Result<Vec<Vec<ScalarExpr>>> {
        for v in self.source.base_vars() {
            let x = point
                .get(v)
                .ok_or_else(|| Error::Config(format!("no value for base variable `{v}`")))?;
            if let Some(iv) = self.source.interval(v) {
                if !iv.contains_point(x) {
                    return Err(Error::Config(format!("point {v} = {x} lies outside the box {iv}")));
                }
            }
        }
        for k in point.keys() {
            if self.source.base_index(k).is_none() {
                return Err(Error::UnknownVariable(format!("`{k}` is not a base variable of the source")));
            }
        }
        let jac = self.modified_jacobian()?;
        jac.epsilon()
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.evaluate(point)).collect())
            .collect()
    }
}

/// Image of a box under `c0 + sum c_i x_i`, if the body is affine with
/// rational coefficients in bounded variables.
fn affine_range(body: &ScalarExpr, bounds: &BTreeMap<String, Interval>) -> Option<(Rational, Rational)> {
    let mut rest = body.clone();
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for v in body.free_vars() {
        let c = body.differentiate(&v).as_rational()?;
        let iv = bounds.get(&v)?;
        let (a, b) = (&c * &iv.lo, &c * &iv.hi);
        if c.is_negative() {
            lo += b;
            hi += a;
        } else {
            lo += a;
            hi += b;
        }
        rest = &rest - &(&ScalarExpr::from_rational(c) * &ScalarExpr::var(&v));
    }
    let c0 = rest.as_rational()?;
    Some((lo + &c0, hi + c0))
}

fn check_base_image(source: &DomainSpec, target: &DomainSpec, values: &[GradedFunction]) -> Result<BaseImage> {
    if target.bounds().is_empty() {
        return Ok(BaseImage::NotRequired);
    }
    let mut verdict = BaseImage::Verified;
    for (i, y) in target.base_vars().iter().enumerate() {
        let Some(box_y) = target.interval(y) else { continue };
        match affine_range(&values[i].epsilon(), source.bounds()) {
            Some((lo, hi)) => {
                if lo < box_y.lo || hi > box_y.hi {
                    return Err(Error::Config(format!(
                        "base image condition violated: `{y}` ranges over [{lo},{hi}], outside {box_y}"
                    )));
                }
            }
            None => verdict = BaseImage::Unchecked,
        }
    }
    Ok(verdict)
}

impl fmt::Display for CoordMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, v) in self.target.coordinates().iter().zip(&self.values) {
            writeln!(f, "{} = {v}", c.name)?;
        }
        Ok(())
    }
}
