//! Berezinian volumes and sections, gluing, and integration: the Berezin
//! integral on Z2 domains, the naive and residue integrals on `1|(1,1,1)`
//! Z2^2 domains, and the δ-complex behind the Berezinian module.

mod delta;
mod laurent;

use std::collections::BTreeMap;
use std::fmt;

pub use delta::DeltaComplex;
pub use laurent::LaurentFunction;

use crate::error::{Error, Result};
use crate::gfun::{DomainSpec, GradedFunction};
use crate::grading::{standard_order, Degree};
use crate::morph::CoordMorphism;
use crate::scalars::{definite_integral, IntegralRegistry, Rational};

/// The factor relating Berezinian volumes across a coordinate change:
/// `[Ω(ν)] = [Ω(μ)] * Ber(Jac Φ)`.
pub fn ber_volume_transform(phi: &CoordMorphism) -> Result<GradedFunction> {
    phi.modified_jacobian()?.z2n_ber()
}

/// The basis volume `[Ω]` of a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct BerVolume {
    chart: DomainSpec,
    gamma: Degree,
}

impl BerVolume {
    /// `gamma` defaults to the first odd degree in standard order.
    pub fn new(chart: &DomainSpec, gamma: Option<Degree>) -> Result<Self> {
        let gamma = match gamma {
            Some(g) if g.is_even() => return Err(Error::Degree(format!("shift degree {g} must be odd"))),
            Some(g) => g,
            None => first_odd(chart.n())?,
        };
        Ok(BerVolume {
            chart: chart.clone(),
            gamma,
        })
    }

    pub fn chart(&self) -> &DomainSpec {
        &self.chart
    }

    pub fn gamma(&self) -> Degree {
        self.gamma
    }

    /// The volume of the target chart of `phi` expressed through this one.
    pub fn transform(&self, phi: &CoordMorphism) -> Result<(BerVolume, GradedFunction)> {
        if phi.source() != &self.chart {
            return Err(Error::DomainMismatch("volume is not on the source chart".into()));
        }
        let v = BerVolume {
            chart: phi.target().clone(),
            gamma: self.gamma,
        };
        Ok((v, ber_volume_transform(phi)?))
    }
}

impl fmt::Display for BerVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.chart.coordinates().into_iter().map(|c| c.name).collect();
        write!(f, "[Omega({})]", names.join(", "))
    }
}

pub(crate) fn first_odd(n: usize) -> Result<Degree> {
    Ok(standard_order(n)?[1 << (n - 1)])
}

/// The coefficient of a section in one chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Function(GradedFunction),
    Laurent(LaurentFunction),
}

impl Coefficient {
    pub fn domain(&self) -> &DomainSpec {
        match self {
            Coefficient::Function(f) => f.domain(),
            Coefficient::Laurent(l) => l.domain(),
        }
    }

    /// Equal as functions, or as Laurent series up to the common precision.
    pub fn agrees_with(&self, o: &Coefficient) -> bool {
        match (self, o) {
            (Coefficient::Function(a), Coefficient::Function(b)) => a == b,
            (Coefficient::Laurent(a), Coefficient::Laurent(b)) => a.agrees_with(b),
            _ => false,
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Function(g) => g.fmt(f),
            Coefficient::Laurent(l) => l.fmt(f),
        }
    }
}

/// Coefficient in the source chart of `phi` of the section whose target
/// coefficient is `g`: `Ber(Jac Φ) · φ*(g)`, with the localized pullback for
/// Laurent coefficients.
pub fn transform_coefficient(phi: &CoordMorphism, g: &Coefficient) -> Result<Coefficient> {
    let ber = ber_volume_transform(phi)?;
    Ok(match g {
        Coefficient::Function(g) => Coefficient::Function(&ber * &phi.pullback(g)?),
        Coefficient::Laurent(l) => {
            let pulled = l.pullback(phi)?;
            let b = LaurentFunction::from_graded(&ber, pulled.pole())?;
            Coefficient::Laurent(b.checked_mul(&pulled)?)
        }
    })
}

#[derive(Clone, Debug)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub morphism: CoordMorphism,
}

/// A section given by its coefficients in several charts, related by
/// transitions `from -> to` whose morphisms map the `from` chart to the `to`
/// chart.
#[derive(Clone, Debug, Default)]
pub struct BerSection {
    charts: Vec<(String, DomainSpec)>,
    coefficients: BTreeMap<String, Coefficient>,
    transitions: Vec<Transition>,
}

/// Result of checking one overlap.
#[derive(Clone, Debug)]
pub struct OverlapReport {
    pub from: String,
    pub to: String,
    pub ok: bool,
    /// `Ber · φ*(g)` computed from the `to` chart.
    pub expected: String,
    pub actual: String,
}

/// Result of checking a triangle `a -> b -> c` against `a -> c`.
#[derive(Clone, Debug)]
pub struct CoherenceReport {
    pub charts: [String; 3],
    pub morphisms_agree: bool,
    pub volumes_agree: bool,
}

#[derive(Clone, Debug, Default)]
pub struct GlueReport {
    pub overlaps: Vec<OverlapReport>,
    pub coherence: Vec<CoherenceReport>,
}

impl GlueReport {
    pub fn ok(&self) -> bool {
        self.overlaps.iter().all(|o| o.ok) && self.coherence.iter().all(|c| c.morphisms_agree && c.volumes_agree)
    }
}

impl BerSection {
    pub fn new() -> Self {
        BerSection::default()
    }

    pub fn add_chart(&mut self, name: &str, dom: &DomainSpec) -> Result<()> {
        if self.chart(name).is_some() {
            return Err(Error::Config(format!("chart `{name}` declared twice")));
        }
        self.charts.push((name.to_string(), dom.clone()));
        Ok(())
    }

    pub fn chart(&self, name: &str) -> Option<&DomainSpec> {
        self.charts.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn chart_names(&self) -> Vec<&str> {
        self.charts.iter().map(|(n, _)| n.as_str()).collect()
    }

    fn require_chart(&self, name: &str) -> Result<&DomainSpec> {
        self.chart(name)
            .ok_or_else(|| Error::Config(format!("unknown chart `{name}`")))
    }

    pub fn set_coefficient(&mut self, chart: &str, c: Coefficient) -> Result<()> {
        if self.require_chart(chart)? != c.domain() {
            return Err(Error::DomainMismatch(format!("coefficient is not on chart `{chart}`")));
        }
        self.coefficients.insert(chart.to_string(), c);
        Ok(())
    }

    pub fn coefficient(&self, chart: &str) -> Option<&Coefficient> {
        self.coefficients.get(chart)
    }

    pub fn add_transition(&mut self, from: &str, to: &str, morphism: CoordMorphism) -> Result<()> {
        if self.require_chart(from)? != morphism.source() || self.require_chart(to)? != morphism.target() {
            return Err(Error::DomainMismatch(format!(
                "transition {from} -> {to} does not map chart `{from}` to chart `{to}`"
            )));
        }
        self.transitions.push(Transition {
            from: from.to_string(),
            to: to.to_string(),
            morphism,
        });
        Ok(())
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Compute missing coefficients from known ones through the gluing law.
    pub fn complete(&mut self) -> Result<()> {
        loop {
            let mut changed = false;
            for t in &self.transitions {
                if self.coefficients.contains_key(&t.from) {
                    continue;
                }
                if let Some(g) = self.coefficients.get(&t.to) {
                    let f = transform_coefficient(&t.morphism, g)?;
                    self.coefficients.insert(t.from.clone(), f);
                    changed = true;
                    break;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Check `f(μ) = Ber(Jac Φ) · φ*(g(ν))` on every transition with both
    /// coefficients known, and coherence on every triangle of transitions.
    pub fn glue_check(&self) -> Result<GlueReport> {
        let mut report = GlueReport::default();
        for t in &self.transitions {
            let (Some(f), Some(g)) = (self.coefficients.get(&t.from), self.coefficients.get(&t.to)) else {
                continue;
            };
            let expected = transform_coefficient(&t.morphism, g)?;
            report.overlaps.push(OverlapReport {
                from: t.from.clone(),
                to: t.to.clone(),
                ok: expected.agrees_with(f),
                expected: expected.to_string(),
                actual: f.to_string(),
            });
        }
        for ab in &self.transitions {
            for bc in self.transitions.iter().filter(|t| t.from == ab.to) {
                for ac in self.transitions.iter().filter(|t| t.from == ab.from && t.to == bc.to) {
                    let comp = bc.morphism.compose(&ab.morphism)?;
                    let morphisms_agree = comp.values() == ac.morphism.values();
                    let direct = ber_volume_transform(&ac.morphism)?;
                    let via = &ber_volume_transform(&ab.morphism)?
                        * &ab.morphism.pullback(&ber_volume_transform(&bc.morphism)?)?;
                    report.coherence.push(CoherenceReport {
                        charts: [ab.from.clone(), ab.to.clone(), bc.to.clone()],
                        morphisms_agree,
                        volumes_agree: direct == via,
                    });
                }
            }
        }
        Ok(report)
    }
}

fn require_box(dom: &DomainSpec) -> Result<()> {
    for v in dom.base_vars() {
        if dom.interval(v).is_none() {
            return Err(Error::Config(format!("base variable `{v}` has no integration box")));
        }
    }
    Ok(())
}

/// Berezin integral on a Z2 chart: the coefficient of the product of all
/// odd generators, integrated over the chart's box.
pub fn integrate_z2(f: &GradedFunction, reg: &IntegralRegistry) -> Result<Rational> {
    let dom = f.domain();
    if dom.n() != 1 {
        return Err(Error::Unsupported("the Berezin integral needs a Z2 chart".into()));
    }
    require_box(dom)?;
    let top = f.coefficient(&vec![1; dom.generators().len()]);
    definite_integral(&top, dom.bounds(), reg)
}

/// Exponent vector `[y, ξ, η]` on a `1|(1,1,1)` Z2^2 chart.
fn z22_check(dom: &DomainSpec) -> Result<()> {
    if dom.n() != 2 || dom.dimension().q != [1, 1, 1] {
        return Err(Error::Unsupported(format!(
            "Z2^2 integration needs one generator of each nonzero degree, got {}",
            dom.dimension()
        )));
    }
    require_box(dom)
}

/// The naive Z2^2 integral: the `y^0 ξη` coefficient integrated over the box.
pub fn integrate_z22_naive(f: &GradedFunction, reg: &IntegralRegistry) -> Result<Rational> {
    z22_check(f.domain())?;
    definite_integral(&f.coefficient(&[0, 1, 1]), f.domain().bounds(), reg)
}

/// The residue integral: the `y^-1 ξη` coefficient integrated over the box.
pub fn integrate_z22_residue(l: &LaurentFunction, reg: &IntegralRegistry) -> Result<Rational> {
    let dom = l.domain();
    z22_check(dom)?;
    if dom.gen_index(l.pole()) != Some(0) {
        return Err(Error::Unsupported("the pole variable must be the degree (1,1) generator".into()));
    }
    definite_integral(&l.coefficient(&[-1, 1, 1])?, dom.bounds(), reg)
}

/// True when the term linear in `y` with no odd generators is absent. Other
/// powers of `y` are not examined.
pub fn is_compact_support_in_y(f: &GradedFunction) -> Result<bool> {
    let dom = f.domain();
    if dom.n() != 2 || dom.dimension().q != [1, 1, 1] {
        return Err(Error::Unsupported("compact support in y needs a 1|(1,1,1) Z2^2 chart".into()));
    }
    Ok(f.coefficient(&[1, 0, 0]).is_zero())
}

#[cfg(test)]
mod tests;
