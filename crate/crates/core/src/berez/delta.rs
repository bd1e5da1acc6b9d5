use crate::error::{Error, Result};
use crate::gfun::{DomainSpec, GradedFunction};
use crate::grading::Degree;

use super::first_odd;

/// The Koszul-type complex of a free module `M` with basis of degrees
/// `ẽ_1..ẽ_r`: the graded-symmetric algebra on `e_i[γ]` (degree `ẽ_i + γ`)
/// and the dual coordinates `ε^i` (degree `ẽ_i`), with differential given by
/// multiplication with `δ = Σ e_i ε^i`.
#[derive(Clone, Debug)]
pub struct DeltaComplex {
    module: Vec<Degree>,
    gamma: Degree,
    dom: DomainSpec,
}

impl DeltaComplex {
    /// `weight` is the symmetric weight kept by the truncated algebra.
    pub fn new(module: &[Degree], gamma: Option<Degree>, weight: u32) -> Result<Self> {
        let n = match module.first() {
            Some(d) => d.n(),
            None => return Err(Error::Config("the module needs at least one basis degree".into())),
        };
        if module.iter().any(|d| d.n() != n) {
            return Err(Error::Degree("module degrees live in different groups".into()));
        }
        let gamma = match gamma {
            Some(g) if g.n() != n => return Err(Error::Degree(format!("shift degree {g} is not in Z2^{n}"))),
            Some(g) if g.is_even() => return Err(Error::Degree(format!("shift degree {g} must be odd"))),
            Some(g) => g,
            None => first_odd(n)?,
        };
        let mut b = DomainSpec::builder(n).allow_zero_degree().truncation(weight);
        for (i, d) in module.iter().enumerate() {
            b = b.generator(&format!("e{}", i + 1), *d + gamma);
        }
        for (i, d) in module.iter().enumerate() {
            b = b.generator(&format!("eps{}", i + 1), *d);
        }
        Ok(DeltaComplex {
            module: module.to_vec(),
            gamma,
            dom: b.build()?,
        })
    }

    pub fn module(&self) -> &[Degree] {
        &self.module
    }

    pub fn gamma(&self) -> Degree {
        self.gamma
    }

    /// Generators `e1..er` and `eps1..epsr`.
    pub fn domain(&self) -> &DomainSpec {
        &self.dom
    }

    fn gen(&self, name: &str) -> GradedFunction {
        GradedFunction::coordinate(&self.dom, name).expect("generator exists")
    }

    pub fn delta(&self) -> GradedFunction {
        let mut out = GradedFunction::zero(&self.dom);
        for i in 1..=self.module.len() {
            out = &out + &(&self.gen(&format!("e{i}")) * &self.gen(&format!("eps{i}")));
        }
        out
    }

    /// The product of all odd generators, `e` before `eps`, in index order.
    pub fn omega(&self) -> GradedFunction {
        let mut out = GradedFunction::one(&self.dom);
        for pre in ["e", "eps"] {
            for i in 1..=self.module.len() {
                let g = self.gen(&format!("{pre}{i}"));
                if g.degree().ok().flatten().is_some_and(|d| !d.is_even()) {
                    out = &out * &g;
                }
            }
        }
        out
    }

    /// `δ · k`. Fails when the product could exceed the kept weight.
    pub fn apply(&self, k: &GradedFunction) -> Result<GradedFunction> {
        if k.domain() != &self.dom {
            return Err(Error::DomainMismatch("element is not in this complex".into()));
        }
        let w = k.terms().map(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>()).max().unwrap_or(0);
        if w + 2 > self.dom.truncation() {
            return Err(Error::Truncation(format!(
                "δ of an element of weight {w} needs weight {}, only {} is kept",
                w + 2,
                self.dom.truncation()
            )));
        }
        Ok(&self.delta() * k)
    }

    /// Number of odd generator factors, when it is the same in every term.
    pub fn cohomological_degree(&self, k: &GradedFunction) -> Option<u32> {
        let odd: Vec<bool> = (0..self.dom.generators().len()).map(|i| self.dom.is_odd(i)).collect();
        let mut found = None;
        for (e, _) in k.terms() {
            let c: u32 = e.iter().zip(&odd).filter(|(_, &o)| o).map(|(&x, _)| x as u32).sum();
            match found {
                None => found = Some(c),
                Some(f) if f != c => return None,
                _ => {}
            }
        }
        found
    }
}
