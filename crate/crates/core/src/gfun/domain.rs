use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grading::{standard_order, Degree, GradedDimension};
use crate::scalars::Interval;

/// Maximum number of formal generators in one domain.
pub const MAX_GENERATORS: usize = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Generator {
    pub name: String,
    pub degree: Degree,
}

/// A declared symbol, in declaration order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Symbol {
    Base(usize),
    Gen(usize),
}

/// A coordinate of the domain: base variables first, then generators in
/// canonical order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coordinate {
    pub name: String,
    pub degree: Degree,
}

#[derive(PartialEq, Eq, Debug)]
pub(crate) struct DomainData {
    pub(crate) name: Option<String>,
    pub(crate) n: usize,
    pub(crate) base: Vec<String>,
    pub(crate) gens: Vec<Generator>,
    pub(crate) truncation: u32,
    pub(crate) boxes: BTreeMap<String, Interval>,
    pub(crate) decl: Vec<Symbol>,
    /// Bit i set when generator i is odd (nilpotent).
    pub(crate) odd_mask: u64,
    /// `anti[j]` has bit i set when generators i and j anticommute.
    pub(crate) anti: Vec<u64>,
}

/// Coordinate data of a chart: rank n, base variables, formal generators
/// with nonzero degrees and the truncation order T.
#[derive(Clone, Debug)]
pub struct DomainSpec(pub(crate) Arc<DomainData>);

impl PartialEq for DomainSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for DomainSpec {}

#[derive(Clone, Debug)]
enum Decl {
    Base(String),
    Gen(String, Degree),
}

#[derive(Clone, Debug)]
pub struct DomainBuilder {
    n: usize,
    name: Option<String>,
    decls: Vec<Decl>,
    truncation: Option<u32>,
    boxes: BTreeMap<String, Interval>,
    allow_zero_degree: bool,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && s != "D"
}

impl DomainBuilder {
    pub fn name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn base(mut self, name: &str) -> Self {
        self.decls.push(Decl::Base(name.to_string()));
        self
    }

    pub fn generator(mut self, name: &str, degree: Degree) -> Self {
        self.decls.push(Decl::Gen(name.to_string(), degree));
        self
    }

    pub fn truncation(mut self, t: u32) -> Self {
        self.truncation = Some(t);
        self
    }

    pub fn interval(mut self, var: &str, iv: Interval) -> Self {
        self.boxes.insert(var.to_string(), iv);
        self
    }

    /// Allow degree-zero formal generators. Used for auxiliary algebras such
    /// as forms in the Bernstein-Leites convention.
    pub(crate) fn allow_zero_degree(mut self) -> Self {
        self.allow_zero_degree = true;
        self
    }

    pub fn build(self) -> Result<DomainSpec> {
        let n = self.n;
        Degree::zero(n)?;
        let mut seen = std::collections::BTreeSet::new();
        let mut base = Vec::new();
        let mut gens_decl: Vec<(Generator, usize)> = Vec::new();
        for (i, d) in self.decls.iter().enumerate() {
            let name = match d {
                Decl::Base(s) | Decl::Gen(s, _) => s,
            };
            if !valid_ident(name) {
                return Err(Error::Config(format!("`{name}` is not a valid identifier")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::Config(format!("symbol `{name}` declared twice")));
            }
            match d {
                Decl::Base(s) => base.push(s.clone()),
                Decl::Gen(s, g) => {
                    if g.n() != n {
                        return Err(Error::Config(format!(
                            "generator `{s}` has degree {g} but the grading is Z2^{n}"
                        )));
                    }
                    if g.is_zero() && !self.allow_zero_degree {
                        return Err(Error::Degree(format!("generator `{s}` has degree zero")));
                    }
                    gens_decl.push((
                        Generator {
                            name: s.clone(),
                            degree: *g,
                        },
                        i,
                    ));
                }
            }
        }
        if gens_decl.len() > MAX_GENERATORS {
            return Err(Error::Config(format!("at most {MAX_GENERATORS} generators are supported")));
        }
        // Canonical order: standard-order position of the degree, then declaration.
        gens_decl.sort_by_key(|(g, i)| (g.degree.standard_position(), *i));
        let gens: Vec<Generator> = gens_decl.iter().map(|(g, _)| g.clone()).collect();
        let q_odd = gens.iter().filter(|g| !g.degree.is_even()).count() as u32;
        let has_even = gens.iter().any(|g| g.degree.is_even());
        let truncation = match self.truncation {
            Some(t) => t,
            None if !has_even => q_odd,
            None => {
                return Err(Error::Config(
                    "a truncation order is required when even generators are present".into(),
                ))
            }
        };
        if truncation < q_odd {
            return Err(Error::Config(format!(
                "truncation {truncation} is below the number of odd generators {q_odd}"
            )));
        }
        for v in self.boxes.keys() {
            if !base.contains(v) {
                return Err(Error::Config(format!("box given for undeclared base variable `{v}`")));
            }
        }
        let mut decl = Vec::new();
        let mut bi = 0;
        for d in &self.decls {
            match d {
                Decl::Base(_) => {
                    decl.push(Symbol::Base(bi));
                    bi += 1;
                }
                Decl::Gen(s, _) => {
                    let gi = gens.iter().position(|g| &g.name == s).unwrap();
                    decl.push(Symbol::Gen(gi));
                }
            }
        }
        let mut odd_mask = 0u64;
        let mut anti = vec![0u64; gens.len()];
        for (i, gi) in gens.iter().enumerate() {
            if !gi.degree.is_even() {
                odd_mask |= 1 << i;
            }
            for (j, gj) in gens.iter().enumerate() {
                if gi.degree.dot(&gj.degree) == 1 {
                    anti[j] |= 1 << i;
                }
            }
        }
        Ok(DomainSpec(Arc::new(DomainData {
            name: self.name,
            n,
            base,
            gens,
            truncation,
            boxes: self.boxes,
            decl,
            odd_mask,
            anti,
        })))
    }
}

impl DomainSpec {
    pub fn builder(n: usize) -> DomainBuilder {
        DomainBuilder {
            n,
            name: None,
            decls: Vec::new(),
            truncation: None,
            boxes: BTreeMap::new(),
            allow_zero_degree: false,
        }
    }

    /// Builder preloaded with this domain's declarations.
    pub fn to_builder(&self) -> DomainBuilder {
        let d = &self.0;
        let decls = d
            .decl
            .iter()
            .map(|s| match *s {
                Symbol::Base(i) => Decl::Base(d.base[i].clone()),
                Symbol::Gen(i) => Decl::Gen(d.gens[i].name.clone(), d.gens[i].degree),
            })
            .collect();
        DomainBuilder {
            n: d.n,
            name: d.name.clone(),
            decls,
            truncation: Some(d.truncation),
            boxes: d.boxes.clone(),
            allow_zero_degree: d.gens.iter().any(|g| g.degree.is_zero()),
        }
    }

    /// The same domain with a different truncation order.
    pub fn with_truncation(&self, t: u32) -> Result<DomainSpec> {
        self.to_builder().truncation(t).build()
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn name(&self) -> Option<&str> {
        self.0.name.as_deref()
    }

    pub fn base_vars(&self) -> &[String] {
        &self.0.base
    }

    /// Generators in canonical order.
    pub fn generators(&self) -> &[Generator] {
        &self.0.gens
    }

    pub fn truncation(&self) -> u32 {
        self.0.truncation
    }

    pub fn interval(&self, var: &str) -> Option<&Interval> {
        self.0.boxes.get(var)
    }

    pub fn bounds(&self) -> &BTreeMap<String, Interval> {
        &self.0.boxes
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.0.base.iter().position(|b| b == name)
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.0.gens.iter().position(|g| g.name == name)
    }

    pub fn is_odd(&self, gen: usize) -> bool {
        self.0.odd_mask >> gen & 1 == 1
    }

    pub fn odd_count(&self) -> usize {
        self.0.odd_mask.count_ones() as usize
    }

    pub fn coordinates(&self) -> Vec<Coordinate> {
        let zero = Degree::zero(self.n()).unwrap();
        self.0
            .base
            .iter()
            .map(|b| Coordinate {
                name: b.clone(),
                degree: zero,
            })
            .chain(self.0.gens.iter().map(|g| Coordinate {
                name: g.name.clone(),
                degree: g.degree,
            }))
            .collect()
    }

    /// Number of coordinates of each degree, in standard order.
    pub fn dimension(&self) -> GradedDimension {
        let order = standard_order(self.n()).unwrap();
        let mut counts = vec![0usize; order.len()];
        counts[0] = self.0.base.len();
        for g in &self.0.gens {
            counts[g.degree.standard_position()] += 1;
        }
        GradedDimension {
            p: counts[0],
            q: counts[1..].to_vec(),
        }
    }

    pub(crate) fn data(&self) -> &DomainData {
        &self.0
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.0;
        if let Some(name) = &d.name {
            writeln!(f, "name = {name}")?;
        }
        writeln!(f, "n = {}", d.n)?;
        for s in &d.decl {
            match *s {
                Symbol::Base(i) => writeln!(f, "base = {}", d.base[i])?,
                Symbol::Gen(i) => writeln!(f, "gen {} : {}", d.gens[i].name, d.gens[i].degree)?,
            }
        }
        writeln!(f, "truncate = {}", d.truncation)?;
        for (v, iv) in &d.boxes {
            writeln!(f, "box {v} = {iv}")?;
        }
        Ok(())
    }
}
