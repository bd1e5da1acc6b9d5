//! Canonical printing. Each polynomial coefficient is expanded into its
//! monomials, and every printed term lists its factors in declaration order
//! (opaque symbols and undeclared variables first). Terms are sorted by
//! generator weight, then by exponents in declaration order, descending.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use super::{weight, DomainData, GradedFunction, Symbol};
use crate::scalars::atom::{self, AtomData};
use crate::scalars::poly::{canonical_cmp, Mono};
use crate::scalars::{fmt_atom, fmt_power, fmt_term, join_terms};

struct DisplayTerm {
    weight: i32,
    /// Exponents in declaration order.
    decl_exps: Vec<i32>,
    /// Factors outside the declared symbols.
    front: Mono,
    coef: BigRational,
    /// Parenthesized non-polynomial coefficient, if any.
    fraction: Option<String>,
}

fn cmp_terms(a: &DisplayTerm, b: &DisplayTerm) -> Ordering {
    a.weight
        .cmp(&b.weight)
        .then_with(|| b.decl_exps.cmp(&a.decl_exps))
        .then_with(|| canonical_cmp(&b.front, &a.front))
}

pub(crate) fn render_terms<'a>(
    d: &DomainData,
    terms: impl Iterator<Item = (&'a [i16], &'a crate::scalars::ScalarExpr)>,
    gen_name: &dyn Fn(usize, i16) -> String,
) -> String {
    let mut out: Vec<DisplayTerm> = Vec::new();
    for (e, c) in terms {
        let gen_exps = |decl: &mut Vec<i32>| {
            for (slot, s) in d.decl.iter().enumerate() {
                if let Symbol::Gen(i) = *s {
                    decl[slot] = e[i] as i32;
                }
            }
        };
        if c.is_polynomial() {
            for (m, k) in &c.numerator().terms {
                let mut decl = vec![0i32; d.decl.len()];
                gen_exps(&mut decl);
                let mut front: Mono = Vec::new();
                for &(id, p) in m {
                    let slot = match &*atom::data(id) {
                        AtomData::Var(name) => d.base.iter().position(|b| b == name).and_then(|bi| {
                            d.decl.iter().position(|s| *s == Symbol::Base(bi))
                        }),
                        AtomData::Fun { .. } => None,
                    };
                    match slot {
                        Some(s) => decl[s] = p as i32,
                        None => front.push((id, p)),
                    }
                }
                out.push(DisplayTerm {
                    weight: weight(e),
                    decl_exps: decl,
                    front,
                    coef: k.clone(),
                    fraction: None,
                });
            }
        } else {
            let mut decl = vec![0i32; d.decl.len()];
            gen_exps(&mut decl);
            out.push(DisplayTerm {
                weight: weight(e),
                decl_exps: decl,
                front: Vec::new(),
                coef: BigRational::one(),
                fraction: Some(format!("({c})")),
            });
        }
    }
    out.sort_by(cmp_terms);
    let strs: Vec<String> = out
        .iter()
        .map(|t| {
            let mut factors: Vec<String> = Vec::new();
            if let Some(fr) = &t.fraction {
                factors.push(fr.clone());
            }
            let mut front: Vec<_> = t.front.iter().map(|&(id, p)| (atom::key(id), fmt_power(&fmt_atom(id), p))).collect();
            front.sort();
            factors.extend(front.into_iter().map(|p| p.1));
            for (slot, s) in d.decl.iter().enumerate() {
                let p = t.decl_exps[slot];
                if p == 0 {
                    continue;
                }
                match *s {
                    Symbol::Base(i) => factors.push(fmt_power(&d.base[i], p as u32)),
                    Symbol::Gen(i) => factors.push(gen_name(i, p as i16)),
                }
            }
            fmt_term(&t.coef, &factors)
        })
        .collect();
    join_terms(&strs)
}

impl fmt::Display for GradedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dom.data();
        let s = render_terms(
            d,
            self.terms.iter().map(|(e, c)| (e.as_slice(), c)),
            &|i, p| fmt_power(&d.gens[i].name, p as u32),
        );
        write!(f, "{s}")
    }
}
