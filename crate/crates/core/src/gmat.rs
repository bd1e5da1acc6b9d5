//! Graded matrices over the algebra of a domain: block inversion,
//! quasideterminants, UDL decomposition, the Z2^n-determinant and the
//! Z2^n-Berezinian.

use std::fmt;

use crate::error::{Error, Result};
use crate::gfun::{DomainSpec, GradedFunction};
use crate::grading::{standard_order, Degree};
use crate::scalars::ScalarExpr;

/// A matrix with rows and columns grouped by degree in standard order.
/// Entry (r, c) is homogeneous of degree `row(r) + col(c) + degree`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMatrix {
    dom: DomainSpec,
    rows: Vec<usize>,
    cols: Vec<usize>,
    degree: Degree,
    entries: Vec<GradedFunction>,
}

fn labels(n: usize, shape: &[usize]) -> Vec<Degree> {
    let order = standard_order(n).unwrap();
    shape
        .iter()
        .zip(order)
        .flat_map(|(&k, d)| std::iter::repeat(d).take(k))
        .collect()
}

/// Per-degree counts of the rows `r0..r1` of a matrix with the given shape.
fn range_shape(shape: &[usize], r0: usize, r1: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(shape.len());
    let mut start = 0;
    for &k in shape {
        let end = start + k;
        let lo = start.max(r0);
        let hi = end.min(r1);
        out.push(hi.saturating_sub(lo));
        start = end;
    }
    out
}

impl GradedMatrix {
    /// Validate shapes and entry degrees.
    pub fn new(
        dom: &DomainSpec,
        rows: Vec<usize>,
        cols: Vec<usize>,
        degree: Degree,
        entries: Vec<GradedFunction>,
    ) -> Result<Self> {
        let n = dom.n();
        let blocks = 1usize << n;
        if rows.len() != blocks || cols.len() != blocks {
            return Err(Error::Shape(format!("a Z2^{n} shape needs {blocks} block sizes")));
        }
        if degree.n() != n {
            return Err(Error::Config(format!("matrix degree {degree} does not match Z2^{n}")));
        }
        let nr: usize = rows.iter().sum();
        let nc: usize = cols.iter().sum();
        if entries.len() != nr * nc {
            return Err(Error::Shape(format!(
                "expected {} entries for a {nr}x{nc} matrix, got {}",
                nr * nc,
                entries.len()
            )));
        }
        let rl = labels(n, &rows);
        let cl = labels(n, &cols);
        for r in 0..nr {
            for c in 0..nc {
                let e = &entries[r * nc + c];
                if e.domain() != dom {
                    return Err(Error::DomainMismatch(format!("entry ({}, {}) is on another domain", r + 1, c + 1)));
                }
                let want = rl[r] + cl[c] + degree;
                if !e.is_homogeneous_of(&want) {
                    return Err(Error::Degree(format!(
                        "entry ({}, {}) = `{e}` must have degree {want}",
                        r + 1,
                        c + 1
                    )));
                }
            }
        }
        Ok(GradedMatrix {
            dom: dom.clone(),
            rows,
            cols,
            degree,
            entries,
        })
    }

    pub fn from_rows(
        dom: &DomainSpec,
        rows: Vec<usize>,
        cols: Vec<usize>,
        degree: Degree,
        data: Vec<Vec<GradedFunction>>,
    ) -> Result<Self> {
        let nc: usize = cols.iter().sum();
        if data.iter().any(|r| r.len() != nc) {
            return Err(Error::Shape(format!("every row must have {nc} entries")));
        }
        GradedMatrix::new(dom, rows, cols, degree, data.into_iter().flatten().collect())
    }

    pub fn zero(dom: &DomainSpec, rows: Vec<usize>, cols: Vec<usize>, degree: Degree) -> Self {
        let count = rows.iter().sum::<usize>() * cols.iter().sum::<usize>();
        GradedMatrix {
            dom: dom.clone(),
            rows,
            cols,
            degree,
            entries: vec![GradedFunction::zero(dom); count],
        }
    }

    pub fn identity(dom: &DomainSpec, shape: Vec<usize>) -> Self {
        let zero = Degree::zero(dom.n()).unwrap();
        let mut m = GradedMatrix::zero(dom, shape.clone(), shape, zero);
        for i in 0..m.nrows() {
            m.set(i, i, GradedFunction::one(dom));
        }
        m
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.dom
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn row_shape(&self) -> &[usize] {
        &self.rows
    }

    pub fn col_shape(&self) -> &[usize] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn ncols(&self) -> usize {
        self.cols.iter().sum()
    }

    pub fn row_labels(&self) -> Vec<Degree> {
        labels(self.dom.n(), &self.rows)
    }

    pub fn col_labels(&self) -> Vec<Degree> {
        labels(self.dom.n(), &self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &GradedFunction {
        &self.entries[r * self.ncols() + c]
    }

    fn set(&mut self, r: usize, c: usize, v: GradedFunction) {
        let nc = self.ncols();
        self.entries[r * nc + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Apply `f` to every entry, keeping shape and degree. The caller is
    /// responsible for preserving entry degrees.
    pub fn map_entries(&self, dom: &DomainSpec, f: impl Fn(&GradedFunction) -> Result<GradedFunction>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        GradedMatrix::new(dom, self.rows.clone(), self.cols.clone(), self.degree, entries)
    }

    /// Drop entry terms of weight above `k`.
    pub fn truncated(&self, k: u32) -> GradedMatrix {
        self.map_entries(&self.dom, |e| Ok(e.truncated(k))).expect("truncation keeps degrees")
    }

    /// Bodies of all entries.
    pub fn epsilon(&self) -> Vec<Vec<ScalarExpr>> {
        (0..self.nrows())
            .map(|r| (0..self.ncols()).map(|c| self.get(r, c).epsilon()).collect())
            .collect()
    }

    fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> GradedMatrix {
        let mut entries = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for r in r0..r1 {
            for c in c0..c1 {
                entries.push(self.get(r, c).clone());
            }
        }
        GradedMatrix {
            dom: self.dom.clone(),
            rows: range_shape(&self.rows, r0, r1),
            cols: range_shape(&self.cols, c0, c1),
            degree: self.degree,
            entries,
        }
    }

    /// Reassemble from four blocks of compatible shapes.
    fn from_quarters(a: &GradedMatrix, b: &GradedMatrix, c: &GradedMatrix, d: &GradedMatrix) -> GradedMatrix {
        let rows: Vec<usize> = a.rows.iter().zip(&c.rows).map(|(x, y)| x + y).collect();
        let cols: Vec<usize> = a.cols.iter().zip(&b.cols).map(|(x, y)| x + y).collect();
        let (ra, ca) = (a.nrows(), a.ncols());
        let nc = ca + b.ncols();
        let nr = ra + c.nrows();
        let mut entries = Vec::with_capacity(nr * nc);
        for r in 0..nr {
            for col in 0..nc {
                let v = match (r < ra, col < ca) {
                    (true, true) => a.get(r, col),
                    (true, false) => b.get(r, col - ca),
                    (false, true) => c.get(r - ra, col),
                    (false, false) => d.get(r - ra, col - ca),
                };
                entries.push(v.clone());
            }
        }
        GradedMatrix {
            dom: a.dom.clone(),
            rows,
            cols,
            degree: a.degree,
            entries,
        }
    }

    fn same_shape(&self, o: &GradedMatrix) -> Result<()> {
        if self.dom != o.dom {
            return Err(Error::DomainMismatch("matrices on different domains".into()));
        }
        if self.rows != o.rows || self.cols != o.cols || self.degree != o.degree {
            return Err(Error::Shape("matrices differ in shape or degree".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        self.same_shape(o)?;
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect();
        Ok(GradedMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn checked_sub(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        self.same_shape(o)?;
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect();
        Ok(GradedMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> GradedMatrix {
        GradedMatrix {
            entries: self.entries.iter().map(|e| -e).collect(),
            ..self.clone()
        }
    }

    pub fn checked_mul(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        if self.dom != o.dom {
            return Err(Error::DomainMismatch("matrices on different domains".into()));
        }
        if self.cols != o.rows {
            return Err(Error::Shape("column shape of the left factor differs from the row shape of the right".into()));
        }
        let (nr, nk, nc) = (self.nrows(), self.ncols(), o.ncols());
        let mut entries = Vec::with_capacity(nr * nc);
        for r in 0..nr {
            for c in 0..nc {
                let mut acc = GradedFunction::zero(&self.dom);
                for k in 0..nk {
                    let a = self.get(r, k);
                    let b = o.get(k, c);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                entries.push(acc);
            }
        }
        Ok(GradedMatrix {
            dom: self.dom.clone(),
            rows: self.rows.clone(),
            cols: o.cols.clone(),
            degree: self.degree + o.degree,
            entries,
        })
    }

    /// `alpha * Lambda`: row block k is multiplied by `(-1)^<deg alpha, Gamma_k> alpha`.
    pub fn scalar_mul(&self, alpha: &GradedFunction) -> Result<GradedMatrix> {
        if alpha.domain() != &self.dom {
            return Err(Error::DomainMismatch("scalar on another domain".into()));
        }
        let da = match alpha.degree()? {
            Some(d) => d,
            None => return Ok(GradedMatrix::zero(&self.dom, self.rows.clone(), self.cols.clone(), self.degree)),
        };
        let rl = self.row_labels();
        let nc = self.ncols();
        let neg_alpha = -alpha;
        let mut entries = Vec::with_capacity(self.entries.len());
        for (r, lab) in rl.iter().enumerate() {
            let a = if da.dot(lab) == 1 { &neg_alpha } else { alpha };
            for c in 0..nc {
                entries.push(a * self.get(r, c));
            }
        }
        Ok(GradedMatrix {
            entries,
            degree: self.degree + da,
            ..self.clone()
        })
    }

    /// Supertranspose, defined for n = 1 only.
    pub fn supertranspose(&self) -> Result<GradedMatrix> {
        if self.dom.n() != 1 {
            return Err(Error::Unsupported("supertranspose is only defined for n = 1".into()));
        }
        let rl = self.col_labels();
        let cl = self.row_labels();
        let odd_deg = !self.degree.is_even();
        let (nr, nc) = (self.ncols(), self.nrows());
        let mut entries = Vec::with_capacity(nr * nc);
        for r in 0..nr {
            for c in 0..nc {
                let v = self.get(c, r);
                let (rodd, codd) = (!rl[r].is_even(), !cl[c].is_even());
                let minus = rodd != codd && codd == odd_deg;
                entries.push(if minus { -v } else { v.clone() });
            }
        }
        Ok(GradedMatrix {
            dom: self.dom.clone(),
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            degree: self.degree,
            entries,
        })
    }

    /// Graded trace `sum_k (-1)^<Gamma_k + deg, Gamma_k> tr Lambda_kk`.
    pub fn z2n_trace(&self) -> Result<GradedFunction> {
        if !self.is_square() {
            return Err(Error::Shape("trace needs equal row and column shapes".into()));
        }
        let mut acc = GradedFunction::zero(&self.dom);
        for (i, lab) in self.row_labels().iter().enumerate() {
            let e = self.get(i, i);
            if (*lab + self.degree).dot(lab) == 1 {
                acc = &acc - e;
            } else {
                acc = &acc + e;
            }
        }
        Ok(acc)
    }

    /// `[L, M] = LM - (-1)^<deg L, deg M> ML`.
    pub fn graded_commutator(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        let lm = self.checked_mul(o)?;
        let ml = o.checked_mul(self)?;
        if self.degree.dot(&o.degree) == 1 {
            lm.checked_add(&ml)
        } else {
            lm.checked_sub(&ml)
        }
    }

    /// (start, len) of each nonempty diagonal block.
    fn diagonal_blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for &k in &self.rows {
            if k > 0 {
                out.push((start, k));
            }
            start += k;
        }
        out
    }

    fn require_even_square(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Shape(format!("{what} needs a square matrix with equal row and column shapes")));
        }
        if !self.degree.is_zero() {
            return Err(Error::Degree(format!("{what} needs a matrix of degree zero, got {}", self.degree)));
        }
        Ok(())
    }

    /// Inverse of a degree-zero matrix by recursive 2x2 block elimination.
    pub fn block_inverse(&self) -> Result<GradedMatrix> {
        self.require_even_square("block_inverse")?;
        let blocks = self.diagonal_blocks();
        if blocks.len() <= 1 {
            return self.commutative_inverse();
        }
        let s = blocks[0].1;
        let n = self.nrows();
        let a = self.submatrix(0, s, 0, s);
        let b = self.submatrix(0, s, s, n);
        let c = self.submatrix(s, n, 0, s);
        let d = self.submatrix(s, n, s, n);
        let dinv = d.block_inverse()?;
        let bd = b.checked_mul(&dinv)?;
        let dc = dinv.checked_mul(&c)?;
        let schur = a.checked_sub(&bd.checked_mul(&c)?)?;
        let sinv = schur.commutative_inverse()?;
        let tl = sinv.clone();
        let tr = sinv.checked_mul(&bd)?.neg();
        let bl = dc.checked_mul(&sinv)?.neg();
        let br = dinv.checked_add(&dc.checked_mul(&sinv)?.checked_mul(&bd)?)?;
        Ok(GradedMatrix::from_quarters(&tl, &tr, &bl, &br))
    }

    /// Gauss-Jordan inverse of a matrix whose entries are all of degree zero
    /// and hence commute. Pivots are chosen with nonzero body.
    fn commutative_inverse(&self) -> Result<GradedMatrix> {
        let n = self.nrows();
        let dom = &self.dom;
        let mut m: Vec<Vec<GradedFunction>> = (0..n).map(|r| (0..n).map(|c| self.get(r, c).clone()).collect()).collect();
        let mut inv: Vec<Vec<GradedFunction>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { GradedFunction::one(dom) } else { GradedFunction::zero(dom) })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !m[r][col].epsilon().is_zero())
                .ok_or_else(|| Error::NotInvertible("a diagonal block has a singular body".into()))?;
            m.swap(col, piv);
            inv.swap(col, piv);
            let pinv = m[col][col].invert()?;
            for j in 0..n {
                m[col][j] = &m[col][j] * &pinv;
                inv[col][j] = &inv[col][j] * &pinv;
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                for j in 0..n {
                    let t = &factor * &m[col][j];
                    m[r][j] = &m[r][j] - &t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
        Ok(GradedMatrix {
            dom: dom.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            degree: self.degree,
            entries: inv.into_iter().flatten().collect(),
        })
    }

    /// Classical determinant of a matrix with commuting entries, division free.
    fn commutative_det(&self) -> GradedFunction {
        let n = self.nrows();
        let dom = &self.dom;
        if n == 0 {
            return GradedFunction::one(dom);
        }
        // acc[mask]: signed sum over placements of the first popcount(mask)
        // rows into the columns of mask.
        let mut acc: Vec<Option<GradedFunction>> = vec![None; 1 << n];
        acc[0] = Some(GradedFunction::one(dom));
        for mask in 0usize..(1 << n) {
            let Some(cur) = acc[mask].take() else { continue };
            let row = mask.count_ones() as usize;
            if row == n {
                acc[mask] = Some(cur);
                continue;
            }
            for c in 0..n {
                if mask >> c & 1 == 1 {
                    continue;
                }
                let e = self.get(row, c);
                if e.is_zero() {
                    continue;
                }
                let mut t = &cur * e;
                if (mask >> (c + 1)).count_ones() % 2 == 1 {
                    t = -&t;
                }
                let slot = &mut acc[mask | 1 << c];
                *slot = Some(match slot.take() {
                    Some(v) => &v + &t,
                    None => t,
                });
            }
        }
        acc[(1 << n) - 1].take().unwrap_or_else(|| GradedFunction::zero(dom))
    }

    /// Quasideterminant at position (1,1) for the partition of rows and
    /// columns into `0..split` and `split..N`: `A - B D^-1 C`.
    pub fn quasideterminant(&self, split: usize) -> Result<GradedMatrix> {
        self.require_even_square("quasideterminant")?;
        let n = self.nrows();
        if split == 0 || split >= n {
            return Err(Error::Shape(format!("partition point {split} must lie strictly inside 0..{n}")));
        }
        let a = self.submatrix(0, split, 0, split);
        let b = self.submatrix(0, split, split, n);
        let c = self.submatrix(split, n, 0, split);
        let d = self.submatrix(split, n, split, n);
        let dinv = d.block_inverse()?;
        a.checked_sub(&b.checked_mul(&dinv)?.checked_mul(&c)?)
    }

    /// `Lambda = U D L` with U upper and L lower block unitriangular and D
    /// block diagonal with the nested quasideterminants on the diagonal.
    pub fn udl_decompose(&self) -> Result<(GradedMatrix, GradedMatrix, GradedMatrix)> {
        self.require_even_square("udl_decompose")?;
        let blocks = self.diagonal_blocks();
        let id = GradedMatrix::identity(&self.dom, self.rows.clone());
        if blocks.len() <= 1 {
            return Ok((id.clone(), self.clone(), id));
        }
        let s = blocks[0].1;
        let n = self.nrows();
        let a = self.submatrix(0, s, 0, s);
        let b = self.submatrix(0, s, s, n);
        let c = self.submatrix(s, n, 0, s);
        let d = self.submatrix(s, n, s, n);
        let dinv = d.block_inverse()?;
        let x = b.checked_mul(&dinv)?;
        let y = dinv.checked_mul(&c)?;
        let schur = a.checked_sub(&x.checked_mul(&c)?)?;
        let (u2, d2, l2) = d.udl_decompose()?;
        let ia = GradedMatrix::identity(&self.dom, a.rows.clone());
        let zb = GradedMatrix::zero(&self.dom, b.rows.clone(), b.cols.clone(), self.degree);
        let zc = GradedMatrix::zero(&self.dom, c.rows.clone(), c.cols.clone(), self.degree);
        let u = GradedMatrix::from_quarters(&ia, &x.checked_mul(&u2)?, &zc, &u2);
        let dd = GradedMatrix::from_quarters(&schur, &zb, &zc, &d2);
        let l = GradedMatrix::from_quarters(&ia, &zb, &l2.checked_mul(&y)?, &l2);
        Ok((u, dd, l))
    }

    /// Z2^n-determinant: product of the classical determinants of the nested
    /// quasideterminant blocks. Requires degree zero and all nonempty row
    /// blocks of one parity.
    pub fn z2n_det(&self) -> Result<GradedFunction> {
        self.require_even_square("z2n_det")?;
        let labs = self.row_labels();
        if labs.iter().any(|l| l.is_even() != labs[0].is_even()) {
            return Err(Error::Degree("z2n_det needs all row degrees of one parity".into()));
        }
        let mut det = GradedFunction::one(&self.dom);
        let mut m = self.clone();
        loop {
            let blocks = m.diagonal_blocks();
            if blocks.len() <= 1 {
                det = &det * &m.commutative_det();
                break;
            }
            let s = blocks[0].1;
            let q = m.quasideterminant(s)?;
            det = &det * &q.commutative_det();
            let n = m.nrows();
            m = m.submatrix(s, n, s, n);
        }
        self.certify_polynomial(&det)?;
        Ok(det)
    }

    /// If every entry has polynomial coefficients, so must the determinant.
    fn certify_polynomial(&self, det: &GradedFunction) -> Result<()> {
        let poly_in = self.entries.iter().all(|e| e.terms().all(|(_, c)| c.is_polynomial()));
        if poly_in && !det.terms().all(|(_, c)| c.is_polynomial()) {
            return Err(Error::Internal("Z2^n-determinant failed to clear denominators".into()));
        }
        Ok(())
    }

    /// Z2^n-Berezinian `det(A - B D^-1 C) * det(D)^-1` for the partition into
    /// even and odd row degrees.
    pub fn z2n_ber(&self) -> Result<GradedFunction> {
        self.require_even_square("z2n_ber")?;
        let ne = self.row_labels().iter().filter(|l| l.is_even()).count();
        let n = self.nrows();
        if ne == n {
            return self.z2n_det();
        }
        let d = self.submatrix(ne, n, ne, n);
        let det_d = d.z2n_det()?;
        let det_d_inv = det_d
            .invert()
            .map_err(|_| Error::NotInvertible("odd-odd block has a non-invertible determinant".into()))?;
        if ne == 0 {
            return Ok(det_d_inv);
        }
        let a = self.submatrix(0, ne, 0, ne);
        let b = self.submatrix(0, ne, ne, n);
        let c = self.submatrix(ne, n, 0, ne);
        let schur = a.checked_sub(&b.checked_mul(&d.block_inverse()?)?.checked_mul(&c)?)?;
        Ok(&schur.z2n_det()? * &det_d_inv)
    }
}

impl fmt::Display for GradedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.nrows() {
            let row: Vec<String> = (0..self.ncols()).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
