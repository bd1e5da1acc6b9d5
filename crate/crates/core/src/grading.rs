//! Z2^n degrees, the Koszul sign rule and the standard order.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported rank of the grading group.
pub const MAX_N: usize = 16;

/// An element of Z2^n. Component 0 is stored in the most significant bit so
/// that integer order on `bits` is lexicographic order on tuples.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Degree {
    n: u8,
    bits: u32,
}

impl Degree {
    pub fn new(components: &[u8]) -> Result<Self> {
        let n = components.len();
        if n == 0 || n > MAX_N {
            return Err(Error::Config(format!(
                "grading rank must be between 1 and {MAX_N}, got {n}"
            )));
        }
        let mut bits = 0u32;
        for &c in components {
            if c > 1 {
                return Err(Error::Config(format!("degree component {c} is not 0 or 1")));
            }
            bits = (bits << 1) | c as u32;
        }
        Ok(Degree { n: n as u8, bits })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Degree::new(&vec![0; n])
    }

    pub(crate) fn from_bits(n: usize, bits: u32) -> Self {
        debug_assert!(n >= 1 && n <= MAX_N && bits < (1u32 << n));
        Degree { n: n as u8, bits }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub(crate) fn bits(&self) -> u32 {
        self.bits
    }

    pub fn component(&self, i: usize) -> u8 {
        ((self.bits >> (self.n() - 1 - i)) & 1) as u8
    }

    pub fn components(&self) -> Vec<u8> {
        (0..self.n()).map(|i| self.component(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Total parity: sum of the components mod 2.
    pub fn parity(&self) -> u8 {
        (self.bits.count_ones() & 1) as u8
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 0
    }

    /// Scalar product mod 2, without the rank check.
    pub fn dot(&self, other: &Degree) -> u8 {
        debug_assert_eq!(self.n, other.n);
        ((self.bits & other.bits).count_ones() & 1) as u8
    }

    pub fn checked_add(&self, other: &Degree) -> Result<Degree> {
        same_rank(self, other)?;
        Ok(Degree::from_bits(self.n(), self.bits ^ other.bits))
    }

    /// Position of this degree in the standard order.
    pub fn standard_position(&self) -> usize {
        let n = self.n();
        let half = 1usize << (n - 1);
        // Degrees with a given parity, counted lexicographically below self.
        let below = (0..self.bits).filter(|b| b.count_ones() & 1 == self.bits.count_ones() & 1);
        let rank = below.count();
        if self.is_even() {
            rank
        } else {
            half + rank
        }
    }
}

impl Add for Degree {
    type Output = Degree;

    /// Panics on rank mismatch; use `checked_add` at API boundaries.
    fn add(self, rhs: Degree) -> Degree {
        self.checked_add(&rhs).expect("degree rank mismatch")
    }
}

fn same_rank(a: &Degree, b: &Degree) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Config(format!(
            "degrees {a} and {b} have different lengths"
        )));
    }
    Ok(())
}

/// A sign `+1` or `-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(p: u8) -> Sign {
        if p & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_i32())
    }
}

/// `(-1)^<a,b>` where `<a,b>` is the scalar product mod 2.
pub fn koszul_sign(a: &Degree, b: &Degree) -> Result<Sign> {
    same_rank(a, b)?;
    Ok(Sign::from_parity(a.dot(b)))
}

/// Even degrees in lexicographic order, then odd degrees in lexicographic order.
pub fn standard_order(n: usize) -> Result<Vec<Degree>> {
    Degree::zero(n)?;
    let all = 0..(1u32 << n);
    let even = all.clone().filter(|b| b.count_ones() % 2 == 0);
    let odd = all.filter(|b| b.count_ones() % 2 == 1);
    Ok(even.chain(odd).map(|b| Degree::from_bits(n, b)).collect())
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.n() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.component(i))?;
        }
        write!(f, ")")
    }
}

impl FromStr for Degree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Degree> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(1, 1, format!("expected a degree like (0,1), got `{t}`")))?;
        let mut comps = Vec::new();
        for piece in inner.split(',') {
            let v: u8 = piece
                .trim()
                .parse()
                .map_err(|_| Error::parse(1, 1, format!("bad degree component `{}`", piece.trim())))?;
            comps.push(v);
        }
        Degree::new(&comps)
    }
}

/// A graded dimension `p|q`: the number of degree-zero coordinates and the
/// number of coordinates of every nonzero degree in standard order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GradedDimension {
    pub p: usize,
    pub q: Vec<usize>,
}

impl GradedDimension {
    pub fn new(n: usize, p: usize, q: Vec<usize>) -> Result<Self> {
        if q.len() + 1 != 1 << n {
            return Err(Error::Config(format!(
                "graded dimension over Z2^{n} needs {} odd-or-nonzero counts, got {}",
                (1 << n) - 1,
                q.len()
            )));
        }
        Ok(GradedDimension { p, q })
    }

    /// Counts per degree in standard order, including degree zero.
    pub fn counts(&self) -> Vec<usize> {
        std::iter::once(self.p).chain(self.q.iter().copied()).collect()
    }

    pub fn total(&self) -> usize {
        self.p + self.q.iter().sum::<usize>()
    }
}

impl fmt::Display for GradedDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.q.iter().map(|v| v.to_string()).collect();
        write!(f, "{}|({})", self.p, q.join(","))
    }
}
