//! Univariate polynomials in the sweep parameter `v`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Coefficients in ascending degree; trailing zeros stripped, so the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Poly {
        Poly::new(vec![c])
    }

    /// `a + b v`
    pub fn affine(a: Rat, b: Rat) -> Poly {
        Poly::new(vec![a, b])
    }

    /// The monomial `v`.
    pub fn v() -> Poly {
        Poly::new(vec![Rat::zero(), Rat::one()])
    }

    /// Literal from string coefficients, ascending degree. Panics on bad input.
    pub fn from_strs(cs: &[&str]) -> Poly {
        Poly::new(cs.iter().map(|s| crate::rat::r(s)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, v: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * v + c;
        }
        acc
    }

    pub fn eval_f64(&self, v: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * v + c.to_f64())
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Rat::zero()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / Rat::int(i as i64 + 1));
        }
        Poly::new(out)
    }

    pub fn integrate(&self, a: &Rat, b: &Rat) -> Rat {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    /// Distinct real roots, all rational, in increasing order. Degree ≤ 2
    /// only. Fails with `IrrationalRoot` if a real root is irrational.
    pub fn rational_roots(&self) -> Result<Vec<Rat>> {
        match self.coeffs.len() {
            0 | 1 => Ok(vec![]),
            2 => Ok(vec![-&self.coeffs[0] / &self.coeffs[1]]),
            3 => {
                let (c, b, a) = (&self.coeffs[0], &self.coeffs[1], &self.coeffs[2]);
                let disc = b * b - Rat::int(4) * a * c;
                if disc.is_negative() {
                    return Ok(vec![]);
                }
                let s = disc.sqrt_exact().ok_or_else(|| Error::IrrationalRoot(self.to_string()))?;
                let two_a = Rat::int(2) * a;
                let mut rs = vec![(-b - &s) / &two_a, (-b + &s) / &two_a];
                rs.sort();
                rs.dedup();
                Ok(rs)
            }
            n => Err(Error::UnsupportedDegree(n - 1)),
        }
    }
}

/// Smallest root `r ≥ lo`, or `None` if there is none. Degree ≤ 2; an
/// irrational real root at or beyond `lo` is an error, not an approximation.
pub fn min_positive_root(p: &Poly, lo: &Rat) -> Result<Option<Rat>> {
    if p.coeffs.len() == 3 {
        let (c, b, a) = (&p.coeffs[0], &p.coeffs[1], &p.coeffs[2]);
        let disc = b * b - Rat::int(4) * a * c;
        if !disc.is_negative() && disc.sqrt_exact().is_none() {
            // both roots lie below lo iff p(lo) has the sign of a and the vertex is below lo
            let vertex = -b / (Rat::int(2) * a);
            let below = (p.eval(lo) * a).is_positive() && vertex < *lo;
            if below {
                return Ok(None);
            }
            return Err(Error::IrrationalRoot(p.to_string()));
        }
    }
    Ok(p.rational_roots()?.into_iter().find(|x| x >= lo))
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if i == 0 {
                write!(f, "{a}")?;
            } else if !a.is_integer() {
                write!(f, "({a})")?;
            } else if a != Rat::one() {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "v")?,
                _ => write!(f, "v^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Poly, D::Error> {
        Ok(Poly::new(Vec::<Rat>::deserialize(d)?))
    }
}
