//! Piecewise polynomials on a partition `b_0 < … < b_k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rat>,
    pieces: Vec<Poly>,
    #[serde(default)]
    continuous: bool,
}

impl PiecewisePoly {
    /// Piece `i` lives on `[breakpoints[i], breakpoints[i+1]]`.
    pub fn new(breakpoints: Vec<Rat>, pieces: Vec<Poly>) -> Result<PiecewisePoly> {
        if pieces.is_empty() || breakpoints.len() != pieces.len() + 1 {
            return Err(Error::Schema(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Schema("breakpoints not strictly increasing".into()));
        }
        Ok(PiecewisePoly { breakpoints, pieces, continuous: false })
    }

    /// Like `new`, but also checks and records continuity at interior breakpoints.
    pub fn continuous(breakpoints: Vec<Rat>, pieces: Vec<Poly>) -> Result<PiecewisePoly> {
        let mut pp = PiecewisePoly::new(breakpoints, pieces)?;
        for i in 1..pp.pieces.len() {
            let b = &pp.breakpoints[i];
            if pp.pieces[i - 1].eval(b) != pp.pieces[i].eval(b) {
                return Err(Error::Schema(format!("jump at breakpoint {b}")));
            }
        }
        pp.continuous = true;
        Ok(pp)
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn lo(&self) -> &Rat {
        &self.breakpoints[0]
    }

    pub fn hi(&self) -> &Rat {
        self.breakpoints.last().unwrap()
    }

    /// Iterate `(lo, hi, piece)`.
    pub fn iter(&self) -> impl Iterator<Item = (&Rat, &Rat, &Poly)> {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (&self.breakpoints[i], &self.breakpoints[i + 1], p))
    }

    fn check(&self, a: &Rat, b: &Rat) -> Result<()> {
        if a < self.lo() || b > self.hi() || a > b {
            return Err(Error::OutOfDomain {
                a: a.clone(),
                b: b.clone(),
                lo: self.lo().clone(),
                hi: self.hi().clone(),
            });
        }
        Ok(())
    }

    /// Value at `v`. At an interior breakpoint the right-hand piece is used,
    /// except at the last breakpoint.
    pub fn eval(&self, v: &Rat) -> Result<Rat> {
        self.check(v, v)?;
        let i = self.piece_index(v);
        Ok(self.pieces[i].eval(v))
    }

    /// Values from the left and right at `v`; they coincide away from breakpoints.
    pub fn eval_sides(&self, v: &Rat) -> Result<(Rat, Rat)> {
        self.check(v, v)?;
        let right = self.piece_index(v);
        let left = if right > 0 && &self.breakpoints[right] == v { right - 1 } else { right };
        Ok((self.pieces[left].eval(v), self.pieces[right].eval(v)))
    }

    fn piece_index(&self, v: &Rat) -> usize {
        let k = self.pieces.len();
        (0..k).find(|&i| v < &self.breakpoints[i + 1]).unwrap_or(k - 1)
    }

    pub fn integrate(&self, a: &Rat, b: &Rat) -> Result<Rat> {
        self.check(a, b)?;
        let mut total = Rat::zero();
        for (lo, hi, p) in self.iter() {
            let l = if lo > a { lo } else { a };
            let h = if hi < b { hi } else { b };
            if l < h {
                total += p.integrate(l, h);
            }
        }
        Ok(total)
    }

    pub fn integrate_all(&self) -> Rat {
        self.iter().map(|(lo, hi, p)| p.integrate(lo, hi)).sum()
    }

    /// Pointwise map of each piece.
    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(f).collect(),
            continuous: false,
        }
    }
}

impl fmt::Display for PiecewisePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi, p)) in self.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{p}  if v in [{lo}, {hi}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    fn p_sq_a1_nodal() -> PiecewisePoly {
        PiecewisePoly::continuous(
            vec![r("0"), r("1/2"), r("1")],
            vec![Poly::from_strs(&["1", "0", "-2"]), Poly::from_strs(&["2", "-4", "2"])],
        )
        .unwrap()
    }

    #[test]
    fn integrate_volume() {
        let pp = p_sq_a1_nodal();
        assert_eq!(pp.integrate(&r("0"), &r("1")).unwrap(), r("1/2"));
        let z = PiecewisePoly::new(vec![r("0"), r("1")], vec![Poly::zero()]).unwrap();
        assert_eq!(z.integrate(&r("0"), &r("1")).unwrap(), r("0"));
        let three = PiecewisePoly::continuous(
            vec![r("0"), r("1"), r("4/3"), r("3/2")],
            vec![
                Poly::from_strs(&["1", "0", "-7/12"]),
                Poly::from_strs(&["2", "-2", "5/12"]),
                Poly::from_strs(&["6", "-8", "8/3"]),
            ],
        )
        .unwrap();
        assert_eq!(three.integrate(&r("0"), &r("3/2")).unwrap(), r("8/9"));
    }

    #[test]
    fn out_of_domain() {
        let pp = p_sq_a1_nodal();
        assert!(matches!(pp.integrate(&r("0"), &r("2")), Err(Error::OutOfDomain { .. })));
        assert!(pp.eval(&r("-1")).is_err());
    }

    #[test]
    fn eval_points() {
        let pp = p_sq_a1_nodal();
        assert_eq!(pp.eval(&r("3/4")).unwrap(), r("1/8"));
        assert_eq!(pp.eval(&r("0")).unwrap(), r("1"));
        let (l, rt) = pp.eval_sides(&r("1/2")).unwrap();
        assert_eq!(l, rt);
        let pe = PiecewisePoly::continuous(
            vec![r("0"), r("1/2"), r("1")],
            vec![Poly::from_strs(&["0", "2"]), Poly::from_strs(&["2", "-2"])],
        )
        .unwrap();
        assert_eq!(pe.eval(&r("1/2")).unwrap(), r("1"));
    }

    #[test]
    fn rejects_jump() {
        let bad = PiecewisePoly::continuous(
            vec![r("0"), r("1"), r("2")],
            vec![Poly::from_strs(&["0"]), Poly::from_strs(&["1"])],
        );
        assert!(bad.is_err());
    }
}
