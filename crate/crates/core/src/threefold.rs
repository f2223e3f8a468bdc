//! δ by singularity type, the table of composite singularity types, and the two
//! threefold multipliers.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rat::{r, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SingType {
    A(u8),
    D(u8),
    E(u8),
}

impl fmt::Display for SingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingType::A(n) => write!(f, "A{n}"),
            SingType::D(n) => write!(f, "D{n}"),
            SingType::E(n) => write!(f, "E{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityEntry {
    pub kind: SingType,
    /// A1/A2 only: the anticanonical curve through the point is cuspidal.
    pub cuspidal: Option<bool>,
    /// A7 only: the ramification curve is reducible.
    pub reducible: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityInput {
    pub entries: Vec<SingularityEntry>,
}

impl SingularityEntry {
    pub fn new(kind: SingType) -> SingularityEntry {
        SingularityEntry { kind, cuspidal: None, reducible: None }
    }

    pub fn cusp(kind: SingType, cuspidal: bool) -> SingularityEntry {
        SingularityEntry { kind, cuspidal: Some(cuspidal), reducible: None }
    }

    pub fn a7(reducible: bool) -> SingularityEntry {
        SingularityEntry { kind: SingType::A(7), cuspidal: None, reducible: Some(reducible) }
    }

    fn needs_cusp(&self) -> bool {
        matches!(self.kind, SingType::A(1) | SingType::A(2))
    }

    fn needs_reducible(&self) -> bool {
        self.kind == SingType::A(7)
    }

    pub fn check(&self) -> Result<()> {
        if self.needs_cusp() != self.cuspidal.is_some() {
            return Err(Error::Singularity(if self.needs_cusp() {
                format!("{} needs :nodal or :cusp", self.kind)
            } else {
                format!("{} takes no :nodal/:cusp flag", self.kind)
            }));
        }
        if self.needs_reducible() != self.reducible.is_some() {
            return Err(Error::Singularity(if self.needs_reducible() {
                format!("{} needs :red or :irred", self.kind)
            } else {
                format!("{} takes no :red/:irred flag", self.kind)
            }));
        }
        Ok(())
    }
}

fn parse_type(s: &str) -> Result<SingType> {
    let bad = || Error::Singularity(format!("unknown singularity type {s:?}"));
    let (letter, n) = s.split_at(1);
    let n: u8 = n.parse().map_err(|_| bad())?;
    let t = match letter {
        "A" if (1..=8).contains(&n) => SingType::A(n),
        "D" if (4..=8).contains(&n) => SingType::D(n),
        "E" if (6..=8).contains(&n) => SingType::E(n),
        _ => return Err(bad()),
    };
    Ok(t)
}

/// Parse `"A2:cusp+4A1:nodal"`: types joined by `+`, optional count prefix,
/// suffixes `:cusp`, `:nodal`, `:red`, `:irred`.
pub fn parse_singularities(s: &str) -> Result<SingularityInput> {
    let mut entries = vec![];
    for term in s.split('+') {
        let term = term.trim();
        let (body, flag) = match term.split_once(':') {
            Some((b, f)) => (b.trim(), Some(f.trim())),
            None => (term, None),
        };
        let digits = body.chars().take_while(|c| c.is_ascii_digit()).count();
        let count: usize = if digits == 0 {
            1
        } else {
            body[..digits].parse().map_err(|_| Error::Singularity(format!("bad count in {term:?}")))?
        };
        if count == 0 {
            return Err(Error::Singularity(format!("zero count in {term:?}")));
        }
        let mut e = SingularityEntry::new(parse_type(&body[digits..])?);
        match flag {
            None => {}
            Some("cusp") => e.cuspidal = Some(true),
            Some("nodal") => e.cuspidal = Some(false),
            Some("red") => e.reducible = Some(true),
            Some("irred") => e.reducible = Some(false),
            Some(f) => return Err(Error::Singularity(format!("unknown flag :{f}"))),
        }
        e.check()?;
        entries.extend(std::iter::repeat_n(e, count));
    }
    Ok(SingularityInput { entries })
}

/// δ at a singular point of the given type.
pub fn base_delta(e: &SingularityEntry) -> Rat {
    let s = match (e.kind, e.cuspidal, e.reducible) {
        (SingType::A(1), Some(true), _) => "9/5",
        (SingType::A(1), _, _) => "2",
        (SingType::A(2), Some(true), _) => "3/2",
        (SingType::A(2), _, _) => "12/7",
        (SingType::A(3), _, _) => "3/2",
        (SingType::A(4), _, _) => "4/3",
        (SingType::A(5), _, _) => "6/5",
        (SingType::A(6), _, _) => "9/8",
        (SingType::A(7), _, Some(true)) => "1",
        (SingType::A(7), _, _) => "18/17",
        (SingType::A(8), _, _) => "1",
        (SingType::D(4), _, _) => "1",
        (SingType::D(5), _, _) => "6/7",
        (SingType::D(6), _, _) => "3/4",
        (SingType::D(7), _, _) => "2/3",
        (SingType::D(8), _, _) => "3/5",
        (SingType::E(6), _, _) => "3/5",
        (SingType::E(7), _, _) => "3/7",
        (SingType::E(8), _, _) => "3/11",
        (t, _, _) => unreachable!("type {t} is rejected by the parser"),
    };
    r(s)
}

/// Lower bound for δ at smooth points of any degree one Du Val del Pezzo surface.
pub fn smooth_point_delta() -> Rat {
    r("15/7")
}

pub fn main_theorem_delta(input: &SingularityInput) -> Result<Rat> {
    let mut best = smooth_point_delta();
    for e in &input.entries {
        e.check()?;
        best = Rat::min(&best, &base_delta(e));
    }
    Ok(best)
}

pub struct TableRow {
    pub types: &'static [&'static str],
    pub condition: &'static str,
    pub printed: &'static str,
}

/// Composite rows of the δ table. Unflagged A1/A2/A7 terms stand for every choice
/// of flag; `a1`/`a2` in a condition restricts all such points of that
/// type at once.
pub const TABLE: &[TableRow] = &[
    TableRow {
        types: &["A1", "2A1", "3A1", "4A1", "5A1", "6A1", "7A1", "8A1"],
        condition: "all nodal",
        printed: "2",
    },
    TableRow {
        types: &["A1", "2A1", "3A1", "4A1", "5A1", "6A1", "7A1", "8A1"],
        condition: "some cuspidal",
        printed: "9/5",
    },
    TableRow {
        types: &["A2", "A2+A1", "A2+2A1", "A2+3A1", "A2+4A1", "2A2", "2A2+A1", "2A2+2A1", "3A2", "3A2+A1", "4A2"],
        condition: "A2 nodal",
        printed: "12/7",
    },
    TableRow {
        types: &["A2", "A2+A1", "A2+2A1", "A2+3A1", "A2+4A1", "2A2", "2A2+A1", "2A2+2A1", "3A2", "3A2+A1", "4A2"],
        condition: "some A2 cuspidal",
        printed: "3/2",
    },
    TableRow {
        types: &["A4", "A4+A1", "A4+2A1", "A4+A2", "A4+A2+A1", "A4+A3", "2A4"],
        condition: "",
        printed: "4/3",
    },
    TableRow {
        types: &["A5", "A5+A1", "A5+2A1", "A5+A2", "A5+A2+A1", "A5+A3"],
        condition: "",
        printed: "6/5",
    },
    TableRow { types: &["A6", "A6+A1"], condition: "", printed: "9/8" },
    TableRow { types: &["A7", "A7+A1"], condition: "R irreducible", printed: "18/17" },
    TableRow { types: &["A7", "A7+A1"], condition: "R reducible", printed: "1" },
    TableRow {
        types: &["A8", "D4", "D4+A1", "D4+2A1", "D4+3A1", "D4+4A1", "D4+A2", "D4+A3", "2D4"],
        condition: "",
        printed: "1",
    },
    TableRow { types: &["D5", "D5+A1", "D5+2A1", "D5+A2", "D5+A3"], condition: "", printed: "6/7" },
    TableRow { types: &["D6", "D6+A1", "D6+2A1"], condition: "", printed: "3/4" },
    TableRow { types: &["D7"], condition: "", printed: "2/3" },
    TableRow { types: &["D8", "E6", "E6+A1", "E6+A2"], condition: "", printed: "3/5" },
    TableRow { types: &["E7", "E7+A1"], condition: "", printed: "3/7" },
    TableRow { types: &["E8"], condition: "", printed: "3/11" },
];

/// Every flag assignment a table cell admits under its row condition.
pub fn expand_cell(types: &str, condition: &str) -> Result<Vec<SingularityInput>> {
    let mut bare = vec![];
    for term in types.split('+') {
        let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
        let count: usize = if digits == 0 { 1 } else { term[..digits].parse().unwrap() };
        let kind = parse_type(&term[digits..])?;
        bare.extend(std::iter::repeat_n(kind, count));
    }
    let free: Vec<usize> = (0..bare.len())
        .filter(|&i| matches!(bare[i], SingType::A(1) | SingType::A(2) | SingType::A(7)))
        .collect();
    let mut out = vec![];
    for mask in 0u32..(1 << free.len()) {
        let mut entries: Vec<SingularityEntry> = bare.iter().map(|&k| SingularityEntry::new(k)).collect();
        for (bit, &i) in free.iter().enumerate() {
            let on = mask & (1 << bit) != 0;
            if bare[i] == SingType::A(7) {
                entries[i].reducible = Some(on);
            } else {
                entries[i].cuspidal = Some(on);
            }
        }
        let of = |k: SingType| entries.iter().filter(move |e| e.kind == k);
        let keep = match condition {
            "all nodal" => entries.iter().all(|e| e.cuspidal != Some(true)),
            "some cuspidal" => entries.iter().any(|e| e.cuspidal == Some(true)),
            "A2 nodal" => of(SingType::A(2)).all(|e| e.cuspidal == Some(false)),
            "some A2 cuspidal" => of(SingType::A(2)).any(|e| e.cuspidal == Some(true)),
            "R irreducible" => of(SingType::A(7)).all(|e| e.reducible == Some(false)),
            "R reducible" => of(SingType::A(7)).all(|e| e.reducible == Some(true)),
            "" => true,
            c => return Err(Error::Singularity(format!("unknown table condition {c:?}"))),
        };
        if keep {
            out.push(SingularityInput { entries });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TableCell {
    pub types: String,
    pub condition: String,
    pub printed: Rat,
    /// δ over all admissible flag assignments; one value when consistent.
    pub computed: Vec<Rat>,
}

impl TableCell {
    pub fn consistent(&self) -> bool {
        self.computed.iter().all(|c| *c == self.printed)
    }
}

pub fn evaluate_table() -> Result<Vec<TableCell>> {
    let mut out = vec![];
    for row in TABLE {
        for t in row.types {
            let mut computed = vec![];
            for input in expand_cell(t, row.condition)? {
                let d = main_theorem_delta(&input)?;
                if !computed.contains(&d) {
                    computed.push(d);
                }
            }
            out.push(TableCell {
                types: t.to_string(),
                condition: row.condition.to_string(),
                printed: r(row.printed),
                computed,
            });
        }
    }
    Ok(out)
}

/// `(3/8) ∫_0^2 (2-u)^3 du`.
pub fn multiplier_family_1_11() -> Rat {
    r("3/8") * cube_weight().integrate(&r("0"), &r("2"))
}

/// `(3/4) (∫_0^1 du + ∫_1^2 (2-u)^3 du)`.
pub fn multiplier_family_2_1() -> Rat {
    let flat = Poly::constant(Rat::one()).integrate(&r("0"), &r("1"));
    r("3/4") * (flat + cube_weight().integrate(&r("1"), &r("2")))
}

/// `(2-u)^3`
pub fn cube_weight() -> Poly {
    let l = Poly::affine(r("2"), r("-1"));
    &(&l * &l) * &l
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Semistable,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "K-stable",
            Verdict::Semistable => "K-semistable",
            Verdict::Unknown => "unknown",
        })
    }
}

/// δ > 1 stable, δ = 1 semistable, otherwise no claim.
pub fn kstability_verdict(delta: &Rat) -> Verdict {
    match delta.cmp(&Rat::one()) {
        std::cmp::Ordering::Greater => Verdict::Stable,
        std::cmp::Ordering::Equal => Verdict::Semistable,
        std::cmp::Ordering::Less => Verdict::Unknown,
    }
}

/// Lower bound `δ_Q(X)/m` for a threefold point given the fiber bound and
/// the family's multiplier `m`.
pub fn lifted_delta_bound(multiplier: &Rat, surface_delta: &Rat) -> Rat {
    surface_delta / multiplier
}

/// Verdict for a threefold whose fibers through every point have δ at least
/// `worst_fiber_delta`, with the family's multiplier supplied by the caller.
pub fn threefold_verdict(multiplier: &Rat, worst_fiber_delta: &Rat) -> Verdict {
    kstability_verdict(&lifted_delta_bound(multiplier, worst_fiber_delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_values() {
        assert_eq!(base_delta(&SingularityEntry::new(SingType::A(4))), r("4/3"));
        assert_eq!(base_delta(&SingularityEntry::a7(true)), r("1"));
        assert_eq!(base_delta(&SingularityEntry::new(SingType::E(8))), r("3/11"));
    }

    #[test]
    fn parsing() {
        let s = parse_singularities("A2:nodal+4A1:nodal").unwrap();
        assert_eq!(s.entries.len(), 5);
        assert_eq!(main_theorem_delta(&s).unwrap(), r("12/7"));
        assert_eq!(main_theorem_delta(&parse_singularities("A4+A3").unwrap()).unwrap(), r("4/3"));
        assert_eq!(main_theorem_delta(&parse_singularities("A7:red+A1:cusp").unwrap()).unwrap(), r("1"));
        assert!(parse_singularities("A1").is_err());
        assert!(parse_singularities("A7").is_err());
        assert!(parse_singularities("A4:cusp").is_err());
        assert!(parse_singularities("A9").is_err());
        assert!(parse_singularities("D3").is_err());
        assert!(parse_singularities("A2:weird").is_err());
    }

    #[test]
    fn d4_with_any_a1() {
        for cell in expand_cell("D4+4A1", "").unwrap() {
            assert_eq!(main_theorem_delta(&cell).unwrap(), r("1"));
        }
    }

    #[test]
    fn table_is_consistent() {
        for cell in evaluate_table().unwrap() {
            assert!(cell.consistent(), "{} ({}) -> {:?}", cell.types, cell.condition, cell.computed);
        }
    }

    #[test]
    fn multipliers() {
        assert_eq!(cube_weight().integrate(&r("0"), &r("2")), r("4"));
        assert_eq!(cube_weight().integrate(&r("1"), &r("2")), r("1/4"));
        assert_eq!(multiplier_family_1_11(), r("3/2"));
        assert_eq!(multiplier_family_2_1(), r("15/16"));
    }

    #[test]
    fn verdicts() {
        assert_eq!(kstability_verdict(&r("18/17")), Verdict::Stable);
        assert_eq!(kstability_verdict(&r("1")), Verdict::Semistable);
        assert_eq!(kstability_verdict(&r("3/5")), Verdict::Unknown);
        // D4 fibers in the pencil family: 1 / (15/16) > 1
        assert_eq!(threefold_verdict(&multiplier_family_2_1(), &r("1")), Verdict::Stable);
    }
}
