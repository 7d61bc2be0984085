//! Textual algebra documents.
//!
//! ```text
//! # comment (also allowed after any statement)
//! algebra <name>
//! elements <e1> <e2> ...
//! leq <a> <b>              order pairs; the reflexive-transitive closure is taken
//! meet <a> <b> <c>         optional table overrides: a ∧ b = c
//! join <a> <b> <c>
//! implies <a> <b> <c>
//! ```
//!
//! `algebra` and `elements` come first, once each. Tables not overridden are
//! derived from the order; overridden ones are validated. The printer emits
//! the header, the elements in index order and the covering pairs of the
//! order, so printing a parsed document is a fixed point.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{check_heyting_tables, check_poset, Elem, FinitePoset, HeytingAlgebra, HeytingTables};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Meet,
    Join,
    Implies,
}

#[derive(Debug, Clone)]
pub struct AlgebraDocument {
    pub name: String,
    pub poset: FinitePoset,
    pub overrides: Vec<(Op, Elem, Elem, Elem)>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_algebra(text: &str) -> Result<AlgebraDocument> {
    let mut name: Option<String> = None;
    let mut elements: Option<Vec<String>> = None;
    let mut pairs = Vec::new();
    let mut overrides = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, args)) = words.split_first() else {
            continue;
        };
        let lookup = |w: &str| -> Result<Elem> {
            let els = elements.as_ref().ok_or_else(|| parse_err(line, "`elements` must come before use"))?;
            els.iter()
                .position(|e| e == w)
                .map(|p| p as Elem)
                .ok_or_else(|| parse_err(line, format!("unknown element `{w}`")))
        };
        match head {
            "algebra" => {
                if name.is_some() {
                    return Err(parse_err(line, "duplicate `algebra`"));
                }
                let [n] = args else {
                    return Err(parse_err(line, "`algebra` takes one name"));
                };
                name = Some(n.to_string());
            }
            "elements" => {
                if name.is_none() {
                    return Err(parse_err(line, "`algebra` must come first"));
                }
                if elements.is_some() {
                    return Err(parse_err(line, "duplicate `elements`"));
                }
                if args.is_empty() {
                    return Err(parse_err(line, "`elements` needs at least one name"));
                }
                let els: Vec<String> = args.iter().map(|s| s.to_string()).collect();
                for (k, e) in els.iter().enumerate() {
                    if els[..k].contains(e) {
                        return Err(parse_err(line, format!("duplicate element `{e}`")));
                    }
                }
                elements = Some(els);
            }
            "leq" => {
                let [a, b] = args else {
                    return Err(parse_err(line, "`leq` takes two elements"));
                };
                pairs.push((lookup(a)?, lookup(b)?));
            }
            "meet" | "join" | "implies" => {
                let [a, b, c] = args else {
                    return Err(parse_err(line, format!("`{head}` takes three elements")));
                };
                let op = match head {
                    "meet" => Op::Meet,
                    "join" => Op::Join,
                    _ => Op::Implies,
                };
                overrides.push((op, lookup(a)?, lookup(b)?, lookup(c)?));
            }
            other => return Err(parse_err(line, format!("unknown statement `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| parse_err(0, "missing `algebra`"))?;
    let elements = elements.ok_or_else(|| parse_err(0, "missing `elements`"))?;
    let poset = FinitePoset::from_generating_pairs(elements, &pairs)?;
    Ok(AlgebraDocument { name, poset, overrides })
}

impl AlgebraDocument {
    /// Derived tables with the overrides applied.
    fn tables(&self) -> Result<HeytingTables> {
        let mut t = HeytingTables::derive(&self.poset)?;
        let n = self.poset.len();
        for &(op, a, b, c) in &self.overrides {
            let idx = a as usize * n + b as usize;
            match op {
                Op::Meet => t.meet[idx] = c,
                Op::Join => t.join[idx] = c,
                Op::Implies => t.implies[idx] = c,
            }
        }
        Ok(t)
    }

    /// Order axioms, then the Heyting laws of the (possibly overridden)
    /// tables, with witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new("algebra-tables", "partial order; ∧ ∨ ⟹ tables satisfy the Heyting laws");
        r.absorb(check_poset(&self.poset));
        if !r.passed() {
            return r;
        }
        match self.tables() {
            Ok(t) => r.absorb(check_heyting_tables(&self.poset, &t)),
            Err(e) => r.fail(crate::report::Witness::new().with("error", e)),
        }
        r
    }

    pub fn build(&self) -> Result<HeytingAlgebra> {
        HeytingAlgebra::from_tables(&self.name, self.poset.clone(), self.tables()?)
    }
}

pub fn print_algebra(h: &HeytingAlgebra) -> String {
    let p = h.poset();
    let mut s = String::new();
    let _ = writeln!(s, "algebra {}", h.name());
    let _ = writeln!(s, "elements {}", p.names().join(" "));
    for (a, b) in p.covers() {
        let _ = writeln!(s, "leq {} {}", p.name(a), p.name(b));
    }
    s
}

/// Parses and builds in one step.
pub fn load_algebra(text: &str) -> Result<HeytingAlgebra> {
    parse_algebra(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtins_round_trip() {
        for h in [HeytingAlgebra::chain(2), HeytingAlgebra::chain(3), HeytingAlgebra::diamond()] {
            let text = print_algebra(&h);
            let back = load_algebra(&text).unwrap();
            assert_eq!(back, h);
            assert_eq!(print_algebra(&back), text);
        }
    }

    #[test]
    fn diamond_document() {
        let text = "algebra diamond\nelements 0 u v 1\nleq 0 u\nleq 0 v\nleq u 1\nleq v 1\n";
        assert_eq!(print_algebra(&HeytingAlgebra::diamond()), text);
    }

    #[test]
    fn corrupted_implication_is_reported_with_a_witness() {
        let text = "algebra bad\nelements 0 m 1\nleq 0 m\nleq m 1\nimplies 1 m 1  # should be m\n";
        let doc = parse_algebra(text).unwrap();
        let r = doc.validate();
        assert!(!r.passed());
        assert!(r.first_witness().unwrap().0.iter().any(|(k, _)| k == "residuation"));
        assert!(matches!(doc.build(), Err(Error::NotResiduated { .. })));
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        let err = parse_algebra("algebra x\nelements a b\nleq a c\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(matches!(parse_algebra("elements a\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_algebra("algebra x\nelements a\nfrob a\n"), Err(Error::Parse { line: 3, .. })));
    }

    fn random_order() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
        (1usize..=6).prop_flat_map(|n| {
            let pair = (0..n as u32, 0..n as u32).prop_map(|(a, b)| (a.min(b), a.max(b)));
            (Just(n), proptest::collection::vec(pair, 0..10))
        })
    }

    proptest! {
        #[test]
        fn printing_is_a_fixed_point((n, pairs) in random_order()) {
            // a bottom and a top make every such order a candidate lattice
            let names: Vec<String> = (0..n + 2).map(|i| format!("e{i}")).collect();
            let mut all: Vec<(u32, u32)> = pairs.iter().map(|&(a, b)| (a + 1, b + 1)).collect();
            for i in 1..=n as u32 {
                all.push((0, i));
                all.push((i, n as u32 + 1));
            }
            let poset = FinitePoset::from_generating_pairs(names, &all).unwrap();
            if let Ok(h) = HeytingAlgebra::from_poset("p", poset) {
                let text = print_algebra(&h);
                let back = load_algebra(&text).unwrap();
                prop_assert_eq!(print_algebra(&back), text);
                prop_assert_eq!(back, h);
            }
        }
    }
}
