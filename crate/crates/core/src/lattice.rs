//! Finite posets, inf-semilattices and Heyting algebras.
//!
//! Elements are opaque ids `0..n`. The order is stored as a dense matrix and
//! all operation tables are computed once at construction, so every later
//! query is a table lookup.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::report::{ValidationReport, Witness};

pub type Elem = u32;

/// Largest carrier accepted for a dense order matrix.
pub const MAX_ELEMENTS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    leq: Vec<bool>,
}

impl FinitePoset {
    /// Builds a relation from explicit pairs; no closure is taken.
    pub fn from_relation(names: Vec<String>, pairs: &[(Elem, Elem)]) -> Result<Self> {
        let n = names.len();
        if n > MAX_ELEMENTS {
            return Err(Error::Invalid(format!("{n} elements exceeds the dense limit {MAX_ELEMENTS}")));
        }
        let mut leq = vec![false; n * n];
        for &(a, b) in pairs {
            let (a, b) = (a as usize, b as usize);
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("pair ({a},{b}) out of range")));
            }
            leq[a * n + b] = true;
        }
        Ok(FinitePoset { names, leq })
    }

    /// Reflexive-transitive closure of the given pairs.
    pub fn from_generating_pairs(names: Vec<String>, pairs: &[(Elem, Elem)]) -> Result<Self> {
        let mut p = Self::from_relation(names, pairs)?;
        let n = p.len();
        for i in 0..n {
            p.leq[i * n + i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if p.leq[i * n + k] {
                    for j in 0..n {
                        if p.leq[k * n + j] {
                            p.leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: Elem) -> &str {
        &self.names[x as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| i as Elem)
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.leq[x as usize * self.len() + y as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        0..self.len() as Elem
    }

    /// Covering pairs `x ⋖ y`, in lexicographic element order.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for x in self.elements() {
            for y in self.elements() {
                if x == y || !self.leq(x, y) {
                    continue;
                }
                let between = self
                    .elements()
                    .any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y));
                if !between {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn greatest(&self, mut candidates: impl Iterator<Item = Elem>) -> Option<Elem> {
        let first = candidates.next()?;
        let cs: Vec<Elem> = std::iter::once(first).chain(candidates).collect();
        cs.iter().copied().find(|&m| cs.iter().all(|&c| self.leq(c, m)))
    }

    fn least(&self, candidates: impl Iterator<Item = Elem>) -> Option<Elem> {
        let cs: Vec<Elem> = candidates.collect();
        cs.iter().copied().find(|&m| cs.iter().all(|&c| self.leq(m, c)))
    }
}

/// Lists every reflexivity, antisymmetry and transitivity violation.
pub fn check_poset(p: &FinitePoset) -> ValidationReport {
    let mut r = ValidationReport::new("poset", "reflexive, antisymmetric, transitive");
    let n = p.len() as u64;
    r.domain("elements", n);
    for x in p.elements() {
        r.case(p.leq(x, x), || Witness::new().with("reflexivity", p.name(x)));
    }
    for x in p.elements() {
        for y in p.elements() {
            if x < y {
                r.case(!(p.leq(x, y) && p.leq(y, x)), || {
                    Witness::new().with("antisymmetry", format!("({},{})", p.name(x), p.name(y)))
                });
            }
            if !p.leq(x, y) {
                continue;
            }
            for z in p.elements() {
                if p.leq(y, z) {
                    r.case(p.leq(x, z), || {
                        Witness::new().with(
                            "transitivity",
                            format!("({},{},{})", p.name(x), p.name(y), p.name(z)),
                        )
                    });
                }
            }
        }
    }
    r
}

/// Raw operation tables, possibly supplied by hand and not yet validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeytingTables {
    pub top: Elem,
    pub bottom: Elem,
    pub meet: Vec<Elem>,
    pub join: Vec<Elem>,
    pub implies: Vec<Elem>,
}

/// Greatest `z` with `meet(z, x) ≤ y`, by exhaustive search.
pub fn residual(p: &FinitePoset, meet: &[Elem], x: Elem, y: Elem) -> Result<Elem> {
    let n = p.len();
    p.greatest(p.elements().filter(|&z| p.leq(meet[z as usize * n + x as usize], y)))
        .ok_or_else(|| Error::NotResiduated {
            x: p.name(x).to_string(),
            y: p.name(y).to_string(),
        })
}

impl HeytingTables {
    /// Derives every table from the order alone.
    pub fn derive(p: &FinitePoset) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::NotLattice("empty carrier".into()));
        }
        let top = p
            .greatest(p.elements())
            .ok_or_else(|| Error::NotLattice("no greatest element".into()))?;
        let bottom = p
            .least(p.elements())
            .ok_or_else(|| Error::NotLattice("no least element".into()))?;
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for x in p.elements() {
            for y in p.elements() {
                let lower = p.elements().filter(|&z| p.leq(z, x) && p.leq(z, y));
                meet[x as usize * n + y as usize] = p.greatest(lower).ok_or_else(|| {
                    Error::NotLattice(format!("no meet of {} and {}", p.name(x), p.name(y)))
                })?;
                let upper = p.elements().filter(|&z| p.leq(x, z) && p.leq(y, z));
                join[x as usize * n + y as usize] = p.least(upper).ok_or_else(|| {
                    Error::NotLattice(format!("no join of {} and {}", p.name(x), p.name(y)))
                })?;
            }
        }
        let mut implies = vec![0; n * n];
        for x in p.elements() {
            for y in p.elements() {
                implies[x as usize * n + y as usize] = residual(p, &meet, x, y)?;
            }
        }
        Ok(HeytingTables {
            top,
            bottom,
            meet,
            join,
            implies,
        })
    }
}

/// Validates tables against the order: bounds, glb/lub, and residuation.
pub fn check_heyting_tables(p: &FinitePoset, t: &HeytingTables) -> ValidationReport {
    let mut r = ValidationReport::new(
        "heyting-algebra",
        "meet/join are glb/lub; z ∧ x ≤ y ⇔ z ≤ (x ⟹ y)",
    );
    let n = p.len();
    r.domain("elements", n as u64);
    let bad = |t: &[Elem]| t.len() != n * n || t.iter().any(|&e| e as usize >= n);
    if bad(&t.meet) || bad(&t.join) || bad(&t.implies) || t.top as usize >= n || t.bottom as usize >= n {
        r.fail(Witness::new().with("tables", "wrong shape or out-of-range entry"));
        return r;
    }
    let at = |tab: &[Elem], x: Elem, y: Elem| tab[x as usize * n + y as usize];
    for x in p.elements() {
        r.case(p.leq(x, t.top), || Witness::new().with("top", p.name(x)));
        r.case(p.leq(t.bottom, x), || Witness::new().with("bottom", p.name(x)));
    }
    for x in p.elements() {
        for y in p.elements() {
            let m = at(&t.meet, x, y);
            let glb = p.leq(m, x)
                && p.leq(m, y)
                && p.elements().all(|z| !(p.leq(z, x) && p.leq(z, y)) || p.leq(z, m));
            r.case(glb, || Witness::new().with("meet", format!("({},{})", p.name(x), p.name(y))));
            let j = at(&t.join, x, y);
            let lub = p.leq(x, j)
                && p.leq(y, j)
                && p.elements().all(|z| !(p.leq(x, z) && p.leq(y, z)) || p.leq(j, z));
            r.case(lub, || Witness::new().with("join", format!("({},{})", p.name(x), p.name(y))));
            let imp = at(&t.implies, x, y);
            for z in p.elements() {
                let lhs = p.leq(at(&t.meet, z, x), y);
                let rhs = p.leq(z, imp);
                r.case(lhs == rhs, || {
                    Witness::new()
                        .with("residuation", "z ∧ x ≤ y ⇎ z ≤ x ⟹ y")
                        .with("x", p.name(x))
                        .with("y", p.name(y))
                        .with("z", p.name(z))
                });
            }
        }
    }
    r
}

/// A finite Heyting algebra with precomputed tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeytingAlgebra {
    name: String,
    poset: FinitePoset,
    tables: HeytingTables,
}

impl HeytingAlgebra {
    pub fn from_poset(name: &str, poset: FinitePoset) -> Result<Self> {
        let report = check_poset(&poset);
        if !report.passed() {
            return Err(Error::Invalid(format!("not a partial order: {report}")));
        }
        let tables = HeytingTables::derive(&poset)?;
        Ok(HeytingAlgebra {
            name: name.to_string(),
            poset,
            tables,
        })
    }

    /// Builds from explicit tables; fails with the first witness if they are
    /// not a Heyting structure on `poset`.
    pub fn from_tables(name: &str, poset: FinitePoset, tables: HeytingTables) -> Result<Self> {
        let pr = check_poset(&poset);
        if !pr.passed() {
            return Err(Error::Invalid(format!("not a partial order: {pr}")));
        }
        let report = check_heyting_tables(&poset, &tables);
        if let Some(w) = report.first_witness() {
            let get = |k: &str| {
                w.0.iter()
                    .find(|(key, _)| key == k)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default()
            };
            if w.0.iter().any(|(k, _)| k == "residuation") {
                return Err(Error::NotResiduated { x: get("x"), y: get("y") });
            }
            return Err(Error::NotLattice(w.to_string()));
        }
        Ok(HeytingAlgebra {
            name: name.to_string(),
            poset,
            tables,
        })
    }

    /// The `n`-element chain `0 < … < 1`; the middle of the 3-chain is `m`.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1, "a chain needs at least one element");
        let names: Vec<String> = match n {
            1 => vec!["0".into()],
            2 => vec!["0".into(), "1".into()],
            3 => vec!["0".into(), "m".into(), "1".into()],
            _ => std::iter::once("0".to_string())
                .chain((1..n - 1).map(|i| format!("m{i}")))
                .chain(std::iter::once("1".to_string()))
                .collect(),
        };
        let pairs: Vec<(Elem, Elem)> = (1..n as Elem).map(|i| (i - 1, i)).collect();
        let p = FinitePoset::from_generating_pairs(names, &pairs).expect("chain");
        Self::from_poset(&format!("chain{n}"), p).expect("chains are Heyting")
    }

    /// The four-element Boolean algebra `{0, u, v, 1}`.
    pub fn diamond() -> Self {
        let names = ["0", "u", "v", "1"].map(String::from).to_vec();
        let p = FinitePoset::from_generating_pairs(names, &[(0, 1), (0, 2), (1, 3), (2, 3)])
            .expect("diamond");
        Self::from_poset("diamond", p).expect("B4 is Heyting")
    }

    /// Looks up a builtin algebra by name: `chain<N>` or `diamond`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "diamond" | "b4" => Some(Self::diamond()),
            _ => name
                .strip_prefix("chain")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| (1..=64).contains(&n))
                .map(Self::chain),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn tables(&self) -> &HeytingTables {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.poset.elements()
    }

    pub fn elem_name(&self, x: Elem) -> &str {
        self.poset.name(x)
    }

    #[inline]
    fn at(&self, t: &[Elem], x: Elem, y: Elem) -> Elem {
        t[x as usize * self.len() + y as usize]
    }

    #[inline]
    pub fn top(&self) -> Elem {
        self.tables.top
    }

    #[inline]
    pub fn bottom(&self) -> Elem {
        self.tables.bottom
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.poset.leq(x, y)
    }

    #[inline]
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.at(&self.tables.meet, x, y)
    }

    #[inline]
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.at(&self.tables.join, x, y)
    }

    #[inline]
    pub fn implies(&self, x: Elem, y: Elem) -> Elem {
        self.at(&self.tables.implies, x, y)
    }

    #[inline]
    pub fn iff(&self, x: Elem, y: Elem) -> Elem {
        self.meet(self.implies(x, y), self.implies(y, x))
    }

    pub fn neg(&self, x: Elem) -> Elem {
        self.implies(x, self.bottom())
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.top(), |a, b| self.meet(a, b))
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.bottom(), |a, b| self.join(a, b))
    }

    /// The complement of `x`, if one exists (`x ∧ c = 0`, `x ∨ c = 1`).
    pub fn complement(&self, x: Elem) -> Option<Elem> {
        self.elements()
            .find(|&c| self.meet(x, c) == self.bottom() && self.join(x, c) == self.top())
    }

    pub fn is_boolean(&self) -> bool {
        self.elements().all(|x| self.complement(x).is_some())
    }

    pub fn inf_semilattice(&self) -> InfSemilattice {
        InfSemilattice {
            poset: self.poset.clone(),
            top: self.top(),
            meet: self.tables.meet.clone(),
        }
    }
}

impl fmt::Display for HeytingAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name, self.poset.names().join(","))
    }
}

/// Greatest `z` with `z ∧ x ≤ y`, searched over the carrier rather than read
/// from the table; fails on structures that are not residuated.
pub fn heyting_implication(h: &HeytingAlgebra, x: Elem, y: Elem) -> Result<Elem> {
    residual(h.poset(), &h.tables().meet, x, y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfSemilattice {
    pub poset: FinitePoset,
    pub top: Elem,
    pub meet: Vec<Elem>,
}

impl InfSemilattice {
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x as usize * self.poset.len() + y as usize]
    }
}

/// Which structure a [`LatticeHom`] is expected to preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomKind {
    Meet,
    Heyting,
}

#[derive(Debug, Clone)]
pub struct LatticeHom {
    pub source: Arc<HeytingAlgebra>,
    pub target: Arc<HeytingAlgebra>,
    pub map: Vec<Elem>,
}

impl LatticeHom {
    pub fn new(source: Arc<HeytingAlgebra>, target: Arc<HeytingAlgebra>, map: Vec<Elem>) -> Result<Self> {
        if map.len() != source.len() || map.iter().any(|&e| e as usize >= target.len()) {
            return Err(Error::DomainMismatch("map does not match source/target carriers".into()));
        }
        Ok(LatticeHom { source, target, map })
    }

    pub fn identity(h: Arc<HeytingAlgebra>) -> Self {
        let map = h.elements().collect();
        LatticeHom {
            source: h.clone(),
            target: h,
            map,
        }
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x as usize]
    }

    pub fn is_monotone(&self) -> std::result::Result<(), (Elem, Elem)> {
        for a in self.source.elements() {
            for b in self.source.elements() {
                if self.source.leq(a, b) && !self.target.leq(self.apply(a), self.apply(b)) {
                    return Err((a, b));
                }
            }
        }
        Ok(())
    }

    fn require_monotone(&self) -> Result<()> {
        self.is_monotone().map_err(|(a, b)| Error::NotMonotone {
            a: self.source.elem_name(a).to_string(),
            b: self.source.elem_name(b).to_string(),
        })
    }
}

/// Reports every instance of an operation the map fails to preserve.
pub fn check_hom(f: &LatticeHom, kind: HomKind) -> ValidationReport {
    let name = match kind {
        HomKind::Meet => "inf-semilattice-hom",
        HomKind::Heyting => "heyting-hom",
    };
    let mut r = ValidationReport::new(name, "f preserves ⊤, ∧ (and ⊥, ∨, ⟹ for Heyting)");
    let (s, t) = (&f.source, &f.target);
    r.domain("pairs", (s.len() * s.len()) as u64);
    let nm = |x: Elem| s.elem_name(x).to_string();
    r.case(f.apply(s.top()) == t.top(), || Witness::new().with("op", "top"));
    if kind == HomKind::Heyting {
        r.case(f.apply(s.bottom()) == t.bottom(), || Witness::new().with("op", "bottom"));
    }
    for x in s.elements() {
        for y in s.elements() {
            let (fx, fy) = (f.apply(x), f.apply(y));
            r.case(f.apply(s.meet(x, y)) == t.meet(fx, fy), || {
                Witness::new().with("op", "meet").with("x", nm(x)).with("y", nm(y))
            });
            if kind == HomKind::Heyting {
                r.case(f.apply(s.join(x, y)) == t.join(fx, fy), || {
                    Witness::new().with("op", "join").with("x", nm(x)).with("y", nm(y))
                });
                r.case(f.apply(s.implies(x, y)) == t.implies(fx, fy), || {
                    Witness::new().with("op", "implies").with("x", nm(x)).with("y", nm(y))
                });
            }
        }
    }
    r
}

/// Left adjoint of a monotone map given on indices.
///
/// `f[b]` is the index in the target of the image of source element `b`.
/// Returns `g` with `g[a]` the least `b` such that `a ≤ f(b)`; the error
/// carries the first target index whose candidate set has no least element.
pub fn left_adjoint_indices(
    f: &[usize],
    target_len: usize,
    leq_source: impl Fn(usize, usize) -> bool,
    leq_target: impl Fn(usize, usize) -> bool,
) -> std::result::Result<Vec<usize>, usize> {
    (0..target_len)
        .map(|a| {
            let cands: Vec<usize> = (0..f.len()).filter(|&b| leq_target(a, f[b])).collect();
            cands
                .iter()
                .copied()
                .find(|&m| cands.iter().all(|&c| leq_source(m, c)))
                .ok_or(a)
        })
        .collect()
}

/// Dual of [`left_adjoint_indices`]: `g[a]` is the greatest `b` with `f(b) ≤ a`.
pub fn right_adjoint_indices(
    f: &[usize],
    target_len: usize,
    leq_source: impl Fn(usize, usize) -> bool,
    leq_target: impl Fn(usize, usize) -> bool,
) -> std::result::Result<Vec<usize>, usize> {
    (0..target_len)
        .map(|a| {
            let cands: Vec<usize> = (0..f.len()).filter(|&b| leq_target(f[b], a)).collect();
            cands
                .iter()
                .copied()
                .find(|&m| cands.iter().all(|&c| leq_source(c, m)))
                .ok_or(a)
        })
        .collect()
}

/// A monotone map between carriers, as returned by the adjoint finders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap(pub Vec<Elem>);

impl MonotoneMap {
    pub fn apply(&self, x: Elem) -> Elem {
        self.0[x as usize]
    }
}

pub fn left_adjoint_of(f: &LatticeHom) -> Result<MonotoneMap> {
    f.require_monotone()?;
    let idx: Vec<usize> = f.map.iter().map(|&e| e as usize).collect();
    let (s, t) = (&f.source, &f.target);
    left_adjoint_indices(&idx, t.len(), |a, b| s.leq(a as Elem, b as Elem), |a, b| {
        t.leq(a as Elem, b as Elem)
    })
    .map(|g| MonotoneMap(g.into_iter().map(|e| e as Elem).collect()))
    .map_err(|a| Error::NoAdjoint {
        element: t.elem_name(a as Elem).to_string(),
    })
}

pub fn right_adjoint_of(f: &LatticeHom) -> Result<MonotoneMap> {
    f.require_monotone()?;
    let idx: Vec<usize> = f.map.iter().map(|&e| e as usize).collect();
    let (s, t) = (&f.source, &f.target);
    right_adjoint_indices(&idx, t.len(), |a, b| s.leq(a as Elem, b as Elem), |a, b| {
        t.leq(a as Elem, b as Elem)
    })
    .map(|g| MonotoneMap(g.into_iter().map(|e| e as Elem).collect()))
    .map_err(|a| Error::NoAdjoint {
        element: t.elem_name(a as Elem).to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    /// Brute-force residual, independent of the table construction.
    fn oracle_implies(h: &HeytingAlgebra, x: Elem, y: Elem) -> Elem {
        let cands: Vec<Elem> = h
            .elements()
            .filter(|&z| {
                // z ∧ x as the glb, by search
                let glb = h
                    .elements()
                    .filter(|&w| h.leq(w, z) && h.leq(w, x))
                    .find(|&w| h.elements().all(|v| !(h.leq(v, z) && h.leq(v, x)) || h.leq(v, w)))
                    .unwrap();
                h.leq(glb, y)
            })
            .collect();
        *cands
            .iter()
            .find(|&&m| cands.iter().all(|&c| h.leq(c, m)))
            .unwrap()
    }

    #[test]
    fn two_chain_is_a_valid_poset() {
        let p = FinitePoset::from_generating_pairs(names(&["0", "1"]), &[(0, 1)]).unwrap();
        assert!(check_poset(&p).passed());
    }

    #[test]
    fn antisymmetry_violation_is_reported_at_the_pair() {
        let p = FinitePoset::from_relation(names(&["0", "1"]), &[(0, 0), (1, 1), (0, 1), (1, 0)])
            .unwrap();
        let r = check_poset(&p);
        assert!(!r.passed());
        assert_eq!(r.witnesses[0].to_string(), "(antisymmetry=(0,1))");
    }

    #[test]
    fn diamond_is_a_valid_poset() {
        assert!(check_poset(HeytingAlgebra::diamond().poset()).passed());
    }

    #[test]
    fn implication_examples() {
        let c2 = HeytingAlgebra::chain(2);
        for x in c2.elements() {
            assert_eq!(heyting_implication(&c2, x, x).unwrap(), c2.top());
        }
        let c3 = HeytingAlgebra::chain(3);
        let (m, one) = (1, 2);
        assert_eq!(oracle_implies(&c3, one, m), m);
        assert_eq!(heyting_implication(&c3, one, m).unwrap(), m);
        let b4 = HeytingAlgebra::diamond();
        let (zero, u, v) = (0, 1, 2);
        assert_eq!(oracle_implies(&b4, u, zero), v);
        assert_eq!(heyting_implication(&b4, u, zero).unwrap(), v);
    }

    #[test]
    fn tables_agree_with_brute_force_residual() {
        for h in [HeytingAlgebra::chain(2), HeytingAlgebra::chain(3), HeytingAlgebra::chain(5), HeytingAlgebra::diamond()] {
            for x in h.elements() {
                for y in h.elements() {
                    assert_eq!(h.implies(x, y), oracle_implies(&h, x, y));
                    // modus ponens
                    assert!(h.leq(h.meet(x, h.implies(x, y)), y));
                }
            }
        }
    }

    #[test]
    fn boolean_implication_is_complement_join() {
        let b4 = HeytingAlgebra::diamond();
        assert!(b4.is_boolean());
        for x in b4.elements() {
            let c = b4.complement(x).unwrap();
            for y in b4.elements() {
                assert_eq!(b4.implies(x, y), b4.join(c, y));
            }
        }
        assert!(!HeytingAlgebra::chain(3).is_boolean());
    }

    #[test]
    fn corrupted_implication_table_is_rejected_with_witness() {
        let b4 = HeytingAlgebra::diamond();
        let mut t = b4.tables().clone();
        // u ⟹ 0 should be v
        t.implies[4] = 0;
        let report = check_heyting_tables(b4.poset(), &t);
        assert!(!report.passed());
        let err = HeytingAlgebra::from_tables("bad", b4.poset().clone(), t).unwrap_err();
        assert!(matches!(err, Error::NotResiduated { .. }), "{err:?}");
    }

    #[test]
    fn non_lattice_poset_is_rejected() {
        // two incomparable maximal elements
        let p = FinitePoset::from_generating_pairs(names(&["0", "a", "b"]), &[(0, 1), (0, 2)]).unwrap();
        assert!(matches!(HeytingAlgebra::from_poset("v", p), Err(Error::NotLattice(_))));
    }

    #[test]
    fn non_distributive_lattice_is_not_residuated() {
        // M3: 0 < a,b,c < 1
        let p = FinitePoset::from_generating_pairs(
            names(&["0", "a", "b", "c", "1"]),
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .unwrap();
        assert!(matches!(HeytingAlgebra::from_poset("m3", p), Err(Error::NotResiduated { .. })));
    }

    fn hom(s: &HeytingAlgebra, t: &HeytingAlgebra, map: Vec<Elem>) -> LatticeHom {
        LatticeHom::new(Arc::new(s.clone()), Arc::new(t.clone()), map).unwrap()
    }

    #[test]
    fn adjoints_of_identity() {
        let c2 = Arc::new(HeytingAlgebra::chain(2));
        let id = LatticeHom::identity(c2);
        assert_eq!(left_adjoint_of(&id).unwrap(), MonotoneMap(vec![0, 1]));
        assert_eq!(right_adjoint_of(&id).unwrap(), MonotoneMap(vec![0, 1]));
    }

    #[test]
    fn adjoints_of_chain_inclusion() {
        let f = hom(&HeytingAlgebra::chain(2), &HeytingAlgebra::chain(3), vec![0, 2]);
        // least b with a ≤ f(b): 0↦0, m↦1, 1↦1
        assert_eq!(left_adjoint_of(&f).unwrap(), MonotoneMap(vec![0, 1, 1]));
        // greatest b with f(b) ≤ a: 0↦0, m↦0, 1↦1
        assert_eq!(right_adjoint_of(&f).unwrap(), MonotoneMap(vec![0, 0, 1]));
    }

    #[test]
    fn constant_top_has_bottom_left_adjoint() {
        // {b : a ≤ ⊤} is everything, so the least is 0 for every a.
        let c2 = HeytingAlgebra::chain(2);
        let f = hom(&c2, &c2, vec![1, 1]);
        assert_eq!(left_adjoint_of(&f).unwrap(), MonotoneMap(vec![0, 0]));
        // {b : ⊤ ≤ a} is empty at a = 0: no right adjoint.
        assert!(matches!(right_adjoint_of(&f), Err(Error::NoAdjoint { element }) if element == "0"));
    }

    #[test]
    fn non_monotone_map_is_rejected() {
        let c2 = HeytingAlgebra::chain(2);
        let f = hom(&c2, &c2, vec![1, 0]);
        assert!(matches!(right_adjoint_of(&f), Err(Error::NotMonotone { .. })));
        assert!(matches!(left_adjoint_of(&f), Err(Error::NotMonotone { .. })));
    }

    #[test]
    fn hom_checks() {
        let b4 = HeytingAlgebra::diamond();
        assert!(check_hom(&LatticeHom::identity(Arc::new(b4.clone())), HomKind::Heyting).passed());
        let c2 = HeytingAlgebra::chain(2);
        let r = check_hom(&hom(&c2, &c2, vec![0, 0]), HomKind::Meet);
        assert!(!r.passed());
        assert_eq!(r.witnesses[0].to_string(), "(op=top)");
        // u, v ↦ 0 keeps ∧ and ⊤ but f(u ∨ v) = 1 ≠ f(u) ∨ f(v) = 0
        let f = hom(&b4, &b4, vec![0, 0, 0, 3]);
        assert!(check_hom(&f, HomKind::Meet).passed());
        let hr = check_hom(&f, HomKind::Heyting);
        assert!(!hr.passed());
        assert!(hr.witnesses.iter().any(|w| w.0[0].1 == "join"));
    }

    #[test]
    fn adjunction_inequalities_hold_exhaustively() {
        let b4 = HeytingAlgebra::diamond();
        let c3 = HeytingAlgebra::chain(3);
        // every meet-preserving map c3 -> b4 that has adjoints
        for a in b4.elements() {
            for b in b4.elements() {
                let f = hom(&c3, &b4, vec![b4.bottom(), a, b]);
                if f.is_monotone().is_err() {
                    continue;
                }
                if let Ok(g) = left_adjoint_of(&f) {
                    for x in b4.elements() {
                        assert!(b4.leq(x, f.apply(g.apply(x))));
                    }
                    for y in c3.elements() {
                        assert!(c3.leq(g.apply(f.apply(y)), y));
                    }
                }
            }
        }
    }
}
