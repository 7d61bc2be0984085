//! The subobject doctrine of a constructed category and the fiberwise
//! isomorphism check against a doctrine on the same base.
//!
//! A subobject of `A` is stored as a one-cell formula holding the index of its
//! class in the canonical list for `A`. The list contains the comprehensions of
//! every formula of the originating doctrine and every mono into `A` from the
//! registered objects, deduplicated up to mutual factorization and kept in
//! first-seen order. Order, meets, reindexing and images are all computed
//! from factorizations, never from the originating doctrine's formulas.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;

use crate::category::{is_mono, Budget, Category, Formula, Mor, Obj, Product};
use crate::doctrine::Doctrine;
use crate::error::{Error, Result};
use crate::report::{ValidationReport, Witness};

struct Classes {
    reps: Vec<Mor>,
    /// `leq[i][j]`: class `i` factors through class `j`.
    leq: Vec<Vec<bool>>,
}

pub struct SubobjectDoctrine {
    origin: Arc<dyn Doctrine>,
    objects: Vec<Obj>,
    budget: Budget,
    classes: Mutex<HashMap<Obj, Arc<Classes>>>,
    error: Mutex<Option<Error>>,
}

/// Whether `m` factors through `n`.
fn factors(c: &dyn Category, m: &Mor, n: &Mor, budget: &Budget) -> Result<bool> {
    for h in c.hom(&m.dom, &n.dom, budget)? {
        if c.mor_equal(&c.compose(n, &h)?, m) {
            return Ok(true);
        }
    }
    Ok(false)
}

impl SubobjectDoctrine {
    /// `objects` are the registered objects whose monos populate the fibers
    /// and against which monos are tested by left cancellation.
    pub fn new(origin: Arc<dyn Doctrine>, objects: Vec<Obj>, budget: Budget) -> Self {
        SubobjectDoctrine {
            origin,
            objects,
            budget,
            classes: Mutex::new(HashMap::new()),
            error: Mutex::new(None),
        }
    }

    fn cat(&self) -> &dyn Category {
        self.origin.as_ref()
    }

    fn classes(&self, a: &Obj) -> Result<Arc<Classes>> {
        if let Some(c) = self.classes.lock().get(a) {
            return Ok(c.clone());
        }
        // after a swallowed error every further answer is a placeholder anyway
        if let Some(e) = self.error.lock().as_ref() {
            return Err(e.clone());
        }
        let c = self.cat();
        let b = &self.budget;
        let mut candidates = Vec::new();
        for alpha in self.origin.fiber(a, b)? {
            candidates.push(self.origin.comprehension(a, &alpha)?);
        }
        for x in &self.objects {
            candidates.extend(c.hom(x, a, b)?);
        }
        let mut reps: Vec<Mor> = Vec::new();
        for m in candidates {
            if !is_mono(c, &m, &self.objects, b)? {
                continue;
            }
            let mut seen = false;
            for r in &reps {
                if factors(c, &m, r, b)? && factors(c, r, &m, b)? {
                    seen = true;
                    break;
                }
            }
            if !seen {
                reps.push(m);
            }
        }
        let mut leq = vec![vec![false; reps.len()]; reps.len()];
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                leq[i][j] = i == j || factors(c, &reps[i], &reps[j], b)?;
            }
        }
        let out = Arc::new(Classes { reps, leq });
        self.classes.lock().insert(a.clone(), out.clone());
        Ok(out)
    }

    /// Keeps the first error for [`Doctrine::take_error`] and returns `fallback`.
    fn swallow<T>(&self, r: Result<T>, fallback: impl FnOnce() -> T) -> T {
        r.unwrap_or_else(|e| {
            self.error.lock().get_or_insert(e);
            fallback()
        })
    }

    /// Classes of `a`; on failure the one-class fiber of the identity.
    fn expect_classes(&self, a: &Obj) -> Arc<Classes> {
        self.swallow(self.classes(a), || {
            Arc::new(Classes {
                reps: vec![self.identity(a)],
                leq: vec![vec![true]],
            })
        })
    }

    fn rep<'c>(cl: &'c Classes, x: &Formula) -> &'c Mor {
        cl.reps.get(Self::idx(x)).unwrap_or(&cl.reps[0])
    }

    fn idx(x: &Formula) -> usize {
        x.at(0) as usize
    }

    fn point(i: usize) -> Formula {
        Formula::new(vec![i as u32])
    }

    /// The representative mono of a subobject.
    pub fn representative(&self, a: &Obj, x: &Formula) -> Result<Mor> {
        let cl = self.classes(a)?;
        cl.reps
            .get(Self::idx(x))
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("no subobject {x} of {a}")))
    }

    /// The subobject represented by a mono into `a`.
    pub fn class_of(&self, a: &Obj, m: &Mor) -> Result<Formula> {
        let cl = self.classes(a)?;
        for (i, r) in cl.reps.iter().enumerate() {
            if factors(self.cat(), m, r, &self.budget)? && factors(self.cat(), r, m, &self.budget)? {
                return Ok(Self::point(i));
            }
        }
        Err(Error::Invalid(format!("{m} is not among the enumerated subobjects of {a}")))
    }

    /// `α ↦ [⌊α⌋]`.
    pub fn candidate(&self, a: &Obj, alpha: &Formula) -> Result<Formula> {
        self.class_of(a, &self.origin.comprehension(a, alpha)?)
    }

    /// Greatest class satisfying `pred`, or least when `least` is set.
    fn extreme(&self, cl: &Classes, pred: impl Fn(usize) -> bool, least: bool) -> Option<usize> {
        let ok: Vec<usize> = (0..cl.reps.len()).filter(|&i| pred(i)).collect();
        ok.iter()
            .copied()
            .find(|&i| ok.iter().all(|&j| if least { cl.leq[i][j] } else { cl.leq[j][i] }))
    }
}

impl Category for SubobjectDoctrine {
    fn name(&self) -> String {
        format!("sub({})", self.origin.name())
    }
    fn identity(&self, a: &Obj) -> Mor {
        self.origin.identity(a)
    }
    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        self.origin.compose(g, f)
    }
    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        self.origin.mor_equal(f, g)
    }
    fn mor_key(&self, f: &Mor) -> Mor {
        self.origin.mor_key(f)
    }
    fn product(&self, a: &Obj, b: &Obj) -> Product {
        self.origin.product(a, b)
    }
    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        self.origin.pair(f, g)
    }
    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        self.origin.hom(a, b, budget)
    }
    fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        self.origin.equalizer(f, g)
    }
}

impl Doctrine for SubobjectDoctrine {
    fn top(&self, a: &Obj) -> Formula {
        self.swallow(self.class_of(a, &self.identity(a)), || Self::point(0))
    }

    fn meet(&self, a: &Obj, x: &Formula, y: &Formula) -> Formula {
        let cl = self.expect_classes(a);
        let n = cl.reps.len();
        let (i, j) = (Self::idx(x).min(n - 1), Self::idx(y).min(n - 1));
        let k = self.extreme(&cl, |k| cl.leq[k][i] && cl.leq[k][j], false).unwrap_or(0);
        Self::point(k)
    }

    fn leq(&self, a: &Obj, x: &Formula, y: &Formula) -> bool {
        let cl = self.expect_classes(a);
        let n = cl.reps.len();
        cl.leq[Self::idx(x).min(n - 1)][Self::idx(y).min(n - 1)]
    }

    fn fiber(&self, a: &Obj, _budget: &Budget) -> Result<Vec<Formula>> {
        Ok((0..self.classes(a)?.reps.len()).map(Self::point).collect())
    }

    fn contains(&self, a: &Obj, x: &Formula) -> bool {
        x.len() == 1 && Self::idx(x) < self.expect_classes(a).reps.len()
    }

    /// Largest `k` with `f ∘ k ≤ m`.
    fn reindex(&self, f: &Mor, x: &Formula) -> Formula {
        let (src, tgt) = (self.expect_classes(&f.dom), self.expect_classes(&f.cod));
        let m = Self::rep(&tgt, x);
        let fits: Vec<bool> = src
            .reps
            .iter()
            .map(|k| {
                let fk = self.compose(f, k).and_then(|fk| factors(self.cat(), &fk, m, &self.budget));
                self.swallow(fk, || false)
            })
            .collect();
        Self::point(self.extreme(&src, |k| fits[k], false).unwrap_or(0))
    }

    /// Least `k` with `f ∘ m ≤ k`.
    fn exists(&self, f: &Mor, x: &Formula) -> Formula {
        let (src, tgt) = (self.expect_classes(&f.dom), self.expect_classes(&f.cod));
        let fm = self.compose(f, Self::rep(&src, x));
        let fits: Vec<bool> = tgt
            .reps
            .iter()
            .map(|k| {
                let ok = fm.as_ref().map_err(Clone::clone).and_then(|fm| factors(self.cat(), fm, k, &self.budget));
                self.swallow(ok, || false)
            })
            .collect();
        Self::point(self.extreme(&tgt, |k| fits[k], true).unwrap_or(0))
    }

    fn take_error(&self) -> Option<Error> {
        self.error.lock().take()
    }

    fn show_formula(&self, a: &Obj, x: &Formula) -> String {
        match self.representative(a, x) {
            Ok(m) => format!("[{} ↣ {a}]", m.dom),
            Err(_) => format!("{x}"),
        }
    }
}

/// Fiberwise order-isomorphism `φ_A: P(A) → E(A)` given by `candidate`,
/// natural in `A` and commuting with `∃`, over the morphisms among `objs`.
pub fn doctrine_isomorphism_check(
    d: &dyn Doctrine,
    e: &dyn Doctrine,
    candidate: &dyn Fn(&Obj, &Formula) -> Result<Formula>,
    objs: &[Obj],
    budget: &Budget,
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(
        "doctrine-isomorphism",
        "φ_A order-isomorphism; f*φ_B = φ_A f*; ∃f φ_A = φ_B ∃f",
    );
    let mut maps: HashMap<Obj, (Vec<Formula>, Vec<Formula>)> = HashMap::new();
    for a in objs {
        let src = d.fiber(a, budget)?;
        let tgt = e.fiber(a, budget)?;
        if !r.case(src.len() == tgt.len(), || {
            Witness::new().with("A", a).with("fiber cardinality", format!("{} vs {}", src.len(), tgt.len()))
        }) {
            continue;
        }
        let img: Vec<Formula> = src.iter().map(|x| candidate(a, x)).collect::<Result<_>>()?;
        r.domain("formulas", src.len() as u64);
        for y in &tgt {
            r.case(img.iter().any(|x| x == y), || {
                Witness::new().with("A", a).with("missed", e.show_formula(a, y))
            });
        }
        for (i, x) in src.iter().enumerate() {
            for (j, y) in src.iter().enumerate() {
                let before = d.leq(a, x, y);
                let after = e.leq(a, &img[i], &img[j]);
                r.case(before == after, || {
                    Witness::new()
                        .with("A", a)
                        .with("x", d.show_formula(a, x))
                        .with("y", d.show_formula(a, y))
                        .with("law", "order")
                });
            }
        }
        maps.insert(a.clone(), (src, img));
    }
    for a in objs {
        for b in objs {
            let (Some((sa, ia)), Some((sb, ib))) = (maps.get(a), maps.get(b)) else {
                continue;
            };
            let find = |src: &[Formula], img: &[Formula], x: &Formula| -> Option<Formula> {
                src.iter().position(|s| s == x).map(|i| img[i].clone())
            };
            for f in d.hom(a, b, budget)? {
                for (y, iy) in sb.iter().zip(ib) {
                    let lhs = find(sa, ia, &d.reindex(&f, y));
                    let rhs = e.reindex(&f, iy);
                    r.case(lhs.as_ref() == Some(&rhs), || {
                        Witness::new().with("f", &f).with("beta", d.show_formula(b, y)).with("law", "naturality")
                    });
                }
                for (x, ix) in sa.iter().zip(ia) {
                    let lhs = find(sb, ib, &d.exists(&f, x));
                    let rhs = e.exists(&f, ix);
                    r.case(lhs.as_ref() == Some(&rhs), || {
                        Witness::new().with("f", &f).with("alpha", d.show_formula(a, x)).with("law", "∃")
                    });
                }
            }
        }
    }
    if let Some(err) = d.take_error().or_else(|| e.take_error()) {
        return Err(err);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::HeytingAlgebra;
    use crate::models::{HValuedTripos, SubsetTripos};

    fn sets(ns: &[usize]) -> Vec<Obj> {
        ns.iter().map(|&n| Obj::finite(n)).collect()
    }

    #[test]
    fn subobjects_of_a_finite_set() {
        let d: Arc<dyn Doctrine> = Arc::new(SubsetTripos::new());
        let sub = SubobjectDoctrine::new(d, sets(&[1, 2]), Budget::default());
        assert_eq!(sub.fiber(&Obj::finite(2), &Budget::default()).unwrap().len(), 4);
    }

    #[test]
    fn pullback_is_preimage() {
        let d: Arc<dyn Doctrine> = Arc::new(SubsetTripos::new());
        let sub = SubobjectDoctrine::new(d.clone(), sets(&[1, 2, 3]), Budget::default());
        let (two, three) = (Obj::finite(2), Obj::finite(3));
        let f = Mor::fun(three.clone(), two.clone(), vec![0, 1, 0]);
        let a = Formula::new(vec![1, 0]);
        let pulled = sub.reindex(&f, &sub.candidate(&two, &a).unwrap());
        assert_eq!(pulled, sub.candidate(&three, &d.reindex(&f, &a)).unwrap());
    }

    #[test]
    fn subset_tripos_is_its_subobject_doctrine() {
        let d: Arc<dyn Doctrine> = Arc::new(SubsetTripos::new());
        let objs = sets(&[1, 2, 3]);
        let sub = SubobjectDoctrine::new(d.clone(), objs.clone(), Budget::default());
        let r = doctrine_isomorphism_check(d.as_ref(), &sub, &|a, x| sub.candidate(a, x), &objs, &Budget::default())
            .unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn boolean_and_three_valued_fibers_differ() {
        let d = SubsetTripos::new();
        let e = HValuedTripos::new(HeytingAlgebra::chain(3));
        let r = doctrine_isomorphism_check(&d, &e, &|_, x| Ok(x.clone()), &sets(&[1]), &Budget::default()).unwrap();
        assert!(!r.passed());
        assert!(r.first_witness().unwrap().0.iter().any(|(k, _)| k == "fiber cardinality"));
    }
}
