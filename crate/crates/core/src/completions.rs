//! The free completions `c` (comprehensions), `q` (quotients), `e`
//! (extensional collapse) and `l` (cauchy completion), their units, the
//! extension of morphisms into complete targets, and the composite pipeline.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use parking_lot::Mutex;

use crate::category::{
    check_composable, check_pairable, factor_after, factor_through, find_inverse, times, Arrow, Budget, Category,
    Formula, Mor, Obj, ObjKind, Product,
};
use crate::doctrine::{
    compose_relations, equality_predicate, extensional_equivalence, formula_eq, is_functional, triple,
    Doctrine,
};
use crate::error::{Error, Result};
use crate::morphism::DoctrineMorphism;
use crate::per::PerView;

/// Which free construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    C,
    Q,
    E,
    L,
}

impl Kind {
    pub const PIPELINE: [Kind; 4] = [Kind::C, Kind::Q, Kind::E, Kind::L];

    pub fn key(self) -> &'static str {
        match self {
            Kind::C => "c",
            Kind::Q => "q",
            Kind::E => "e",
            Kind::L => "l",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "c" => Some(Kind::C),
            "q" => Some(Kind::Q),
            "e" => Some(Kind::E),
            "l" => Some(Kind::L),
            _ => None,
        }
    }

    /// Wraps `inner` in this completion.
    pub fn complete(self, inner: Arc<dyn Doctrine>) -> Arc<dyn Doctrine> {
        match self {
            Kind::C => Arc::new(ComprehensionCompletion::new(inner)),
            Kind::Q => Arc::new(QuotientCompletion::new(inner)),
            Kind::E => Arc::new(ExtensionalCollapse::new(inner)),
            Kind::L => Arc::new(CauchyCompletion::new(inner)),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Default)]
struct ProductCache(Mutex<HashMap<(Obj, Obj), Product>>);

impl ProductCache {
    fn get_or(&self, a: &Obj, b: &Obj, make: impl FnOnce() -> Product) -> Product {
        let key = (a.clone(), b.clone());
        if let Some(p) = self.0.lock().get(&key) {
            return p.clone();
        }
        let p = make();
        self.0.lock().insert(key, p.clone());
        p
    }
}

#[derive(Default)]
struct FormulaCache(Mutex<HashMap<Obj, Formula>>);

impl FormulaCache {
    fn get_or(&self, a: &Obj, make: impl FnOnce() -> Result<Formula>) -> Result<Formula> {
        if let Some(x) = self.0.lock().get(a) {
            return Ok(x.clone());
        }
        let x = make()?;
        self.0.lock().insert(a.clone(), x.clone());
        Ok(x)
    }
}

fn compr_parts(a: &Obj) -> (&Obj, &Formula) {
    match a.kind() {
        ObjKind::Compr(b, alpha) => (b, alpha),
        _ => panic!("{a} is not an object of a comprehension completion"),
    }
}

fn quot_parts(a: &Obj) -> (&Obj, &Formula) {
    match a.kind() {
        ObjKind::Quot(b, rho) => (b, rho),
        _ => panic!("{a} is not an object of a quotient completion"),
    }
}

// ---------------------------------------------------------------------------
// c

/// Objects `(A, α)`; morphisms `f: A → B` with `α ≤ f*β`;
/// `P_c(A, α) = {φ ∈ P(A) | φ ≤ α}`.
pub struct ComprehensionCompletion {
    inner: Arc<dyn Doctrine>,
    products: ProductCache,
}

impl ComprehensionCompletion {
    pub fn new(inner: Arc<dyn Doctrine>) -> Self {
        ComprehensionCompletion {
            inner,
            products: ProductCache::default(),
        }
    }

    pub fn inner(&self) -> &Arc<dyn Doctrine> {
        &self.inner
    }

    pub fn object(a: &Obj, alpha: &Formula) -> Obj {
        Obj::new(ObjKind::Compr(a.clone(), alpha.clone()))
    }

    fn down(&self, f: &Mor) -> Mor {
        f.with_ends(compr_parts(&f.dom).0, compr_parts(&f.cod).0)
    }
}

impl Category for ComprehensionCompletion {
    fn name(&self) -> String {
        format!("{}·c", self.inner.name())
    }

    fn identity(&self, a: &Obj) -> Mor {
        self.inner.identity(compr_parts(a).0).with_ends(a, a)
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        check_composable(g, f)?;
        Ok(self.inner.compose(&self.down(g), &self.down(f))?.with_ends(&f.dom, &g.cod))
    }

    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        f.dom == g.dom && f.cod == g.cod && self.inner.mor_equal(&self.down(f), &self.down(g))
    }

    fn mor_key(&self, f: &Mor) -> Mor {
        self.inner.mor_key(&self.down(f)).with_ends(&f.dom, &f.cod)
    }

    fn product(&self, a: &Obj, b: &Obj) -> Product {
        self.products.get_or(a, b, || {
            let ((x, alpha), (y, beta)) = (compr_parts(a), compr_parts(b));
            let p = self.inner.product(x, y);
            let gamma = self.inner.meet(&p.obj, &self.inner.reindex(&p.p1, alpha), &self.inner.reindex(&p.p2, beta));
            let obj = Self::object(&p.obj, &gamma);
            Product {
                p1: p.p1.with_ends(&obj, a),
                p2: p.p2.with_ends(&obj, b),
                obj,
            }
        })
    }

    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        check_pairable(f, g)?;
        let m = self.inner.pair(&self.down(f), &self.down(g))?;
        Ok(m.with_ends(&f.dom, &self.product(&f.cod, &g.cod).obj))
    }

    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        let ((x, alpha), (y, beta)) = (compr_parts(a), compr_parts(b));
        Ok(self
            .inner
            .hom(x, y, budget)?
            .into_iter()
            .filter(|h| self.inner.leq(x, alpha, &self.inner.reindex(h, beta)))
            .map(|h| h.with_ends(a, b))
            .collect())
    }

    fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        let e = self.inner.equalizer(&self.down(f), &self.down(g))?;
        let alpha = compr_parts(&f.dom).1;
        let obj = Self::object(&e.dom, &self.inner.reindex(&e, alpha));
        Ok(e.with_ends(&obj, &f.dom))
    }
}

impl Doctrine for ComprehensionCompletion {
    fn top(&self, a: &Obj) -> Formula {
        compr_parts(a).1.clone()
    }

    fn meet(&self, a: &Obj, x: &Formula, y: &Formula) -> Formula {
        self.inner.meet(compr_parts(a).0, x, y)
    }

    fn leq(&self, a: &Obj, x: &Formula, y: &Formula) -> bool {
        self.inner.leq(compr_parts(a).0, x, y)
    }

    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
        if let Some(v) = self.per_view(a) {
            return v.fiber(budget);
        }
        let (x, alpha) = compr_parts(a);
        Ok(self.inner.fiber(x, budget)?.into_iter().filter(|p| self.inner.leq(x, p, alpha)).collect())
    }

    fn contains(&self, a: &Obj, p: &Formula) -> bool {
        let (x, alpha) = compr_parts(a);
        self.inner.contains(x, p) && self.inner.leq(x, p, alpha)
    }

    fn reindex(&self, f: &Mor, p: &Formula) -> Formula {
        let (x, alpha) = compr_parts(&f.dom);
        self.inner.meet(x, &self.inner.reindex(&self.down(f), p), alpha)
    }

    fn exists(&self, f: &Mor, p: &Formula) -> Formula {
        self.inner.exists(&self.down(f), p)
    }

    fn is_heyting(&self) -> bool {
        self.inner.is_heyting()
    }

    fn bottom(&self, a: &Obj) -> Result<Formula> {
        self.inner.bottom(compr_parts(a).0)
    }

    fn join(&self, a: &Obj, p: &Formula, q: &Formula) -> Result<Formula> {
        self.inner.join(compr_parts(a).0, p, q)
    }

    fn implies(&self, a: &Obj, p: &Formula, q: &Formula) -> Result<Formula> {
        let (x, alpha) = compr_parts(a);
        Ok(self.inner.meet(x, &self.inner.implies(x, p, q)?, alpha))
    }

    fn forall(&self, f: &Mor, p: &Formula) -> Result<Formula> {
        let ((x, alpha), (y, beta)) = (compr_parts(&f.dom), compr_parts(&f.cod));
        let body = self.inner.implies(x, alpha, p)?;
        Ok(self.inner.meet(y, &self.inner.forall(&self.down(f), &body)?, beta))
    }

    fn weak_power(&self, a: &Obj) -> Result<(Obj, Formula)> {
        let (x, alpha) = compr_parts(a);
        let d = &self.inner;
        let (px, mem) = d.weak_power(x)?;
        let p = d.product(x, &px);
        let body = d.implies(&p.obj, &mem, &d.reindex(&p.p1, alpha))?;
        let ext = d.forall(&p.p2, &body)?;
        let mem_c = d.meet(&p.obj, &mem, &d.reindex(&p.p2, &ext));
        Ok((Self::object(&px, &ext), mem_c))
    }

    fn comprehension(&self, a: &Obj, phi: &Formula) -> Result<Mor> {
        if !self.contains(a, phi) {
            return Err(Error::Invalid(format!("{} is not a formula over {a}", self.show_formula(a, phi))));
        }
        let x = compr_parts(a).0;
        Ok(self.inner.identity(x).with_ends(&Self::object(x, phi), a))
    }

    fn comprehension_factor(&self, m: &Mor, g: &Mor) -> Option<Mor> {
        // comprehensions are identities underneath
        Some(g.with_ends(&g.dom, &m.dom))
    }

    fn per_view(&self, a: &Obj) -> Option<PerView> {
        let (x, alpha) = compr_parts(a);
        self.inner.per_view(x).map(|v| v.restrict(alpha))
    }

    fn show_formula(&self, a: &Obj, p: &Formula) -> String {
        self.inner.show_formula(compr_parts(a).0, p)
    }
}

// ---------------------------------------------------------------------------
// q

/// Objects `(A, ρ)` with `ρ` an equivalence relation; morphisms `f` with
/// `ρ ≤ (f×f)*σ`; `P_q(A, ρ)` the descent-closed formulas.
pub struct QuotientCompletion {
    inner: Arc<dyn Doctrine>,
    products: ProductCache,
}

impl QuotientCompletion {
    pub fn new(inner: Arc<dyn Doctrine>) -> Self {
        QuotientCompletion {
            inner,
            products: ProductCache::default(),
        }
    }

    pub fn inner(&self) -> &Arc<dyn Doctrine> {
        &self.inner
    }

    pub fn object(a: &Obj, rho: &Formula) -> Obj {
        Obj::new(ObjKind::Quot(a.clone(), rho.clone()))
    }

    fn down(&self, f: &Mor) -> Mor {
        f.with_ends(quot_parts(&f.dom).0, quot_parts(&f.cod).0)
    }

    /// `π₁*φ ∧ ρ ≤ π₂*φ`.
    fn descent_closed(&self, x: &Obj, rho: &Formula, phi: &Formula) -> bool {
        let d = &self.inner;
        let p = d.product(x, x);
        d.leq(&p.obj, &d.meet(&p.obj, &d.reindex(&p.p1, phi), rho), &d.reindex(&p.p2, phi))
    }

    /// Least descent-closed formula above `psi`: `∃_{π₂}(π₁*ψ ∧ ρ)`.
    fn closure(&self, x: &Obj, rho: &Formula, psi: &Formula) -> Formula {
        let d = &self.inner;
        let p = d.product(x, x);
        d.exists(&p.p2, &d.meet(&p.obj, &d.reindex(&p.p1, psi), rho))
    }

    /// Greatest descent-closed formula below `chi`: `∀_{π₁}(ρ ⟹ π₂*χ)`.
    fn interior(&self, x: &Obj, rho: &Formula, chi: &Formula) -> Result<Formula> {
        let d = &self.inner;
        let p = d.product(x, x);
        let body = d.implies(&p.obj, rho, &d.reindex(&p.p2, chi))?;
        Ok(d.meet(x, &d.forall(&p.p1, &body)?, &d.top(x)))
    }
}

impl Category for QuotientCompletion {
    fn name(&self) -> String {
        format!("{}·q", self.inner.name())
    }

    fn identity(&self, a: &Obj) -> Mor {
        self.inner.identity(quot_parts(a).0).with_ends(a, a)
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        check_composable(g, f)?;
        Ok(self.inner.compose(&self.down(g), &self.down(f))?.with_ends(&f.dom, &g.cod))
    }

    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        f.dom == g.dom && f.cod == g.cod && self.inner.mor_equal(&self.down(f), &self.down(g))
    }

    fn mor_key(&self, f: &Mor) -> Mor {
        self.inner.mor_key(&self.down(f)).with_ends(&f.dom, &f.cod)
    }

    fn product(&self, a: &Obj, b: &Obj) -> Product {
        self.products.get_or(a, b, || {
            let d = &self.inner;
            let ((x, rho), (y, sigma)) = (quot_parts(a), quot_parts(b));
            let p = d.product(x, y);
            let pp = d.product(&p.obj, &p.obj);
            let on = |proj: &Mor| -> Mor {
                let l = d.compose(proj, &pp.p1).expect("projection");
                let r = d.compose(proj, &pp.p2).expect("projection");
                d.pair(&l, &r).expect("pairing")
            };
            let rel = d.meet(&pp.obj, &d.reindex(&on(&p.p1), rho), &d.reindex(&on(&p.p2), sigma));
            let obj = Self::object(&p.obj, &rel);
            Product {
                p1: p.p1.with_ends(&obj, a),
                p2: p.p2.with_ends(&obj, b),
                obj,
            }
        })
    }

    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        check_pairable(f, g)?;
        let m = self.inner.pair(&self.down(f), &self.down(g))?;
        Ok(m.with_ends(&f.dom, &self.product(&f.cod, &g.cod).obj))
    }

    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        let d = &self.inner;
        let ((x, rho), (y, sigma)) = (quot_parts(a), quot_parts(b));
        let xx = d.product(x, x).obj;
        let mut out = Vec::new();
        for h in d.hom(x, y, budget)? {
            if d.leq(&xx, rho, &d.reindex(&times(d.as_ref(), &h, &h)?, sigma)) {
                out.push(h.with_ends(a, b));
            }
        }
        Ok(out)
    }
}

impl Doctrine for QuotientCompletion {
    fn top(&self, a: &Obj) -> Formula {
        self.inner.top(quot_parts(a).0)
    }

    fn meet(&self, a: &Obj, x: &Formula, y: &Formula) -> Formula {
        self.inner.meet(quot_parts(a).0, x, y)
    }

    fn leq(&self, a: &Obj, x: &Formula, y: &Formula) -> bool {
        self.inner.leq(quot_parts(a).0, x, y)
    }

    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
        if let Some(v) = self.per_view(a) {
            return v.fiber(budget);
        }
        let (x, rho) = quot_parts(a);
        Ok(self
            .inner
            .fiber(x, budget)?
            .into_iter()
            .filter(|p| self.descent_closed(x, rho, p))
            .collect())
    }

    fn contains(&self, a: &Obj, p: &Formula) -> bool {
        let (x, rho) = quot_parts(a);
        self.inner.contains(x, p) && self.descent_closed(x, rho, p)
    }

    fn reindex(&self, f: &Mor, p: &Formula) -> Formula {
        self.inner.reindex(&self.down(f), p)
    }

    fn exists(&self, f: &Mor, p: &Formula) -> Formula {
        let (y, sigma) = quot_parts(&f.cod);
        self.closure(y, sigma, &self.inner.exists(&self.down(f), p))
    }

    fn is_heyting(&self) -> bool {
        self.inner.is_heyting()
    }

    fn bottom(&self, a: &Obj) -> Result<Formula> {
        self.inner.bottom(quot_parts(a).0)
    }

    fn join(&self, a: &Obj, p: &Formula, q: &Formula) -> Result<Formula> {
        self.inner.join(quot_parts(a).0, p, q)
    }

    fn implies(&self, a: &Obj, p: &Formula, q: &Formula) -> Result<Formula> {
        self.inner.implies(quot_parts(a).0, p, q)
    }

    fn forall(&self, f: &Mor, p: &Formula) -> Result<Formula> {
        let (y, sigma) = quot_parts(&f.cod);
        self.interior(y, sigma, &self.inner.forall(&self.down(f), p)?)
    }

    fn weak_power(&self, a: &Obj) -> Result<(Obj, Formula)> {
        let d = self.inner.as_ref();
        let (x, rho) = quot_parts(a);
        let (px, mem) = d.weak_power(x)?;
        let (_, equiv) = extensional_equivalence(d, x)?;
        let t = triple(d, x, x, &px)?;
        let body = d.implies(&t.obj, &d.reindex(&t.p12, rho), &d.reindex(&t.p13, &mem))?;
        let closed = d.forall(&t.p23, &body)?;
        let p = d.product(x, &px);
        Ok((Self::object(&px, &equiv), d.meet(&p.obj, &mem, &closed)))
    }

    fn comprehension(&self, a: &Obj, phi: &Formula) -> Result<Mor> {
        if !self.contains(a, phi) {
            return Err(Error::Invalid(format!("{} is not a formula over {a}", self.show_formula(a, phi))));
        }
        let d = self.inner.as_ref();
        let (x, rho) = quot_parts(a);
        let c = d.comprehension(x, phi)?;
        let rho2 = d.reindex(&times(d, &c, &c)?, rho);
        Ok(c.with_ends(&Self::object(&c.dom, &rho2), a))
    }

    fn comprehension_factor(&self, m: &Mor, g: &Mor) -> Option<Mor> {
        let h = self.inner.comprehension_factor(&self.down(m), &self.down(g))?;
        Some(h.with_ends(&g.dom, &m.dom))
    }

    fn quotient(&self, a: &Obj, sigma: &Formula) -> Result<Mor> {
        // fibers, order and projections are those of the underlying stage,
        // so only closure and δ_{(X,ρ)} = ρ are checked here
        let (x, rho) = quot_parts(a);
        let pa = self.product(a, a).obj;
        let why = if !self.contains(&pa, sigma) {
            Some("not a formula over A×A")
        } else if !self.inner.leq(quot_parts(&pa).0, rho, sigma) {
            Some("reflexivity")
        } else {
            crate::doctrine::equivalence_violation(self.inner.as_ref(), x, sigma)?
        };
        if let Some(why) = why {
            return Err(Error::NotEquivalence(why.into()));
        }
        Ok(self.inner.identity(x).with_ends(a, &Self::object(x, sigma)))
    }

    fn per_view(&self, a: &Obj) -> Option<PerView> {
        let (x, rho) = quot_parts(a);
        self.inner.per_view(x).map(|v| PerView::from_relation(v.h, v.n, rho))
    }

    fn show_formula(&self, a: &Obj, p: &Formula) -> String {
        self.inner.show_formula(quot_parts(a).0, p)
    }
}

// ---------------------------------------------------------------------------
// e

/// Same objects and fibers; morphisms identified when `⊤ ≤ ⟨f,g⟩*δ`.
pub struct ExtensionalCollapse {
    inner: Arc<dyn Doctrine>,
    deltas: FormulaCache,
}

impl ExtensionalCollapse {
    pub fn new(inner: Arc<dyn Doctrine>) -> Self {
        ExtensionalCollapse {
            inner,
            deltas: FormulaCache::default(),
        }
    }

    pub fn inner(&self) -> &Arc<dyn Doctrine> {
        &self.inner
    }

    fn delta(&self, a: &Obj) -> Formula {
        self.deltas
            .get_or(a, || equality_predicate(self.inner.as_ref(), a))
            .expect("equality predicate")
    }

    /// `f ~ g` on representatives.
    pub fn similar(&self, f: &Mor, g: &Mor) -> bool {
        if self.inner.mor_equal(f, g) {
            return true;
        }
        let Ok(fg) = self.inner.pair(f, g) else {
            return false;
        };
        self.inner
            .leq(&f.dom, &self.inner.top(&f.dom), &self.inner.reindex(&fg, &self.delta(&f.cod)))
    }
}

impl Category for ExtensionalCollapse {
    fn name(&self) -> String {
        format!("{}·e", self.inner.name())
    }

    fn identity(&self, a: &Obj) -> Mor {
        self.inner.identity(a)
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        self.inner.compose(g, f)
    }

    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        f.dom == g.dom && f.cod == g.cod && self.similar(f, g)
    }

    /// `Γf`: graphs agree exactly on similar morphisms.
    fn mor_key(&self, f: &Mor) -> Mor {
        let d = self.inner.as_ref();
        let fx = times(d, f, &d.identity(&f.cod)).expect("graph");
        Mor::new(f.dom.clone(), f.cod.clone(), Arrow::Rel(d.reindex(&fx, &self.delta(&f.cod))))
    }

    fn product(&self, a: &Obj, b: &Obj) -> Product {
        self.inner.product(a, b)
    }

    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        self.inner.pair(f, g)
    }

    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        let mut seen = HashSet::new();
        let mut reps: Vec<Mor> = Vec::new();
        for f in self.inner.hom(a, b, budget)? {
            if seen.insert(self.mor_key(&f)) {
                reps.push(f);
            }
        }
        Ok(reps)
    }

    fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        let fg = self.inner.pair(f, g)?;
        self.comprehension(&f.dom, &self.inner.reindex(&fg, &self.delta(&f.cod)))
    }
}

impl Doctrine for ExtensionalCollapse {
    fn top(&self, a: &Obj) -> Formula {
        self.inner.top(a)
    }
    fn meet(&self, a: &Obj, x: &Formula, y: &Formula) -> Formula {
        self.inner.meet(a, x, y)
    }
    fn leq(&self, a: &Obj, x: &Formula, y: &Formula) -> bool {
        self.inner.leq(a, x, y)
    }
    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
        self.inner.fiber(a, budget)
    }
    fn contains(&self, a: &Obj, x: &Formula) -> bool {
        self.inner.contains(a, x)
    }
    fn reindex(&self, f: &Mor, x: &Formula) -> Formula {
        self.inner.reindex(f, x)
    }
    fn exists(&self, f: &Mor, x: &Formula) -> Formula {
        self.inner.exists(f, x)
    }
    fn is_heyting(&self) -> bool {
        self.inner.is_heyting()
    }
    fn bottom(&self, a: &Obj) -> Result<Formula> {
        self.inner.bottom(a)
    }
    fn join(&self, a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        self.inner.join(a, x, y)
    }
    fn implies(&self, a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        self.inner.implies(a, x, y)
    }
    fn forall(&self, f: &Mor, x: &Formula) -> Result<Formula> {
        self.inner.forall(f, x)
    }
    fn weak_power(&self, a: &Obj) -> Result<(Obj, Formula)> {
        self.inner.weak_power(a)
    }
    fn comprehension(&self, a: &Obj, alpha: &Formula) -> Result<Mor> {
        self.inner.comprehension(a, alpha)
    }
    fn comprehension_factor(&self, m: &Mor, g: &Mor) -> Option<Mor> {
        self.inner.comprehension_factor(m, g)
    }
    fn quotient(&self, a: &Obj, rho: &Formula) -> Result<Mor> {
        self.inner.quotient(a, rho)
    }
    fn per_view(&self, a: &Obj) -> Option<PerView> {
        self.inner.per_view(a)
    }
    fn show_formula(&self, a: &Obj, x: &Formula) -> String {
        self.inner.show_formula(a, x)
    }
}

// ---------------------------------------------------------------------------
// l

/// Same objects and fibers; morphisms are functional formulas, with `Γf`
/// kept symbolically for morphisms coming from the underlying stage.
pub struct CauchyCompletion {
    inner: Arc<dyn Doctrine>,
    deltas: FormulaCache,
}

impl CauchyCompletion {
    pub fn new(inner: Arc<dyn Doctrine>) -> Self {
        CauchyCompletion {
            inner,
            deltas: FormulaCache::default(),
        }
    }

    pub fn inner(&self) -> &Arc<dyn Doctrine> {
        &self.inner
    }

    fn delta(&self, a: &Obj) -> Formula {
        self.deltas
            .get_or(a, || equality_predicate(self.inner.as_ref(), a))
            .expect("equality predicate")
    }

    /// `Γf` as a morphism of this stage.
    pub fn lift(f: &Mor) -> Mor {
        Mor::new(f.dom.clone(), f.cod.clone(), Arrow::Graph(Box::new(f.arrow.clone())))
    }

    fn down(f: &Mor) -> Option<Mor> {
        match &f.arrow {
            Arrow::Graph(a) => Some(Mor::new(f.dom.clone(), f.cod.clone(), (**a).clone())),
            _ => None,
        }
    }

    /// The functional formula over `dom × cod` representing `f`.
    pub fn formula(&self, f: &Mor) -> Formula {
        match (&f.arrow, Self::down(f)) {
            (Arrow::Rel(r), _) => r.clone(),
            (_, Some(g)) => {
                let gx = times(self.inner.as_ref(), &g, &self.inner.identity(&g.cod)).expect("graph");
                self.inner.reindex(&gx, &self.delta(&g.cod))
            }
            _ => unreachable!("unknown arrow at the cauchy stage"),
        }
    }

    fn rel(dom: &Obj, cod: &Obj, r: Formula) -> Mor {
        Mor::new(dom.clone(), cod.clone(), Arrow::Rel(r))
    }
}

impl Category for CauchyCompletion {
    fn name(&self) -> String {
        format!("{}·l", self.inner.name())
    }

    fn identity(&self, a: &Obj) -> Mor {
        Self::lift(&self.inner.identity(a))
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        check_composable(g, f)?;
        let d = self.inner.as_ref();
        match (Self::down(f), Self::down(g)) {
            (Some(f0), Some(g0)) => Ok(Self::lift(&d.compose(&g0, &f0)?)),
            (Some(f0), None) => {
                // G ∘ Γf = (f × id)*G
                let fx = times(d, &f0, &d.identity(&g.cod))?;
                Ok(Self::rel(&f.dom, &g.cod, d.reindex(&fx, &self.formula(g))))
            }
            _ => {
                let r = compose_relations(d, &f.dom, &f.cod, &g.cod, &self.formula(f), &self.formula(g))?;
                Ok(Self::rel(&f.dom, &g.cod, r))
            }
        }
    }

    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        if f.dom != g.dom || f.cod != g.cod {
            return false;
        }
        if f.arrow == g.arrow {
            return true;
        }
        let p = self.inner.product(&f.dom, &f.cod);
        formula_eq(self.inner.as_ref(), &p.obj, &self.formula(f), &self.formula(g))
    }

    fn mor_key(&self, f: &Mor) -> Mor {
        Self::rel(&f.dom, &f.cod, self.formula(f))
    }

    fn product(&self, a: &Obj, b: &Obj) -> Product {
        let p = self.inner.product(a, b);
        Product {
            p1: Self::lift(&p.p1),
            p2: Self::lift(&p.p2),
            obj: p.obj,
        }
    }

    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        check_pairable(f, g)?;
        let d = self.inner.as_ref();
        if let (Some(f0), Some(g0)) = (Self::down(f), Self::down(g)) {
            return Ok(Self::lift(&d.pair(&f0, &g0)?));
        }
        let x = &f.dom;
        let p = d.product(&f.cod, &g.cod);
        let q = d.product(x, &p.obj);
        let m1 = d.pair(&q.p1, &d.compose(&p.p1, &q.p2)?)?;
        let m2 = d.pair(&q.p1, &d.compose(&p.p2, &q.p2)?)?;
        let h = d.meet(&q.obj, &d.reindex(&m1, &self.formula(f)), &d.reindex(&m2, &self.formula(g)));
        Ok(Self::rel(x, &p.obj, h))
    }

    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        // functional formulas that are graphs stay symbolic, so they compose
        // in the underlying stage
        let d = self.inner.as_ref();
        let mut graphs = HashMap::new();
        for f in d.hom(a, b, budget)? {
            let g = Self::lift(&f);
            graphs.entry(self.formula(&g)).or_insert(g);
        }
        let forms = crate::completeness::functional_formulas(d, a, b, budget)?;
        Ok(forms.into_iter().map(|r| graphs.get(&r).cloned().unwrap_or_else(|| Self::rel(a, b, r))).collect())
    }

    fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        let fg = self.pair(f, g)?;
        let e = self.reindex(&fg, &self.delta(&f.cod));
        self.comprehension(&f.dom, &e)
    }
}

impl Doctrine for CauchyCompletion {
    fn top(&self, a: &Obj) -> Formula {
        self.inner.top(a)
    }
    fn meet(&self, a: &Obj, x: &Formula, y: &Formula) -> Formula {
        self.inner.meet(a, x, y)
    }
    fn leq(&self, a: &Obj, x: &Formula, y: &Formula) -> bool {
        self.inner.leq(a, x, y)
    }
    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
        self.inner.fiber(a, budget)
    }
    fn contains(&self, a: &Obj, x: &Formula) -> bool {
        self.inner.contains(a, x)
    }

    fn reindex(&self, f: &Mor, beta: &Formula) -> Formula {
        let d = self.inner.as_ref();
        if let Some(f0) = Self::down(f) {
            return d.reindex(&f0, beta);
        }
        // ∃_{π₁}(φ ∧ π₂*β)
        let p = d.product(&f.dom, &f.cod);
        d.exists(&p.p1, &d.meet(&p.obj, &self.formula(f), &d.reindex(&p.p2, beta)))
    }

    fn exists(&self, f: &Mor, alpha: &Formula) -> Formula {
        let d = self.inner.as_ref();
        if let Some(f0) = Self::down(f) {
            return d.exists(&f0, alpha);
        }
        // ∃_{π₂}(φ ∧ π₁*α)
        let p = d.product(&f.dom, &f.cod);
        d.exists(&p.p2, &d.meet(&p.obj, &self.formula(f), &d.reindex(&p.p1, alpha)))
    }

    fn is_heyting(&self) -> bool {
        self.inner.is_heyting()
    }
    fn bottom(&self, a: &Obj) -> Result<Formula> {
        self.inner.bottom(a)
    }
    fn join(&self, a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        self.inner.join(a, x, y)
    }
    fn implies(&self, a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        self.inner.implies(a, x, y)
    }

    fn forall(&self, f: &Mor, alpha: &Formula) -> Result<Formula> {
        let d = self.inner.as_ref();
        if let Some(f0) = Self::down(f) {
            return d.forall(&f0, alpha);
        }
        // ∀_{π₂}(φ ⟹ π₁*α)
        let p = d.product(&f.dom, &f.cod);
        d.forall(&p.p2, &d.implies(&p.obj, &self.formula(f), &d.reindex(&p.p1, alpha))?)
    }

    fn weak_power(&self, a: &Obj) -> Result<(Obj, Formula)> {
        self.inner.weak_power(a)
    }
    fn comprehension(&self, a: &Obj, alpha: &Formula) -> Result<Mor> {
        Ok(Self::lift(&self.inner.comprehension(a, alpha)?))
    }
    fn comprehension_factor(&self, m: &Mor, g: &Mor) -> Option<Mor> {
        let d = self.inner.as_ref();
        let m0 = Self::down(m)?;
        match Self::down(g) {
            Some(g0) => Some(Self::lift(&d.comprehension_factor(&m0, &g0)?)),
            None => {
                // (id × m)*G
                let idm = times(d, &d.identity(&g.dom), &m0).ok()?;
                Some(Self::rel(&g.dom, &m.dom, d.reindex(&idm, &self.formula(g))))
            }
        }
    }
    fn graph_morphism(&self, y: &Obj, a: &Obj, f: &Formula) -> Option<Mor> {
        is_functional(self.inner.as_ref(), y, a, f).ok()?.then(|| Self::rel(y, a, f.clone()))
    }
    fn quotient(&self, a: &Obj, rho: &Formula) -> Result<Mor> {
        Ok(Self::lift(&self.inner.quotient(a, rho)?))
    }
    fn per_view(&self, a: &Obj) -> Option<PerView> {
        self.inner.per_view(a)
    }
    fn show_formula(&self, a: &Obj, x: &Formula) -> String {
        self.inner.show_formula(a, x)
    }
}

// ---------------------------------------------------------------------------
// units

/// The unit `P → P_k` of a completion.
pub struct Unit {
    kind: Kind,
    source: Arc<dyn Doctrine>,
    target: Arc<dyn Doctrine>,
}

impl Unit {
    pub fn new(kind: Kind, source: Arc<dyn Doctrine>, target: Arc<dyn Doctrine>) -> Self {
        Unit { kind, source, target }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }
}

impl DoctrineMorphism for Unit {
    fn name(&self) -> String {
        format!("unit_{}", self.kind)
    }

    fn source(&self) -> &Arc<dyn Doctrine> {
        &self.source
    }

    fn target(&self) -> &Arc<dyn Doctrine> {
        &self.target
    }

    fn map_obj(&self, a: &Obj) -> Result<Obj> {
        Ok(match self.kind {
            Kind::C => ComprehensionCompletion::object(a, &self.source.top(a)),
            Kind::Q => QuotientCompletion::object(a, &equality_predicate(self.source.as_ref(), a)?),
            Kind::E | Kind::L => a.clone(),
        })
    }

    fn map_mor(&self, f: &Mor) -> Result<Mor> {
        Ok(match self.kind {
            Kind::C | Kind::Q => f.with_ends(&self.map_obj(&f.dom)?, &self.map_obj(&f.cod)?),
            Kind::E => f.clone(),
            Kind::L => CauchyCompletion::lift(f),
        })
    }

    fn map_formula(&self, _a: &Obj, x: &Formula) -> Result<Formula> {
        Ok(x.clone())
    }

    /// The comparison has identity underlying arrow in every case.
    fn product_comparison(&self, a: &Obj, b: &Obj, _budget: &Budget) -> Result<(Mor, Mor)> {
        let t = &self.target;
        let p = self.source.product(a, b);
        let c = t.pair(&self.map_mor(&p.p1)?, &self.map_mor(&p.p2)?)?;
        let inv = t.identity(&c.dom).with_ends(&c.cod, &c.dom);
        Ok((c, inv))
    }
}

/// A completed doctrine together with its unit.
#[derive(Clone)]
pub struct Stage {
    pub kind: Kind,
    pub doctrine: Arc<dyn Doctrine>,
    pub unit: Arc<Unit>,
}

pub fn complete(kind: Kind, d: Arc<dyn Doctrine>) -> Stage {
    let doctrine = kind.complete(d.clone());
    Stage {
        kind,
        unit: Arc::new(Unit::new(kind, d, doctrine.clone())),
        doctrine,
    }
}

// ---------------------------------------------------------------------------
// extensions

/// The unique `(F̄, f̄): P_k → R` with `(F̄, f̄) ∘ unit = (F, f)`, for a
/// morphism `m: P → R` into a `k`-complete target.
pub struct Extension {
    kind: Kind,
    completed: Arc<dyn Doctrine>,
    m: Arc<dyn DoctrineMorphism>,
    budget: Budget,
}

impl Extension {
    /// Checks completeness of the target on `objs` (images of `objs` under
    /// `m`) before building the extension.
    pub fn new(
        kind: Kind,
        completed: Arc<dyn Doctrine>,
        m: Arc<dyn DoctrineMorphism>,
        objs: &[Obj],
        budget: &Budget,
    ) -> Result<Self> {
        let images: Vec<Obj> = objs.iter().map(|a| m.map_obj(a)).collect::<Result<_>>()?;
        let report = crate::completeness::check_complete(kind, m.target().as_ref(), &images, budget)?;
        if !report.passed() {
            if kind == Kind::L {
                return Err(Error::NoGraph);
            }
            let w = report.first_witness().map(|w| w.to_string()).unwrap_or_default();
            return Err(Error::NotComplete(format!("{} fails {}: {w}", m.target().name(), report.check)));
        }
        Ok(Extension {
            kind,
            completed,
            m,
            budget: *budget,
        })
    }

    fn r(&self) -> &dyn Doctrine {
        self.m.target().as_ref()
    }

    /// `(⟨Fπ₁,Fπ₂⟩⁻¹)* f_{A×B}(φ)`, a formula over `FA × FB`.
    fn transport(&self, a: &Obj, b: &Obj, phi: &Formula) -> Result<Formula> {
        let p = self.m.source().product(a, b);
        let (_, inv) = self.m.product_comparison(a, b, &self.budget)?;
        Ok(self.r().reindex(&inv, &self.m.map_formula(&p.obj, phi)?))
    }

    /// Comprehension `⌊f_A α⌋` in the target, for `kind = c`.
    fn compr_of(&self, a: &Obj) -> Result<Mor> {
        let (x, alpha) = compr_parts(a);
        self.r().comprehension(&self.m.map_obj(x)?, &self.m.map_formula(x, alpha)?)
    }

    /// Quotient of the transported `ρ`, for `kind = q`.
    fn quot_of(&self, a: &Obj) -> Result<Mor> {
        let (x, rho) = quot_parts(a);
        let rho2 = self.transport(x, x, rho)?;
        self.r().quotient(&self.m.map_obj(x)?, &rho2)
    }

    /// Isomorphism `F̄(unit A) → F A` witnessing the commuting triangle.
    pub fn triangle_iso(&self, unit: &Unit, a: &Obj) -> Result<Mor> {
        let ua = unit.map_obj(a)?;
        match self.kind {
            Kind::C => self.compr_of(&ua),
            Kind::Q => {
                let q = self.quot_of(&ua)?;
                find_inverse(self.r(), &q, &self.budget)?
                    .ok_or_else(|| Error::NotComplete(format!("quotient of δ on {a} is not invertible")))
            }
            Kind::E | Kind::L => Ok(self.r().identity(&self.m.map_obj(a)?)),
        }
    }
}

impl DoctrineMorphism for Extension {
    fn name(&self) -> String {
        format!("ext_{}({})", self.kind, self.m.name())
    }

    fn source(&self) -> &Arc<dyn Doctrine> {
        &self.completed
    }

    fn target(&self) -> &Arc<dyn Doctrine> {
        self.m.target()
    }

    fn map_obj(&self, a: &Obj) -> Result<Obj> {
        match self.kind {
            Kind::C => Ok(self.compr_of(a)?.dom),
            Kind::Q => Ok(self.quot_of(a)?.cod),
            Kind::E | Kind::L => self.m.map_obj(a),
        }
    }

    fn map_mor(&self, f: &Mor) -> Result<Mor> {
        let r = self.r();
        match self.kind {
            Kind::C => {
                let (x, y) = (compr_parts(&f.dom).0, compr_parts(&f.cod).0);
                let ff = self.m.map_mor(&f.with_ends(x, y))?;
                let g = r.compose(&ff, &self.compr_of(&f.dom)?)?;
                factor_through(r, &self.compr_of(&f.cod)?, &g, &self.budget)?
                    .ok_or_else(|| Error::NotComplete(format!("{f} does not factor through the comprehension")))
            }
            Kind::Q => {
                let (x, y) = (quot_parts(&f.dom).0, quot_parts(&f.cod).0);
                let ff = self.m.map_mor(&f.with_ends(x, y))?;
                let g = r.compose(&self.quot_of(&f.cod)?, &ff)?;
                factor_after(r, &self.quot_of(&f.dom)?, &g, &self.budget)?
                    .ok_or_else(|| Error::NotComplete(format!("{f} does not factor through the quotient")))
            }
            Kind::E => self.m.map_mor(f),
            Kind::L => {
                let cc = cauchy_formula(self.completed.as_ref(), f)
                    .ok_or_else(|| Error::Invalid(format!("{f} is not a morphism of a cauchy completion")))?;
                let phi = self.transport(&f.dom, &f.cod, &cc)?;
                crate::doctrine::find_graph_morphism(r, &self.m.map_obj(&f.dom)?, &self.m.map_obj(&f.cod)?, &phi, &self.budget)
            }
        }
    }

    fn map_formula(&self, a: &Obj, x: &Formula) -> Result<Formula> {
        match self.kind {
            Kind::C => {
                let base = compr_parts(a).0;
                Ok(self.r().reindex(&self.compr_of(a)?, &self.m.map_formula(base, x)?))
            }
            Kind::Q => {
                let base = quot_parts(a).0;
                Ok(self.r().exists(&self.quot_of(a)?, &self.m.map_formula(base, x)?))
            }
            Kind::E | Kind::L => self.m.map_formula(a, x),
        }
    }
}

/// The functional formula of a morphism of a cauchy completion held behind
/// `dyn Doctrine`.
pub fn cauchy_formula(d: &dyn Doctrine, f: &Mor) -> Option<Formula> {
    match &f.arrow {
        Arrow::Rel(r) => Some(r.clone()),
        Arrow::Graph(_) => crate::doctrine::graph(d, f).ok(),
        Arrow::Fun(_) => None,
    }
}

/// The composite `c, q, e, l` with every intermediate stage retained.
#[derive(Clone)]
pub struct Pipeline {
    pub input: Arc<dyn Doctrine>,
    pub stages: Vec<Stage>,
}

impl Pipeline {
    pub fn run(input: Arc<dyn Doctrine>, kinds: &[Kind]) -> Self {
        let mut stages: Vec<Stage> = Vec::new();
        let mut cur = input.clone();
        for &k in kinds {
            let s = complete(k, cur);
            cur = s.doctrine.clone();
            stages.push(s);
        }
        Pipeline { input, stages }
    }

    pub fn tripos_to_topos(input: Arc<dyn Doctrine>) -> Self {
        Self::run(input, &Kind::PIPELINE)
    }

    pub fn output(&self) -> &Arc<dyn Doctrine> {
        self.stages.last().map(|s| &s.doctrine).unwrap_or(&self.input)
    }

    pub fn stage(&self, kind: Kind) -> Option<&Stage> {
        self.stages.iter().find(|s| s.kind == kind)
    }

    /// Image of a base object after the first `n` stages.
    pub fn embed_upto(&self, a: &Obj, n: usize) -> Result<Obj> {
        let mut x = a.clone();
        for s in &self.stages[..n] {
            x = s.unit.map_obj(&x)?;
        }
        Ok(x)
    }

    pub fn embed(&self, a: &Obj) -> Result<Obj> {
        self.embed_upto(a, self.stages.len())
    }

    pub fn embed_mor_upto(&self, f: &Mor, n: usize) -> Result<Mor> {
        let mut g = f.clone();
        for s in &self.stages[..n] {
            g = s.unit.map_mor(&g)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completeness::{check_complete, check_reflective, check_triangle};
    use crate::lattice::HeytingAlgebra;
    use crate::models::{HValuedTripos, SubsetTripos};
    use crate::morphism::{check_logical_morphism, Preservation};

    fn b() -> Budget {
        Budget::default()
    }

    fn subset() -> Arc<dyn Doctrine> {
        Arc::new(SubsetTripos::new())
    }

    fn hvalued(h: HeytingAlgebra) -> Arc<dyn Doctrine> {
        Arc::new(HValuedTripos::new(h))
    }

    fn f(v: &[u32]) -> Formula {
        Formula::new(v.to_vec())
    }

    fn base(ns: &[usize]) -> Vec<Obj> {
        ns.iter().map(|&n| Obj::finite(n)).collect()
    }

    #[test]
    fn comprehension_fiber_at_top_is_the_original_fiber() {
        for d in [subset(), hvalued(HeytingAlgebra::chain(3))] {
            let s = complete(Kind::C, d.clone());
            for a in base(&[1, 2]) {
                let ua = s.unit.map_obj(&a).unwrap();
                assert_eq!(s.doctrine.fiber(&ua, &b()).unwrap(), d.fiber(&a, &b()).unwrap());
            }
        }
    }

    #[test]
    fn comprehension_fiber_is_a_downset() {
        let s = complete(Kind::C, subset());
        let a = ComprehensionCompletion::object(&Obj::finite(2), &f(&[1, 0]));
        let fib: Vec<String> =
            s.doctrine.fiber(&a, &b()).unwrap().iter().map(|x| s.doctrine.show_formula(&a, x)).collect();
        assert_eq!(fib, ["∅", "{a}"]);
        assert_eq!(s.doctrine.show_formula(&a, &s.doctrine.top(&a)), "{a}");
    }

    #[test]
    fn descent_closed_fiber_of_the_total_relation() {
        let p = Pipeline::run(subset(), &[Kind::C, Kind::Q]);
        let c2 = p.embed_upto(&Obj::finite(2), 1).unwrap();
        let q = p.output();
        let top = p.stages[0].doctrine.top(&c2);
        let rel = Formula::constant(top.at(0), 4);
        let a = QuotientCompletion::object(&c2, &rel);
        let fib: Vec<String> = q.fiber(&a, &b()).unwrap().iter().map(|x| q.show_formula(&a, x)).collect();
        assert_eq!(fib, ["∅", "{a,b}"]);
    }

    #[test]
    fn unit_of_quotients_has_identity_fibers() {
        let d = hvalued(HeytingAlgebra::chain(3));
        let s = complete(Kind::Q, complete(Kind::C, d).doctrine);
        let c = s.unit.source().clone();
        for a in base(&[1, 2]) {
            let ca = ComprehensionCompletion::object(&a, &c.top(&ComprehensionCompletion::object(&a, &Formula::constant(2, a.carrier()))));
            let qa = s.unit.map_obj(&ca).unwrap();
            assert_eq!(s.doctrine.fiber(&qa, &b()).unwrap(), c.fiber(&ca, &b()).unwrap());
        }
    }

    #[test]
    fn collapse_identifies_swap_on_an_indiscrete_object() {
        let p = Pipeline::run(subset(), &[Kind::C, Kind::Q, Kind::E]);
        let c2 = p.embed_upto(&Obj::finite(2), 1).unwrap();
        let a = QuotientCompletion::object(&c2, &Formula::constant(1, 4));
        let e = p.output();
        let id = e.identity(&a);
        let swap = Mor::fun(a.clone(), a.clone(), vec![1, 0]);
        assert!(e.mor_equal(&id, &swap));
        assert_eq!(e.hom(&a, &a, &b()).unwrap().len(), 1);
        let q = &p.stages[1].doctrine;
        assert!(!q.mor_equal(&id, &swap));
        assert_eq!(q.hom(&a, &a, &b()).unwrap().len(), 4);
    }

    #[test]
    fn cauchy_completion_adds_complementary_pairs() {
        let p = Pipeline::tripos_to_topos(hvalued(HeytingAlgebra::diamond()));
        let one = Obj::finite(1);
        let two = Obj::finite(2);
        let e = &p.stages[2].doctrine;
        let (e1, e2) = (p.embed_upto(&one, 3).unwrap(), p.embed_upto(&two, 3).unwrap());
        assert_eq!(e.hom(&e1, &e2, &b()).unwrap().len(), 2);
        let l = p.output();
        assert_eq!(l.hom(&p.embed(&one).unwrap(), &p.embed(&two).unwrap(), &b()).unwrap().len(), 4);
    }

    #[test]
    fn subset_pipeline_keeps_hom_counts() {
        let p = Pipeline::tripos_to_topos(subset());
        for (m, n, count) in [(1, 2, 2), (2, 2, 4), (2, 3, 9), (3, 2, 8)] {
            let (a, c) = (p.embed(&Obj::finite(m)).unwrap(), p.embed(&Obj::finite(n)).unwrap());
            assert_eq!(p.output().hom(&a, &c, &b()).unwrap().len(), count, "{m} -> {n}");
        }
    }

    #[test]
    fn graphs_compose_like_relations() {
        let s = complete(Kind::L, subset());
        let l = s.doctrine.as_ref();
        let (two, three) = (Obj::finite(2), Obj::finite(3));
        let g0 = Mor::fun(two.clone(), three.clone(), vec![2, 0]);
        let h0 = Mor::fun(three.clone(), two.clone(), vec![1, 1, 0]);
        let (g, h) = (CauchyCompletion::lift(&g0), CauchyCompletion::lift(&h0));
        let symbolic = l.compose(&h, &g).unwrap();
        let rel = Mor::new(two.clone(), three.clone(), Arrow::Rel(cauchy_formula(l, &g).unwrap()));
        let relational = l.compose(&h, &rel).unwrap();
        assert!(l.mor_equal(&symbolic, &relational));
        let id = cauchy_formula(l, &l.identity(&two)).unwrap();
        assert_eq!(id, equality_predicate(l, &two).unwrap());
    }

    #[test]
    fn units_are_logical() {
        for d in [subset(), hvalued(HeytingAlgebra::chain(3))] {
            let p = Pipeline::tripos_to_topos(d);
            for (i, s) in p.stages.iter().enumerate() {
                let objs: Vec<Obj> = base(&[1, 2]).iter().map(|a| p.embed_upto(a, i).unwrap()).collect();
                let r = check_logical_morphism(s.unit.as_ref(), &objs, Preservation::Logical, &b()).unwrap();
                assert!(r.passed(), "{}: {r}", s.kind);
            }
        }
    }

    #[test]
    fn every_stage_has_its_property() {
        let p = Pipeline::tripos_to_topos(hvalued(HeytingAlgebra::chain(3)));
        for (i, s) in p.stages.iter().enumerate() {
            let objs: Vec<Obj> = base(&[1, 2]).iter().map(|a| p.embed_upto(a, i + 1).unwrap()).collect();
            let r = check_complete(s.kind, s.doctrine.as_ref(), &objs, &b()).unwrap();
            assert!(r.passed(), "{}: {r}", s.kind);
        }
    }

    #[test]
    fn stages_before_collapse_are_not_extensional() {
        let p = Pipeline::run(subset(), &[Kind::C, Kind::Q]);
        let c2 = p.embed_upto(&Obj::finite(2), 1).unwrap();
        let a = QuotientCompletion::object(&c2, &Formula::constant(1, 4));
        let r = check_complete(Kind::E, p.output().as_ref(), &[a], &b()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn completing_twice_is_reflective() {
        let d = hvalued(HeytingAlgebra::chain(3));
        let c = complete(Kind::C, d);
        let cc = complete(Kind::C, c.doctrine.clone());
        let objs: Vec<Obj> = base(&[1, 2]).iter().map(|a| c.unit.map_obj(a).unwrap()).collect();
        let r = check_reflective(&cc.unit, &objs, &b()).unwrap();
        assert!(r.passed(), "{r}");
        // without comprehensions the unit is not full on fibers
        let raw = complete(Kind::C, hvalued(HeytingAlgebra::chain(2)));
        let a = ComprehensionCompletion::object(&Obj::finite(1), &f(&[0]));
        assert!(raw.doctrine.fiber(&a, &b()).unwrap().len() == 1);
    }

    #[test]
    fn unit_extends_along_itself() {
        let d = hvalued(HeytingAlgebra::chain(3));
        for kind in [Kind::C, Kind::L] {
            let inner = if kind == Kind::L {
                Pipeline::run(d.clone(), &[Kind::C, Kind::Q, Kind::E]).output().clone()
            } else {
                d.clone()
            };
            let s = complete(kind, inner.clone());
            let objs = if kind == Kind::L {
                let p = Pipeline::run(d.clone(), &[Kind::C, Kind::Q, Kind::E]);
                base(&[1, 2]).iter().map(|a| p.embed(a).unwrap()).collect()
            } else {
                base(&[1, 2])
            };
            let m: Arc<dyn DoctrineMorphism> = s.unit.clone();
            let ext = Extension::new(kind, s.doctrine.clone(), m.clone(), &objs, &b()).unwrap();
            let r = check_triangle(&ext, &s.unit, m.as_ref(), &objs, &b()).unwrap();
            assert!(r.passed(), "{kind}: {r}");
        }
    }

    #[test]
    fn extension_into_an_incomplete_target_is_refused() {
        let d = hvalued(HeytingAlgebra::diamond());
        let s = complete(Kind::L, d.clone());
        let m: Arc<dyn DoctrineMorphism> = Arc::new(crate::morphism::IdentityMorphism::new(d));
        let err = Extension::new(Kind::L, s.doctrine.clone(), m, &base(&[1, 2]), &b()).err().unwrap();
        assert!(matches!(err, Error::NoGraph));
    }
}
