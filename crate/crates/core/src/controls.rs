//! Deliberately corrupted structures for negative controls.

use std::sync::Arc;

use crate::category::{Budget, Category, Formula, Mor, Obj, Product};
use crate::doctrine::Doctrine;
use crate::error::Result;
use crate::morphism::DoctrineMorphism;
use crate::per::PerView;

/// A doctrine whose `∃_f` is wrong at the first point of the codomain
/// whenever `f` has at least two points in its domain: that entry is sent to
/// `⊥`. Everything else delegates.
pub struct BrokenExists {
    inner: Arc<dyn Doctrine>,
}

impl BrokenExists {
    pub fn new(inner: Arc<dyn Doctrine>) -> Self {
        BrokenExists { inner }
    }
}

impl Category for BrokenExists {
    fn name(&self) -> String {
        format!("broken-exists({})", self.inner.name())
    }
    fn identity(&self, a: &Obj) -> Mor {
        self.inner.identity(a)
    }
    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        self.inner.compose(g, f)
    }
    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        self.inner.mor_equal(f, g)
    }
    fn mor_key(&self, f: &Mor) -> Mor {
        self.inner.mor_key(f)
    }
    fn product(&self, a: &Obj, b: &Obj) -> Product {
        self.inner.product(a, b)
    }
    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        self.inner.pair(f, g)
    }
    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        self.inner.hom(a, b, budget)
    }
    fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        self.inner.equalizer(f, g)
    }
}

impl Doctrine for BrokenExists {
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
        let e = self.inner.exists(f, x);
        if f.dom.carrier() < 2 || e.is_empty() {
            return e;
        }
        match self.inner.bottom(&f.cod) {
            Ok(bot) => {
                let mut v = e.values().to_vec();
                v[0] = bot.at(0);
                Formula::new(v)
            }
            Err(_) => e,
        }
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
    fn graph_morphism(&self, y: &Obj, a: &Obj, f: &Formula) -> Option<Mor> {
        self.inner.graph_morphism(y, a, f)
    }
    fn quotient(&self, a: &Obj, rho: &Formula) -> Result<Mor> {
        self.inner.quotient(a, rho)
    }
    fn per_view(&self, a: &Obj) -> Option<PerView> {
        self.inner.per_view(a)
    }
}

/// The identity on objects and morphisms of an `H`-valued doctrine, sending
/// every truth value other than `⊤` to `⊥`. It keeps `⊤` and `∧` but drops
/// `∨` as soon as `⊤` is join-reducible.
pub struct DropsJoins {
    d: Arc<dyn Doctrine>,
}

impl DropsJoins {
    pub fn new(d: Arc<dyn Doctrine>) -> Self {
        DropsJoins { d }
    }
}

impl DoctrineMorphism for DropsJoins {
    fn name(&self) -> String {
        format!("drops-joins({})", self.d.name())
    }
    fn source(&self) -> &Arc<dyn Doctrine> {
        &self.d
    }
    fn target(&self) -> &Arc<dyn Doctrine> {
        &self.d
    }
    fn map_obj(&self, a: &Obj) -> Result<Obj> {
        Ok(a.clone())
    }
    fn map_mor(&self, f: &Mor) -> Result<Mor> {
        Ok(f.clone())
    }
    fn map_formula(&self, a: &Obj, x: &Formula) -> Result<Formula> {
        let top = self.d.top(a);
        let bot = self.d.bottom(a)?;
        Ok(Formula::new(
            (0..x.len()).map(|i| if x.at(i) == top.at(i) { top.at(i) } else { bot.at(i) }).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doctrine::{doctrine_battery, BatteryConfig};
    use crate::lattice::HeytingAlgebra;
    use crate::models::HValuedTripos;
    use crate::morphism::{check_logical_morphism, Preservation};

    #[test]
    fn broken_exists_fails_the_adjunction() {
        let d = BrokenExists::new(Arc::new(HValuedTripos::new(HeytingAlgebra::chain(2))));
        let cfg = BatteryConfig {
            objects: vec![Obj::finite(1), Obj::finite(2)],
            max_projection_carrier: 4,
            budget: Budget::default(),
        };
        let bat = doctrine_battery(&d, &cfg).unwrap();
        let adj = bat.get("adjunctions").unwrap();
        assert!(!adj.passed());
        assert!(!adj.witnesses.is_empty());
    }

    #[test]
    fn drops_joins_only_on_the_diamond() {
        let objs = vec![Obj::finite(1)];
        for (h, keeps) in [(HeytingAlgebra::chain(2), true), (HeytingAlgebra::diamond(), false)] {
            let m = DropsJoins::new(Arc::new(HValuedTripos::new(h)));
            let r = check_logical_morphism(&m, &objs, Preservation::Logical, &Budget::default()).unwrap();
            assert_eq!(r.passed(), keeps, "{r}");
        }
    }
}
