//! Morphisms of doctrines `(F, f): P → R` and their preservation checks.

use std::collections::HashSet;
use std::sync::Arc;

use crate::category::{find_inverse, times, Budget, Formula, Mor, Obj};
use crate::doctrine::{equality_predicate, formula_eq, Doctrine};
use crate::error::{Error, Result};
use crate::report::{ValidationReport, Witness};

pub trait DoctrineMorphism: Send + Sync {
    fn name(&self) -> String;

    fn source(&self) -> &Arc<dyn Doctrine>;

    fn target(&self) -> &Arc<dyn Doctrine>;

    fn map_obj(&self, a: &Obj) -> Result<Obj>;

    fn map_mor(&self, f: &Mor) -> Result<Mor>;

    /// The fiber map `f_A: P(A) → R(FA)`.
    fn map_formula(&self, a: &Obj, x: &Formula) -> Result<Formula>;

    /// `⟨Fπ₁, Fπ₂⟩: F(A×B) → FA × FB` together with its inverse.
    fn product_comparison(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<(Mor, Mor)> {
        let s = self.source();
        let t = self.target();
        let p = s.product(a, b);
        let c = t.pair(&self.map_mor(&p.p1)?, &self.map_mor(&p.p2)?)?;
        let inv = find_inverse(t.as_ref(), &c, budget)?
            .ok_or_else(|| Error::Invalid(format!("{}: F({a}×{b}) is not a product", self.name())))?;
        Ok((c, inv))
    }
}

/// The identity morphism of a doctrine.
pub struct IdentityMorphism {
    d: Arc<dyn Doctrine>,
}

impl IdentityMorphism {
    pub fn new(d: Arc<dyn Doctrine>) -> Self {
        IdentityMorphism { d }
    }
}

impl DoctrineMorphism for IdentityMorphism {
    fn name(&self) -> String {
        format!("id_{}", self.d.name())
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
    fn map_formula(&self, _a: &Obj, x: &Formula) -> Result<Formula> {
        Ok(x.clone())
    }
    fn product_comparison(&self, a: &Obj, b: &Obj, _budget: &Budget) -> Result<(Mor, Mor)> {
        let p = self.d.product(a, b);
        Ok((self.d.identity(&p.obj), self.d.identity(&p.obj)))
    }
}

/// `second ∘ first`.
pub struct Composite {
    first: Arc<dyn DoctrineMorphism>,
    second: Arc<dyn DoctrineMorphism>,
}

impl Composite {
    pub fn new(first: Arc<dyn DoctrineMorphism>, second: Arc<dyn DoctrineMorphism>) -> Result<Self> {
        if !Arc::ptr_eq(first.target(), second.source()) {
            return Err(Error::Invalid(format!("{} does not start where {} ends", second.name(), first.name())));
        }
        Ok(Composite { first, second })
    }

    /// The composite of a non-empty chain, first morphism first.
    pub fn chain(ms: &[Arc<dyn DoctrineMorphism>]) -> Result<Arc<dyn DoctrineMorphism>> {
        let (head, rest) = ms.split_first().ok_or_else(|| Error::Invalid("empty chain".into()))?;
        let mut acc = head.clone();
        for m in rest {
            acc = Arc::new(Composite::new(acc, m.clone())?);
        }
        Ok(acc)
    }
}

impl DoctrineMorphism for Composite {
    fn name(&self) -> String {
        format!("{}∘{}", self.second.name(), self.first.name())
    }
    fn source(&self) -> &Arc<dyn Doctrine> {
        self.first.source()
    }
    fn target(&self) -> &Arc<dyn Doctrine> {
        self.second.target()
    }
    fn map_obj(&self, a: &Obj) -> Result<Obj> {
        self.second.map_obj(&self.first.map_obj(a)?)
    }
    fn map_mor(&self, f: &Mor) -> Result<Mor> {
        self.second.map_mor(&self.first.map_mor(f)?)
    }
    fn map_formula(&self, a: &Obj, x: &Formula) -> Result<Formula> {
        self.second.map_formula(&self.first.map_obj(a)?, &self.first.map_formula(a, x)?)
    }
    /// `G⟨Fπ₁,Fπ₂⟩` followed by `G`'s comparison.
    fn product_comparison(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<(Mor, Mor)> {
        let t = self.target().as_ref();
        let (c1, i1) = self.first.product_comparison(a, b, budget)?;
        let (fa, fb) = (self.first.map_obj(a)?, self.first.map_obj(b)?);
        let (c2, i2) = self.second.product_comparison(&fa, &fb, budget)?;
        let c = t.compose(&c2, &self.second.map_mor(&c1)?)?;
        let inv = t.compose(&self.second.map_mor(&i1)?, &i2)?;
        Ok((c, inv))
    }
}

/// What [`check_logical_morphism`] should demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preservation {
    /// `∃`, `∧`, `⊤` and `δ`.
    Regular,
    /// Additionally `∀`, `⟹`, `∨`, `⊥` and weak power objects.
    Logical,
}

/// Functoriality of `F`, products up to the comparison, naturality of `f`,
/// and preservation of the connectives, quantifiers, equality and (for
/// logical morphisms) weak power objects, over the fragment `objs`.
pub fn check_logical_morphism(
    m: &dyn DoctrineMorphism,
    objs: &[Obj],
    level: Preservation,
    budget: &Budget,
) -> Result<ValidationReport> {
    let s = m.source().as_ref();
    let t = m.target().as_ref();
    let logical = level == Preservation::Logical;
    let mut r = ValidationReport::new(
        if logical { "logical-morphism" } else { "regular-morphism" },
        if logical {
            "F functor; f natural; preserves ∀ ∃ ⟹ ∧ ∨ ⊤ ⊥ δ and weak power objects"
        } else {
            "F functor; f natural; preserves ∃ ∧ ⊤ δ"
        },
    );
    let mut fa = std::collections::HashMap::new();
    for a in objs {
        let fa_obj = m.map_obj(a)?;
        let fid = m.map_mor(&s.identity(a))?;
        r.case(t.mor_equal(&fid, &t.identity(&fa_obj)), || Witness::new().with("object", a).with("law", "F(id) = id"));
        fa.insert(a.clone(), fa_obj);
    }
    // fiber maps
    for a in objs {
        let fob = &fa[a];
        let fib = s.fiber(a, budget)?;
        r.domain("formulas", fib.len() as u64);
        let img: Vec<Formula> = fib.iter().map(|x| m.map_formula(a, x)).collect::<Result<_>>()?;
        r.case(formula_eq(t, fob, &m.map_formula(a, &s.top(a))?, &t.top(fob)), || {
            Witness::new().with("object", a).with("connective", "⊤")
        });
        if logical {
            r.case(formula_eq(t, fob, &m.map_formula(a, &s.bottom(a)?)?, &t.bottom(fob)?), || {
                Witness::new().with("object", a).with("connective", "⊥")
            });
        }
        for (i, x) in fib.iter().enumerate() {
            r.case(t.contains(fob, &img[i]), || Witness::new().with("object", a).with("x", s.show_formula(a, x)).with("law", "f_A lands in R(FA)"));
            for (j, y) in fib.iter().enumerate() {
                let lhs = m.map_formula(a, &s.meet(a, x, y))?;
                r.case(formula_eq(t, fob, &lhs, &t.meet(fob, &img[i], &img[j])), || {
                    Witness::new().with("object", a).with("x", s.show_formula(a, x)).with("y", s.show_formula(a, y)).with("connective", "∧")
                });
                if logical {
                    let lhs = m.map_formula(a, &s.join(a, x, y)?)?;
                    r.case(formula_eq(t, fob, &lhs, &t.join(fob, &img[i], &img[j])?), || {
                        Witness::new().with("object", a).with("x", s.show_formula(a, x)).with("y", s.show_formula(a, y)).with("connective", "∨")
                    });
                    let lhs = m.map_formula(a, &s.implies(a, x, y)?)?;
                    r.case(formula_eq(t, fob, &lhs, &t.implies(fob, &img[i], &img[j])?), || {
                        Witness::new().with("object", a).with("x", s.show_formula(a, x)).with("y", s.show_formula(a, y)).with("connective", "⟹")
                    });
                }
            }
        }
        // equality: f_{A×A}(δ_A) = c*(δ_FA)
        let (c, _) = m.product_comparison(a, a, budget)?;
        let paa = s.product(a, a);
        let lhs = m.map_formula(&paa.obj, &equality_predicate(s, a)?)?;
        let rhs = t.reindex(&c, &equality_predicate(t, fob)?);
        r.case(formula_eq(t, &c.dom, &lhs, &rhs), || Witness::new().with("object", a).with("connective", "δ"));
    }
    // functor, naturality, quantifiers
    for a in objs {
        for b in objs {
            let fib_a = s.fiber(a, budget)?;
            let fib_b = s.fiber(b, budget)?;
            let (c, c_inv) = m.product_comparison(a, b, budget)?;
            r.case(
                t.mor_equal(&t.compose(&c, &c_inv)?, &t.identity(&c.cod))
                    && t.mor_equal(&t.compose(&c_inv, &c)?, &t.identity(&c.dom)),
                || Witness::new().with("A", a).with("B", b).with("law", "product comparison invertible"),
            );
            for h in s.hom(a, b, budget)? {
                let fh = m.map_mor(&h)?;
                r.case(fh.dom == fa[a] && fh.cod == fa[b], || Witness::new().with("h", &h).with("law", "F(h): FA → FB"));
                for cc in objs {
                    for g in s.hom(b, cc, budget)? {
                        let lhs = m.map_mor(&s.compose(&g, &h)?)?;
                        let rhs = t.compose(&m.map_mor(&g)?, &fh)?;
                        r.case(t.mor_equal(&lhs, &rhs), || Witness::new().with("h", &h).with("g", &g).with("law", "F(g∘h) = Fg∘Fh"));
                    }
                }
                for y in &fib_b {
                    let lhs = m.map_formula(a, &s.reindex(&h, y))?;
                    let rhs = t.reindex(&fh, &m.map_formula(b, y)?);
                    r.case(formula_eq(t, &fa[a], &lhs, &rhs), || {
                        Witness::new().with("h", &h).with("beta", s.show_formula(b, y)).with("law", "naturality")
                    });
                }
                for x in &fib_a {
                    let fx = m.map_formula(a, x)?;
                    let lhs = m.map_formula(b, &s.exists(&h, x))?;
                    let rhs = t.exists(&fh, &fx);
                    r.case(formula_eq(t, &fa[b], &lhs, &rhs), || {
                        Witness::new().with("h", &h).with("alpha", s.show_formula(a, x)).with("connective", "∃")
                    });
                    if logical {
                        let lhs = m.map_formula(b, &s.forall(&h, x)?)?;
                        let rhs = t.forall(&fh, &fx)?;
                        r.case(formula_eq(t, &fa[b], &lhs, &rhs), || {
                            Witness::new().with("h", &h).with("alpha", s.show_formula(a, x)).with("connective", "∀")
                        });
                    }
                }
            }
        }
    }
    if logical {
        r.absorb(check_preserves_weak_powers(m, objs, budget)?);
    }
    Ok(r)
}

/// The image of `(ℙA, ∈_A)` is a weak power object of `FA`: every formula
/// over `FA × FY` is classified by some `FY → F(ℙA)`. Restricted to objects
/// with at most two points to keep the hom-sets enumerable.
pub fn check_preserves_weak_powers(m: &dyn DoctrineMorphism, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let s = m.source().as_ref();
    let t = m.target().as_ref();
    let mut r = ValidationReport::new("weak-power-preservation", "(F ℙA, f(∈_A)) is a weak power object of FA");
    let small: Vec<&Obj> = objs.iter().filter(|o| o.carrier() <= 2).collect();
    for a in &small {
        let (pa, mem) = s.weak_power(a)?;
        let (_, c_inv) = m.product_comparison(a, &pa, budget)?;
        let p_mem = s.product(a, &pa);
        let mem_t = t.reindex(&c_inv, &m.map_formula(&p_mem.obj, &mem)?);
        let fa = m.map_obj(a)?;
        let fpa = m.map_obj(&pa)?;
        let id = t.identity(&fa);
        for y in &small {
            let fy = m.map_obj(y)?;
            let p = t.product(&fa, &fy);
            let mut hit = HashSet::new();
            for g in t.hom(&fy, &fpa, budget)? {
                hit.insert(t.reindex(&times(t, &id, &g)?, &mem_t));
            }
            let fib = t.fiber(&p.obj, budget)?;
            r.domain("gamma", fib.len() as u64);
            for gamma in &fib {
                let found = hit.iter().any(|h| formula_eq(t, &p.obj, h, gamma));
                r.case(found, || Witness::new().with("A", a).with("Y", y).with("gamma", t.show_formula(&p.obj, gamma)));
            }
        }
    }
    Ok(r)
}
