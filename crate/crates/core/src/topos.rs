//! Elementary-topos structure of a cauchy-complete extensional tripos with
//! full comprehensions and effective quotients: terminal object, equalizers,
//! pullbacks, strong power objects, characteristic maps, and the
//! construction of quotients from strong power objects.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{
    check_pullback, check_pullback_indexed, factor_after, factor_through, find_inverse, is_mono, pullback, times, Budget, Formula,
    ConeIndex, Mor, Obj, PullbackSquare,
};
use crate::completeness::{check_complete, equivalence_relations};
use crate::completions::Kind;
use crate::doctrine::{
    equality_predicate, extensional_equivalence, find_graph_morphism, formula_eq, has_strong_power_objects, iff,
    triple, Doctrine,
};
use crate::error::{Error, Result};
use crate::report::{Battery, ValidationReport, Witness};
use crate::subobject::{doctrine_isomorphism_check, SubobjectDoctrine};

/// `A / ⊤_{A×A}`.
pub fn terminal_object(d: &dyn Doctrine, a: &Obj) -> Result<Obj> {
    let aa = d.product(a, a).obj;
    Ok(d.quotient(a, &d.top(&aa))?.cod)
}

/// `⌊⟨f,g⟩*δ_B⌋`.
pub fn equalizer(d: &dyn Doctrine, f: &Mor, g: &Mor) -> Result<Mor> {
    let fg = d.pair(f, g)?;
    d.comprehension(&f.dom, &d.reindex(&fg, &equality_predicate(d, &f.cod)?))
}

/// `⊤_{A/ρ} = ∃_q ⊤_A`.
pub fn internal_surjectivity_check(d: &dyn Doctrine, a: &Obj, rho: &Formula) -> Result<bool> {
    let q = d.quotient(a, rho)?;
    Ok(formula_eq(d, &q.cod, &d.top(&q.cod), &d.exists(&q, &d.top(a))))
}

/// `r: ℙA → 𝒫A = ℙA/⇔_A` with `in_A` over `A × 𝒫A`.
#[derive(Clone)]
pub struct PowerObject {
    pub a: Obj,
    pub weak: Obj,
    pub membership: Formula,
    pub obj: Obj,
    pub r: Mor,
    pub in_a: Formula,
}

pub fn strong_power_object(d: &dyn Doctrine, a: &Obj) -> Result<PowerObject> {
    let (weak, membership) = d.weak_power(a)?;
    let (_, equiv) = extensional_equivalence(d, a)?;
    let r = d.quotient(&weak, &equiv)?;
    let obj = r.cod.clone();
    // ∃_{⟨π₁,π₃⟩}(⟨π₁,π₂⟩*∈_A ∧ ⟨rπ₂,π₃⟩*δ_{𝒫A}) over A × ℙA × 𝒫A
    let t = triple(d, a, &weak, &obj)?;
    let r2 = d.pair(&d.compose(&r, &t.p[1])?, &t.p[2])?;
    let body = d.meet(
        &t.obj,
        &d.reindex(&t.p12, &membership),
        &d.reindex(&r2, &equality_predicate(d, &obj)?),
    );
    Ok(PowerObject {
        a: a.clone(),
        in_a: d.exists(&t.p13, &body),
        weak,
        membership,
        obj,
        r,
    })
}

/// Classifiers `{φ}: B → ℙA` for every `φ` over `A × B`, keyed by `φ`.
pub struct Classifiers {
    table: HashMap<Formula, Mor>,
}

impl Classifiers {
    pub fn new(d: &dyn Doctrine, p: &PowerObject, b: &Obj, budget: &Budget) -> Result<Self> {
        let id = d.identity(&p.a);
        let mut table = HashMap::new();
        for g in d.hom(b, &p.weak, budget)? {
            table.entry(d.reindex(&times(d, &id, &g)?, &p.membership)).or_insert(g);
        }
        Ok(Classifiers { table })
    }

    pub fn weak(&self, phi: &Formula) -> Result<&Mor> {
        self.table.get(phi).ok_or(Error::NoClassifier)
    }
}

/// `χ_φ = r ∘ {φ}`.
pub fn char_morphism(d: &dyn Doctrine, p: &PowerObject, cls: &Classifiers, phi: &Formula) -> Result<Mor> {
    d.compose(&p.r, cls.weak(phi)?)
}

/// `factor_through` for a comprehension `m`, trying the doctrine's own
/// factor first. A verified candidate is the factor since `m` is monic.
/// `⊤ ≤ h*⊤` rules out candidates that are arrows but not morphisms.
pub fn factor_through_comprehension(d: &dyn Doctrine, m: &Mor, g: &Mor, budget: &Budget) -> Result<Option<Mor>> {
    if let Some(h) = d.comprehension_factor(m, g) {
        if h.dom == g.dom
            && h.cod == m.dom
            && d.leq(&h.dom, &d.top(&h.dom), &d.reindex(&h, &d.top(&h.cod)))
            && d.mor_equal(&d.compose(m, &h)?, g)
        {
            return Ok(Some(h));
        }
    }
    factor_through(d, m, g, budget)
}

/// `⌊in_A⌋: ε_A → A × 𝒫A`.
pub fn membership_mono(d: &dyn Doctrine, p: &PowerObject) -> Result<Mor> {
    d.comprehension(&d.product(&p.a, &p.obj).obj, &p.in_a)
}

/// The square `⌊φ⌋`, `⌊in_A⌋`, `id × χ_φ` commutes and is a pullback, for
/// cones from the objects `cones` was built on.
pub fn power_object_pullback_check(
    d: &dyn Doctrine,
    p: &PowerObject,
    chi: &Mor,
    phi: &Formula,
    cones: &ConeIndex,
    budget: &Budget,
) -> Result<ValidationReport> {
    let left = d.comprehension(&d.product(&p.a, &chi.dom).obj, phi)?;
    let right = membership_mono(d, p)?;
    let bottom = times(d, &d.identity(&p.a), chi)?;
    let g = d.compose(&bottom, &left)?;
    let Some(top) = factor_through_comprehension(d, &right, &g, budget)? else {
        let mut r = ValidationReport::new("power-pullback", "⌊φ⌋ is the pullback of ⌊in_A⌋ along id×χ_φ");
        r.fail(Witness::new().with("A", &p.a).with("chi", chi).with("law", "square does not commute"));
        return Ok(r);
    };
    let sq = PullbackSquare {
        apex: left.dom.clone(),
        top,
        left,
        right,
        bottom,
    };
    let mut r = check_pullback_indexed(d, &sq, cones, budget)?;
    r.check = "power-pullback".into();
    r.law = "⌊φ⌋ is the pullback of ⌊in_A⌋ along id×χ_φ".into();
    Ok(r)
}

/// `φ ↦ χ_φ` is a bijection `P(A×B) ≅ hom(B, 𝒫A)` with
/// `(id × χ_φ)*in_A = φ`, and every square of the classification is a
/// pullback.
pub fn check_classification(
    d: &dyn Doctrine,
    p: &PowerObject,
    b: &Obj,
    tests: &[Obj],
    budget: &Budget,
) -> Result<(ValidationReport, ValidationReport)> {
    let mut r = ValidationReport::new("classification", "φ ↦ χ_φ bijective; (id×χ_φ)*in_A = φ");
    let mut sq = ValidationReport::new("power-pullback", "⌊φ⌋ is the pullback of ⌊in_A⌋ along id×χ_φ");
    let ab = d.product(&p.a, b).obj;
    let id = d.identity(&p.a);
    let cls = Classifiers::new(d, p, b, budget)?;
    let hs = d.hom(b, &p.obj, budget)?;
    let mut seen: HashMap<Formula, usize> = HashMap::new();
    for (i, g) in hs.iter().enumerate() {
        let psi = d.reindex(&times(d, &id, g)?, &p.in_a);
        if let Some(&j) = seen.get(&psi) {
            r.fail(Witness::new().with("A", &p.a).with("B", b).with("g", g).with("h", &hs[j]).with("law", "injective"));
        }
        seen.insert(psi, i);
    }
    let fib = d.fiber(&ab, budget)?;
    r.domain("formulas", fib.len() as u64);
    let cones = ConeIndex::new(d, &membership_mono(d, p)?, tests, budget)?;
    for phi in &fib {
        let show = || d.show_formula(&ab, phi);
        let chi = match char_morphism(d, p, &cls, phi) {
            Ok(c) => c,
            Err(e) => {
                r.fail(Witness::new().with("A", &p.a).with("B", b).with("phi", show()).with("error", e));
                continue;
            }
        };
        let back = d.reindex(&times(d, &id, &chi)?, &p.in_a);
        r.case(formula_eq(d, &ab, &back, phi), || {
            Witness::new().with("A", &p.a).with("B", b).with("phi", show()).with("law", "(id×χ)*in = φ")
        });
        let same = seen.get(phi).map(|&i| &hs[i]).filter(|h| d.mor_equal(h, &chi));
        r.case(same.is_some(), || {
            Witness::new().with("A", &p.a).with("B", b).with("phi", show()).with("law", "χ_φ unique")
        });
        // the hom representative composes in the underlying stage
        sq.absorb(power_object_pullback_check(d, p, same.unwrap_or(&chi), phi, &cones, budget)?);
    }
    r.case(seen.len() == fib.len(), || {
        Witness::new().with("A", &p.a).with("B", b).with("hom", hs.len()).with("fiber", fib.len())
    });
    Ok((r, sq))
}

/// Every mono `f: A → B` is isomorphic to `⌊∃_f ⊤⌋`: `k` factors `f`
/// through the comprehension and `k′` is the morphism whose graph is
/// `(⌊∃_f⊤⌋ × f)*δ_B`; both composites are identities. Monos also satisfy
/// `(f×f)*δ_B = δ_A`.
pub fn mono_comprehension_check(
    d: &dyn Doctrine,
    objs: &[Obj],
    budget: &Budget,
) -> Result<(ValidationReport, ValidationReport)> {
    let mut r = ValidationReport::new("compmono", "f mono ⟹ f ≅ ⌊∃_f⊤⌋ via k, k′ mutually inverse");
    let mut eq = ValidationReport::new("mono-equality", "f mono ⟹ (f×f)*δ_B = δ_A");
    for a in objs {
        for b in objs {
            let delta_b = equality_predicate(d, b)?;
            let delta_a = equality_predicate(d, a)?;
            let aa = d.product(a, a).obj;
            for f in d.hom(a, b, budget)? {
                if !is_mono(d, &f, objs, budget)? {
                    continue;
                }
                r.domain("monos", 1);
                let kernel = d.reindex(&times(d, &f, &f)?, &delta_b);
                eq.case(formula_eq(d, &aa, &kernel, &delta_a), || Witness::new().with("f", &f));
                let m = d.comprehension(b, &d.exists(&f, &d.top(a)))?;
                let Some(k) = factor_through(d, &m, &f, budget)? else {
                    r.fail(Witness::new().with("f", &f).with("law", "f factors through ⌊∃_f⊤⌋"));
                    continue;
                };
                let x = &m.dom;
                let graph = d.reindex(&times(d, &m, &f)?, &delta_b);
                let k2 = match find_graph_morphism(d, x, a, &graph, budget) {
                    Ok(k2) => k2,
                    Err(Error::NoGraph) => {
                        r.fail(Witness::new().with("f", &f).with("law", "k′ exists"));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let ok = d.mor_equal(&d.compose(&k2, &k)?, &d.identity(a))
                    && d.mor_equal(&d.compose(&k, &k2)?, &d.identity(x));
                r.case(ok, || Witness::new().with("f", &f).with("k", &k).with("k′", &k2));
            }
        }
    }
    Ok((r, eq))
}

/// Remark-style quotient of `ρ` built from strong power objects.
pub struct PowerQuotient {
    /// `σ` over `ℙA`.
    pub sigma: Formula,
    /// `⌊σ⌋: A/ρ → ℙA`.
    pub classes: Mor,
    /// `q: A → A/ρ`.
    pub q: Mor,
}

/// Product shape used for `σ`: the inner formula lives over the left-nested
/// triple `A × A × ℙA`, the outer one over `A × ℙA`.
pub const SIGMA_SHAPE: &str = "σ = ∃_{π₂}(∈_A ∧ ∀_{⟨π₁,π₃⟩}(⟨π₁,π₂⟩*ρ ⟺ ⟨π₂,π₃⟩*∈_A)) over ((A×A)×ℙA), outer over (A×ℙA)";

/// `A/ρ = dom ⌊σ⌋` with `σ = ∃_{π₂}(∈_A ∧ ∀_{⟨π₁,π₃⟩}(⟨π₁,π₂⟩*ρ ⟺ ⟨π₂,π₃⟩*∈_A))`,
/// the inner formula living over `A × A × ℙA` and the outer one over `A × ℙA`.
/// `q` has graph `(id × ⌊σ⌋)*C` where `C(a,S) = ∀x (ρ(a,x) ⟺ x ∈ S)`.
pub fn quotients_from_strong_powers(d: &dyn Doctrine, a: &Obj, rho: &Formula, budget: &Budget) -> Result<PowerQuotient> {
    let (pa, mem) = d.weak_power(a)?;
    let t = triple(d, a, a, &pa)?;
    let body = iff(d, &t.obj, &d.reindex(&t.p12, rho), &d.reindex(&t.p23, &mem))?;
    let class_of = d.forall(&t.p13, &body)?;
    let apa = d.product(a, &pa);
    let sigma = d.exists(&apa.p2, &d.meet(&apa.obj, &mem, &class_of));
    let classes = d.comprehension(&pa, &sigma)?;
    let graph = d.reindex(&times(d, &d.identity(a), &classes)?, &class_of);
    let q = find_graph_morphism(d, a, &classes.dom, &graph, budget)?;
    Ok(PowerQuotient { sigma, classes, q })
}

/// The morphism `A/ρ → Y` with graph
/// `∃_{⟨π₂,π₃⟩}(⟨π₁,π₂⟩*(id×⌊σ⌋)*∈_A ∧ ⟨π₁,π₃⟩*(id×f)*δ_Y)`.
pub fn power_quotient_mediator(d: &dyn Doctrine, pq: &PowerQuotient, f: &Mor, budget: &Budget) -> Result<Mor> {
    let (a, y, c) = (&f.dom, &f.cod, &pq.classes.dom);
    let (_, mem) = d.weak_power(a)?;
    let t = triple(d, a, c, y)?;
    let in_c = d.reindex(&times(d, &d.identity(a), &pq.classes)?, &mem);
    let gf = d.reindex(&times(d, f, &d.identity(y))?, &equality_predicate(d, y)?);
    let body = d.meet(&t.obj, &d.reindex(&t.p12, &in_c), &d.reindex(&t.p13, &gf));
    find_graph_morphism(d, c, y, &d.exists(&t.p23, &body), budget)
}

/// Power-object quotients are effective, universal through the displayed
/// mediator, and isomorphic under `q` to the doctrine's own quotients.
pub fn check_power_quotients(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(
        "power-quotients",
        "A/ρ from ℙA: ρ = (q×q)*δ; mediators unique; iso to the quotient of ρ",
    );
    r.note(SIGMA_SHAPE);
    for a in objs {
        let aa = d.product(a, a).obj;
        for rho in equivalence_relations(d, a, budget)? {
            r.domain("relations", 1);
            let show = || d.show_formula(&aa, &rho);
            let pq = match quotients_from_strong_powers(d, a, &rho, budget) {
                Ok(pq) => pq,
                Err(e) => {
                    r.fail(Witness::new().with("A", a).with("rho", show()).with("error", e));
                    continue;
                }
            };
            let q = &pq.q;
            let kernel = d.reindex(&times(d, q, q)?, &equality_predicate(d, &q.cod)?);
            r.case(formula_eq(d, &aa, &kernel, &rho), || {
                Witness::new().with("A", a).with("rho", show()).with("law", "effective")
            });
            // an internally surjective q is epi, which gives uniqueness when
            // hom(A/ρ, Y) is too large to search
            let c = &q.cod;
            let surjective = d.leq(c, &d.top(c), &d.exists(q, &d.top(a)));
            r.case(surjective, || Witness::new().with("A", a).with("rho", show()).with("law", "q surjective"));
            for y in objs {
                let delta_y = equality_predicate(d, y)?;
                for f in d.hom(a, y, budget)? {
                    if !d.leq(&aa, &rho, &d.reindex(&times(d, &f, &f)?, &delta_y)) {
                        continue;
                    }
                    let ok = match power_quotient_mediator(d, &pq, &f, budget) {
                        Ok(h) => {
                            d.mor_equal(&d.compose(&h, q)?, &f)
                                && match factor_after(d, q, &f, budget) {
                                    Ok(u) => u.is_some_and(|u| d.mor_equal(&u, &h)),
                                    Err(e) if e.is_budget() => surjective,
                                    Err(e) => return Err(e),
                                }
                        }
                        Err(Error::NoGraph) => false,
                        Err(e) => return Err(e),
                    };
                    r.case(ok, || Witness::new().with("A", a).with("rho", show()).with("f", &f).with("law", "mediator"));
                }
            }
            let native = d.quotient(a, &rho)?;
            let ok = match power_quotient_mediator(d, &pq, &native, budget) {
                Ok(i) => d.mor_equal(&d.compose(&i, q)?, &native) && find_inverse(d, &i, budget)?.is_some(),
                Err(Error::NoGraph) => false,
                Err(e) => return Err(e),
            };
            r.case(ok, || Witness::new().with("A", a).with("rho", show()).with("law", "iso to the quotient"));
        }
    }
    Ok(r)
}

/// Bounds for [`check_topos`].
#[derive(Debug, Clone)]
pub struct ToposConfig {
    /// Registered objects: limits, monos and quotients are checked among these.
    pub objects: Vec<Obj>,
    /// Objects whose strong power objects are built.
    pub power_objects: Vec<Obj>,
    /// Parameter objects `B` for the classification of formulas over `A × B`.
    pub classified: Vec<Obj>,
    pub budget: Budget,
}

/// Census of the assembled structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToposStructure {
    pub terminal: String,
    /// `(A, 𝒫A, |hom(1, 𝒫A)|)`.
    pub powers: Vec<(String, String, usize)>,
    pub hom_counts: Vec<(String, String, usize)>,
}

/// The terminal object of the registered fragment: `|hom(X, T)| = 1`.
pub fn check_terminal(d: &dyn Doctrine, t: &Obj, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("terminal", "|hom(X, A/⊤)| = 1");
    for x in objs.iter().chain(std::iter::once(t)) {
        let n = d.hom(x, t, budget)?.len();
        r.case(n == 1, || Witness::new().with("X", x).with("morphisms", n));
    }
    Ok(r)
}

/// `⌊⟨f,g⟩*δ⌋` equalizes `f, g` and every equalizing `h` factors through it
/// uniquely.
pub fn check_equalizers(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("equalizers", "f∘e = g∘e; f∘h = g∘h iff h factors uniquely through e");
    for a in objs {
        for b in objs {
            let hs = d.hom(a, b, budget)?;
            for f in &hs {
                for g in &hs {
                    let e = equalizer(d, f, g)?;
                    r.case(d.mor_equal(&d.compose(f, &e)?, &d.compose(g, &e)?), || {
                        Witness::new().with("f", f).with("g", g).with("law", "equalizes")
                    });
                    for z in objs {
                        let us = d.hom(z, &e.dom, budget)?;
                        for h in d.hom(z, a, budget)? {
                            let holds = d.mor_equal(&d.compose(f, &h)?, &d.compose(g, &h)?);
                            let mut n = 0;
                            for u in &us {
                                if d.mor_equal(&d.compose(&e, u)?, &h) {
                                    n += 1;
                                }
                            }
                            r.case(n == usize::from(holds), || {
                                Witness::new().with("f", f).with("g", g).with("h", &h).with("mediators", n)
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Pullbacks built from products and equalizers, for every cospan.
pub fn check_pullbacks(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("pullbacks", "∀ cones (p,q) with h∘p = k∘q ∃! u");
    for w in objs {
        let mut into = Vec::new();
        for y in objs {
            into.extend(d.hom(y, w, budget)?);
        }
        for h in &into {
            for k in &into {
                r.absorb(check_pullback(d, &pullback(d, h, k)?, objs, budget)?);
            }
        }
    }
    Ok(r)
}

pub fn check_internal_surjectivity(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("internal-surjectivity", "⊤_{A/ρ} = ∃_q ⊤_A");
    for a in objs {
        let aa = d.product(a, a).obj;
        for rho in equivalence_relations(d, a, budget)? {
            let ok = internal_surjectivity_check(d, a, &rho)?;
            r.case(ok, || Witness::new().with("A", a).with("rho", d.show_formula(&aa, &rho)));
        }
    }
    Ok(r)
}

/// Completeness properties, then the topos structure. Assembly is refused
/// (no structure returned) when a completeness property fails.
pub fn check_topos(d: &Arc<dyn Doctrine>, cfg: &ToposConfig) -> Result<(Option<ToposStructure>, Battery)> {
    let dd = d.as_ref();
    let b = &cfg.budget;
    let objs = &cfg.objects;
    let mut bat = Battery::new(&format!("topos({})", d.name()));
    for kind in Kind::PIPELINE {
        bat.push(check_complete(kind, dd, objs, b)?);
    }
    if !bat.passed() {
        return Ok((None, bat));
    }
    let first = objs.first().ok_or_else(|| Error::Invalid("no registered objects".into()))?;
    let t = terminal_object(dd, first)?;
    bat.push(check_terminal(dd, &t, objs, b)?);
    bat.push(check_equalizers(dd, objs, b)?);
    bat.push(check_pullbacks(dd, objs, b)?);
    bat.push(check_internal_surjectivity(dd, objs, b)?);
    let (compmono, mono_eq) = mono_comprehension_check(dd, objs, b)?;
    bat.push(compmono);
    bat.push(mono_eq);
    let mut strong = ValidationReport::new("strong-power", "δ_ℙA = ⇔_A");
    let mut cls = ValidationReport::new("classification", "φ ↦ χ_φ bijective; (id×χ_φ)*in_A = φ");
    let mut sq = ValidationReport::new("power-pullback", "⌊φ⌋ is the pullback of ⌊in_A⌋ along id×χ_φ");
    let mut powers = Vec::new();
    for a in &cfg.power_objects {
        strong.case(has_strong_power_objects(dd, a)?, || Witness::new().with("A", a));
        let p = strong_power_object(dd, a)?;
        for bo in &cfg.classified {
            let (r1, r2) = check_classification(dd, &p, bo, objs, b)?;
            cls.absorb(r1);
            sq.absorb(r2);
        }
        powers.push((a.to_string(), p.obj.to_string(), d.hom(&t, &p.obj, b)?.len()));
    }
    bat.push(strong);
    bat.push(cls);
    bat.push(sq);
    bat.push(check_power_quotients(dd, objs, b)?);
    let sub = SubobjectDoctrine::new(d.clone(), objs.clone(), *b);
    bat.push(doctrine_isomorphism_check(dd, &sub, &|a, x| sub.candidate(a, x), objs, b)?);
    let mut hom_counts = Vec::new();
    for x in objs {
        for y in objs {
            hom_counts.push((x.to_string(), y.to_string(), d.hom(x, y, b)?.len()));
        }
    }
    Ok((
        Some(ToposStructure {
            terminal: t.to_string(),
            powers,
            hom_counts,
        }),
        bat,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completions::Pipeline;
    use crate::lattice::HeytingAlgebra;
    use crate::models::{HValuedTripos, SubsetTripos};

    fn b() -> Budget {
        Budget::default()
    }

    fn pipeline(d: Arc<dyn Doctrine>) -> Pipeline {
        Pipeline::tripos_to_topos(d)
    }

    fn embed(p: &Pipeline, ns: &[usize]) -> Vec<Obj> {
        ns.iter().map(|&n| p.embed(&Obj::finite(n)).unwrap()).collect()
    }

    #[test]
    fn subset_pipeline_is_a_topos() {
        let p = pipeline(Arc::new(SubsetTripos::new()));
        let objs = embed(&p, &[1, 2]);
        let cfg = ToposConfig {
            objects: objs.clone(),
            power_objects: objs.clone(),
            classified: objs,
            budget: b(),
        };
        let (s, bat) = check_topos(p.output(), &cfg).unwrap();
        assert!(bat.passed(), "{bat}");
        let s = s.unwrap();
        assert_eq!(s.powers.iter().map(|p| p.2).collect::<Vec<_>>(), [2, 4]);
    }

    #[test]
    fn truth_values_of_the_three_chain() {
        let p = pipeline(Arc::new(HValuedTripos::new(HeytingAlgebra::chain(3))));
        let d = p.output().as_ref();
        let one = p.embed(&Obj::finite(1)).unwrap();
        let t = terminal_object(d, &one).unwrap();
        let pw = strong_power_object(d, &one).unwrap();
        assert_eq!(d.hom(&t, &pw.obj, &b()).unwrap().len(), 3);
        assert_eq!(d.hom(&t, &t, &b()).unwrap().len(), 1);
    }

    #[test]
    fn equalizer_of_identity_and_swap_has_no_points() {
        let p = pipeline(Arc::new(SubsetTripos::new()));
        let d = p.output().as_ref();
        let [one, two] = &embed(&p, &[1, 2])[..] else { unreachable!() };
        let swap = p.embed_mor_upto(&Mor::fun(Obj::finite(2), Obj::finite(2), vec![1, 0]), 4).unwrap();
        let e = equalizer(d, &d.identity(two), &swap).unwrap();
        assert!(d.hom(one, &e.dom, &b()).unwrap().is_empty());
        let same = equalizer(d, &swap, &swap).unwrap();
        assert!(find_inverse(d, &same, &b()).unwrap().is_some());
    }

    #[test]
    fn power_quotient_of_the_total_relation_is_terminal() {
        let p = pipeline(Arc::new(SubsetTripos::new()));
        let d = p.output().as_ref();
        let [one, two] = &embed(&p, &[1, 2])[..] else { unreachable!() };
        let tt = d.top(&d.product(two, two).obj);
        let pq = quotients_from_strong_powers(d, two, &tt, &b()).unwrap();
        assert_eq!(d.hom(&pq.q.cod, one, &b()).unwrap().len(), 1);
        assert_eq!(d.hom(one, &pq.q.cod, &b()).unwrap().len(), 1);
    }

    #[test]
    fn assembly_is_refused_before_cauchy_completion() {
        let p = Pipeline::run(Arc::new(HValuedTripos::new(HeytingAlgebra::diamond())), &[Kind::C, Kind::Q, Kind::E]);
        let objs: Vec<Obj> = [1, 2].iter().map(|&n| p.embed(&Obj::finite(n)).unwrap()).collect();
        let cfg = ToposConfig {
            objects: objs,
            power_objects: vec![],
            classified: vec![],
            budget: b(),
        };
        let (s, bat) = check_topos(p.output(), &cfg).unwrap();
        assert!(s.is_none());
        let cc = bat.get("cauchy-complete").unwrap();
        assert!(cc.first_witness().unwrap().0.iter().any(|(k, _)| k == "no-graph"));
    }

    #[test]
    fn own_comprehension_factors_agree_with_the_search() {
        for d in [
            Arc::new(SubsetTripos::new()) as Arc<dyn Doctrine>,
            Arc::new(HValuedTripos::new(HeytingAlgebra::chain(2))),
        ] {
            let p = pipeline(d.clone());
            let stages = std::iter::once(d).chain(p.stages.iter().map(|s| s.doctrine.clone()));
            for (n, d) in stages.enumerate() {
                let d = d.as_ref();
                let a = p.embed_upto(&Obj::finite(2), n).unwrap();
                let z = p.embed_upto(&Obj::finite(2), n).unwrap();
                for alpha in d.fiber(&a, &b()).unwrap() {
                    let Ok(m) = d.comprehension(&a, &alpha) else { continue };
                    for g in d.hom(&z, &a, &b()).unwrap() {
                        let fast = factor_through_comprehension(d, &m, &g, &b()).unwrap();
                        let slow = factor_through(d, &m, &g, &b()).unwrap();
                        match (fast, slow) {
                            (Some(x), Some(y)) => assert!(d.mor_equal(&x, &y), "stage {n}"),
                            (x, y) => assert_eq!(x.is_some(), y.is_some(), "stage {n}: {g}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn functional_formulas_are_their_own_morphisms_at_the_end() {
        let p = pipeline(Arc::new(HValuedTripos::new(HeytingAlgebra::chain(2))));
        let d = p.output().as_ref();
        let [one, two] = &embed(&p, &[1, 2])[..] else { unreachable!() };
        let delta = equality_predicate(d, two).unwrap();
        for y in [one, two] {
            for f in d.hom(y, two, &b()).unwrap() {
                let graph = d.reindex(&times(d, &f, &d.identity(two)).unwrap(), &delta);
                let g = d.graph_morphism(y, two, &graph).unwrap();
                assert!(d.mor_equal(&f, &g), "{f}");
            }
        }
        let everything = d.top(&d.product(two, two).obj);
        assert!(d.graph_morphism(two, two, &everything).is_none());
        // the stages below are not built from functional formulas
        assert!(p.stages[2].doctrine.graph_morphism(two, two, &delta).is_none());
    }

    #[test]
    fn a_cone_index_is_tied_to_its_right_leg() {
        let p = pipeline(Arc::new(SubsetTripos::new()));
        let d = p.output().as_ref();
        let [one, two] = &embed(&p, &[1, 2])[..] else { unreachable!() };
        let bang = d.hom(two, one, &b()).unwrap().remove(0);
        let square = pullback(d, &bang, &bang).unwrap();
        let index = ConeIndex::new(d, &bang, &[one.clone(), two.clone()], &b()).unwrap();
        assert!(check_pullback_indexed(d, &square, &index, &b()).unwrap().passed());
        let other = ConeIndex::new(d, &d.identity(one), std::slice::from_ref(one), &b()).unwrap();
        assert!(check_pullback_indexed(d, &square, &other, &b()).is_err());
    }
}
