//! Doctrines, regular doctrines and triposes, with the derived predicates
//! (internal equality, equivalence relations, functional formulas) and the
//! exhaustive axiom checkers.

use std::collections::HashMap;

use crate::category::{nary_product, times, tuple, Budget, Category, Formula, Mor, Obj, PullbackSquare};
use crate::error::{Error, Result};
use crate::lattice::{left_adjoint_indices, right_adjoint_indices};
use crate::per::PerView;
use crate::report::{Battery, ValidationReport, Witness};

/// `P: 𝒞^op → ISL` together with whatever further structure the instance
/// carries. Regular structure (`exists`) is required; Heyting operations,
/// universal quantifiers, weak power objects, comprehensions and quotients
/// are optional capabilities reporting `Unsupported` when absent.
pub trait Doctrine: Category {
    fn top(&self, a: &Obj) -> Formula;

    fn meet(&self, a: &Obj, x: &Formula, y: &Formula) -> Formula;

    fn leq(&self, a: &Obj, x: &Formula, y: &Formula) -> bool;

    /// Every element of `P(a)`, in canonical order.
    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>>;

    fn contains(&self, a: &Obj, x: &Formula) -> bool;

    /// `f*: P(cod f) → P(dom f)`.
    fn reindex(&self, f: &Mor, x: &Formula) -> Formula;

    /// `∃_f: P(dom f) → P(cod f)`.
    fn exists(&self, f: &Mor, x: &Formula) -> Formula;

    fn is_heyting(&self) -> bool {
        false
    }

    fn bottom(&self, _a: &Obj) -> Result<Formula> {
        Err(self.missing("⊥"))
    }

    fn join(&self, _a: &Obj, _x: &Formula, _y: &Formula) -> Result<Formula> {
        Err(self.missing("∨"))
    }

    fn implies(&self, _a: &Obj, _x: &Formula, _y: &Formula) -> Result<Formula> {
        Err(self.missing("⟹"))
    }

    fn forall(&self, _f: &Mor, _x: &Formula) -> Result<Formula> {
        Err(self.missing("∀"))
    }

    /// `(ℙa, ∈_a)` with `∈_a` over `a × ℙa`.
    fn weak_power(&self, _a: &Obj) -> Result<(Obj, Formula)> {
        Err(self.missing("weak power objects"))
    }

    /// `⌊α⌋: X → a`.
    fn comprehension(&self, _a: &Obj, _alpha: &Formula) -> Result<Mor> {
        Err(self.missing("comprehensions"))
    }

    /// A candidate `h` with `m ∘ h = g`, for `m` a comprehension of this
    /// doctrine. Callers verify it; `None` means "search the hom-set".
    fn comprehension_factor(&self, _m: &Mor, _g: &Mor) -> Option<Mor> {
        None
    }

    /// The `f: Y → A` whose graph is `F`, when morphisms of this doctrine are
    /// functional formulas. `None` means "search the hom-set".
    fn graph_morphism(&self, _y: &Obj, _a: &Obj, _f: &Formula) -> Option<Mor> {
        None
    }

    /// `q: a → a/ρ`.
    fn quotient(&self, _a: &Obj, _rho: &Formula) -> Result<Mor> {
        Err(self.missing("quotients"))
    }

    /// Pointwise description of the fiber, when the doctrine has one.
    fn per_view(&self, _a: &Obj) -> Option<PerView> {
        None
    }

    fn show_formula(&self, a: &Obj, x: &Formula) -> String {
        match self.per_view(a) {
            Some(v) => {
                let names: Vec<&str> = x.values().iter().map(|&e| v.h.elem_name(e)).collect();
                format!("[{}]", names.join(" "))
            }
            None => x.to_string(),
        }
    }

    /// An error swallowed by an infallible operation since the last call.
    fn take_error(&self) -> Option<Error> {
        None
    }

    #[doc(hidden)]
    fn missing(&self, what: &str) -> Error {
        Error::Unsupported(format!("{} has no {what}", self.name()))
    }
}

/// Upcast helper.
pub fn cat(d: &dyn Doctrine) -> &dyn Category {
    d
}

/// `δ_A = ∃_{⟨id,id⟩} ⊤_A`.
pub fn equality_predicate(d: &dyn Doctrine, a: &Obj) -> Result<Formula> {
    let id = d.identity(a);
    let diag = d.pair(&id, &id)?;
    Ok(d.exists(&diag, &d.top(a)))
}

pub fn iff(d: &dyn Doctrine, a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
    Ok(d.meet(a, &d.implies(a, x, y)?, &d.implies(a, y, x)?))
}

/// `Γf = (f × id_B)* δ_B`.
pub fn graph(d: &dyn Doctrine, f: &Mor) -> Result<Formula> {
    let fx = times(d, f, &d.identity(&f.cod))?;
    Ok(d.reindex(&fx, &equality_predicate(d, &f.cod)?))
}

pub fn formula_eq(d: &dyn Doctrine, a: &Obj, x: &Formula, y: &Formula) -> bool {
    d.leq(a, x, y) && d.leq(a, y, x)
}

/// Projections of a triple product and the three pairings used throughout:
/// `⟨π₁,π₂⟩`, `⟨π₂,π₃⟩`, `⟨π₁,π₃⟩`.
pub struct Triple {
    pub obj: Obj,
    pub p: Vec<Mor>,
    pub p12: Mor,
    pub p23: Mor,
    pub p13: Mor,
}

pub fn triple(d: &dyn Category, a: &Obj, b: &Obj, c: &Obj) -> Result<Triple> {
    let (obj, p) = nary_product(d, &[a.clone(), b.clone(), c.clone()])?;
    Ok(Triple {
        p12: tuple(d, &[&p[0], &p[1]])?,
        p23: tuple(d, &[&p[1], &p[2]])?,
        p13: tuple(d, &[&p[0], &p[2]])?,
        obj,
        p,
    })
}

/// `δ ≤ ρ`, `ρ = ⟨π₂,π₁⟩*ρ`, `⟨π₁,π₂⟩*ρ ∧ ⟨π₂,π₃⟩*ρ ≤ ⟨π₁,π₃⟩*ρ`.
pub fn is_equivalence_relation(d: &dyn Doctrine, a: &Obj, rho: &Formula) -> Result<bool> {
    Ok(equivalence_violation(d, a, rho)?.is_none())
}

/// The first violated condition, if any.
pub fn equivalence_violation(d: &dyn Doctrine, a: &Obj, rho: &Formula) -> Result<Option<&'static str>> {
    let p = d.product(a, a);
    if !d.contains(&p.obj, rho) {
        return Ok(Some("not a formula over A×A"));
    }
    if !d.leq(&p.obj, &equality_predicate(d, a)?, rho) {
        return Ok(Some("reflexivity"));
    }
    let swap = d.pair(&p.p2, &p.p1)?;
    if !formula_eq(d, &p.obj, &d.reindex(&swap, rho), rho) {
        return Ok(Some("symmetry"));
    }
    let t = triple(d, a, a, a)?;
    let lhs = d.meet(&t.obj, &d.reindex(&t.p12, rho), &d.reindex(&t.p23, rho));
    if !d.leq(&t.obj, &lhs, &d.reindex(&t.p13, rho)) {
        return Ok(Some("transitivity"));
    }
    Ok(None)
}

/// Totality `⊤_Y ≤ ∃ F` along the projection to `Y`, and single-valuedness
/// `⟨π₁,π₂⟩*F ∧ ⟨π₁,π₃⟩*F ≤ ⟨π₂,π₃⟩*δ_A`.
pub fn is_functional(d: &dyn Doctrine, y: &Obj, a: &Obj, f: &Formula) -> Result<bool> {
    let p = d.product(y, a);
    if !d.contains(&p.obj, f) {
        return Ok(false);
    }
    if !d.leq(y, &d.top(y), &d.exists(&p.p1, f)) {
        return Ok(false);
    }
    let t = triple(d, y, a, a)?;
    let lhs = d.meet(&t.obj, &d.reindex(&t.p12, f), &d.reindex(&t.p13, f));
    Ok(d.leq(&t.obj, &lhs, &d.reindex(&t.p23, &equality_predicate(d, a)?)))
}

/// `∃_{⟨π₁,π₃⟩}(⟨π₁,π₂⟩*φ ∧ ⟨π₂,π₃⟩*ψ)`.
pub fn compose_relations(
    d: &dyn Doctrine,
    a: &Obj,
    b: &Obj,
    c: &Obj,
    phi: &Formula,
    psi: &Formula,
) -> Result<Formula> {
    let t = triple(d, a, b, c)?;
    let body = d.meet(&t.obj, &d.reindex(&t.p12, phi), &d.reindex(&t.p23, psi));
    Ok(d.exists(&t.p13, &body))
}

/// First `f: Y → A` (canonical order) whose graph is `F`. When the hom-set
/// is over budget, the doctrine's own [`Doctrine::graph_morphism`] is used.
pub fn find_graph_morphism(d: &dyn Doctrine, y: &Obj, a: &Obj, f: &Formula, budget: &Budget) -> Result<Mor> {
    let p = d.product(y, a);
    let delta = equality_predicate(d, a)?;
    let id_a = d.identity(a);
    let homs = match d.hom(y, a, budget) {
        Err(e) if e.is_budget() => return d.graph_morphism(y, a, f).ok_or(e),
        h => h?,
    };
    for g in homs {
        let gx = times(d, &g, &id_a)?;
        if formula_eq(d, &p.obj, &d.reindex(&gx, &delta), f) {
            return Ok(g);
        }
    }
    Err(Error::NoGraph)
}

/// First `{γ}: Y → ℙX` with `(id_X × {γ})*∈_X = γ`.
pub fn weak_power_classify(d: &dyn Doctrine, x: &Obj, y: &Obj, gamma: &Formula, budget: &Budget) -> Result<Mor> {
    let (px, mem) = d.weak_power(x)?;
    let p = d.product(x, y);
    let id_x = d.identity(x);
    for g in d.hom(y, &px, budget)? {
        let m = times(d, &id_x, &g)?;
        if formula_eq(d, &p.obj, &d.reindex(&m, &mem), gamma) {
            return Ok(g);
        }
    }
    Err(Error::NoClassifier)
}

/// `⇔_A = ∀_{⟨π₂,π₃⟩}(⟨π₁,π₂⟩*∈_A ⟺ ⟨π₁,π₃⟩*∈_A)` over `ℙA × ℙA`.
pub fn extensional_equivalence(d: &dyn Doctrine, a: &Obj) -> Result<(Obj, Formula)> {
    let (pa, mem) = d.weak_power(a)?;
    let t = triple(d, a, &pa, &pa)?;
    let l = d.reindex(&t.p12, &mem);
    let r = d.reindex(&t.p13, &mem);
    let body = iff(d, &t.obj, &l, &r)?;
    Ok((pa, d.forall(&t.p23, &body)?))
}

/// Whether `δ_{ℙA}` equals `⇔_A`.
pub fn has_strong_power_objects(d: &dyn Doctrine, a: &Obj) -> Result<bool> {
    let (pa, equiv) = extensional_equivalence(d, a)?;
    let pp = d.product(&pa, &pa);
    Ok(formula_eq(d, &pp.obj, &equality_predicate(d, &pa)?, &equiv))
}

fn show(d: &dyn Doctrine, a: &Obj, x: &Formula) -> String {
    d.show_formula(a, x)
}

/// Fibers are inf-semilattices (Heyting algebras when advertised): `⊤` is
/// greatest, `∧` is the greatest lower bound, and `⟹` is residuated.
pub fn check_fibers(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("fibers", "⊤ greatest; x∧y glb; z ≤ x⟹y iff z∧x ≤ y");
    for a in objs {
        let fib = d.fiber(a, budget)?;
        r.domain("formulas", fib.len() as u64);
        let top = d.top(a);
        let bot = if d.is_heyting() { Some(d.bottom(a)?) } else { None };
        r.case(d.contains(a, &top), || Witness::new().with("object", a).with("top", "not in fiber"));
        for x in &fib {
            r.case(d.leq(a, x, &top), || Witness::new().with("object", a).with("x", show(d, a, x)).with("law", "x ≤ ⊤"));
            if let Some(b) = &bot {
                r.case(d.leq(a, b, x), || Witness::new().with("object", a).with("x", show(d, a, x)).with("law", "⊥ ≤ x"));
            }
        }
        for x in &fib {
            for y in &fib {
                let m = d.meet(a, x, y);
                let glb = d.leq(a, &m, x)
                    && d.leq(a, &m, y)
                    && fib.iter().all(|z| !(d.leq(a, z, x) && d.leq(a, z, y)) || d.leq(a, z, &m));
                r.case(glb, || Witness::new().with("object", a).with("x", show(d, a, x)).with("y", show(d, a, y)).with("law", "meet"));
                if d.is_heyting() {
                    let j = d.join(a, x, y)?;
                    let lub = d.leq(a, x, &j)
                        && d.leq(a, y, &j)
                        && fib.iter().all(|z| !(d.leq(a, x, z) && d.leq(a, y, z)) || d.leq(a, &j, z));
                    r.case(lub, || Witness::new().with("object", a).with("x", show(d, a, x)).with("y", show(d, a, y)).with("law", "join"));
                    let imp = d.implies(a, x, y)?;
                    for z in &fib {
                        let ok = d.leq(a, z, &imp) == d.leq(a, &d.meet(a, z, x), y);
                        r.case(ok, || {
                            Witness::new()
                                .with("residuation", "z ≤ x⟹y iff z∧x ≤ y")
                                .with("object", a)
                                .with("x", show(d, a, x))
                                .with("y", show(d, a, y))
                                .with("z", show(d, a, z))
                        });
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Every morphism among `objs`, with its endpoints.
pub fn all_morphisms(d: &dyn Category, objs: &[Obj], budget: &Budget) -> Result<Vec<Mor>> {
    let mut out = Vec::new();
    for a in objs {
        for b in objs {
            out.extend(d.hom(a, b, budget)?);
        }
    }
    Ok(out)
}

/// Fiber cache shared by the checkers of one run.
pub struct Fibers<'a> {
    d: &'a dyn Doctrine,
    budget: Budget,
    cache: HashMap<Obj, Vec<Formula>>,
}

impl<'a> Fibers<'a> {
    pub fn new(d: &'a dyn Doctrine, budget: &Budget) -> Self {
        Fibers {
            d,
            budget: *budget,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, a: &Obj) -> Result<&[Formula]> {
        if !self.cache.contains_key(a) {
            let f = self.d.fiber(a, &self.budget)?;
            self.cache.insert(a.clone(), f);
        }
        Ok(&self.cache[a])
    }
}

/// `id* = id`, `(g∘f)* = f*∘g*`, and each `f*` preserves the fiber
/// structure (`⊤`, `∧`, plus `⊥`, `∨`, `⟹` for Heyting doctrines).
pub fn check_functoriality(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("functoriality", "id* = id; (g∘f)* = f*∘g*; f* a homomorphism");
    let mut fib = Fibers::new(d, budget);
    for a in objs {
        let id = d.identity(a);
        for x in fib.get(a)?.to_vec() {
            let y = d.reindex(&id, &x);
            r.case(y == x, || Witness::new().with("object", a).with("x", show(d, a, &x)).with("law", "id* = id"));
        }
    }
    let mut homs: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
    for a in objs {
        for b in objs {
            homs.insert((a.clone(), b.clone()), d.hom(a, b, budget)?);
        }
    }
    for a in objs {
        for b in objs {
            for f in &homs[&(a.clone(), b.clone())] {
                let fb = fib.get(b)?.to_vec();
                r.domain("morphisms", 1);
                r.case(formula_eq(d, a, &d.reindex(f, &d.top(b)), &d.top(a)), || {
                    Witness::new().with("f", f).with("law", "f*⊤ = ⊤")
                });
                if d.is_heyting() {
                    r.case(formula_eq(d, a, &d.reindex(f, &d.bottom(b)?), &d.bottom(a)?), || {
                        Witness::new().with("f", f).with("law", "f*⊥ = ⊥")
                    });
                }
                for x in &fb {
                    let fx = d.reindex(f, x);
                    r.case(d.contains(a, &fx), || Witness::new().with("f", f).with("x", show(d, b, x)).with("law", "f*x ∈ P(A)"));
                    for y in &fb {
                        let fy = d.reindex(f, y);
                        let lhs = d.reindex(f, &d.meet(b, x, y));
                        r.case(formula_eq(d, a, &lhs, &d.meet(a, &fx, &fy)), || {
                            Witness::new().with("f", f).with("x", show(d, b, x)).with("y", show(d, b, y)).with("law", "f*(x∧y)")
                        });
                        if d.is_heyting() {
                            let lj = d.reindex(f, &d.join(b, x, y)?);
                            r.case(formula_eq(d, a, &lj, &d.join(a, &fx, &fy)?), || {
                                Witness::new().with("f", f).with("x", show(d, b, x)).with("y", show(d, b, y)).with("law", "f*(x∨y)")
                            });
                            let li = d.reindex(f, &d.implies(b, x, y)?);
                            r.case(formula_eq(d, a, &li, &d.implies(a, &fx, &fy)?), || {
                                Witness::new().with("f", f).with("x", show(d, b, x)).with("y", show(d, b, y)).with("law", "f*(x⟹y)")
                            });
                        }
                    }
                }
                for c in objs {
                    let fc = fib.get(c)?.to_vec();
                    for g in &homs[&(b.clone(), c.clone())] {
                        let gf = d.compose(g, f)?;
                        for x in &fc {
                            let lhs = d.reindex(&gf, x);
                            let rhs = d.reindex(f, &d.reindex(g, x));
                            r.case(formula_eq(d, a, &lhs, &rhs), || {
                                Witness::new().with("f", f).with("g", g).with("x", show(d, c, x)).with("law", "(g∘f)* = f*g*")
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Fibers above this size skip the independent adjoint-finder comparison
/// (its cost is cubic in the fiber size); the inequalities are still checked.
pub const ORACLE_FIBER_LIMIT: usize = 256;

/// `∃_f ⊣ f*` (and `f* ⊣ ∀_f` for triposes): monotonicity, both unit
/// inequalities, and agreement with the adjoint computed from `f*` alone.
pub fn check_adjoints(d: &dyn Doctrine, f: &Mor, budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("adjunctions", "∃f ⊣ f* ⊣ ∀f: unit/counit inequalities and oracle agreement");
    let (a, b) = (&f.dom, &f.cod);
    let fa = d.fiber(a, budget)?;
    let fb = d.fiber(b, budget)?;
    r.domain("P(dom)", fa.len() as u64).domain("P(cod)", fb.len() as u64);
    let ex: Vec<Formula> = fa.iter().map(|x| d.exists(f, x)).collect();
    let all: Option<Vec<Formula>> = if d.is_heyting() {
        Some(fa.iter().map(|x| d.forall(f, x)).collect::<Result<_>>()?)
    } else {
        None
    };
    for (i, x) in fa.iter().enumerate() {
        r.case(d.contains(b, &ex[i]), || Witness::new().with("f", f).with("alpha", show(d, a, x)).with("law", "∃f α ∈ P(B)"));
        r.case(d.leq(a, x, &d.reindex(f, &ex[i])), || {
            Witness::new().with("f", f).with("alpha", show(d, a, x)).with("law", "α ≤ f*∃f α")
        });
        if let Some(all) = &all {
            r.case(d.leq(a, &d.reindex(f, &all[i]), x), || {
                Witness::new().with("f", f).with("alpha", show(d, a, x)).with("law", "f*∀f α ≤ α")
            });
        }
        for (j, y) in fa.iter().enumerate() {
            if d.leq(a, x, y) {
                r.case(d.leq(b, &ex[i], &ex[j]), || {
                    Witness::new().with("f", f).with("alpha", show(d, a, x)).with("alpha2", show(d, a, y)).with("law", "∃f monotone")
                });
                if let Some(all) = &all {
                    r.case(d.leq(b, &all[i], &all[j]), || {
                        Witness::new().with("f", f).with("alpha", show(d, a, x)).with("alpha2", show(d, a, y)).with("law", "∀f monotone")
                    });
                }
            }
        }
    }
    for y in &fb {
        let fy = d.reindex(f, y);
        r.case(d.leq(b, &d.exists(f, &fy), y), || Witness::new().with("f", f).with("beta", show(d, b, y)).with("law", "∃f f*β ≤ β"));
        if d.is_heyting() {
            r.case(d.leq(b, y, &d.forall(f, &fy)?), || Witness::new().with("f", f).with("beta", show(d, b, y)).with("law", "β ≤ ∀f f*β"));
        }
    }
    if fa.len() <= ORACLE_FIBER_LIMIT && fb.len() <= ORACLE_FIBER_LIMIT {
        let index: HashMap<&Formula, usize> = fa.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let star: Option<Vec<usize>> = fb.iter().map(|y| index.get(&d.reindex(f, y)).copied()).collect();
        let Some(star) = star else {
            r.fail(Witness::new().with("f", f).with("law", "f* lands outside the enumerated fiber"));
            return Ok(r);
        };
        let leq_b = |i: usize, j: usize| d.leq(b, &fb[i], &fb[j]);
        let leq_a = |i: usize, j: usize| d.leq(a, &fa[i], &fa[j]);
        match left_adjoint_indices(&star, fa.len(), leq_b, leq_a) {
            Ok(g) => {
                for (i, x) in fa.iter().enumerate() {
                    r.case(fb[g[i]] == ex[i], || {
                        Witness::new()
                            .with("f", f)
                            .with("alpha", show(d, a, x))
                            .with("native", show(d, b, &ex[i]))
                            .with("oracle", show(d, b, &fb[g[i]]))
                            .with("law", "∃f agrees with left adjoint of f*")
                    });
                }
            }
            Err(i) => r.fail(Witness::new().with("f", f).with("alpha", show(d, a, &fa[i])).with("law", "f* has no left adjoint")),
        }
        if let Some(all) = &all {
            match right_adjoint_indices(&star, fa.len(), leq_b, leq_a) {
                Ok(g) => {
                    for (i, x) in fa.iter().enumerate() {
                        r.case(fb[g[i]] == all[i], || {
                            Witness::new()
                                .with("f", f)
                                .with("alpha", show(d, a, x))
                                .with("native", show(d, b, &all[i]))
                                .with("oracle", show(d, b, &fb[g[i]]))
                                .with("law", "∀f agrees with right adjoint of f*")
                        });
                    }
                }
                Err(i) => r.fail(Witness::new().with("f", f).with("alpha", show(d, a, &fa[i])).with("law", "f* has no right adjoint")),
            }
        }
    }
    Ok(r)
}

/// `∃_f(α ∧ f*β) = ∃_f α ∧ β` for all `α`, `β`.
pub fn check_frobenius(d: &dyn Doctrine, f: &Mor, budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("frobenius", "∃f(α ∧ f*β) = ∃f α ∧ β");
    let (a, b) = (&f.dom, &f.cod);
    let fa = d.fiber(a, budget)?;
    let fb = d.fiber(b, budget)?;
    r.domain("alpha", fa.len() as u64).domain("beta", fb.len() as u64);
    let pulled: Vec<Formula> = fb.iter().map(|y| d.reindex(f, y)).collect();
    for x in &fa {
        let ex = d.exists(f, x);
        for (y, fy) in fb.iter().zip(&pulled) {
            let lhs = d.exists(f, &d.meet(a, x, fy));
            let rhs = d.meet(b, &ex, y);
            r.case(formula_eq(d, b, &lhs, &rhs), || {
                Witness::new().with("f", f).with("alpha", show(d, a, x)).with("beta", show(d, b, y))
            });
        }
    }
    Ok(r)
}

/// `∃_f ∘ g* = h* ∘ ∃_k` (and `∀_f ∘ g* = h* ∘ ∀_k` for triposes) on every
/// formula over the domain of `k`.
pub fn check_beck_chevalley(d: &dyn Doctrine, sq: &PullbackSquare, budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("beck-chevalley", "∃f∘g* = h*∘∃k; ∀f∘g* = h*∘∀k");
    let z = &sq.bottom.dom;
    let y = &sq.right.dom;
    let fz = d.fiber(z, budget)?;
    r.domain("squares", 1).domain("formulas", fz.len() as u64);
    for psi in &fz {
        let g_psi = d.reindex(&sq.left, psi);
        let lhs = d.exists(&sq.top, &g_psi);
        let rhs = d.reindex(&sq.right, &d.exists(&sq.bottom, psi));
        r.case(formula_eq(d, y, &lhs, &rhs), || {
            Witness::new()
                .with("h", &sq.right)
                .with("k", &sq.bottom)
                .with("psi", show(d, z, psi))
                .with("lhs", show(d, y, &lhs))
                .with("rhs", show(d, y, &rhs))
        });
        if d.is_heyting() {
            let lhs = d.forall(&sq.top, &g_psi)?;
            let rhs = d.reindex(&sq.right, &d.forall(&sq.bottom, psi)?);
            r.case(formula_eq(d, y, &lhs, &rhs), || {
                Witness::new()
                    .with("quantifier", "∀")
                    .with("h", &sq.right)
                    .with("k", &sq.bottom)
                    .with("psi", show(d, z, psi))
            });
        }
    }
    Ok(r)
}

/// For every `γ` over `X × Y` some `g: Y → ℙX` has `(id × g)*∈_X = γ`.
/// Checked in bulk: the images of all of `hom(Y, ℙX)` must cover the fiber.
pub fn check_weak_power(d: &dyn Doctrine, x: &Obj, ys: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("weak-power", "∀γ over X×Y ∃{γ}: (id×{γ})*∈ = γ");
    let (px, mem) = d.weak_power(x)?;
    let pm = d.product(x, &px);
    r.case(d.contains(&pm.obj, &mem), || Witness::new().with("X", x).with("law", "∈ is a formula over X×ℙX"));
    let id_x = d.identity(x);
    for y in ys {
        let p = d.product(x, y);
        let mut hit = std::collections::HashSet::new();
        for g in d.hom(y, &px, budget)? {
            hit.insert(d.reindex(&times(d, &id_x, &g)?, &mem));
        }
        let fib = d.fiber(&p.obj, budget)?;
        r.domain("gamma", fib.len() as u64);
        for gamma in &fib {
            r.case(hit.contains(gamma), || {
                Witness::new().with("X", x).with("Y", y).with("gamma", show(d, &p.obj, gamma)).with("law", "no classifier")
            });
        }
    }
    Ok(r)
}

/// `f = g` iff `⊤_X ≤ ⟨f,g⟩*δ_A`, for all parallel pairs among `objs`.
pub fn check_extensional(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("extensional", "f = g iff ⊤ ≤ ⟨f,g⟩*δ");
    for x in objs {
        for a in objs {
            let hs = d.hom(x, a, budget)?;
            let delta = equality_predicate(d, a)?;
            let top = d.top(x);
            r.domain("pairs", (hs.len() * hs.len()) as u64);
            for f in &hs {
                for g in &hs {
                    let internal = d.leq(x, &top, &d.reindex(&d.pair(f, g)?, &delta));
                    let external = d.mor_equal(f, g);
                    r.case(internal == external, || {
                        Witness::new().with("f", f).with("g", g).with("internal", internal).with("external", external)
                    });
                }
            }
        }
    }
    Ok(r)
}

/// Bounds for [`doctrine_battery`].
#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub objects: Vec<Obj>,
    /// Largest `|W × B|` for which projection squares `Y×B → W×B` are tested.
    pub max_projection_carrier: usize,
    pub budget: Budget,
}

/// Functoriality, fiber structure, adjunctions (with the oracle cross-check),
/// Frobenius and Beck-Chevalley on all pullback squares among the objects and
/// on projection squares, plus weak power objects for triposes.
pub fn doctrine_battery(d: &dyn Doctrine, cfg: &BatteryConfig) -> Result<Battery> {
    let budget = &cfg.budget;
    let objs = &cfg.objects;
    let mut bat = Battery::new(&d.name());
    bat.push(check_fibers(d, objs, budget)?);
    bat.push(check_functoriality(d, objs, budget)?);
    let mors = all_morphisms(d, objs, budget)?;
    let mut adj = ValidationReport::new("adjunctions", "∃f ⊣ f* ⊣ ∀f: unit/counit inequalities and oracle agreement");
    let mut frob = ValidationReport::new("frobenius", "∃f(α ∧ f*β) = ∃f α ∧ β");
    for f in &mors {
        adj.absorb(check_adjoints(d, f, budget)?);
        frob.absorb(check_frobenius(d, f, budget)?);
    }
    bat.push(adj);
    bat.push(frob);
    let mut bc = ValidationReport::new("beck-chevalley", "∃f∘g* = h*∘∃k; ∀f∘g* = h*∘∀k");
    let mut pb = ValidationReport::new("pullbacks", "constructed squares are pullbacks");
    for w in objs {
        let into: Vec<Mor> = objs
            .iter()
            .map(|y| d.hom(y, w, budget))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for h in &into {
            for k in &into {
                let sq = crate::category::pullback(d, h, k)?;
                bc.absorb(check_beck_chevalley(d, &sq, budget)?);
                pb.case(
                    d.mor_equal(&d.compose(h, &sq.top)?, &d.compose(k, &sq.left)?),
                    || Witness::new().with("h", h).with("k", k),
                );
            }
        }
    }
    // projection squares: π₁: Y×B → Y over f: Y → W
    for w in objs {
        for b in objs {
            if w.carrier() * b.carrier() > cfg.max_projection_carrier {
                continue;
            }
            let wb = d.product(w, b);
            for y in objs {
                let yb = d.product(y, b);
                for f in d.hom(y, w, budget)? {
                    let sq = PullbackSquare {
                        apex: yb.obj.clone(),
                        top: yb.p1.clone(),
                        left: times(d, &f, &d.identity(b))?,
                        right: f.clone(),
                        bottom: wb.p1.clone(),
                    };
                    bc.absorb(check_beck_chevalley(d, &sq, budget)?);
                }
            }
        }
    }
    bat.push(bc);
    bat.push(pb);
    if let Some(e) = d.take_error() {
        return Err(e);
    }
    if d.is_heyting() {
        let mut wp = ValidationReport::new("weak-power", "∀γ over X×Y ∃{γ}: (id×{γ})*∈ = γ");
        for x in objs.iter().filter(|x| x.carrier() <= 2) {
            let ys: Vec<Obj> = objs.iter().filter(|y| y.carrier() <= 2).cloned().collect();
            wp.absorb(check_weak_power(d, x, &ys, budget)?);
        }
        bat.push(wp);
    }
    if let Some(e) = d.take_error() {
        return Err(e);
    }
    Ok(bat)
}
