//! Exhaustive checks for the properties each completion adds, for the unit
//! triangle of an extension, and for reflectivity of the units.

use crate::category::{find_inverse, times, Budget, Category, Formula, Mor, Obj};
use crate::completions::{Extension, Kind, Unit};
use crate::doctrine::{check_extensional, equality_predicate, formula_eq, is_equivalence_relation, is_functional, Doctrine};
use crate::error::Result;
use crate::morphism::DoctrineMorphism;
use crate::report::{ValidationReport, Witness};

/// Functional formulas from `y` to `a`, in fiber order.
pub fn functional_formulas(d: &dyn Doctrine, y: &Obj, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
    if let (Some(vy), Some(va)) = (d.per_view(y), d.per_view(a)) {
        return vy.functional(&va, budget);
    }
    let p = d.product(y, a);
    let mut out = Vec::new();
    for r in d.fiber(&p.obj, budget)? {
        if is_functional(d, y, a, &r)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Equivalence relations over `a`, in fiber order.
pub fn equivalence_relations(d: &dyn Doctrine, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
    let p = d.product(a, a);
    let mut out = Vec::new();
    for r in d.fiber(&p.obj, budget)? {
        if is_equivalence_relation(d, a, &r)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Number of `h: src → via` with `compose(h) = target`, up to `mor_equal`.
fn count_factorizations(
    d: &dyn Category,
    src: &Obj,
    via: &Obj,
    target: &Mor,
    compose: impl Fn(&Mor) -> Result<Mor>,
    budget: &Budget,
) -> Result<usize> {
    let mut n = 0;
    for h in d.hom(src, via, budget)? {
        if d.mor_equal(&compose(&h)?, target) {
            n += 1;
        }
    }
    Ok(n)
}

/// For every `α` over every `A`: `⌊α⌋*α = ⊤`; `f` with `f*α = ⊤` factors
/// uniquely through `⌊α⌋` and no other `f` does; and
/// `⌊α⌋*α ≤ ⌊α⌋*β` iff `α ≤ β`.
pub fn check_comprehensions(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(
        "full-comprehensions",
        "⌊α⌋*α = ⊤; f*α = ⊤ iff f factors uniquely through ⌊α⌋; ⌊α⌋*α ≤ ⌊α⌋*β iff α ≤ β",
    );
    for a in objs {
        let fib = d.fiber(a, budget)?;
        r.domain("formulas", fib.len() as u64);
        for alpha in &fib {
            let show = || d.show_formula(a, alpha);
            let m = match d.comprehension(a, alpha) {
                Ok(m) => m,
                Err(e) => {
                    r.fail(Witness::new().with("A", a).with("alpha", show()).with("error", e));
                    continue;
                }
            };
            let x = &m.dom;
            let along = d.reindex(&m, alpha);
            r.case(formula_eq(d, x, &along, &d.top(x)), || {
                Witness::new().with("A", a).with("alpha", show()).with("law", "⌊α⌋*α = ⊤")
            });
            for y in objs {
                for f in d.hom(y, a, budget)? {
                    let holds = formula_eq(d, y, &d.reindex(&f, alpha), &d.top(y));
                    let n = count_factorizations(d, y, x, &f, |h| d.compose(&m, h), budget)?;
                    r.case(n == usize::from(holds), || {
                        Witness::new()
                            .with("A", a)
                            .with("alpha", show())
                            .with("f", &f)
                            .with("f*α=⊤", holds)
                            .with("factorizations", n)
                    });
                }
            }
            for beta in &fib {
                let lhs = d.leq(x, &along, &d.reindex(&m, beta));
                let rhs = d.leq(a, alpha, beta);
                r.case(lhs == rhs, || {
                    Witness::new()
                        .with("A", a)
                        .with("alpha", show())
                        .with("beta", d.show_formula(a, beta))
                        .with("law", "fullness")
                });
            }
        }
    }
    Ok(r)
}

/// For every equivalence relation `ρ` over every `A`: the quotient exists,
/// `ρ = (q×q)*δ` exactly, and `f` with `ρ ≤ (f×f)*δ` factors uniquely after
/// `q` while no other `f` factors at all.
pub fn check_quotients(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(
        "effective-quotients",
        "ρ = (q×q)*δ; ρ ≤ (f×f)*δ iff f factors uniquely after q",
    );
    for a in objs {
        let aa = d.product(a, a).obj;
        let rels = equivalence_relations(d, a, budget)?;
        r.domain("relations", rels.len() as u64);
        for rho in &rels {
            let show = || d.show_formula(&aa, rho);
            let q = match d.quotient(a, rho) {
                Ok(q) => q,
                Err(e) => {
                    r.fail(Witness::new().with("A", a).with("rho", show()).with("error", e));
                    continue;
                }
            };
            let kernel = d.reindex(&times(d, &q, &q)?, &equality_predicate(d, &q.cod)?);
            r.case(formula_eq(d, &aa, rho, &kernel), || {
                Witness::new()
                    .with("A", a)
                    .with("rho", show())
                    .with("(q×q)*δ", d.show_formula(&aa, &kernel))
            });
            for y in objs {
                let delta_y = equality_predicate(d, y)?;
                for f in d.hom(a, y, budget)? {
                    let holds = d.leq(&aa, rho, &d.reindex(&times(d, &f, &f)?, &delta_y));
                    let n = count_factorizations(d, &q.cod, y, &f, |h| d.compose(h, &q), budget)?;
                    r.case(n == usize::from(holds), || {
                        Witness::new()
                            .with("A", a)
                            .with("rho", show())
                            .with("f", &f)
                            .with("ρ≤(f×f)*δ", holds)
                            .with("factorizations", n)
                    });
                }
            }
        }
    }
    Ok(r)
}

/// Every functional formula between the objects is the graph of a morphism.
pub fn check_cauchy(d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("cauchy-complete", "every functional F is Γf for some f");
    for y in objs {
        for a in objs {
            let fs = functional_formulas(d, y, a, budget)?;
            r.domain("functional", fs.len() as u64);
            let p = d.product(y, a);
            for f in &fs {
                let found = match crate::doctrine::find_graph_morphism(d, y, a, f, budget) {
                    Ok(_) => true,
                    Err(crate::Error::NoGraph) => false,
                    Err(e) => return Err(e),
                };
                r.case(found, || {
                    Witness::new().with("Y", y).with("A", a).with("no-graph", d.show_formula(&p.obj, f))
                });
            }
        }
    }
    Ok(r)
}

/// The defining property of `kind`.
pub fn check_complete(kind: Kind, d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    match kind {
        Kind::C => check_comprehensions(d, objs, budget),
        Kind::Q => check_quotients(d, objs, budget),
        Kind::E => check_extensional(d, objs, budget),
        Kind::L => check_cauchy(d, objs, budget),
    }
}

/// `ext ∘ unit ≅ m` through the isomorphisms `i_A: ext(unit A) → m(A)`:
/// each `i_A` is invertible, `m(h) ∘ i_A = i_B ∘ ext(unit h)` and
/// `ext(unit φ) = i_A*(m φ)`.
pub fn check_triangle(
    ext: &Extension,
    unit: &Unit,
    m: &dyn DoctrineMorphism,
    objs: &[Obj],
    budget: &Budget,
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("unit-triangle", "ext∘unit = m up to the canonical isomorphism");
    let t = m.target().as_ref();
    let src = unit.source().as_ref();
    let mut isos = Vec::new();
    for a in objs {
        let i = ext.triangle_iso(unit, a)?;
        r.case(find_inverse(t, &i, budget)?.is_some(), || {
            Witness::new().with("A", a).with("law", "i_A invertible")
        });
        let ua = unit.map_obj(a)?;
        let ea = ext.map_obj(&ua)?;
        for phi in src.fiber(a, budget)? {
            let lhs = ext.map_formula(&ua, &unit.map_formula(a, &phi)?)?;
            let rhs = t.reindex(&i, &m.map_formula(a, &phi)?);
            r.case(formula_eq(t, &ea, &lhs, &rhs), || {
                Witness::new().with("A", a).with("phi", src.show_formula(a, &phi)).with("law", "formulas")
            });
        }
        isos.push(i);
    }
    for (ia, a) in objs.iter().enumerate() {
        for (ib, b) in objs.iter().enumerate() {
            for h in src.hom(a, b, budget)? {
                let lhs = t.compose(&m.map_mor(&h)?, &isos[ia])?;
                let rhs = t.compose(&isos[ib], &ext.map_mor(&unit.map_mor(&h)?)?)?;
                r.case(t.mor_equal(&lhs, &rhs), || Witness::new().with("h", &h).with("law", "morphisms"));
            }
        }
    }
    Ok(r)
}

/// On a doctrine already complete for the unit's kind: the unit is a
/// bijection on every hom-set and an order-isomorphism on every fiber.
pub fn check_reflective(unit: &Unit, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("reflectivity", "unit bijective on homs, order-isomorphism on fibers");
    let (s, t) = (unit.source().as_ref(), unit.target().as_ref());
    for a in objs {
        let ua = unit.map_obj(a)?;
        for b in objs {
            let ub = unit.map_obj(b)?;
            let src = s.hom(a, b, budget)?;
            let images: Vec<Mor> = src.iter().map(|f| unit.map_mor(f)).collect::<Result<_>>()?;
            let tgt = t.hom(&ua, &ub, budget)?;
            r.domain("morphisms", src.len() as u64);
            for i in 0..src.len() {
                for j in i + 1..src.len() {
                    let collide = t.mor_equal(&images[i], &images[j]) && !s.mor_equal(&src[i], &src[j]);
                    r.case(!collide, || {
                        Witness::new().with("f", &src[i]).with("g", &src[j]).with("law", "injective")
                    });
                }
            }
            for g in &tgt {
                r.case(images.iter().any(|f| t.mor_equal(f, g)), || {
                    Witness::new().with("g", g).with("law", "surjective")
                });
            }
        }
        let fib = s.fiber(a, budget)?;
        let mapped: Vec<Formula> = fib.iter().map(|x| unit.map_formula(a, x)).collect::<Result<_>>()?;
        let tfib = t.fiber(&ua, budget)?;
        r.case(tfib.len() == fib.len() && tfib.iter().all(|y| mapped.iter().any(|x| formula_eq(t, &ua, x, y))), || {
            Witness::new().with("A", a).with("source", fib.len()).with("target", tfib.len()).with("law", "fiber bijection")
        });
        for (i, x) in fib.iter().enumerate() {
            for (j, y) in fib.iter().enumerate() {
                let before = s.leq(a, x, y);
                let after = t.leq(&ua, &mapped[i], &mapped[j]);
                r.case(before == after, || {
                    Witness::new()
                        .with("A", a)
                        .with("x", s.show_formula(a, x))
                        .with("y", s.show_formula(a, y))
                        .with("law", "order")
                });
            }
        }
    }
    Ok(r)
}
