//! Computable categories with chosen binary products and enumerable hom-sets.
//!
//! Objects and morphisms are plain immutable values shared by every stage of
//! the construction. A base object is a finite set described structurally
//! (`Finite`, `Product`, `Power`); completed objects wrap an underlying object
//! together with a formula. Every object therefore has an underlying finite
//! carrier, and products are always built on the carrier product with the
//! left-nested index encoding `i * |B| + j`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::Elem;
use crate::report::{ValidationReport, Witness};

/// Default cap on the number of candidates an enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    pub fn check(&self, requested: u128) -> Result<()> {
        if requested > self.limit as u128 {
            Err(Error::Budget {
                requested,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// An element of a fiber: one truth value per point of the underlying carrier
/// (or, for doctrines whose fibers are not pointwise, an opaque code).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(Arc<[Elem]>);

impl Formula {
    pub fn new(values: Vec<Elem>) -> Self {
        Formula(values.into())
    }

    pub fn constant(value: Elem, len: usize) -> Self {
        Formula(vec![value; len].into())
    }

    pub fn values(&self) -> &[Elem] {
        &self.0
    }

    #[inline]
    pub fn at(&self, i: usize) -> Elem {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjKind {
    /// The canonical `n`-element set.
    Finite(usize),
    /// Chosen product of two base sets.
    Product(Obj, Obj),
    /// The set of functions from a base set into a `radix`-element algebra.
    Power(Obj, usize),
    /// `(A, α)`: an object of the comprehension completion.
    Compr(Obj, Formula),
    /// `(A, ρ)`: an object of the quotient completion.
    Quot(Obj, Formula),
    /// A subset of a base set given by the sorted list of retained indices.
    Subset(Obj, Arc<[u32]>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Obj(Arc<ObjKind>);

impl Obj {
    pub fn new(kind: ObjKind) -> Self {
        Obj(Arc::new(kind))
    }

    pub fn finite(n: usize) -> Self {
        Obj::new(ObjKind::Finite(n))
    }

    pub fn kind(&self) -> &ObjKind {
        &self.0
    }

    /// Size of the underlying carrier.
    pub fn carrier(&self) -> usize {
        match self.kind() {
            ObjKind::Finite(n) => *n,
            ObjKind::Product(a, b) => a.carrier() * b.carrier(),
            ObjKind::Power(a, r) => r.pow(a.carrier() as u32),
            ObjKind::Compr(a, _) | ObjKind::Quot(a, _) => a.carrier(),
            ObjKind::Subset(_, keep) => keep.len(),
        }
    }

    /// The base set beneath all completion wrappers.
    pub fn underlying(&self) -> &Obj {
        match self.kind() {
            ObjKind::Compr(a, _) | ObjKind::Quot(a, _) => a.underlying(),
            _ => self,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(
            self.kind(),
            ObjKind::Finite(_) | ObjKind::Product(..) | ObjKind::Power(..) | ObjKind::Subset(..)
        )
    }

    /// Printable name of carrier point `i`.
    pub fn element_name(&self, i: usize) -> String {
        match self.kind() {
            ObjKind::Finite(n) => {
                if *n <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("e{i}")
                }
            }
            ObjKind::Product(a, b) => {
                let nb = b.carrier();
                format!("({},{})", a.element_name(i / nb), b.element_name(i % nb))
            }
            ObjKind::Power(a, r) => {
                let digits = power_digits(i, *r, a.carrier());
                let s: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
                format!("<{}>", s.join(""))
            }
            ObjKind::Compr(a, _) | ObjKind::Quot(a, _) => a.element_name(i),
            ObjKind::Subset(a, keep) => a.element_name(keep[i] as usize),
        }
    }
}

impl fmt::Debug for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ObjKind::Finite(n) => write!(f, "{n}"),
            ObjKind::Product(a, b) => write!(f, "({a}×{b})"),
            ObjKind::Power(a, _) => write!(f, "℘{a}"),
            ObjKind::Compr(a, alpha) => write!(f, "({a},{alpha})"),
            ObjKind::Quot(a, rho) => write!(f, "({a}/{rho})"),
            ObjKind::Subset(a, keep) => write!(f, "{a}|{:?}", &keep[..]),
        }
    }
}

/// Little-endian base-`radix` digits of a power-object index.
pub fn power_digits(mut i: usize, radix: usize, len: usize) -> Vec<Elem> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((i % radix) as Elem);
        i /= radix;
    }
    out
}

pub fn power_index(digits: &[Elem], radix: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * radix + d as usize)
}

/// How a morphism is represented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Arrow {
    /// A function on carriers.
    Fun(Arc<[u32]>),
    /// The graph of a morphism of the underlying stage.
    Graph(Box<Arrow>),
    /// A functional formula over `dom × cod`.
    Rel(Formula),
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arrow::Fun(m) => write!(f, "{:?}", &m[..]),
            Arrow::Graph(a) => write!(f, "Γ{a}"),
            Arrow::Rel(r) => write!(f, "R{r}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mor {
    pub dom: Obj,
    pub cod: Obj,
    pub arrow: Arrow,
}

impl Mor {
    pub fn new(dom: Obj, cod: Obj, arrow: Arrow) -> Self {
        Mor { dom, cod, arrow }
    }

    pub fn fun(dom: Obj, cod: Obj, map: Vec<u32>) -> Self {
        Mor::new(dom, cod, Arrow::Fun(map.into()))
    }

    /// Same arrow between different end objects (moving between stages).
    pub fn with_ends(&self, dom: &Obj, cod: &Obj) -> Mor {
        Mor::new(dom.clone(), cod.clone(), self.arrow.clone())
    }

    pub fn as_fun(&self) -> Option<&[u32]> {
        match &self.arrow {
            Arrow::Fun(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Debug for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} → {}", self.arrow, self.dom, self.cod)
    }
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub obj: Obj,
    pub p1: Mor,
    pub p2: Mor,
}

#[derive(Debug, Clone)]
pub struct PullbackSquare {
    /// Apex of the square.
    pub apex: Obj,
    /// Leg to the domain of `h` (the top arrow `f` in the usual square).
    pub top: Mor,
    /// Leg to the domain of `k` (the left arrow `g`).
    pub left: Mor,
    pub right: Mor,
    pub bottom: Mor,
}

/// A computable category: identities, composition, chosen products and
/// enumerable hom-sets.
pub trait Category: Send + Sync {
    fn name(&self) -> String;

    fn identity(&self, a: &Obj) -> Mor;

    /// `g ∘ f`.
    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor>;

    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool;

    /// A representative with `mor_equal(f, g)` iff `mor_key(f) == mor_key(g)`.
    fn mor_key(&self, f: &Mor) -> Mor {
        f.clone()
    }

    fn product(&self, a: &Obj, b: &Obj) -> Product;

    /// `⟨f, g⟩ : X → A × B`.
    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor>;

    /// All morphisms `a → b` up to `mor_equal`, in canonical order.
    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>>;

    fn equalizer(&self, f: &Mor, _g: &Mor) -> Result<Mor> {
        Err(Error::Unsupported(format!("{} has no equalizers ({f})", self.name())))
    }
}

pub(crate) fn check_composable(g: &Mor, f: &Mor) -> Result<()> {
    if f.cod != g.dom {
        return Err(Error::DomainMismatch(format!("cannot compose {g} after {f}")));
    }
    Ok(())
}

pub(crate) fn check_pairable(f: &Mor, g: &Mor) -> Result<()> {
    if f.dom != g.dom {
        return Err(Error::DomainMismatch(format!("cannot pair {f} with {g}")));
    }
    Ok(())
}

/// Finite sets and functions.
#[derive(Debug, Clone, Copy, Default)]
pub struct FinSet;

impl FinSet {
    fn map<'a>(&self, f: &'a Mor) -> &'a [u32] {
        f.as_fun().expect("finite-set morphisms are functions")
    }

    /// Set-theoretic product object (no completion wrapper).
    pub fn product_obj(a: &Obj, b: &Obj) -> Obj {
        Obj::new(ObjKind::Product(a.clone(), b.clone()))
    }
}

impl Category for FinSet {
    fn name(&self) -> String {
        "FinSet".into()
    }

    fn identity(&self, a: &Obj) -> Mor {
        Mor::fun(a.clone(), a.clone(), (0..a.carrier() as u32).collect())
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        check_composable(g, f)?;
        let (fm, gm) = (self.map(f), self.map(g));
        Ok(Mor::fun(
            f.dom.clone(),
            g.cod.clone(),
            fm.iter().map(|&x| gm[x as usize]).collect(),
        ))
    }

    fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
        f.dom == g.dom && f.cod == g.cod && self.map(f) == self.map(g)
    }

    fn product(&self, a: &Obj, b: &Obj) -> Product {
        let obj = FinSet::product_obj(a, b);
        let (na, nb) = (a.carrier(), b.carrier());
        let p1 = (0..na * nb).map(|i| (i / nb) as u32).collect();
        let p2 = (0..na * nb).map(|i| (i % nb) as u32).collect();
        Product {
            p1: Mor::fun(obj.clone(), a.clone(), p1),
            p2: Mor::fun(obj.clone(), b.clone(), p2),
            obj,
        }
    }

    fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        check_pairable(f, g)?;
        let nb = g.cod.carrier() as u32;
        let (fm, gm) = (self.map(f), self.map(g));
        Ok(Mor::fun(
            f.dom.clone(),
            FinSet::product_obj(&f.cod, &g.cod),
            fm.iter().zip(gm).map(|(&x, &y)| x * nb + y).collect(),
        ))
    }

    fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
        let (na, nb) = (a.carrier(), b.carrier());
        budget.check((nb as u128).saturating_pow(na as u32))?;
        Ok(all_functions(na, nb)
            .into_iter()
            .map(|m| Mor::fun(a.clone(), b.clone(), m))
            .collect())
    }

    fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(Error::DomainMismatch("equalizer of non-parallel pair".into()));
        }
        let keep: Vec<u32> = (0..f.dom.carrier() as u32)
            .filter(|&i| self.map(f)[i as usize] == self.map(g)[i as usize])
            .collect();
        let sub = Obj::new(ObjKind::Subset(f.dom.clone(), keep.clone().into()));
        Ok(Mor::fun(sub, f.dom.clone(), keep))
    }
}

/// All functions `0..n → 0..m`, the last argument varying fastest.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<u32>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if (cur[i] as usize) < m {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// `f × g = ⟨f ∘ π₁, g ∘ π₂⟩`.
pub fn times(c: &dyn Category, f: &Mor, g: &Mor) -> Result<Mor> {
    let p = c.product(&f.dom, &g.dom);
    c.pair(&c.compose(f, &p.p1)?, &c.compose(g, &p.p2)?)
}

/// Left-nested n-fold product `((A₁ × A₂) × A₃) × …` with its projections.
pub fn nary_product(c: &dyn Category, objs: &[Obj]) -> Result<(Obj, Vec<Mor>)> {
    let Some(first) = objs.first() else {
        return Err(Error::Invalid("empty product".into()));
    };
    let mut obj = first.clone();
    let mut projs = vec![c.identity(first)];
    for o in &objs[1..] {
        let p = c.product(&obj, o);
        let mut next = Vec::with_capacity(projs.len() + 1);
        for q in &projs {
            next.push(c.compose(q, &p.p1)?);
        }
        next.push(p.p2.clone());
        obj = p.obj;
        projs = next;
    }
    Ok((obj, projs))
}

/// Left-nested tuple `⟨⟨f₁, f₂⟩, f₃⟩ …` of morphisms with a common domain.
pub fn tuple(c: &dyn Category, fs: &[&Mor]) -> Result<Mor> {
    let Some(first) = fs.first() else {
        return Err(Error::Invalid("empty tuple".into()));
    };
    let mut acc = (*first).clone();
    for f in &fs[1..] {
        acc = c.pair(&acc, f)?;
    }
    Ok(acc)
}

/// Pullback of `h: Y → W` and `k: Z → W`, built as the equalizer of
/// `h ∘ π₁` and `k ∘ π₂` on `Y × Z`.
pub fn pullback(c: &dyn Category, h: &Mor, k: &Mor) -> Result<PullbackSquare> {
    if h.cod != k.cod {
        return Err(Error::DomainMismatch(format!("pullback of {h} and {k}: different codomains")));
    }
    let p = c.product(&h.dom, &k.dom);
    let e = c.equalizer(&c.compose(h, &p.p1)?, &c.compose(k, &p.p2)?)?;
    Ok(PullbackSquare {
        apex: e.dom.clone(),
        top: c.compose(&p.p1, &e)?,
        left: c.compose(&p.p2, &e)?,
        right: h.clone(),
        bottom: k.clone(),
    })
}

/// The morphisms `p: z → dom h` for each test object `z`, grouped by `h∘p`.
/// Squares sharing their right leg `h` can share one index.
pub struct ConeIndex {
    right: Mor,
    tests: Vec<ConeTest>,
}

struct ConeTest {
    z: Obj,
    ps: Vec<Mor>,
    keys: Vec<Mor>,
    by_image: HashMap<Mor, Vec<usize>>,
}

impl ConeIndex {
    pub fn new(c: &dyn Category, right: &Mor, tests: &[Obj], budget: &Budget) -> Result<Self> {
        let mut out = Vec::with_capacity(tests.len());
        for z in tests {
            let ps = c.hom(z, &right.dom, budget)?;
            let keys = ps.iter().map(|p| c.mor_key(p)).collect();
            let mut by_image: HashMap<Mor, Vec<usize>> = HashMap::new();
            for (i, p) in ps.iter().enumerate() {
                by_image.entry(c.mor_key(&c.compose(right, p)?)).or_default().push(i);
            }
            out.push(ConeTest {
                z: z.clone(),
                ps,
                keys,
                by_image,
            });
        }
        Ok(ConeIndex {
            right: right.clone(),
            tests: out,
        })
    }
}

/// Exhaustive check that `square` commutes and is universal for cones from
/// every object in `tests`.
pub fn check_pullback(
    c: &dyn Category,
    square: &PullbackSquare,
    tests: &[Obj],
    budget: &Budget,
) -> Result<ValidationReport> {
    check_pullback_indexed(c, square, &ConeIndex::new(c, &square.right, tests, budget)?, budget)
}

/// [`check_pullback`] with the cones' right legs precomputed.
pub fn check_pullback_indexed(
    c: &dyn Category,
    square: &PullbackSquare,
    index: &ConeIndex,
    budget: &Budget,
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("pullback", "∀ cones (p,q) with h∘p = k∘q ∃! u");
    if index.right != square.right {
        return Err(Error::Invalid("cone index built for another right leg".into()));
    }
    let lhs = c.compose(&square.right, &square.top)?;
    let rhs = c.compose(&square.bottom, &square.left)?;
    r.case(c.mor_equal(&lhs, &rhs), || Witness::new().with("square", "does not commute"));
    for t in &index.tests {
        let z = &t.z;
        let qs = c.hom(z, &square.left.cod, budget)?;
        let us = c.hom(z, &square.apex, budget)?;
        r.domain("cones", (t.ps.len() * qs.len()) as u64);
        // mediators by the cone they induce
        let mut mediators: HashMap<(Mor, Mor), usize> = HashMap::new();
        for u in &us {
            let key = (c.mor_key(&c.compose(&square.top, u)?), c.mor_key(&c.compose(&square.left, u)?));
            *mediators.entry(key).or_insert(0) += 1;
        }
        for q in &qs {
            let Some(matching) = t.by_image.get(&c.mor_key(&c.compose(&square.bottom, q)?)) else {
                continue;
            };
            let kq = c.mor_key(q);
            for &i in matching {
                let n = mediators.get(&(t.keys[i].clone(), kq.clone())).copied().unwrap_or(0);
                r.case(n == 1, || {
                    Witness::new()
                        .with("test", z)
                        .with("p", &t.ps[i])
                        .with("q", q)
                        .with("mediators", n)
                });
            }
        }
    }
    Ok(r)
}

/// Left-cancellation over the hom-sets from every test object.
pub fn is_mono(c: &dyn Category, f: &Mor, tests: &[Obj], budget: &Budget) -> Result<bool> {
    for z in tests {
        let hs = c.hom(z, &f.dom, budget)?;
        let images: Vec<Mor> = hs.iter().map(|h| c.compose(f, h)).collect::<Result<_>>()?;
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                if c.mor_equal(&images[i], &images[j]) && !c.mor_equal(&hs[i], &hs[j]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Some `g` with `f ∘ g = id` and `g ∘ f = id`, by search.
pub fn find_inverse(c: &dyn Category, f: &Mor, budget: &Budget) -> Result<Option<Mor>> {
    let id_dom = c.identity(&f.dom);
    let id_cod = c.identity(&f.cod);
    for g in c.hom(&f.cod, &f.dom, budget)? {
        if c.mor_equal(&c.compose(&g, f)?, &id_dom) && c.mor_equal(&c.compose(f, &g)?, &id_cod) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// The unique `h` with `m ∘ h = g`, if it exists and is unique.
pub fn factor_through(c: &dyn Category, m: &Mor, g: &Mor, budget: &Budget) -> Result<Option<Mor>> {
    let mut found = None;
    for h in c.hom(&g.dom, &m.dom, budget)? {
        if c.mor_equal(&c.compose(m, &h)?, g) {
            if found.is_some() {
                return Ok(None);
            }
            found = Some(h);
        }
    }
    Ok(found)
}

/// The unique `h` with `h ∘ q = g`, if it exists and is unique.
pub fn factor_after(c: &dyn Category, q: &Mor, g: &Mor, budget: &Budget) -> Result<Option<Mor>> {
    let mut found = None;
    for h in c.hom(&q.cod, &g.cod, budget)? {
        if c.mor_equal(&c.compose(&h, q)?, g) {
            if found.is_some() {
                return Ok(None);
            }
            found = Some(h);
        }
    }
    Ok(found)
}

/// Identity and associativity laws, congruence of `mor_equal`, and the
/// product universal property, over all hom-sets among `objs`.
pub fn check_category_laws(c: &dyn Category, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(
        "category-laws",
        "id∘f = f = f∘id; h∘(g∘f) = (h∘g)∘f; products universal",
    );
    let mut homs = std::collections::HashMap::new();
    for a in objs {
        for b in objs {
            homs.insert((a.clone(), b.clone()), c.hom(a, b, budget)?);
        }
    }
    for a in objs {
        for b in objs {
            for f in &homs[&(a.clone(), b.clone())] {
                let l = c.compose(&c.identity(b), f)?;
                let rr = c.compose(f, &c.identity(a))?;
                r.case(c.mor_equal(&l, f) && c.mor_equal(&rr, f), || {
                    Witness::new().with("identity", f)
                });
            }
        }
    }
    for a in objs {
        for b in objs {
            for cc in objs {
                for d in objs {
                    for f in &homs[&(a.clone(), b.clone())] {
                        for g in &homs[&(b.clone(), cc.clone())] {
                            let gf = c.compose(g, f)?;
                            for h in &homs[&(cc.clone(), d.clone())] {
                                let lhs = c.compose(h, &gf)?;
                                let rhs = c.compose(&c.compose(h, g)?, f)?;
                                r.case(c.mor_equal(&lhs, &rhs), || {
                                    Witness::new().with("f", f).with("g", g).with("h", h)
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    // mor_equal is a congruence: equal inputs give equal composites
    for a in objs {
        for b in objs {
            let fs = &homs[&(a.clone(), b.clone())];
            for f in fs {
                for f2 in fs {
                    if !c.mor_equal(f, f2) {
                        continue;
                    }
                    for cc in objs {
                        for g in &homs[&(b.clone(), cc.clone())] {
                            r.case(c.mor_equal(&c.compose(g, f)?, &c.compose(g, f2)?), || {
                                Witness::new().with("congruence", format!("{f} ~ {f2} after {g}"))
                            });
                        }
                    }
                }
            }
        }
    }
    for a in objs {
        for b in objs {
            r.absorb(check_product(c, a, b, objs, budget)?);
        }
    }
    Ok(r)
}

/// For all `f: X → A`, `g: X → B` there is exactly one `m` with
/// `π₁∘m = f`, `π₂∘m = g`, and it is `⟨f, g⟩`.
pub fn check_product(
    c: &dyn Category,
    a: &Obj,
    b: &Obj,
    tests: &[Obj],
    budget: &Budget,
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new("product", "∀ f,g ∃! m: π₁∘m = f, π₂∘m = g, m = ⟨f,g⟩");
    let p = c.product(a, b);
    for x in tests {
        let fs = c.hom(x, a, budget)?;
        let gs = c.hom(x, b, budget)?;
        let ms = c.hom(x, &p.obj, budget)?;
        r.domain("pairs", (fs.len() * gs.len()) as u64);
        for f in &fs {
            for g in &gs {
                let paired = c.pair(f, g)?;
                let mut n = 0;
                let mut is_pair = false;
                for m in &ms {
                    if c.mor_equal(&c.compose(&p.p1, m)?, f) && c.mor_equal(&c.compose(&p.p2, m)?, g) {
                        n += 1;
                        is_pair |= c.mor_equal(m, &paired);
                    }
                }
                r.case(n == 1 && is_pair, || {
                    Witness::new()
                        .with("A", a)
                        .with("B", b)
                        .with("f", f)
                        .with("g", g)
                        .with("mediators", n)
                });
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> Obj {
        Obj::finite(n)
    }

    #[test]
    fn products_of_finite_sets() {
        let c = FinSet;
        let p = c.product(&set(1), &set(2));
        assert_eq!(p.obj.carrier(), 2);
        let p = c.product(&set(2), &set(2));
        assert_eq!(p.obj.carrier(), 4);
        assert_eq!(p.p1.as_fun().unwrap(), &[0, 0, 1, 1]);
        assert_eq!(p.p2.as_fun().unwrap(), &[0, 1, 0, 1]);
        assert_eq!(p.obj.element_name(1), "(a,b)");
        // deterministic choice
        assert_eq!(c.product(&set(2), &set(2)), p);
    }

    #[test]
    fn diagonal_and_swap() {
        let c = FinSet;
        let two = set(2);
        let id = c.identity(&two);
        let diag = c.pair(&id, &id).unwrap();
        assert_eq!(diag.as_fun().unwrap(), &[0, 3]);
        let p = c.product(&two, &two);
        let swap = c.pair(&p.p2, &p.p1).unwrap();
        assert_eq!(swap.as_fun().unwrap(), &[0, 2, 1, 3]);
        assert!(c.pair(&id, &p.p1).is_err());
    }

    #[test]
    fn pair_of_points() {
        let c = FinSet;
        let f = Mor::fun(set(1), set(2), vec![0]);
        let g = Mor::fun(set(1), set(2), vec![1]);
        let fg = c.pair(&f, &g).unwrap();
        // (f(*), g(*)) = (a, b) = index 1
        assert_eq!(fg.as_fun().unwrap(), &[1]);
    }

    #[test]
    fn hom_counts() {
        let c = FinSet;
        let b = Budget::default();
        assert_eq!(c.hom(&set(2), &set(3), &b).unwrap().len(), 9);
        assert_eq!(c.hom(&set(0), &set(3), &b).unwrap().len(), 1);
        assert_eq!(c.hom(&set(2), &set(0), &b).unwrap().len(), 0);
        assert!(c.hom(&set(4), &set(4), &Budget::new(10)).unwrap_err().is_budget());
    }

    #[test]
    fn pullback_of_identity_and_swap() {
        let c = FinSet;
        let two = set(2);
        let id = c.identity(&two);
        let swap = Mor::fun(two.clone(), two.clone(), vec![1, 0]);
        let sq = pullback(&c, &id, &swap).unwrap();
        // {(x, y) : x = swap(y)} = {(a,b), (b,a)}
        assert_eq!(sq.apex.carrier(), 2);
        let names: Vec<String> = (0..2).map(|i| sq.apex.element_name(i)).collect();
        assert_eq!(names, vec!["(a,b)", "(b,a)"]);
        let tests: Vec<Obj> = (0..=2).map(set).collect();
        assert!(check_pullback(&c, &sq, &tests, &Budget::default()).unwrap().passed());
    }

    #[test]
    fn pullback_of_mono_along_itself_has_invertible_legs() {
        let c = FinSet;
        let f = Mor::fun(set(2), set(3), vec![0, 2]);
        let sq = pullback(&c, &f, &f).unwrap();
        let b = Budget::default();
        assert!(find_inverse(&c, &sq.top, &b).unwrap().is_some());
        assert!(find_inverse(&c, &sq.left, &b).unwrap().is_some());
    }

    struct NoEqualizers;
    impl Category for NoEqualizers {
        fn name(&self) -> String {
            "bare".into()
        }
        fn identity(&self, a: &Obj) -> Mor {
            FinSet.identity(a)
        }
        fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
            FinSet.compose(g, f)
        }
        fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
            FinSet.mor_equal(f, g)
        }
        fn product(&self, a: &Obj, b: &Obj) -> Product {
            FinSet.product(a, b)
        }
        fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
            FinSet.pair(f, g)
        }
        fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
            FinSet.hom(a, b, budget)
        }
    }

    #[test]
    fn pullback_needs_equalizers() {
        let c = NoEqualizers;
        let id = c.identity(&set(2));
        assert!(matches!(pullback(&c, &id, &id), Err(Error::Unsupported(_))));
    }

    /// Composition that is wrong on one specific triple.
    struct Corrupted;
    impl Category for Corrupted {
        fn name(&self) -> String {
            "corrupted".into()
        }
        fn identity(&self, a: &Obj) -> Mor {
            FinSet.identity(a)
        }
        fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
            let out = FinSet.compose(g, f)?;
            let swap: &[u32] = &[1, 0];
            if f.as_fun() == Some(swap) && g.as_fun() == Some(swap) && f.dom.carrier() == 2 {
                // swap ∘ swap should be the identity
                return Ok(Mor::fun(f.dom.clone(), g.cod.clone(), vec![0, 0]));
            }
            Ok(out)
        }
        fn mor_equal(&self, f: &Mor, g: &Mor) -> bool {
            FinSet.mor_equal(f, g)
        }
        fn product(&self, a: &Obj, b: &Obj) -> Product {
            FinSet.product(a, b)
        }
        fn pair(&self, f: &Mor, g: &Mor) -> Result<Mor> {
            FinSet.pair(f, g)
        }
        fn hom(&self, a: &Obj, b: &Obj, budget: &Budget) -> Result<Vec<Mor>> {
            FinSet.hom(a, b, budget)
        }
    }

    #[test]
    fn category_laws() {
        let objs: Vec<Obj> = (0..=2).map(set).collect();
        let b = Budget::default();
        assert!(check_category_laws(&FinSet, &objs, &b).unwrap().passed());
        let r = check_category_laws(&Corrupted, &objs, &b).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn product_functoriality() {
        let c = FinSet;
        let b = Budget::default();
        let objs: Vec<Obj> = (1..=2).map(set).collect();
        for a in &objs {
            for bb in &objs {
                for f in c.hom(a, bb, &b).unwrap() {
                    for f2 in c.hom(bb, a, &b).unwrap() {
                        for g in c.hom(bb, bb, &b).unwrap() {
                            for g2 in c.hom(a, bb, &b).unwrap() {
                                let lhs = c.compose(&times(&c, &f, &g).unwrap(), &times(&c, &f2, &g2).unwrap()).unwrap();
                                let rhs = times(&c, &c.compose(&f, &f2).unwrap(), &c.compose(&g, &g2).unwrap()).unwrap();
                                assert!(c.mor_equal(&lhs, &rhs));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn triple_projections() {
        let c = FinSet;
        let objs = [set(2), set(3), set(2)];
        let (p, pr) = nary_product(&c, &objs).unwrap();
        assert_eq!(p.carrier(), 12);
        let t = tuple(&c, &[&pr[0], &pr[1], &pr[2]]).unwrap();
        assert!(c.mor_equal(&t, &c.identity(&p)));
    }

    #[test]
    fn power_digits_roundtrip() {
        for i in 0..81 {
            assert_eq!(power_index(&power_digits(i, 3, 4), 3), i);
        }
    }
}
