//! Builtin doctrines: the subset tripos on finite sets, `H`-valued triposes,
//! and the subobject doctrine of a constructed category.

use std::sync::Arc;

use crate::category::{all_functions, power_digits, Budget, Category, FinSet, Formula, Mor, Obj, ObjKind, Product};
use crate::doctrine::Doctrine;
use crate::error::{Error, Result};
use crate::lattice::{Elem, HeytingAlgebra};
use crate::per::PerView;

pub use crate::subobject::{doctrine_isomorphism_check, SubobjectDoctrine};

macro_rules! finset_category {
    ($t:ty) => {
        impl Category for $t {
            fn name(&self) -> String {
                self.label()
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
            fn equalizer(&self, f: &Mor, g: &Mor) -> Result<Mor> {
                FinSet.equalizer(f, g)
            }
        }
    };
}

fn fun(f: &Mor) -> &[u32] {
    f.as_fun().expect("base morphisms are functions")
}

/// Functions `A → H` ordered pointwise, with quantifiers as joins and meets
/// over preimages.
#[derive(Debug, Clone)]
pub struct HValuedTripos {
    h: Arc<HeytingAlgebra>,
}

impl HValuedTripos {
    pub fn new(h: HeytingAlgebra) -> Self {
        HValuedTripos { h: Arc::new(h) }
    }

    pub fn algebra(&self) -> &Arc<HeytingAlgebra> {
        &self.h
    }

    fn label(&self) -> String {
        format!("{}-valued", self.h.name())
    }

    fn pointwise(&self, x: &Formula, y: &Formula, op: impl Fn(Elem, Elem) -> Elem) -> Formula {
        Formula::new(x.values().iter().zip(y.values()).map(|(&a, &b)| op(a, b)).collect())
    }

    fn quantify(&self, f: &Mor, x: &Formula, unit: Elem, op: impl Fn(Elem, Elem) -> Elem) -> Formula {
        let mut out = vec![unit; f.cod.carrier()];
        for (i, &j) in fun(f).iter().enumerate() {
            out[j as usize] = op(out[j as usize], x.at(i));
        }
        Formula::new(out)
    }
}

finset_category!(HValuedTripos);

impl Doctrine for HValuedTripos {
    fn top(&self, a: &Obj) -> Formula {
        Formula::constant(self.h.top(), a.carrier())
    }

    fn meet(&self, _a: &Obj, x: &Formula, y: &Formula) -> Formula {
        self.pointwise(x, y, |a, b| self.h.meet(a, b))
    }

    fn leq(&self, _a: &Obj, x: &Formula, y: &Formula) -> bool {
        x.values().iter().zip(y.values()).all(|(&a, &b)| self.h.leq(a, b))
    }

    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
        let n = a.carrier();
        budget.check((self.h.len() as u128).saturating_pow(n as u32))?;
        Ok(all_functions(n, self.h.len()).into_iter().map(Formula::new).collect())
    }

    fn contains(&self, a: &Obj, x: &Formula) -> bool {
        x.len() == a.carrier() && x.values().iter().all(|&v| (v as usize) < self.h.len())
    }

    fn reindex(&self, f: &Mor, x: &Formula) -> Formula {
        Formula::new(fun(f).iter().map(|&j| x.at(j as usize)).collect())
    }

    fn exists(&self, f: &Mor, x: &Formula) -> Formula {
        self.quantify(f, x, self.h.bottom(), |a, b| self.h.join(a, b))
    }

    fn is_heyting(&self) -> bool {
        true
    }

    fn bottom(&self, a: &Obj) -> Result<Formula> {
        Ok(Formula::constant(self.h.bottom(), a.carrier()))
    }

    fn join(&self, _a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        Ok(self.pointwise(x, y, |a, b| self.h.join(a, b)))
    }

    fn implies(&self, _a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        Ok(self.pointwise(x, y, |a, b| self.h.implies(a, b)))
    }

    fn forall(&self, f: &Mor, x: &Formula) -> Result<Formula> {
        Ok(self.quantify(f, x, self.h.top(), |a, b| self.h.meet(a, b)))
    }

    fn weak_power(&self, a: &Obj) -> Result<(Obj, Formula)> {
        let r = self.h.len();
        let pa = Obj::new(ObjKind::Power(a.clone(), r));
        let (n, m) = (a.carrier(), pa.carrier());
        let mut mem = vec![0; n * m];
        for p in 0..m {
            for (x, d) in power_digits(p, r, n).into_iter().enumerate() {
                mem[x * m + p] = d;
            }
        }
        Ok((pa, Formula::new(mem)))
    }

    fn per_view(&self, a: &Obj) -> Option<PerView> {
        Some(PerView::discrete(self.h.clone(), a.carrier()))
    }
}

/// Subsets of finite sets under inclusion, with image and preimage.
/// Implemented with plain set operations, independently of the lattice code,
/// so that it can serve as an oracle for the 2-chain-valued tripos.
#[derive(Debug, Clone)]
pub struct SubsetTripos {
    two: Arc<HeytingAlgebra>,
}

impl Default for SubsetTripos {
    fn default() -> Self {
        SubsetTripos {
            two: Arc::new(HeytingAlgebra::chain(2)),
        }
    }
}

fn bits(x: &Formula) -> impl Iterator<Item = bool> + '_ {
    x.values().iter().map(|&v| v != 0)
}

fn from_bits(it: impl IntoIterator<Item = bool>) -> Formula {
    Formula::new(it.into_iter().map(u32::from).collect())
}

impl SubsetTripos {
    pub fn new() -> Self {
        Self::default()
    }

    fn label(&self) -> String {
        "finset-subset".into()
    }

    /// Classes of an equivalence relation on `0..n`, numbered by first member.
    fn classes(&self, n: usize, rho: &Formula) -> Result<Vec<u32>> {
        let r = |x: usize, y: usize| rho.at(x * n + y) != 0;
        for x in 0..n {
            if !r(x, x) {
                return Err(Error::NotEquivalence(format!("reflexivity fails at {x}")));
            }
            for y in 0..n {
                if r(x, y) != r(y, x) {
                    return Err(Error::NotEquivalence(format!("symmetry fails at ({x},{y})")));
                }
                for z in 0..n {
                    if r(x, y) && r(y, z) && !r(x, z) {
                        return Err(Error::NotEquivalence(format!("transitivity fails at ({x},{y},{z})")));
                    }
                }
            }
        }
        let mut class = vec![u32::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if class[x] == u32::MAX {
                for (y, c) in class.iter_mut().enumerate().skip(x) {
                    if r(x, y) {
                        *c = next;
                    }
                }
                next += 1;
            }
        }
        Ok(class)
    }
}

finset_category!(SubsetTripos);

impl Doctrine for SubsetTripos {
    fn top(&self, a: &Obj) -> Formula {
        from_bits(std::iter::repeat_n(true, a.carrier()))
    }

    fn meet(&self, _a: &Obj, x: &Formula, y: &Formula) -> Formula {
        from_bits(bits(x).zip(bits(y)).map(|(p, q)| p && q))
    }

    fn leq(&self, _a: &Obj, x: &Formula, y: &Formula) -> bool {
        bits(x).zip(bits(y)).all(|(p, q)| !p || q)
    }

    fn fiber(&self, a: &Obj, budget: &Budget) -> Result<Vec<Formula>> {
        let n = a.carrier();
        budget.check(1u128.checked_shl(n as u32).unwrap_or(u128::MAX))?;
        Ok((0u64..1 << n)
            .map(|mask| from_bits((0..n).map(|i| mask >> (n - 1 - i) & 1 == 1)))
            .collect())
    }

    fn contains(&self, a: &Obj, x: &Formula) -> bool {
        x.len() == a.carrier() && x.values().iter().all(|&v| v <= 1)
    }

    fn reindex(&self, f: &Mor, x: &Formula) -> Formula {
        // preimage
        from_bits(fun(f).iter().map(|&j| x.at(j as usize) != 0))
    }

    fn exists(&self, f: &Mor, x: &Formula) -> Formula {
        // image
        let mut out = vec![false; f.cod.carrier()];
        for (i, p) in bits(x).enumerate() {
            if p {
                out[fun(f)[i] as usize] = true;
            }
        }
        from_bits(out)
    }

    fn is_heyting(&self) -> bool {
        true
    }

    fn bottom(&self, a: &Obj) -> Result<Formula> {
        Ok(from_bits(std::iter::repeat_n(false, a.carrier())))
    }

    fn join(&self, _a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        Ok(from_bits(bits(x).zip(bits(y)).map(|(p, q)| p || q)))
    }

    fn implies(&self, _a: &Obj, x: &Formula, y: &Formula) -> Result<Formula> {
        Ok(from_bits(bits(x).zip(bits(y)).map(|(p, q)| !p || q)))
    }

    fn forall(&self, f: &Mor, x: &Formula) -> Result<Formula> {
        // {b : f⁻¹(b) ⊆ x}
        let mut out = vec![true; f.cod.carrier()];
        for (i, p) in bits(x).enumerate() {
            if !p {
                out[fun(f)[i] as usize] = false;
            }
        }
        Ok(from_bits(out))
    }

    fn weak_power(&self, a: &Obj) -> Result<(Obj, Formula)> {
        let pa = Obj::new(ObjKind::Power(a.clone(), 2));
        let (n, m) = (a.carrier(), pa.carrier());
        Ok((pa, from_bits((0..n * m).map(|i| (i % m) >> (i / m) & 1 == 1))))
    }

    fn comprehension(&self, a: &Obj, alpha: &Formula) -> Result<Mor> {
        let keep: Vec<u32> = bits(alpha).enumerate().filter(|(_, p)| *p).map(|(i, _)| i as u32).collect();
        let sub = Obj::new(ObjKind::Subset(a.clone(), keep.clone().into()));
        Ok(Mor::fun(sub, a.clone(), keep))
    }

    fn comprehension_factor(&self, m: &Mor, g: &Mor) -> Option<Mor> {
        let keep = m.as_fun()?;
        let h = g.as_fun()?.iter().map(|y| keep.iter().position(|k| k == y).map(|i| i as u32)).collect::<Option<_>>()?;
        Some(Mor::fun(g.dom.clone(), m.dom.clone(), h))
    }

    fn quotient(&self, a: &Obj, rho: &Formula) -> Result<Mor> {
        let class = self.classes(a.carrier(), rho)?;
        let k = class.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        Ok(Mor::fun(a.clone(), Obj::finite(k), class))
    }

    fn per_view(&self, a: &Obj) -> Option<PerView> {
        Some(PerView::discrete(self.two.clone(), a.carrier()))
    }

    fn show_formula(&self, a: &Obj, x: &Formula) -> String {
        let names: Vec<String> = bits(x).enumerate().filter(|(_, p)| *p).map(|(i, _)| a.element_name(i)).collect();
        if names.is_empty() {
            "∅".into()
        } else {
            format!("{{{}}}", names.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doctrine::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn subset_fiber_is_a_powerset() {
        let s = SubsetTripos::new();
        let fib = s.fiber(&Obj::finite(2), &b()).unwrap();
        assert_eq!(fib.len(), 4);
        let shown: Vec<String> = fib.iter().map(|x| s.show_formula(&Obj::finite(2), x)).collect();
        assert_eq!(shown, vec!["∅", "{b}", "{a}", "{a,b}"]);
    }

    #[test]
    fn image_along_collapse() {
        let s = SubsetTripos::new();
        let f = Mor::fun(Obj::finite(2), Obj::finite(1), vec![0, 0]);
        let a = Formula::new(vec![1, 0]);
        assert_eq!(s.exists(&f, &a), s.top(&Obj::finite(1)));
    }

    #[test]
    fn equality_predicates() {
        let s = SubsetTripos::new();
        let two = Obj::finite(2);
        let delta = equality_predicate(&s, &two).unwrap();
        assert_eq!(s.show_formula(&s.product(&two, &two).obj, &delta), "{(a,a),(b,b)}");
        for h in [HeytingAlgebra::chain(3), HeytingAlgebra::diamond()] {
            let t = HValuedTripos::new(h.clone());
            for n in 1..=3 {
                let a = Obj::finite(n);
                let delta = equality_predicate(&t, &a).unwrap();
                for x in 0..n {
                    for y in 0..n {
                        let want = if x == y { h.top() } else { h.bottom() };
                        assert_eq!(delta.at(x * n + y), want);
                    }
                }
            }
        }
        let one = Obj::finite(1);
        assert_eq!(equality_predicate(&s, &one).unwrap(), s.top(&s.product(&one, &one).obj));
    }

    #[test]
    fn frobenius_examples() {
        let s = SubsetTripos::new();
        let f = Mor::fun(Obj::finite(2), Obj::finite(1), vec![0, 0]);
        let r = check_frobenius(&s, &f, &b()).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases, 8);
    }

    #[test]
    fn equivalence_relation_examples() {
        let s = SubsetTripos::new();
        let three = Obj::finite(3);
        let p = s.product(&three, &three);
        let delta = equality_predicate(&s, &three).unwrap();
        assert!(is_equivalence_relation(&s, &three, &delta).unwrap());
        assert!(is_equivalence_relation(&s, &three, &s.top(&p.obj)).unwrap());
        let mut rho = delta.values().to_vec();
        rho[1] = 1; // (a,b)
        rho[3] = 1; // (b,a)
        assert!(is_equivalence_relation(&s, &three, &Formula::new(rho.clone())).unwrap());
        rho[3] = 0;
        assert_eq!(
            equivalence_violation(&s, &three, &Formula::new(rho)).unwrap(),
            Some("symmetry")
        );
    }

    #[test]
    fn functional_examples() {
        let s = SubsetTripos::new();
        let two = Obj::finite(2);
        let swap = Mor::fun(two.clone(), two.clone(), vec![1, 0]);
        let g = graph(&s, &swap).unwrap();
        assert!(is_functional(&s, &two, &two, &g).unwrap());
        assert!(!is_functional(&s, &two, &two, &s.top(&s.product(&two, &two).obj)).unwrap());

        let b4 = HValuedTripos::new(HeytingAlgebra::diamond());
        let uv = Formula::new(vec![1, 2]);
        assert!(is_functional(&b4, &Obj::finite(1), &two, &uv).unwrap());
        assert_eq!(find_graph_morphism(&b4, &Obj::finite(1), &two, &uv, &b()), Err(Error::NoGraph));
    }

    #[test]
    fn relational_composition() {
        let s = SubsetTripos::new();
        let (two, three) = (Obj::finite(2), Obj::finite(3));
        let f = Mor::fun(two.clone(), three.clone(), vec![2, 0]);
        let g = Mor::fun(three.clone(), two.clone(), vec![1, 1, 0]);
        let composed = compose_relations(&s, &two, &three, &two, &graph(&s, &f).unwrap(), &graph(&s, &g).unwrap()).unwrap();
        assert_eq!(composed, graph(&s, &s.compose(&g, &f).unwrap()).unwrap());
        let phi = graph(&s, &f).unwrap();
        let unit = compose_relations(&s, &two, &three, &three, &phi, &equality_predicate(&s, &three).unwrap()).unwrap();
        assert_eq!(unit, phi);
        assert_eq!(find_graph_morphism(&s, &two, &three, &phi, &b()).unwrap(), f);
        assert_eq!(
            find_graph_morphism(&s, &three, &three, &equality_predicate(&s, &three).unwrap(), &b()).unwrap(),
            s.identity(&three)
        );
    }

    #[test]
    fn weak_power_examples() {
        let s = SubsetTripos::new();
        let two = Obj::finite(2);
        let delta = equality_predicate(&s, &two).unwrap();
        let g = weak_power_classify(&s, &two, &two, &delta, &b()).unwrap();
        // a ↦ {a} (bit 0), b ↦ {b} (bit 1)
        assert_eq!(g.as_fun().unwrap(), &[1, 2]);
        let one = Obj::finite(1);
        let full = weak_power_classify(&s, &two, &one, &s.top(&s.product(&two, &one).obj), &b()).unwrap();
        assert_eq!(full.as_fun().unwrap(), &[3]);
        let (p2, mem) = s.weak_power(&two).unwrap();
        let id = weak_power_classify(&s, &two, &p2, &mem, &b()).unwrap();
        assert_eq!(id, s.identity(&p2));
    }

    #[test]
    fn diamond_classifier_is_the_transpose() {
        let t = HValuedTripos::new(HeytingAlgebra::diamond());
        let (x, y) = (Obj::finite(2), Obj::finite(2));
        let p = t.product(&x, &y);
        let (px, _) = t.weak_power(&x).unwrap();
        for gamma in t.fiber(&p.obj, &b()).unwrap() {
            let g = weak_power_classify(&t, &x, &y, &gamma, &b()).unwrap();
            for (yy, &code) in g.as_fun().unwrap().iter().enumerate() {
                let digits = power_digits(code as usize, 4, 2);
                for (xx, &digit) in digits.iter().enumerate() {
                    assert_eq!(digit, gamma.at(xx * 2 + yy));
                }
            }
            assert_eq!(g.cod, px);
        }
    }

    #[test]
    fn strong_power_objects_before_completion() {
        let s = SubsetTripos::new();
        for n in 0..=3 {
            assert!(has_strong_power_objects(&s, &Obj::finite(n)).unwrap());
        }
        let t = HValuedTripos::new(HeytingAlgebra::diamond());
        assert!(!has_strong_power_objects(&t, &Obj::finite(1)).unwrap());
    }

    #[test]
    fn two_valued_tripos_matches_subsets() {
        let s = SubsetTripos::new();
        let t = HValuedTripos::new(HeytingAlgebra::chain(2));
        let objs: Vec<Obj> = (0..=3).map(Obj::finite).collect();
        for a in &objs {
            let mut fs = s.fiber(a, &b()).unwrap();
            let mut ft = t.fiber(a, &b()).unwrap();
            fs.sort();
            ft.sort();
            assert_eq!(fs, ft);
            for x in &fs {
                for y in &fs {
                    assert_eq!(s.implies(a, x, y).unwrap(), t.implies(a, x, y).unwrap());
                    assert_eq!(s.join(a, x, y).unwrap(), t.join(a, x, y).unwrap());
                    assert_eq!(s.leq(a, x, y), t.leq(a, x, y));
                }
            }
            assert_eq!(s.weak_power(a).unwrap(), t.weak_power(a).unwrap());
        }
        for f in all_morphisms(&s, &objs, &b()).unwrap() {
            for x in s.fiber(&f.dom, &b()).unwrap() {
                assert_eq!(s.exists(&f, &x), t.exists(&f, &x));
                assert_eq!(s.forall(&f, &x).unwrap(), t.forall(&f, &x).unwrap());
            }
        }
    }

    #[test]
    fn three_chain_fiber_over_one() {
        let t = HValuedTripos::new(HeytingAlgebra::chain(3));
        assert_eq!(t.fiber(&Obj::finite(1), &b()).unwrap().len(), 3);
    }

    #[test]
    fn subset_quotients_and_comprehensions() {
        let s = SubsetTripos::new();
        let three = Obj::finite(3);
        let mut rho = equality_predicate(&s, &three).unwrap().values().to_vec();
        rho[1] = 1;
        rho[3] = 1;
        let q = s.quotient(&three, &Formula::new(rho)).unwrap();
        assert_eq!(q.cod.carrier(), 2);
        assert_eq!(q.as_fun().unwrap(), &[0, 0, 1]);
        let two = Obj::finite(2);
        let c = s.comprehension(&two, &Formula::new(vec![1, 0])).unwrap();
        assert_eq!(c.dom.carrier(), 1);
        assert_eq!(c.as_fun().unwrap(), &[0]);
        let bad = Formula::new(vec![1, 1, 0, 1, 0, 0, 0, 0, 1]);
        assert!(matches!(s.quotient(&three, &bad), Err(Error::NotEquivalence(_))));
    }
}
