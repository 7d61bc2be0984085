//! Pointwise descriptions of fibers.
//!
//! Over an `H`-valued base every object reached by the completions is an
//! `H`-valued set: a carrier with a partial equivalence relation `E`. Its
//! fiber is `{φ : φ(x) ≤ E(x,x), E(x,y) ∧ φ(x) ≤ φ(y)}` and functional
//! formulas are the relations that are additionally single-valued and total
//! with respect to `E`. Enumerating these by backtracking with interval
//! pruning is exponentially cheaper than filtering all of `H^carrier`.

use std::sync::Arc;

use crate::category::{Budget, Formula};
use crate::error::{Error, Result};
use crate::lattice::{Elem, HeytingAlgebra};

#[derive(Debug, Clone)]
pub struct PerView {
    pub h: Arc<HeytingAlgebra>,
    pub n: usize,
    /// `E(x, y)` at `x * n + y`.
    pub rel: Vec<Elem>,
}

impl PerView {
    /// Carrier with `E(x,y) = ⊤` if `x = y`, else `⊥`.
    pub fn discrete(h: Arc<HeytingAlgebra>, n: usize) -> Self {
        let mut rel = vec![h.bottom(); n * n];
        for x in 0..n {
            rel[x * n + x] = h.top();
        }
        PerView { h, n, rel }
    }

    pub fn from_relation(h: Arc<HeytingAlgebra>, n: usize, rel: &Formula) -> Self {
        debug_assert_eq!(rel.len(), n * n);
        PerView {
            h,
            n,
            rel: rel.values().to_vec(),
        }
    }

    /// Restricts the extent: `E'(x,y) = E(x,y) ∧ α(x) ∧ α(y)`.
    pub fn restrict(&self, alpha: &Formula) -> Self {
        let h = &self.h;
        let mut rel = self.rel.clone();
        for x in 0..self.n {
            for y in 0..self.n {
                let v = &mut rel[x * self.n + y];
                *v = h.meet(*v, h.meet(alpha.at(x), alpha.at(y)));
            }
        }
        PerView {
            h: self.h.clone(),
            n: self.n,
            rel,
        }
    }

    #[inline]
    pub fn e(&self, x: usize, y: usize) -> Elem {
        self.rel[x * self.n + y]
    }

    #[inline]
    pub fn extent(&self, x: usize) -> Elem {
        self.e(x, x)
    }

    /// View of the product, with the left-nested carrier encoding.
    pub fn product(&self, other: &PerView) -> PerView {
        let (n, m) = (self.n, other.n);
        let nm = n * m;
        let mut rel = vec![0; nm * nm];
        for i in 0..nm {
            for j in 0..nm {
                rel[i * nm + j] = self.h.meet(self.e(i / m, j / m), other.e(i % m, j % m));
            }
        }
        PerView {
            h: self.h.clone(),
            n: nm,
            rel,
        }
    }

    pub fn contains(&self, phi: &[Elem]) -> bool {
        let h = &self.h;
        phi.len() == self.n
            && (0..self.n).all(|x| {
                h.leq(phi[x], self.extent(x))
                    && (0..self.n).all(|y| h.leq(h.meet(self.e(x, y), phi[x]), phi[y]))
            })
    }

    /// All fiber elements in lexicographic order of their value vectors.
    pub fn fiber(&self, budget: &Budget) -> Result<Vec<Formula>> {
        let mut search = Search::new(self, None, budget);
        search.run()?;
        Ok(search.out)
    }

    /// All functional formulas over `self × cod`, lexicographically ordered.
    pub fn functional(&self, cod: &PerView, budget: &Budget) -> Result<Vec<Formula>> {
        let prod = self.product(cod);
        let mut search = Search::new(&prod, Some((self, cod)), budget);
        search.run()?;
        Ok(search.out)
    }
}

struct Search<'a> {
    view: &'a PerView,
    /// `(dom, cod)` when searching for functional formulas.
    split: Option<(&'a PerView, &'a PerView)>,
    budget: &'a Budget,
    nodes: u128,
    cur: Vec<Elem>,
    out: Vec<Formula>,
}

impl<'a> Search<'a> {
    fn new(view: &'a PerView, split: Option<(&'a PerView, &'a PerView)>, budget: &'a Budget) -> Self {
        Search {
            view,
            split,
            budget,
            nodes: 0,
            cur: Vec::with_capacity(view.n),
            out: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<()> {
        self.step()
    }

    fn step(&mut self) -> Result<()> {
        let v = self.view;
        let h = &*v.h;
        let c = self.cur.len();
        if c == v.n {
            self.out.push(Formula::new(self.cur.clone()));
            return Ok(());
        }
        // interval of admissible values given the cells assigned so far
        let mut lb = h.bottom();
        let mut ub = v.extent(c);
        for (d, &fd) in self.cur.iter().enumerate() {
            lb = h.join(lb, h.meet(v.e(d, c), fd));
            ub = h.meet(ub, h.implies(v.e(c, d), fd));
        }
        let m = self.split.map(|(_, cod)| cod.n);
        if let (Some(m), Some((_, cod))) = (m, self.split) {
            let (y, b) = (c / m, c % m);
            for b2 in 0..b {
                ub = h.meet(ub, h.implies(self.cur[y * m + b2], cod.e(b, b2)));
            }
        }
        for val in h.elements() {
            if !(h.leq(lb, val) && h.leq(val, ub)) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget.limit as u128 {
                return Err(Error::Budget {
                    requested: self.nodes,
                    limit: self.budget.limit,
                });
            }
            self.cur.push(val);
            let row_ok = match self.split {
                Some((dom, cod)) if (c + 1).is_multiple_of(cod.n) => {
                    let y = c / cod.n;
                    let row = &self.cur[y * cod.n..];
                    h.leq(dom.extent(y), h.join_all(row.iter().copied()))
                }
                _ => true,
            };
            if row_ok {
                self.step()?;
            }
            self.cur.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::all_functions;

    fn brute_fiber(v: &PerView) -> Vec<Vec<Elem>> {
        all_functions(v.n, v.h.len())
            .into_iter()
            .filter(|phi| v.contains(phi))
            .collect()
    }

    fn brute_functional(dom: &PerView, cod: &PerView) -> Vec<Vec<Elem>> {
        let prod = dom.product(cod);
        let h = &dom.h;
        let m = cod.n;
        brute_fiber(&prod)
            .into_iter()
            .filter(|f| {
                (0..dom.n).all(|y| {
                    h.leq(dom.extent(y), h.join_all((0..m).map(|b| f[y * m + b])))
                        && (0..m).all(|b| {
                            (0..m).all(|b2| h.leq(h.meet(f[y * m + b], f[y * m + b2]), cod.e(b, b2)))
                        })
                })
            })
            .collect()
    }

    fn sample_views(h: &Arc<HeytingAlgebra>) -> Vec<PerView> {
        let mut out = vec![PerView::discrete(h.clone(), 1), PerView::discrete(h.clone(), 2)];
        // a proper PER on 2 points: E(a,b) = middle-ish element
        let mid = (h.len() as Elem - 1).min(1);
        let rel = Formula::new(vec![h.top(), mid, mid, h.top()]);
        out.push(PerView::from_relation(h.clone(), 2, &rel));
        let alpha = Formula::new(vec![mid, h.top()]);
        out.push(PerView::discrete(h.clone(), 2).restrict(&alpha));
        out
    }

    #[test]
    fn backtracking_matches_brute_force() {
        for h in [HeytingAlgebra::chain(2), HeytingAlgebra::chain(3), HeytingAlgebra::diamond()] {
            let h = Arc::new(h);
            let b = Budget::default();
            for v in sample_views(&h) {
                let fast: Vec<Vec<Elem>> = v.fiber(&b).unwrap().iter().map(|f| f.values().to_vec()).collect();
                assert_eq!(fast, brute_fiber(&v));
                for w in sample_views(&h) {
                    let fast: Vec<Vec<Elem>> =
                        v.functional(&w, &b).unwrap().iter().map(|f| f.values().to_vec()).collect();
                    assert_eq!(fast, brute_functional(&v, &w), "{:?} -> {:?}", v.rel, w.rel);
                }
            }
        }
    }

    #[test]
    fn complementary_pairs_in_the_diamond() {
        let h = Arc::new(HeytingAlgebra::diamond());
        let one = PerView::discrete(h.clone(), 1);
        let two = PerView::discrete(h.clone(), 2);
        let fs = one.functional(&two, &Budget::default()).unwrap();
        let pairs: Vec<Vec<Elem>> = fs.iter().map(|f| f.values().to_vec()).collect();
        // (0,1), (u,v), (v,u), (1,0)
        assert_eq!(pairs, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
    }

    #[test]
    fn budget_is_enforced() {
        let h = Arc::new(HeytingAlgebra::diamond());
        let v = PerView::discrete(h, 6);
        assert!(v.fiber(&Budget::new(100)).unwrap_err().is_budget());
    }
}
