use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::term::{Leaf, TermExpr, TermStore, TreeId};
use crate::spectral::Trajectory;
use crate::{Error, Result};

/// Largest supported expansion level.
pub const MAX_N: usize = 6;

/// Default cap on distinct trees in the store during one expansion.
pub const DEFAULT_TERM_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bucket {
    /// Only `vl` and `wbar` leaves.
    H,
    /// At least one `w` leaf.
    W,
    /// At least one `v` leaf and no `w` leaf.
    Z,
}

impl Bucket {
    pub fn label(self) -> &'static str {
        match self {
            Bucket::H => "H",
            Bucket::W => "W",
            Bucket::Z => "Z",
        }
    }
}

pub fn classify(store: &TermStore, id: TreeId) -> Bucket {
    if store.count(id, Leaf::W) > 0 {
        Bucket::W
    } else if store.count(id, Leaf::V) > 0 {
        Bucket::Z
    } else {
        Bucket::H
    }
}

/// Evaluated bucket sums.
#[derive(Debug, Clone)]
pub struct BucketValues {
    pub h: Trajectory,
    pub w: Trajectory,
    pub z: Trajectory,
}

/// The symbolic buckets `v = H_N + W_N + Z_N`, each a canonical list of
/// `(tree, coefficient)` sorted by tree order.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub n: usize,
    pub store: TermStore,
    pub h_terms: Vec<(TreeId, i64)>,
    pub w_terms: Vec<(TreeId, i64)>,
    pub z_terms: Vec<(TreeId, i64)>,
    pub evaluated: Option<BucketValues>,
}

impl DecompositionResult {
    pub fn bucket(&self, b: Bucket) -> &[(TreeId, i64)] {
        match b {
            Bucket::H => &self.h_terms,
            Bucket::W => &self.w_terms,
            Bucket::Z => &self.z_terms,
        }
    }

    pub fn terms(&self, b: Bucket) -> Vec<TermExpr> {
        self.bucket(b)
            .iter()
            .map(|(id, c)| TermExpr {
                coefficient: *c,
                tree: self.store.tree(*id),
            })
            .collect()
    }

    pub fn counts(&self) -> [usize; 3] {
        [self.h_terms.len(), self.w_terms.len(), self.z_terms.len()]
    }

    /// Checks the classification invariants of every bucket.
    pub fn check_invariants(&self) -> Result<()> {
        for b in [Bucket::H, Bucket::W, Bucket::Z] {
            for (id, c) in self.bucket(b) {
                if *c == 0 || classify(&self.store, *id) != b {
                    return Err(Error::InvalidConfig(format!(
                        "term {} {} misplaced in bucket {}",
                        c,
                        self.store.sexpr(*id),
                        b.label()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Text dump: a `#` header per bucket followed by one
    /// `<coefficient> <tree>` line per term.
    pub fn dump(&self) -> String {
        let mut out = format!("# N = {}\n", self.n);
        for b in [Bucket::H, Bucket::W, Bucket::Z] {
            let terms = self.bucket(b);
            out.push_str(&format!("# {} ({} terms)\n", b.label(), terms.len()));
            for (id, c) in terms {
                out.push_str(&format!("{} {}\n", c, self.store.sexpr(*id)));
            }
        }
        out
    }
}

type Poly = Vec<(TreeId, i64)>;

struct Expander {
    store: TermStore,
    limit: usize,
    memo: HashMap<TreeId, Rc<Poly>>,
    /// `vl + B(v,v) + B(w,v) + B(wbar,v)`.
    rhs: Rc<Poly>,
}

impl Expander {
    fn new(limit: usize) -> Self {
        let mut store = TermStore::new();
        let [vl, v, w, wbar] = Leaf::ALL.map(|l| store.leaf(l));
        let rhs = vec![
            (vl, 1),
            (store.b(v, v), 1),
            (store.b(w, v), 1),
            (store.b(wbar, v), 1),
        ];
        Self {
            store,
            limit,
            memo: HashMap::new(),
            rhs: Rc::new(rhs),
        }
    }

    fn guard(&self, extra: usize) -> Result<()> {
        if self.store.len() + extra > self.limit {
            return Err(Error::TermLimit(format!(
                "more than {} distinct trees",
                self.limit
            )));
        }
        Ok(())
    }

    /// Every `v` leaf of `id` replaced by the right-hand side at once.
    fn subst(&mut self, id: TreeId) -> Result<Rc<Poly>> {
        if let Some(p) = self.memo.get(&id) {
            return Ok(p.clone());
        }
        let out = if self.store.count(id, Leaf::V) == 0 {
            Rc::new(vec![(id, 1)])
        } else {
            match self.store.node(id) {
                Ok(_) => self.rhs.clone(),
                Err((a, b)) => {
                    let (pa, pb) = (self.subst(a)?, self.subst(b)?);
                    self.guard(pa.len() * pb.len())?;
                    let mut acc: HashMap<TreeId, i64> = HashMap::new();
                    for (x, cx) in pa.iter() {
                        for (y, cy) in pb.iter() {
                            let t = self.store.b(*x, *y);
                            add_coeff(&mut acc, t, cx * cy)?;
                        }
                    }
                    Rc::new(acc.into_iter().collect())
                }
            }
        };
        self.memo.insert(id, out.clone());
        Ok(out)
    }
}

fn add_coeff(acc: &mut HashMap<TreeId, i64>, t: TreeId, c: i64) -> Result<()> {
    let e = acc.entry(t).or_insert(0);
    *e = e
        .checked_add(c)
        .ok_or_else(|| Error::TermLimit("coefficient overflow".into()))?;
    Ok(())
}

/// Symbolic decomposition at level `n`, `2 <= n <= 6`.
pub fn expand(n: usize) -> Result<DecompositionResult> {
    expand_with_limit(n, DEFAULT_TERM_LIMIT)
}

/// [`expand`] with a custom cap on distinct trees; exceeding it is a
/// [`Error::TermLimit`].
pub fn expand_with_limit(n: usize, limit: usize) -> Result<DecompositionResult> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::InvalidConfig(format!(
            "expansion level must lie in [2, {MAX_N}], got {n}"
        )));
    }
    let mut ex = Expander::new(limit);
    let st = &mut ex.store;
    let [vl, v, w, wbar] = Leaf::ALL.map(|l| st.leaf(l));
    let mut h: HashMap<TreeId, i64> = HashMap::from([(vl, 1)]);
    let mut wt: HashMap<TreeId, i64> = HashMap::from([(st.b(w, v), 1)]);
    let mut z: HashMap<TreeId, i64> = HashMap::from([(st.b(v, v), 1), (st.b(wbar, v), 1)]);
    for _ in 3..=n {
        let mut next: HashMap<TreeId, i64> = HashMap::new();
        let mut zs: Vec<(TreeId, i64)> = z.drain().collect();
        zs.sort_unstable();
        for (t, c) in zs {
            for (u, d) in ex.subst(t)?.iter() {
                let cd = c
                    .checked_mul(*d)
                    .ok_or_else(|| Error::TermLimit("coefficient overflow".into()))?;
                add_coeff(&mut next, *u, cd)?;
            }
        }
        for (u, c) in next {
            if c == 0 {
                continue;
            }
            let target = match classify(&ex.store, u) {
                Bucket::H => &mut h,
                Bucket::W => &mut wt,
                Bucket::Z => &mut z,
            };
            add_coeff(target, u, c)?;
        }
    }
    let store = ex.store;
    let sorted = |m: HashMap<TreeId, i64>| {
        let mut v: Vec<(TreeId, i64)> = m.into_iter().filter(|(_, c)| *c != 0).collect();
        v.sort_by(|a, b| store.cmp(a.0, b.0));
        v
    };
    let (h_terms, w_terms, z_terms) = (sorted(h), sorted(wt), sorted(z));
    Ok(DecompositionResult {
        n,
        store,
        h_terms,
        w_terms,
        z_terms,
        evaluated: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_two_is_the_base_case() {
        let d = expand(2).unwrap();
        assert_eq!(d.dump(), "# N = 2\n# H (1 terms)\n1 vl\n# W (1 terms)\n1 (B v w)\n# Z (2 terms)\n1 (B v v)\n1 (B v wbar)\n");
        d.check_invariants().unwrap();
    }

    #[test]
    fn level_bounds() {
        assert!(expand(1).is_err());
        assert!(expand(7).is_err());
        assert!(matches!(expand_with_limit(4, 10), Err(Error::TermLimit(_))));
    }
}
