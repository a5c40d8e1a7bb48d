use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::term::{Leaf, TermExpr, TermStore, TreeId};
use crate::duhamel::{bilinear_b, QuadratureConfig};
use crate::spectral::Trajectory;
use crate::{Error, Result};

/// Trajectories bound to the leaf symbols; all share one grid and time grid.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    map: BTreeMap<Leaf, Trajectory>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, leaf: Leaf, traj: Trajectory) -> Result<Self> {
        if let Some(other) = self.map.values().next() {
            other.ensure_compatible(&traj)?;
        }
        self.map.insert(leaf, traj);
        Ok(self)
    }

    pub fn get(&self, leaf: Leaf) -> Result<&Trajectory> {
        self.map
            .get(&leaf)
            .ok_or_else(|| Error::UnboundLeaf(leaf.symbol().into()))
    }
}

/// Bottom-up evaluator with one cache entry per distinct subtree. Zero
/// subtrees are cached as `None` and never passed to `B`.
pub struct Evaluator<'a> {
    store: &'a TermStore,
    bindings: &'a Bindings,
    quadrature: QuadratureConfig,
    memo: HashMap<TreeId, Option<Arc<Trajectory>>>,
    /// Number of `B` evaluations performed so far.
    pub b_calls: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a TermStore, bindings: &'a Bindings, quadrature: QuadratureConfig) -> Self {
        Self {
            store,
            bindings,
            quadrature,
            memo: HashMap::new(),
            b_calls: 0,
        }
    }

    /// Value of the tree `id` without coefficient; `None` when it vanishes.
    pub fn eval(&mut self, id: TreeId) -> Result<Option<Arc<Trajectory>>> {
        if let Some(v) = self.memo.get(&id) {
            return Ok(v.clone());
        }
        let out = match self.store.node(id) {
            Ok(leaf) => {
                let t = self.bindings.get(leaf)?;
                (!t.is_zero()).then(|| Arc::new(t.clone()))
            }
            Err((a, b)) => {
                let x = self.eval(a)?;
                let y = if a == b { x.clone() } else { self.eval(b)? };
                match (x, y) {
                    (Some(x), Some(y)) => {
                        self.b_calls += 1;
                        let r = if a == b {
                            bilinear_b(&x, &x, &self.quadrature)?
                        } else {
                            bilinear_b(&x, &y, &self.quadrature)?
                        };
                        (!r.is_zero()).then(|| Arc::new(r))
                    }
                    _ => None,
                }
            }
        };
        self.memo.insert(id, out.clone());
        Ok(out)
    }

    /// `Σ c · tree` in the given order.
    pub fn sum(&mut self, terms: &[(TreeId, i64)]) -> Result<Trajectory> {
        let any = self
            .bindings
            .map
            .values()
            .next()
            .ok_or_else(|| Error::UnboundLeaf("no leaves bound".into()))?;
        let mut acc = Trajectory::zeros(*any.grid(), any.times().to_vec())?;
        for (id, c) in terms {
            if let Some(t) = self.eval(*id)? {
                acc = acc.add(&t.scaled(*c as f64))?;
            }
        }
        Ok(acc)
    }
}

/// Evaluates one term, one `B` call per internal node and the coefficient
/// applied at the root.
pub fn evaluate_term(
    t: &TermExpr,
    bindings: &Bindings,
    q: &QuadratureConfig,
) -> Result<Trajectory> {
    let mut store = TermStore::new();
    let id = store.intern(&t.tree);
    Evaluator::new(&store, bindings, *q).sum(&[(id, t.coefficient)])
}
