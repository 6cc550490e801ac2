use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_moments::JacobiWeight;

/// Requested `(m, n)` split per ambient dimension.
pub type SplitOverrides = BTreeMap<usize, (usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlanNode {
    /// `S^0 = {+1, -1}`.
    S0,
    /// Regular polygon on `S^1`.
    S1,
    /// Product of an `m`-dimensional factor (left) and an `n`-dimensional
    /// factor (right) through an equal-weight rule for `w_{m,n}`.
    Product {
        m: usize,
        n: usize,
        left: Box<PlanNode>,
        right: Box<PlanNode>,
    },
}

impl PlanNode {
    pub fn ambient_dim(&self) -> usize {
        match self {
            PlanNode::S0 => 1,
            PlanNode::S1 => 2,
            PlanNode::Product { m, n, .. } => m + n,
        }
    }

    pub fn weight(&self) -> Option<JacobiWeight> {
        match self {
            PlanNode::Product { m, n, .. } => {
                Some(JacobiWeight::new(*m as u32, *n as u32).expect("plan dims are >= 1"))
            }
            _ => None,
        }
    }

    /// Every `(m, n)` weight the plan needs, children first.
    pub fn weights(&self) -> Vec<JacobiWeight> {
        let mut out = Vec::new();
        self.collect_weights(&mut out);
        out
    }

    fn collect_weights(&self, out: &mut Vec<JacobiWeight>) {
        if let PlanNode::Product { left, right, .. } = self {
            left.collect_weights(out);
            right.collect_weights(out);
            out.push(self.weight().expect("product node"));
        }
    }
}

impl fmt::Display for PlanNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanNode::S0 => write!(f, "S^0"),
            PlanNode::S1 => write!(f, "S^1"),
            PlanNode::Product { left, right, .. } => write!(f, "({left} x {right})"),
        }
    }
}

/// Recursion tree for a design on `S^sphere_dim` at degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildPlan {
    pub sphere_dim: usize,
    pub degree: u32,
    pub root: PlanNode,
}

impl BuildPlan {
    pub fn ambient_dim(&self) -> usize {
        self.sphere_dim + 1
    }
}

/// Default split of the ambient dimension `dim >= 3`.
///
/// `S^(2k-1)` (dim `2k`) splits as `S^(k-1) x S^(k-1)`; `S^(2k)` (dim `2k+1`)
/// as `S^(k-1) x S^k` with the smaller factor in the `m` slot. `S^2` is the
/// exception `S^1 x S^0`, i.e. the weight `w_{2,1}`.
pub fn default_split(dim: usize) -> (usize, usize) {
    assert!(dim >= 3, "dimensions 1 and 2 are leaves");
    match dim {
        3 => (2, 1),
        _ if dim.is_multiple_of(2) => (dim / 2, dim / 2),
        _ => (dim / 2, dim / 2 + 1),
    }
}

/// Plans a design on `S^sphere_dim`; `overrides` may replace the split at any
/// ambient dimension `>= 2`.
pub fn plan(sphere_dim: usize, degree: u32, overrides: &SplitOverrides) -> Result<BuildPlan> {
    for (&dim, &(m, n)) in overrides {
        if dim < 2 || m == 0 || n == 0 || m + n != dim {
            return Err(Error::invalid(format!(
                "split override {dim} -> ({m}, {n}) must have m, n >= 1 and m + n = {dim} >= 2"
            )));
        }
    }
    Ok(BuildPlan {
        sphere_dim,
        degree,
        root: plan_node(sphere_dim + 1, overrides),
    })
}

fn plan_node(dim: usize, overrides: &SplitOverrides) -> PlanNode {
    let split = overrides.get(&dim).copied();
    match (dim, split) {
        (1, _) => PlanNode::S0,
        (2, None) => PlanNode::S1,
        (_, split) => {
            let (m, n) = split.unwrap_or_else(|| default_split(dim));
            PlanNode::Product {
                m,
                n,
                left: Box::new(plan_node(m, overrides)),
                right: Box::new(plan_node(n, overrides)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_plan(n: usize) -> PlanNode {
        plan(n, 3, &SplitOverrides::new()).unwrap().root
    }

    #[test]
    fn small_spheres() {
        assert_eq!(default_plan(0), PlanNode::S0);
        assert_eq!(default_plan(1), PlanNode::S1);
        match default_plan(2) {
            PlanNode::Product { m, n, left, right } => {
                assert_eq!((m, n), (2, 1));
                assert_eq!((*left, *right), (PlanNode::S1, PlanNode::S0));
            }
            other => panic!("{other:?}"),
        }
        match default_plan(3) {
            PlanNode::Product { m, n, left, right } => {
                assert_eq!((m, n), (2, 2));
                assert_eq!((*left, *right), (PlanNode::S1, PlanNode::S1));
            }
            other => panic!("{other:?}"),
        }
        match default_plan(4) {
            PlanNode::Product { m, n, left, right } => {
                assert_eq!((m, n), (2, 3));
                assert_eq!(*left, PlanNode::S1);
                assert_eq!(right.ambient_dim(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn children_dims_sum_to_parent() {
        fn check(node: &PlanNode) {
            if let PlanNode::Product { m, n, left, right } = node {
                assert_eq!(left.ambient_dim(), *m);
                assert_eq!(right.ambient_dim(), *n);
                check(left);
                check(right);
            }
        }
        for n in 0..40 {
            let p = default_plan(n);
            assert_eq!(p.ambient_dim(), n + 1);
            check(&p);
        }
    }

    #[test]
    fn overrides_are_validated_and_applied() {
        let mut o = SplitOverrides::new();
        o.insert(5, (3, 1));
        assert!(plan(4, 2, &o).is_err());
        let mut o = SplitOverrides::new();
        o.insert(5, (3, 2));
        o.insert(2, (1, 1));
        let p = plan(4, 2, &o).unwrap();
        assert_eq!(p.root.to_string(), "(((S^0 x S^0) x S^0) x (S^0 x S^0))");
        let mut o = SplitOverrides::new();
        o.insert(1, (1, 0));
        assert!(plan(3, 2, &o).is_err());
    }
}
