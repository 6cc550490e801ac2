use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::design::{base_s0, base_s1, product, Design};
use super::plan::{BuildPlan, PlanNode};
use super::sequence::{a_sequence, lower_bound};
use crate::error::{Error, Result};
use crate::exact_moments::JacobiWeight;
use crate::quadrature::{solve_equal_weight, Quadrature, QuadratureReport, SolverOptions};
use crate::verify::{verify_auto, VerificationReport, DEFAULT_DESIGN_TOLERANCE};

/// Where a build obtains its equal-weight rules.
pub trait QuadratureSource {
    fn quadrature(&mut self, w: JacobiWeight, t: u32) -> Result<(Quadrature, QuadratureReport)>;
}

/// Solves every request from scratch.
#[derive(Debug, Clone, Default)]
pub struct Solve(pub SolverOptions);

impl QuadratureSource for Solve {
    fn quadrature(&mut self, w: JacobiWeight, t: u32) -> Result<(Quadrature, QuadratureReport)> {
        solve_equal_weight(w, t, &self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub design_tolerance: f64,
    /// Rotation of every `S^1` polygon.
    pub phase: f64,
    pub allow_uncertified: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            design_tolerance: DEFAULT_DESIGN_TOLERANCE,
            phase: 0.0,
            allow_uncertified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub path: String,
    pub label: String,
    pub ambient_dim: usize,
    pub cardinality: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductRecord>,
    pub verification_residual: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub left_count: usize,
    #[serde(rename = "N")]
    pub right_count: usize,
    pub quadrature_residual: f64,
    pub quadrature_certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub sphere_dim: usize,
    pub ambient_dim: usize,
    pub degree: u32,
    pub plan: String,
    pub cardinality: usize,
    /// `a_n` for `S^n`; absent for `S^0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_exponent: Option<u64>,
    /// `t^(a_n)`, for comparison with `cardinality`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_pow_exponent: Option<f64>,
    /// Exact lower bound on any design of this degree, as a decimal string.
    pub lower_bound: String,
    pub design_tolerance: f64,
    pub verification: Vec<VerificationReport>,
    pub passed: bool,
    pub root: NodeReport,
}

struct Builder<'a> {
    degree: u32,
    opts: BuildOptions,
    source: &'a mut dyn QuadratureSource,
    memo: BTreeMap<JacobiWeight, (Quadrature, QuadratureReport)>,
    first_failure: Option<(String, f64)>,
}

impl Builder<'_> {
    fn quadrature(&mut self, w: JacobiWeight) -> Result<(Quadrature, QuadratureReport)> {
        if let Some(hit) = self.memo.get(&w) {
            return Ok(hit.clone());
        }
        let got = self.source.quadrature(w, self.degree)?;
        self.memo.insert(w, got.clone());
        Ok(got)
    }

    fn node(
        &mut self,
        node: &PlanNode,
        path: String,
    ) -> Result<(Design, NodeReport, Vec<VerificationReport>)> {
        let t = self.degree;
        let (design, record, children) = match node {
            PlanNode::S0 => (base_s0(t), None, Vec::new()),
            PlanNode::S1 => (base_s1(t, self.opts.phase), None, Vec::new()),
            PlanNode::Product { m, n, left, right } => {
                let (x, left_report, _) = self.node(left, format!("{path}.left"))?;
                let (y, right_report, _) = self.node(right, format!("{path}.right"))?;
                let w = node.weight().expect("product node");
                let (quad, qreport) = self.quadrature(w)?;
                let design = product(&x, &y, &quad, self.opts.allow_uncertified)?;
                let record = ProductRecord {
                    m: *m,
                    n: *n,
                    k: quad.k(),
                    left_count: x.len(),
                    right_count: y.len(),
                    quadrature_residual: qreport.max_abs_residual,
                    quadrature_certified: quad.is_certified(),
                };
                (design, Some(record), vec![left_report, right_report])
            }
        };
        let checks = verify_auto(&design, t, self.opts.design_tolerance);
        let residual = checks
            .iter()
            .map(|r| r.max_abs_residual)
            .fold(0.0f64, f64::max);
        let passed = checks.iter().all(|r| r.passed);
        if !passed && self.first_failure.is_none() {
            self.first_failure = Some((format!("{path} [{node}]"), residual));
        }
        let report = NodeReport {
            path,
            label: format!("S^{} = {node}", design.sphere_dim()),
            ambient_dim: design.ambient_dim(),
            cardinality: design.len(),
            product: record,
            verification_residual: residual,
            passed,
            children,
        };
        Ok((design, report, checks))
    }
}

/// Executes `plan` bottom-up. Every node's output is verified at the plan's
/// degree; the first failing node (deepest first) is reported in the error.
pub fn build(
    plan: &BuildPlan,
    source: &mut dyn QuadratureSource,
    opts: &BuildOptions,
) -> Result<(Design, BuildReport)> {
    if !(opts.design_tolerance > 0.0) {
        return Err(Error::invalid("design tolerance must be positive"));
    }
    let mut builder = Builder {
        degree: plan.degree,
        opts: *opts,
        source,
        memo: BTreeMap::new(),
        first_failure: None,
    };
    let (design, root, verification) = builder.node(&plan.root, "root".to_string())?;
    let n = plan.sphere_dim as u64;
    let predicted_exponent = (n >= 1).then(|| a_sequence(n));
    let report = BuildReport {
        sphere_dim: plan.sphere_dim,
        ambient_dim: plan.ambient_dim(),
        degree: plan.degree,
        plan: plan.root.to_string(),
        cardinality: design.len(),
        predicted_exponent,
        t_pow_exponent: predicted_exponent.map(|a| (plan.degree as f64).powf(a as f64)),
        lower_bound: lower_bound(n, plan.degree as u64).to_string(),
        design_tolerance: opts.design_tolerance,
        passed: root.passed && builder.first_failure.is_none(),
        verification,
        root,
    };
    match builder.first_failure {
        Some((node, residual)) => Err(Error::BuildFailed {
            node,
            residual,
            tolerance: opts.design_tolerance,
            report: Some(Box::new(report)),
        }),
        None => Ok((design, report)),
    }
}

/// Design size implied by the plan when every rule's node count is known.
pub fn planned_cardinality(
    plan: &BuildPlan,
    mut node_count: impl FnMut(JacobiWeight) -> Option<usize>,
) -> Option<u128> {
    fn go(
        node: &PlanNode,
        t: u32,
        f: &mut dyn FnMut(JacobiWeight) -> Option<usize>,
    ) -> Option<u128> {
        match node {
            PlanNode::S0 => Some(2),
            PlanNode::S1 => Some(t as u128 + 1),
            PlanNode::Product { left, right, .. } => {
                let k = f(node.weight()?)? as u128;
                let a = go(left, t, f)?;
                let b = go(right, t, f)?;
                k.checked_mul(a)?.checked_mul(b)
            }
        }
    }
    go(&plan.root, plan.degree, &mut node_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::plan::{plan, SplitOverrides};

    #[test]
    fn circle_plan_is_a_polygon() {
        let p = plan(1, 7, &SplitOverrides::new()).unwrap();
        let (d, report) = build(&p, &mut Solve::default(), &BuildOptions::default()).unwrap();
        assert_eq!(d.len(), 8);
        assert!(report.passed);
        assert!(report.root.product.is_none());
    }

    #[test]
    fn s2_degree_one() {
        let p = plan(2, 1, &SplitOverrides::new()).unwrap();
        let (d, report) = build(&p, &mut Solve::default(), &BuildOptions::default()).unwrap();
        assert_eq!(d.len(), 4);
        assert!(report.root.verification_residual <= 1e-12);
        let rec = report.root.product.as_ref().unwrap();
        assert_eq!((rec.k, rec.left_count, rec.right_count), (1, 2, 2));
    }

    #[test]
    fn s3_degree_two_has_nine_k_points() {
        let p = plan(3, 2, &SplitOverrides::new()).unwrap();
        let (d, report) = build(&p, &mut Solve::default(), &BuildOptions::default()).unwrap();
        let k = report.root.product.as_ref().unwrap().k;
        assert_eq!(d.len(), 9 * k);
        assert!(report.passed);
    }

    struct Broken;

    impl QuadratureSource for Broken {
        fn quadrature(
            &mut self,
            w: JacobiWeight,
            t: u32,
        ) -> Result<(Quadrature, QuadratureReport)> {
            let mut q = Quadrature::new(w, t, vec![0.0, 0.5]).unwrap();
            let r = crate::quadrature::certify(&mut q, 1e-12);
            Ok((q, r))
        }
    }

    #[test]
    fn bad_quadrature_is_reported_at_its_node() {
        let p = plan(3, 2, &SplitOverrides::new()).unwrap();
        let opts = BuildOptions {
            allow_uncertified: true,
            ..BuildOptions::default()
        };
        match build(&p, &mut Broken, &opts) {
            Err(Error::BuildFailed { node, report, .. }) => {
                assert!(node.starts_with("root ["), "{node}");
                assert!(!report.unwrap().passed);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            build(&p, &mut Broken, &BuildOptions::default()),
            Err(Error::UncertifiedQuadrature { .. })
        ));
    }

    #[test]
    fn planned_cardinality_multiplies_counts() {
        let p = plan(4, 3, &SplitOverrides::new()).unwrap();
        // S^4 = S^1 x (S^1 x S^0)
        let c = planned_cardinality(&p, |w| Some((w.m() + w.n()) as usize)).unwrap();
        assert_eq!(c, 5 * 4 * (3 * 4 * 2));
        assert_eq!(planned_cardinality(&p, |_| None), None);
    }
}
