//! The full skeleton pipeline.
//!
//! 1. Build the initial partition of the normalized space.
//! 2. Sparsify it, keeping the vertex sets `R` (every `h` levels) and `S`
//!    (one level between consecutive `R` levels, well separated).
//! 3. Restrict to the tree on `S` and carry the measure over as `w_S`.
//! 4. Compose: prune children vertex by vertex with weighted Dvoretzky
//!    subsets so the surviving points embed into an ultrametric with
//!    distortion `D`.
//!
//! The result carries a certificate that every cut-set `G` of the final
//! tree satisfies `sum over G of mu(F_p(v))^s >= mu(X)^s`, plus every
//! structural property the argument relies on, all recomputed from scratch.

mod compose;
mod cover;
mod params;
mod weights;

pub use compose::{metric_composition, Composition, CompositionStep};
pub use cover::{verify_cover, verify_cover_subset, CoverMode, CoverVerdict, COVER_SLACK};
pub use params::{ParamMode, PipelineParams};
pub use weights::{check_weights, pipeline_weights, PipelineWeights, WeightReport, WEIGHT_SLACK};

use log::{debug, info};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MeasuredMetricSpace, MetricError, MetricSpace};
use crate::oracles::distortion_of_pair;
use crate::partition::{build_initial_partition, PartitionBuildParams, PartitionError};
use crate::pointset::PointSet;
use crate::ramsey::{RamseyError, DISTORTION_SLACK};
use crate::sparsify::{check_sparsified, sparsify_tree, SparsifyCheck, SparsifyError, LOG_SLACK};
use crate::tree::{min_cutset_cost, FragmentationMap, LacunarityParams, RootedTree, SeparationWitness, TreeJson};
use crate::ultrametric::{Merge, Ultrametric};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkeletonError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("delta = {0} is outside (0, 1/2)")]
    DeltaOutOfRange(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error("vertex {} is not separated: point {} at {} < {}", .0.vertex, .0.point, .0.distance, .0.required)]
    NotSeparated(SeparationWitness),
    #[error("weight of vertex {0} exceeds the sum over its children")]
    NotSubadditive(usize),
    #[error("subset of size {0} is too large for the exact cover check")]
    TooLargeForExact(usize),
    #[error("cover: {0}")]
    Cover(String),
}

/// Items {1}-{6} of the intermediate map, re-checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediateReport {
    pub m: usize,
    pub vertices: usize,
    /// {1} All leaves at depth `m h`.
    pub leaves_at_depth: bool,
    /// {2} `diam(F_u) <= tau^depth(u)`.
    pub diam_decay: bool,
    /// {3} `sum over the next R level of mu(F_v)^t >= mu(F_u)^t`.
    pub power: bool,
    /// {4} `R` and `S` alternate, and the rest of the sparsification checks.
    pub sparsify: SparsifyCheck,
    /// {5} `S` vertices are `beta`-separated.
    pub separated: bool,
    /// {6} `(2 tau^(-2h) / (1 - 3 tau), 1/tau)`-lacunary.
    pub lacunary: bool,
}

impl IntermediateReport {
    pub fn ok(&self) -> bool {
        self.leaves_at_depth && self.diam_decay && self.power && self.sparsify.ok() && self.separated && self.lacunary
    }
}

/// The cut-set certificate and every structural check on the final map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonCertificate {
    /// Minimum over cut-sets `G` of `sum mu(F_p(v))^s`.
    pub cutset_min: f64,
    /// `mu(X)^s`.
    pub bound: f64,
    #[serde(rename = "K_log")]
    pub k_log: f64,
    pub gamma_log: f64,
    pub cover_const_log: f64,
    pub fragmentation_valid: bool,
    pub lacunary: bool,
    pub separated: bool,
    pub leaf_no_sibling: bool,
    /// Strong triangle inequality of the returned ultrametric.
    pub ultrametric: bool,
    /// `d <= rho <= D d` on the subset, up to relative `1e-12`.
    pub embedding: bool,
    pub weights: bool,
    pub intermediate: bool,
    /// Each composition step kept enough weight.
    pub composition: bool,
    /// `D <= 9 / eps` in epsilon mode.
    pub distortion_parameter: bool,
    pub ok: bool,
}

/// Vertex counts along the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSizes {
    pub initial: usize,
    pub sparsified: usize,
    pub s_map: usize,
    #[serde(rename = "final")]
    pub final_map: usize,
}

/// A subset with its certified ultrametric.
#[derive(Clone, Debug)]
pub struct SkeletonResult {
    pub params: PipelineParams,
    /// Original diameter; the pipeline runs on the space divided by it.
    pub scale: f64,
    pub subset: PointSet,
    /// In the units of the input space.
    pub ultrametric: Ultrametric,
    pub map: FragmentationMap,
    pub distortion: f64,
    pub exponent_s: f64,
    pub certificate: SkeletonCertificate,
    pub intermediate: Option<IntermediateReport>,
    pub weights: Option<WeightReport>,
    pub steps: Vec<CompositionStep>,
    pub sizes: TreeSizes,
}

/// Machine-readable summary of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonReport {
    pub subset: PointSet,
    pub dendrogram_merges: Vec<Merge>,
    pub distortion: f64,
    pub exponent_s: f64,
    pub certificate: SkeletonCertificate,
    pub tree: TreeJson,
    pub params: PipelineParams,
    pub scale: f64,
    pub sizes: TreeSizes,
    pub intermediate: Option<IntermediateReport>,
    pub weights: Option<WeightReport>,
}

impl SkeletonResult {
    pub fn report(&self) -> SkeletonReport {
        SkeletonReport {
            subset: self.subset.clone(),
            dendrogram_merges: self.ultrametric.merges(),
            distortion: self.distortion,
            exponent_s: self.exponent_s,
            certificate: self.certificate.clone(),
            tree: TreeJson::from_map(&self.map),
            params: self.params,
            scale: self.scale,
            sizes: self.sizes,
            intermediate: self.intermediate.clone(),
            weights: self.weights,
        }
    }

    pub fn ok(&self) -> bool {
        self.certificate.ok
    }
}

fn log_ge(lhs: f64, rhs: f64) -> bool {
    lhs.ln() >= rhs.ln() - LOG_SLACK
}

fn distortion_parameter_ok(params: &PipelineParams) -> bool {
    match params.mode {
        ParamMode::Epsilon { eps } => params.d <= 9.0 / eps,
        _ => true,
    }
}

fn trivial(x: &MeasuredMetricSpace, params: &PipelineParams) -> SkeletonResult {
    let s = params.exponent();
    let tree = RootedTree::from_parents(vec![None]).expect("single vertex");
    let map = FragmentationMap::new(tree, vec![PointSet::singleton(0)]).expect("one cluster");
    let value = x.total().powf(s);
    SkeletonResult {
        params: *params,
        scale: 0.0,
        subset: PointSet::singleton(0),
        ultrametric: Ultrametric::from_fn(vec![0], |_, _| 0.0),
        map,
        distortion: 1.0,
        exponent_s: s,
        certificate: SkeletonCertificate {
            cutset_min: value,
            bound: value,
            k_log: params.log_k,
            gamma_log: params.gamma_log,
            cover_const_log: params.cover_const_log,
            fragmentation_valid: true,
            lacunary: true,
            separated: true,
            leaf_no_sibling: true,
            ultrametric: true,
            embedding: true,
            weights: true,
            intermediate: true,
            composition: true,
            distortion_parameter: distortion_parameter_ok(params),
            ok: distortion_parameter_ok(params),
        },
        intermediate: None,
        weights: None,
        steps: Vec::new(),
        sizes: TreeSizes { initial: 1, sparsified: 1, s_map: 1, final_map: 1 },
    }
}

fn intermediate_report(
    space: &MetricSpace,
    x: &MeasuredMetricSpace,
    map: &FragmentationMap,
    r: &[bool],
    s: &[bool],
    params: &PipelineParams,
    m: usize,
    sparsify: SparsifyCheck,
) -> IntermediateReport {
    let tree = map.tree();
    let depth = m * params.h;
    let leaves_at_depth = tree.leaves().iter().all(|&v| tree.depth(v) == depth);
    let diam = map.cluster_diameters(space);
    let lt = params.tau.ln();
    let diam_decay = (0..map.len()).all(|v| diam[v] == 0.0 || diam[v].ln() <= tree.depth(v) as f64 * lt);
    let t = params.t2;
    let mass = |v: usize| x.measure_of(map.cluster(v).as_slice()).powf(t);
    let power = (0..map.len()).filter(|&u| r[u] && !tree.is_leaf(u)).all(|u| {
        let lhs: f64 = tree.first_descendants_in(u, r).iter().map(|&v| mass(v)).sum();
        log_ge(lhs, mass(u))
    });
    let separated = map.is_separated(space, params.beta, (0..map.len()).filter(|&v| s[v]));
    let (log_k, log_gamma) = params.intermediate_lacunarity();
    let lacunary = map.is_lacunary(space, LacunarityParams { log_k, log_gamma });
    IntermediateReport { m, vertices: map.len(), leaves_at_depth, diam_decay, power, sparsify, separated, lacunary }
}

/// Runs the pipeline with fixed parameters.
pub fn build_skeleton(x: &MeasuredMetricSpace, params: &PipelineParams) -> Result<SkeletonResult, SkeletonError> {
    let n = x.len();
    if n == 0 {
        return Err(MetricError::Empty.into());
    }
    if n == 1 {
        return Ok(trivial(x, params));
    }
    let normalized = x.space.normalize_diameter()?;
    let space = &normalized.space;
    let xn = MeasuredMetricSpace { space: space.clone(), mu: x.mu.clone() };

    let pp = PartitionBuildParams::with_minimal_m(params.tau, params.h, params.k, space.min_distance())?;
    info!("initial partition: k = {}, h = {}, m = {}", pp.k, pp.h, pp.m);
    let (map0, wt) = build_initial_partition(&xn, &pp)?;
    let sp = sparsify_tree(&wt)?;
    let sp_check = check_sparsified(&wt, &sp);

    let (map1, old1) = map0.restrict(&sp.keep);
    let r1: Vec<bool> = old1.iter().map(|&v| sp.r[v]).collect();
    let s1: Vec<bool> = old1.iter().map(|&v| sp.s[v]).collect();
    debug!("sparsified tree: {} of {} vertices", map1.len(), map0.len());
    let inter = intermediate_report(space, &xn, &map1, &r1, &s1, params, pp.m, sp_check);

    let pw = pipeline_weights(&xn, &map1, &r1, &s1, params.t2);
    let wreport = check_weights(&xn, &map1, &r1, &s1, params.t2, &pw);
    let (map2, old2) = map1.restrict(&s1);
    let w2: Vec<f64> = old2.iter().map(|&v| pw.w_s[v]).collect();

    let (g, rho, steps) = if params.simple {
        let rho = map2.ultrametric_from_lacunary(space);
        (map2.clone(), rho, Vec::new())
    } else {
        let comp = metric_composition(space, &map2, &w2, params.beta, params.d_prime)?;
        (comp.map, comp.ultrametric, comp.steps)
    };
    let sizes = TreeSizes { initial: map0.len(), sparsified: map1.len(), s_map: map2.len(), final_map: g.len() };

    let s_exp = params.exponent();
    let tree = g.tree();
    let cost: Vec<f64> = (0..g.len())
        .map(|v| x.measure_of(g.cluster(tree.parent(v).unwrap_or(v)).as_slice()))
        .collect();
    let cutset_min = min_cutset_cost(tree, &cost, s_exp);
    let bound = x.total().powf(s_exp);

    let fragmentation_valid = g.validate(n).is_ok();
    let lacunary = g.is_lacunary(space, LacunarityParams { log_k: params.log_k, log_gamma: params.gamma_log });
    let separated = g.is_separated(space, params.beta, 0..g.len());
    let leaf_no_sibling = g.leaf_with_sibling().is_none()
        && tree.leaves().iter().all(|&l| tree.parent(l).is_none_or(|p| g.cluster(p) == g.cluster(l)));

    let ultrametric = rho.scaled(normalized.scale);
    let strong = ultrametric.strong_triangle_witness().is_none();
    let log_bound = params.log_distortion_bound();
    let pts = ultrametric.points();
    let mut embedding = true;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = x.space.d(pts[i], pts[j]);
            let r = ultrametric.get(i, j);
            let upper = if params.simple {
                r.ln() - d.ln() <= log_bound + DISTORTION_SLACK
            } else {
                r <= params.d * d * (1.0 + DISTORTION_SLACK)
            };
            // The ultrametric was built at unit diameter, so scaling back can
            // leave it an ulp below d.
            embedding &= d <= r * (1.0 + DISTORTION_SLACK) && upper;
        }
    }
    let distortion = distortion_of_pair(&x.space, &ultrametric).unwrap_or(f64::INFINITY);
    let composition = steps.iter().all(|st| log_ge(st.lhs, st.rhs));
    let distortion_parameter = distortion_parameter_ok(params);
    let ok = cutset_min >= bound * (1.0 - LOG_SLACK)
        && fragmentation_valid
        && lacunary
        && separated
        && leaf_no_sibling
        && strong
        && embedding
        && wreport.ok()
        && inter.ok()
        && composition
        && distortion_parameter;
    info!("skeleton: {} of {} points, distortion {distortion}, ok = {ok}", pts.len(), n);
    let certificate = SkeletonCertificate {
        cutset_min,
        bound,
        k_log: params.log_k,
        gamma_log: params.gamma_log,
        cover_const_log: params.cover_const_log,
        fragmentation_valid,
        lacunary,
        separated,
        leaf_no_sibling,
        ultrametric: strong,
        embedding,
        weights: wreport.ok(),
        intermediate: inter.ok(),
        composition,
        distortion_parameter,
        ok,
    };
    Ok(SkeletonResult {
        params: *params,
        scale: normalized.scale,
        subset: PointSet::from_unsorted(pts.to_vec()),
        ultrametric,
        map: g,
        distortion,
        exponent_s: s_exp,
        certificate,
        intermediate: Some(inter),
        weights: Some(wreport),
        steps,
        sizes,
    })
}

/// Skeleton with exponent `1 - eps` and distortion at most `9 / eps`.
pub fn solve_measure(x: &MeasuredMetricSpace, eps: f64) -> Result<SkeletonResult, SkeletonError> {
    build_skeleton(x, &PipelineParams::from_epsilon(eps)?)
}

/// Skeleton with distortion at most `2 + delta`.
pub fn solve_measure_2plus(x: &MeasuredMetricSpace, delta: f64) -> Result<SkeletonResult, SkeletonError> {
    build_skeleton(x, &PipelineParams::from_delta(delta)?)
}
