//! Domain types, Pareto dominance, front extraction and objective normalization.
//!
//! Everything downstream of [`normalize`] works in a single minimization
//! convention: maximized objectives are negated, all objectives are divided by
//! their normalizer.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub scale: Scale,
}

impl Param {
    pub fn linear(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Param {
            name: name.into(),
            lower,
            upper,
            scale: Scale::Linear,
        }
    }

    pub fn log(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Param {
            name: name.into(),
            lower,
            upper,
            scale: Scale::Log,
        }
    }

    /// Maps a raw value to `[0, 1]` (in log space for log-scale parameters).
    pub fn to_unit(&self, v: f64) -> f64 {
        let u = match self.scale {
            Scale::Linear => (v - self.lower) / (self.upper - self.lower),
            Scale::Log => (v.ln() - self.lower.ln()) / (self.upper.ln() - self.lower.ln()),
        };
        u.clamp(0.0, 1.0)
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = match self.scale {
            Scale::Linear => self.lower + u * (self.upper - self.lower),
            Scale::Log => (self.lower.ln() + u * (self.upper.ln() - self.lower.ln())).exp(),
        };
        v.clamp(self.lower, self.upper)
    }
}

/// The bounded domain of the optimization, one [`Param`] per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Param>", into = "Vec<Param>")]
pub struct SearchSpace {
    params: Vec<Param>,
}

impl SearchSpace {
    pub fn new(params: Vec<Param>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::SearchSpace("no parameters".into()));
        }
        let mut names = HashSet::new();
        for p in &params {
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
                return Err(Error::SearchSpace(format!(
                    "parameter {:?} needs finite lower < upper, got [{}, {}]",
                    p.name, p.lower, p.upper
                )));
            }
            if p.scale == Scale::Log && p.lower <= 0.0 {
                return Err(Error::SearchSpace(format!(
                    "log-scale parameter {:?} needs lower > 0",
                    p.name
                )));
            }
            if !names.insert(p.name.as_str()) {
                return Err(Error::SearchSpace(format!("duplicate parameter {:?}", p.name)));
            }
        }
        Ok(SearchSpace { params })
    }

    /// `d` linear parameters `x0..x{d-1}` on `[0, 1]`.
    pub fn unit_cube(d: usize) -> Self {
        SearchSpace::new((0..d).map(|i| Param::linear(format!("x{i}"), 0.0, 1.0)).collect())
            .expect("unit cube is a valid space")
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.name.as_str())
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        self.params.iter().zip(x).map(|(p, &v)| p.to_unit(v)).collect()
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.dim());
        self.params.iter().zip(u).map(|(p, &v)| p.from_unit(v)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .params
                .iter()
                .zip(x)
                .all(|(p, &v)| v >= p.lower && v <= p.upper)
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                actual: x.len(),
            })
        }
    }
}

impl TryFrom<Vec<Param>> for SearchSpace {
    type Error = Error;

    fn try_from(params: Vec<Param>) -> Result<Self> {
        SearchSpace::new(params)
    }
}

impl From<SearchSpace> for Vec<Param> {
    fn from(space: SearchSpace) -> Self {
        space.params
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub name: String,
    pub direction: Direction,
    /// Threshold in raw units; `None` means unconstrained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_bound: Option<f64>,
    pub normalizer: f64,
}

impl Objective {
    pub fn minimize(name: impl Into<String>, normalizer: f64) -> Self {
        Objective {
            name: name.into(),
            direction: Direction::Minimize,
            constraint_bound: None,
            normalizer,
        }
    }

    pub fn maximize(name: impl Into<String>, normalizer: f64) -> Self {
        Objective {
            name: name.into(),
            direction: Direction::Maximize,
            constraint_bound: None,
            normalizer,
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.constraint_bound = Some(bound);
        self
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        }
    }

    /// The constraint bound in normalized (minimization) units.
    pub fn normalized_bound(&self) -> Option<f64> {
        self.constraint_bound.map(|b| self.sign() * b / self.normalizer)
    }

    pub fn satisfied(&self, raw: f64) -> bool {
        match (self.constraint_bound, self.direction) {
            (None, _) => true,
            (Some(b), Direction::Minimize) => raw <= b,
            (Some(b), Direction::Maximize) => raw >= b,
        }
    }
}

/// The ordered objectives of a problem.
///
/// Multi-objective problems have at least two objectives; a single objective
/// is accepted so that scalar landscapes run through the same machinery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Objective>", into = "Vec<Objective>")]
pub struct ObjectiveSpec {
    objectives: Vec<Objective>,
}

impl ObjectiveSpec {
    pub fn new(objectives: Vec<Objective>) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::ObjectiveSpec("no objectives".into()));
        }
        let mut names = HashSet::new();
        for o in &objectives {
            if !(o.normalizer.is_finite() && o.normalizer > 0.0) {
                return Err(Error::ObjectiveSpec(format!(
                    "objective {:?} needs a positive normalizer",
                    o.name
                )));
            }
            if o.constraint_bound.is_some_and(|b| !b.is_finite()) {
                return Err(Error::ObjectiveSpec(format!(
                    "objective {:?} has a non-finite bound; omit it instead",
                    o.name
                )));
            }
            if !names.insert(o.name.as_str()) {
                return Err(Error::ObjectiveSpec(format!("duplicate objective {:?}", o.name)));
            }
        }
        Ok(ObjectiveSpec { objectives })
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.objectives.iter().map(|o| o.name.as_str())
    }

    pub fn is_feasible(&self, f_raw: &[f64]) -> bool {
        self.objectives.iter().zip(f_raw).all(|(o, &v)| o.satisfied(v))
    }
}

impl TryFrom<Vec<Objective>> for ObjectiveSpec {
    type Error = Error;

    fn try_from(objectives: Vec<Objective>) -> Result<Self> {
        ObjectiveSpec::new(objectives)
    }
}

impl From<ObjectiveSpec> for Vec<Objective> {
    fn from(spec: ObjectiveSpec) -> Self {
        spec.objectives
    }
}

/// Normalized, minimization-convention copy of `f_raw`.
pub fn normalize(f_raw: &[f64], spec: &ObjectiveSpec) -> Vec<f64> {
    debug_assert_eq!(f_raw.len(), spec.len());
    spec.objectives
        .iter()
        .zip(f_raw)
        .map(|(o, &v)| o.sign() * v / o.normalizer)
        .collect()
}

/// Which solver produced an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Prior,
    Solver,
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    pub source: Source,
    pub x: Vec<f64>,
    pub f_raw: Vec<f64>,
    pub f_norm: Vec<f64>,
    pub feasible: bool,
    /// Set when the evaluator failed; objective vectors are then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl Evaluation {
    pub fn new(index: usize, source: Source, x: Vec<f64>, f_raw: Vec<f64>, spec: &ObjectiveSpec) -> Self {
        let f_norm = normalize(&f_raw, spec);
        let feasible = spec.is_feasible(&f_raw);
        Evaluation {
            index,
            source,
            x,
            f_raw,
            f_norm,
            feasible,
            failure: None,
        }
    }

    pub fn failed(index: usize, source: Source, x: Vec<f64>, reason: impl Into<String>) -> Self {
        Evaluation {
            index,
            source,
            x,
            f_raw: Vec::new(),
            f_norm: Vec::new(),
            feasible: false,
            failure: Some(reason.into()),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// True iff `a` is no worse than `b` everywhere and strictly better somewhere
/// (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Indices of the non-dominated vectors, in input order.
pub fn non_dominated_indices(points: &[&[f64]]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .enumerate()
                .any(|(j, q)| j != i && dominates_unchecked(q, points[i]))
        })
        .collect()
}

/// Append-only store of evaluations with a fixed normalized reference point.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParetoArchive {
    evaluations: Vec<Evaluation>,
    reference_point: Vec<f64>,
}

impl ParetoArchive {
    pub fn new(reference_point: Vec<f64>) -> Self {
        ParetoArchive {
            evaluations: Vec::new(),
            reference_point,
        }
    }

    pub fn from_evaluations(evaluations: Vec<Evaluation>, reference_point: Vec<f64>) -> Self {
        ParetoArchive {
            evaluations,
            reference_point,
        }
    }

    pub fn push(&mut self, evaluation: Evaluation) {
        self.evaluations.push(evaluation);
    }

    pub fn evaluations(&self) -> &[Evaluation] {
        &self.evaluations
    }

    /// Evaluations that produced objective values.
    pub fn successful(&self) -> impl Iterator<Item = &Evaluation> {
        self.evaluations.iter().filter(|e| !e.is_failed())
    }

    pub fn len(&self) -> usize {
        self.evaluations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evaluations.is_empty()
    }

    pub fn reference_point(&self) -> &[f64] {
        &self.reference_point
    }

    pub fn set_reference_point(&mut self, reference_point: Vec<f64>) {
        self.reference_point = reference_point;
    }

    /// The non-dominated evaluations (of the feasible subset when
    /// `feasible_only`), ordered by sample index. Failed samples never enter.
    pub fn pareto_front(&self, feasible_only: bool) -> Vec<&Evaluation> {
        pareto_front(&self.evaluations, feasible_only)
    }

    /// Hypervolume of the feasible front against the archive's reference point.
    pub fn feasible_hypervolume(&self) -> Result<f64> {
        let front: Vec<Vec<f64>> = self
            .pareto_front(true)
            .into_iter()
            .map(|e| e.f_norm.clone())
            .collect();
        crate::hypervolume::hypervolume_exact(&front, &self.reference_point)
    }
}

/// Non-dominated subset of `evaluations`, stable by sample index.
pub fn pareto_front(evaluations: &[Evaluation], feasible_only: bool) -> Vec<&Evaluation> {
    let mut pool: Vec<&Evaluation> = evaluations
        .iter()
        .filter(|e| !e.is_failed() && (!feasible_only || e.feasible))
        .collect();
    pool.sort_by_key(|e| e.index);
    let vectors: Vec<&[f64]> = pool.iter().map(|e| e.f_norm.as_slice()).collect();
    non_dominated_indices(&vectors)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}
