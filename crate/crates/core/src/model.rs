//! Driving systems, bundle random dynamical systems over them, the derived
//! product and pair systems, and factor maps between systems.
//!
//! Everything is finite. Points of a fiber are addressed by their *local*
//! index `0..fiber_len(ω)`; the global point set `X` is only used for names
//! and distances. All values are immutable once built.

use std::collections::HashMap;
use std::fmt;

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::{format_rational, Rational};

const UNMAPPED: usize = usize::MAX;

/// A finite probability space `(Ω, P)` with a map `ϑ` on base indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrivingSystem {
    prob: Vec<Rational>,
    theta: Vec<usize>,
}

impl DrivingSystem {
    /// Checks shape only; probability and invariance are reported by
    /// [`DrivingSystem::violations`].
    pub fn new(prob: Vec<Rational>, theta: Vec<usize>) -> Result<Self> {
        if prob.is_empty() {
            return Err(Error::Invalid("driving system has no base points".into()));
        }
        if prob.len() != theta.len() {
            return Err(Error::Invalid(format!(
                "{} probabilities but theta has {} entries",
                prob.len(),
                theta.len()
            )));
        }
        if let Some(&bad) = theta.iter().find(|&&t| t >= prob.len()) {
            return Err(Error::Invalid(format!("theta maps to unknown base point {bad}")));
        }
        Ok(DrivingSystem { prob, theta })
    }

    /// `Ω = {0}`, `P = δ_0`, `ϑ = id`.
    pub fn one_point() -> Self {
        DrivingSystem {
            prob: vec![crate::rational::one()],
            theta: vec![0],
        }
    }

    pub fn size(&self) -> usize {
        self.prob.len()
    }

    pub fn prob(&self, w: usize) -> &Rational {
        &self.prob[w]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.prob
    }

    pub fn theta(&self, w: usize) -> usize {
        self.theta[w]
    }

    pub fn thetas(&self) -> &[usize] {
        &self.theta
    }

    pub fn theta_pow(&self, mut w: usize, n: usize) -> usize {
        for _ in 0..n {
            w = self.theta[w];
        }
        w
    }

    /// Same `(Ω, P)` driven by `ϑ^m`.
    pub fn power(&self, m: usize) -> DrivingSystem {
        DrivingSystem {
            prob: self.prob.clone(),
            theta: (0..self.size()).map(|w| self.theta_pow(w, m)).collect(),
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (w, p) in self.prob.iter().enumerate() {
            if p.is_negative() {
                out.push(Violation::NegativeProbability {
                    omega: w,
                    value: format_rational(p),
                });
            }
        }
        let total: Rational = self.prob.iter().sum();
        if total != crate::rational::one() {
            out.push(Violation::ProbabilitySum {
                total: format_rational(&total),
            });
        }
        let mut inflow = vec![Rational::zero(); self.size()];
        for (w, p) in self.prob.iter().enumerate() {
            inflow[self.theta[w]] += p;
        }
        for (w, mass_in) in inflow.iter().enumerate() {
            if mass_in != &self.prob[w] {
                out.push(Violation::NotInvariant {
                    omega: w,
                    preimage_mass: format_rational(mass_in),
                    mass: format_rational(&self.prob[w]),
                });
            }
        }
        out
    }
}

/// The global point set `X`, optionally with a metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
    dist: Option<Vec<Vec<Rational>>>,
}

impl MetricSpace {
    /// Point ids without a metric; enough for the cover calculus.
    pub fn unmetrized<S: Into<String>>(points: impl IntoIterator<Item = S>) -> Result<Self> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate point id `{p}`")));
            }
        }
        Ok(MetricSpace {
            points,
            index,
            dist: None,
        })
    }

    /// Points with a distance matrix. Metric axioms are checked by
    /// [`MetricSpace::violations`], not here.
    pub fn with_metric<S: Into<String>>(
        points: impl IntoIterator<Item = S>,
        dist: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let mut space = Self::unmetrized(points)?;
        let n = space.points.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!("distance matrix is not {n}x{n}")));
        }
        space.dist = Some(dist);
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn names(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn has_metric(&self) -> bool {
        self.dist.is_some()
    }

    pub fn dist(&self, i: usize, j: usize) -> Option<&Rational> {
        self.dist.as_ref().map(|d| &d[i][j])
    }

    pub fn matrix(&self) -> Option<&Vec<Vec<Rational>>> {
        self.dist.as_ref()
    }

    /// Metric axioms, checked over every pair and triple.
    pub fn violations(&self) -> Vec<Violation> {
        let Some(d) = &self.dist else {
            return Vec::new();
        };
        let n = self.points.len();
        let mut out = Vec::new();
        let mut bad = |detail: String| out.push(Violation::MetricAxiom { detail });
        for i in 0..n {
            for j in 0..n {
                if d[i][j].is_negative() {
                    bad(format!("d({},{}) < 0", self.points[i], self.points[j]));
                }
                if (i == j) != d[i][j].is_zero() {
                    bad(format!(
                        "d({},{}) = {} breaks identity of indiscernibles",
                        self.points[i],
                        self.points[j],
                        format_rational(&d[i][j])
                    ));
                }
                if d[i][j] != d[j][i] {
                    bad(format!("d({},{}) is not symmetric", self.points[i], self.points[j]));
                }
                for k in 0..n {
                    if d[i][k] > &d[i][j] + &d[j][k] {
                        bad(format!(
                            "triangle inequality fails for ({},{},{})",
                            self.points[i], self.points[j], self.points[k]
                        ));
                    }
                }
            }
        }
        out
    }
}

/// One broken invariant found by a validation pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NegativeProbability { omega: usize, value: String },
    ProbabilitySum { total: String },
    NotInvariant { omega: usize, preimage_mass: String, mass: String },
    EmptyFiber { omega: usize },
    ImageEscape { omega: usize, point: String, image: String },
    MetricAxiom { detail: String },
    NotSurjective { omega: usize, missed: String },
    NotEquivariant { omega: usize, point: String },
    BaseMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeProbability { omega, value } => {
                write!(f, "P({omega}) = {value} is negative")
            }
            Violation::ProbabilitySum { total } => write!(f, "probabilities sum to {total}, not 1"),
            Violation::NotInvariant {
                omega,
                preimage_mass,
                mass,
            } => write!(
                f,
                "theta-invariance of P fails at {omega}: preimage mass {preimage_mass} vs P = {mass}"
            ),
            Violation::EmptyFiber { omega } => write!(f, "fiber {omega} is empty"),
            Violation::ImageEscape { omega, point, image } => write!(
                f,
                "image escape: T_{omega}({point}) = {image} lies outside the target fiber"
            ),
            Violation::MetricAxiom { detail } => write!(f, "metric axiom: {detail}"),
            Violation::NotSurjective { omega, missed } => {
                write!(f, "factor map misses {missed} in fiber {omega}")
            }
            Violation::NotEquivariant { omega, point } => {
                write!(f, "factor map is not equivariant at ({omega}, {point})")
            }
            Violation::BaseMismatch => write!(f, "systems have different driving systems"),
        }
    }
}

/// Outcome of [`validate_system`]; empty iff valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Fibers `E_ω ⊆ X` and fiber maps `T_ω: E_ω → E_ϑω` over a driving system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleRds {
    base: DrivingSystem,
    space: MetricSpace,
    fibers: Vec<Vec<usize>>,
    images: Vec<Vec<usize>>,
    step: Vec<Vec<usize>>,
}

impl BundleRds {
    /// Builds without semantic validation. Use [`validate_system`] on the
    /// result; every other operation assumes a valid system.
    pub fn unchecked(
        base: DrivingSystem,
        space: MetricSpace,
        fibers: Vec<Vec<usize>>,
        images: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if fibers.len() != base.size() || images.len() != base.size() {
            return Err(Error::Invalid(format!(
                "expected {} fibers and maps, got {} and {}",
                base.size(),
                fibers.len(),
                images.len()
            )));
        }
        for (w, (fib, img)) in fibers.iter().zip(&images).enumerate() {
            if fib.len() != img.len() {
                return Err(Error::Invalid(format!("map of fiber {w} is not total")));
            }
            let mut seen = std::collections::HashSet::new();
            for &p in fib.iter().chain(img) {
                if p >= space.len() {
                    return Err(Error::Invalid(format!("unknown point index {p} in fiber {w}")));
                }
            }
            for &p in fib {
                if !seen.insert(p) {
                    return Err(Error::Invalid(format!(
                        "point `{}` listed twice in fiber {w}",
                        space.name(p)
                    )));
                }
            }
        }
        let step = (0..base.size())
            .map(|w| {
                let target = &fibers[base.theta(w)];
                images[w]
                    .iter()
                    .map(|g| target.iter().position(|t| t == g).unwrap_or(UNMAPPED))
                    .collect()
            })
            .collect();
        Ok(BundleRds {
            base,
            space,
            fibers,
            images,
            step,
        })
    }

    /// Builds and validates; fails with the full violation list.
    pub fn new(
        base: DrivingSystem,
        space: MetricSpace,
        fibers: Vec<Vec<usize>>,
        images: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let rds = Self::unchecked(base, space, fibers, images)?;
        let report = validate_system(&rds);
        if report.is_valid() {
            Ok(rds)
        } else {
            Err(Error::Invalid(report.to_string()))
        }
    }

    /// Convenience constructor from point names. `maps[ω]` lists
    /// `(x, T_ω x)` pairs.
    pub fn from_names(
        base: DrivingSystem,
        space: MetricSpace,
        fibers: &[&[&str]],
        maps: &[&[(&str, &str)]],
    ) -> Result<Self> {
        let rds = Self::from_names_unchecked(base, space, fibers, maps)?;
        let report = validate_system(&rds);
        if report.is_valid() {
            Ok(rds)
        } else {
            Err(Error::Invalid(report.to_string()))
        }
    }

    pub fn from_names_unchecked(
        base: DrivingSystem,
        space: MetricSpace,
        fibers: &[&[&str]],
        maps: &[&[(&str, &str)]],
    ) -> Result<Self> {
        let lookup = |name: &str| {
            space
                .index_of(name)
                .ok_or_else(|| Error::UnknownName(format!("point `{name}`")))
        };
        let fib_ids = fibers
            .iter()
            .map(|f| f.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut images = Vec::with_capacity(fibers.len());
        for (w, fib) in fibers.iter().enumerate() {
            let map = maps
                .get(w)
                .ok_or_else(|| Error::Invalid(format!("no map for fiber {w}")))?;
            let mut img = Vec::with_capacity(fib.len());
            for x in fib.iter() {
                let (_, y) = map
                    .iter()
                    .find(|(from, _)| from == x)
                    .ok_or_else(|| Error::Invalid(format!("T_{w} undefined at `{x}`")))?;
                img.push(lookup(y)?);
            }
            images.push(img);
        }
        Self::unchecked(base, space, fib_ids, images)
    }

    pub fn base(&self) -> &DrivingSystem {
        &self.base
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn n_fibers(&self) -> usize {
        self.base.size()
    }

    pub fn fiber_len(&self, w: usize) -> usize {
        self.fibers[w].len()
    }

    pub fn fiber_lens(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    pub fn max_fiber_len(&self) -> usize {
        self.fibers.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_points(&self) -> usize {
        self.fibers.iter().map(Vec::len).sum()
    }

    /// Global ids of the points of `E_ω`, in local order.
    pub fn fiber(&self, w: usize) -> &[usize] {
        &self.fibers[w]
    }

    pub fn point_name(&self, w: usize, j: usize) -> &str {
        self.space.name(self.fibers[w][j])
    }

    pub fn local_index(&self, w: usize, name: &str) -> Option<usize> {
        let g = self.space.index_of(name)?;
        self.fibers[w].iter().position(|&p| p == g)
    }

    pub fn full_set(&self, w: usize) -> PointSet {
        PointSet::full(self.fiber_len(w))
    }

    pub fn empty_set(&self, w: usize) -> PointSet {
        PointSet::empty(self.fiber_len(w))
    }

    /// Local index of `T_ω x_j` in `E_ϑω`.
    #[inline]
    pub fn step(&self, w: usize, j: usize) -> usize {
        let s = self.step[w][j];
        debug_assert!(s != UNMAPPED, "step on an invalid system");
        s
    }

    /// `Θ(ω, x_j)` in local coordinates.
    pub fn skew(&self, w: usize, j: usize) -> (usize, usize) {
        (self.base.theta(w), self.step(w, j))
    }

    /// `Θ^n(ω, x) = (ϑ^n ω, T_ω^n x)`.
    pub fn skew_iterate(&self, state: (usize, usize), n: usize) -> Result<(usize, usize)> {
        let (w, j) = state;
        if w >= self.n_fibers() || j >= self.fiber_len(w) {
            return Err(Error::Domain(format!("state ({w}, {j}) is outside E")));
        }
        let mut s = state;
        for _ in 0..n {
            s = self.skew(s.0, s.1);
        }
        Ok(s)
    }

    /// Named variant of [`BundleRds::skew_iterate`].
    pub fn skew_iterate_named(&self, w: usize, x: &str, n: usize) -> Result<(usize, String)> {
        if w >= self.n_fibers() {
            return Err(Error::Domain(format!("base point {w} does not exist")));
        }
        let j = self
            .local_index(w, x)
            .ok_or_else(|| Error::Domain(format!("`{x}` is not in fiber {w}")))?;
        let (w2, j2) = self.skew_iterate((w, j), n)?;
        Ok((w2, self.point_name(w2, j2).to_string()))
    }

    /// Local index of `T_ω^n x_j` in `E_{ϑ^n ω}`.
    pub fn local_iterate(&self, mut w: usize, mut j: usize, n: usize) -> usize {
        for _ in 0..n {
            j = self.step(w, j);
            w = self.base.theta(w);
        }
        j
    }

    /// `T_ω^{-1}(S)` for `S ⊆ E_ϑω`.
    pub fn preimage(&self, w: usize, set: &PointSet) -> PointSet {
        let mut out = self.empty_set(w);
        for j in 0..self.fiber_len(w) {
            if set.contains(self.step(w, j)) {
                out.insert(j);
            }
        }
        out
    }

    /// `(T_ω^i)^{-1}(S)` for `S ⊆ E_{ϑ^i ω}`.
    pub fn preimage_iter(&self, w: usize, i: usize, set: &PointSet) -> PointSet {
        let mut out = self.empty_set(w);
        for j in 0..self.fiber_len(w) {
            if set.contains(self.local_iterate(w, j, i)) {
                out.insert(j);
            }
        }
        out
    }

    pub fn has_metric(&self) -> bool {
        self.space.has_metric()
    }

    /// Distance between `x_i ∈ E_ω` and `x_j ∈ E_ω'` in `X`.
    pub fn dist(&self, w1: usize, i: usize, w2: usize, j: usize) -> Option<&Rational> {
        self.space.dist(self.fibers[w1][i], self.fibers[w2][j])
    }

    /// The system driven by `Θ^m`: same fibers, `ϑ^m`, and `T_ω^m`.
    pub fn power(&self, m: usize) -> BundleRds {
        let base = self.base.power(m);
        let images = (0..self.n_fibers())
            .map(|w| {
                let target = self.base.theta_pow(w, m);
                (0..self.fiber_len(w))
                    .map(|j| self.fibers[target][self.local_iterate(w, j, m)])
                    .collect()
            })
            .collect();
        BundleRds::unchecked(base, self.space.clone(), self.fibers.clone(), images)
            .expect("power of a valid system is well formed")
    }

    /// Checks that `other` lives over the same driving system.
    pub fn same_base(&self, other: &BundleRds) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::Incompatible("systems have different driving systems".into()))
        }
    }

    /// Checks that `shape` matches the fiber sizes of this system.
    pub fn check_shape(&self, shape: &[usize]) -> Result<()> {
        if shape.len() == self.n_fibers()
            && shape.iter().enumerate().all(|(w, &n)| n == self.fiber_len(w))
        {
            Ok(())
        } else {
            Err(Error::Incompatible(
                "object was built for a system with different fibers".into(),
            ))
        }
    }
}

/// Lists every invariant violation of `rds`; empty iff valid.
pub fn validate_system(rds: &BundleRds) -> ValidationReport {
    let mut violations = rds.base.violations();
    violations.extend(rds.space.violations());
    for w in 0..rds.n_fibers() {
        if rds.fibers[w].is_empty() {
            violations.push(Violation::EmptyFiber { omega: w });
        }
        for (j, &s) in rds.step[w].iter().enumerate() {
            if s == UNMAPPED {
                violations.push(Violation::ImageEscape {
                    omega: w,
                    point: rds.point_name(w, j).to_string(),
                    image: rds.space.name(rds.images[w][j]).to_string(),
                });
            }
        }
    }
    ValidationReport { violations }
}

/// A fiberwise surjection `π_ω: G_ω → E_ω` with `π_ϑω ∘ S_ω = T_ω ∘ π_ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorMap {
    source: BundleRds,
    target: BundleRds,
    pi: Vec<Vec<usize>>,
}

impl FactorMap {
    /// `pi[ω][j]` is the local index in `E_ω` of `π_ω` applied to the `j`-th
    /// point of `G_ω`.
    pub fn new(source: BundleRds, target: BundleRds, pi: Vec<Vec<usize>>) -> Result<Self> {
        let map = Self::unchecked(source, target, pi)?;
        let v = map.violations();
        if v.is_empty() {
            Ok(map)
        } else {
            Err(Error::Invalid(ValidationReport { violations: v }.to_string()))
        }
    }

    pub fn unchecked(source: BundleRds, target: BundleRds, pi: Vec<Vec<usize>>) -> Result<Self> {
        if pi.len() != source.n_fibers() {
            return Err(Error::Invalid("factor map has the wrong number of fibers".into()));
        }
        for (w, row) in pi.iter().enumerate() {
            if row.len() != source.fiber_len(w) {
                return Err(Error::Invalid(format!("factor map is not total on fiber {w}")));
            }
            if w < target.n_fibers() && row.iter().any(|&x| x >= target.fiber_len(w)) {
                return Err(Error::Invalid(format!("factor map leaves target fiber {w}")));
            }
        }
        Ok(FactorMap { source, target, pi })
    }

    pub fn identity(rds: &BundleRds) -> FactorMap {
        let pi = (0..rds.n_fibers())
            .map(|w| (0..rds.fiber_len(w)).collect())
            .collect();
        FactorMap {
            source: rds.clone(),
            target: rds.clone(),
            pi,
        }
    }

    pub fn source(&self) -> &BundleRds {
        &self.source
    }

    pub fn target(&self) -> &BundleRds {
        &self.target
    }

    #[inline]
    pub fn apply(&self, w: usize, j: usize) -> usize {
        self.pi[w][j]
    }

    /// `π_ω^{-1}(S)` for `S ⊆ E_ω`.
    pub fn fiber_preimage(&self, w: usize, set: &PointSet) -> PointSet {
        PointSet::from_indices(
            self.source.fiber_len(w),
            (0..self.source.fiber_len(w)).filter(|&j| set.contains(self.pi[w][j])),
        )
    }

    /// Surjectivity and equivariance, checked exhaustively.
    pub fn violations(&self) -> Vec<Violation> {
        let (g, e) = (&self.source, &self.target);
        if g.base() != e.base() {
            return vec![Violation::BaseMismatch];
        }
        let mut out = Vec::new();
        for w in 0..g.n_fibers() {
            let mut hit = vec![false; e.fiber_len(w)];
            for j in 0..g.fiber_len(w) {
                hit[self.pi[w][j]] = true;
                let via_source = self.pi[g.base().theta(w)][g.step(w, j)];
                let via_target = e.step(w, self.pi[w][j]);
                if via_source != via_target {
                    out.push(Violation::NotEquivariant {
                        omega: w,
                        point: g.point_name(w, j).to_string(),
                    });
                }
            }
            for (x, h) in hit.iter().enumerate() {
                if !h {
                    out.push(Violation::NotSurjective {
                        omega: w,
                        missed: e.point_name(w, x).to_string(),
                    });
                }
            }
        }
        out
    }
}

/// `S × T` on `H = {(ω, y, x)}` with its two coordinate systems.
///
/// Local index of `(y, x)` in `H_ω` is `y * |E_ω| + x`.
#[derive(Debug, Clone)]
pub struct ProductSystem {
    pub system: BundleRds,
    pub left: BundleRds,
    pub right: BundleRds,
}

/// Builds `S × T`. Fails when the driving systems differ.
pub fn product_system(s: &BundleRds, t: &BundleRds) -> Result<ProductSystem> {
    s.same_base(t)?;
    let mut names: Vec<String> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut intern = |gy: usize, gx: usize| -> usize {
        *index.entry((gy, gx)).or_insert_with(|| {
            names.push(format!("({},{})", s.space.name(gy), t.space.name(gx)));
            pairs.push((gy, gx));
            names.len() - 1
        })
    };
    let mut fibers = Vec::with_capacity(s.n_fibers());
    let mut images = Vec::with_capacity(s.n_fibers());
    for w in 0..s.n_fibers() {
        let (gf, ef) = (s.fiber(w), t.fiber(w));
        let mut fib = Vec::with_capacity(gf.len() * ef.len());
        let mut img = Vec::with_capacity(gf.len() * ef.len());
        for (yi, &gy) in gf.iter().enumerate() {
            for (xi, &gx) in ef.iter().enumerate() {
                fib.push(intern(gy, gx));
                img.push(intern(s.images[w][yi], t.images[w][xi]));
            }
        }
        fibers.push(fib);
        images.push(img);
    }
    let space = match (s.space.matrix(), t.space.matrix()) {
        (Some(dg), Some(de)) => {
            let dist = pairs
                .iter()
                .map(|&(y1, x1)| {
                    pairs
                        .iter()
                        .map(|&(y2, x2)| dg[y1][y2].clone().max(de[x1][x2].clone()))
                        .collect()
                })
                .collect();
            MetricSpace::with_metric(names, dist)?
        }
        _ => MetricSpace::unmetrized(names)?,
    };
    let system = BundleRds::unchecked(s.base.clone(), space, fibers, images)?;
    Ok(ProductSystem {
        system,
        left: s.clone(),
        right: t.clone(),
    })
}

impl ProductSystem {
    /// Local `(y, x)` coordinates of a local point of `H_ω`.
    pub fn decode(&self, w: usize, j: usize) -> (usize, usize) {
        let n = self.right.fiber_len(w);
        (j / n, j % n)
    }

    pub fn encode(&self, w: usize, y: usize, x: usize) -> usize {
        y * self.right.fiber_len(w) + x
    }

    /// `π_E(ω, y, x) = (ω, x)`.
    pub fn project_right(&self) -> FactorMap {
        let pi = (0..self.system.n_fibers())
            .map(|w| {
                (0..self.system.fiber_len(w))
                    .map(|j| self.decode(w, j).1)
                    .collect()
            })
            .collect();
        FactorMap {
            source: self.system.clone(),
            target: self.right.clone(),
            pi,
        }
    }

    /// `π_G(ω, y, x) = (ω, y)`.
    pub fn project_left(&self) -> FactorMap {
        let pi = (0..self.system.n_fibers())
            .map(|w| {
                (0..self.system.fiber_len(w))
                    .map(|j| self.decode(w, j).0)
                    .collect()
            })
            .collect();
        FactorMap {
            source: self.system.clone(),
            target: self.left.clone(),
            pi,
        }
    }
}

/// `T × T` on `E^(2)` with `Θ^(2)(ω, x, y) = (ϑω, T_ω x, T_ω y)`.
#[derive(Debug, Clone)]
pub struct PairSystem {
    product: ProductSystem,
}

pub fn pair_system(t: &BundleRds) -> PairSystem {
    PairSystem {
        product: product_system(t, t).expect("a system shares its own base"),
    }
}

impl PairSystem {
    pub fn system(&self) -> &BundleRds {
        &self.product.system
    }

    pub fn base_system(&self) -> &BundleRds {
        &self.product.right
    }

    pub fn decode(&self, w: usize, j: usize) -> (usize, usize) {
        self.product.decode(w, j)
    }

    pub fn encode(&self, w: usize, x: usize, y: usize) -> usize {
        self.product.encode(w, x, y)
    }

    /// `π_{E_1}(ω, x, y) = (ω, x)`; also the projections α and β.
    pub fn project_first(&self) -> FactorMap {
        self.product.project_left()
    }

    /// `π_{E_2}(ω, x, y) = (ω, y)`.
    pub fn project_second(&self) -> FactorMap {
        self.product.project_right()
    }

    /// `{(x, x)}` in the local coordinates of `E^(2)_ω`.
    pub fn diagonal(&self, w: usize) -> PointSet {
        let n = self.base_system().fiber_len(w);
        PointSet::from_indices(n * n, (0..n).map(|x| self.encode(w, x, x)))
    }
}

/// The map `φ(ω, y, z) = (ω, π_ω y, π_ω z)` from `G^(2)` to `E^(2)`.
pub fn induced_pair_map(pi: &FactorMap) -> (PairSystem, PairSystem, FactorMap) {
    let g2 = pair_system(pi.source());
    let e2 = pair_system(pi.target());
    let map = (0..g2.system().n_fibers())
        .map(|w| {
            (0..g2.system().fiber_len(w))
                .map(|j| {
                    let (y, z) = g2.decode(w, j);
                    e2.encode(w, pi.apply(w, y), pi.apply(w, z))
                })
                .collect()
        })
        .collect();
    let phi = FactorMap {
        source: g2.system().clone(),
        target: e2.system().clone(),
        pi: map,
    };
    (g2, e2, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_point_system, sys_a, sys_a_unchecked};
    use crate::rational::ratio;

    #[test]
    fn sys_a_is_valid() {
        assert!(validate_system(&sys_a()).is_valid());
    }

    #[test]
    fn image_escape_is_reported() {
        let rds = sys_a_unchecked(&[("a", "c"), ("b", "e")], None);
        let report = validate_system(&rds);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ImageEscape { point, .. } if point == "b")));
    }

    #[test]
    fn non_invariant_probability_is_reported() {
        let rds = sys_a_unchecked(&[("a", "c"), ("b", "c")], Some(vec![ratio(2, 3), ratio(1, 3)]));
        let report = validate_system(&rds);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotInvariant { .. })));
        assert!(report.to_string().contains("theta-invariance"));
    }

    #[test]
    fn skew_iterate_examples() {
        let a = sys_a();
        assert_eq!(a.skew_iterate_named(0, "a", 0).unwrap(), (0, "a".into()));
        assert_eq!(a.skew_iterate_named(0, "a", 1).unwrap(), (1, "c".into()));
        assert_eq!(a.skew_iterate_named(0, "a", 2).unwrap(), (0, "a".into()));
        assert!(a.skew_iterate_named(0, "c", 1).is_err());
        assert!(a.skew_iterate((0, 7), 1).is_err());
    }

    #[test]
    fn product_and_pair_examples() {
        let a = sys_a();
        let h = product_system(&a, &a).unwrap();
        assert_eq!(h.system.fiber_len(0), 4);
        assert_eq!(h.system.fiber_len(1), 4);
        assert!(validate_system(&h.system).is_valid());
        // Γ(0, (a, a)) = (1, (c, c))
        let aa = h.system.local_index(0, "(a,a)").unwrap();
        let (w, j) = h.system.skew(0, aa);
        assert_eq!((w, h.system.point_name(w, j)), (1, "(c,c)"));

        let p = pair_system(&a);
        let ab = p.system().local_index(0, "(a,b)").unwrap();
        let (w, j) = p.system().skew(0, ab);
        assert_eq!((w, p.system().point_name(w, j)), (1, "(c,c)"));
        // diagonal forward-invariant
        for w in 0..2 {
            for j in p.diagonal(w).iter() {
                let (w2, j2) = p.system().skew(w, j);
                assert!(p.diagonal(w2).contains(j2));
            }
        }
    }

    #[test]
    fn product_with_one_point_fiber_is_isomorphic() {
        let a = sys_a();
        let unit = one_point_system(a.base().clone());
        let h = product_system(&unit, &a).unwrap();
        let pi = h.project_right();
        assert!(pi.violations().is_empty());
        for w in 0..2 {
            assert_eq!(h.system.fiber_len(w), a.fiber_len(w));
        }
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let a = sys_a();
        let b = crate::fixtures::sys_b();
        assert!(matches!(product_system(&a, &b), Err(Error::Incompatible(_))));
    }

    #[test]
    fn canonical_projections_are_factor_maps() {
        let a = sys_a();
        let h = product_system(&a, &a).unwrap();
        assert!(h.project_right().violations().is_empty());
        assert!(h.project_left().violations().is_empty());
        let p = pair_system(&a);
        let alpha = p.project_first();
        assert!(alpha.violations().is_empty());
        assert!(p.project_second().violations().is_empty());
        let ab = p.system().local_index(0, "(a,b)").unwrap();
        assert_eq!(a.point_name(0, alpha.apply(0, ab)), "a");

        let (_, _, phi) = induced_pair_map(&FactorMap::identity(&a));
        assert!(phi.violations().is_empty());
        for w in 0..2 {
            for j in 0..phi.source().fiber_len(w) {
                assert_eq!(phi.apply(w, j), j);
            }
        }
    }

    #[test]
    fn metric_axioms_checked() {
        let bad = MetricSpace::with_metric(
            ["p", "q", "r"],
            vec![
                vec![ratio(0, 1), ratio(1, 1), ratio(5, 1)],
                vec![ratio(1, 1), ratio(0, 1), ratio(1, 1)],
                vec![ratio(5, 1), ratio(1, 1), ratio(0, 1)],
            ],
        )
        .unwrap();
        assert!(bad
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::MetricAxiom { detail } if detail.contains("triangle"))));
    }
}
