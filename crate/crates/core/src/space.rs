//! Finitely presented metric spaces.
//!
//! A [`Space`] is one of: a finite labelled set with a full distance table,
//! a closed rational interval `[lo, hi]` (optionally rescaled by a
//! [`Gauge`]), a finite weighted product, or a countable product. Each
//! carries a declared diameter bound `M` and a nonempty ordered list of
//! anchor points used as defaults for product tails and net padding.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::exec::Exec;
use crate::gauge::Gauge;
use crate::product::{CountableProduct, FiniteProduct, ProductPoint};
use crate::rational::{abs_diff, Rational};

/// A point of some presented space. Which variant is valid depends on the
/// space: `Discrete` indexes a finite table, `Real` lies in an interval,
/// `Tuple` belongs to a finite product and `Sequence` to a countable one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Discrete(usize),
    Real(Rational),
    Tuple(Vec<Point>),
    Sequence(ProductPoint),
}

impl fmt::Display for Point {
    /// Structural rendering without labels; see [`crate::notation`] for the
    /// space-aware syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Discrete(i) => write!(f, "#{i}"),
            Point::Real(r) => write!(f, "{r}"),
            Point::Tuple(cs) => {
                f.write_str("(")?;
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
            Point::Sequence(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    NonNegativity,
    /// `d(p, q) = 0` exactly when `p = q`.
    Identity,
    Symmetry,
    Triangle,
    /// `h(b + c) ≤ h(b) + h(c)`.
    Subadditivity,
    /// `h` nondecreasing along a sorted grid.
    Monotonicity,
    /// Forward difference quotients of `h` never increase.
    DerivativeNonincreasing,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::NonNegativity => "non-negativity",
            Axiom::Identity => "identity",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
            Axiom::Subadditivity => "subadditivity",
            Axiom::Monotonicity => "monotonicity",
            Axiom::DerivativeNonincreasing => "derivative-nonincreasing",
        })
    }
}

/// One failed law. `lhs` is the side that should be smaller (or equal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<Point>,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub triples_checked: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Probes<'a> {
    /// Every point of the space; finite spaces only.
    Exhaustive,
    Points(&'a [Point]),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("point {point} is not in space `{space}`: {reason}")]
    PointNotInSpace {
        space: String,
        point: String,
        reason: String,
    },
    #[error("unknown point label `{label}` in space `{space}`")]
    UnknownLabel { space: String, label: String },
    #[error("space `{0}` has no points")]
    Empty(String),
    #[error("invalid point label `{0}` (use letters, digits and `_`)")]
    BadLabel(String),
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("distance table must be {expected}x{expected}, row {row} has {found} entries")]
    TableShape {
        expected: usize,
        row: usize,
        found: usize,
    },
    #[error("{axiom} axiom fails at {witness}: {lhs} vs {rhs}")]
    AxiomViolation {
        axiom: Axiom,
        witness: String,
        lhs: Rational,
        rhs: Rational,
    },
    #[error("declared diameter bound {bound} is below the largest distance {max}")]
    BoundViolated { bound: Rational, max: Rational },
    #[error("anchor list for `{0}` must be nonempty")]
    NoAnchors(String),
    #[error("anchor {anchor} is not a point of `{space}`")]
    BadAnchor { space: String, anchor: String },
    #[error("duplicate anchor {0}")]
    DuplicateAnchor(String),
    #[error("exhaustive enumeration requested on infinite space `{0}`")]
    NotFinite(String),
    #[error("interval endpoints out of order: {lo} > {hi}")]
    EmptyInterval { lo: Rational, hi: Rational },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("weight ratio must satisfy 0 < r < 1, got {0}")]
    BadRatio(Rational),
    #[error("component `{0}` has diameter bound 0 but more than one point")]
    DegenerateComponent(String),
    #[error("product needs at least one component")]
    NoComponents,
    #[error("product has {components} components but {weights} weights")]
    WeightCount { components: usize, weights: usize },
    #[error("tail anchor {anchor} is not valid for every component (common anchors: {available})")]
    BadTailAnchor { anchor: usize, available: usize },
    #[error("operation `{op}` does not support {kind} spaces")]
    Unsupported { op: &'static str, kind: &'static str },
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// A labelled finite metric space with an explicit symmetric table.
#[derive(Clone, Debug)]
pub struct FiniteMetric {
    labels: Vec<String>,
    table: Vec<Vec<Rational>>,
}

impl FiniteMetric {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.table[i][j]
    }

    pub fn max_entry(&self) -> Rational {
        self.table
            .iter()
            .flatten()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn min_positive_entry(&self) -> Option<Rational> {
        self.table
            .iter()
            .flatten()
            .filter(|d| d.is_positive())
            .min()
            .cloned()
    }
}

/// `[lo, hi]` with metric `h(|x − y|)`, `h` the identity when no gauge is set.
#[derive(Clone, Debug)]
pub struct IntervalMetric {
    pub lo: Rational,
    pub hi: Rational,
    pub gauge: Option<Gauge>,
}

impl IntervalMetric {
    pub fn span(&self) -> Rational {
        &self.hi - &self.lo
    }

    fn distance(&self, x: &Rational, y: &Rational) -> Rational {
        let t = abs_diff(x, y);
        match &self.gauge {
            Some(g) => g.eval(&t),
            None => t,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SpaceKind {
    Finite(FiniteMetric),
    Interval(IntervalMetric),
    FiniteProduct(FiniteProduct),
    CountableProduct(CountableProduct),
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Finite(_) => "finite-discrete",
            SpaceKind::Interval(_) => "interval",
            SpaceKind::FiniteProduct(_) => "finite-product",
            SpaceKind::CountableProduct(_) => "countable-product",
        }
    }
}

/// Smallest positive distance a space can realise, if it has one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// Single point: every sequence is constant.
    Trivial,
    Positive(Rational),
    /// Positive distances accumulate at 0 (intervals, countable products).
    None,
}

#[derive(Clone, Debug)]
pub struct Space {
    name: String,
    kind: SpaceKind,
    diameter_bound: Rational,
    anchors: Vec<Point>,
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Space {
    pub(crate) fn from_parts(
        name: String,
        kind: SpaceKind,
        diameter_bound: Rational,
        anchors: Vec<Point>,
    ) -> Self {
        Space {
            name,
            kind,
            diameter_bound,
            anchors,
        }
    }

    /// A validated finite space. The table must be square, and the metric
    /// axioms are checked over every ordered triple; the first violation is
    /// returned as an error. The bound defaults to the largest entry and the
    /// anchors to every point in declaration order.
    pub fn finite(
        name: impl Into<String>,
        labels: Vec<String>,
        table: Vec<Vec<Rational>>,
    ) -> Result<Space, SpaceError> {
        let space = Space::finite_unvalidated(name, labels, table)?;
        let report = space.check_axioms(Probes::Exhaustive)?;
        if let Some(v) = report.violations.first() {
            return Err(space.violation_error(v));
        }
        Ok(space)
    }

    /// Builds a finite space checking only labels and table shape, so that
    /// a broken table can still be inspected with [`Space::check_axioms`].
    pub fn finite_unvalidated(
        name: impl Into<String>,
        labels: Vec<String>,
        table: Vec<Vec<Rational>>,
    ) -> Result<Space, SpaceError> {
        let name = name.into();
        if labels.is_empty() {
            return Err(SpaceError::Empty(name));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !valid_label(l) {
                return Err(SpaceError::BadLabel(l.clone()));
            }
            if !seen.insert(l.as_str()) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        if table.len() != n {
            return Err(SpaceError::TableShape {
                expected: n,
                row: table.len(),
                found: 0,
            });
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != n {
                return Err(SpaceError::TableShape {
                    expected: n,
                    row,
                    found: r.len(),
                });
            }
        }
        let metric = FiniteMetric { labels, table };
        let bound = metric.max_entry();
        let anchors = (0..n).map(Point::Discrete).collect();
        Ok(Space {
            name,
            kind: SpaceKind::Finite(metric),
            diameter_bound: bound,
            anchors,
        })
    }

    /// `{0, 1}` with `d(x, y) = |x − y|`, anchors `0` then `1`.
    pub fn binary() -> Space {
        let one = Rational::from_integer(1.into());
        let zero = Rational::zero();
        Space::finite(
            "binary",
            vec!["0".into(), "1".into()],
            vec![vec![zero.clone(), one.clone()], vec![one, zero]],
        )
        .expect("binary table is a metric")
    }

    pub fn singleton(name: impl Into<String>, label: impl Into<String>) -> Result<Space, SpaceError> {
        Space::finite(name, vec![label.into()], vec![vec![Rational::zero()]])
    }

    /// `[lo, hi]` with `|x − y|`; bound `hi − lo`; anchors `lo` then `hi`
    /// (just `lo` when degenerate).
    pub fn interval(name: impl Into<String>, lo: Rational, hi: Rational) -> Result<Space, SpaceError> {
        if lo > hi {
            return Err(SpaceError::EmptyInterval { lo, hi });
        }
        let mut anchors = vec![Point::Real(lo.clone())];
        if hi != lo {
            anchors.push(Point::Real(hi.clone()));
        }
        let metric = IntervalMetric {
            lo,
            hi,
            gauge: None,
        };
        let bound = metric.span();
        Ok(Space {
            name: name.into(),
            kind: SpaceKind::Interval(metric),
            diameter_bound: bound,
            anchors,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Space {
        self.name = name.into();
        self
    }

    /// Replaces the declared bound. It may not be smaller than the largest
    /// distance the presentation can realise.
    pub fn with_diameter_bound(mut self, bound: Rational) -> Result<Space, SpaceError> {
        let max = self.natural_bound();
        if bound < max {
            return Err(SpaceError::BoundViolated { bound, max });
        }
        self.diameter_bound = bound;
        Ok(self)
    }

    pub fn with_anchors(mut self, anchors: Vec<Point>) -> Result<Space, SpaceError> {
        if anchors.is_empty() {
            return Err(SpaceError::NoAnchors(self.name.clone()));
        }
        for (k, a) in anchors.iter().enumerate() {
            if self.validate_point(a).is_err() {
                return Err(SpaceError::BadAnchor {
                    space: self.name.clone(),
                    anchor: a.to_string(),
                });
            }
            if anchors[..k].iter().any(|b| self.same_point(a, b)) {
                return Err(SpaceError::DuplicateAnchor(a.to_string()));
            }
        }
        self.anchors = anchors;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    /// The declared bound `M`, without re-verification.
    pub fn declared_bound(&self) -> &Rational {
        &self.diameter_bound
    }

    /// The declared bound `M`. For finite spaces the table is re-checked
    /// against it, which matters for spaces built unvalidated.
    pub fn diameter_bound(&self) -> Result<Rational, SpaceError> {
        if let SpaceKind::Finite(m) = &self.kind {
            let max = m.max_entry();
            if max > self.diameter_bound {
                return Err(SpaceError::BoundViolated {
                    bound: self.diameter_bound.clone(),
                    max,
                });
            }
        }
        Ok(self.diameter_bound.clone())
    }

    /// Largest distance the presentation can produce (a supremum for
    /// products).
    fn natural_bound(&self) -> Rational {
        match &self.kind {
            SpaceKind::Finite(m) => m.max_entry(),
            SpaceKind::Interval(iv) => iv.distance(&iv.lo, &iv.hi),
            SpaceKind::FiniteProduct(fp) => fp.weight_total(),
            SpaceKind::CountableProduct(cp) => cp.weights().total(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteMetric> {
        match &self.kind {
            SpaceKind::Finite(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_interval(&self) -> Option<&IntervalMetric> {
        match &self.kind {
            SpaceKind::Interval(iv) => Some(iv),
            _ => None,
        }
    }

    pub fn as_finite_product(&self) -> Option<&FiniteProduct> {
        match &self.kind {
            SpaceKind::FiniteProduct(fp) => Some(fp),
            _ => None,
        }
    }

    pub fn as_countable_product(&self) -> Option<&CountableProduct> {
        match &self.kind {
            SpaceKind::CountableProduct(cp) => Some(cp),
            _ => None,
        }
    }

    /// Looks up a finite-space point by label.
    pub fn point(&self, label: &str) -> Result<Point, SpaceError> {
        match &self.kind {
            SpaceKind::Finite(m) => m.index_of(label).map(Point::Discrete).ok_or_else(|| {
                SpaceError::UnknownLabel {
                    space: self.name.clone(),
                    label: label.to_string(),
                }
            }),
            other => Err(SpaceError::Unsupported {
                op: "point lookup by label",
                kind: other.name(),
            }),
        }
    }

    fn not_in_space(&self, p: &Point, reason: impl Into<String>) -> SpaceError {
        SpaceError::PointNotInSpace {
            space: self.name.clone(),
            point: p.to_string(),
            reason: reason.into(),
        }
    }

    /// Checks that `p` is a presentable point of this space.
    pub fn validate_point(&self, p: &Point) -> Result<(), SpaceError> {
        match (&self.kind, p) {
            (SpaceKind::Finite(m), Point::Discrete(i)) => {
                if *i < m.len() {
                    Ok(())
                } else {
                    Err(self.not_in_space(p, format!("index out of range 0..{}", m.len())))
                }
            }
            (SpaceKind::Interval(iv), Point::Real(x)) => {
                if &iv.lo <= x && x <= &iv.hi {
                    Ok(())
                } else {
                    Err(self.not_in_space(p, format!("outside [{}, {}]", iv.lo, iv.hi)))
                }
            }
            (SpaceKind::FiniteProduct(fp), Point::Tuple(cs)) => {
                if cs.len() != fp.components().len() {
                    return Err(self.not_in_space(
                        p,
                        format!("expected {} coordinates", fp.components().len()),
                    ));
                }
                for (c, s) in cs.iter().zip(fp.components()) {
                    s.validate_point(c)?;
                }
                Ok(())
            }
            (SpaceKind::CountableProduct(cp), Point::Sequence(pp)) => cp
                .validate(pp)
                .map_err(|e| self.not_in_space(p, e.to_string())),
            (kind, _) => Err(self.not_in_space(p, format!("wrong point shape for a {} space", kind.name()))),
        }
    }

    /// Structural equality of two presentable points. Countable-product
    /// points are compared after normalising away explicit coordinates that
    /// equal their tail anchor.
    pub fn same_point(&self, p: &Point, q: &Point) -> bool {
        match (&self.kind, p, q) {
            (SpaceKind::FiniteProduct(fp), Point::Tuple(a), Point::Tuple(b)) => {
                a.len() == b.len()
                    && a
                        .iter()
                        .zip(b)
                        .zip(fp.components())
                        .all(|((x, y), s)| s.same_point(x, y))
            }
            (SpaceKind::CountableProduct(cp), Point::Sequence(a), Point::Sequence(b)) => {
                cp.same_point(a, b)
            }
            _ => p == q,
        }
    }

    /// Exact distance `d(p, q)`.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<Rational, SpaceError> {
        self.validate_point(p)?;
        self.validate_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    /// Distance between points already known to be presentable.
    pub(crate) fn distance_unchecked(&self, p: &Point, q: &Point) -> Rational {
        match (&self.kind, p, q) {
            (SpaceKind::Finite(m), Point::Discrete(i), Point::Discrete(j)) => m.entry(*i, *j).clone(),
            (SpaceKind::Interval(iv), Point::Real(x), Point::Real(y)) => iv.distance(x, y),
            (SpaceKind::FiniteProduct(fp), Point::Tuple(a), Point::Tuple(b)) => fp.distance(a, b),
            (SpaceKind::CountableProduct(cp), Point::Sequence(a), Point::Sequence(b)) => cp.distance(a, b),
            _ => unreachable!("distance on unvalidated points"),
        }
    }

    /// All points, for spaces that have finitely many presentable points.
    pub fn enumerate(&self) -> Result<Vec<Point>, SpaceError> {
        match &self.kind {
            SpaceKind::Finite(m) => Ok((0..m.len()).map(Point::Discrete).collect()),
            SpaceKind::Interval(iv) if iv.lo == iv.hi => Ok(vec![Point::Real(iv.lo.clone())]),
            SpaceKind::FiniteProduct(fp) => {
                let per: Vec<Vec<Point>> = fp
                    .components()
                    .iter()
                    .map(|s| s.enumerate())
                    .collect::<Result<_, _>>()
                    .map_err(|_| SpaceError::NotFinite(self.name.clone()))?;
                Ok(cartesian(&per).into_iter().map(Point::Tuple).collect())
            }
            _ => Err(SpaceError::NotFinite(self.name.clone())),
        }
    }

    /// Smallest positive distance realised between two points.
    pub fn separation(&self) -> Separation {
        match &self.kind {
            SpaceKind::Finite(m) => match m.min_positive_entry() {
                Some(d) => Separation::Positive(d),
                None => Separation::Trivial,
            },
            SpaceKind::Interval(iv) if iv.lo == iv.hi => Separation::Trivial,
            SpaceKind::Interval(_) => Separation::None,
            SpaceKind::FiniteProduct(fp) => fp.separation(),
            SpaceKind::CountableProduct(cp) => {
                if cp.is_trivial() {
                    Separation::Trivial
                } else {
                    Separation::None
                }
            }
        }
    }

    pub fn check_axioms(&self, probes: Probes<'_>) -> Result<AxiomReport, SpaceError> {
        self.check_axioms_with(probes, Exec::default())
    }

    /// Checks non-negativity, identity of indiscernibles and symmetry over
    /// every ordered pair, and the triangle inequality over every ordered
    /// triple of the probe set. `triples_checked` counts the triples.
    pub fn check_axioms_with(&self, probes: Probes<'_>, exec: Exec) -> Result<AxiomReport, SpaceError> {
        let points = match probes {
            Probes::Exhaustive => self.enumerate()?,
            Probes::Points(ps) => {
                for p in ps {
                    self.validate_point(p)?;
                }
                ps.to_vec()
            }
        };
        let n = points.len();
        let dist: Vec<Vec<Rational>> = exec.map_range(n, |i| {
            points
                .iter()
                .map(|q| self.distance_unchecked(&points[i], q))
                .collect()
        });

        let zero = Rational::zero();
        let pair_violations: Vec<Vec<Violation>> = exec.map_range(n, |i| {
            let mut out = Vec::new();
            for j in 0..n {
                let d = &dist[i][j];
                let witness = || vec![points[i].clone(), points[j].clone()];
                if d.is_negative() {
                    out.push(Violation {
                        axiom: Axiom::NonNegativity,
                        witness: witness(),
                        lhs: zero.clone(),
                        rhs: d.clone(),
                    });
                }
                if d.is_zero() != self.same_point(&points[i], &points[j]) {
                    out.push(Violation {
                        axiom: Axiom::Identity,
                        witness: witness(),
                        lhs: d.clone(),
                        rhs: zero.clone(),
                    });
                }
                if j > i && dist[i][j] != dist[j][i] {
                    out.push(Violation {
                        axiom: Axiom::Symmetry,
                        witness: witness(),
                        lhs: dist[i][j].clone(),
                        rhs: dist[j][i].clone(),
                    });
                }
            }
            out
        });

        let triangle_violations: Vec<Vec<Violation>> = exec.map_range(n, |i| {
            let mut out = Vec::new();
            for j in 0..n {
                for k in 0..n {
                    let direct = &dist[i][k];
                    let via = &dist[i][j] + &dist[j][k];
                    if direct > &via {
                        out.push(triangle(&points, i, j, k, direct, via));
                    }
                }
            }
            out
        });

        let mut violations: Vec<Violation> = pair_violations.into_iter().flatten().collect();
        violations.extend(triangle_violations.into_iter().flatten());
        Ok(AxiomReport {
            triples_checked: n * n * n,
            violations,
        })
    }

    pub(crate) fn violation_error(&self, v: &Violation) -> SpaceError {
        let witness = v
            .witness
            .iter()
            .map(|p| crate::notation::format_point(self, p))
            .collect::<Vec<_>>()
            .join(", ");
        SpaceError::AxiomViolation {
            axiom: v.axiom,
            witness: format!("({witness})"),
            lhs: v.lhs.clone(),
            rhs: v.rhs.clone(),
        }
    }
}

fn triangle(points: &[Point], i: usize, j: usize, k: usize, direct: &Rational, via: Rational) -> Violation {
    Violation {
        axiom: Axiom::Triangle,
        witness: vec![points[i].clone(), points[j].clone(), points[k].clone()],
        lhs: direct.clone(),
        rhs: via,
    }
}

/// Cartesian product in lexicographic order, first factor slowest.
pub(crate) fn cartesian<T: Clone>(factors: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for prefix in &acc {
            for x in f {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// Shared handle to a component space.
pub type SpaceRef = Arc<Space>;
