//! Bounded rescalings `d′ = h ∘ d` of a metric.
//!
//! The catalog is closed: `cap(a)`, `t ↦ min(t, a)`, and the rational bend
//! `t ↦ t/(1 + t)`. Both satisfy `h(0) = 0`, are nondecreasing and
//! subadditive, and are strictly increasing on `[0, η]`, so `h ∘ d` is a
//! metric with the same open balls: `d(p, q) < ε ⇔ d′(p, q) < h(ε)` for
//! `0 < ε < η`. The checkers below verify those laws exactly on grids.

use num_traits::{One, Signed};

use crate::rational::Rational;
use crate::space::{Axiom, AxiomReport, IntervalMetric, Point, Space, SpaceError, SpaceKind, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// `min(t, a)`; bound `a`, injective on `[0, a]`.
    Cap { bound: Rational },
    /// `t/(1 + t)`; bound 1 (never attained), strictly increasing
    /// everywhere. `eta` is the declared injectivity radius.
    RationalBend { eta: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaugeError {
    #[error("gauge parameter {0} must be positive")]
    NonPositiveParameter(Rational),
    #[error("gauge argument must be non-negative, got {0}")]
    NegativeInput(Rational),
    #[error("radius {eps} is outside (0, {eta}) where the gauge is injective")]
    OutsideInjectivity { eps: Rational, eta: Rational },
    #[error("difference step must be positive, got {0}")]
    NonPositiveStep(Rational),
    #[error("space `{0}` is already gauged; gauges do not compose")]
    AlreadyGauged(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl Gauge {
    pub fn cap(bound: Rational) -> Result<Gauge, GaugeError> {
        if !bound.is_positive() {
            return Err(GaugeError::NonPositiveParameter(bound));
        }
        Ok(Gauge::Cap { bound })
    }

    pub fn rational_bend(eta: Rational) -> Result<Gauge, GaugeError> {
        if !eta.is_positive() {
            return Err(GaugeError::NonPositiveParameter(eta));
        }
        Ok(Gauge::RationalBend { eta })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gauge::Cap { .. } => "cap",
            Gauge::RationalBend { .. } => "bend",
        }
    }

    /// The bound `a` with `h(t) ≤ a`.
    pub fn bound(&self) -> Rational {
        match self {
            Gauge::Cap { bound } => bound.clone(),
            Gauge::RationalBend { .. } => Rational::one(),
        }
    }

    pub fn eta(&self) -> Rational {
        match self {
            Gauge::Cap { bound } => bound.clone(),
            Gauge::RationalBend { eta } => eta.clone(),
        }
    }

    /// `h(t)` for `t ≥ 0`.
    pub fn apply(&self, t: &Rational) -> Result<Rational, GaugeError> {
        if t.is_negative() {
            return Err(GaugeError::NegativeInput(t.clone()));
        }
        Ok(self.eval(t))
    }

    pub(crate) fn eval(&self, t: &Rational) -> Rational {
        match self {
            Gauge::Cap { bound } => {
                if t < bound {
                    t.clone()
                } else {
                    bound.clone()
                }
            }
            Gauge::RationalBend { .. } => t / (Rational::one() + t),
        }
    }

    /// Radius for `d′` whose ball equals the `d`-ball of radius `eps`.
    pub fn ball_radius(&self, eps: &Rational) -> Result<Rational, GaugeError> {
        let eta = self.eta();
        if !eps.is_positive() || eps >= &eta {
            return Err(GaugeError::OutsideInjectivity { eps: eps.clone(), eta });
        }
        Ok(self.eval(eps))
    }
}

/// Rescales a finite or interval space by `g`. Products are transformed by
/// transforming their components first.
pub fn transform_metric(space: &Space, g: &Gauge) -> Result<Space, GaugeError> {
    let m = space.declared_bound();
    let gm = g.eval(m);
    let a = g.bound();
    let bound = if gm < a { gm } else { a };
    let name = format!("{}'", space.name());
    let out = match space.kind() {
        SpaceKind::Finite(fm) => {
            let n = fm.len();
            let table = (0..n)
                .map(|i| (0..n).map(|j| g.eval(fm.entry(i, j))).collect())
                .collect();
            Space::finite(name, fm.labels().to_vec(), table)?
                .with_diameter_bound(bound)?
        }
        SpaceKind::Interval(iv) => {
            if iv.gauge.is_some() {
                return Err(GaugeError::AlreadyGauged(space.name().to_string()));
            }
            let metric = IntervalMetric {
                lo: iv.lo.clone(),
                hi: iv.hi.clone(),
                gauge: Some(g.clone()),
            };
            Space::from_parts(name, SpaceKind::Interval(metric), bound, Vec::new())
        }
        other => {
            return Err(SpaceError::Unsupported {
                op: "transform_metric",
                kind: other.name(),
            }
            .into())
        }
    };
    Ok(out.with_anchors(space.anchors().to_vec())?)
}

fn real(t: &Rational) -> Point {
    Point::Real(t.clone())
}

/// Exact check of `h(b + c) ≤ h(b) + h(c)` over all ordered pairs of the
/// grid, plus monotonicity along the sorted grid.
pub fn check_subadditivity(g: &Gauge, grid: &[Rational]) -> Result<AxiomReport, GaugeError> {
    if let Some(t) = grid.iter().find(|t| t.is_negative()) {
        return Err(GaugeError::NegativeInput(t.clone()));
    }
    let values: Vec<Rational> = grid.iter().map(|t| g.eval(t)).collect();
    let mut violations = Vec::new();
    for (b, hb) in grid.iter().zip(&values) {
        for (c, hc) in grid.iter().zip(&values) {
            let lhs = g.eval(&(b + c));
            let rhs = hb + hc;
            if lhs > rhs {
                violations.push(Violation {
                    axiom: Axiom::Subadditivity,
                    witness: vec![real(b), real(c)],
                    lhs,
                    rhs,
                });
            }
        }
    }
    let mut sorted: Vec<&Rational> = grid.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        let (h0, h1) = (g.eval(w[0]), g.eval(w[1]));
        if h0 > h1 {
            violations.push(Violation {
                axiom: Axiom::Monotonicity,
                witness: vec![real(w[0]), real(w[1])],
                lhs: h0,
                rhs: h1,
            });
        }
    }
    Ok(AxiomReport {
        triples_checked: grid.len() * grid.len(),
        violations,
    })
}

/// Forward difference quotients `(h(t + step) − h(t))/step` at each grid
/// point (sorted ascending); any strict increase between consecutive
/// quotients is a violation.
pub fn check_derivative_nonincreasing(
    g: &Gauge,
    grid: &[Rational],
    step: &Rational,
) -> Result<AxiomReport, GaugeError> {
    if !step.is_positive() {
        return Err(GaugeError::NonPositiveStep(step.clone()));
    }
    if let Some(t) = grid.iter().find(|t| t.is_negative()) {
        return Err(GaugeError::NegativeInput(t.clone()));
    }
    let mut sorted: Vec<&Rational> = grid.iter().collect();
    sorted.sort();
    let quotients: Vec<Rational> = sorted
        .iter()
        .map(|t| (g.eval(&(*t + step)) - g.eval(t)) / step)
        .collect();
    let violations = sorted
        .windows(2)
        .zip(quotients.windows(2))
        .filter(|(_, q)| q[1] > q[0])
        .map(|(t, q)| Violation {
            axiom: Axiom::DerivativeNonincreasing,
            witness: vec![real(t[0]), real(t[1])],
            lhs: q[1].clone(),
            rhs: q[0].clone(),
        })
        .collect();
    Ok(AxiomReport {
        triples_checked: grid.len(),
        violations,
    })
}

/// Difference quotients used by [`check_derivative_nonincreasing`], in grid
/// order. Exposed for reporting.
pub fn difference_quotients(g: &Gauge, grid: &[Rational], step: &Rational) -> Vec<Rational> {
    grid.iter()
        .map(|t| (g.eval(&(t + step)) - g.eval(t)) / step)
        .collect()
}

/// `{k/den : 0 ≤ k ≤ count}`.
pub fn uniform_grid(den: i64, count: i64) -> Vec<Rational> {
    (0..=count).map(|k| crate::rational::rat(k, den)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::Probes;

    fn bend() -> Gauge {
        Gauge::rational_bend(int(1000)).unwrap()
    }

    fn cap1() -> Gauge {
        Gauge::cap(int(1)).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(cap1().apply(&int(5)).unwrap(), int(1));
        assert_eq!(bend().apply(&int(1)).unwrap(), rat(1, 2));
        assert_eq!(cap1().apply(&int(0)).unwrap(), int(0));
        assert_eq!(bend().apply(&int(0)).unwrap(), int(0));
        assert!(matches!(cap1().apply(&int(-1)), Err(GaugeError::NegativeInput(_))));
    }

    #[test]
    fn parameters_must_be_positive() {
        assert!(Gauge::cap(int(0)).is_err());
        assert!(Gauge::rational_bend(rat(-1, 2)).is_err());
    }

    fn three_point() -> Space {
        let t = |v: [i64; 3]| v.iter().map(|&x| int(x)).collect::<Vec<_>>();
        Space::finite(
            "s",
            vec!["a".into(), "b".into(), "c".into()],
            vec![t([0, 1, 2]), t([1, 0, 3]), t([2, 3, 0])],
        )
        .unwrap()
    }

    #[test]
    fn cap_flattens_table() {
        let s = transform_metric(&three_point(), &cap1()).unwrap();
        let fm = s.as_finite().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { int(0) } else { int(1) };
                assert_eq!(fm.entry(i, j), &want);
            }
        }
        assert_eq!(s.diameter_bound().unwrap(), int(1));
        assert!(s.check_axioms(Probes::Exhaustive).unwrap().is_clean());
        assert_eq!(s.anchors(), three_point().anchors());
    }

    #[test]
    fn inactive_cap_is_identity() {
        let s = three_point();
        let t = transform_metric(&s, &Gauge::cap(int(3)).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.as_finite().unwrap().entry(i, j), s.as_finite().unwrap().entry(i, j));
            }
        }
    }

    #[test]
    fn bend_on_binary() {
        let t = transform_metric(&Space::binary(), &bend()).unwrap();
        assert_eq!(t.distance(&Point::Discrete(0), &Point::Discrete(1)).unwrap(), rat(1, 2));
        assert_eq!(t.diameter_bound().unwrap(), rat(1, 2));
    }

    #[test]
    fn gauged_interval() {
        let iv = Space::interval("u", int(0), int(3)).unwrap();
        let t = transform_metric(&iv, &cap1()).unwrap();
        assert_eq!(t.distance(&Point::Real(int(0)), &Point::Real(int(3))).unwrap(), int(1));
        assert_eq!(t.distance(&Point::Real(int(0)), &Point::Real(rat(1, 2))).unwrap(), rat(1, 2));
        assert_eq!(t.diameter_bound().unwrap(), int(1));
        assert!(matches!(transform_metric(&t, &cap1()), Err(GaugeError::AlreadyGauged(_))));
    }

    #[test]
    fn subadditivity_examples() {
        let grid = uniform_grid(16, 64);
        let r = check_subadditivity(&bend(), &grid).unwrap();
        assert_eq!(r.triples_checked, 65 * 65);
        assert!(r.is_clean());
        let r = check_subadditivity(&cap1(), &[rat(1, 2), rat(3, 4)]).unwrap();
        assert!(r.is_clean());
        assert_eq!(cap1().eval(&rat(5, 4)), int(1));
        // b = 0 gives equality
        let c = rat(3, 7);
        assert_eq!(bend().eval(&(int(0) + &c)), bend().eval(&int(0)) + bend().eval(&c));
    }

    #[test]
    fn negative_grid_is_rejected() {
        assert!(check_subadditivity(&cap1(), &[int(-1)]).is_err());
    }

    #[test]
    fn derivative_examples() {
        let grid = [int(0), rat(1, 4), rat(1, 2), int(1)];
        let q = difference_quotients(&bend(), &grid, &rat(1, 8));
        assert!(q.windows(2).all(|w| w[1] < w[0]));
        assert!(check_derivative_nonincreasing(&bend(), &grid, &rat(1, 8)).unwrap().is_clean());

        let below = [int(0), rat(1, 4), rat(1, 2), rat(3, 4)];
        let q = difference_quotients(&cap1(), &below, &rat(1, 8));
        assert!(q.iter().all(|x| x == &int(1)));

        let straddle = [rat(3, 4), rat(15, 16), int(1), rat(5, 4)];
        let q = difference_quotients(&cap1(), &straddle, &rat(1, 8));
        assert_eq!(q, vec![int(1), rat(1, 2), int(0), int(0)]);
        assert!(check_derivative_nonincreasing(&cap1(), &straddle, &rat(1, 8)).unwrap().is_clean());
        assert!(check_derivative_nonincreasing(&cap1(), &straddle, &int(0)).is_err());
    }

    #[test]
    fn ball_radius_examples() {
        assert_eq!(bend().ball_radius(&rat(1, 2)).unwrap(), rat(1, 3));
        assert_eq!(cap1().ball_radius(&rat(2, 3)).unwrap(), rat(2, 3));
        assert!(matches!(cap1().ball_radius(&int(1)), Err(GaugeError::OutsideInjectivity { .. })));
        assert!(cap1().ball_radius(&int(0)).is_err());
    }

    #[test]
    fn ball_membership_matches_on_three_points() {
        let s = three_point();
        let g = bend();
        let t = transform_metric(&s, &g).unwrap();
        let eps = rat(1, 2);
        let r = g.ball_radius(&eps).unwrap();
        let pts = s.enumerate().unwrap();
        for p in &pts {
            for q in &pts {
                let before = s.distance(p, q).unwrap() < eps;
                let after = t.distance(p, q).unwrap() < r;
                assert_eq!(before, after);
            }
        }
    }
}
