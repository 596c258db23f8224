//! ε-net certificates: synthesis, independent verification, and
//! nested-ball cluster-point extraction.
//!
//! All coverage is strict: a probe is covered when its distance to some net
//! point is `< eps`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exec::Exec;
use crate::notation::{format_point, parse_point, NotationError};
use crate::product::ProductPoint;
use crate::rational::{min_divisions, parse_rational, Fraction, Rational};
use crate::space::{cartesian, Point, Space, SpaceError, SpaceKind};

/// Upper limit on materialised nets and probe universes.
pub const MAX_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error("eps must be positive, got {0}")]
    NonPositiveEps(Rational),
    #[error("point set of size {0} exceeds the limit of {MAX_POINTS}")]
    TooLarge(String),
    #[error("certificate is for space `{found}`, not `{expected}`")]
    WrongSpace { expected: String, found: String },
    #[error("certificate line {line}: {reason}")]
    Certificate { line: usize, reason: String },
    #[error("horizon and levels must be at least 1")]
    EmptyHorizon,
    #[error("chain estimate fails between levels {n} and {m}: {distance} is not below {limit}")]
    ChainEstimate {
        n: usize,
        m: usize,
        distance: Rational,
        limit: Rational,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A finite point list claimed to `eps`-cover the space named `space_id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetCertificate {
    pub space_id: String,
    pub eps: Rational,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uncovered {
    pub probe: Point,
    /// Distance to the nearest net point; `None` for an empty net.
    pub nearest: Option<Rational>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverageReport {
    pub probes_checked: usize,
    pub uncovered: Vec<Uncovered>,
}

impl CoverageReport {
    pub fn is_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

fn check_size(n: &BigInt) -> Result<usize, NetError> {
    match n.to_usize() {
        Some(k) if k <= MAX_POINTS => Ok(k),
        _ => Err(NetError::TooLarge(n.to_string())),
    }
}

fn product_size(factors: &[Vec<Point>]) -> Result<(), NetError> {
    let total = factors
        .iter()
        .fold(BigInt::one(), |acc, f| acc * BigInt::from(f.len()));
    check_size(&total).map(|_| ())
}

/// `k + 1` evenly spaced points `lo, lo + h, …, hi` with `h = (hi − lo)/k`.
fn grid(lo: &Rational, hi: &Rational, k: usize) -> Vec<Point> {
    if lo == hi {
        return vec![Point::Real(lo.clone())];
    }
    let step = (hi - lo) / Rational::from_integer(BigInt::from(k));
    (0..=k)
        .map(|j| Point::Real(lo + &step * Rational::from_integer(BigInt::from(j))))
        .collect()
}

/// Points of an `eps`-net, in deterministic order.
pub(crate) fn net_points(space: &Space, eps: &Rational) -> Result<Vec<Point>, NetError> {
    match space.kind() {
        SpaceKind::Finite(_) => Ok(space.enumerate()?),
        SpaceKind::Interval(iv) => {
            // h(t) ≤ t for every catalog gauge, so a spacing below eps in
            // |x − y| also covers gauged intervals.
            let k = check_size(&min_divisions(&iv.span(), eps))?;
            Ok(grid(&iv.lo, &iv.hi, k))
        }
        SpaceKind::FiniteProduct(fp) => {
            let n = Rational::from_integer(BigInt::from(fp.components().len()));
            let factors: Vec<Vec<Point>> = fp
                .components()
                .iter()
                .zip(fp.weights())
                .map(|(s, w)| {
                    let m = s.declared_bound();
                    if m.is_zero() {
                        return Ok(vec![s.anchors()[0].clone()]);
                    }
                    // lᵢ·δᵢ/Mᵢ = eps/n
                    let radius = eps * m / (&n * w);
                    net_points(s, &radius)
                })
                .collect::<Result<_, _>>()?;
            product_size(&factors)?;
            Ok(cartesian(&factors).into_iter().map(Point::Tuple).collect())
        }
        SpaceKind::CountableProduct(cp) => {
            let half = eps / Rational::from_integer(2.into());
            let depth = cp.weights().min_depth(&half);
            let truncated = cp.truncation(format!("{}[..{depth}]", space.name()), depth)?;
            let tuples = net_points(&truncated, &half)?;
            Ok(tuples
                .into_iter()
                .map(|t| match t {
                    Point::Tuple(coords) => Point::Sequence(ProductPoint::new(coords, cp.default_anchor())),
                    _ => unreachable!("finite product nets are tuples"),
                })
                .collect())
        }
    }
}

/// Builds an `eps`-net certificate.
///
/// Finite spaces use every point. Intervals use the coarsest uniform grid
/// with spacing below `eps`. Finite products combine component nets as a
/// grid, giving each of the `n` weighted terms a budget of `eps/n`.
/// Countable products take the minimal depth `n` with tail below `eps/2`,
/// an `eps/2`-net of the depth-`n` truncation, and pad every point with the
/// default anchor tail.
pub fn net_of(space: &Space, eps: &Rational) -> Result<NetCertificate, NetError> {
    if !eps.is_positive() {
        return Err(NetError::NonPositiveEps(eps.clone()));
    }
    Ok(NetCertificate {
        space_id: space.name().to_string(),
        eps: eps.clone(),
        points: net_points(space, eps)?,
    })
}

/// Truncation depth used by [`net_of`] on a countable product.
pub fn net_depth(space: &Space, eps: &Rational) -> Option<usize> {
    let cp = space.as_countable_product()?;
    if !eps.is_positive() {
        return None;
    }
    Some(cp.weights().min_depth(&(eps / Rational::from_integer(2.into()))))
}

pub fn verify_coverage(space: &Space, cert: &NetCertificate, probes: &[Point]) -> Result<CoverageReport, NetError> {
    verify_coverage_with(space, cert, probes, Exec::default())
}

/// For every probe, the exact distance to the nearest net point; probes
/// at distance `≥ eps` from every net point are reported.
pub fn verify_coverage_with(
    space: &Space,
    cert: &NetCertificate,
    probes: &[Point],
    exec: Exec,
) -> Result<CoverageReport, NetError> {
    if cert.space_id != space.name() {
        return Err(NetError::WrongSpace {
            expected: space.name().to_string(),
            found: cert.space_id.clone(),
        });
    }
    if !cert.eps.is_positive() {
        return Err(NetError::NonPositiveEps(cert.eps.clone()));
    }
    for p in cert.points.iter().chain(probes) {
        space.validate_point(p)?;
    }
    let results: Vec<Option<Uncovered>> = exec.map(probes, |probe| {
        let mut nearest: Option<Rational> = None;
        for x in &cert.points {
            let d = space.distance_unchecked(probe, x);
            if d < cert.eps {
                return None;
            }
            if nearest.as_ref().is_none_or(|n| &d < n) {
                nearest = Some(d);
            }
        }
        Some(Uncovered {
            probe: probe.clone(),
            nearest,
        })
    });
    Ok(CoverageReport {
        probes_checked: probes.len(),
        uncovered: results.into_iter().flatten().collect(),
    })
}

/// The finite probe universe for a support bound `k`:
///
/// - finite spaces: every point;
/// - intervals: the uniform grid of `2^k + 1` points;
/// - finite products: all tuples of component universes;
/// - countable products: every point with explicit coordinates exactly in
///   positions `1..=k` (drawn from the component universes) under every
///   tail anchor.
pub fn probe_universe(space: &Space, support: usize) -> Result<Vec<Point>, NetError> {
    match space.kind() {
        SpaceKind::Finite(_) => Ok(space.enumerate()?),
        SpaceKind::Interval(iv) => {
            let k = check_size(&(BigInt::one() << support))?;
            Ok(grid(&iv.lo, &iv.hi, k))
        }
        SpaceKind::FiniteProduct(fp) => {
            let factors: Vec<Vec<Point>> = fp
                .components()
                .iter()
                .map(|s| probe_universe(s, support))
                .collect::<Result<_, _>>()?;
            product_size(&factors)?;
            Ok(cartesian(&factors).into_iter().map(Point::Tuple).collect())
        }
        SpaceKind::CountableProduct(cp) => {
            let per_slot: Vec<Vec<Point>> = cp
                .cycle()
                .iter()
                .map(|s| probe_universe(s, support))
                .collect::<Result<_, _>>()?;
            let mut factors: Vec<Vec<Point>> = (0..support).map(|i| per_slot[i % per_slot.len()].clone()).collect();
            factors.push(vec![Point::Discrete(0); cp.anchor_count()]);
            product_size(&factors)?;
            Ok(cp
                .support_points(support, &per_slot)
                .into_iter()
                .map(Point::Sequence)
                .collect())
        }
    }
}

impl NetCertificate {
    /// Header `id num/den count`, then one point per line.
    pub fn to_text(&self, space: &Space) -> String {
        let mut out = format!("{} {} {}\n", self.space_id, Fraction(&self.eps), self.points.len());
        for p in &self.points {
            out.push_str(&format_point(space, p));
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`NetCertificate::to_text`]. Points
    /// must be presentable in `space` and pairwise distinct.
    pub fn parse(text: &str, space: &Space) -> Result<NetCertificate, NetError> {
        let bad = |line: usize, reason: String| NetError::Certificate { line, reason };
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(1, format!("expected `space eps count`, found `{header}`")));
        }
        let eps = parse_rational(fields[1]).map_err(|e| bad(1, e.to_string()))?;
        if !eps.is_positive() {
            return Err(bad(1, format!("eps must be positive, got {eps}")));
        }
        let count: usize = fields[2]
            .parse()
            .map_err(|_| bad(1, format!("bad point count `{}`", fields[2])))?;
        if fields[0] != space.name() {
            return Err(NetError::WrongSpace {
                expected: space.name().to_string(),
                found: fields[0].to_string(),
            });
        }
        let mut points: Vec<Point> = Vec::with_capacity(count);
        for (line, raw) in lines {
            if raw.trim().is_empty() {
                return Err(bad(line, "blank line".into()));
            }
            let p = parse_point(space, raw).map_err(|e: NotationError| bad(line, e.to_string()))?;
            points.push(p);
        }
        if points.len() != count {
            return Err(bad(1, format!("header declares {count} points, found {}", points.len())));
        }
        for (i, p) in points.iter().enumerate() {
            if let Some(j) = points[..i].iter().position(|q| space.same_point(p, q)) {
                return Err(bad(i + 2, format!("duplicates the point on line {}", j + 2)));
            }
        }
        Ok(NetCertificate {
            space_id: fields[0].to_string(),
            eps,
            points,
        })
    }
}

/// A point within `eps` of `support_count` examined terms, with the chain
/// of nested-ball centres that located it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPoint {
    pub point: Point,
    pub eps: Rational,
    pub support_count: usize,
    /// `y₁, …, y_N`; level `n` used radius `1/(2n)`.
    pub chain: Vec<Point>,
    /// Surviving term count after each level.
    pub level_support: Vec<usize>,
    /// 1-based indices of the final surviving terms.
    pub members: Vec<usize>,
}

impl fmt::Display for ClusterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (eps {}, support {})", self.point, self.eps, self.support_count)
    }
}

pub fn bw_extract<F>(space: &Space, seq: F, horizon: usize, levels: usize) -> Result<ClusterPoint, NetError>
where
    F: Fn(usize) -> Point,
{
    bw_extract_with(space, seq, horizon, levels, Exec::default())
}

/// Nested-ball refinement over `seq(1..=horizon)`. At level `n` the net of
/// radius `1/(2n)` is scanned and the centre whose open ball holds the most
/// surviving terms is kept (lowest net index on ties); survivors shrink to
/// that ball. Returns the last centre with `eps = 1/levels`.
pub fn bw_extract_with<F>(
    space: &Space,
    seq: F,
    horizon: usize,
    levels: usize,
    exec: Exec,
) -> Result<ClusterPoint, NetError>
where
    F: Fn(usize) -> Point,
{
    if horizon == 0 || levels == 0 {
        return Err(NetError::EmptyHorizon);
    }
    let terms: Vec<Point> = (1..=horizon).map(&seq).collect();
    for t in &terms {
        space.validate_point(t)?;
    }
    let mut survivors: Vec<usize> = (0..horizon).collect();
    let mut chain = Vec::with_capacity(levels);
    let mut level_support = Vec::with_capacity(levels);
    for n in 1..=levels {
        let radius = Rational::new(BigInt::one(), BigInt::from(2 * n));
        let net = net_points(space, &radius)?;
        let counts = exec.map(&net, |y| {
            survivors
                .iter()
                .filter(|&&s| space.distance_unchecked(y, &terms[s]) < radius)
                .count()
        });
        let (best, _) = counts
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
        let centre = net[best].clone();
        survivors.retain(|&s| space.distance_unchecked(&centre, &terms[s]) < radius);
        chain.push(centre);
        level_support.push(survivors.len());
    }
    for n in 1..=levels {
        for m in n + 1..=levels {
            let d = space.distance_unchecked(&chain[m - 1], &chain[n - 1]);
            let limit = Rational::new(BigInt::one(), BigInt::from(2 * n)) + Rational::new(BigInt::one(), BigInt::from(2 * m));
            if d >= limit {
                return Err(NetError::ChainEstimate { n, m, distance: d, limit });
            }
        }
    }
    Ok(ClusterPoint {
        point: chain.last().cloned().expect("levels ≥ 1"),
        eps: Rational::new(BigInt::one(), BigInt::from(levels)),
        support_count: survivors.len(),
        chain,
        level_support,
        members: survivors.into_iter().map(|s| s + 1).collect(),
    })
}
