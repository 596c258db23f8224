//! Finite and countable products under the weighted metric
//! `D(x, y) = Σ lᵢ·dᵢ(xᵢ, yᵢ)/Mᵢ`.
//!
//! Countable products use geometric weights `lᵢ = s·rⁱ` and represent points
//! as an explicit prefix followed by an anchor tail, so `D` is a finite sum
//! plus one closed-form geometric series per residue class of the component
//! cycle. [`BasicOpen`] is the product-topology normal form
//! `{y : Σ_{i≤n} lᵢ·dᵢ(xᵢ, yᵢ)/Mᵢ < budget}`; [`CountableProduct::ball_to_open`]
//! and [`CountableProduct::open_to_ball`] produce inclusions in both
//! directions between those sets and `D`-balls.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{pow, Rational};
use crate::space::{cartesian, Point, Separation, Space, SpaceError, SpaceKind, SpaceRef};

/// `lᵢ = scale · ratioⁱ` for `i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSequence {
    ratio: Rational,
    scale: Rational,
}

impl WeightSequence {
    pub fn geometric(ratio: Rational, scale: Rational) -> Result<Self, SpaceError> {
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(SpaceError::BadRatio(ratio));
        }
        if !scale.is_positive() {
            return Err(SpaceError::NotPositive("weight scale"));
        }
        Ok(WeightSequence { ratio, scale })
    }

    pub fn ratio(&self) -> &Rational {
        &self.ratio
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// `lᵢ`, 1-based.
    pub fn weight(&self, i: usize) -> Rational {
        &self.scale * pow(&self.ratio, i as u64)
    }

    /// `L = Σ_{i≥1} lᵢ = s·r/(1 − r)`.
    pub fn total(&self) -> Rational {
        &self.scale * &self.ratio / (Rational::one() - &self.ratio)
    }

    /// `Σ_{i>n} lᵢ = s·r^{n+1}/(1 − r)`.
    pub fn tail(&self, n: usize) -> Rational {
        &self.scale * pow(&self.ratio, n as u64 + 1) / (Rational::one() - &self.ratio)
    }

    /// First `n` weights.
    pub fn prefix(&self, n: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n);
        let mut w = &self.scale * &self.ratio;
        for _ in 0..n {
            out.push(w.clone());
            w *= &self.ratio;
        }
        out
    }

    /// Minimal `n ≥ 1` with `tail(n) < target`. `target` must be positive.
    pub fn min_depth(&self, target: &Rational) -> usize {
        debug_assert!(target.is_positive());
        let mut n = 1;
        let mut tail = self.tail(1);
        while &tail >= target {
            tail *= &self.ratio;
            n += 1;
        }
        n
    }
}

/// Component `i` (1-based) of a countable product is `cycle[(i − 1) mod len]`.
#[derive(Clone, Debug)]
pub struct ComponentGenerator {
    cycle: Vec<SpaceRef>,
}

impl ComponentGenerator {
    pub fn new(cycle: Vec<SpaceRef>) -> Result<Self, SpaceError> {
        if cycle.is_empty() {
            return Err(SpaceError::NoComponents);
        }
        for s in &cycle {
            check_component(s)?;
        }
        Ok(ComponentGenerator { cycle })
    }

    pub fn constant(space: SpaceRef) -> Result<Self, SpaceError> {
        Self::new(vec![space])
    }

    pub fn cycle(&self) -> &[SpaceRef] {
        &self.cycle
    }
}

fn check_component(s: &Space) -> Result<(), SpaceError> {
    if s.declared_bound().is_zero() && s.separation() != Separation::Trivial {
        return Err(SpaceError::DegenerateComponent(s.name().to_string()));
    }
    Ok(())
}

/// `1/M`, or 0 for a single-point component where every distance is 0.
fn inverse_bound(s: &Space) -> Rational {
    let m = s.declared_bound();
    if m.is_zero() {
        Rational::zero()
    } else {
        m.recip()
    }
}

/// Point of a countable product: coordinates `1..=prefix.len()` explicit,
/// every later coordinate `i` equal to anchor `tail_anchor` of component `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductPoint {
    pub prefix: Vec<Point>,
    pub tail_anchor: usize,
}

impl ProductPoint {
    pub fn new(prefix: Vec<Point>, tail_anchor: usize) -> Self {
        ProductPoint { prefix, tail_anchor }
    }

    pub fn anchor(tail_anchor: usize) -> Self {
        ProductPoint {
            prefix: Vec::new(),
            tail_anchor,
        }
    }
}

impl fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.prefix.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ";{})", self.tail_anchor)
    }
}

/// `{y : Σ_{i≤depth} lᵢ·dᵢ(centerᵢ, yᵢ)/Mᵢ < budget}`; coordinates past
/// `depth` are unrestricted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicOpen {
    pub center: ProductPoint,
    pub depth: usize,
    pub budget: Rational,
}

impl BasicOpen {
    pub fn new(center: ProductPoint, depth: usize, budget: Rational) -> Result<Self, SpaceError> {
        if depth == 0 {
            return Err(SpaceError::ZeroDepth);
        }
        if !budget.is_positive() {
            return Err(SpaceError::NotPositive("budget"));
        }
        Ok(BasicOpen { center, depth, budget })
    }

    pub fn contains(&self, product: &CountableProduct, y: &ProductPoint) -> bool {
        product.partial_sum(&self.center, y, self.depth) < self.budget
    }
}

/// A finite product `X₁ × … × Xₙ` with `D = Σ wᵢ·dᵢ/Mᵢ`.
#[derive(Clone, Debug)]
pub struct FiniteProduct {
    components: Vec<SpaceRef>,
    weights: Vec<Rational>,
    inv_bounds: Vec<Rational>,
}

impl FiniteProduct {
    pub fn components(&self) -> &[SpaceRef] {
        &self.components
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Supremum of `D`: the sum of weights over non-trivial components.
    pub fn weight_total(&self) -> Rational {
        self.weights
            .iter()
            .zip(&self.inv_bounds)
            .filter(|(_, inv)| !inv.is_zero())
            .fold(Rational::zero(), |acc, (w, _)| acc + w)
    }

    pub(crate) fn term(&self, i: usize, a: &Point, b: &Point) -> Rational {
        if self.inv_bounds[i].is_zero() {
            return Rational::zero();
        }
        let d = self.components[i].distance_unchecked(a, b);
        if d.is_zero() {
            return d;
        }
        d * &self.weights[i] * &self.inv_bounds[i]
    }

    pub(crate) fn distance(&self, a: &[Point], b: &[Point]) -> Rational {
        let mut sum = Rational::zero();
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            sum += self.term(i, x, y);
        }
        sum
    }

    pub(crate) fn separation(&self) -> Separation {
        let mut best: Option<Rational> = None;
        for (i, s) in self.components.iter().enumerate() {
            match s.separation() {
                Separation::Trivial => {}
                Separation::None => return Separation::None,
                Separation::Positive(d) => {
                    let t = d * &self.weights[i] * &self.inv_bounds[i];
                    best = Some(match best {
                        Some(b) if b <= t => b,
                        _ => t,
                    });
                }
            }
        }
        match best {
            Some(d) => Separation::Positive(d),
            None => Separation::Trivial,
        }
    }
}

fn common_anchor_count(spaces: &[SpaceRef]) -> usize {
    spaces.iter().map(|s| s.anchors().len()).min().unwrap_or(0)
}

impl Space {
    /// `X₁ × … × Xₙ` with explicit positive weights. Anchor `k` is the tuple
    /// of the components' `k`-th anchors.
    pub fn finite_product(
        name: impl Into<String>,
        components: Vec<SpaceRef>,
        weights: Vec<Rational>,
    ) -> Result<Space, SpaceError> {
        if components.is_empty() {
            return Err(SpaceError::NoComponents);
        }
        if components.len() != weights.len() {
            return Err(SpaceError::WeightCount {
                components: components.len(),
                weights: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(SpaceError::NotPositive("product weight"));
        }
        for s in &components {
            check_component(s)?;
        }
        let inv_bounds = components.iter().map(|s| inverse_bound(s)).collect();
        let k = common_anchor_count(&components);
        let anchors = (0..k)
            .map(|a| Point::Tuple(components.iter().map(|s| s.anchors()[a].clone()).collect()))
            .collect();
        let fp = FiniteProduct {
            components,
            weights,
            inv_bounds,
        };
        let bound = fp.weight_total();
        Ok(Space::from_parts(name.into(), SpaceKind::FiniteProduct(fp), bound, anchors))
    }

    /// `∏_{i≥1} Xᵢ` under `D`. Anchor `k` is the all-tail point with tail
    /// anchor `k`; `default_anchor` is the tail used to pad net points.
    pub fn countable_product(
        name: impl Into<String>,
        generator: ComponentGenerator,
        weights: WeightSequence,
        default_anchor: usize,
    ) -> Result<Space, SpaceError> {
        let cycle = generator.cycle;
        let anchor_count = common_anchor_count(&cycle);
        if default_anchor >= anchor_count {
            return Err(SpaceError::BadTailAnchor {
                anchor: default_anchor,
                available: anchor_count,
            });
        }
        let inv_bounds = cycle.iter().map(|s| inverse_bound(s)).collect();
        let anchors = (0..anchor_count)
            .map(|k| Point::Sequence(ProductPoint::anchor(k)))
            .collect();
        let bound = weights.total();
        let cp = CountableProduct {
            cycle,
            weights,
            default_anchor,
            anchor_count,
            inv_bounds,
        };
        Ok(Space::from_parts(name.into(), SpaceKind::CountableProduct(cp), bound, anchors))
    }

    /// The binary cycle with `lᵢ = 2⁻ⁱ`: `D(x, y) = Σ 2⁻ⁱ|xᵢ − yᵢ|`.
    pub fn cantor() -> Space {
        let gen = ComponentGenerator::constant(SpaceRef::new(Space::binary())).expect("binary component");
        let half = Rational::new(1.into(), 2.into());
        let w = WeightSequence::geometric(half, Rational::one()).expect("1/2 is a valid ratio");
        Space::countable_product("cantor", gen, w, 0).expect("anchor 0 exists")
    }
}

#[derive(Clone, Debug)]
pub struct CountableProduct {
    cycle: Vec<SpaceRef>,
    weights: WeightSequence,
    default_anchor: usize,
    anchor_count: usize,
    inv_bounds: Vec<Rational>,
}

/// Result of [`CountableProduct::cauchy_limit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchyLimit {
    pub point: ProductPoint,
    /// Coordinates `1..=certified_depth` are proven equal to the limit's.
    pub certified_depth: usize,
    /// `D(point, limit) ≤ radius`.
    pub radius: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CauchyError {
    #[error("empty sequence")]
    Empty,
    #[error("{terms} terms but {moduli} modulus values")]
    LengthMismatch { terms: usize, moduli: usize },
    #[error("modulus value at index {0} must be positive")]
    NonPositiveModulus(usize),
    #[error("modulus violated: D(seq[{j}], seq[{k}]) = {distance} is not below modulus({j}) = {modulus}")]
    ModulusViolated {
        j: usize,
        k: usize,
        distance: Rational,
        modulus: Rational,
    },
    #[error("coordinate 1 does not stabilise within the evidence (smallest modulus {0})")]
    NoStabilization(Rational),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl CountableProduct {
    pub fn cycle(&self) -> &[SpaceRef] {
        &self.cycle
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn default_anchor(&self) -> usize {
        self.default_anchor
    }

    /// Number of tail anchors valid for every component.
    pub fn anchor_count(&self) -> usize {
        self.anchor_count
    }

    fn slot(&self, i: usize) -> usize {
        (i - 1) % self.cycle.len()
    }

    /// Component space `i`, 1-based.
    pub fn component(&self, i: usize) -> &Space {
        &self.cycle[self.slot(i)]
    }

    /// Coordinate `i` (1-based) of `p`.
    pub fn coordinate<'a>(&'a self, p: &'a ProductPoint, i: usize) -> &'a Point {
        match p.prefix.get(i - 1) {
            Some(c) => c,
            None => &self.component(i).anchors()[p.tail_anchor],
        }
    }

    pub(crate) fn is_trivial(&self) -> bool {
        self.cycle.iter().all(|s| s.separation() == Separation::Trivial)
    }

    pub fn validate(&self, p: &ProductPoint) -> Result<(), SpaceError> {
        if p.tail_anchor >= self.anchor_count {
            return Err(SpaceError::BadTailAnchor {
                anchor: p.tail_anchor,
                available: self.anchor_count,
            });
        }
        for (k, c) in p.prefix.iter().enumerate() {
            self.component(k + 1).validate_point(c)?;
        }
        Ok(())
    }

    /// Drops trailing prefix coordinates that equal the tail anchor.
    pub fn normalize(&self, p: &ProductPoint) -> ProductPoint {
        let mut len = p.prefix.len();
        while len > 0 {
            let comp = self.component(len);
            if comp.same_point(&p.prefix[len - 1], &comp.anchors()[p.tail_anchor]) {
                len -= 1;
            } else {
                break;
            }
        }
        ProductPoint {
            prefix: p.prefix[..len].to_vec(),
            tail_anchor: p.tail_anchor,
        }
    }

    pub fn same_point(&self, a: &ProductPoint, b: &ProductPoint) -> bool {
        let (a, b) = (self.normalize(a), self.normalize(b));
        a.tail_anchor == b.tail_anchor
            && a.prefix.len() == b.prefix.len()
            && a.prefix
                .iter()
                .zip(&b.prefix)
                .enumerate()
                .all(|(k, (x, y))| self.component(k + 1).same_point(x, y))
    }

    fn term(&self, i: usize, weight: &Rational, x: &Point, y: &Point) -> Rational {
        let slot = self.slot(i);
        if self.inv_bounds[slot].is_zero() {
            return Rational::zero();
        }
        let d = self.cycle[slot].distance_unchecked(x, y);
        if d.is_zero() {
            return d;
        }
        d * weight * &self.inv_bounds[slot]
    }

    /// `Σ_{i=1}^{n} lᵢ·dᵢ(xᵢ, yᵢ)/Mᵢ`.
    pub fn partial_sum(&self, x: &ProductPoint, y: &ProductPoint, n: usize) -> Rational {
        let mut sum = Rational::zero();
        let mut w = self.weights.scale() * self.weights.ratio();
        for i in 1..=n {
            sum += self.term(i, &w, self.coordinate(x, i), self.coordinate(y, i));
            w *= self.weights.ratio();
        }
        sum
    }

    /// Exact `D(x, y)`: the sum over the longer prefix, then for each cycle
    /// slot a geometric tail `s·r^{i₀}/(1 − r^len)·d(anchor_x, anchor_y)/M`.
    pub(crate) fn distance(&self, x: &ProductPoint, y: &ProductPoint) -> Rational {
        let m = x.prefix.len().max(y.prefix.len());
        let mut sum = self.partial_sum(x, y, m);
        if x.tail_anchor == y.tail_anchor {
            return sum;
        }
        let len = self.cycle.len();
        let period = Rational::one() - pow(self.weights.ratio(), len as u64);
        for (c, comp) in self.cycle.iter().enumerate() {
            if self.inv_bounds[c].is_zero() {
                continue;
            }
            let d = comp.distance_unchecked(&comp.anchors()[x.tail_anchor], &comp.anchors()[y.tail_anchor]);
            if d.is_zero() {
                continue;
            }
            let first = m + 1 + (c + len - m % len) % len;
            let series = self.weights.weight(first) / &period;
            sum += series * d * &self.inv_bounds[c];
        }
        sum
    }

    pub fn tail_bound(&self, n: usize) -> Result<Rational, SpaceError> {
        if n == 0 {
            return Err(SpaceError::ZeroDepth);
        }
        Ok(self.weights.tail(n))
    }

    /// Basic open around `x` inside `B(x, eps)`: minimal depth `n` with
    /// `tail_bound(n) < eps/2` and budget `eps/2`.
    pub fn ball_to_open(&self, x: &ProductPoint, eps: &Rational) -> Result<BasicOpen, SpaceError> {
        if !eps.is_positive() {
            return Err(SpaceError::NotPositive("eps"));
        }
        self.validate(x)?;
        let half = eps / Rational::from_integer(2.into());
        let depth = self.weights.min_depth(&half);
        BasicOpen::new(x.clone(), depth, half)
    }

    /// Radius `eps` with `B(center, eps) ⊆ V`. Each restricted term is at
    /// most `D`, so the budget itself works.
    pub fn open_to_ball(&self, v: &BasicOpen) -> Rational {
        v.budget.clone()
    }

    /// The depth-`n` truncation `X₁ × … × Xₙ` with weights `l₁..lₙ`.
    pub fn truncation(&self, name: impl Into<String>, n: usize) -> Result<Space, SpaceError> {
        if n == 0 {
            return Err(SpaceError::ZeroDepth);
        }
        let comps = (1..=n).map(|i| self.cycle[self.slot(i)].clone()).collect();
        Space::finite_product(name, comps, self.weights.prefix(n))
    }

    /// Componentwise limit of a sequence that is Cauchy with the given
    /// modulus: `D(seq[j], seq[k]) < modulus[min(j, k)]`, checked on every
    /// pair of the evidence.
    ///
    /// Coordinate `i` is pinned once some `modulus[k] < lᵢ·δᵢ/Mᵢ`, `δᵢ` the
    /// smallest positive distance in component `i`. Beyond the pinned
    /// prefix the limit is extrapolated: if the best-certified term has no
    /// explicit coordinates past the pinned region it is returned as is,
    /// otherwise the pinned coordinates are closed with the anchor tail
    /// they already end in.
    pub fn cauchy_limit(&self, seq: &[ProductPoint], modulus: &[Rational]) -> Result<CauchyLimit, CauchyError> {
        if seq.is_empty() {
            return Err(CauchyError::Empty);
        }
        if seq.len() != modulus.len() {
            return Err(CauchyError::LengthMismatch {
                terms: seq.len(),
                moduli: modulus.len(),
            });
        }
        for p in seq {
            self.validate(p)?;
        }
        if let Some(k) = modulus.iter().position(|m| !m.is_positive()) {
            return Err(CauchyError::NonPositiveModulus(k));
        }
        for j in 0..seq.len() {
            for k in j + 1..seq.len() {
                let d = self.distance(&seq[j], &seq[k]);
                if d >= modulus[j] {
                    return Err(CauchyError::ModulusViolated {
                        j,
                        k,
                        distance: d,
                        modulus: modulus[j].clone(),
                    });
                }
            }
        }

        // Latest index attaining the smallest modulus.
        let (best, tightest) = modulus
            .iter()
            .enumerate()
            .rev()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(k, m)| (k, m.clone()))
            .expect("nonempty");
        let term = &seq[best];

        if self.is_trivial() {
            return Ok(CauchyLimit {
                point: self.normalize(term),
                certified_depth: usize::MAX,
                radius: Rational::zero(),
            });
        }

        let mut depth = 0;
        let mut w = self.weights.scale() * self.weights.ratio();
        loop {
            let i = depth + 1;
            let slot = self.slot(i);
            let pinned = match self.cycle[slot].separation() {
                Separation::Trivial => true,
                Separation::None => false,
                Separation::Positive(delta) => tightest < &w * delta * &self.inv_bounds[slot],
            };
            if !pinned {
                break;
            }
            depth = i;
            w *= self.weights.ratio();
        }
        if depth == 0 {
            return Err(CauchyError::NoStabilization(tightest));
        }

        let normalized = self.normalize(term);
        if normalized.prefix.len() <= depth {
            return Ok(CauchyLimit {
                point: normalized,
                certified_depth: depth,
                radius: tightest,
            });
        }

        let pinned: Vec<Point> = (1..=depth).map(|i| self.coordinate(term, i).clone()).collect();
        let run = |a: usize| {
            (1..=depth)
                .rev()
                .take_while(|&i| {
                    let comp = self.component(i);
                    comp.same_point(&pinned[i - 1], &comp.anchors()[a])
                })
                .count()
        };
        let mut tail = term.tail_anchor;
        let mut longest = run(tail);
        for a in 0..self.anchor_count {
            let r = run(a);
            if r > longest {
                tail = a;
                longest = r;
            }
        }
        let point = self.normalize(&ProductPoint::new(pinned, tail));
        let via_term = self.distance(&point, term) + &tightest;
        let by_depth = self.weights.tail(depth);
        let radius = if via_term < by_depth { via_term } else { by_depth };
        Ok(CauchyLimit {
            point,
            certified_depth: depth,
            radius,
        })
    }

    /// Every point whose explicit coordinates lie in `1..=support` and are
    /// drawn from the given per-component universes, under each tail anchor.
    pub(crate) fn support_points(&self, support: usize, per_slot: &[Vec<Point>]) -> Vec<ProductPoint> {
        let factors: Vec<Vec<Point>> = (1..=support).map(|i| per_slot[self.slot(i)].clone()).collect();
        let prefixes = cartesian(&factors);
        let mut out = Vec::with_capacity(prefixes.len() * self.anchor_count);
        for a in 0..self.anchor_count {
            for p in &prefixes {
                out.push(ProductPoint::new(p.clone(), a));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use std::sync::Arc;

    fn bits(bs: &[u8], tail: usize) -> ProductPoint {
        ProductPoint::new(bs.iter().map(|&b| Point::Discrete(b as usize)).collect(), tail)
    }

    fn cantor() -> (Space, CountableProduct) {
        let s = Space::cantor();
        let cp = s.as_countable_product().unwrap().clone();
        (s, cp)
    }

    #[test]
    fn cantor_diameter_is_one() {
        let (s, cp) = cantor();
        assert_eq!(s.diameter_bound().unwrap(), int(1));
        assert_eq!(cp.weights().total(), int(1));
        assert_eq!(cp.anchor_count(), 2);
    }

    #[test]
    fn single_term_and_geometric_tail() {
        let (s, _) = cantor();
        let zero = Point::Sequence(bits(&[], 0));
        let e1 = Point::Sequence(bits(&[1], 0));
        let ones = Point::Sequence(bits(&[], 1));
        assert_eq!(s.distance(&zero, &e1).unwrap(), rat(1, 2));
        assert_eq!(s.distance(&zero, &ones).unwrap(), int(1));
        assert_eq!(s.distance(&e1, &e1).unwrap(), int(0));
        // explicit trailing anchors do not change the point
        let padded = Point::Sequence(bits(&[1, 0, 0], 0));
        assert_eq!(s.distance(&e1, &padded).unwrap(), int(0));
        assert!(s.same_point(&e1, &padded));
    }

    #[test]
    fn tail_bound_examples() {
        let (_, cp) = cantor();
        assert_eq!(cp.tail_bound(3).unwrap(), rat(1, 8));
        assert!(cp.tail_bound(0).is_err());
        let w = WeightSequence::geometric(rat(1, 3), int(1)).unwrap();
        assert_eq!(w.tail(2), rat(1, 18));
        assert_eq!(w.min_depth(&rat(1, 18)), 3);
    }

    #[test]
    fn weight_validation() {
        assert!(WeightSequence::geometric(int(1), int(1)).is_err());
        assert!(WeightSequence::geometric(int(0), int(1)).is_err());
        assert!(WeightSequence::geometric(rat(1, 2), int(0)).is_err());
    }

    #[test]
    fn singleton_product_has_one_point() {
        let one = Arc::new(Space::singleton("one", "p").unwrap());
        let gen = ComponentGenerator::constant(one).unwrap();
        let s = Space::countable_product("P", gen, WeightSequence::geometric(rat(1, 2), int(1)).unwrap(), 0)
            .unwrap();
        let x = Point::Sequence(ProductPoint::new(vec![Point::Discrete(0); 3], 0));
        let y = Point::Sequence(ProductPoint::anchor(0));
        assert_eq!(s.distance(&x, &y).unwrap(), int(0));
        assert!(s.same_point(&x, &y));
        assert_eq!(s.anchors().len(), 1);
    }

    #[test]
    fn degenerate_component_is_rejected() {
        let t = |v: [i64; 2]| v.iter().map(|&x| int(x)).collect::<Vec<_>>();
        let mut s = Space::finite("two", vec!["a".into(), "b".into()], vec![t([0, 1]), t([1, 0])]).unwrap();
        // force a zero bound through the crate-private constructor
        s = Space::from_parts("two".into(), s.kind().clone(), int(0), s.anchors().to_vec());
        assert!(matches!(
            ComponentGenerator::constant(Arc::new(s)),
            Err(SpaceError::DegenerateComponent(_))
        ));
    }

    #[test]
    fn tail_anchor_out_of_range() {
        let (s, cp) = cantor();
        assert!(cp.validate(&bits(&[0], 2)).is_err());
        assert!(s.distance(&Point::Sequence(bits(&[2], 0)), &Point::Sequence(bits(&[], 0))).is_err());
    }

    #[test]
    fn mixed_cycle_tail_uses_residue_classes() {
        // cycle [binary, [0, 2]] with weights (1/2)^i; anchors 0 vs 1 differ
        // in every slot: binary by 1 (M = 1), interval by 2 (M = 2).
        let b = Arc::new(Space::binary());
        let iv = Arc::new(Space::interval("I", int(0), int(2)).unwrap());
        let gen = ComponentGenerator::new(vec![b, iv]).unwrap();
        let s = Space::countable_product("mix", gen, WeightSequence::geometric(rat(1, 2), int(1)).unwrap(), 0)
            .unwrap();
        let x = Point::Sequence(ProductPoint::anchor(0));
        let y = Point::Sequence(ProductPoint::anchor(1));
        assert_eq!(s.distance(&x, &y).unwrap(), int(1));
        // first coordinate explicit and equal: remaining Σ_{i≥2} 2⁻ⁱ = 1/2
        let x1 = Point::Sequence(ProductPoint::new(vec![Point::Discrete(1)], 0));
        assert_eq!(s.distance(&x1, &y).unwrap(), rat(1, 2));
        // interval slot: l₂·|1 − 0|/M = (1/4)·1/2
        let z = Point::Sequence(ProductPoint::new(vec![Point::Discrete(0), Point::Real(int(1))], 0));
        assert_eq!(s.distance(&z, &x).unwrap(), rat(1, 8));
    }

    #[test]
    fn ball_to_open_examples() {
        let (_, cp) = cantor();
        let v = cp.ball_to_open(&bits(&[], 0), &rat(1, 4)).unwrap();
        assert_eq!(v.depth, 4);
        assert_eq!(v.budget, rat(1, 8));
        let v = cp.ball_to_open(&bits(&[], 0), &int(3)).unwrap();
        assert_eq!(v.depth, 1);
        assert!(cp.ball_to_open(&bits(&[], 0), &int(0)).is_err());
    }

    #[test]
    fn open_to_ball_depth_one() {
        let (_, cp) = cantor();
        let v = BasicOpen::new(bits(&[], 0), 1, rat(1, 2)).unwrap();
        let eps = cp.open_to_ball(&v);
        assert_eq!(eps, rat(1, 2));
        let y = bits(&[1], 0);
        assert!(!v.contains(&cp, &y));
        assert!(cp.distance(&bits(&[], 0), &y) >= eps);
        assert!(BasicOpen::new(bits(&[], 0), 0, rat(1, 2)).is_err());
        assert!(BasicOpen::new(bits(&[], 0), 1, int(0)).is_err());
    }

    #[test]
    fn cauchy_ones_converge_to_tail_one() {
        let (_, cp) = cantor();
        let seq: Vec<ProductPoint> = (1..=16).map(|k| bits(&vec![1; k], 0)).collect();
        let modulus: Vec<Rational> = (1..=16).map(|k| crate::rational::pow(&rat(1, 2), k as u64 - 1)).collect();
        let lim = cp.cauchy_limit(&seq, &modulus).unwrap();
        assert_eq!(lim.point, ProductPoint::anchor(1));
        assert!(lim.certified_depth >= 10);
    }

    #[test]
    fn cauchy_constant_sequence() {
        let (_, cp) = cantor();
        let p = bits(&[1, 0, 1], 0);
        let seq = vec![p.clone(); 6];
        let modulus: Vec<Rational> = (0..6).map(|k| crate::rational::pow(&rat(1, 2), k)).collect();
        let lim = cp.cauchy_limit(&seq, &modulus).unwrap();
        assert_eq!(lim.point, p);
    }

    #[test]
    fn cauchy_violation_has_witness() {
        let (_, cp) = cantor();
        let seq = vec![bits(&[], 0), bits(&[1], 0), bits(&[1, 1], 0)];
        let modulus = vec![rat(1, 4), rat(1, 8), rat(1, 16)];
        match cp.cauchy_limit(&seq, &modulus) {
            Err(CauchyError::ModulusViolated { j, k, distance, .. }) => {
                assert_eq!((j, k), (0, 1));
                assert_eq!(distance, rat(1, 2));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        assert!(matches!(cp.cauchy_limit(&[], &[]), Err(CauchyError::Empty)));
        assert!(matches!(
            cp.cauchy_limit(&seq, &modulus[..2]),
            Err(CauchyError::LengthMismatch { .. })
        ));
        // modulus too coarse to pin even the first coordinate
        assert!(matches!(
            cp.cauchy_limit(&[bits(&[], 0)], &[int(1)]),
            Err(CauchyError::NoStabilization(_))
        ));
    }

    #[test]
    fn truncation_weights() {
        let (_, cp) = cantor();
        let t = cp.truncation("t", 3).unwrap();
        let fp = t.as_finite_product().unwrap();
        assert_eq!(fp.weights(), &[rat(1, 2), rat(1, 4), rat(1, 8)]);
        assert_eq!(t.diameter_bound().unwrap(), rat(7, 8));
    }
}
