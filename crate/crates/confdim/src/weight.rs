//! Weight functions on the cell tree and their structural diagnostics.
//!
//! A weight function assigns every tree vertex a positive size at most 1,
//! non-increasing along edges. Scale sets collect the vertices where the
//! weight first drops below a threshold; they are the combinatorial
//! "resolutions" of the space that every later construction consumes.

use crate::geom::{q_to_f64, Q, Surd};
use crate::partition::{PartitionError, PartitionFamily};
use crate::tree::Address;
use num_traits::One;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("scale set member deeper than the horizon: branch at {0} still above the threshold")]
    DepthExceeded(Address),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("weight value missing for address {0}")]
    MissingValue(Address),
}

/// Built-in weight function forms.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    /// `ratio^depth`.
    Geometric { ratio: Q },
    /// Product of per-digit ratios along the address.
    Product { digit_ratios: Vec<Q> },
    /// Euclidean diameter of the cell; `normalized` divides by the diameter
    /// of the whole space so the root weighs 1.
    MetricDiam { normalized: bool },
    /// Product of per-digit masses (product measures).
    MeasureProduct { digit_masses: Vec<Q> },
    /// Explicit table; the value of an address is the entry of its deepest
    /// tabulated prefix.
    Table { values: BTreeMap<Address, Q> },
    /// Value depends on the depth only.
    LevelTable { values: Vec<Q> },
}

impl WeightFunction {
    pub fn geometric(ratio: Q) -> Self {
        WeightFunction::Geometric { ratio }
    }

    pub fn eval(&self, family: &PartitionFamily, w: &Address) -> Result<Surd, WeightError> {
        match self {
            WeightFunction::Geometric { ratio } => {
                let mut v = Q::one();
                for _ in 0..w.depth() {
                    v *= *ratio;
                }
                Ok(Surd::rational(v))
            }
            WeightFunction::Product { digit_ratios } => {
                let mut v = Q::one();
                for &d in w.digits() {
                    let r = digit_ratios
                        .get(d as usize)
                        .ok_or_else(|| WeightError::MissingValue(w.clone()))?;
                    v *= *r;
                }
                Ok(Surd::rational(v))
            }
            WeightFunction::MeasureProduct { digit_masses } => {
                let mut v = Q::one();
                for &d in w.digits() {
                    let r = digit_masses
                        .get(d as usize)
                        .ok_or_else(|| WeightError::MissingValue(w.clone()))?;
                    v *= *r;
                }
                Ok(Surd::rational(v))
            }
            WeightFunction::MetricDiam { normalized } => {
                let d2 = family.cell_diam2(w)?;
                let value = Surd::sqrt_of(d2);
                if *normalized {
                    let root = Surd::sqrt_of(family.cell_diam2(&Address::root())?);
                    // Exact within one surd class; cells of these families
                    // share the class of the root diameter.
                    Ok(Surd::rational(value.ratio(&root)))
                } else {
                    Ok(value)
                }
            }
            WeightFunction::Table { values } => {
                for cut in (0..=w.depth()).rev() {
                    if let Some(v) = values.get(&w.truncate(cut)) {
                        return Ok(Surd::rational(*v));
                    }
                }
                Err(WeightError::MissingValue(w.clone()))
            }
            WeightFunction::LevelTable { values } => values
                .get(w.depth())
                .map(|v| Surd::rational(*v))
                .ok_or_else(|| WeightError::MissingValue(w.clone())),
        }
    }
}

/// The antichain where the weight first drops to `s` or below.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSet {
    pub s: Surd,
    pub members: Vec<Address>,
}

pub fn scale_set(
    family: &PartitionFamily,
    g: &WeightFunction,
    s: &Surd,
) -> Result<ScaleSet, WeightError> {
    let one = Surd::one();
    if *s >= one {
        return Ok(ScaleSet {
            s: s.clone(),
            members: vec![Address::root()],
        });
    }
    let mut members = Vec::new();
    let mut stack = vec![Address::root()];
    while let Some(w) = stack.pop() {
        let value = g.eval(family, &w)?;
        if value <= *s {
            members.push(w);
        } else if w.depth() >= family.max_depth() {
            return Err(WeightError::DepthExceeded(w));
        } else {
            stack.extend(family.valid_children(&w)?);
        }
    }
    members.sort();
    Ok(ScaleSet {
        s: s.clone(),
        members,
    })
}

/// Members of the scale set whose cells contain the point, located by
/// weighted descent (cheaper than building the whole set).
pub fn scale_cells_at_point(
    family: &PartitionFamily,
    g: &WeightFunction,
    s: &Surd,
    x: &crate::geom::Point,
) -> Result<Vec<Address>, WeightError> {
    let one = Surd::one();
    if *s >= one {
        return Ok(vec![Address::root()]);
    }
    let pr = family.point_addresses(x, family.max_depth())?;
    let mut out = Vec::new();
    for level in 0..pr.addresses_per_level.len() {
        for w in pr.cells_at(level) {
            let value = g.eval(family, w)?;
            let parent_above = if w.is_root() {
                false
            } else {
                g.eval(family, &w.parent())? > *s
            };
            if value <= *s && (w.is_root() || parent_above) {
                out.push(w.clone());
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Scale-set members intersecting the cell `w`, found by weighted descent
/// with ambient-touch pruning. Includes `w` itself.
pub fn scale_neighbors(
    family: &PartitionFamily,
    g: &WeightFunction,
    s: &Surd,
    w: &Address,
) -> Result<Vec<Address>, WeightError> {
    let target = match family.ambient_rect(w) {
        Some(r) => r,
        None => return Ok(vec![w.clone()]),
    };
    let mut out = Vec::new();
    let mut stack = vec![Address::root()];
    while let Some(u) = stack.pop() {
        let ru = match family.ambient_rect(&u) {
            Some(r) => r,
            None => continue,
        };
        if !ru.touches(&target) {
            continue;
        }
        let value = g.eval(family, &u)?;
        if value <= *s || *s >= Surd::one() {
            if family.intersects(&u, w)? {
                out.push(u);
            }
        } else if u.depth() < family.max_depth() {
            stack.extend(family.valid_children(&u)?);
        } else {
            return Err(WeightError::DepthExceeded(u));
        }
    }
    out.sort();
    Ok(out)
}

/// All distinct weight values over the enumerated tree, ascending.
pub fn distinct_values(
    family: &PartitionFamily,
    g: &WeightFunction,
) -> Result<Vec<Surd>, WeightError> {
    let mut values = Vec::new();
    let mut stack = vec![Address::root()];
    while let Some(w) = stack.pop() {
        values.push(g.eval(family, &w)?);
        if w.depth() < family.max_depth() {
            stack.extend(family.valid_children(&w)?);
        }
    }
    values.sort();
    values.dedup();
    Ok(values)
}

/// Empirical contraction constants of a weight function.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpConstants {
    /// Smallest one-step ratio `g(w)/g(parent(w))`.
    pub super_lambda: Q,
    /// Smallest lag `m` whose worst `m`-step ratio drops below 1, with that
    /// ratio; absent when no enumerable lag contracts uniformly.
    pub sub: Option<(usize, Q)>,
    /// Worst `m`-step ratio for every checked lag.
    pub per_lag: Vec<(usize, Q)>,
}

pub fn exp_constants(
    family: &PartitionFamily,
    g: &WeightFunction,
    depth: usize,
) -> Result<ExpConstants, WeightError> {
    assert!(depth >= 2, "need at least two levels");
    let depth = depth.min(family.max_depth());
    let mut cells_by_level: Vec<Vec<Address>> = Vec::with_capacity(depth + 1);
    for level in 0..=depth {
        cells_by_level.push(family.level_cells(level));
    }
    let mut super_lambda: Option<Q> = None;
    for level in 1..=depth {
        for w in &cells_by_level[level] {
            let r = g.eval(family, w)?.ratio(&g.eval(family, &w.parent())?);
            super_lambda = Some(match super_lambda {
                None => r,
                Some(cur) => cur.min(r),
            });
        }
    }
    let mut per_lag = Vec::new();
    let mut sub = None;
    for lag in 1..=depth.saturating_sub(1).max(1) {
        let mut worst: Option<Q> = None;
        for level in lag..=depth {
            for w in &cells_by_level[level] {
                let anc = w.ancestor(lag);
                let r = g.eval(family, w)?.ratio(&g.eval(family, &anc)?);
                worst = Some(match worst {
                    None => r,
                    Some(cur) => cur.max(r),
                });
            }
        }
        if let Some(worst) = worst {
            per_lag.push((lag, worst));
            if sub.is_none() && worst < Q::one() {
                sub = Some((lag, worst));
            }
        }
    }
    Ok(ExpConstants {
        super_lambda: super_lambda.expect("depth >= 1"),
        sub,
        per_lag,
    })
}

/// Largest number of scale-set members meeting one member, over the samples.
pub fn uniformly_finite_bound(
    family: &PartitionFamily,
    g: &WeightFunction,
    scale_samples: &[Surd],
) -> Result<usize, WeightError> {
    let mut bound = 0;
    for s in scale_samples {
        let lambda = scale_set(family, g, s)?;
        for w in &lambda.members {
            let count = scale_neighbors(family, g, s, w)?.len();
            bound = bound.max(count);
        }
    }
    Ok(bound)
}

/// A ratio tracked exactly through its square, with a float rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioValue {
    pub value: f64,
    /// Exact square of the ratio.
    pub square: Q,
}

impl RatioValue {
    fn from_surds(num: &Surd, den: &Surd) -> Self {
        let square = num.square() / den.square();
        RatioValue {
            value: q_to_f64(&square).sqrt(),
            square,
        }
    }

    fn one() -> Self {
        RatioValue {
            value: 1.0,
            square: Q::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GentleReport {
    /// Largest `h(w)/h(v)` over adjacent same-scale pairs, per sample
    /// (sorted by decreasing scale).
    pub trace: Vec<(Surd, RatioValue)>,
    pub constant: RatioValue,
    /// Set when the trace grows by at least the declared factor between all
    /// consecutive samples.
    pub unbounded: bool,
    pub growth_factor: f64,
}

/// Largest `h`-ratio across `g`-adjacent scale-set pairs over the samples.
pub fn gentle_constant(
    family: &PartitionFamily,
    g: &WeightFunction,
    h: &WeightFunction,
    scale_samples: &[Surd],
) -> Result<GentleReport, WeightError> {
    let growth_factor = 2.0;
    let mut samples = scale_samples.to_vec();
    samples.sort();
    samples.reverse();
    let mut trace = Vec::new();
    let mut overall = RatioValue::one();
    for s in &samples {
        let lambda = scale_set(family, g, s)?;
        let mut worst = RatioValue::one();
        for w in &lambda.members {
            let hw = h.eval(family, w)?;
            for v in scale_neighbors(family, g, s, w)? {
                let hv = h.eval(family, &v)?;
                let r = RatioValue::from_surds(&hw, &hv);
                if r.square > worst.square {
                    worst = r;
                }
            }
        }
        if worst.square > overall.square {
            overall = worst.clone();
        }
        trace.push((s.clone(), worst));
    }
    let unbounded = trace.len() >= 2
        && trace
            .windows(2)
            .all(|w| w[1].1.value >= growth_factor * w[0].1.value);
    Ok(GentleReport {
        trace,
        constant: overall,
        unbounded,
        growth_factor,
    })
}

/// Empirical distortion constants `c1 <= h/g <= c2` over the enumerated tree.
pub fn bilipschitz_constants(
    family: &PartitionFamily,
    g: &WeightFunction,
    h: &WeightFunction,
    depth: usize,
) -> Result<(RatioValue, RatioValue), WeightError> {
    let depth = depth.min(family.max_depth());
    let mut lo: Option<RatioValue> = None;
    let mut hi: Option<RatioValue> = None;
    for level in 0..=depth {
        for w in family.level_cells(level) {
            let r = RatioValue::from_surds(&h.eval(family, &w)?, &g.eval(family, &w)?);
            if lo.as_ref().map_or(true, |c| r.square < c.square) {
                lo = Some(r.clone());
            }
            if hi.as_ref().map_or(true, |c| r.square > c.square) {
                hi = Some(r);
            }
        }
    }
    Ok((lo.expect("nonempty tree"), hi.expect("nonempty tree")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessReport {
    /// Per-level maxima of the interior-witness depth.
    pub per_level_max: Vec<(usize, usize)>,
    pub bound: Option<usize>,
    /// Some cell exhausted the horizon without an interior witness.
    pub unbounded: bool,
    /// Address that exhausted the horizon, when `unbounded` is set.
    pub exhausted_at: Option<Address>,
    /// The per-level maxima kept strictly growing across the scanned levels.
    pub growing_trace: bool,
}

/// Interior-containment depth: for every cell up to `depth`, the least extra
/// depth of a descendant avoiding all of the cell's level peers.
pub fn thickness_th1_bound(
    family: &PartitionFamily,
    depth: usize,
) -> Result<ThicknessReport, PartitionError> {
    let depth = depth.min(family.max_depth());
    let mut per_level_max = Vec::new();
    let mut bound = 0usize;
    let mut unbounded = false;
    let mut exhausted_at = None;
    for level in 1..=depth {
        let mut level_max = 0usize;
        for w in family.level_cells(level) {
            match family.interior_witness_depth(&w) {
                Some(d) => {
                    level_max = level_max.max(d);
                    bound = bound.max(d);
                }
                None => {
                    unbounded = true;
                    if exhausted_at.is_none() {
                        exhausted_at = Some(w.clone());
                    }
                }
            }
        }
        per_level_max.push((level, level_max));
    }
    let growing_trace = per_level_max.len() >= 3
        && per_level_max
            .windows(2)
            .skip(per_level_max.len().saturating_sub(3))
            .all(|w| w[1].1 > w[0].1);
    Ok(ThicknessReport {
        per_level_max,
        bound: if unbounded { None } else { Some(bound) },
        unbounded,
        exhausted_at,
        growing_trace,
    })
}

/// Checks (G1), (G2) and the finite-depth decay of the level maxima.
pub fn validate_weight(
    family: &PartitionFamily,
    g: &WeightFunction,
    depth: usize,
) -> Result<bool, WeightError> {
    let depth = depth.min(family.max_depth());
    if g.eval(family, &Address::root())? != Surd::one() {
        return Ok(false);
    }
    let mut prev_max: Option<Surd> = None;
    for level in 0..=depth {
        let mut level_max = Surd::zero();
        for w in family.level_cells(level) {
            let v = g.eval(family, &w)?;
            if v.is_zero() {
                return Ok(false);
            }
            if !w.is_root() && v > g.eval(family, &w.parent())? {
                return Ok(false);
            }
            if v > level_max {
                level_max = v;
            }
        }
        if let Some(prev) = &prev_max {
            if level_max > *prev {
                return Ok(false);
            }
        }
        prev_max = Some(level_max);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::q;
    use crate::partition::HoleModel;

    fn addr1(labels: &[u8]) -> Address {
        Address::from_digits(&labels.iter().map(|d| d - 1).collect::<Vec<u8>>())
    }

    /// The product weight of the worked example: 1/9 on odd ring labels,
    /// 1/3 on even ones.
    fn mixed_weight() -> WeightFunction {
        let mut ratios = Vec::new();
        for label in 1..=8 {
            ratios.push(if label % 2 == 1 { q(1, 9) } else { q(1, 3) });
        }
        WeightFunction::Product {
            digit_ratios: ratios,
        }
    }

    #[test]
    fn geometric_scale_sets_are_levels() {
        let fam = PartitionFamily::sierpinski_carpet(4);
        let g = WeightFunction::geometric(q(1, 3));
        let lam = scale_set(&fam, &g, &Surd::rational(q(1, 9))).unwrap();
        assert_eq!(lam.members.len(), 64);
        assert!(lam.members.iter().all(|w| w.depth() == 2));
        // s >= 1 collapses to the root.
        let root = scale_set(&fam, &g, &Surd::rational(q(1, 1))).unwrap();
        assert_eq!(root.members, vec![Address::root()]);
    }

    #[test]
    fn mixed_weight_scale_sets() {
        let fam = PartitionFamily::sierpinski_carpet(4);
        let g = mixed_weight();
        let lam = scale_set(&fam, &g, &Surd::rational(q(1, 3))).unwrap();
        assert_eq!(lam.members.len(), 8);
        assert!(lam.members.iter().all(|w| w.depth() == 1));

        let lam = scale_set(&fam, &g, &Surd::rational(q(1, 9))).unwrap();
        // Odd-labelled vertices stay at depth 1; even-labelled ones split.
        let depth1: Vec<&Address> = lam.members.iter().filter(|w| w.depth() == 1).collect();
        let depth2: Vec<&Address> = lam.members.iter().filter(|w| w.depth() == 2).collect();
        assert_eq!(depth1.len(), 4);
        assert_eq!(depth2.len(), 4 * 8);
        assert!(depth1.contains(&&addr1(&[1])));
        assert!(depth1.contains(&&addr1(&[7])));
        for w in depth2 {
            assert!(w.digits()[0] % 2 == 1, "even ring label splits");
        }
    }

    #[test]
    fn scale_set_members_are_prefix_free_and_cover() {
        let fam = PartitionFamily::sierpinski_carpet(5);
        let g = mixed_weight();
        for s in [q(1, 3), q(1, 9), q(1, 27), q(1, 81)] {
            let lam = scale_set(&fam, &g, &Surd::rational(s)).unwrap();
            for a in &lam.members {
                for b in &lam.members {
                    if a != b {
                        assert!(!a.is_prefix_of(b));
                    }
                }
            }
            // Covering: every deepest-level cell has an ancestor in the set.
            for w in fam.level_cells(4) {
                let covered = lam
                    .members
                    .iter()
                    .any(|m| m.is_prefix_of(&w) || w.is_prefix_of(m));
                assert!(covered);
            }
        }
    }

    #[test]
    fn scale_set_depth_exceeded() {
        let fam = PartitionFamily::sierpinski_carpet(3);
        let g = WeightFunction::geometric(q(1, 3));
        assert!(matches!(
            scale_set(&fam, &g, &Surd::rational(q(1, 100))),
            Err(WeightError::DepthExceeded(_))
        ));
    }

    #[test]
    fn exp_constants_geometric_and_mixed() {
        let fam = PartitionFamily::sierpinski_carpet(4);
        let g = WeightFunction::geometric(q(1, 3));
        let c = exp_constants(&fam, &g, 3).unwrap();
        assert_eq!(c.super_lambda, q(1, 3));
        assert_eq!(c.sub, Some((1, q(1, 3))));

        let c = exp_constants(&fam, &mixed_weight(), 3).unwrap();
        assert_eq!(c.super_lambda, q(1, 9));
        assert_eq!(c.sub, Some((1, q(1, 3))));
    }

    #[test]
    fn exp_constants_flat_branch_has_no_sub_flag() {
        let fam = PartitionFamily::interval_binary(4);
        let mut values = BTreeMap::new();
        values.insert(Address::root(), q(1, 1));
        // One branch keeps the value 1 to the horizon; the other decays.
        values.insert(Address::from_digits(&[0]), q(1, 1));
        values.insert(Address::from_digits(&[1]), q(1, 2));
        values.insert(Address::from_digits(&[1, 0]), q(1, 4));
        values.insert(Address::from_digits(&[1, 1]), q(1, 4));
        let g = WeightFunction::Table { values };
        let c = exp_constants(&fam, &g, 3).unwrap();
        assert_eq!(c.sub, None);
    }

    #[test]
    fn uniform_finiteness_bounds() {
        let carpet = PartitionFamily::sierpinski_carpet(5);
        let g = WeightFunction::geometric(q(1, 3));
        let samples: Vec<Surd> = (1..=4).map(|k| Surd::rational(q(1, 3_i128.pow(k)))).collect();
        // Every 3x3 block of carpet cells contains a removed square, so a
        // cell meets at most 7 peers besides itself.
        assert_eq!(uniformly_finite_bound(&carpet, &g, &samples).unwrap(), 8);

        let interval = PartitionFamily::interval_binary(5);
        let h = WeightFunction::geometric(q(1, 2));
        let samples: Vec<Surd> = (1..=4).map(|k| Surd::rational(q(1, 2_i128.pow(k)))).collect();
        assert_eq!(uniformly_finite_bound(&interval, &h, &samples).unwrap(), 3);

        let cantor = PartitionFamily::cantor_ternary(5);
        let g3 = WeightFunction::geometric(q(1, 3));
        let samples: Vec<Surd> = (1..=3).map(|k| Surd::rational(q(1, 3_i128.pow(k)))).collect();
        assert_eq!(uniformly_finite_bound(&cantor, &g3, &samples).unwrap(), 1);
    }

    #[test]
    fn gentle_reflexive_and_mixed() {
        let fam = PartitionFamily::sierpinski_carpet(5);
        let g = WeightFunction::geometric(q(1, 3));
        let samples: Vec<Surd> = (1..=4).map(|k| Surd::rational(q(1, 3_i128.pow(k)))).collect();
        let rep = gentle_constant(&fam, &g, &g, &samples).unwrap();
        assert_eq!(rep.constant.square, q(1, 1));
        assert!(!rep.unbounded);

        // Mixed product weight against the level weight: bounded constant,
        // and never exceeding the reciprocal super-exponential constant of
        // the mixed weight (1/lambda = 9).
        let h = mixed_weight();
        let rep = gentle_constant(&fam, &g, &h, &samples).unwrap();
        assert!(rep.constant.square <= q(81, 1));
        assert!(!rep.unbounded);
        let lam = exp_constants(&fam, &h, 4).unwrap().super_lambda;
        let recip = Q::one() / lam;
        // Gentleness of a weight against itself is controlled by 1/lambda.
        let rep_self = gentle_constant(&fam, &h, &h, &samples).unwrap();
        assert!(rep_self.constant.square <= recip * recip);
    }

    #[test]
    fn gentle_unbounded_for_superfast_decay() {
        // Against the mixed weight the scale sets mix levels, and a weight
        // decaying like 2^(-depth^2) has unbounded ratios across them.
        let fam = PartitionFamily::sierpinski_carpet(6);
        let g = mixed_weight();
        let values: Vec<Q> = (0..=6usize).map(|m| q(1, 1_i128 << (m * m).min(100))).collect();
        let h = WeightFunction::LevelTable { values };
        let samples: Vec<Surd> = (1..=3).map(|k| Surd::rational(q(1, 9_i128.pow(k)))).collect();
        let rep = gentle_constant(&fam, &g, &h, &samples).unwrap();
        assert!(rep.unbounded, "trace {:?}", rep.trace);
    }

    #[test]
    fn bilipschitz_diameter_weight() {
        let fam = PartitionFamily::sierpinski_carpet(5);
        let g = WeightFunction::geometric(q(1, 3));
        let h = WeightFunction::MetricDiam { normalized: false };
        let (lo, hi) = bilipschitz_constants(&fam, &g, &h, 5).unwrap();
        // Diameter of a side-1/3^m square cell is sqrt(2)/3^m.
        assert_eq!(lo.square, q(2, 1));
        assert_eq!(hi.square, q(2, 1));
        let hn = WeightFunction::MetricDiam { normalized: true };
        let (lo, hi) = bilipschitz_constants(&fam, &g, &hn, 4).unwrap();
        assert_eq!(lo.square, q(1, 1));
        assert_eq!(hi.square, q(1, 1));
    }

    #[test]
    fn bilipschitz_identity() {
        let fam = PartitionFamily::interval_binary(5);
        let g = WeightFunction::geometric(q(1, 2));
        let (lo, hi) = bilipschitz_constants(&fam, &g, &g, 5).unwrap();
        assert_eq!((lo.square, hi.square), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn thickness_bounds() {
        // Carpet: side-facing cells admit depth-1 witnesses, but cells whose
        // only missing neighbor is diagonal need depth 2.
        let carpet = PartitionFamily::sierpinski_carpet(5);
        let rep = thickness_th1_bound(&carpet, 3).unwrap();
        assert_eq!(rep.bound, Some(2));
        assert!(!rep.unbounded);

        // Full square: the central child is already interior to its parent.
        let square = PartitionFamily::square_full(4);
        let rep = thickness_th1_bound(&square, 2).unwrap();
        assert_eq!(rep.bound, Some(1));

        // Shrinking frames: the frame cells hug the boundary ever tighter,
        // and the witness depth is exhausted within the horizon.
        let frames = PartitionFamily::square_with_holes(HoleModel::ShrinkingFrames, 6).unwrap();
        let rep = thickness_th1_bound(&frames, 3).unwrap();
        assert!(rep.unbounded);
        assert!(rep.exhausted_at.is_some());
    }

    #[test]
    fn scale_set_symmetry_for_symmetric_product_weights() {
        // A digit-symmetric product weight yields scale sets invariant under
        // the square's symmetries (rotation by one ring step maps the set to
        // itself after digit rotation).
        let fam = PartitionFamily::sierpinski_carpet(4);
        let g = mixed_weight();
        let lam = scale_set(&fam, &g, &Surd::rational(q(1, 27))).unwrap();
        let rotate = |w: &Address| {
            Address::from_digits(
                &w.digits()
                    .iter()
                    .map(|d| (d + 2) % 8)
                    .collect::<Vec<u8>>(),
            )
        };
        let mut rotated: Vec<Address> = lam.members.iter().map(rotate).collect();
        rotated.sort();
        assert_eq!(rotated, lam.members);
    }

    #[test]
    fn weight_validation() {
        let fam = PartitionFamily::sierpinski_carpet(3);
        assert!(validate_weight(&fam, &WeightFunction::geometric(q(1, 3)), 3).unwrap());
        assert!(validate_weight(&fam, &mixed_weight(), 3).unwrap());
        let bad = WeightFunction::geometric(q(3, 2));
        assert!(!validate_weight(&fam, &bad, 3).unwrap());
    }
}
