//! Concrete cell families on the unit square / interval.
//!
//! Cells are indexed by tree addresses. For the grid families every address
//! maps to an ambient dyadic or triadic square `Q_w`; the space is the unit
//! square minus a family-specific collection of removed open rectangles, and
//! the cell is the part of the space reachable through valid descendants of
//! `w`. All predicates (intersection, membership, minimality witnesses) are
//! decided by exact rational descent truncated at the family horizon
//! `max_depth`; cells deeper than the horizon never influence a verdict on
//! objects that live on the coarser grids, while free-coordinate point
//! queries are answered at horizon resolution.
//!
//! Digit conventions: the 8- and 9-cell square families number children
//! counterclockwise around the boundary starting at the lower-left cell;
//! the center cell of the 9-grid is the last digit (8). The ternary family
//! maps digit 0 to the left third and digit 1 to the right third.

use crate::geom::{q, q0, q1, Hole, Point, Q, Rect, Region};
use crate::tree::{Address, TreeShape};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("address {0} is not a vertex of the family tree")]
    InvalidAddress(Address),
    #[error("point lies outside the space")]
    PointOutsideSpace,
    #[error("depth {depth} exceeds the family horizon {max_depth}")]
    DepthExceeded { depth: usize, max_depth: usize },
    #[error("operation not supported for this family kind")]
    UnsupportedFamily,
    #[error("removed rectangles violate the separation requirements: {0}")]
    InvalidHoles(String),
}

/// Exact geometry of one cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellGeometry {
    /// Closed rectangle union (grid families), at the cell's own resolution.
    Rects(Region),
    /// Finite point set (cube families over a point cloud).
    Points(Vec<Point>),
}

impl CellGeometry {
    pub fn as_region(&self) -> Option<&Region> {
        match self {
            CellGeometry::Rects(r) => Some(r),
            CellGeometry::Points(_) => None,
        }
    }
}

/// Built-in removed-rectangle generators for the square-with-holes kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HoleModel {
    /// Vertical middle-third strips at every scale; the space degenerates to
    /// a Cantor set of vertical segments.
    StripColumns,
    /// Central squares of almost full size placed along even generations of
    /// the corner cells; the space keeps thin frames around them.
    ShrinkingFrames,
    /// Full-height strips of width `2/9^j` centered at `1/3^j`.
    PinchedColumns,
    /// One removed grid square per generation, nested toward the diagonal.
    CornerChain,
    /// An explicit finite list of removed rectangles.
    Explicit(Vec<(String, String, String, String)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    IntervalBinary,
    CantorTernary,
    SquareFull,
    SierpinskiCarpet,
    SquareWithHoles(HoleModel),
    DyadicCubes,
    Custom,
}

/// Offsets of the children in the base-b grid, per digit.
fn digit_positions(kind: &FamilyKind) -> Vec<(i128, i128)> {
    // Ring order: lower-left, lower-mid, lower-right, mid-right, upper-right,
    // upper-mid, upper-left, mid-left, then center for the full 9-grid.
    let ring = [
        (0, 0),
        (1, 0),
        (2, 0),
        (2, 1),
        (2, 2),
        (1, 2),
        (0, 2),
        (0, 1),
    ];
    match kind {
        FamilyKind::IntervalBinary => vec![(0, 0), (1, 0)],
        FamilyKind::CantorTernary => vec![(0, 0), (2, 0)],
        FamilyKind::SierpinskiCarpet => ring.to_vec(),
        FamilyKind::SquareFull | FamilyKind::SquareWithHoles(_) => {
            let mut v = ring.to_vec();
            v.push((1, 1));
            v
        }
        _ => Vec::new(),
    }
}

fn grid_base(kind: &FamilyKind) -> i128 {
    match kind {
        FamilyKind::IntervalBinary => 2,
        _ => 3,
    }
}

fn grid_dim(kind: &FamilyKind) -> usize {
    match kind {
        FamilyKind::IntervalBinary | FamilyKind::CantorTernary => 1,
        _ => 2,
    }
}

/// Explicit per-address geometry for hand-built families.
#[derive(Debug, Clone, Default)]
pub struct CustomTable {
    /// Geometry per address; present keys define the tree.
    pub cells: BTreeMap<Address, Region>,
    /// Ambient branching (digit range) per address depth.
    pub branching: u8,
    pub max_depth: usize,
}

#[derive(Clone)]
pub struct PartitionFamily {
    kind: FamilyKind,
    max_depth: usize,
    /// Precomputed removed rectangles for the hole-model kinds, sorted by
    /// birth level. The interiors are pairwise disjoint.
    holes: Arc<Vec<(usize, Hole)>>,
    /// Point cloud for the cube kind (coordinates in [0,1]^dim).
    cloud: Arc<Vec<Vec<Q>>>,
    cloud_dim: usize,
    custom: Arc<CustomTable>,
}

impl std::fmt::Debug for PartitionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartitionFamily")
            .field("kind", &self.kind)
            .field("max_depth", &self.max_depth)
            .finish()
    }
}

/// Report of the per-cell interior test.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub all_minimal: bool,
    pub violating: Vec<Address>,
    pub depth: usize,
}

/// A point together with all of its addresses per level.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRef {
    pub coordinates: Point,
    /// addresses_per_level[m] lists the level-m cells containing the point.
    pub addresses_per_level: Vec<Vec<Address>>,
}

impl PointRef {
    pub fn depth(&self) -> usize {
        self.addresses_per_level.len().saturating_sub(1)
    }

    pub fn cells_at(&self, level: usize) -> &[Address] {
        &self.addresses_per_level[level]
    }

    pub fn all_cells(&self) -> impl Iterator<Item = &Address> {
        self.addresses_per_level.iter().flatten()
    }
}

impl PartitionFamily {
    pub fn interval_binary(max_depth: usize) -> Self {
        assert!(max_depth <= 24, "depth cap for exact binary arithmetic");
        Self::grid(FamilyKind::IntervalBinary, max_depth, Vec::new())
    }

    pub fn cantor_ternary(max_depth: usize) -> Self {
        assert!(max_depth <= 14, "depth cap for exact ternary arithmetic");
        let mut holes = Vec::new();
        // Middle third of every surviving interval, generated level by level.
        let mut cells: Vec<(Q, Q)> = vec![(q0(), q1())];
        for level in 0..max_depth {
            let mut next = Vec::new();
            for (a, b) in &cells {
                let third = (*b - *a) / Q::from_integer(3);
                holes.push((
                    level + 1,
                    Hole::new(Rect::new(*a + third, *b - third, q0(), q0())),
                ));
                next.push((*a, *a + third));
                next.push((*b - third, *b));
            }
            cells = next;
        }
        Self::grid(FamilyKind::CantorTernary, max_depth, holes)
    }

    pub fn square_full(max_depth: usize) -> Self {
        assert!(max_depth <= 10, "depth cap for exact ternary arithmetic");
        Self::grid(FamilyKind::SquareFull, max_depth, Vec::new())
    }

    pub fn sierpinski_carpet(max_depth: usize) -> Self {
        assert!(max_depth <= 10, "depth cap for exact ternary arithmetic");
        // Center holes are located by descent, not enumerated.
        Self::grid(FamilyKind::SierpinskiCarpet, max_depth, Vec::new())
    }

    pub fn square_with_holes(model: HoleModel, max_depth: usize) -> Result<Self, PartitionError> {
        assert!(max_depth <= 8, "depth cap for exact arithmetic on hole corners");
        let holes = generate_holes(&model, max_depth)?;
        validate_holes(&holes)?;
        Ok(Self::grid(
            FamilyKind::SquareWithHoles(model),
            max_depth,
            holes,
        ))
    }

    pub fn dyadic_cubes(cloud: Vec<Vec<Q>>, dim: usize, max_depth: usize) -> Self {
        assert!((1..=3).contains(&dim));
        assert!(max_depth <= 20);
        assert!(cloud.iter().all(|p| p.len() == dim));
        PartitionFamily {
            kind: FamilyKind::DyadicCubes,
            max_depth,
            holes: Arc::new(Vec::new()),
            cloud: Arc::new(cloud),
            cloud_dim: dim,
            custom: Arc::new(CustomTable::default()),
        }
    }

    pub fn custom(table: CustomTable) -> Self {
        let max_depth = table.max_depth;
        PartitionFamily {
            kind: FamilyKind::Custom,
            max_depth,
            holes: Arc::new(Vec::new()),
            cloud: Arc::new(Vec::new()),
            cloud_dim: 0,
            custom: Arc::new(table),
        }
    }

    fn grid(kind: FamilyKind, max_depth: usize, mut holes: Vec<(usize, Hole)>) -> Self {
        holes.sort_by_key(|(b, _)| *b);
        PartitionFamily {
            kind,
            max_depth,
            holes: Arc::new(holes),
            cloud: Arc::new(Vec::new()),
            cloud_dim: 0,
            custom: Arc::new(CustomTable::default()),
        }
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Contraction ratio of one subdivision step (side ratio of child cells).
    pub fn scale_ratio(&self) -> Q {
        Q::new(1, grid_base(&self.kind))
    }

    pub fn tree(&self) -> TreeShape {
        match &self.kind {
            FamilyKind::DyadicCubes => {
                TreeShape::uniform(1u8 << self.cloud_dim, self.max_depth)
            }
            FamilyKind::Custom => TreeShape::uniform(self.custom.branching, self.max_depth),
            k => {
                let b = digit_positions(k).len() as u8;
                TreeShape::uniform(b, self.max_depth)
            }
        }
    }

    /// Ambient rectangle of the grid cell at `w` (before hole removal).
    pub fn ambient_rect(&self, w: &Address) -> Option<Rect> {
        let positions = digit_positions(&self.kind);
        if positions.is_empty() {
            return None;
        }
        let base = grid_base(&self.kind);
        let mut col: i128 = 0;
        let mut row: i128 = 0;
        for &d in w.digits() {
            let (dc, dr) = *positions.get(d as usize)?;
            col = col * base + dc;
            row = row * base + dr;
        }
        let den = base.checked_pow(w.depth() as u32)?;
        let (y0, y1) = if grid_dim(&self.kind) == 1 {
            (q0(), q0())
        } else {
            (q(row, den), q(row + 1, den))
        };
        Some(Rect::new(q(col, den), q(col + 1, den), y0, y1))
    }

    /// Does a removed rectangle swallow `r` (interior containment)?
    fn hole_swallows(&self, r: &Rect) -> bool {
        match &self.kind {
            FamilyKind::SierpinskiCarpet => self.center_hole_swallows(r, 3),
            FamilyKind::CantorTernary | FamilyKind::SquareWithHoles(_) => self
                .holes
                .iter()
                .any(|(_, h)| h.interior_contains_rect(r)),
            _ => false,
        }
    }

    /// Walks the triadic grid towards `r`; at each surviving cell checks the
    /// cell's central hole. Holes deeper than the horizon cannot swallow any
    /// object that lives on a grid at or above the horizon.
    fn center_hole_swallows(&self, r: &Rect, base: i128) -> bool {
        let mut cell = Rect::unit();
        for _level in 0..self.max_depth {
            let third = cell.width() / Q::from_integer(base);
            let hole = Hole::new(Rect::new(
                cell.x0 + third,
                cell.x1 - third,
                cell.y0 + third,
                cell.y1 - third,
            ));
            if hole.interior_contains_rect(r) {
                return true;
            }
            // Descend into the unique child grid cell containing r, if any.
            let mut found = None;
            'outer: for i in 0..base {
                for j in 0..base {
                    let c = Rect::new(
                        cell.x0 + third * Q::from_integer(i),
                        cell.x0 + third * Q::from_integer(i + 1),
                        cell.y0 + third * Q::from_integer(j),
                        cell.y0 + third * Q::from_integer(j + 1),
                    );
                    if c.contains_rect(r) {
                        found = Some(c);
                        break 'outer;
                    }
                }
            }
            match found {
                Some(c) => cell = c,
                None => return false,
            }
        }
        false
    }

    /// Tree membership: the ambient digits are valid and no removed
    /// rectangle contains the whole cell.
    pub fn is_in_tree(&self, w: &Address) -> bool {
        match &self.kind {
            FamilyKind::DyadicCubes => {
                w.depth() <= self.max_depth && self.cube_points(w).next().is_some()
            }
            FamilyKind::Custom => self.custom.cells.contains_key(w),
            _ => {
                if w.depth() > self.max_depth {
                    return false;
                }
                let positions = digit_positions(&self.kind);
                if w.digits().iter().any(|&d| d as usize >= positions.len()) {
                    return false;
                }
                let r = self.ambient_rect(w).expect("grid kind");
                match &self.kind {
                    FamilyKind::SquareWithHoles(_) => {
                        !self.holes.iter().any(|(_, h)| h.rect.contains_rect(&r))
                    }
                    _ => true,
                }
            }
        }
    }

    /// Ambient digit range of every vertex.
    pub fn ambient_branching(&self) -> u8 {
        match &self.kind {
            FamilyKind::DyadicCubes => 1u8 << self.cloud_dim,
            FamilyKind::Custom => self.custom.branching,
            k => digit_positions(k).len() as u8,
        }
    }

    pub fn valid_children(&self, w: &Address) -> Result<Vec<Address>, PartitionError> {
        if w.depth() >= self.max_depth {
            return Err(PartitionError::DepthExceeded {
                depth: w.depth(),
                max_depth: self.max_depth,
            });
        }
        if !self.is_in_tree(w) {
            return Err(PartitionError::InvalidAddress(w.clone()));
        }
        let b = self.ambient_branching();
        Ok((0..b).map(|d| w.child(d)).filter(|c| self.is_in_tree(c)).collect())
    }

    /// Valid cells at `w`'s level whose ambient rectangles touch `Q_w`,
    /// found by touch-pruned descent from the root (`w` itself excluded).
    pub fn ambient_neighbors(&self, w: &Address) -> Vec<Address> {
        let target = match self.ambient_rect(w) {
            Some(r) => r,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        let mut frontier = vec![Address::root()];
        for _ in 0..w.depth() {
            let mut next = Vec::new();
            for u in frontier {
                for c in self.valid_children(&u).unwrap_or_default() {
                    let rc = self.ambient_rect(&c).expect("grid kind");
                    if rc.touches(&target) {
                        next.push(c);
                    }
                }
            }
            frontier = next;
        }
        for u in frontier {
            if &u != w {
                out.push(u);
            }
        }
        out.sort();
        out
    }

    /// All valid addresses at a level.
    pub fn level_cells(&self, level: usize) -> Vec<Address> {
        let mut out = vec![Address::root()];
        for _ in 0..level {
            let mut next = Vec::new();
            for w in &out {
                if let Ok(children) = self.valid_children(w) {
                    next.extend(children);
                }
            }
            out = next;
        }
        out
    }

    fn cube_points<'a>(&'a self, w: &Address) -> impl Iterator<Item = &'a Vec<Q>> + 'a {
        let m = w.depth() as u32;
        let mut lo = Vec::with_capacity(self.cloud_dim);
        let mut hi = Vec::with_capacity(self.cloud_dim);
        let den = 1_i128 << m.min(120);
        let mut idx = vec![0_i128; self.cloud_dim];
        for &d in w.digits() {
            for axis in 0..self.cloud_dim {
                idx[axis] = idx[axis] * 2 + ((d >> axis) & 1) as i128;
            }
        }
        for axis in 0..self.cloud_dim {
            lo.push(q(idx[axis], den));
            hi.push(q(idx[axis] + 1, den));
        }
        self.cloud.iter().filter(move |p| {
            p.iter()
                .zip(lo.iter().zip(hi.iter()))
                .all(|(c, (l, h))| l <= c && c <= h)
        })
    }

    /// Exact cell geometry at the cell's own resolution.
    pub fn cell(&self, w: &Address) -> Result<CellGeometry, PartitionError> {
        if !self.is_in_tree(w) {
            return Err(PartitionError::InvalidAddress(w.clone()));
        }
        match &self.kind {
            FamilyKind::DyadicCubes => Ok(CellGeometry::Points({
                let mut pts: Vec<Point> = self
                    .cube_points(w)
                    .map(|p| Point::new(p[0], if self.cloud_dim > 1 { p[1] } else { q0() }))
                    .collect();
                pts.sort();
                pts
            })),
            FamilyKind::Custom => Ok(CellGeometry::Rects(
                self.custom.cells.get(w).cloned().expect("validated above"),
            )),
            _ => {
                // The carpet's removed squares are located by descent and
                // never meet a valid cell at its own resolution, so only the
                // enumerated hole lists are subtracted here.
                let base = self.ambient_rect(w).expect("grid kind");
                let mut pieces = vec![base];
                for (birth, h) in self.holes.iter() {
                    if *birth <= w.depth() {
                        pieces = subtract_hole(&pieces, h);
                    }
                }
                Ok(CellGeometry::Rects(Region::new(pieces)))
            }
        }
    }

    /// Does the truncated cell at `w` survive all the way to the horizon
    /// while staying inside `probe`? Used for point membership.
    fn point_alive(&self, w: &Address, p: &Point) -> bool {
        let r = match self.ambient_rect(w) {
            Some(r) => r,
            None => return false,
        };
        if !r.contains_point(p) {
            return false;
        }
        if w.depth() >= self.max_depth {
            return true;
        }
        match self.valid_children(w) {
            Ok(children) => children.iter().any(|c| self.point_alive(c, p)),
            Err(_) => false,
        }
    }

    /// Exact intersection predicate between two cells (levels may differ).
    pub fn intersects(&self, a: &Address, b: &Address) -> Result<bool, PartitionError> {
        if !self.is_in_tree(a) {
            return Err(PartitionError::InvalidAddress(a.clone()));
        }
        if !self.is_in_tree(b) {
            return Err(PartitionError::InvalidAddress(b.clone()));
        }
        match &self.kind {
            FamilyKind::DyadicCubes => {
                let in_both = self.cube_points(a).any(|p| {
                    let pb: Vec<&Vec<Q>> = self.cube_points(b).collect();
                    pb.iter().any(|pp| *pp == p)
                });
                Ok(in_both)
            }
            FamilyKind::Custom => {
                let ra = self.custom.cells.get(a).unwrap();
                let rb = self.custom.cells.get(b).unwrap();
                Ok(ra.intersects_region(rb))
            }
            _ => Ok(self.pair_alive(a, b)),
        }
    }

    /// Descent predicate: some pair of valid descendants keeps touching down
    /// to the horizon. Nested pairs touch trivially.
    fn pair_alive(&self, a: &Address, b: &Address) -> bool {
        if a.is_prefix_of(b) || b.is_prefix_of(a) {
            return true;
        }
        let ra = self.ambient_rect(a).expect("grid kind");
        let rb = self.ambient_rect(b).expect("grid kind");
        let interface = match ra.intersect(&rb) {
            Some(i) => i,
            None => return false,
        };
        if self.hole_swallows(&interface) {
            return false;
        }
        // Descend the shallower side (or the first at equal depths).
        let (shallow, other) = if a.depth() <= b.depth() { (a, b) } else { (b, a) };
        if shallow.depth() >= self.max_depth {
            return true;
        }
        match self.valid_children(shallow) {
            Ok(children) => children.iter().any(|c| {
                let rc = self.ambient_rect(c).expect("grid kind");
                let ro = self.ambient_rect(other).expect("grid kind");
                rc.touches(&ro) && self.pair_alive(c, other)
            }),
            Err(_) => false,
        }
    }

    /// Dimension of the set the two cells share: None when disjoint, else
    /// 0 (point) or 1 (segment). Only meaningful for equal-level grid cells.
    pub fn shared_face_dim(&self, a: &Address, b: &Address) -> Result<Option<u8>, PartitionError> {
        if !self.intersects(a, b)? {
            return Ok(None);
        }
        let ra = self.ambient_rect(a).ok_or(PartitionError::UnsupportedFamily)?;
        let rb = self.ambient_rect(b).ok_or(PartitionError::UnsupportedFamily)?;
        Ok(ra.intersect(&rb).map(|i| i.dim()))
    }

    /// All addresses whose cell contains `x`, per level up to `depth`.
    pub fn point_addresses(&self, x: &Point, depth: usize) -> Result<PointRef, PartitionError> {
        if depth > self.max_depth {
            return Err(PartitionError::DepthExceeded {
                depth,
                max_depth: self.max_depth,
            });
        }
        match &self.kind {
            FamilyKind::DyadicCubes => {
                let coords: Vec<Q> = vec![x.x, x.y][..self.cloud_dim].to_vec();
                if !self.cloud.iter().any(|p| *p == coords) {
                    return Err(PartitionError::PointOutsideSpace);
                }
                let mut per_level = vec![vec![Address::root()]];
                for level in 1..=depth {
                    let mut cells = Vec::new();
                    for w in &per_level[level - 1] {
                        for c in self.valid_children(w).unwrap_or_default() {
                            if self.cube_points(&c).any(|p| *p == coords) {
                                cells.push(c);
                            }
                        }
                    }
                    cells.sort();
                    cells.dedup();
                    per_level.push(cells);
                }
                Ok(PointRef {
                    coordinates: x.clone(),
                    addresses_per_level: per_level,
                })
            }
            FamilyKind::Custom => {
                let mut per_level = Vec::new();
                for level in 0..=depth {
                    let cells: Vec<Address> = self
                        .level_cells(level)
                        .into_iter()
                        .filter(|w| self.custom.cells.get(w).map_or(false, |r| r.contains_point(x)))
                        .collect();
                    per_level.push(cells);
                }
                if per_level[0].is_empty() {
                    return Err(PartitionError::PointOutsideSpace);
                }
                Ok(PointRef {
                    coordinates: x.clone(),
                    addresses_per_level: per_level,
                })
            }
            _ => {
                if !self.point_alive(&Address::root(), x) {
                    return Err(PartitionError::PointOutsideSpace);
                }
                let mut per_level = vec![vec![Address::root()]];
                for level in 1..=depth {
                    let mut cells = Vec::new();
                    for w in &per_level[level - 1] {
                        if w.depth() >= self.max_depth {
                            continue;
                        }
                        for c in self.valid_children(w).unwrap_or_default() {
                            if self.point_alive(&c, x) {
                                cells.push(c);
                            }
                        }
                    }
                    cells.sort();
                    cells.dedup();
                    per_level.push(cells);
                }
                Ok(PointRef {
                    coordinates: x.clone(),
                    addresses_per_level: per_level,
                })
            }
        }
    }

    /// Looks for a descendant of `w` whose cell avoids every other cell at
    /// `w`'s level; returns the smallest relative depth of such a witness.
    pub fn interior_witness_depth(&self, w: &Address) -> Option<usize> {
        // Only ambient-touching cells can meet a descendant of w.
        let others = self.ambient_neighbors(w);
        let mut frontier = vec![w.clone()];
        for rel in 0..=(self.max_depth - w.depth()) {
            for v in &frontier {
                let clear = others
                    .iter()
                    .all(|u| !self.intersects(v, u).unwrap_or(true));
                if clear {
                    return Some(rel);
                }
            }
            let mut next = Vec::new();
            for v in &frontier {
                if v.depth() < self.max_depth {
                    next.extend(self.valid_children(v).unwrap_or_default());
                }
            }
            if next.is_empty() {
                return None;
            }
            frontier = next;
        }
        None
    }

    /// A point of the space strictly inside the ambient square of `w`.
    ///
    /// Such a point avoids every level peer of `w` (peers only reach the
    /// boundary), so it certifies `O_w != empty` even when cell witnesses
    /// would need depth beyond the horizon. Candidates are the corners of
    /// valid descendants one and two levels down.
    pub fn interior_point_witness(&self, w: &Address) -> Option<Point> {
        let rw = self.ambient_rect(w)?;
        let strictly_inside = |p: &Point| {
            let x_ok = rw.x0 < p.x && p.x < rw.x1;
            let y_ok = (rw.y0 == rw.y1 && p.y == rw.y0) || (rw.y0 < p.y && p.y < rw.y1);
            x_ok && y_ok
        };
        let mut frontier = vec![w.clone()];
        for _ in 0..2 {
            if frontier.is_empty() || frontier[0].depth() >= self.max_depth {
                break;
            }
            let mut next = Vec::new();
            for v in &frontier {
                next.extend(self.valid_children(v).unwrap_or_default());
            }
            for v in &next {
                let rv = self.ambient_rect(v).expect("grid kind");
                for c in rv.corners() {
                    if strictly_inside(&c) && self.point_alive(&Address::root(), &c) {
                        return Some(c);
                    }
                }
            }
            frontier = next;
        }
        None
    }

    /// Decides `O_w != empty` for every cell up to `depth`.
    ///
    /// Grid families certify through interior points of the refinement, so
    /// `depth` must stay below the horizon.
    pub fn minimality_check(&self, depth: usize) -> Result<MinimalityReport, PartitionError> {
        let needs_headroom = !matches!(self.kind, FamilyKind::Custom | FamilyKind::DyadicCubes);
        if depth > self.max_depth || (needs_headroom && depth >= self.max_depth) {
            return Err(PartitionError::DepthExceeded {
                depth,
                max_depth: self.max_depth,
            });
        }
        let mut violating = Vec::new();
        for level in 0..=depth {
            let cells = self.level_cells(level);
            for w in &cells {
                let minimal = match &self.kind {
                    FamilyKind::Custom => {
                        let kw = self.custom.cells.get(w).unwrap();
                        let others = Region::new(
                            cells
                                .iter()
                                .filter(|u| *u != w)
                                .flat_map(|u| self.custom.cells.get(u).unwrap().rects.clone())
                                .collect(),
                        );
                        kw.difference_nonempty(&others)
                    }
                    FamilyKind::DyadicCubes => {
                        let mine: Vec<Vec<Q>> = self.cube_points(w).cloned().collect();
                        mine.iter().any(|p| {
                            cells
                                .iter()
                                .filter(|u| *u != w)
                                .all(|u| !self.cube_points(u).any(|pp| pp == p))
                        })
                    }
                    _ => self.interior_point_witness(w).is_some(),
                };
                if !minimal {
                    violating.push(w.clone());
                }
            }
        }
        Ok(MinimalityReport {
            all_minimal: violating.is_empty(),
            violating,
            depth,
        })
    }

    /// Iterative pruning of cells covered by their level peers, shallowest
    /// first; ancestors' geometry is rebuilt from surviving children.
    pub fn minimize(&self, depth: usize) -> Result<PartitionFamily, PartitionError> {
        match &self.kind {
            FamilyKind::Custom => {
                let mut table = (*self.custom).clone();
                loop {
                    let fam = PartitionFamily::custom(table.clone());
                    let report = fam.minimality_check(depth)?;
                    let victim = match report.violating.first() {
                        None => break,
                        Some(v) => v.clone(),
                    };
                    if victim.is_root() {
                        break; // the root is never pruned
                    }
                    table.cells.retain(|w, _| !victim.is_prefix_of(w));
                    // Rebuild ancestors bottom-up from surviving children.
                    for level in (0..table.max_depth).rev() {
                        let keys: Vec<Address> = table
                            .cells
                            .keys()
                            .filter(|w| w.depth() == level)
                            .cloned()
                            .collect();
                        for w in keys {
                            let child_rects: Vec<Rect> = table
                                .cells
                                .iter()
                                .filter(|(u, _)| u.depth() == level + 1 && w.is_prefix_of(u))
                                .flat_map(|(_, r)| r.rects.clone())
                                .collect();
                            if !child_rects.is_empty() {
                                table.cells.insert(w, Region::new(child_rects));
                            }
                        }
                    }
                }
                Ok(PartitionFamily::custom(table))
            }
            // Cube families over a point cloud may carry covered cubes;
            // pruning runs on the explicit point-set table.
            FamilyKind::DyadicCubes => {
                if self.cloud_dim > 2 {
                    return Err(PartitionError::UnsupportedFamily);
                }
                let mut cells = BTreeMap::new();
                let mut frontier = vec![Address::root()];
                for _ in 0..=self.max_depth {
                    let mut next = Vec::new();
                    for w in &frontier {
                        let pts: Vec<Rect> = self
                            .cube_points(w)
                            .map(|p| {
                                let y = if self.cloud_dim > 1 { p[1] } else { q0() };
                                Rect::new(p[0], p[0], y, y)
                            })
                            .collect();
                        cells.insert(w.clone(), Region::new(pts));
                        if w.depth() < self.max_depth {
                            next.extend(self.valid_children(w).unwrap_or_default());
                        }
                    }
                    frontier = next;
                }
                let table = CustomTable {
                    cells,
                    branching: self.ambient_branching(),
                    max_depth: self.max_depth,
                };
                PartitionFamily::custom(table).minimize(depth)
            }
            // The built-in grid families are minimal by construction;
            // pruning is the identity on them, which the report confirms.
            _ => {
                let report = self.minimality_check(depth)?;
                debug_assert!(report.all_minimal);
                Ok(self.clone())
            }
        }
    }

    /// Consistency of the subdivision at every enumerated level: each ambient
    /// child cell either survives or lies inside a removed rectangle, so the
    /// cells of each level cover exactly the truncated space.
    pub fn subdivision_check(&self, depth: usize) -> Result<bool, PartitionError> {
        match &self.kind {
            FamilyKind::Custom => {
                for level in 0..depth {
                    for w in self.level_cells(level) {
                        let kw = self.custom.cells.get(&w).unwrap();
                        let children = Region::new(
                            self.valid_children(&w)?
                                .iter()
                                .flat_map(|c| self.custom.cells.get(c).unwrap().rects.clone())
                                .collect(),
                        );
                        if !kw.set_eq(&children) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            FamilyKind::DyadicCubes => {
                for level in 0..depth {
                    for w in self.level_cells(level) {
                        let mine: Vec<&Vec<Q>> = self.cube_points(&w).collect();
                        for p in mine {
                            let covered = self
                                .valid_children(&w)?
                                .iter()
                                .any(|c| self.cube_points(c).any(|pp| pp == p));
                            if !covered {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
            _ => {
                for level in 0..depth {
                    for w in self.level_cells(level) {
                        let b = self.ambient_branching();
                        for d in 0..b {
                            let c = w.child(d);
                            let rc = self.ambient_rect(&c).expect("grid kind");
                            let survives = self.is_in_tree(&c);
                            let swallowed = match &self.kind {
                                FamilyKind::SquareWithHoles(_) => {
                                    self.holes.iter().any(|(_, h)| h.rect.contains_rect(&rc))
                                }
                                _ => false,
                            };
                            if survives == swallowed {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Removed rectangles (square-with-holes kinds), with birth levels.
    pub fn removed_rectangles(&self) -> Vec<(usize, Rect)> {
        self.holes.iter().map(|(b, h)| (*b, h.rect.clone())).collect()
    }

    /// Exact squared diameter of a cell, from the closed geometry at the
    /// cell's own resolution.
    pub fn cell_diam2(&self, w: &Address) -> Result<Q, PartitionError> {
        match self.cell(w)? {
            CellGeometry::Rects(region) => Ok(region.diam2()),
            CellGeometry::Points(pts) => {
                let mut best = Q::zero();
                for i in 0..pts.len() {
                    for j in (i + 1)..pts.len() {
                        best = best.max(pts[i].dist2(&pts[j]));
                    }
                }
                Ok(best)
            }
        }
    }
}

/// Subtracts the relative interior of a hole from closed pieces.
fn subtract_hole(pieces: &[Rect], hole: &Hole) -> Vec<Rect> {
    let mut out = Vec::new();
    for piece in pieces {
        if hole.interior_contains_rect(piece) {
            continue;
        }
        let overlap = match piece.intersect(&hole.rect) {
            None => {
                out.push(piece.clone());
                continue;
            }
            Some(o) => o,
        };
        // The hole's relative interior is an open box (extended to the unit
        // boundary where applicable); the remainder splits into closed side
        // strips plus the surviving boundary segments of the hole.
        let _ = overlap;
        let degenerate_y = hole.rect.y0 == hole.rect.y1;
        let hx0 = if hole.rect.x0 > q0() { hole.rect.x0 } else { q0() - q1() };
        let hx1 = if hole.rect.x1 < q1() { hole.rect.x1 } else { q1() + q1() };
        let hy0 = if hole.rect.y0 > q0() { hole.rect.y0 } else { q0() - q1() };
        let hy1 = if hole.rect.y1 < q1() { hole.rect.y1 } else { q1() + q1() };
        let mut push = |r: Rect| {
            if r.x0 <= r.x1 && r.y0 <= r.y1 {
                out.push(r);
            }
        };
        // Left / right strips (closed up to the hole edge).
        if piece.x0 <= hx0 {
            push(Rect::new(piece.x0, hx0.min(piece.x1), piece.y0, piece.y1));
        }
        if piece.x1 >= hx1 {
            push(Rect::new(hx1.max(piece.x0), piece.x1, piece.y0, piece.y1));
        }
        // Middle column: below / above strips. A y-degenerate hole cuts the
        // 1-dimensional ambient segment, so nothing of the middle survives.
        let mx0 = piece.x0.max(hx0);
        let mx1 = piece.x1.min(hx1);
        if mx0 <= mx1 && !degenerate_y {
            if piece.y0 <= hy0 {
                push(Rect::new(mx0, mx1, piece.y0, hy0.min(piece.y1)));
            }
            if piece.y1 >= hy1 {
                push(Rect::new(mx0, mx1, hy1.max(piece.y0), piece.y1));
            }
        }
    }
    out
}

fn generate_holes(model: &HoleModel, max_depth: usize) -> Result<Vec<(usize, Hole)>, PartitionError> {
    let mut holes = Vec::new();
    match model {
        HoleModel::StripColumns => {
            // Middle-third column at every scale along the {0,2} expansions.
            holes.push((
                1,
                Hole::new(Rect::new(q(1, 3), q(2, 3), q0(), q1())),
            ));
            let mut offsets: Vec<Q> = vec![q0(), q(2, 3)];
            let mut width = q(1, 3);
            for n in 1..max_depth {
                let third = width / Q::from_integer(3);
                let mut next = Vec::new();
                for a in &offsets {
                    holes.push((
                        n + 1,
                        Hole::new(Rect::new(*a + third, *a + third + third, q0(), q1())),
                    ));
                    next.push(*a);
                    next.push(*a + third + third);
                }
                offsets = next;
                width = third;
            }
        }
        HoleModel::PinchedColumns => {
            for j in 1..=max_depth {
                let c = q(1, 3_i128.pow(j as u32));
                let r = q(1, 3_i128.pow(2 * j.min(18) as u32));
                holes.push((2 * j, Hole::new(Rect::new(c - r, c + r, q0(), q1()))));
            }
        }
        HoleModel::ShrinkingFrames => {
            // Corner digits of the 9-grid in ring order are 0, 2, 4, 6.
            let corner_digits = [0_u8, 2, 4, 6];
            let mut prefixes = vec![Address::root()];
            for m in 1.. {
                if 2 * m > max_depth {
                    break;
                }
                for v in &prefixes {
                    let w = v.child(8); // center cell below v
                    let r = ambient_rect_9grid(&w);
                    let margin = r.width() / Q::from_integer(3_i128.pow(m as u32));
                    holes.push((
                        2 * m,
                        Hole::new(Rect::new(
                            r.x0 + margin,
                            r.x1 - margin,
                            r.y0 + margin,
                            r.y1 - margin,
                        )),
                    ));
                }
                let mut next = Vec::new();
                for v in &prefixes {
                    for d in corner_digits {
                        next.push(v.child(d));
                    }
                }
                prefixes = next;
            }
        }
        HoleModel::CornerChain => {
            for j in 1.. {
                if 2 * j > max_depth {
                    break;
                }
                let mut w = Address::root();
                for _ in 0..(j - 1) {
                    w = w.child(0);
                }
                w = w.child(8);
                for _ in 0..j {
                    w = w.child(0);
                }
                holes.push((2 * j, Hole::new(ambient_rect_9grid(&w))));
            }
        }
        HoleModel::Explicit(list) => {
            for (x0, x1, y0, y1) in list {
                let parse = |s: &str| {
                    crate::geom::q_parse(s)
                        .ok_or_else(|| PartitionError::InvalidHoles(format!("bad rational {s:?}")))
                };
                let r = Rect::new(parse(x0)?, parse(x1)?, parse(y0)?, parse(y1)?);
                if r.x0 >= r.x1 && r.y0 >= r.y1 {
                    return Err(PartitionError::InvalidHoles(
                        "degenerate removed rectangle".into(),
                    ));
                }
                holes.push((1, Hole::new(r)));
            }
        }
    }
    Ok(holes)
}

fn ambient_rect_9grid(w: &Address) -> Rect {
    let ring = [
        (0, 0),
        (1, 0),
        (2, 0),
        (2, 1),
        (2, 2),
        (1, 2),
        (0, 2),
        (0, 1),
        (1, 1),
    ];
    let mut col: i128 = 0;
    let mut row: i128 = 0;
    for &d in w.digits() {
        let (dc, dr) = ring[d as usize];
        col = col * 3 + dc;
        row = row * 3 + dr;
    }
    let den = 3_i128.pow(w.depth() as u32);
    Rect::new(q(col, den), q(col + 1, den), q(row, den), q(row + 1, den))
}

/// Removed rectangles must have pairwise disjoint interiors (the merged
/// normal form); overlapping inputs are rejected.
fn validate_holes(holes: &[(usize, Hole)]) -> Result<(), PartitionError> {
    for i in 0..holes.len() {
        for j in (i + 1)..holes.len() {
            let a = &holes[i].1.rect;
            let b = &holes[j].1.rect;
            if let Some(o) = a.intersect(b) {
                if o.dim() == 2 {
                    return Err(PartitionError::InvalidHoles(format!(
                        "removed rectangles {a:?} and {b:?} overlap"
                    )));
                }
                // Touching closures are fine only if the interiors stay
                // disjoint, which is automatic for closed boxes meeting in
                // dimension <= 1.
            }
        }
    }
    Ok(())
}
