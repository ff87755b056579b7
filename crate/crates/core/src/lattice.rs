//! Integer-lattice geometry on Z²: sites, axis-aligned rectangles, centred
//! squares, ℓ1 distances and semi-perimeters.
//!
//! Rectangles use inclusive site bounds, so a `Rect` always contains at least
//! one site and its semi-perimeter counts sites per side (a single site has
//! semi-perimeter 2).

use std::fmt;

use indexmap::IndexSet;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest absolute coordinate accepted by [`Rect::new`]. Keeping coordinates
/// within ±2⁶² means widths, heights and their sums never overflow `i64`.
pub const COORD_LIMIT: i64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("empty rectangle: [{x0},{x1}]x[{y0},{y1}]")]
    Empty { x0: i64, x1: i64, y0: i64, y1: i64 },
    #[error("coordinate overflow")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    /// The four nearest neighbours, skipping any that would overflow.
    pub fn neighbours(self) -> impl Iterator<Item = Site> {
        let Site { x, y } = self;
        [
            x.checked_sub(1).map(|x| Site::new(x, y)),
            x.checked_add(1).map(|x| Site::new(x, y)),
            y.checked_sub(1).map(|y| Site::new(x, y)),
            y.checked_add(1).map(|y| Site::new(x, y)),
        ]
        .into_iter()
        .flatten()
    }

    /// ℓ∞ norm; the smallest `m` with `self ∈ S(m)`.
    pub fn ring(self) -> u64 {
        self.x.unsigned_abs().max(self.y.unsigned_abs())
    }

    pub fn l1(self, other: Site) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]` with inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    // Field order gives the (x0, y0, x1, y1) lexicographic ordering used for
    // deterministic pair selection.
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

impl Rect {
    pub fn new(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<Self, LatticeError> {
        if x0 > x1 || y0 > y1 {
            return Err(LatticeError::Empty { x0, x1, y0, y1 });
        }
        if [x0, x1, y0, y1].iter().any(|c| c.unsigned_abs() > COORD_LIMIT as u64) {
            return Err(LatticeError::Overflow);
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    /// The 1×1 rectangle at `s`.
    pub fn point(s: Site) -> Result<Self, LatticeError> {
        Rect::new(s.x, s.x, s.y, s.y)
    }

    pub fn x0(&self) -> i64 {
        self.x0
    }
    pub fn x1(&self) -> i64 {
        self.x1
    }
    pub fn y0(&self) -> i64 {
        self.y0
    }
    pub fn y1(&self) -> i64 {
        self.y1
    }

    pub fn width(&self) -> u64 {
        (self.x1 - self.x0) as u64 + 1
    }

    pub fn height(&self) -> u64 {
        (self.y1 - self.y0) as u64 + 1
    }

    /// Number of sites, or `None` if it does not fit in a `u64`.
    pub fn area(&self) -> Option<u64> {
        self.width().checked_mul(self.height())
    }

    pub fn contains(&self, s: Site) -> bool {
        (self.x0..=self.x1).contains(&s.x) && (self.y0..=self.y1).contains(&s.y)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x0 <= other.x0 && other.x1 <= self.x1 && self.y0 <= other.y0 && other.y1 <= self.y1
    }

    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x0.max(other.x0);
        let x1 = self.x1.min(other.x1);
        let y0 = self.y0.max(other.y0);
        let y1 = self.y1.min(other.y1);
        (x0 <= x1 && y0 <= y1).then_some(Rect { x0, y0, x1, y1 })
    }

    /// Sites in row-major order (rows bottom to top).
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| Site::new(x, y)))
    }

    /// Sites outside `self` that share an edge with it.
    pub fn outer_boundary(&self) -> impl Iterator<Item = Site> + '_ {
        let below = (self.x0..=self.x1).map(move |x| Site::new(x, self.y0 - 1));
        let above = (self.x0..=self.x1).map(move |x| Site::new(x, self.y1 + 1));
        let left = (self.y0..=self.y1).map(move |y| Site::new(self.x0 - 1, y));
        let right = (self.y0..=self.y1).map(move |y| Site::new(self.x1 + 1, y));
        below.chain(above).chain(left).chain(right)
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.x0, self.x1, self.y0, self.y1]
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x0, self.x1, self.y0, self.y1)
    }
}

// Serialized as the four integers [x0, x1, y0, y1].
impl Serialize for Rect {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.as_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rect {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x0, x1, y0, y1] = <[i64; 4]>::deserialize(deserializer)?;
        Rect::new(x0, x1, y0, y1).map_err(de::Error::custom)
    }
}

/// `S(m) = [−m, m]²`, the square of side `2m + 1` centred on the origin.
pub fn centred_square(m: u64) -> Result<Rect, LatticeError> {
    let m = i64::try_from(m).map_err(|_| LatticeError::Overflow)?;
    Rect::new(-m, m, -m, m)
}

/// Width plus height, counted in sites.
pub fn semi_perimeter(r: &Rect) -> u64 {
    r.width() + r.height()
}

fn interval_gap(a0: i64, a1: i64, b0: i64, b1: i64) -> u64 {
    if b0 > a1 {
        (b0 - a1) as u64
    } else if a0 > b1 {
        (a0 - b1) as u64
    } else {
        0
    }
}

/// Minimum ℓ1 distance between a site of `a` and a site of `b`; zero iff they
/// intersect.
pub fn l1_rect_distance(a: &Rect, b: &Rect) -> u64 {
    interval_gap(a.x0, a.x1, b.x0, b.x1) + interval_gap(a.y0, a.y1, b.y0, b.y1)
}

pub fn bounding_rect(a: &Rect, b: &Rect) -> Rect {
    Rect {
        x0: a.x0.min(b.x0),
        y0: a.y0.min(b.y0),
        x1: a.x1.max(b.x1),
        y1: a.y1.max(b.y1),
    }
}

/// Grow every side length by `d`, keeping the centre: low sides move out by
/// ⌈d/2⌉ and high sides by ⌊d/2⌋.
pub fn enlarge(r: &Rect, d: u64) -> Result<Rect, LatticeError> {
    let lo = i64::try_from(d.div_ceil(2)).map_err(|_| LatticeError::Overflow)?;
    let hi = i64::try_from(d / 2).map_err(|_| LatticeError::Overflow)?;
    let sub = |c: i64| c.checked_sub(lo).ok_or(LatticeError::Overflow);
    let add = |c: i64| c.checked_add(hi).ok_or(LatticeError::Overflow);
    Rect::new(sub(r.x0)?, add(r.x1)?, sub(r.y0)?, add(r.y1)?)
}

/// Round a real-valued length to the nearest non-negative integer.
pub fn round_length(x: f64) -> u64 {
    if x.is_finite() && x > 0.0 {
        x.round() as u64
    } else {
        0
    }
}

/// Smallest rectangle containing every site, or `None` for no sites.
pub fn bounding_box<'a>(sites: impl IntoIterator<Item = &'a Site>) -> Option<Rect> {
    let mut it = sites.into_iter();
    let first = it.next()?;
    let mut r = Rect { x0: first.x, y0: first.y, x1: first.x, y1: first.y };
    for s in it {
        r.x0 = r.x0.min(s.x);
        r.x1 = r.x1.max(s.x);
        r.y0 = r.y0.min(s.y);
        r.y1 = r.y1.max(s.y);
    }
    Some(r)
}

/// A set of distinct sites with O(1) expected membership and insertion.
///
/// Iteration follows insertion order, which keeps every consumer deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SiteSet {
    sites: IndexSet<Site>,
}

impl SiteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        SiteSet { sites: IndexSet::with_capacity(n) }
    }

    /// Returns `true` if the site was not already present.
    pub fn insert(&mut self, s: Site) -> bool {
        self.sites.insert(s)
    }

    pub fn contains(&self, s: &Site) -> bool {
        self.sites.contains(s)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter()
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = Site>) {
        self.sites.extend(other);
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.len() <= other.len() && self.iter().all(|s| other.contains(s))
    }

    /// Members in (x, y) order.
    pub fn sorted(&self) -> Vec<Site> {
        let mut v: Vec<Site> = self.sites.iter().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn bounding_box(&self) -> Option<Rect> {
        bounding_box(self.sites.iter())
    }

    pub fn restricted_to(&self, r: &Rect) -> SiteSet {
        self.iter().filter(|s| r.contains(**s)).copied().collect()
    }
}

impl FromIterator<Site> for SiteSet {
    fn from_iter<I: IntoIterator<Item = Site>>(iter: I) -> Self {
        SiteSet { sites: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a SiteSet {
    type Item = &'a Site;
    type IntoIter = indexmap::set::Iter<'a, Site>;
    fn into_iter(self) -> Self::IntoIter {
        self.sites.iter()
    }
}

/// Row-major dense indexing of the sites of a finite rectangle.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndex {
    rect: Rect,
    width: usize,
    len: usize,
}

impl BoxIndex {
    /// Fails if the rectangle has more sites than fit in memory indices.
    pub fn new(rect: Rect) -> Result<Self, LatticeError> {
        let len = rect
            .area()
            .and_then(|a| usize::try_from(a).ok())
            .filter(|&a| a <= u32::MAX as usize)
            .ok_or(LatticeError::Overflow)?;
        Ok(BoxIndex { rect, width: rect.width() as usize, len })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.len / self.width
    }

    pub fn index(&self, s: Site) -> Option<usize> {
        self.rect
            .contains(s)
            .then(|| (s.y - self.rect.y0) as usize * self.width + (s.x - self.rect.x0) as usize)
    }

    pub fn site(&self, idx: usize) -> Site {
        Site::new(
            self.rect.x0 + (idx % self.width) as i64,
            self.rect.y0 + (idx / self.width) as i64,
        )
    }

    /// In-box neighbour indices of `idx`.
    #[inline]
    pub fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> {
        let w = self.width;
        let col = idx % w;
        let left = (col > 0).then(|| idx - 1);
        let right = (col + 1 < w).then(|| idx + 1);
        let down = (idx >= w).then(|| idx - w);
        let up = (idx + w < self.len).then(|| idx + w);
        [left, right, down, up].into_iter().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x0: i64, x1: i64, y0: i64, y1: i64) -> Rect {
        Rect::new(x0, x1, y0, y1).unwrap()
    }

    #[test]
    fn centred_square_examples() {
        let s0 = centred_square(0).unwrap();
        assert_eq!(s0, r(0, 0, 0, 0));
        assert_eq!(s0.area(), Some(1));
        let s2 = centred_square(2).unwrap();
        assert_eq!(s2, r(-2, 2, -2, 2));
        assert_eq!(s2.area(), Some(25));
        assert_eq!(semi_perimeter(&s2), 10);
        assert_eq!(semi_perimeter(&centred_square(1).unwrap()), 6);
    }

    #[test]
    fn semi_perimeter_examples() {
        assert_eq!(semi_perimeter(&r(0, 0, 0, 0)), 2);
        assert_eq!(semi_perimeter(&r(0, 2, 0, 0)), 4);
        assert_eq!(semi_perimeter(&r(-2, 2, -2, 2)), 10);
    }

    fn brute_distance(a: &Rect, b: &Rect) -> u64 {
        a.sites().flat_map(|p| b.sites().map(move |q| p.l1(q))).min().unwrap()
    }

    #[test]
    fn distance_examples() {
        let a = r(0, 1, 0, 0);
        assert_eq!(l1_rect_distance(&a, &a), 0);
        assert_eq!(l1_rect_distance(&r(0, 0, 0, 0), &r(2, 2, 2, 2)), 4);
        let b = r(3, 4, 0, 0);
        assert_eq!(brute_distance(&a, &b), 2);
        assert_eq!(l1_rect_distance(&a, &b), 2);
    }

    #[test]
    fn bounding_examples() {
        let a = r(0, 1, 0, 0);
        assert_eq!(bounding_rect(&a, &a), a);
        assert_eq!(bounding_rect(&r(0, 0, 0, 0), &r(1, 1, 1, 1)), r(0, 1, 0, 1));
        assert_eq!(bounding_rect(&r(0, 0, 0, 2), &r(2, 2, 1, 1)), r(0, 2, 0, 2));
    }

    #[test]
    fn enlarge_examples() {
        let a = r(0, 1, 0, 0);
        assert_eq!(enlarge(&a, 0).unwrap(), a);
        assert_eq!(enlarge(&r(-1, 1, -1, 1), 4).unwrap(), r(-3, 3, -3, 3));
        assert_eq!(enlarge(&a, 2).unwrap(), r(-1, 2, -1, 1));
        // odd: low sides take the extra site
        assert_eq!(enlarge(&r(0, 0, 0, 0), 3).unwrap(), r(-2, 1, -2, 1));
        assert_eq!(enlarge(&r(i64::MIN / 2, 0, 0, 0), u64::MAX), Err(LatticeError::Overflow));
    }

    #[test]
    fn rejects_empty_and_huge() {
        assert!(matches!(Rect::new(1, 0, 0, 0), Err(LatticeError::Empty { .. })));
        assert_eq!(Rect::new(i64::MIN, 0, 0, 0), Err(LatticeError::Overflow));
        assert_eq!(centred_square(u64::MAX), Err(LatticeError::Overflow));
    }

    #[test]
    fn box_index_roundtrip() {
        let b = BoxIndex::new(r(-2, 3, 5, 7)).unwrap();
        assert_eq!(b.len(), 18);
        for i in 0..b.len() {
            assert_eq!(b.index(b.site(i)), Some(i));
        }
        assert_eq!(b.index(Site::new(4, 5)), None);
        let corner = b.index(Site::new(-2, 5)).unwrap();
        assert_eq!(b.neighbours(corner).count(), 2);
    }

    #[test]
    fn rect_serializes_as_four_integers() {
        let a = r(-1, 2, 3, 4);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[-1,2,3,4]");
        let back: Rect = serde_json::from_str("[-1,2,3,4]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Rect>("[3,2,0,0]").is_err());
    }

    fn arb_rect() -> impl Strategy<Value = Rect> {
        (-20i64..20, 0i64..8, -20i64..20, 0i64..8).prop_map(|(x, w, y, h)| r(x, x + w, y, y + h))
    }

    proptest! {
        #[test]
        fn subadditive_when_mergeable(a in arb_rect(), w in 0i64..8, h in 0i64..8, dx in -12i64..12, dy in -12i64..12) {
            // The bound holds for the pairs the rectangles process actually merges.
            let b = r(a.x0() + dx, a.x0() + dx + w, a.y0() + dy, a.y0() + dy + h);
            prop_assume!(l1_rect_distance(&a, &b) <= 2);
            let m = bounding_rect(&a, &b);
            prop_assert!(semi_perimeter(&m) <= semi_perimeter(&a) + semi_perimeter(&b));
        }

        #[test]
        fn merge_growth_bounded_by_distance(a in arb_rect(), b in arb_rect()) {
            let m = bounding_rect(&a, &b);
            let d = l1_rect_distance(&a, &b);
            prop_assert!(semi_perimeter(&m) <= semi_perimeter(&a) + semi_perimeter(&b) + d);
        }

        #[test]
        fn distance_matches_enumeration(a in arb_rect(), b in arb_rect()) {
            prop_assert_eq!(l1_rect_distance(&a, &b), brute_distance(&a, &b));
            prop_assert_eq!(l1_rect_distance(&a, &b), l1_rect_distance(&b, &a));
        }

        #[test]
        fn triangle_through_site(a in arb_rect(), b in arb_rect(), x in -25i64..25, y in -25i64..25) {
            let p = Rect::point(Site::new(x, y)).unwrap();
            prop_assert!(l1_rect_distance(&a, &b) <= l1_rect_distance(&a, &p) + l1_rect_distance(&p, &b));
        }

        #[test]
        fn enlarge_adds_twice_d(a in arb_rect(), d in 0u64..50) {
            let e = enlarge(&a, d).unwrap();
            prop_assert_eq!(semi_perimeter(&e), semi_perimeter(&a) + 2 * d);
            prop_assert!(e.contains_rect(&a));
            prop_assert_eq!(e.width(), a.width() + d);
        }
    }
}
