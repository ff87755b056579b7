use std::collections::BTreeSet;

use serde::Serialize;

use super::closure::internally_spanned;
use super::BootstrapError;
use crate::lattice::{bounding_rect, l1_rect_distance, semi_perimeter, Rect, SiteSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename = "merge")]
pub struct MergeRecord {
    pub a: Rect,
    pub b: Rect,
    pub into: Rect,
}

/// Repeatedly replaces the lexicographically smallest pair of rectangles
/// within ℓ1 distance `radius` by their bounding rectangle.
///
/// Pairs are ordered by (smaller rect, larger rect, ids) with rectangles
/// compared on (x0, y0, x1, y1). Each rectangle carries a payload that is
/// combined on merge.
#[derive(Debug, Clone)]
pub struct MergeEngine<P> {
    slots: Vec<Option<(Rect, P)>>,
    pairs: BTreeSet<(Rect, Rect, usize, usize)>,
    radius: u64,
    log: Vec<MergeRecord>,
}

impl<P> MergeEngine<P> {
    pub fn new(radius: u64) -> Self {
        MergeEngine { slots: Vec::new(), pairs: BTreeSet::new(), radius, log: Vec::new() }
    }

    pub fn from_items(radius: u64, items: impl IntoIterator<Item = (Rect, P)>) -> Self {
        let mut e = Self::new(radius);
        e.slots = items.into_iter().map(Some).collect();
        for i in 0..e.slots.len() {
            for j in i + 1..e.slots.len() {
                e.consider(i, j);
            }
        }
        e
    }

    fn consider(&mut self, i: usize, j: usize) {
        let (Some((ri, _)), Some((rj, _))) = (&self.slots[i], &self.slots[j]) else {
            return;
        };
        if l1_rect_distance(ri, rj) <= self.radius {
            let key = if (ri, i) <= (rj, j) { (*ri, *rj, i, j) } else { (*rj, *ri, j, i) };
            self.pairs.insert(key);
        }
    }

    /// Add a rectangle without merging. Returns its id.
    pub fn push(&mut self, rect: Rect, payload: P) -> usize {
        let id = self.slots.len();
        self.slots.push(Some((rect, payload)));
        for j in 0..id {
            self.consider(j, id);
        }
        id
    }

    /// Merge until every pair is farther apart than the radius. Returns the
    /// number of merges performed.
    pub fn merge_all(&mut self, mut combine: impl FnMut(P, P) -> P) -> usize {
        let mut merges = 0;
        while let Some((_, _, i, j)) = self.pairs.pop_first() {
            if self.slots[i].is_none() || self.slots[j].is_none() {
                continue;
            }
            let (ra, pa) = self.slots[i].take().unwrap();
            let (rb, pb) = self.slots[j].take().unwrap();
            let into = bounding_rect(&ra, &rb);
            self.log.push(MergeRecord { a: ra, b: rb, into });
            self.push(into, combine(pa, pb));
            merges += 1;
        }
        merges
    }

    pub fn log(&self) -> &[MergeRecord] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<MergeRecord> {
        std::mem::take(&mut self.log)
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Live rectangles in creation order.
    pub fn rects(&self) -> impl Iterator<Item = &Rect> {
        self.slots.iter().flatten().map(|(r, _)| r)
    }

    pub fn items(&self) -> impl Iterator<Item = &(Rect, P)> {
        self.slots.iter().flatten()
    }

    pub fn into_items(self) -> Vec<(Rect, P)> {
        self.slots.into_iter().flatten().collect()
    }
}

/// Outcome of the rectangles process: disjointly spanned rectangles with
/// their seed sets, and the merges that produced them.
#[derive(Debug, Clone)]
pub struct RectanglesState {
    pub rects: Vec<(Rect, SiteSet)>,
    pub log: Vec<MergeRecord>,
}

impl RectanglesState {
    pub fn union_sites(&self) -> SiteSet {
        let mut out = SiteSet::new();
        for (r, _) in &self.rects {
            out.extend(r.sites());
        }
        out
    }

    /// Initial 1×1 rectangles followed by every merge product, in order.
    pub fn appearances(&self, seeds: &[crate::lattice::Site]) -> Vec<Rect> {
        seeds
            .iter()
            .map(|s| Rect::point(*s).expect("seed coordinates are valid"))
            .chain(self.log.iter().map(|m| m.into))
            .collect()
    }
}

pub(crate) fn union_seeds(mut a: SiteSet, b: SiteSet) -> SiteSet {
    a.extend(b.iter().copied());
    a
}

/// Run the rectangles process on `a`, starting from one 1×1 rectangle per
/// site (taken in sorted order) and merging pairs at distance ≤ 2.
pub fn rectangles_process(a: &SiteSet) -> RectanglesState {
    let items = a.sorted().into_iter().map(|s| {
        let seeds: SiteSet = std::iter::once(s).collect();
        (Rect::point(s).expect("seed coordinates are valid"), seeds)
    });
    let mut engine = MergeEngine::from_items(2, items);
    engine.merge_all(union_seeds);
    let log = engine.take_log();
    RectanglesState { rects: engine.into_items(), log }
}

/// Replays the rectangles process on `a ∩ r` and returns the first rectangle
/// to appear with `ell ≤ φ ≤ 2·ell`.
pub fn al_witness(r: &Rect, a: &SiteSet, ell: u64) -> Result<Option<Rect>, BootstrapError> {
    if ell == 0 || ell > semi_perimeter(r) {
        return Err(BootstrapError::Precondition(format!("ell={ell} outside 1..={}", semi_perimeter(r))));
    }
    if !internally_spanned(r, a) {
        return Err(BootstrapError::Precondition(format!("{r} is not internally spanned")));
    }
    let inner = a.restricted_to(r);
    let state = rectangles_process(&inner);
    Ok(state
        .appearances(&inner.sorted())
        .into_iter()
        .find(|q| (ell..=2 * ell).contains(&semi_perimeter(q)) && r.contains_rect(q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::closure_unbounded;
    use crate::lattice::Site;

    fn set(v: &[(i64, i64)]) -> SiteSet {
        v.iter().map(|&(x, y)| Site::new(x, y)).collect()
    }

    #[test]
    fn process_examples() {
        let one = rectangles_process(&set(&[(3, 4)]));
        assert_eq!(one.rects.len(), 1);
        assert!(one.log.is_empty());

        let diag = rectangles_process(&set(&[(0, 0), (1, 1)]));
        assert_eq!(diag.rects.len(), 1);
        assert_eq!(diag.rects[0].0, Rect::new(0, 1, 0, 1).unwrap());
        assert_eq!(diag.log.len(), 1);

        let far = rectangles_process(&set(&[(0, 0), (5, 5)]));
        assert_eq!(far.rects.len(), 2);
    }

    #[test]
    fn chain_merges_in_lexicographic_order() {
        let st = rectangles_process(&set(&[(0, 0), (2, 0), (4, 0)]));
        assert_eq!(st.rects.len(), 1);
        assert_eq!(st.rects[0].0, Rect::new(0, 4, 0, 0).unwrap());
        assert_eq!(st.log[0].a, Rect::new(0, 0, 0, 0).unwrap());
        assert_eq!(st.log[0].b, Rect::new(2, 2, 0, 0).unwrap());
        assert_eq!(st.union_sites().sorted(), closure_unbounded(&set(&[(0, 0), (2, 0), (4, 0)])).sorted());
    }

    #[test]
    fn merge_record_json() {
        let rec = MergeRecord {
            a: Rect::new(0, 0, 0, 0).unwrap(),
            b: Rect::new(1, 1, 1, 1).unwrap(),
            into: Rect::new(0, 1, 0, 1).unwrap(),
        };
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"type":"merge","a":[0,0,0,0],"b":[1,1,1,1],"into":[0,1,0,1]}"#
        );
    }

    #[test]
    fn witness_examples() {
        let r = Rect::new(0, 1, 0, 1).unwrap();
        let a = set(&[(0, 0), (1, 1)]);
        assert_eq!(al_witness(&r, &a, 4).unwrap(), Some(r));
        assert_eq!(al_witness(&r, &a, 2).unwrap(), Some(Rect::new(0, 0, 0, 0).unwrap()));
        let single = Rect::new(2, 2, 2, 2).unwrap();
        assert_eq!(al_witness(&single, &set(&[(2, 2)]), 2).unwrap(), Some(single));
        assert!(al_witness(&r, &a, 5).is_err());
        assert!(al_witness(&Rect::new(0, 2, 0, 2).unwrap(), &a, 2).is_err());
    }
}
