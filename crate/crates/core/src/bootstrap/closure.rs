use std::collections::{HashMap, VecDeque};

use super::BootstrapError;
use crate::lattice::{BoxIndex, Rect, Site, SiteSet};

/// The 2-neighbour bootstrap closure of `a` inside `bx`: the smallest
/// superset of `a` in which no healthy in-box site has two infected
/// neighbours. Sites outside `bx` never become infected.
pub fn closure(a: &SiteSet, bx: &Rect) -> Result<SiteSet, BootstrapError> {
    if let Some(s) = a.iter().find(|s| !bx.contains(**s)) {
        return Err(BootstrapError::OutsideBox(*s));
    }
    Ok(closure_in(a, Some(bx)))
}

/// Closure on the whole lattice. It never leaves the bounding box of `a`.
pub fn closure_unbounded(a: &SiteSet) -> SiteSet {
    closure_in(a, None)
}

fn closure_in(a: &SiteSet, bx: Option<&Rect>) -> SiteSet {
    let mut infected = a.clone();
    let mut counts: HashMap<Site, u8> = HashMap::new();
    let mut queue = VecDeque::new();
    let inside = |s: Site| bx.is_none_or(|b| b.contains(s));

    let touch = |s: Site, infected: &SiteSet, counts: &mut HashMap<Site, u8>, queue: &mut VecDeque<Site>| {
        for nb in s.neighbours() {
            if !inside(nb) || infected.contains(&nb) {
                continue;
            }
            let c = counts.entry(nb).or_insert(0);
            *c += 1;
            if *c == 2 {
                queue.push_back(nb);
            }
        }
    };

    for s in a.sorted() {
        touch(s, &infected, &mut counts, &mut queue);
    }
    while let Some(s) = queue.pop_front() {
        if infected.insert(s) {
            touch(s, &infected, &mut counts, &mut queue);
        }
    }
    infected
}

/// True iff the closure of `a ∩ r` inside `r` is all of `r`.
pub fn internally_spanned(r: &Rect, a: &SiteSet) -> bool {
    let inner = a.restricted_to(r);
    match r.area() {
        Some(area) if inner.len() as u64 <= area => {
            let c = closure_in(&inner, Some(r));
            c.len() as u64 == area
        }
        _ => false,
    }
}

/// Dense boolean grid over a box, with an in-place closure used by the
/// percolation experiments where the occupied fraction is large.
#[derive(Debug, Clone)]
pub struct DenseGrid {
    index: BoxIndex,
    cells: Vec<bool>,
    counts: Vec<u8>,
    queue: Vec<u32>,
}

impl DenseGrid {
    pub fn new(index: BoxIndex) -> Self {
        DenseGrid {
            index,
            cells: vec![false; index.len()],
            counts: vec![0; index.len()],
            queue: Vec::new(),
        }
    }

    pub fn index(&self) -> &BoxIndex {
        &self.index
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [bool] {
        &mut self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Close the current configuration in place; returns the infected count.
    pub fn close(&mut self) -> usize {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.queue.clear();
        let mut total = 0;
        for i in 0..self.cells.len() {
            if self.cells[i] {
                total += 1;
                for nb in self.index.neighbours(i) {
                    self.counts[nb] += 1;
                    if self.counts[nb] == 2 && !self.cells[nb] {
                        self.queue.push(nb as u32);
                    }
                }
            }
        }
        while let Some(i) = self.queue.pop() {
            let i = i as usize;
            if self.cells[i] {
                continue;
            }
            self.cells[i] = true;
            total += 1;
            for nb in self.index.neighbours(i) {
                self.counts[nb] += 1;
                if self.counts[nb] == 2 && !self.cells[nb] {
                    self.queue.push(nb as u32);
                }
            }
        }
        total
    }

    /// Synchronous rounds of the update rule until nothing changes.
    /// Returns the number of rounds that infected at least one site.
    pub fn close_synchronous(&mut self) -> usize {
        let mut rounds = 0;
        let mut next = Vec::new();
        loop {
            next.clear();
            for i in 0..self.cells.len() {
                if !self.cells[i] && self.index.neighbours(i).filter(|&nb| self.cells[nb]).count() >= 2 {
                    next.push(i);
                }
            }
            if next.is_empty() {
                return rounds;
            }
            for &i in &next {
                self.cells[i] = true;
            }
            rounds += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::centred_square;

    fn set(v: &[(i64, i64)]) -> SiteSet {
        v.iter().map(|&(x, y)| Site::new(x, y)).collect()
    }

    #[test]
    fn closure_examples() {
        let bx = centred_square(5).unwrap();
        assert!(closure(&SiteSet::new(), &bx).unwrap().is_empty());
        assert_eq!(closure(&set(&[(0, 0)]), &bx).unwrap().sorted(), set(&[(0, 0)]).sorted());
        assert_eq!(
            closure(&set(&[(0, 0), (1, 1)]), &bx).unwrap().sorted(),
            set(&[(0, 0), (0, 1), (1, 0), (1, 1)]).sorted()
        );
        assert_eq!(
            closure(&set(&[(0, 0), (0, 2)]), &bx).unwrap().sorted(),
            set(&[(0, 0), (0, 1), (0, 2)]).sorted()
        );
    }

    #[test]
    fn closure_rejects_outside() {
        let bx = centred_square(1).unwrap();
        assert!(matches!(closure(&set(&[(3, 0)]), &bx), Err(BootstrapError::OutsideBox(_))));
    }

    #[test]
    fn box_truncation() {
        // (0,0),(1,1) in a box that excludes (1,0): only (0,1) can fill.
        let bx = Rect::new(0, 1, 0, 1).unwrap();
        let full = closure(&set(&[(0, 0), (1, 1)]), &bx).unwrap();
        assert_eq!(full.len(), 4);
        let thin = Rect::new(0, 1, 1, 1).unwrap();
        assert_eq!(closure(&set(&[(0, 1)]), &thin).unwrap().len(), 1);
    }

    #[test]
    fn spanned_examples() {
        assert!(internally_spanned(&Rect::new(0, 0, 0, 0).unwrap(), &set(&[(0, 0)])));
        assert!(internally_spanned(&Rect::new(0, 1, 0, 1).unwrap(), &set(&[(0, 0), (1, 1)])));
        assert!(!internally_spanned(&Rect::new(0, 2, 0, 2).unwrap(), &set(&[(0, 0)])));
    }

    #[test]
    fn dense_matches_sparse() {
        let bx = centred_square(4).unwrap();
        let a = set(&[(-4, -4), (-3, -2), (0, 0), (1, 2), (3, 3), (2, -3)]);
        let sparse = closure(&a, &bx).unwrap();
        let mut g = DenseGrid::new(BoxIndex::new(bx).unwrap());
        for s in a.iter() {
            let i = g.index().index(*s).unwrap();
            g.cells_mut()[i] = true;
        }
        let mut g2 = g.clone();
        assert_eq!(g.close(), sparse.len());
        g2.close_synchronous();
        assert_eq!(g2.cells(), g.cells());
    }
}
