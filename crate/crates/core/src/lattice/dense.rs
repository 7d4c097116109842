//! Box-shaped storage: every site of a declared bounding box has a slot.

use super::quantity::{self, Quantity, ZERO};
use super::sparse::Entry;
use super::{LatticeError, Site};
use crate::par;

/// Inclusive axis-aligned box of sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lo: Site,
    pub hi: Site,
}

impl Bounds {
    pub fn new(lo: Site, hi: Site) -> Result<Self, LatticeError> {
        if lo.x > hi.x || lo.y > hi.y || lo.z > hi.z {
            return Err(LatticeError::InvalidBounds { lo, hi });
        }
        Ok(Bounds { lo, hi })
    }

    /// The cube `[-r, r]^3`.
    pub fn cube(radius: i32) -> Self {
        let r = radius.abs();
        Bounds {
            lo: Site::new(-r, -r, -r),
            hi: Site::new(r, r, r),
        }
    }

    pub fn contains(&self, s: Site) -> bool {
        (self.lo.x..=self.hi.x).contains(&s.x)
            && (self.lo.y..=self.hi.y).contains(&s.y)
            && (self.lo.z..=self.hi.z).contains(&s.z)
    }

    pub(crate) fn extent(&self) -> [usize; 3] {
        [
            (self.hi.x as i64 - self.lo.x as i64 + 1) as usize,
            (self.hi.y as i64 - self.lo.y as i64 + 1) as usize,
            (self.hi.z as i64 - self.lo.z as i64 + 1) as usize,
        ]
    }

    pub fn volume(&self) -> usize {
        let [nx, ny, nz] = self.extent();
        nx * ny * nz
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct DenseFrame {
    pub(crate) bounds: Bounds,
    ny: usize,
    nz: usize,
    pub(crate) values: Vec<Quantity>,
}

impl DenseFrame {
    pub(crate) fn new(bounds: Bounds) -> Self {
        let [_, ny, nz] = bounds.extent();
        DenseFrame {
            bounds,
            ny,
            nz,
            values: vec![ZERO; bounds.volume()],
        }
    }

    fn index(&self, s: Site) -> usize {
        let dx = (s.x - self.bounds.lo.x) as usize;
        let dy = (s.y - self.bounds.lo.y) as usize;
        let dz = (s.z - self.bounds.lo.z) as usize;
        (dx * self.ny + dy) * self.nz + dz
    }

    fn site(&self, index: usize) -> Site {
        let dz = index % self.nz;
        let dy = (index / self.nz) % self.ny;
        let dx = index / (self.nz * self.ny);
        Site::new(
            self.bounds.lo.x + dx as i32,
            self.bounds.lo.y + dy as i32,
            self.bounds.lo.z + dz as i32,
        )
    }

    pub(crate) fn get(&self, s: Site) -> Quantity {
        if self.bounds.contains(s) {
            self.values[self.index(s)]
        } else {
            ZERO
        }
    }

    pub(crate) fn add_assign(&mut self, s: Site, q: Quantity) -> Result<(), LatticeError> {
        if quantity::is_zero(q) {
            return Ok(());
        }
        if !self.bounds.contains(s) {
            return Err(LatticeError::OutOfBounds { site: s });
        }
        let i = self.index(s);
        let sum = self.values[i] + q;
        self.values[i] = quantity::canonical(sum);
        Ok(())
    }

    /// Nonzero entries in lexicographic order.
    pub(crate) fn iter(&self) -> impl Iterator<Item = Entry> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, q)| !quantity::is_zero(**q))
            .map(|(i, q)| (self.site(i), *q))
    }

    pub(crate) fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|q| !quantity::is_zero(**q)).count()
    }

    pub(crate) fn clear_site(&mut self, s: Site) {
        if self.bounds.contains(s) {
            let i = self.index(s);
            self.values[i] = ZERO;
        }
    }

    /// `self[s + offset] += factor * src[s]` for every nonzero `src[s]`,
    /// parallel over x-slabs of `self`.
    pub(crate) fn add_shifted_from(
        &mut self,
        src: SourceView<'_>,
        offset: Site,
        factor: Quantity,
    ) -> Result<(), LatticeError> {
        // Every target must land inside the box before anything is written.
        for (s, _) in src.nonzero() {
            let t = s.checked_add(offset).ok_or(LatticeError::CoordinateOverflow {
                site: s,
                offset,
            })?;
            if !self.bounds.contains(t) {
                return Err(LatticeError::OutOfBounds { site: t });
            }
        }
        let bounds = self.bounds;
        let (ny, nz) = (self.ny, self.nz);
        let results = par::for_each_chunk_mut(&mut self.values, ny * nz, |ix, slab| {
            let x = bounds.lo.x + ix as i32;
            let mut first_bad = None;
            src.for_each_in_slab(x - offset.x, |s, q| {
                let t = s + offset;
                let j = (t.y - bounds.lo.y) as usize * nz + (t.z - bounds.lo.z) as usize;
                let sum = slab[j] + quantity::scale(factor, q);
                if !quantity::is_finite(sum) && first_bad.is_none() {
                    first_bad = Some(t);
                }
                slab[j] = quantity::canonical(sum);
            });
            first_bad
        });
        match results.into_iter().flatten().next() {
            Some(site) => Err(LatticeError::NonFinite { site }),
            None => Ok(()),
        }
    }
}

/// Read access to a source lattice, either backend, by x-slab.
#[derive(Clone, Copy)]
pub(crate) enum SourceView<'a> {
    Sparse(&'a [Entry]),
    Dense(&'a DenseFrame),
}

impl SourceView<'_> {
    fn nonzero(&self) -> Box<dyn Iterator<Item = Entry> + '_> {
        match self {
            SourceView::Sparse(e) => Box::new(e.iter().copied()),
            SourceView::Dense(d) => Box::new(d.iter()),
        }
    }

    fn for_each_in_slab(&self, x: i32, mut f: impl FnMut(Site, Quantity)) {
        match self {
            SourceView::Sparse(e) => {
                let a = e.partition_point(|p| p.0.x < x);
                let b = e.partition_point(|p| p.0.x <= x);
                for &(s, q) in &e[a..b] {
                    f(s, q);
                }
            }
            SourceView::Dense(d) => {
                if x < d.bounds.lo.x || x > d.bounds.hi.x {
                    return;
                }
                let start = d.index(Site::new(x, d.bounds.lo.y, d.bounds.lo.z));
                for (k, q) in d.values[start..start + d.ny * d.nz].iter().enumerate() {
                    if !quantity::is_zero(*q) {
                        f(d.site(start + k), *q);
                    }
                }
            }
        }
    }
}
