//! Complex quantities on the unbounded 3-D integer lattice.
//!
//! A [`Lattice`] is a named frame tagged with its iteration number. Sites
//! that are absent read as zero, and an addition that cancels exactly
//! removes the site, so storage only ever holds nonzero values. Two
//! backends exist: a sorted sparse vector (the default, unbounded) and a
//! dense box. Both produce the same bits for the same operations.

mod dense;
mod quantity;
mod site;
pub(crate) mod sparse;

use std::borrow::Cow;

pub use dense::Bounds;
pub(crate) use dense::SourceView;
pub use quantity::{canonical, is_finite, is_zero, magnitude, real, scale, Quantity, ZERO};
pub use site::{ParseSiteError, Site};

use dense::DenseFrame;
use sparse::{Entry, SparseFrame, Term};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("non-finite quantity at site ({site})")]
    NonFinite { site: Site },
    #[error("shifting site ({site}) by ({offset}) leaves the coordinate range")]
    CoordinateOverflow { site: Site, offset: Site },
    #[error("site ({site}) lies outside the dense bounding box")]
    OutOfBounds { site: Site },
    #[error("bounding box ({lo})..=({hi}) is empty")]
    InvalidBounds { lo: Site, hi: Site },
}

/// Storage layout of a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Sparse,
    Dense(Bounds),
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Sparse(SparseFrame),
    Dense(DenseFrame),
}

/// A named frame of site quantities at one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    name: String,
    iteration: u64,
    storage: Storage,
}

/// Outcome of one [`Lattice::prune`] call.
#[derive(Clone, Debug, PartialEq)]
pub struct PruneReport {
    pub lattice: String,
    pub iteration: u64,
    pub sites_before: usize,
    pub sites_after: usize,
    /// Sum of the magnitudes that were removed.
    pub dropped_abs_sum: f64,
    /// Smallest magnitude still stored, 0 for an empty result.
    pub smallest_kept: f64,
}

impl Lattice {
    /// Empty sparse lattice at iteration 0.
    pub fn new(name: impl Into<String>) -> Self {
        Lattice {
            name: name.into(),
            iteration: 0,
            storage: Storage::Sparse(SparseFrame::default()),
        }
    }

    /// Empty dense lattice covering `bounds`.
    pub fn dense(name: impl Into<String>, bounds: Bounds) -> Self {
        Lattice {
            name: name.into(),
            iteration: 0,
            storage: Storage::Dense(DenseFrame::new(bounds)),
        }
    }

    pub fn with_backend(name: impl Into<String>, backend: Backend) -> Self {
        match backend {
            Backend::Sparse => Lattice::new(name),
            Backend::Dense(b) => Lattice::dense(name, b),
        }
    }

    /// Builds a sparse lattice from arbitrary `(site, quantity)` pairs;
    /// repeated sites are summed in input order.
    pub fn from_sites<I>(name: impl Into<String>, sites: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = (Site, Quantity)>,
    {
        let mut lat = Lattice::new(name);
        for (s, q) in sites {
            lat.add_assign(s, q)?;
        }
        Ok(lat)
    }

    /// Takes ownership of already sorted, deduplicated, nonzero entries.
    pub(crate) fn from_sorted_entries(name: String, iteration: u64, entries: Vec<Entry>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| !is_zero(e.1)));
        Lattice {
            name,
            iteration,
            storage: Storage::Sparse(SparseFrame { entries }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn set_iteration(&mut self, n: u64) {
        self.iteration = n;
    }

    pub fn backend(&self) -> Backend {
        match &self.storage {
            Storage::Sparse(_) => Backend::Sparse,
            Storage::Dense(d) => Backend::Dense(d.bounds),
        }
    }

    /// Empty lattice with the same name, backend and iteration.
    pub fn empty_like(&self) -> Self {
        let mut l = Lattice::with_backend(self.name.clone(), self.backend());
        l.iteration = self.iteration;
        l
    }

    /// Stored quantity, or exact zero when the site is absent.
    pub fn get(&self, site: Site) -> Quantity {
        match &self.storage {
            Storage::Sparse(s) => s.get(site),
            Storage::Dense(d) => d.get(site),
        }
    }

    /// Overwrites a site; zero removes it.
    pub fn set(&mut self, site: Site, q: Quantity) -> Result<(), LatticeError> {
        let old = self.get(site);
        if !is_finite(q) {
            return Err(LatticeError::NonFinite { site });
        }
        match &mut self.storage {
            Storage::Sparse(s) => {
                s.add_assign(site, -old);
                s.add_assign(site, q);
                Ok(())
            }
            Storage::Dense(d) => {
                if is_zero(q) {
                    d.clear_site(site);
                    Ok(())
                } else {
                    d.clear_site(site);
                    d.add_assign(site, q)
                }
            }
        }
    }

    pub fn add_assign(&mut self, site: Site, q: Quantity) -> Result<(), LatticeError> {
        if !is_finite(q) {
            return Err(LatticeError::NonFinite { site });
        }
        match &mut self.storage {
            Storage::Sparse(s) => {
                s.add_assign(site, q);
                Ok(())
            }
            Storage::Dense(d) => d.add_assign(site, q),
        }
    }

    /// Adds `factor * src[s]` to `self[s + offset]` for every nonzero site
    /// `s` of `src`.
    pub fn add_shifted_scaled(
        &mut self,
        src: &Lattice,
        offset: Site,
        factor: Quantity,
    ) -> Result<(), LatticeError> {
        if !is_finite(factor) {
            return Err(LatticeError::NonFinite { site: offset });
        }
        match &mut self.storage {
            Storage::Sparse(dst) => {
                let src_entries = src.sparse_entries();
                let merged = sparse::merge_terms(&[
                    Term {
                        src: &dst.entries,
                        offset: Site::ORIGIN,
                        factor: real(1.0),
                    },
                    Term {
                        src: &src_entries,
                        offset,
                        factor,
                    },
                ])?;
                dst.entries = merged;
                Ok(())
            }
            Storage::Dense(dst) => dst.add_shifted_from(src.source_view(), offset, factor),
        }
    }

    /// Nonzero sites in lexicographic order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (Site, Quantity)> + '_> {
        match &self.storage {
            Storage::Sparse(s) => Box::new(s.entries.iter().copied()),
            Storage::Dense(d) => Box::new(d.iter()),
        }
    }

    pub fn nonzero_count(&self) -> usize {
        match &self.storage {
            Storage::Sparse(s) => s.entries.len(),
            Storage::Dense(d) => d.nonzero_count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nonzero_count() == 0
    }

    /// Largest `|x| + |y| + |z|` over nonzero sites, or -1 when empty.
    pub fn l1_support_radius(&self) -> i64 {
        self.iter().map(|(s, _)| s.l1_norm()).max().unwrap_or(-1)
    }

    /// Same contents in sparse storage.
    pub fn to_sparse(&self) -> Lattice {
        Lattice::from_sorted_entries(
            self.name.clone(),
            self.iteration,
            self.sparse_entries().into_owned(),
        )
    }

    pub(crate) fn sparse_entries(&self) -> Cow<'_, [Entry]> {
        match &self.storage {
            Storage::Sparse(s) => Cow::Borrowed(&s.entries),
            Storage::Dense(d) => Cow::Owned(d.iter().collect()),
        }
    }

    pub(crate) fn source_view(&self) -> SourceView<'_> {
        match &self.storage {
            Storage::Sparse(s) => SourceView::Sparse(&s.entries),
            Storage::Dense(d) => SourceView::Dense(d),
        }
    }

    /// Keeps at most `budget` sites: those of largest magnitude, with ties
    /// going to the lexicographically smaller site.
    pub fn prune(&mut self, budget: usize) -> PruneReport {
        let entries = self.sparse_entries();
        let before = entries.len();
        if before <= budget {
            let smallest_kept = entries
                .iter()
                .map(|e| magnitude(e.1))
                .min_by(f64::total_cmp)
                .unwrap_or(0.0);
            return PruneReport {
                lattice: self.name.clone(),
                iteration: self.iteration,
                sites_before: before,
                sites_after: before,
                dropped_abs_sum: 0.0,
                smallest_kept,
            };
        }

        // The budget-th largest magnitude is the threshold; sites above it
        // stay, and ties at it are filled in site order.
        let mut quota_at_threshold = 0;
        let mut threshold = f64::INFINITY;
        if budget > 0 {
            // Magnitudes are non-negative, so their bit patterns sort like
            // the values.
            let mut bits: Vec<u64> = entries.iter().map(|e| magnitude(e.1).to_bits()).collect();
            let (larger, t, _) = bits.select_nth_unstable_by(budget - 1, |a, b| b.cmp(a));
            let t = *t;
            threshold = f64::from_bits(t);
            quota_at_threshold = budget - larger.iter().filter(|&&b| b > t).count();
        }

        let mut dropped_abs_sum = 0.0;
        let mut smallest_kept = f64::INFINITY;
        let keep: Vec<bool> = entries
            .iter()
            .map(|e| {
                let m = magnitude(e.1);
                let keep = match m.total_cmp(&threshold) {
                    std::cmp::Ordering::Greater => budget > 0,
                    std::cmp::Ordering::Equal if quota_at_threshold > 0 => {
                        quota_at_threshold -= 1;
                        true
                    }
                    _ => false,
                };
                if keep {
                    smallest_kept = smallest_kept.min(m);
                } else {
                    dropped_abs_sum += m;
                }
                keep
            })
            .collect();
        if budget == 0 {
            smallest_kept = 0.0;
        }
        drop(entries);

        match &mut self.storage {
            Storage::Sparse(s) => {
                let mut mask = keep.iter();
                s.entries.retain(|_| *mask.next().expect("one flag per entry"));
            }
            Storage::Dense(d) => {
                for ((site, _), k) in d.iter().collect::<Vec<_>>().into_iter().zip(&keep) {
                    if !k {
                        d.clear_site(site);
                    }
                }
            }
        }

        PruneReport {
            lattice: self.name.clone(),
            iteration: self.iteration,
            sites_before: before,
            sites_after: budget,
            dropped_abs_sum,
            smallest_kept,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn s(x: i32, y: i32, z: i32) -> Site {
        Site::new(x, y, z)
    }

    #[test]
    fn get_on_empty_and_after_set() {
        let mut l = Lattice::new("A");
        assert_eq!(l.get(s(4, -2, 9)), ZERO);
        l.set(Site::ORIGIN, real(1.0)).unwrap();
        assert_eq!(l.get(Site::ORIGIN), real(1.0));
        assert_eq!(l.get(s(1, 0, 0)), ZERO);
        l.set(Site::ORIGIN, ZERO).unwrap();
        assert!(l.is_empty());
    }

    #[test]
    fn exact_cancellation_evicts() {
        let mut l = Lattice::new("A");
        l.add_assign(Site::ORIGIN, real(1.0)).unwrap();
        l.add_assign(Site::ORIGIN, real(-1.0)).unwrap();
        assert_eq!(l.nonzero_count(), 0);
    }

    #[test]
    fn repeated_adds_accumulate() {
        let mut l = Lattice::new("A");
        l.add_assign(s(1, 2, 3), real(0.5)).unwrap();
        l.add_assign(s(1, 2, 3), real(0.5)).unwrap();
        assert_eq!(l.get(s(1, 2, 3)), real(1.0));
    }

    #[test]
    fn imaginary_unit_has_unit_magnitude() {
        let mut l = Lattice::new("A");
        l.add_assign(Site::ORIGIN, Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(magnitude(l.get(Site::ORIGIN)), 1.0);
    }

    #[test]
    fn non_finite_rejected() {
        let mut l = Lattice::new("A");
        assert!(l.add_assign(Site::ORIGIN, real(f64::NAN)).is_err());
        assert!(l.add_assign(Site::ORIGIN, real(f64::INFINITY)).is_err());
        assert!(l.is_empty());
        let src = Lattice::from_sites("B", [(Site::ORIGIN, real(1.0))]).unwrap();
        assert!(l.add_shifted_scaled(&src, Site::ORIGIN, real(f64::NAN)).is_err());
    }

    #[test]
    fn single_site_shift() {
        let p = 0.125;
        let src = Lattice::from_sites("src", [(Site::ORIGIN, real(1.0))]).unwrap();
        let mut dst = Lattice::new("dst");
        dst.add_shifted_scaled(&src, s(0, 1, 0), real(p)).unwrap();
        assert_eq!(dst.iter().collect::<Vec<_>>(), vec![(s(0, 1, 0), real(p))]);
    }

    #[test]
    fn identity_entry_copies() {
        let src = Lattice::from_sites(
            "src",
            [(s(1, 0, 0), real(2.5)), (s(-3, 2, 1), Complex64::new(0.0, -1.0))],
        )
        .unwrap();
        let mut dst = Lattice::new("dst");
        dst.add_shifted_scaled(&src, Site::ORIGIN, real(1.0)).unwrap();
        assert_eq!(
            dst.iter().collect::<Vec<_>>(),
            src.iter().collect::<Vec<_>>()
        );
    }

    #[test]
    fn stencil_arm_expansion() {
        // src = {(0,-1,0): p, (0,1,0): -p}, shifted by +y and scaled by p:
        // (0,-1,0) -> (0,0,0) with p*p, (0,1,0) -> (0,2,0) with -p*p.
        let p = 0.085424542921;
        let src =
            Lattice::from_sites("src", [(s(0, -1, 0), real(p)), (s(0, 1, 0), real(-p))]).unwrap();
        let mut dst = Lattice::new("dst");
        dst.add_shifted_scaled(&src, s(0, 1, 0), real(p)).unwrap();
        assert_eq!(
            dst.iter().collect::<Vec<_>>(),
            vec![(s(0, 0, 0), real(p * p)), (s(0, 2, 0), real(-(p * p)))]
        );
    }

    #[test]
    fn support_radius() {
        assert_eq!(Lattice::new("A").l1_support_radius(), -1);
        let l = Lattice::from_sites("A", [(Site::ORIGIN, real(1.0))]).unwrap();
        assert_eq!(l.l1_support_radius(), 0);
        let l = Lattice::from_sites("A", [(s(0, 1, 0), real(1.0)), (s(0, 0, -1), real(2.0))])
            .unwrap();
        assert_eq!(l.l1_support_radius(), 1);
    }

    #[test]
    fn prune_keeps_largest() {
        let mut l = Lattice::from_sites(
            "A",
            [
                (s(0, 0, 0), real(3.0)),
                (s(1, 0, 0), real(-2.0)),
                (s(2, 0, 0), real(1.0)),
            ],
        )
        .unwrap();
        let r = l.prune(2);
        assert_eq!(r.sites_before, 3);
        assert_eq!(r.sites_after, 2);
        assert_eq!(r.dropped_abs_sum, 1.0);
        assert_eq!(r.smallest_kept, 2.0);
        assert_eq!(l.get(s(2, 0, 0)), ZERO);
        assert_eq!(l.get(s(1, 0, 0)), real(-2.0));
    }

    #[test]
    fn prune_under_budget_is_noop() {
        let mut l = Lattice::from_sites("A", [(s(0, 0, 0), real(3.0))]).unwrap();
        let before = l.clone();
        let r = l.prune(5);
        assert_eq!(r.sites_before, r.sites_after);
        assert_eq!(r.dropped_abs_sum, 0.0);
        assert_eq!(l, before);
    }

    #[test]
    fn prune_tie_break_is_lexicographic() {
        let mut l =
            Lattice::from_sites("A", [(s(0, 0, 1), real(1.0)), (s(0, 0, -1), real(-1.0))]).unwrap();
        l.prune(1);
        assert_eq!(l.iter().map(|e| e.0).collect::<Vec<_>>(), vec![s(0, 0, -1)]);
    }

    #[test]
    fn prune_to_zero() {
        let mut l = Lattice::from_sites("A", [(s(0, 0, 1), real(1.0))]).unwrap();
        let r = l.prune(0);
        assert!(l.is_empty());
        assert_eq!(r.sites_after, 0);
        assert_eq!(r.dropped_abs_sum, 1.0);
    }

    #[test]
    fn dense_prune_matches_sparse() {
        let sites = [
            (s(0, 0, 0), real(3.0)),
            (s(1, 0, 0), real(-2.0)),
            (s(-1, 1, 0), real(2.0)),
            (s(0, 0, -1), real(0.5)),
        ];
        let mut sp = Lattice::from_sites("A", sites).unwrap();
        let mut de = Lattice::dense("A", Bounds::cube(2));
        for (site, q) in sites {
            de.add_assign(site, q).unwrap();
        }
        assert_eq!(sp.prune(2), de.prune(2));
        assert_eq!(sp.iter().collect::<Vec<_>>(), de.iter().collect::<Vec<_>>());
    }
}
