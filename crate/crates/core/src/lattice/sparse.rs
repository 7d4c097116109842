//! Sorted-vector storage and the shifted multi-way merge every step uses.

use super::quantity::{self, Quantity, ZERO};
use super::{LatticeError, Site};
use crate::par;

pub(crate) type Entry = (Site, Quantity);

/// Lexicographically sorted sites with nonzero quantities.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct SparseFrame {
    pub(crate) entries: Vec<Entry>,
}

impl SparseFrame {
    pub(crate) fn get(&self, site: Site) -> Quantity {
        match self.entries.binary_search_by(|e| e.0.cmp(&site)) {
            Ok(i) => self.entries[i].1,
            Err(_) => ZERO,
        }
    }

    pub(crate) fn add_assign(&mut self, site: Site, q: Quantity) {
        match self.entries.binary_search_by(|e| e.0.cmp(&site)) {
            Ok(i) => {
                let sum = self.entries[i].1 + q;
                if quantity::is_zero(sum) {
                    self.entries.remove(i);
                } else {
                    self.entries[i].1 = quantity::canonical(sum);
                }
            }
            Err(i) => {
                if !quantity::is_zero(q) {
                    self.entries.insert(i, (site, quantity::canonical(q)));
                }
            }
        }
    }
}

/// One addend of a merge: every entry of `src`, moved by `offset` and
/// multiplied by `factor`.
#[derive(Clone, Copy)]
pub(crate) struct Term<'a> {
    pub src: &'a [Entry],
    pub offset: Site,
    pub factor: Quantity,
}

/// Below this many input entries the merge runs as a single chunk.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Sums all terms into a fresh sorted frame.
///
/// At every destination site contributions are accumulated in term order,
/// starting from zero, so the result does not depend on how the output is
/// partitioned across threads.
pub(crate) fn merge_terms(terms: &[Term<'_>]) -> Result<Vec<Entry>, LatticeError> {
    merge_terms_with(terms, merge_chunk)
}

pub(crate) type ChunkKernel = fn(&[Term<'_>], &mut Vec<Entry>) -> Result<(), LatticeError>;

/// [`merge_terms`] with a caller-chosen kernel for each x-chunk. The kernel
/// must follow the same accumulation contract as [`merge_chunk`].
pub(crate) fn merge_terms_with(
    terms: &[Term<'_>],
    kernel: ChunkKernel,
) -> Result<Vec<Entry>, LatticeError> {
    for t in terms {
        check_shift(t)?;
    }
    let live: Vec<Term<'_>> = terms.iter().copied().filter(|t| !t.src.is_empty()).collect();
    if live.is_empty() {
        return Ok(Vec::new());
    }
    let total: usize = live.iter().map(|t| t.src.len()).sum();
    let lo = live.iter().map(|t| t.src[0].0.x + t.offset.x).min().unwrap();
    let hi = live
        .iter()
        .map(|t| t.src[t.src.len() - 1].0.x + t.offset.x)
        .max()
        .unwrap();

    if total < PARALLEL_THRESHOLD || par::threads() == 1 || lo == hi {
        let mut out = Vec::with_capacity(total);
        kernel(&live, &mut out)?;
        return Ok(out);
    }

    // Partition by destination x so chunks are contiguous in the output.
    let chunks = (par::threads() * 8).min((hi - lo + 1) as usize);
    let width = ((hi - lo + 1) as usize).div_ceil(chunks) as i32;
    let ranges: Vec<(i32, i32)> = (0..chunks as i32)
        .map(|c| (lo + c * width, (lo + (c + 1) * width - 1).min(hi)))
        .filter(|(a, b)| a <= b)
        .collect();
    let parts = par::map_collect(ranges, |(a, b)| {
        let sub: Vec<Term<'_>> = live
            .iter()
            .map(|t| {
                let start = t.src.partition_point(|e| e.0.x + t.offset.x < a);
                let end = t.src.partition_point(|e| e.0.x + t.offset.x <= b);
                Term {
                    src: &t.src[start..end],
                    ..*t
                }
            })
            .filter(|t| !t.src.is_empty())
            .collect();
        let mut out = Vec::with_capacity(sub.iter().map(|t| t.src.len()).sum());
        kernel(&sub, &mut out).map(|_| out)
    });
    let mut out = Vec::with_capacity(total);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Rejects terms whose shift would leave the `i32` coordinate range.
fn check_shift(t: &Term<'_>) -> Result<(), LatticeError> {
    if t.offset == Site::ORIGIN {
        return Ok(());
    }
    // x is sorted, so its extremes sit at the ends; y and z need a scan.
    for e in t.src {
        if e.0.checked_add(t.offset).is_none() {
            return Err(LatticeError::CoordinateOverflow {
                site: e.0,
                offset: t.offset,
            });
        }
    }
    Ok(())
}

fn merge_chunk(terms: &[Term<'_>], out: &mut Vec<Entry>) -> Result<(), LatticeError> {
    let mut pos = vec![0usize; terms.len()];
    let mut heads: Vec<Option<Site>> = terms
        .iter()
        .map(|t| t.src.first().map(|e| e.0 + t.offset))
        .collect();
    loop {
        let Some(next) = heads.iter().flatten().min().copied() else {
            return Ok(());
        };
        let mut acc = ZERO;
        for (k, t) in terms.iter().enumerate() {
            if heads[k] == Some(next) {
                acc += quantity::scale(t.factor, t.src[pos[k]].1);
                pos[k] += 1;
                heads[k] = t.src.get(pos[k]).map(|e| e.0 + t.offset);
            }
        }
        if !quantity::is_finite(acc) {
            return Err(LatticeError::NonFinite { site: next });
        }
        if !quantity::is_zero(acc) {
            out.push((next, quantity::canonical(acc)));
        }
    }
}

const END: Site = Site::new(i32::MAX, i32::MAX, i32::MAX);

/// Fixed-arity variant of [`merge_chunk`] for `K` or fewer terms. Uses a
/// sentinel head instead of `Option` and keeps cursors on the stack.
pub(crate) fn merge_chunk_fixed<const K: usize>(
    terms: &[Term<'_>],
    out: &mut Vec<Entry>,
) -> Result<(), LatticeError> {
    assert!(terms.len() <= K);
    // A shifted site equal to the sentinel cannot be represented here.
    if terms
        .iter()
        .any(|t| t.src.last().map(|e| e.0 + t.offset) == Some(END))
    {
        return merge_chunk(terms, out);
    }
    let n = terms.len();
    let mut pos = [0usize; K];
    let mut heads = [END; K];
    for k in 0..n {
        if let Some(e) = terms[k].src.first() {
            heads[k] = e.0 + terms[k].offset;
        }
    }
    loop {
        let mut next = END;
        for h in &heads[..n] {
            if *h < next {
                next = *h;
            }
        }
        if next == END {
            return Ok(());
        }
        let mut acc = ZERO;
        for k in 0..n {
            if heads[k] == next {
                let t = &terms[k];
                acc += quantity::scale(t.factor, t.src[pos[k]].1);
                pos[k] += 1;
                heads[k] = match t.src.get(pos[k]) {
                    Some(e) => e.0 + t.offset,
                    None => END,
                };
            }
        }
        if !quantity::is_finite(acc) {
            return Err(LatticeError::NonFinite { site: next });
        }
        if !quantity::is_zero(acc) {
            out.push((next, quantity::canonical(acc)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::quantity::real;

    fn frame(v: &[((i32, i32, i32), f64)]) -> Vec<Entry> {
        let mut e: Vec<Entry> = v.iter().map(|&(s, q)| (Site::from(s), real(q))).collect();
        e.sort_by_key(|x| x.0);
        e
    }

    #[test]
    fn merge_accumulates_in_term_order() {
        let a = frame(&[((0, 0, 0), 1.0), ((1, 0, 0), 2.0)]);
        let b = frame(&[((0, 0, 0), -1.0)]);
        let out = merge_terms(&[
            Term { src: &a, offset: Site::ORIGIN, factor: real(1.0) },
            Term { src: &b, offset: Site::new(1, 0, 0), factor: real(2.0) },
        ])
        .unwrap();
        assert_eq!(out, frame(&[((0, 0, 0), 1.0)]));
    }

    #[test]
    fn merge_flags_non_finite() {
        let a = frame(&[((0, 0, 0), f64::MAX)]);
        let err = merge_terms(&[Term { src: &a, offset: Site::ORIGIN, factor: real(4.0) }]);
        assert_eq!(err, Err(LatticeError::NonFinite { site: Site::ORIGIN }));
    }

    #[test]
    fn merge_rejects_coordinate_overflow() {
        let a = frame(&[((0, i32::MAX, 0), 1.0)]);
        let r = merge_terms(&[Term { src: &a, offset: Site::new(0, 1, 0), factor: real(1.0) }]);
        assert!(matches!(r, Err(LatticeError::CoordinateOverflow { .. })));
    }

    #[test]
    fn chunked_merge_matches_single_chunk() {
        // Large enough to take the partitioned path when threads > 1.
        let mut src = Vec::new();
        for x in -20..=20 {
            for y in -20..=20 {
                for z in -6..=6 {
                    let v = (x * 31 + y * 7 + z) as f64 * 0.125 + 0.0625;
                    src.push((Site::new(x, y, z), real(v)));
                }
            }
        }
        let terms = [
            Term { src: &src, offset: Site::ORIGIN, factor: real(1.0) },
            Term { src: &src, offset: Site::new(1, 0, 0), factor: real(0.3) },
            Term { src: &src, offset: Site::new(-1, 0, 0), factor: real(-0.3) },
            Term { src: &src, offset: Site::new(0, 0, 1), factor: real(0.7) },
        ];
        let a = merge_terms(&terms).unwrap();
        let mut b = Vec::new();
        merge_chunk(&terms, &mut b).unwrap();
        let mut c = Vec::new();
        merge_chunk_fixed::<4>(&terms, &mut c).unwrap();
        assert_eq!(a.len(), b.len());
        assert_eq!(b, c);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.0, q.0);
            assert_eq!(p.1.re.to_bits(), q.1.re.to_bits());
        }
    }
}
