//! Table-driven iteration over a set of named lattices.
//!
//! One iteration starts every destination frame at zero and applies, in
//! table order, `dst[s + offset] += factor * src[s]` with all sources read
//! from the previous frame. Nothing carries over implicitly: a lattice that
//! keeps its value needs an identity entry (itself, offset 0, factor 1).

use std::fmt;
use std::str::FromStr;

use crate::lattice::sparse::{self, Term};
use crate::lattice::{self, Backend, Lattice, LatticeError, PruneReport, Quantity, Site};
use crate::par;

/// `destination[s + offset] += factor * source[s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingEntry {
    pub source: String,
    pub destination: String,
    pub offset: Site,
    pub factor: Quantity,
}

impl CouplingEntry {
    pub fn new(
        source: impl Into<String>,
        destination: impl Into<String>,
        offset: Site,
        factor: Quantity,
    ) -> Self {
        CouplingEntry {
            source: source.into(),
            destination: destination.into(),
            offset,
            factor,
        }
    }
}

/// Ordered coupling entries. Order fixes the floating-point accumulation
/// sequence at each destination site, not the mathematical result.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CouplingTable {
    entries: Vec<CouplingEntry>,
}

impl CouplingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: CouplingEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[CouplingEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<CouplingEntry> for CouplingTable {
    fn from_iter<I: IntoIterator<Item = CouplingEntry>>(iter: I) -> Self {
        CouplingTable {
            entries: iter.into_iter().collect(),
        }
    }
}

/// A problem with one table entry, by position.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    UnknownSource { entry: usize, name: String },
    UnknownDestination { entry: usize, name: String },
    NonFiniteFactor { entry: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownSource { entry, name } => {
                write!(f, "entry {entry}: unknown source lattice `{name}`")
            }
            Violation::UnknownDestination { entry, name } => {
                write!(f, "entry {entry}: unknown destination lattice `{name}`")
            }
            Violation::NonFiniteFactor { entry } => write!(f, "entry {entry}: factor is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid coupling table: {}", join(.0))]
    InvalidTable(Vec<Violation>),
    #[error("non-finite value in `{lattice}` at site ({site}) during iteration {iteration}")]
    NonFinite {
        iteration: u64,
        lattice: String,
        site: Site,
    },
    #[error("lattice `{lattice}`: {source}")]
    Lattice {
        lattice: String,
        source: LatticeError,
    },
    #[error("duplicate lattice name `{0}`")]
    DuplicateLattice(String),
    #[error("lattice `{name}` is at iteration {found}, expected {expected}")]
    IterationMismatch {
        name: String,
        expected: u64,
        found: u64,
    },
    #[error("unknown probe lattice `{0}`")]
    UnknownProbe(String),
    #[error("prune budget must be at least 1")]
    ZeroBudget,
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Named lattices that all sit at the same iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineState {
    iteration: u64,
    lattices: Vec<Lattice>,
}

impl EngineState {
    pub fn new(lattices: Vec<Lattice>) -> Result<Self, EngineError> {
        let iteration = lattices.first().map_or(0, Lattice::iteration);
        for (i, l) in lattices.iter().enumerate() {
            if lattices[..i].iter().any(|o| o.name() == l.name()) {
                return Err(EngineError::DuplicateLattice(l.name().to_string()));
            }
            if l.iteration() != iteration {
                return Err(EngineError::IterationMismatch {
                    name: l.name().to_string(),
                    expected: iteration,
                    found: l.iteration(),
                });
            }
        }
        Ok(EngineState {
            iteration,
            lattices,
        })
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn lattices(&self) -> &[Lattice] {
        &self.lattices
    }

    pub fn into_lattices(self) -> Vec<Lattice> {
        self.lattices
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lattices.iter().position(|l| l.name() == name)
    }

    pub fn lattice(&self, name: &str) -> Option<&Lattice> {
        self.index_of(name).map(|i| &self.lattices[i])
    }

    pub fn lattice_mut(&mut self, name: &str) -> Option<&mut Lattice> {
        self.index_of(name).map(move |i| &mut self.lattices[i])
    }

    pub fn total_nonzero(&self) -> usize {
        self.lattices.iter().map(Lattice::nonzero_count).sum()
    }

    /// Multiplies every stored quantity by `s`.
    pub fn scaled(&self, s: Quantity) -> Result<EngineState, EngineError> {
        let lattices = self
            .lattices
            .iter()
            .map(|l| {
                let mut out = l.empty_like();
                out.add_shifted_scaled(l, Site::ORIGIN, s)
                    .map_err(|e| lattice_error(l.name(), self.iteration, e))?;
                Ok(out)
            })
            .collect::<Result<_, EngineError>>()?;
        Ok(EngineState {
            iteration: self.iteration,
            lattices,
        })
    }

    /// Builds the next state from per-lattice frames produced in order.
    pub(crate) fn successor(&self, lattices: Vec<Lattice>) -> EngineState {
        debug_assert_eq!(lattices.len(), self.lattices.len());
        EngineState {
            iteration: self.iteration + 1,
            lattices,
        }
    }
}

pub(crate) fn lattice_error(name: &str, iteration: u64, e: LatticeError) -> EngineError {
    match e {
        LatticeError::NonFinite { site } => EngineError::NonFinite {
            iteration,
            lattice: name.to_string(),
            site,
        },
        other => EngineError::Lattice {
            lattice: name.to_string(),
            source: other,
        },
    }
}

/// Empty iff every entry names existing lattices and has a finite factor.
pub fn validate_table(table: &CouplingTable, state: &EngineState) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, e) in table.entries.iter().enumerate() {
        if state.index_of(&e.source).is_none() {
            out.push(Violation::UnknownSource {
                entry: i,
                name: e.source.clone(),
            });
        }
        if state.index_of(&e.destination).is_none() {
            out.push(Violation::UnknownDestination {
                entry: i,
                name: e.destination.clone(),
            });
        }
        if !lattice::is_finite(e.factor) {
            out.push(Violation::NonFiniteFactor { entry: i });
        }
    }
    out
}

/// Anything that can advance an [`EngineState`] by one iteration.
pub trait Stepper {
    fn step(&self, state: &EngineState) -> Result<EngineState, EngineError>;
}

impl Stepper for CouplingTable {
    fn step(&self, state: &EngineState) -> Result<EngineState, EngineError> {
        step(state, self)
    }
}

struct Resolved {
    source: usize,
    offset: Site,
    factor: Quantity,
}

/// One simultaneous iteration of `table` over `state`.
pub fn step(state: &EngineState, table: &CouplingTable) -> Result<EngineState, EngineError> {
    let violations = validate_table(table, state);
    if !violations.is_empty() {
        return Err(EngineError::InvalidTable(violations));
    }
    let mut per_dst: Vec<Vec<Resolved>> = (0..state.lattices.len()).map(|_| Vec::new()).collect();
    for e in &table.entries {
        let d = state.index_of(&e.destination).expect("validated");
        per_dst[d].push(Resolved {
            source: state.index_of(&e.source).expect("validated"),
            offset: e.offset,
            factor: e.factor,
        });
    }
    let next = state.iteration + 1;
    let jobs: Vec<(usize, Vec<Resolved>)> = per_dst.into_iter().enumerate().collect();
    let frames = par::map_collect(jobs, |(d, terms)| {
        let prev = &state.lattices[d];
        next_frame(state, prev, &terms, next)
    });
    let lattices = frames.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(state.successor(lattices))
}

fn next_frame(
    state: &EngineState,
    prev: &Lattice,
    terms: &[Resolved],
    next: u64,
) -> Result<Lattice, EngineError> {
    let wrap = |e| lattice_error(prev.name(), next, e);
    match prev.backend() {
        Backend::Sparse => {
            let sources: Vec<_> = terms
                .iter()
                .map(|t| state.lattices[t.source].sparse_entries())
                .collect();
            let merge: Vec<Term<'_>> = terms
                .iter()
                .zip(&sources)
                .map(|(t, src)| Term {
                    src,
                    offset: t.offset,
                    factor: t.factor,
                })
                .collect();
            let entries = sparse::merge_terms(&merge).map_err(wrap)?;
            Ok(Lattice::from_sorted_entries(
                prev.name().to_string(),
                next,
                entries,
            ))
        }
        Backend::Dense(_) => {
            let mut out = prev.empty_like();
            out.set_iteration(next);
            for t in terms {
                out.add_shifted_scaled(&state.lattices[t.source], t.offset, t.factor)
                    .map_err(wrap)?;
            }
            Ok(out)
        }
    }
}

/// Memory bound applied after every iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrunePolicy {
    pub enabled: bool,
    /// Maximum stored sites per lattice.
    pub per_lattice_budget: usize,
}

impl PrunePolicy {
    pub fn disabled() -> Self {
        PrunePolicy {
            enabled: false,
            per_lattice_budget: usize::MAX,
        }
    }

    pub fn budget(per_lattice_budget: usize) -> Result<Self, EngineError> {
        if per_lattice_budget == 0 {
            return Err(EngineError::ZeroBudget);
        }
        Ok(PrunePolicy {
            enabled: true,
            per_lattice_budget,
        })
    }
}

impl Default for PrunePolicy {
    fn default() -> Self {
        Self::disabled()
    }
}

/// A `(lattice, site)` pair whose value is recorded every iteration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Probe {
    pub lattice: String,
    pub site: Site,
}

impl Probe {
    pub fn new(lattice: impl Into<String>, site: Site) -> Self {
        Probe {
            lattice: lattice.into(),
            site,
        }
    }
}

impl fmt::Display for Probe {
    /// `LAT(x,y,z)`, the column label used in exported series.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.lattice, self.site)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected a probe as LAT:x,y,z or LAT(x,y,z), got `{0}`")]
pub struct ParseProbeError(pub String);

impl FromStr for Probe {
    type Err = ParseProbeError;

    /// Accepts `LAT:x,y,z` (command line) and `LAT(x,y,z)` (column label).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseProbeError(s.to_string());
        let (name, coords) = if let Some((n, rest)) = s.split_once(':') {
            (n, rest)
        } else if let Some((n, rest)) = s.split_once('(') {
            (n, rest.strip_suffix(')').ok_or_else(err)?)
        } else {
            return Err(err());
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(err());
        }
        let site = coords.parse().map_err(|_| err())?;
        Ok(Probe::new(name, site))
    }
}

/// Per-iteration values of one probe, starting at the initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    pub probe: Probe,
    pub values: Vec<Quantity>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunRecord {
    pub start_iteration: u64,
    pub steps: u64,
    pub probes: Vec<ProbeRecord>,
    pub prune_reports: Vec<PruneReport>,
}

impl RunRecord {
    pub fn probe(&self, probe: &Probe) -> Option<&ProbeRecord> {
        self.probes.iter().find(|p| &p.probe == probe)
    }
}

/// Iterates `table` `steps` times, advancing `state` in place.
pub fn run(
    state: &mut EngineState,
    table: &CouplingTable,
    steps: u64,
    probes: &[Probe],
    policy: PrunePolicy,
) -> Result<RunRecord, EngineError> {
    let violations = validate_table(table, state);
    if !violations.is_empty() {
        return Err(EngineError::InvalidTable(violations));
    }
    run_with(state, table, steps, probes, policy)
}

/// [`run`] with any [`Stepper`].
pub fn run_with<S: Stepper + ?Sized>(
    state: &mut EngineState,
    stepper: &S,
    steps: u64,
    probes: &[Probe],
    policy: PrunePolicy,
) -> Result<RunRecord, EngineError> {
    if policy.enabled && policy.per_lattice_budget == 0 {
        return Err(EngineError::ZeroBudget);
    }
    let slots = probes
        .iter()
        .map(|p| {
            state
                .index_of(&p.lattice)
                .ok_or_else(|| EngineError::UnknownProbe(p.lattice.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut record = RunRecord {
        start_iteration: state.iteration,
        steps,
        probes: probes
            .iter()
            .map(|p| ProbeRecord {
                probe: p.clone(),
                values: Vec::with_capacity(steps as usize + 1),
            })
            .collect(),
        prune_reports: Vec::new(),
    };
    let sample = |state: &EngineState, record: &mut RunRecord| {
        for (rec, &slot) in record.probes.iter_mut().zip(&slots) {
            rec.values.push(state.lattices[slot].get(rec.probe.site));
        }
    };
    sample(state, &mut record);
    for _ in 0..steps {
        *state = stepper.step(state)?;
        if policy.enabled {
            for lat in &mut state.lattices {
                if lat.nonzero_count() > policy.per_lattice_budget {
                    record
                        .prune_reports
                        .push(lat.prune(policy.per_lattice_budget));
                }
            }
        }
        sample(state, &mut record);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{real, ZERO};

    fn state_ab() -> EngineState {
        let a = Lattice::from_sites(
            "A",
            [(Site::ORIGIN, real(1.0)), (Site::new(1, -1, 2), real(-0.75))],
        )
        .unwrap();
        EngineState::new(vec![a, Lattice::new("B")]).unwrap()
    }

    #[test]
    fn validation_reports_each_problem() {
        let st = state_ab();
        let t: CouplingTable = [
            CouplingEntry::new("A", "B", Site::ORIGIN, real(1.0)),
            CouplingEntry::new("Q", "B", Site::ORIGIN, real(1.0)),
            CouplingEntry::new("A", "A", Site::ORIGIN, real(f64::NAN)),
        ]
        .into_iter()
        .collect();
        let v = validate_table(&t, &st);
        assert_eq!(
            v,
            vec![
                Violation::UnknownSource {
                    entry: 1,
                    name: "Q".into()
                },
                Violation::NonFiniteFactor { entry: 2 },
            ]
        );
        assert!(matches!(step(&st, &t), Err(EngineError::InvalidTable(_))));
    }

    #[test]
    fn empty_table_clears_everything() {
        let st = state_ab();
        let next = step(&st, &CouplingTable::new()).unwrap();
        assert_eq!(next.iteration(), 1);
        assert!(next.lattices().iter().all(Lattice::is_empty));
        assert!(next.lattices().iter().all(|l| l.iteration() == 1));
    }

    #[test]
    fn identity_entry_persists() {
        let st = state_ab();
        let t: CouplingTable = [CouplingEntry::new("A", "A", Site::ORIGIN, real(1.0))]
            .into_iter()
            .collect();
        let next = step(&st, &t).unwrap();
        assert_eq!(
            next.lattice("A").unwrap().iter().collect::<Vec<_>>(),
            st.lattice("A").unwrap().iter().collect::<Vec<_>>()
        );
    }

    #[test]
    fn reads_come_from_previous_frame() {
        // A -> B and B -> A in one iteration swap roles rather than chain.
        let st = state_ab();
        let t: CouplingTable = [
            CouplingEntry::new("A", "B", Site::new(1, 0, 0), real(2.0)),
            CouplingEntry::new("B", "A", Site::ORIGIN, real(1.0)),
        ]
        .into_iter()
        .collect();
        let next = step(&st, &t).unwrap();
        assert!(next.lattice("A").unwrap().is_empty());
        assert_eq!(next.lattice("B").unwrap().get(Site::new(1, 0, 0)), real(2.0));
    }

    #[test]
    fn overflow_is_reported_with_iteration() {
        let a = Lattice::from_sites("A", [(Site::ORIGIN, real(1e300))]).unwrap();
        let mut st = EngineState::new(vec![a]).unwrap();
        let t: CouplingTable = [CouplingEntry::new("A", "A", Site::ORIGIN, real(1e10))]
            .into_iter()
            .collect();
        let err = run(&mut st, &t, 5, &[], PrunePolicy::disabled()).unwrap_err();
        assert_eq!(
            err,
            EngineError::NonFinite {
                iteration: 1,
                lattice: "A".into(),
                site: Site::ORIGIN
            }
        );
    }

    #[test]
    fn zero_steps_records_initial_values() {
        let mut st = state_ab();
        let probes = [Probe::new("A", Site::ORIGIN), Probe::new("B", Site::ORIGIN)];
        let rec = run(&mut st, &CouplingTable::new(), 0, &probes, PrunePolicy::disabled()).unwrap();
        assert_eq!(rec.probes[0].values, vec![real(1.0)]);
        assert_eq!(rec.probes[1].values, vec![ZERO]);
    }

    #[test]
    fn unknown_probe_rejected() {
        let mut st = state_ab();
        let r = run(
            &mut st,
            &CouplingTable::new(),
            1,
            &[Probe::new("Z", Site::ORIGIN)],
            PrunePolicy::disabled(),
        );
        assert_eq!(r, Err(EngineError::UnknownProbe("Z".into())));
    }

    #[test]
    fn state_construction_checks() {
        assert!(matches!(
            EngineState::new(vec![Lattice::new("A"), Lattice::new("A")]),
            Err(EngineError::DuplicateLattice(_))
        ));
        let mut b = Lattice::new("B");
        b.set_iteration(3);
        assert!(matches!(
            EngineState::new(vec![Lattice::new("A"), b]),
            Err(EngineError::IterationMismatch { .. })
        ));
        assert_eq!(PrunePolicy::budget(0), Err(EngineError::ZeroBudget));
    }

    #[test]
    fn probe_syntax() {
        let p: Probe = "Ex:0,1,-2".parse().unwrap();
        assert_eq!(p, Probe::new("Ex", Site::new(0, 1, -2)));
        assert_eq!(p.to_string(), "Ex(0,1,-2)");
        assert_eq!(p.to_string().parse::<Probe>().unwrap(), p);
        assert!("Ex".parse::<Probe>().is_err());
        assert!(":1,2,3".parse::<Probe>().is_err());
    }
}
