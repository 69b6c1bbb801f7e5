//! Shipped gadgets and constructions, embedded at build time, with batch
//! verification and designated mutations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::embedding::equivalent_cycles;
use crate::format::{parse_construction, parse_gadget, ConstructionFile, FormatError};
use crate::gadget::{Gadget, RawTransition};
use crate::network::{build_network, GadgetLibrary, SearchError};
use crate::planarity::check_planarity;
use crate::simulation::{check_simulation, Verdict, VerifyError};

mod files {
    include!(concat!(env!("OUT_DIR"), "/catalog_files.rs"));
}

#[derive(Debug, Clone, Error)]
pub enum CatalogError {
    #[error("{file}: {error}")]
    Parse { file: String, error: FormatError },
    #[error("{file}: file stem differs from name \"{name}\"")]
    NameMismatch { file: String, name: String },
}

#[derive(Debug, Clone)]
pub struct CatalogGadget {
    pub gadget: Arc<Gadget>,
    pub notes: Option<String>,
    pub text: &'static str,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub file: ConstructionFile,
    pub text: &'static str,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    gadgets: BTreeMap<String, CatalogGadget>,
    entries: BTreeMap<String, CatalogEntry>,
}

impl Catalog {
    /// Parses the given (stem, text) tables.
    pub fn from_texts(
        gadgets: &[(&str, &'static str)],
        constructions: &[(&str, &'static str)],
    ) -> Result<Catalog, CatalogError> {
        let mut gs = BTreeMap::new();
        for &(stem, text) in gadgets {
            let f = parse_gadget(text).map_err(|error| CatalogError::Parse {
                file: format!("gadgets/{stem}.yaml"),
                error,
            })?;
            if f.gadget.name() != stem {
                return Err(CatalogError::NameMismatch {
                    file: format!("gadgets/{stem}.yaml"),
                    name: f.gadget.name().to_string(),
                });
            }
            gs.insert(
                stem.to_string(),
                CatalogGadget {
                    gadget: Arc::new(f.gadget),
                    notes: f.notes,
                    text,
                },
            );
        }
        let resolve = |n: &str| gs.get(n).map(|g: &CatalogGadget| Arc::clone(&g.gadget));
        let mut es = BTreeMap::new();
        for &(stem, text) in constructions {
            let file = parse_construction(text, &resolve).map_err(|error| CatalogError::Parse {
                file: format!("constructions/{stem}.yaml"),
                error,
            })?;
            if file.network.name() != stem {
                return Err(CatalogError::NameMismatch {
                    file: format!("constructions/{stem}.yaml"),
                    name: file.network.name().to_string(),
                });
            }
            es.insert(
                stem.to_string(),
                CatalogEntry {
                    name: stem.to_string(),
                    file,
                    text,
                },
            );
        }
        Ok(Catalog {
            gadgets: gs,
            entries: es,
        })
    }

    /// The catalog shipped with the crate.
    pub fn embedded() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| {
            Catalog::from_texts(files::GADGET_FILES, files::CONSTRUCTION_FILES)
                .unwrap_or_else(|e| panic!("embedded catalog is invalid: {e}"))
        })
    }

    pub fn list_gadgets(&self) -> Vec<&str> {
        self.gadgets.keys().map(String::as_str).collect()
    }

    pub fn list_constructions(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn gadget(&self, name: &str) -> Option<&Arc<Gadget>> {
        self.gadgets.get(name).map(|g| &g.gadget)
    }

    pub fn gadget_entry(&self, name: &str) -> Option<&CatalogGadget> {
        self.gadgets.get(name)
    }

    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn library(&self) -> GadgetLibrary {
        self.gadgets
            .iter()
            .map(|(k, g)| (k.clone(), Arc::clone(&g.gadget)))
            .collect()
    }

    pub fn resolve(&self, name: &str) -> Option<Arc<Gadget>> {
        self.gadget(name).cloned()
    }

    pub fn verify_entry(&self, e: &CatalogEntry, cap: usize) -> EntryReport {
        verify_construction(&e.name, &e.file, self.gadget(&e.file.target), cap)
    }

    /// Verifies every entry, spreading entries over `threads` workers.
    /// Reports come back in name order.
    pub fn verify_all(&self, cap: usize, threads: usize) -> Vec<EntryReport> {
        let entries: Vec<&CatalogEntry> = self.entries.values().collect();
        let threads = threads.clamp(1, entries.len().max(1));
        let mut out: Vec<Option<EntryReport>> = vec![None; entries.len()];
        std::thread::scope(|sc| {
            let chunks: Vec<Vec<(usize, &CatalogEntry)>> = (0..threads)
                .map(|t| {
                    entries
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| i % threads == t)
                        .map(|(i, e)| (i, *e))
                        .collect()
                })
                .collect();
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|chunk| {
                    sc.spawn(move || {
                        chunk
                            .into_iter()
                            .map(|(i, e)| (i, self.verify_entry(e, cap)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("verifier thread panicked") {
                    out[i] = Some(r);
                }
            }
        });
        out.into_iter().map(|r| r.expect("every entry verified")).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EntryReport {
    pub name: String,
    pub expected: String,
    /// Verdict, or the error that prevented one.
    pub verdict: Result<Verdict, String>,
    pub cap_exceeded: bool,
    pub expect_planar: bool,
    /// Planarity result, when planarity was expected.
    pub planar: Option<Result<bool, String>>,
    /// Whether the external order matches the target's port order, when
    /// planarity was expected.
    pub ports_ordered: Option<bool>,
    pub explored: usize,
    pub elapsed: Duration,
    pub trace: Vec<String>,
}

impl EntryReport {
    pub fn verdict_str(&self) -> String {
        match &self.verdict {
            Ok(v) => v.as_str().to_string(),
            Err(_) if self.cap_exceeded => "cap-exceeded".into(),
            Err(_) => "error".into(),
        }
    }

    /// Verdict and planarity both match the expectation.
    pub fn ok(&self) -> bool {
        let verdict_ok = matches!(&self.verdict, Ok(v) if v.as_str() == self.expected);
        let planar_ok =
            !self.expect_planar || (matches!(self.planar, Some(Ok(true))) && self.ports_ordered == Some(true));
        verdict_ok && planar_ok
    }

    pub fn planar_str(&self) -> &'static str {
        match &self.planar {
            None => "-",
            Some(Ok(true)) if self.ports_ordered == Some(false) => "misordered",
            Some(Ok(true)) => "planar",
            Some(Ok(false)) => "non-planar",
            Some(Err(_)) => "error",
        }
    }
}

/// Checks one construction against its target and, when expected, planarity.
pub fn verify_construction(name: &str, c: &ConstructionFile, target: Option<&Arc<Gadget>>, cap: usize) -> EntryReport {
    let t0 = Instant::now();
    let mut rep = EntryReport {
        name: name.to_string(),
        expected: c.expect_verdict.clone(),
        verdict: Err(String::new()),
        cap_exceeded: false,
        expect_planar: c.expect_planar,
        planar: None,
        ports_ordered: None,
        explored: 0,
        elapsed: Duration::ZERO,
        trace: Vec::new(),
    };
    let Some(target) = target else {
        rep.verdict = Err(format!("unknown target \"{}\"", c.target));
        return rep;
    };
    match check_simulation(&c.network, target, &c.target_state, &c.port_map, cap) {
        Ok(r) => {
            rep.verdict = Ok(r.verdict);
            rep.explored = r.explored;
            rep.trace = r.trace;
        }
        Err(e) => {
            rep.cap_exceeded = matches!(e, VerifyError::Search(SearchError::CapExceeded(_)));
            rep.verdict = Err(e.to_string());
        }
    }
    if c.expect_planar {
        rep.planar = Some(check_planarity(&c.network).map(|p| p.planar).map_err(|e| e.to_string()));
        rep.ports_ordered = Some(externals_follow_embedding(c, target));
    }
    rep.elapsed = t0.elapsed();
    rep
}

/// True when the network's externals, read through the port map, run around
/// the target's embedding (up to rotation and reflection). Targets without an
/// embedding and with at most two locations always match.
pub fn externals_follow_embedding(c: &ConstructionFile, target: &Gadget) -> bool {
    let ext = c.network.external_names();
    let mapped: Option<Vec<usize>> = ext
        .iter()
        .map(|x| {
            c.port_map
                .iter()
                .find(|(a, _)| a == x)
                .and_then(|(_, l)| target.location_index(l))
        })
        .collect();
    let Some(mapped) = mapped else {
        return false;
    };
    match target.embedding() {
        Some(e) => equivalent_cycles(&mapped, e.cycle()),
        None => target.locations().len() <= 2,
    }
}

/// Text table of a batch report; timings are optional so that output can be
/// byte-stable.
pub fn render_reports(reports: &[EntryReport], timings: bool) -> String {
    let mut out = String::new();
    let w = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    for r in reports {
        let _ = write!(
            out,
            "{:<w$}  {:<4}  {:<17}  {:<10}  explored={}",
            r.name,
            if r.ok() { "ok" } else { "FAIL" },
            r.verdict_str(),
            r.planar_str(),
            r.explored,
        );
        if timings {
            let _ = write!(out, "  ms={}", r.elapsed.as_millis());
        }
        out.push('\n');
        if !r.ok() {
            if let Err(e) = &r.verdict {
                let _ = writeln!(out, "    {e}");
            }
            for line in &r.trace {
                let _ = writeln!(out, "    {line}");
            }
        }
    }
    let bad = reports.iter().filter(|r| !r.ok()).count();
    let _ = writeln!(
        out,
        "{} entries, {} ok, {} mismatched",
        reports.len(),
        reports.len() - bad,
        bad
    );
    out
}

/// Single-edit mutation of a construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutation {
    /// Start an instance in a different state.
    InitialState { instance: String, state: String },
    /// Reverse the locations of one transition in an instance's gadget copy.
    FlipTransition { instance: String, transition: usize },
}

impl std::fmt::Display for Mutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mutation::InitialState { instance, state } => write!(f, "{instance} starts {state}"),
            Mutation::FlipTransition { instance, transition } => {
                write!(f, "{instance} transition {transition} reversed")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MutationError {
    #[error("unknown instance \"{0}\"")]
    UnknownInstance(String),
    #[error("unknown state \"{0}\"")]
    UnknownState(String),
    #[error("no transition {0}")]
    NoTransition(usize),
    #[error("mutation leaves the gadget unchanged or invalid")]
    Ineffective,
}

pub fn mutate(c: &ConstructionFile, m: &Mutation) -> Result<ConstructionFile, MutationError> {
    let net = &c.network;
    let (inst, i) = match m {
        Mutation::InitialState { instance, .. } | Mutation::FlipTransition { instance, .. } => {
            let i = net
                .instance_index(instance)
                .ok_or_else(|| MutationError::UnknownInstance(instance.clone()))?;
            (&net.instances()[i], i)
        }
    };
    let network = match m {
        Mutation::InitialState { state, .. } => {
            let s = inst
                .gadget
                .state_index(state)
                .ok_or_else(|| MutationError::UnknownState(state.clone()))?;
            if s == inst.initial {
                return Err(MutationError::Ineffective);
            }
            let mut states: Vec<usize> = net.instances().iter().map(|x| x.initial).collect();
            states[i] = s;
            net.with_initial_states(&states)
        }
        Mutation::FlipTransition { transition, .. } => {
            let g = &inst.gadget;
            let mut raw = g.to_raw();
            let t = raw
                .transitions
                .get_mut(*transition)
                .ok_or(MutationError::NoTransition(*transition))?;
            *t = RawTransition::new(&t.from_state, &t.to_location, &t.to_state, &t.from_location);
            raw.name = format!("{}-mutant", g.name());
            let mutant = Gadget::new(raw).map_err(|_| MutationError::Ineffective)?;
            let mut spec = net.to_spec();
            spec.instances[i].gadget = mutant.name().to_string();
            let mut lib = net.library();
            lib.insert(mutant.name().to_string(), Arc::new(mutant));
            build_network(&spec, &lib).map_err(|_| MutationError::Ineffective)?
        }
    };
    Ok(ConstructionFile { network, ..c.clone() })
}

/// Mutations that each entry's verdict must be sensitive to.
pub fn designated_mutations() -> Vec<(&'static str, Mutation)> {
    let st = |e: &'static str, i: &str, s: &str| {
        (
            e,
            Mutation::InitialState {
                instance: i.into(),
                state: s.into(),
            },
        )
    };
    let fl = |e: &'static str, i: &str, t: usize| {
        (
            e,
            Mutation::FlipTransition {
                instance: i.into(),
                transition: t,
            },
        )
    };
    DESIGNATED
        .iter()
        .map(|&(e, kind, i, arg)| match kind {
            "state" => st(e, i, arg),
            _ => fl(e, i, arg.parse().expect("transition index")),
        })
        .collect()
}

/// (entry, "state" | "flip", instance, new state | transition index).
const DESIGNATED: &[(&str, &str, &str, &str)] = &[
    ("sym-scd-open-loop", "flip", "d", "1"),
    ("open-loop", "state", "d", "open"),
    ("scd-diode", "flip", "d", "2"),
    ("scd-otc", "flip", "dt", "0"),
    ("apTC-to-crossingTC", "state", "g0", "closed"),
    ("parallel-to-SSCwO", "flip", "x", "2"),
    ("planar-scd-pspace-a", "state", "s0", "open"),
    ("case-2-scd", "flip", "d", "2"),
    ("scd-port-duplicator-planar", "flip", "a1", "0"),
    ("mixed-door-directed", "flip", "t1", "0"),
];

#[derive(Debug, Clone)]
pub struct MutationReport {
    pub entry: String,
    pub mutation: Mutation,
    /// Verdict of the mutated entry, or an error.
    pub verdict: Result<Verdict, String>,
}

impl MutationReport {
    /// The mutant was caught: it verifies and the verdict is a failure.
    pub fn caught(&self) -> bool {
        matches!(self.verdict, Ok(v) if v != Verdict::Pass)
    }
}

pub fn run_mutations(cat: &Catalog, cap: usize) -> Vec<MutationReport> {
    designated_mutations()
        .into_iter()
        .map(|(entry, mutation)| {
            let verdict = match cat.entry(entry) {
                None => Err(format!("unknown entry \"{entry}\"")),
                Some(e) => match mutate(&e.file, &mutation) {
                    Err(err) => Err(err.to_string()),
                    Ok(m) => {
                        let target = cat.gadget(&m.target);
                        let r = verify_construction(entry, &m, target, cap);
                        r.verdict
                    }
                },
            };
            MutationReport {
                entry: entry.to_string(),
                mutation,
                verdict,
            }
        })
        .collect()
}
