//! Gadgets as finite transition systems over (state, location) pairs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::embedding::PlanarEmbedding;

/// Returns true for identifiers over `[A-Za-z0-9_]`.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Gadget, network and catalog names may also contain `-`.
pub fn is_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Role of a location inside a door-like gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Open,
    Traverse,
    Close,
    Other,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Open => "open",
            Role::Traverse => "traverse",
            Role::Close => "close",
            Role::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Some(match s {
            "open" => Role::Open,
            "traverse" => Role::Traverse,
            "close" => Role::Close,
            "other" => Role::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A transition written with identifiers, as it appears before validation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawTransition {
    pub from_state: String,
    pub from_location: String,
    pub to_state: String,
    pub to_location: String,
}

impl RawTransition {
    pub fn new(fs: &str, fl: &str, ts: &str, tl: &str) -> Self {
        RawTransition {
            from_state: fs.to_string(),
            from_location: fl.to_string(),
            to_state: ts.to_string(),
            to_location: tl.to_string(),
        }
    }
}

/// Unvalidated gadget description. [`Gadget::new`] turns it into the
/// index-based form used everywhere else.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawGadget {
    pub name: String,
    pub states: Vec<String>,
    pub locations: Vec<String>,
    pub transitions: Vec<RawTransition>,
    pub embedding: Option<Vec<String>>,
    pub roles: Option<Vec<(String, String)>>,
}

impl RawGadget {
    pub fn new(name: &str, states: &[&str], locations: &[&str]) -> Self {
        RawGadget {
            name: name.to_string(),
            states: states.iter().map(|s| s.to_string()).collect(),
            locations: locations.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn transition(mut self, fs: &str, fl: &str, ts: &str, tl: &str) -> Self {
        self.transitions.push(RawTransition::new(fs, fl, ts, tl));
        self
    }

    /// Adds both directions of an undirected tunnel with the same state effect.
    pub fn undirected(self, fs: &str, a: &str, ts: &str, b: &str) -> Self {
        self.transition(fs, a, ts, b).transition(fs, b, ts, a)
    }

    pub fn embedding(mut self, cycle: &[&str]) -> Self {
        self.embedding = Some(cycle.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn roles(mut self, roles: &[(&str, &str)]) -> Self {
        self.roles = Some(roles.iter().map(|(l, r)| (l.to_string(), r.to_string())).collect());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Violation {
    InvalidName(String),
    InvalidIdentifier(String),
    NoStates,
    DuplicateState(String),
    DuplicateLocation(String),
    UnknownState(String),
    UnknownLocation(String),
    DuplicateTransition(String),
    EmbeddingNotPermutation(String),
    UnknownRole { location: String, role: String },
    RoleLocationUnknown(String),
    MissingRole(String),
    DuplicateRole(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidName(s) => write!(f, "invalid-name \"{s}\""),
            Violation::InvalidIdentifier(s) => write!(f, "invalid-identifier \"{s}\""),
            Violation::NoStates => write!(f, "no-states"),
            Violation::DuplicateState(s) => write!(f, "duplicate-state \"{s}\""),
            Violation::DuplicateLocation(s) => write!(f, "duplicate-location \"{s}\""),
            Violation::UnknownState(s) => write!(f, "unknown-state \"{s}\""),
            Violation::UnknownLocation(s) => write!(f, "unknown-location \"{s}\""),
            Violation::DuplicateTransition(s) => write!(f, "duplicate-transition {s}"),
            Violation::EmbeddingNotPermutation(s) => {
                write!(f, "embedding-not-permutation ({s})")
            }
            Violation::UnknownRole { location, role } => {
                write!(f, "unknown-role \"{role}\" for \"{location}\"")
            }
            Violation::RoleLocationUnknown(s) => write!(f, "role-for-unknown-location \"{s}\""),
            Violation::MissingRole(s) => write!(f, "missing-role \"{s}\""),
            Violation::DuplicateRole(s) => write!(f, "duplicate-role \"{s}\""),
        }
    }
}

/// Checks every gadget invariant and reports all violations found.
pub fn validate_gadget(g: &RawGadget) -> Vec<Violation> {
    let mut out = Vec::new();
    if !is_name(&g.name) {
        out.push(Violation::InvalidName(g.name.clone()));
    }
    if g.states.is_empty() {
        out.push(Violation::NoStates);
    }
    let mut seen = HashSet::new();
    for s in &g.states {
        if !is_identifier(s) {
            out.push(Violation::InvalidIdentifier(s.clone()));
        }
        if !seen.insert(s.as_str()) {
            out.push(Violation::DuplicateState(s.clone()));
        }
    }
    let states: HashSet<&str> = g.states.iter().map(String::as_str).collect();
    let mut seen = HashSet::new();
    for l in &g.locations {
        if !is_identifier(l) {
            out.push(Violation::InvalidIdentifier(l.clone()));
        }
        if !seen.insert(l.as_str()) {
            out.push(Violation::DuplicateLocation(l.clone()));
        }
    }
    let locations: HashSet<&str> = g.locations.iter().map(String::as_str).collect();

    let mut seen = HashSet::new();
    for t in &g.transitions {
        for s in [&t.from_state, &t.to_state] {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownState(s.clone()));
            }
        }
        for l in [&t.from_location, &t.to_location] {
            if !locations.contains(l.as_str()) {
                out.push(Violation::UnknownLocation(l.clone()));
            }
        }
        if !seen.insert(t) {
            out.push(Violation::DuplicateTransition(format!(
                "[{}, {}, {}, {}]",
                t.from_state, t.from_location, t.to_state, t.to_location
            )));
        }
    }

    if let Some(cycle) = &g.embedding {
        let mut a: Vec<&str> = cycle.iter().map(String::as_str).collect();
        let mut b: Vec<&str> = g.locations.iter().map(String::as_str).collect();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            out.push(Violation::EmbeddingNotPermutation(cycle.join(", ")));
        }
    }

    if let Some(roles) = &g.roles {
        let mut assigned = HashSet::new();
        for (loc, role) in roles {
            if !locations.contains(loc.as_str()) {
                out.push(Violation::RoleLocationUnknown(loc.clone()));
            }
            if Role::parse(role).is_none() {
                out.push(Violation::UnknownRole {
                    location: loc.clone(),
                    role: role.clone(),
                });
            }
            if !assigned.insert(loc.as_str()) {
                out.push(Violation::DuplicateRole(loc.clone()));
            }
        }
        for l in &g.locations {
            if !assigned.contains(l.as_str()) {
                out.push(Violation::MissingRole(l.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid gadget \"{name}\": {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidGadget {
    pub name: String,
    pub violations: Vec<Violation>,
}

/// A transition between (state, location) pairs, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from_state: usize,
    pub from_location: usize,
    pub to_state: usize,
    pub to_location: usize,
}

impl Transition {
    pub fn new(from_state: usize, from_location: usize, to_state: usize, to_location: usize) -> Self {
        Transition {
            from_state,
            from_location,
            to_state,
            to_location,
        }
    }

    /// Same-location transitions model an opening port: the agent stays put.
    pub fn is_port(&self) -> bool {
        self.from_location == self.to_location
    }
}

/// A validated gadget. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    name: String,
    states: Vec<String>,
    locations: Vec<String>,
    transitions: Vec<Transition>,
    embedding: Option<PlanarEmbedding>,
    roles: Option<Vec<Role>>,
}

impl Gadget {
    pub fn new(raw: RawGadget) -> Result<Gadget, InvalidGadget> {
        let violations = validate_gadget(&raw);
        if !violations.is_empty() {
            return Err(InvalidGadget {
                name: raw.name,
                violations,
            });
        }
        let state_ix: BTreeMap<&str, usize> = raw.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let loc_ix: BTreeMap<&str, usize> = raw.locations.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let transitions = raw
            .transitions
            .iter()
            .map(|t| Transition {
                from_state: state_ix[t.from_state.as_str()],
                from_location: loc_ix[t.from_location.as_str()],
                to_state: state_ix[t.to_state.as_str()],
                to_location: loc_ix[t.to_location.as_str()],
            })
            .collect();
        let embedding = raw
            .embedding
            .as_ref()
            .map(|cycle| PlanarEmbedding::new(cycle.iter().map(|l| loc_ix[l.as_str()]).collect()));
        let roles = raw.roles.as_ref().map(|roles| {
            let mut out = vec![Role::Other; raw.locations.len()];
            for (l, r) in roles {
                out[loc_ix[l.as_str()]] = Role::parse(r).expect("validated");
            }
            out
        });
        Ok(Gadget {
            name: raw.name,
            states: raw.states,
            locations: raw.locations,
            transitions,
            embedding,
            roles,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn embedding(&self) -> Option<&PlanarEmbedding> {
        self.embedding.as_ref()
    }

    pub fn roles(&self) -> Option<&[Role]> {
        self.roles.as_deref()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn location_name(&self, l: usize) -> &str {
        &self.locations[l]
    }

    pub fn with_name(&self, name: &str) -> Gadget {
        Gadget {
            name: name.to_string(),
            ..self.clone()
        }
    }

    /// Copy with a different embedding, or none.
    pub fn with_embedding(&self, embedding: Option<PlanarEmbedding>) -> Gadget {
        Gadget {
            embedding,
            ..self.clone()
        }
    }

    /// Converts back to the identifier-based description.
    pub fn to_raw(&self) -> RawGadget {
        RawGadget {
            name: self.name.clone(),
            states: self.states.clone(),
            locations: self.locations.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| {
                    RawTransition::new(
                        &self.states[t.from_state],
                        &self.locations[t.from_location],
                        &self.states[t.to_state],
                        &self.locations[t.to_location],
                    )
                })
                .collect(),
            embedding: self
                .embedding
                .as_ref()
                .map(|e| e.cycle().iter().map(|&l| self.locations[l].clone()).collect()),
            roles: self.roles.as_ref().map(|roles| {
                roles
                    .iter()
                    .enumerate()
                    .map(|(l, r)| (self.locations[l].clone(), r.as_str().to_string()))
                    .collect()
            }),
        }
    }

    /// Successors of a (state, location) pair, in declaration order.
    pub fn successors(&self, state: usize, location: usize) -> impl Iterator<Item = &Transition> {
        self.transitions
            .iter()
            .filter(move |t| t.from_state == state && t.from_location == location)
    }

    /// States reachable from `s0` through any sequence of transitions.
    pub fn reachable_states(&self, s0: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([s0]);
        let mut stack = vec![s0];
        while let Some(s) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.from_state == s) {
                if seen.insert(t.to_state) {
                    stack.push(t.to_state);
                }
            }
        }
        seen
    }
}

/// Transitive closure of the state-location graph. Reflexive pairs are
/// included. The closure lists the original transitions first (in order),
/// then the added pairs sorted by (state, location) source and target.
pub fn transitive_closure(g: &Gadget) -> Gadget {
    let n_loc = g.locations.len();
    let n = g.states.len() * n_loc;
    let node = |s: usize, l: usize| s * n_loc + l;
    let mut adj = vec![Vec::new(); n];
    for t in &g.transitions {
        adj[node(t.from_state, t.from_location)].push(node(t.to_state, t.to_location));
    }
    let mut present: HashSet<Transition> = g.transitions.iter().copied().collect();
    let mut transitions = g.transitions.clone();
    for src in 0..n {
        let mut seen = vec![false; n];
        seen[src] = true;
        let mut stack = vec![src];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        for (dst, _) in seen.iter().enumerate().filter(|(_, &r)| r) {
            let t = Transition::new(src / n_loc, src % n_loc, dst / n_loc, dst % n_loc);
            if present.insert(t) {
                transitions.push(t);
            }
        }
    }
    Gadget {
        transitions,
        ..g.clone()
    }
}
