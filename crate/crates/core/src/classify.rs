//! Structural classifiers: determinism, reversibility, k-tunnel pairing,
//! door taxonomy and the twelve planar directed door cases.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::embedding::canonical_cycle;
use crate::gadget::{Gadget, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Directedness {
    Directed,
    Undirected,
    Mixed,
}

impl fmt::Display for Directedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Directedness::Directed => "directed",
            Directedness::Undirected => "undirected",
            Directedness::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpenMode {
    OpenRequired,
    OpenOptional,
}

impl fmt::Display for OpenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpenMode::OpenRequired => "open-required",
            OpenMode::OpenOptional => "open-optional",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DoorClass {
    pub directedness: Directedness,
    pub open_mode: OpenMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub deterministic: bool,
    pub reversible: bool,
    /// Location pairs (by index) when the gadget is a k-tunnel gadget.
    pub k_tunnel: Option<Vec<(usize, usize)>>,
    pub door_class: Option<DoorClass>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("missing-roles: gadget \"{0}\" has no location roles")]
    MissingRoles(String),
    #[error("not-a-door: {0}")]
    NotADoor(String),
    #[error("missing-embedding: gadget \"{0}\" has no planar embedding")]
    MissingEmbedding(String),
}

/// A tunnel (two locations) or a port (one location) of a door.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Passage {
    Port(usize),
    /// `(a, b, directed)`; when directed, `a` is the entrance.
    Tunnel(usize, usize, bool),
}

impl Passage {
    pub fn locations(&self) -> Vec<usize> {
        match *self {
            Passage::Port(l) => vec![l],
            Passage::Tunnel(a, b, _) => vec![a, b],
        }
    }
}

/// The open/traverse/close passages of a door-like gadget, read from roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoorParts {
    pub open: Passage,
    pub traverse: Passage,
    pub close: Option<Passage>,
}

fn tunnel_direction(g: &Gadget, a: usize, b: usize) -> Option<Passage> {
    let ab = g
        .transitions()
        .iter()
        .any(|t| t.from_location == a && t.to_location == b);
    let ba = g
        .transitions()
        .iter()
        .any(|t| t.from_location == b && t.to_location == a);
    match (ab, ba) {
        (true, true) => Some(Passage::Tunnel(a, b, false)),
        (true, false) => Some(Passage::Tunnel(a, b, true)),
        (false, true) => Some(Passage::Tunnel(b, a, true)),
        (false, false) => None,
    }
}

/// Splits a gadget's locations into door passages according to its roles.
pub fn door_parts(g: &Gadget) -> Result<DoorParts, ClassifyError> {
    let roles = g
        .roles()
        .ok_or_else(|| ClassifyError::MissingRoles(g.name().to_string()))?;
    let with = |r: Role| -> Vec<usize> { (0..roles.len()).filter(|&l| roles[l] == r).collect() };
    let not_door = |why: &str| ClassifyError::NotADoor(format!("{}: {why}", g.name()));
    if !with(Role::Other).is_empty() {
        return Err(not_door("locations with role other"));
    }
    let passage = |locs: Vec<usize>, what: &str| -> Result<Passage, ClassifyError> {
        match locs.as_slice() {
            [l] => Ok(Passage::Port(*l)),
            [a, b] => tunnel_direction(g, *a, *b).ok_or_else(|| not_door(&format!("{what} tunnel has no traversal"))),
            _ => Err(not_door(&format!("{what} needs one or two locations"))),
        }
    };
    let open = passage(with(Role::Open), "open")?;
    let traverse = passage(with(Role::Traverse), "traverse")?;
    if matches!(traverse, Passage::Port(_)) {
        return Err(not_door("traverse must be a tunnel"));
    }
    let close = match with(Role::Close) {
        v if v.is_empty() => None,
        v => {
            let p = passage(v, "close")?;
            if matches!(p, Passage::Port(_)) {
                return Err(not_door("close must be a tunnel"));
            }
            Some(p)
        }
    };
    Ok(DoorParts { open, traverse, close })
}

/// Directedness and open mode of a door-like gadget.
pub fn door_class(g: &Gadget) -> Result<DoorClass, ClassifyError> {
    let parts = door_parts(g)?;
    let mut dirs = Vec::new();
    for p in [Some(parts.open), Some(parts.traverse), parts.close]
        .into_iter()
        .flatten()
    {
        if let Passage::Tunnel(_, _, d) = p {
            dirs.push(d);
        }
    }
    let directedness = if dirs.iter().all(|&d| d) {
        Directedness::Directed
    } else if dirs.iter().all(|&d| !d) {
        Directedness::Undirected
    } else {
        Directedness::Mixed
    };
    let open_mode = match parts.open {
        Passage::Port(_) => OpenMode::OpenOptional,
        Passage::Tunnel(..) => OpenMode::OpenRequired,
    };
    Ok(DoorClass {
        directedness,
        open_mode,
    })
}

/// Each (state, location) has at most one successor and no port transitions.
pub fn is_deterministic(g: &Gadget) -> bool {
    let mut seen = BTreeSet::new();
    g.transitions()
        .iter()
        .all(|t| !t.is_port() && seen.insert((t.from_state, t.from_location)))
}

pub fn is_reversible(g: &Gadget) -> bool {
    let set: BTreeSet<_> = g
        .transitions()
        .iter()
        .map(|t| (t.from_state, t.from_location, t.to_state, t.to_location))
        .collect();
    g.transitions()
        .iter()
        .all(|t| set.contains(&(t.to_state, t.to_location, t.from_state, t.from_location)))
}

/// A perfect pairing of locations such that every transition stays within a
/// pair, if one exists.
pub fn tunnel_pairing(g: &Gadget) -> Option<Vec<(usize, usize)>> {
    let n = g.locations().len();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    for t in g.transitions().iter().filter(|t| !t.is_port()) {
        let (a, b) = (t.from_location, t.to_location);
        match (partner[a], partner[b]) {
            (None, None) => {
                partner[a] = Some(b);
                partner[b] = Some(a);
            }
            (Some(x), Some(y)) if x == b && y == a => {}
            _ => return None,
        }
    }
    let mut pairs = Vec::new();
    let mut loose = Vec::new();
    for (l, &q) in partner.iter().enumerate().take(n) {
        match q {
            Some(p) if p > l => pairs.push((l, p)),
            Some(_) => {}
            None => loose.push(l),
        }
    }
    if loose.len() % 2 == 1 {
        return None;
    }
    pairs.extend(loose.chunks(2).map(|c| (c[0], c[1])));
    pairs.sort_unstable();
    Some(pairs)
}

pub fn classify_structure(g: &Gadget) -> StructureReport {
    StructureReport {
        deterministic: is_deterministic(g),
        reversible: is_reversible(g),
        k_tunnel: tunnel_pairing(g),
        door_class: g.roles().and_then(|_| door_class(g).ok()),
    }
}

/// The twelve crossing-free planar directed doors, by port cycle. Uppercase
/// letters are entrances, lowercase exits; a lone `O` is an opening port.
pub const DOOR_CASE_NAMES: [&str; 12] = [
    "OcCTt", "OTtCc", "OCcTt", "OTtcC", "OtToCc", "OTtoCc", "OtTocC", "OTtocC", "OtcCT", "OTcCt", "OCTtc", "OcTtC",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanarDoorCase {
    /// Case number 1..=12.
    Case(u8),
    InternalCrossing,
}

impl PlanarDoorCase {
    pub fn name(&self) -> String {
        match self {
            PlanarDoorCase::Case(n) => {
                format!("Case {n}: {}", DOOR_CASE_NAMES[*n as usize - 1])
            }
            PlanarDoorCase::InternalCrossing => "internal crossing".to_string(),
        }
    }

    /// Catalog gadget name, e.g. `door-case-8-OTtocC`.
    pub fn gadget_name(&self) -> Option<String> {
        match self {
            PlanarDoorCase::Case(n) => Some(format!("door-case-{n}-{}", DOOR_CASE_NAMES[*n as usize - 1])),
            PlanarDoorCase::InternalCrossing => None,
        }
    }
}

impl fmt::Display for PlanarDoorCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn interleave(pos: &[usize], a: (usize, usize), b: (usize, usize)) -> bool {
    let (lo, hi) = {
        let (x, y) = (pos[a.0], pos[a.1]);
        (x.min(y), x.max(y))
    };
    let inside = |l: usize| pos[l] > lo && pos[l] < hi;
    inside(b.0) != inside(b.1)
}

/// Classifies a fully directed door with an embedding into one of the twelve
/// crossing-free cases, or reports an internal crossing.
pub fn classify_planar_door_case(g: &Gadget) -> Result<PlanarDoorCase, ClassifyError> {
    let parts = door_parts(g)?;
    let emb = g
        .embedding()
        .ok_or_else(|| ClassifyError::MissingEmbedding(g.name().to_string()))?;
    let not_door = |why: &str| ClassifyError::NotADoor(format!("{}: {why}", g.name()));
    let close = parts.close.ok_or_else(|| not_door("no close tunnel"))?;
    let n = g.locations().len();
    let mut letter = vec!['?'; n];
    let mut tunnels = Vec::new();
    for (p, up, low) in [(parts.open, 'O', 'o'), (parts.traverse, 'T', 't'), (close, 'C', 'c')] {
        match p {
            Passage::Port(l) => letter[l] = up,
            Passage::Tunnel(a, b, true) => {
                letter[a] = up;
                letter[b] = low;
                tunnels.push((a, b));
            }
            Passage::Tunnel(..) => return Err(not_door("door is not fully directed")),
        }
    }
    let pos = emb.positions(n);
    for i in 0..tunnels.len() {
        for j in i + 1..tunnels.len() {
            if interleave(&pos, tunnels[i], tunnels[j]) {
                return Ok(PlanarDoorCase::InternalCrossing);
            }
        }
    }
    let mut word: Vec<char> = emb.cycle().iter().map(|&l| letter[l]).collect();
    if let Passage::Tunnel(a, b, _) = parts.open {
        let d = pos[a].abs_diff(pos[b]);
        if d == 1 || d == n - 1 {
            word.retain(|&c| c != 'o');
        }
    }
    let canon = canonical_cycle(&word);
    for (i, name) in DOOR_CASE_NAMES.iter().enumerate() {
        let w: Vec<char> = name.chars().collect();
        if canonical_cycle(&w) == canon {
            return Ok(PlanarDoorCase::Case(i as u8 + 1));
        }
    }
    Err(not_door(&format!(
        "port cycle {} matches no case",
        word.iter().collect::<String>()
    )))
}
