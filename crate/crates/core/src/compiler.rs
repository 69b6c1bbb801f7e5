//! Door constructions: the universality compiler that builds any gadget
//! from directed open-required doors, and the pipeline that turns any door
//! into a directed open-required door.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::classify::{door_parts, DoorParts, Passage};
use crate::gadget::{Gadget, RawGadget};
use crate::network::{substitute, Endpoint, Network, NetworkBuilder, NetworkError, Realization, SubstituteError};

/// Default bound on emitted door instances.
pub const DEFAULT_BUDGET: usize = 4096;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("budget-exceeded: {needed} doors needed, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("not-open-required: \"{0}\" already has an opening port")]
    NotOpenRequired(String),
    #[error("not-a-door: {0}")]
    NotADoor(String),
    #[error("no-diode-available: \"{0}\" has no tunnel that can act as a diode")]
    NoDiodeAvailable(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Substitute(#[from] SubstituteError),
}

/// Declaration-order successor chains over `S x P` (state-major) and `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingContext {
    pub pairs: Vec<(usize, usize)>,
    pub ports: Vec<usize>,
}

impl OrderingContext {
    pub fn new(n_states: usize, n_ports: usize) -> Self {
        let pairs = (0..n_states).flat_map(|s| (0..n_ports).map(move |p| (s, p))).collect();
        OrderingContext {
            pairs,
            ports: (0..n_ports).collect(),
        }
    }

    pub fn first_pair(&self) -> (usize, usize) {
        self.pairs[0]
    }

    pub fn last_pair(&self) -> (usize, usize) {
        *self.pairs.last().unwrap()
    }

    pub fn next_pair(&self, sp: (usize, usize)) -> Option<(usize, usize)> {
        let i = self.pairs.iter().position(|&x| x == sp)?;
        self.pairs.get(i + 1).copied()
    }

    pub fn first_port(&self) -> usize {
        self.ports[0]
    }

    pub fn last_port(&self) -> usize {
        *self.ports.last().unwrap()
    }

    pub fn next_port(&self, p: usize) -> Option<usize> {
        let i = self.ports.iter().position(|&x| x == p)?;
        self.ports.get(i + 1).copied()
    }
}

/// Instance ids and external names of the universality construction.
pub struct DoorNamingScheme;

impl DoorNamingScheme {
    pub fn state_port(s: usize, p: usize) -> String {
        format!("D_s{s}_p{p}")
    }

    pub fn port(p: usize) -> String {
        format!("D_p{p}")
    }

    pub fn transition(t: usize) -> String {
        format!("D_t{t}")
    }

    pub fn external(location: &str) -> String {
        format!("E_{location}")
    }
}

/// Location names of a directed open-required door, by role.
#[derive(Debug, Clone)]
pub struct DoorPorts {
    pub o0: String,
    pub o1: String,
    pub t0: String,
    pub t1: String,
    pub c0: String,
    pub c1: String,
}

impl DoorPorts {
    pub fn of(door: &Gadget) -> Result<DoorPorts, CompileError> {
        let parts = door_parts(door).map_err(|e| CompileError::NotADoor(e.to_string()))?;
        let name = |l: usize| door.location_name(l).to_string();
        let tunnel = |p: Option<Passage>, what: &str| match p {
            Some(Passage::Tunnel(a, b, true)) => Ok((name(a), name(b))),
            _ => Err(CompileError::NotADoor(format!(
                "\"{}\" needs a directed {what} tunnel",
                door.name()
            ))),
        };
        let (o0, o1) = tunnel(Some(parts.open), "open")?;
        let (t0, t1) = tunnel(Some(parts.traverse), "traverse")?;
        let (c0, c1) = tunnel(parts.close, "close")?;
        Ok(DoorPorts { o0, o1, t0, t1, c0, c1 })
    }
}

/// (closed, open) states of a door: open is where the traverse tunnel works.
pub fn door_states(door: &Gadget) -> Result<(usize, usize), CompileError> {
    let parts = door_parts(door).map_err(|e| CompileError::NotADoor(e.to_string()))?;
    let t_locs = parts.traverse.locations();
    let passable: Vec<bool> = (0..door.states().len())
        .map(|s| {
            door.transitions().iter().any(|t| {
                t.from_state == s
                    && t_locs.contains(&t.from_location)
                    && t_locs.contains(&t.to_location)
                    && t.from_location != t.to_location
            })
        })
        .collect();
    let open = passable.iter().position(|&p| p);
    let closed = passable.iter().position(|&p| !p);
    match (closed, open) {
        (Some(c), Some(o)) if door.states().len() == 2 => Ok((c, o)),
        _ => Err(CompileError::NotADoor(format!(
            "\"{}\" needs exactly one open and one closed state",
            door.name()
        ))),
    }
}

/// Output of the universality compiler.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub network: Network,
    /// Network external -> target location.
    pub port_map: Vec<(String, String)>,
    pub ordering: OrderingContext,
}

/// Builds `g` (started in `s0`) from directed open-required doors, one per
/// state/location pair, per location and per transition.
pub fn compile_universal(g: &Gadget, s0: usize, door: &Arc<Gadget>, budget: usize) -> Result<Compiled, CompileError> {
    let n_s = g.states().len();
    let n_p = g.locations().len();
    let n_t = g.transitions().len();
    let needed = n_s * n_p + n_p + n_t;
    if needed > budget {
        return Err(CompileError::BudgetExceeded { needed, budget });
    }
    let dp = DoorPorts::of(door)?;
    let (closed, open) = door_states(door)?;
    let (closed, open) = (door.state_name(closed).to_string(), door.state_name(open).to_string());
    let ord = OrderingContext::new(n_s, n_p);
    let d_sp = |s: usize, p: usize| DoorNamingScheme::state_port(s, p);
    let d_p = DoorNamingScheme::port;
    let d_t = DoorNamingScheme::transition;
    let port = |id: &str, loc: &str| Endpoint::port(id, loc);
    let ext = |p: usize| DoorNamingScheme::external(g.location_name(p));

    let mut b = NetworkBuilder::new(&format!("universal-{}", g.name()));
    for &(s, p) in &ord.pairs {
        let st = if s == s0 { &open } else { &closed };
        b.instance(&d_sp(s, p), door, st);
    }
    for p in 0..n_p {
        b.instance(&d_p(p), door, &closed);
    }
    for t in 0..n_t {
        b.instance(&d_t(t), door, &closed);
    }
    for p in 0..n_p {
        b.external(&ext(p));
    }
    // E_p -- T0(D_{s,p}) for every s.
    for p in 0..n_p {
        for s in 0..n_s {
            b.connect(&[Endpoint::ext(&ext(p)), port(&d_sp(s, p), &dp.t0)]);
        }
    }
    // T1(D_{s0,p0}) -- O0(D_t); O1(D_t) -- O0(D_{p1}).
    for (k, t) in g.transitions().iter().enumerate() {
        b.connect(&[
            port(&d_sp(t.from_state, t.from_location), &dp.t1),
            port(&d_t(k), &dp.o0),
        ]);
        b.connect(&[port(&d_t(k), &dp.o1), port(&d_p(t.to_location), &dp.o0)]);
    }
    // O1(D_p) -- C0(D_{sf,pf}).
    let (sf, pf) = ord.first_pair();
    for p in 0..n_p {
        b.connect(&[port(&d_p(p), &dp.o1), port(&d_sp(sf, pf), &dp.c0)]);
    }
    // Close-all chain over S x P.
    for &sp in &ord.pairs {
        if let Some(nx) = ord.next_pair(sp) {
            b.connect(&[port(&d_sp(sp.0, sp.1), &dp.c1), port(&d_sp(nx.0, nx.1), &dp.c0)]);
        }
    }
    // C1(D_{sl,pl}) -- T0(D_t); T1(D_t) -- C0(D_t); C1(D_t) -- O0(D_{s1,pf}).
    let (sl, pl) = ord.last_pair();
    for (k, t) in g.transitions().iter().enumerate() {
        b.connect(&[port(&d_sp(sl, pl), &dp.c1), port(&d_t(k), &dp.t0)]);
        b.connect(&[port(&d_t(k), &dp.t1), port(&d_t(k), &dp.c0)]);
        b.connect(&[port(&d_t(k), &dp.c1), port(&d_sp(t.to_state, ord.first_port()), &dp.o0)]);
    }
    // Open-all chain per state, ending at the location doors.
    for s in 0..n_s {
        for p in 0..n_p {
            match ord.next_port(p) {
                Some(np) => {
                    b.connect(&[port(&d_sp(s, p), &dp.o1), port(&d_sp(s, np), &dp.o0)]);
                }
                None => {
                    for q in 0..n_p {
                        b.connect(&[port(&d_sp(s, p), &dp.o1), port(&d_p(q), &dp.t0)]);
                    }
                }
            }
        }
    }
    // T1(D_p) -- C0(D_p); C1(D_p) -- E_p.
    for p in 0..n_p {
        b.connect(&[port(&d_p(p), &dp.t1), port(&d_p(p), &dp.c0)]);
        b.connect(&[port(&d_p(p), &dp.c1), Endpoint::ext(&ext(p))]);
    }
    let network = b.build()?;
    let port_map = (0..n_p).map(|p| (ext(p), g.location_name(p).to_string())).collect();
    Ok(Compiled {
        network,
        port_map,
        ordering: ord,
    })
}

/// The one-state, one-tunnel diode.
pub fn diode_gadget() -> Gadget {
    Gadget::new(
        RawGadget::new("diode", &["s"], &["in", "out"])
            .transition("s", "in", "s", "out")
            .embedding(&["in", "out"]),
    )
    .expect("valid diode")
}

fn parts(door: &Gadget) -> Result<DoorParts, CompileError> {
    door_parts(door).map_err(|e| CompileError::NotADoor(e.to_string()))
}

/// Fuses both ends of the opening tunnel onto one external node `O`; every
/// other location is exposed under its own name.
pub fn open_optionalize(door: &Arc<Gadget>) -> Result<Network, CompileError> {
    let p = parts(door)?;
    let Passage::Tunnel(a, b, _) = p.open else {
        return Err(CompileError::NotOpenRequired(door.name().to_string()));
    };
    let (closed, _) = door_states(door)?;
    let mut nb = NetworkBuilder::new(&format!("open-loop-{}", door.name()));
    nb.instance("X", door, door.state_name(closed));
    nb.external("O");
    nb.connect(&[
        Endpoint::ext("O"),
        Endpoint::port("X", door.location_name(a)),
        Endpoint::port("X", door.location_name(b)),
    ]);
    for (l, name) in door.locations().iter().enumerate() {
        if l != a && l != b {
            nb.external(name);
            nb.connect(&[Endpoint::ext(name), Endpoint::port("X", name)]);
        }
    }
    Ok(nb.build()?)
}

/// A network over instances of `source` that behaves as a diode, with
/// externals `in` and `out`. A directed opening or closing tunnel is used
/// as is; otherwise the opening, traverse and closing passages are chained.
pub fn diode_network(source: &Arc<Gadget>) -> Result<Network, CompileError> {
    let p = parts(source)?;
    let (closed, _) = door_states(source)?;
    let st = source.state_name(closed);
    let name = |l: usize| source.location_name(l).to_string();
    let mut nb = NetworkBuilder::new(&format!("diode-from-{}", source.name()));
    nb.instance("X", source, st);
    nb.external("in").external("out");
    let always = [Some(p.open), p.close]
        .into_iter()
        .flatten()
        .find(|q| matches!(q, Passage::Tunnel(_, _, true)));
    if let Some(Passage::Tunnel(a, b, _)) = always {
        nb.connect(&[Endpoint::ext("in"), Endpoint::port("X", &name(a))]);
        nb.connect(&[Endpoint::ext("out"), Endpoint::port("X", &name(b))]);
        return Ok(nb.build()?);
    }
    let Some(Passage::Tunnel(c0, c1, _)) = p.close else {
        return Err(CompileError::NoDiodeAvailable(source.name().to_string()));
    };
    let Passage::Tunnel(t0, t1, _) = p.traverse else {
        return Err(CompileError::NoDiodeAvailable(source.name().to_string()));
    };
    match p.open {
        Passage::Port(o) => {
            nb.connect(&[
                Endpoint::ext("in"),
                Endpoint::port("X", &name(o)),
                Endpoint::port("X", &name(t0)),
            ]);
        }
        Passage::Tunnel(o0, o1, _) => {
            nb.connect(&[Endpoint::ext("in"), Endpoint::port("X", &name(o0))]);
            nb.connect(&[Endpoint::port("X", &name(o1)), Endpoint::port("X", &name(t0))]);
        }
    }
    nb.connect(&[Endpoint::port("X", &name(t1)), Endpoint::port("X", &name(c0))]);
    nb.connect(&[Endpoint::ext("out"), Endpoint::port("X", &name(c1))]);
    Ok(nb.build()?)
}

/// Options for [`directify`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DirectifyOptions {
    /// Orient the undirected traverse tunnel against its declaration order.
    pub flip_traverse: bool,
    /// Also turn an opening port into a directed opening tunnel.
    pub open_required: bool,
}

/// Canonical external names of the directed door built by [`directify`].
const CANON: [&str; 6] = ["O_in", "O_out", "T_in", "T_out", "C_in", "C_out"];

/// Wires every undirected passage of `door` through diodes (built from
/// `door` itself) so that the result behaves as a fully directed door.
/// Externals are `O_in, O_out` (or `O` for an opening port), `T_in, T_out`,
/// `C_in, C_out`. The returned realization maps the door's closed/open
/// states onto the sub-network.
pub fn directify(door: &Arc<Gadget>, opts: DirectifyOptions) -> Result<Realization, CompileError> {
    let p = parts(door)?;
    let (closed, open) = door_states(door)?;
    let diode = Arc::new(diode_gadget());
    let name = |l: usize| door.location_name(l).to_string();
    let mut nb = NetworkBuilder::new(&format!("directed-{}", door.name()));
    nb.instance("X", door, door.state_name(closed));
    let mut ports = Vec::new();
    let mut diodes = 0;
    let ext = |nb: &mut NetworkBuilder, e: &str, inner: Endpoint, ports: &mut Vec<String>| {
        nb.external(e);
        nb.connect(&[Endpoint::ext(e), inner]);
        ports.push(e.to_string());
    };
    let passages = [(p.open, 0usize, false), (p.traverse, 2, opts.flip_traverse)]
        .into_iter()
        .chain(p.close.map(|c| (c, 4, false)));
    for (pass, k, flip) in passages {
        match pass {
            Passage::Port(o) => {
                if opts.open_required {
                    for (e, dir) in [("O_in", true), ("O_out", false)] {
                        let id = format!("d{diodes}");
                        diodes += 1;
                        nb.instance(&id, &diode, "s");
                        let (near, far) = if dir { ("out", "in") } else { ("in", "out") };
                        nb.connect(&[Endpoint::port(&id, near), Endpoint::port("X", &name(o))]);
                        ext(&mut nb, e, Endpoint::port(&id, far), &mut ports);
                    }
                } else {
                    ext(&mut nb, "O", Endpoint::port("X", &name(o)), &mut ports);
                }
            }
            Passage::Tunnel(a, b, true) => {
                ext(&mut nb, CANON[k], Endpoint::port("X", &name(a)), &mut ports);
                ext(&mut nb, CANON[k + 1], Endpoint::port("X", &name(b)), &mut ports);
            }
            Passage::Tunnel(a, b, false) => {
                let (a, b) = if flip { (b, a) } else { (a, b) };
                let d_in = format!("d{diodes}");
                let d_out = format!("d{}", diodes + 1);
                diodes += 2;
                nb.instance(&d_in, &diode, "s");
                nb.instance(&d_out, &diode, "s");
                nb.connect(&[Endpoint::port(&d_in, "out"), Endpoint::port("X", &name(a))]);
                nb.connect(&[Endpoint::port("X", &name(b)), Endpoint::port(&d_out, "in")]);
                ext(&mut nb, CANON[k], Endpoint::port(&d_in, "in"), &mut ports);
                ext(&mut nb, CANON[k + 1], Endpoint::port(&d_out, "out"), &mut ports);
            }
        }
    }
    let skeleton = nb.build()?;
    let net = if diodes > 0 {
        let dn = diode_network(door)?;
        let r = Realization::new(dn, vec!["in".into(), "out".into()], "s");
        substitute(&skeleton, &BTreeMap::from([("diode".to_string(), r)]))?
    } else {
        skeleton
    };
    let init = net.packing().unpack(&net.initial_states());
    let mut open_v = init.clone();
    open_v[0] = open;
    let mut closed_v = init;
    closed_v[0] = closed;
    Ok(Realization {
        network: net,
        ports,
        states: BTreeMap::from([("closed".to_string(), closed_v), ("open".to_string(), open_v)]),
    })
}

/// Realization of the directed open-required door (locations `O_in`,
/// `O_out`, `T_in`, `T_out`, `C_in`, `C_out`, states `closed`/`open`) by
/// instances of `door`.
pub fn directed_open_required(door: &Arc<Gadget>) -> Result<Realization, CompileError> {
    directify(
        door,
        DirectifyOptions {
            open_required: true,
            ..Default::default()
        },
    )
}

/// Compiles `target` to directed open-required doors, then realizes each
/// such door with instances of `any_door`.
pub fn universal_pipeline(
    any_door: &Arc<Gadget>,
    target: &Gadget,
    s0: usize,
    dir_door: &Arc<Gadget>,
    budget: usize,
) -> Result<Compiled, CompileError> {
    let compiled = compile_universal(target, s0, dir_door, budget)?;
    if any_door.name() == dir_door.name() {
        return Ok(compiled);
    }
    let mut r = directed_open_required(any_door)?;
    // Rename realization states onto the directed door's own state names.
    let (c, o) = door_states(dir_door)?;
    let mut states = BTreeMap::new();
    states.insert(dir_door.state_name(c).to_string(), r.states["closed"].clone());
    states.insert(dir_door.state_name(o).to_string(), r.states["open"].clone());
    r.states = states;
    let dp = DoorPorts::of(dir_door)?;
    let canon_to_loc: BTreeMap<&str, &str> = CANON
        .iter()
        .copied()
        .zip([
            dp.o0.as_str(),
            dp.o1.as_str(),
            dp.t0.as_str(),
            dp.t1.as_str(),
            dp.c0.as_str(),
            dp.c1.as_str(),
        ])
        .collect();
    r.ports = r.ports.iter().map(|p| canon_to_loc[p.as_str()].to_string()).collect();
    let network = substitute(&compiled.network, &BTreeMap::from([(dir_door.name().to_string(), r)]))?;
    let needed = network.instances().len();
    if needed > budget {
        return Err(CompileError::BudgetExceeded { needed, budget });
    }
    Ok(Compiled { network, ..compiled })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_chains_cover_everything_once() {
        let o = OrderingContext::new(2, 3);
        let mut cur = o.first_pair();
        let mut n = 1;
        while let Some(nx) = o.next_pair(cur) {
            cur = nx;
            n += 1;
        }
        assert_eq!(n, 6);
        assert_eq!(cur, o.last_pair());
        assert_eq!(o.next_port(o.last_port()), None);
    }

    #[test]
    fn naming_is_injective() {
        let mut ids = std::collections::BTreeSet::new();
        for s in 0..12 {
            for p in 0..12 {
                assert!(ids.insert(DoorNamingScheme::state_port(s, p)));
            }
        }
        for k in 0..12 {
            assert!(ids.insert(DoorNamingScheme::port(k)));
            assert!(ids.insert(DoorNamingScheme::transition(k)));
        }
    }
}
