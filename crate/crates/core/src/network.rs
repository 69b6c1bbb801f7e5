//! Networks of gadget instances wired by node identification, and the
//! exact reachability semantics over joint configurations.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::embedding::equivalent_cycles;
use crate::gadget::{is_identifier, is_name, Gadget};
use crate::lts::{Lts, LtsMove};
use crate::packed::{Packing, StateVec};

/// Gadgets by name.
pub type GadgetLibrary = BTreeMap<String, Arc<Gadget>>;

/// Default bound on explored configurations.
pub const DEFAULT_CAP: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub id: String,
    pub gadget: String,
    pub state: String,
}

/// Identifier-level description of a network, validated by [`build_network`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NetworkSpec {
    pub name: String,
    pub instances: Vec<InstanceSpec>,
    pub nodes: Vec<String>,
    /// `(instance, location, node)`.
    pub attachments: Vec<(String, String, String)>,
    pub externals: Vec<String>,
    /// Externals are pinned to the outer face in the listed cyclic order.
    pub planar_externals: bool,
    pub start: Option<String>,
    pub goal: Option<String>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("invalid-name \"{0}\"")]
    InvalidName(String),
    #[error("invalid-identifier \"{0}\"")]
    InvalidIdentifier(String),
    #[error("unknown-gadget \"{0}\"")]
    UnknownGadget(String),
    #[error("unknown-state \"{state}\" for instance \"{instance}\"")]
    UnknownState { instance: String, state: String },
    #[error("duplicate-instance \"{0}\"")]
    DuplicateInstance(String),
    #[error("duplicate-node \"{0}\"")]
    DuplicateNode(String),
    #[error("unknown-instance \"{0}\"")]
    UnknownInstance(String),
    #[error("unknown-location \"{location}\" on instance \"{instance}\"")]
    UnknownLocation { instance: String, location: String },
    #[error("dangling-attachment: {instance}.{location} -> undeclared node \"{node}\"")]
    DanglingAttachment {
        instance: String,
        location: String,
        node: String,
    },
    #[error("double-attachment: {instance}.{location}")]
    DoubleAttachment { instance: String, location: String },
    #[error("unattached-location: {instance}.{location}")]
    UnattachedLocation { instance: String, location: String },
    #[error("unused-node \"{0}\"")]
    UnusedNode(String),
    #[error("unknown-external \"{0}\"")]
    UnknownExternal(String),
    #[error("duplicate-external \"{0}\"")]
    DuplicateExternal(String),
    #[error("unknown-node \"{0}\" for start/goal")]
    UnknownEndpoint(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub gadget: Arc<Gadget>,
    pub initial: usize,
}

/// A validated network. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    name: String,
    instances: Vec<Instance>,
    nodes: Vec<String>,
    attach: Vec<Vec<usize>>,
    externals: Vec<usize>,
    planar_externals: bool,
    start: Option<usize>,
    goal: Option<usize>,
    /// Instances with a location at each node, ascending.
    at_node: Vec<Vec<usize>>,
    packing: Packing,
}

pub fn build_network(spec: &NetworkSpec, lib: &GadgetLibrary) -> Result<Network, NetworkError> {
    if !is_name(&spec.name) {
        return Err(NetworkError::InvalidName(spec.name.clone()));
    }
    let mut inst_ix = HashMap::new();
    let mut instances = Vec::with_capacity(spec.instances.len());
    for (i, inst) in spec.instances.iter().enumerate() {
        if !is_identifier(&inst.id) {
            return Err(NetworkError::InvalidIdentifier(inst.id.clone()));
        }
        if inst_ix.insert(inst.id.as_str(), i).is_some() {
            return Err(NetworkError::DuplicateInstance(inst.id.clone()));
        }
        let gadget = lib
            .get(&inst.gadget)
            .ok_or_else(|| NetworkError::UnknownGadget(inst.gadget.clone()))?;
        let initial = gadget
            .state_index(&inst.state)
            .ok_or_else(|| NetworkError::UnknownState {
                instance: inst.id.clone(),
                state: inst.state.clone(),
            })?;
        instances.push(Instance {
            id: inst.id.clone(),
            gadget: Arc::clone(gadget),
            initial,
        });
    }
    let mut node_ix = HashMap::new();
    for (i, n) in spec.nodes.iter().enumerate() {
        if node_ix.insert(n.as_str(), i).is_some() {
            return Err(NetworkError::DuplicateNode(n.clone()));
        }
    }
    let mut attach: Vec<Vec<Option<usize>>> = instances
        .iter()
        .map(|i| vec![None; i.gadget.locations().len()])
        .collect();
    for (inst, loc, node) in &spec.attachments {
        let &i = inst_ix
            .get(inst.as_str())
            .ok_or_else(|| NetworkError::UnknownInstance(inst.clone()))?;
        let l = instances[i]
            .gadget
            .location_index(loc)
            .ok_or_else(|| NetworkError::UnknownLocation {
                instance: inst.clone(),
                location: loc.clone(),
            })?;
        let &n = node_ix
            .get(node.as_str())
            .ok_or_else(|| NetworkError::DanglingAttachment {
                instance: inst.clone(),
                location: loc.clone(),
                node: node.clone(),
            })?;
        if attach[i][l].replace(n).is_some() {
            return Err(NetworkError::DoubleAttachment {
                instance: inst.clone(),
                location: loc.clone(),
            });
        }
    }
    let mut full = Vec::with_capacity(attach.len());
    for (i, row) in attach.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (l, n) in row.into_iter().enumerate() {
            out.push(n.ok_or_else(|| NetworkError::UnattachedLocation {
                instance: instances[i].id.clone(),
                location: instances[i].gadget.location_name(l).to_string(),
            })?);
        }
        full.push(out);
    }
    let mut used = vec![false; spec.nodes.len()];
    for row in &full {
        for &n in row {
            used[n] = true;
        }
    }
    let mut externals = Vec::new();
    let mut seen = HashSet::new();
    for e in &spec.externals {
        let &n = node_ix
            .get(e.as_str())
            .ok_or_else(|| NetworkError::UnknownExternal(e.clone()))?;
        if !seen.insert(n) {
            return Err(NetworkError::DuplicateExternal(e.clone()));
        }
        used[n] = true;
        externals.push(n);
    }
    let endpoint = |s: &Option<String>| -> Result<Option<usize>, NetworkError> {
        match s {
            None => Ok(None),
            Some(s) => node_ix
                .get(s.as_str())
                .copied()
                .map(Some)
                .ok_or_else(|| NetworkError::UnknownEndpoint(s.clone())),
        }
    };
    let start = endpoint(&spec.start)?;
    let goal = endpoint(&spec.goal)?;
    for n in [start, goal].into_iter().flatten() {
        used[n] = true;
    }
    // A network with no instances still has the agent's node.
    if instances.is_empty() && spec.nodes.len() == 1 {
        used[0] = true;
    }
    if let Some(n) = used.iter().position(|u| !u) {
        return Err(NetworkError::UnusedNode(spec.nodes[n].clone()));
    }
    let mut at_node = vec![Vec::new(); spec.nodes.len()];
    for (i, row) in full.iter().enumerate() {
        for &n in row {
            if at_node[n].last() != Some(&i) {
                at_node[n].push(i);
            }
        }
    }
    let max_states = instances.iter().map(|i| i.gadget.states().len()).max().unwrap_or(1);
    let packing = Packing::new(instances.len(), max_states);
    Ok(Network {
        name: spec.name.clone(),
        instances,
        nodes: spec.nodes.clone(),
        attach: full,
        externals,
        planar_externals: spec.planar_externals,
        start,
        goal,
        at_node,
        packing,
    })
}

/// One applied gadget transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub instance: usize,
    pub transition: usize,
}

/// Agent node plus packed joint state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub node: usize,
    pub states: StateVec,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("cap-exceeded: more than {0} configurations")]
    CapExceeded(usize),
    #[error("network has no start/goal")]
    MissingStartGoal,
    #[error("network has no externals")]
    NoExternals,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub reachable: bool,
    pub witness: Option<Vec<Step>>,
    pub explored: usize,
}

impl Network {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Node of each (instance, location).
    pub fn attachment(&self, instance: usize, location: usize) -> usize {
        self.attach[instance][location]
    }

    pub fn attachments(&self) -> &[Vec<usize>] {
        &self.attach
    }

    pub fn externals(&self) -> &[usize] {
        &self.externals
    }

    pub fn external_names(&self) -> Vec<String> {
        self.externals.iter().map(|&n| self.nodes[n].clone()).collect()
    }

    pub fn planar_externals(&self) -> bool {
        self.planar_externals
    }

    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn goal(&self) -> Option<usize> {
        self.goal
    }

    pub fn packing(&self) -> Packing {
        self.packing
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn instance_index(&self, id: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.id == id)
    }

    pub fn initial_states(&self) -> StateVec {
        let s: Vec<usize> = self.instances.iter().map(|i| i.initial).collect();
        self.packing.pack(&s)
    }

    pub fn initial_configuration(&self, node: usize) -> Configuration {
        Configuration {
            node,
            states: self.initial_states(),
        }
    }

    /// Identifier-level description of this network.
    pub fn to_spec(&self) -> NetworkSpec {
        let mut attachments = Vec::new();
        for (i, inst) in self.instances.iter().enumerate() {
            for (l, &n) in self.attach[i].iter().enumerate() {
                attachments.push((
                    inst.id.clone(),
                    inst.gadget.location_name(l).to_string(),
                    self.nodes[n].clone(),
                ));
            }
        }
        NetworkSpec {
            name: self.name.clone(),
            instances: self
                .instances
                .iter()
                .map(|i| InstanceSpec {
                    id: i.id.clone(),
                    gadget: i.gadget.name().to_string(),
                    state: i.gadget.state_name(i.initial).to_string(),
                })
                .collect(),
            nodes: self.nodes.clone(),
            attachments,
            externals: self.external_names(),
            planar_externals: self.planar_externals,
            start: self.start.map(|n| self.nodes[n].clone()),
            goal: self.goal.map(|n| self.nodes[n].clone()),
        }
    }

    /// Library containing every gadget used by the instances.
    pub fn library(&self) -> GadgetLibrary {
        self.instances
            .iter()
            .map(|i| (i.gadget.name().to_string(), Arc::clone(&i.gadget)))
            .collect()
    }

    pub fn with_initial_states(&self, states: &[usize]) -> Network {
        let mut net = self.clone();
        for (inst, &s) in net.instances.iter_mut().zip(states) {
            inst.initial = s;
        }
        net
    }

    pub fn with_start_goal(&self, start: Option<usize>, goal: Option<usize>) -> Network {
        Network {
            start,
            goal,
            ..self.clone()
        }
    }

    pub fn state_names(&self, states: &StateVec) -> Vec<String> {
        self.packing
            .unpack(states)
            .into_iter()
            .zip(&self.instances)
            .map(|(s, i)| i.gadget.state_name(s).to_string())
            .collect()
    }

    /// Applies a step, if legal in `c`.
    pub fn apply(&self, c: &Configuration, step: Step) -> Option<Configuration> {
        let inst = self.instances.get(step.instance)?;
        let t = inst.gadget.transitions().get(step.transition)?;
        if self.attach[step.instance][t.from_location] != c.node
            || self.packing.get(&c.states, step.instance) != t.from_state
        {
            return None;
        }
        let mut states = c.states.clone();
        self.packing.set(&mut states, step.instance, t.to_state);
        Some(Configuration {
            node: self.attach[step.instance][t.to_location],
            states,
        })
    }

    /// Every configuration reachable in one step, instances then transitions
    /// in declaration order.
    pub fn legal_moves(&self, c: &Configuration) -> Vec<(Step, Configuration)> {
        let mut out = Vec::new();
        self.for_each_move(c, |step, next| out.push((step, next)));
        out
    }

    fn for_each_move(&self, c: &Configuration, mut f: impl FnMut(Step, Configuration)) {
        for &i in &self.at_node[c.node] {
            let inst = &self.instances[i];
            let cur = self.packing.get(&c.states, i);
            let row = &self.attach[i];
            for (k, t) in inst.gadget.transitions().iter().enumerate() {
                if t.from_state == cur && row[t.from_location] == c.node {
                    let mut states = c.states.clone();
                    self.packing.set(&mut states, i, t.to_state);
                    f(
                        Step {
                            instance: i,
                            transition: k,
                        },
                        Configuration {
                            node: row[t.to_location],
                            states,
                        },
                    );
                }
            }
        }
    }

    /// Breadth-first closure of `legal_moves` from `c0`, in discovery order.
    pub fn reachable_configurations(&self, c0: &Configuration, cap: usize) -> Result<Vec<Configuration>, SearchError> {
        Ok(self.bfs(c0, cap, |_| false)?.0)
    }

    /// BFS that stops at the first configuration satisfying `stop`. Returns
    /// (discovered configurations, parent links, index of the hit).
    #[allow(clippy::type_complexity)]
    fn bfs(
        &self,
        c0: &Configuration,
        cap: usize,
        stop: impl Fn(&Configuration) -> bool,
    ) -> Result<(Vec<Configuration>, Vec<Option<(usize, Step)>>, Option<usize>), SearchError> {
        let mut order = vec![c0.clone()];
        let mut parent = vec![None];
        if stop(c0) {
            return Ok((order, parent, Some(0)));
        }
        let mut index: HashMap<Configuration, usize> = HashMap::from([(c0.clone(), 0)]);
        let mut head = 0;
        while head < order.len() {
            let cur = order[head].clone();
            let mut hit = None;
            let mut overflow = false;
            self.for_each_move(&cur, |step, next| {
                if hit.is_some() || overflow || index.contains_key(&next) {
                    return;
                }
                if order.len() >= cap {
                    overflow = true;
                    return;
                }
                let done = stop(&next);
                index.insert(next.clone(), order.len());
                order.push(next);
                parent.push(Some((head, step)));
                if done {
                    hit = Some(order.len() - 1);
                }
            });
            if overflow {
                return Err(SearchError::CapExceeded(cap));
            }
            if hit.is_some() {
                return Ok((order, parent, hit));
            }
            head += 1;
        }
        Ok((order, parent, None))
    }

    /// Decides whether the goal node is reachable from the start node with
    /// the initial states; the witness is a shortest step sequence.
    pub fn solve(&self, cap: usize) -> Result<SolveResult, SearchError> {
        let (start, goal) = match (self.start, self.goal) {
            (Some(s), Some(g)) => (s, g),
            _ => return Err(SearchError::MissingStartGoal),
        };
        let c0 = self.initial_configuration(start);
        let (order, parent, hit) = self.bfs(&c0, cap, |c| c.node == goal)?;
        let explored = order.len();
        Ok(match hit {
            None => SolveResult {
                reachable: false,
                witness: None,
                explored,
            },
            Some(mut ix) => {
                let mut steps = Vec::new();
                while let Some((p, step)) = parent[ix] {
                    steps.push(step);
                    ix = p;
                }
                steps.reverse();
                SolveResult {
                    reachable: true,
                    witness: Some(steps),
                    explored,
                }
            }
        })
    }

    /// Replays a step sequence from the start configuration.
    pub fn replay(&self, steps: &[Step]) -> Option<Configuration> {
        let mut c = self.initial_configuration(self.start?);
        for &s in steps {
            c = self.apply(&c, s)?;
        }
        Some(c)
    }

    /// The network as seen from outside: joint states at which the agent can
    /// be outside, and the episodes between external nodes.
    pub fn induced_behavior(&self, cap: usize) -> Result<Lts, SearchError> {
        Ok(self.induced_behavior_stats(cap)?.0)
    }

    /// Like [`Network::induced_behavior`], also returning the total number of
    /// configurations explored.
    pub fn induced_behavior_stats(&self, cap: usize) -> Result<(Lts, usize), SearchError> {
        if self.externals.is_empty() {
            return Err(SearchError::NoExternals);
        }
        let mut ext_ix = vec![None; self.nodes.len()];
        for (k, &n) in self.externals.iter().enumerate() {
            ext_ix[n] = Some(k);
        }
        let q0 = self.initial_states();
        let mut states = vec![q0.clone()];
        let mut state_ix: HashMap<StateVec, usize> = HashMap::from([(q0, 0)]);
        let mut moves = BTreeSet::new();
        let mut explored = 0usize;
        let mut head = 0;
        while head < states.len() {
            let q = states[head].clone();
            for (entry, &e_node) in self.externals.iter().enumerate() {
                moves.insert(LtsMove {
                    from: head,
                    entry,
                    exit: entry,
                    to: head,
                });
                let c0 = Configuration {
                    node: e_node,
                    states: q.clone(),
                };
                let mut seen: HashSet<Configuration> = HashSet::from([c0.clone()]);
                let mut queue = VecDeque::from([c0]);
                let mut overflow = false;
                while let Some(c) = queue.pop_front() {
                    self.for_each_move(&c, |_, next| {
                        if overflow {
                            return;
                        }
                        if let Some(exit) = ext_ix[next.node] {
                            let to = match state_ix.get(&next.states) {
                                Some(&ix) => ix,
                                None => {
                                    if states.len() >= cap {
                                        overflow = true;
                                        return;
                                    }
                                    state_ix.insert(next.states.clone(), states.len());
                                    states.push(next.states.clone());
                                    states.len() - 1
                                }
                            };
                            moves.insert(LtsMove {
                                from: head,
                                entry,
                                exit,
                                to,
                            });
                        } else if !seen.contains(&next) {
                            if seen.len() >= cap {
                                overflow = true;
                                return;
                            }
                            seen.insert(next.clone());
                            queue.push_back(next);
                        }
                    });
                    if overflow {
                        return Err(SearchError::CapExceeded(cap));
                    }
                }
                explored += seen.len();
                if explored > cap {
                    return Err(SearchError::CapExceeded(cap));
                }
            }
            head += 1;
        }
        let unpacked: Vec<Vec<usize>> = states.iter().map(|s| self.packing.unpack(s)).collect();
        let labels = states.iter().map(|s| self.state_names(s).join(",")).collect();
        Ok((
            Lts {
                ports: self.external_names(),
                states: unpacked,
                state_labels: labels,
                initial: 0,
                moves,
            },
            explored,
        ))
    }
}

/// How one gadget is realized by a sub-network.
#[derive(Debug, Clone)]
pub struct Realization {
    pub network: Network,
    /// Gadget location name for each sub-network external, in external order.
    pub ports: Vec<String>,
    /// Sub-network instance states for each gadget state name. Gadget states
    /// missing here cannot be substituted.
    pub states: BTreeMap<String, Vec<usize>>,
}

impl Realization {
    /// Realization whose externals carry the gadget's location names and
    /// which only supports the sub-network's initial states for `state`.
    pub fn new(network: Network, ports: Vec<String>, state: &str) -> Self {
        let init = network.packing.unpack(&network.initial_states());
        Realization {
            network,
            ports,
            states: BTreeMap::from([(state.to_string(), init)]),
        }
    }

    pub fn with_state(mut self, state: &str, vector: Vec<usize>) -> Self {
        self.states.insert(state.to_string(), vector);
        self
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SubstituteError {
    #[error("port-mismatch: {0}")]
    PortMismatch(String),
    #[error("embedding-mismatch: {0}")]
    EmbeddingMismatch(String),
    #[error("no realization of state \"{state}\" of gadget \"{gadget}\"")]
    MissingState { gadget: String, state: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Replaces every instance of a mapped gadget by a fresh copy of its
/// realization, fusing the copy's externals onto the instance's nodes.
pub fn substitute(net: &Network, realizations: &BTreeMap<String, Realization>) -> Result<Network, SubstituteError> {
    for (name, r) in realizations {
        let gadget = net.instances.iter().map(|i| &i.gadget).find(|g| g.name() == name);
        let Some(gadget) = gadget else { continue };
        check_realization(gadget, r)?;
    }
    let mut spec = NetworkSpec {
        name: net.name.clone(),
        nodes: net.nodes.clone(),
        externals: net.external_names(),
        planar_externals: net.planar_externals,
        start: net.start.map(|n| net.nodes[n].clone()),
        goal: net.goal.map(|n| net.nodes[n].clone()),
        ..Default::default()
    };
    let mut lib = net.library();
    for (i, inst) in net.instances.iter().enumerate() {
        let g = &inst.gadget;
        let Some(r) = realizations.get(g.name()) else {
            spec.instances.push(InstanceSpec {
                id: inst.id.clone(),
                gadget: g.name().to_string(),
                state: g.state_name(inst.initial).to_string(),
            });
            for (l, &n) in net.attach[i].iter().enumerate() {
                spec.attachments
                    .push((inst.id.clone(), g.location_name(l).to_string(), net.nodes[n].clone()));
            }
            continue;
        };
        let state_name = g.state_name(inst.initial);
        let vector = r.states.get(state_name).ok_or_else(|| SubstituteError::MissingState {
            gadget: g.name().to_string(),
            state: state_name.to_string(),
        })?;
        let sub = &r.network;
        lib.extend(sub.library());
        // Sub-network node -> outer node name.
        let mut node_name: Vec<String> = sub.nodes.iter().map(|n| format!("{}/{}", inst.id, n)).collect();
        for (k, &ext) in sub.externals.iter().enumerate() {
            let l = g.location_index(&r.ports[k]).expect("checked");
            node_name[ext] = net.nodes[net.attach[i][l]].clone();
        }
        for (j, (sinst, &st)) in sub.instances.iter().zip(vector).enumerate() {
            let id = format!("{}_{}", inst.id, sinst.id);
            spec.instances.push(InstanceSpec {
                id: id.clone(),
                gadget: sinst.gadget.name().to_string(),
                state: sinst.gadget.state_name(st).to_string(),
            });
            for (l, &n) in sub.attach[j].iter().enumerate() {
                spec.attachments.push((
                    id.clone(),
                    sinst.gadget.location_name(l).to_string(),
                    node_name[n].clone(),
                ));
            }
        }
        let internal: Vec<usize> = (0..sub.nodes.len()).filter(|n| !sub.externals.contains(n)).collect();
        for n in internal {
            spec.nodes.push(node_name[n].clone());
        }
    }
    // Instance-only nodes of the outer network that lost all attachments
    // (a gadget location fused to nothing but the realization) stay in use
    // because the realization's externals attach to them.
    Ok(build_network(&spec, &lib)?)
}

fn check_realization(g: &Gadget, r: &Realization) -> Result<(), SubstituteError> {
    let sub = &r.network;
    if sub.externals.len() != g.locations().len() || r.ports.len() != sub.externals.len() {
        return Err(SubstituteError::PortMismatch(format!(
            "{} externals for {} locations of \"{}\"",
            sub.externals.len(),
            g.locations().len(),
            g.name()
        )));
    }
    let mut locs = Vec::new();
    for p in &r.ports {
        let l = g
            .location_index(p)
            .ok_or_else(|| SubstituteError::PortMismatch(format!("unknown location \"{p}\" of \"{}\"", g.name())))?;
        locs.push(l);
    }
    let distinct: BTreeSet<_> = locs.iter().collect();
    if distinct.len() != locs.len() {
        return Err(SubstituteError::PortMismatch(format!(
            "ports of \"{}\" are not a bijection",
            g.name()
        )));
    }
    for (state, v) in &r.states {
        if g.state_index(state).is_none() || v.len() != sub.instances.len() {
            return Err(SubstituteError::MissingState {
                gadget: g.name().to_string(),
                state: state.clone(),
            });
        }
    }
    if let (Some(emb), true) = (g.embedding(), sub.planar_externals) {
        if !equivalent_cycles(emb.cycle(), &locs) {
            return Err(SubstituteError::EmbeddingMismatch(format!(
                "externals of the realization of \"{}\" do not follow its port order",
                g.name()
            )));
        }
    }
    Ok(())
}

/// Incremental network construction with endpoint fusion.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    name: String,
    instances: Vec<InstanceSpec>,
    gadgets: Vec<Arc<Gadget>>,
    /// Union-find over endpoints.
    parent: Vec<usize>,
    endpoints: HashMap<Endpoint, usize>,
    endpoint_list: Vec<Endpoint>,
    externals: Vec<String>,
    planar_externals: bool,
    start: Option<Endpoint>,
    goal: Option<Endpoint>,
}

/// An instance location or a named external node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Port(String, String),
    Ext(String),
}

impl Endpoint {
    pub fn port(instance: &str, location: &str) -> Self {
        Endpoint::Port(instance.to_string(), location.to_string())
    }

    pub fn ext(name: &str) -> Self {
        Endpoint::Ext(name.to_string())
    }

    /// Parses `inst.loc` or `ext:Name`.
    pub fn parse(s: &str) -> Option<Self> {
        if let Some(name) = s.strip_prefix("ext:") {
            return Some(Endpoint::ext(name));
        }
        let (i, l) = s.split_once('.')?;
        Some(Endpoint::port(i, l))
    }
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Port(i, l) => write!(f, "{i}.{l}"),
            Endpoint::Ext(n) => write!(f, "ext:{n}"),
        }
    }
}

impl NetworkBuilder {
    pub fn new(name: &str) -> Self {
        NetworkBuilder {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn key(&mut self, e: &Endpoint) -> usize {
        if let Some(&k) = self.endpoints.get(e) {
            return k;
        }
        let k = self.parent.len();
        self.parent.push(k);
        self.endpoints.insert(e.clone(), k);
        self.endpoint_list.push(e.clone());
        k
    }

    fn find(&mut self, mut k: usize) -> usize {
        while self.parent[k] != k {
            self.parent[k] = self.parent[self.parent[k]];
            k = self.parent[k];
        }
        k
    }

    pub fn instance(&mut self, id: &str, gadget: &Arc<Gadget>, state: &str) -> &mut Self {
        self.instances.push(InstanceSpec {
            id: id.to_string(),
            gadget: gadget.name().to_string(),
            state: state.to_string(),
        });
        self.gadgets.push(Arc::clone(gadget));
        for l in gadget.locations() {
            self.key(&Endpoint::port(id, l));
        }
        self
    }

    /// Fuses all endpoints onto one node.
    pub fn connect(&mut self, ends: &[Endpoint]) -> &mut Self {
        let keys: Vec<usize> = ends.iter().map(|e| self.key(e)).collect();
        for w in keys.windows(2) {
            let (a, b) = (self.find(w[0]), self.find(w[1]));
            if a != b {
                // Keep the smaller root so node naming follows first use.
                let (lo, hi) = (a.min(b), a.max(b));
                self.parent[hi] = lo;
            }
        }
        self
    }

    /// `connect` over `inst.loc` / `ext:Name` strings.
    pub fn wire(&mut self, ends: &[&str]) -> &mut Self {
        let ends: Vec<Endpoint> = ends
            .iter()
            .map(|s| Endpoint::parse(s).unwrap_or_else(|| panic!("bad endpoint {s}")))
            .collect();
        self.connect(&ends)
    }

    /// Declares the next external (in order).
    pub fn external(&mut self, name: &str) -> &mut Self {
        self.key(&Endpoint::ext(name));
        self.externals.push(name.to_string());
        self
    }

    pub fn planar_externals(&mut self, yes: bool) -> &mut Self {
        self.planar_externals = yes;
        self
    }

    pub fn start(&mut self, e: Endpoint) -> &mut Self {
        self.key(&e);
        self.start = Some(e);
        self
    }

    pub fn goal(&mut self, e: Endpoint) -> &mut Self {
        self.key(&e);
        self.goal = Some(e);
        self
    }

    /// Validates and builds. Groups holding an external are named after it;
    /// other groups are named `n0, n1, ...` in order of first appearance.
    pub fn build(&mut self) -> Result<Network, NetworkError> {
        let n = self.parent.len();
        let mut root_name: BTreeMap<usize, String> = BTreeMap::new();
        for k in 0..n {
            if let Endpoint::Ext(name) = self.endpoint_list[k].clone() {
                let r = self.find(k);
                if let Some(prev) = root_name.insert(r, name.clone()) {
                    return Err(NetworkError::DuplicateExternal(format!("{prev}={name}")));
                }
            }
        }
        let mut counter = 0;
        let mut nodes = Vec::new();
        let mut node_of_root: HashMap<usize, String> = HashMap::new();
        for k in 0..n {
            let r = self.find(k);
            if node_of_root.contains_key(&r) {
                continue;
            }
            let name = root_name.get(&r).cloned().unwrap_or_else(|| {
                let s = format!("n{counter}");
                counter += 1;
                s
            });
            nodes.push(name.clone());
            node_of_root.insert(r, name);
        }
        let mut attachments = Vec::new();
        for k in 0..n {
            if let Endpoint::Port(i, l) = self.endpoint_list[k].clone() {
                let r = self.find(k);
                attachments.push((i, l, node_of_root[&r].clone()));
            }
        }
        let mut lib = GadgetLibrary::new();
        for g in &self.gadgets {
            lib.insert(g.name().to_string(), Arc::clone(g));
        }
        let node_for = |b: &mut Self, e: &Option<Endpoint>| -> Option<String> {
            e.clone().map(|e| {
                let k = b.endpoints[&e];
                let r = b.find(k);
                node_of_root[&r].clone()
            })
        };
        let start = node_for(self, &self.start.clone());
        let goal = node_for(self, &self.goal.clone());
        let spec = NetworkSpec {
            name: self.name.clone(),
            instances: self.instances.clone(),
            nodes,
            attachments,
            externals: self.externals.clone(),
            planar_externals: self.planar_externals,
            start,
            goal,
        };
        build_network(&spec, &lib)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::RawGadget;

    fn diode() -> Arc<Gadget> {
        Arc::new(
            Gadget::new(RawGadget::new("diode", &["s"], &["in", "out"]).transition("s", "in", "s", "out")).unwrap(),
        )
    }

    fn door() -> Arc<Gadget> {
        let raw = RawGadget::new("door", &["closed", "open"], &["O", "T_in", "T_out", "C_in", "C_out"])
            .transition("closed", "O", "open", "O")
            .transition("open", "O", "open", "O")
            .transition("open", "T_in", "open", "T_out")
            .transition("closed", "C_in", "closed", "C_out")
            .transition("open", "C_in", "closed", "C_out");
        Arc::new(Gadget::new(raw).unwrap())
    }

    /// Start reaches the door's opening port, then must come back through a
    /// diode to reach the traverse input.
    fn detour() -> Network {
        let (d, g) = (diode(), door());
        let mut b = NetworkBuilder::new("detour");
        b.instance("d", &g, "closed")
            .instance("x", &d, "s")
            .instance("y", &d, "s")
            .wire(&["ext:start", "x.in", "d.T_in"])
            .wire(&["x.out", "d.O", "y.in"])
            .wire(&["y.out", "ext:start"])
            .wire(&["d.T_out", "ext:goal"])
            .wire(&["d.C_in", "d.C_out"])
            .start(Endpoint::ext("start"))
            .goal(Endpoint::ext("goal"));
        b.build().unwrap()
    }

    #[test]
    fn solve_finds_replayable_shortest_witness() {
        let net = detour();
        let r = net.solve(DEFAULT_CAP).unwrap();
        assert!(r.reachable);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 4, "diode, open, diode, traverse");
        let end = net.replay(&w).unwrap();
        assert_eq!(Some(end.node), net.goal());
    }

    #[test]
    fn blocked_goal_is_unreachable() {
        let net = detour();
        let spec = {
            let mut s = net.to_spec();
            s.attachments.retain(|(i, l, _)| !(i == "y" && l == "out"));
            s.attachments.push(("y".into(), "out".into(), "goal".into()));
            s.attachments.retain(|(i, l, _)| !(i == "d" && l == "T_out"));
            s.nodes.push("sink".into());
            s.attachments.push(("d".into(), "T_out".into(), "sink".into()));
            s.goal = Some("sink".into());
            s
        };
        let net = build_network(&spec, &net.library()).unwrap();
        let r = net.solve(DEFAULT_CAP).unwrap();
        assert!(!r.reachable);
        assert!(r.witness.is_none());
    }

    #[test]
    fn cap_is_enforced() {
        let net = detour();
        assert_eq!(net.solve(2), Err(SearchError::CapExceeded(2)));
    }

    #[test]
    fn missing_start_goal_is_reported() {
        let d = diode();
        let mut b = NetworkBuilder::new("n");
        b.instance("x", &d, "s")
            .external("a")
            .external("b")
            .wire(&["ext:a", "x.in"])
            .wire(&["ext:b", "x.out"]);
        assert_eq!(b.build().unwrap().solve(10), Err(SearchError::MissingStartGoal));
    }

    #[test]
    fn builder_rejects_bad_wiring() {
        let d = diode();
        let mut b = NetworkBuilder::new("n");
        b.instance("x", &d, "s").wire(&["x.in", "x.nope"]);
        assert!(matches!(b.build(), Err(NetworkError::UnknownLocation { .. })));
        let mut b = NetworkBuilder::new("n");
        b.instance("x", &d, "bogus");
        assert!(matches!(b.build(), Err(NetworkError::UnknownState { .. })));
    }

    #[test]
    fn spec_validation_errors() {
        let lib: GadgetLibrary = [("diode".to_string(), diode())].into();
        let base = NetworkSpec {
            name: "n".into(),
            instances: vec![InstanceSpec {
                id: "x".into(),
                gadget: "diode".into(),
                state: "s".into(),
            }],
            nodes: vec!["a".into(), "b".into()],
            attachments: vec![
                ("x".into(), "in".into(), "a".into()),
                ("x".into(), "out".into(), "b".into()),
            ],
            externals: vec!["a".into(), "b".into()],
            ..Default::default()
        };
        assert!(build_network(&base, &lib).is_ok());
        let mut s = base.clone();
        s.instances[0].gadget = "nope".into();
        assert_eq!(build_network(&s, &lib), Err(NetworkError::UnknownGadget("nope".into())));
        let mut s = base.clone();
        s.attachments.pop();
        assert!(matches!(
            build_network(&s, &lib),
            Err(NetworkError::UnattachedLocation { .. })
        ));
        let mut s = base.clone();
        s.nodes.push("c".into());
        assert_eq!(build_network(&s, &lib), Err(NetworkError::UnusedNode("c".into())));
        let mut s = base.clone();
        s.externals.push("zz".into());
        assert_eq!(build_network(&s, &lib), Err(NetworkError::UnknownExternal("zz".into())));
        let mut s = base;
        s.attachments.push(("x".into(), "in".into(), "b".into()));
        assert!(matches!(
            build_network(&s, &lib),
            Err(NetworkError::DoubleAttachment { .. })
        ));
    }

    #[test]
    fn induced_behavior_of_a_diode() {
        let d = diode();
        let mut b = NetworkBuilder::new("n");
        b.instance("x", &d, "s")
            .external("in")
            .external("out")
            .wire(&["ext:in", "x.in"])
            .wire(&["ext:out", "x.out"]);
        let lts = b.build().unwrap().induced_behavior(DEFAULT_CAP).unwrap();
        assert_eq!(lts.states.len(), 1);
        let moves: Vec<(usize, usize)> = lts.moves.iter().map(|m| (m.entry, m.exit)).collect();
        assert_eq!(moves, vec![(0, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn substitution_fuses_realization_externals() {
        let (d, g) = (diode(), door());
        let mut b = NetworkBuilder::new("outer");
        b.instance("x", &d, "s")
            .external("a")
            .external("b")
            .wire(&["ext:a", "x.in"])
            .wire(&["ext:b", "x.out"]);
        let outer = b.build().unwrap();
        let mut r = NetworkBuilder::new("inner");
        r.instance("k", &g, "closed")
            .external("in")
            .external("out")
            .wire(&["ext:in", "k.O", "k.T_in"])
            .wire(&["k.T_out", "k.C_in"])
            .wire(&["ext:out", "k.C_out"]);
        let real = Realization::new(r.build().unwrap(), vec!["in".into(), "out".into()], "s");
        let flat = substitute(&outer, &BTreeMap::from([("diode".to_string(), real)])).unwrap();
        assert_eq!(flat.instances().len(), 1);
        assert_eq!(flat.instances()[0].id, "x_k");
        assert_eq!(flat.external_names(), vec!["a", "b"]);
        let lts = flat.induced_behavior(DEFAULT_CAP).unwrap();
        assert!(lts.moves.iter().any(|m| m.entry == 0 && m.exit == 1));
        assert!(!lts.moves.iter().any(|m| m.entry == 1 && m.exit == 0));
    }

    #[test]
    fn substitution_checks_ports() {
        let d = diode();
        let mut b = NetworkBuilder::new("outer");
        b.instance("x", &d, "s")
            .external("a")
            .external("b")
            .wire(&["ext:a", "x.in"])
            .wire(&["ext:b", "x.out"]);
        let outer = b.build().unwrap();
        let mut r = NetworkBuilder::new("inner");
        r.instance("k", &d, "s").external("p").wire(&["ext:p", "k.in", "k.out"]);
        let real = Realization::new(r.build().unwrap(), vec!["in".into()], "s");
        let err = substitute(&outer, &BTreeMap::from([("diode".to_string(), real)])).unwrap_err();
        assert!(matches!(err, SubstituteError::PortMismatch(_)));
    }
}
