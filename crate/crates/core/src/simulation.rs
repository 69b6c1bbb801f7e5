//! Simulation preorder between episode systems and the two-directional
//! network-versus-gadget check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::gadget::Gadget;
use crate::lts::{closure_lts, Lts, LtsMove};
use crate::network::{Network, SearchError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("port-mismatch: {0}")]
    PortMismatch(String),
    #[error("unknown-state \"{0}\"")]
    UnknownState(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Greatest simulation, with the refinement round at which each removed
/// pair dropped out (`0` = never removed).
#[derive(Debug, Clone)]
pub struct Refinement {
    n_b: usize,
    removed_at: Vec<u32>,
}

impl Refinement {
    pub fn holds(&self, p: usize, q: usize) -> bool {
        self.removed_at[p * self.n_b + q] == 0
    }

    pub fn removed_at(&self, p: usize, q: usize) -> u32 {
        self.removed_at[p * self.n_b + q]
    }

    /// All pairs in the relation.
    pub fn relation(&self) -> BTreeSet<(usize, usize)> {
        (0..self.removed_at.len())
            .filter(|&i| self.removed_at[i] == 0)
            .map(|i| (i / self.n_b, i % self.n_b))
            .collect()
    }
}

/// Resolves a name-level port map into `a`-port -> `b`-port indices.
pub fn resolve_port_map(a: &Lts, b: &Lts, map: &[(String, String)]) -> Result<Vec<usize>, VerifyError> {
    if map.len() != a.ports.len() || a.ports.len() != b.ports.len() {
        return Err(VerifyError::PortMismatch(format!(
            "{} mapped ports for {} and {} ports",
            map.len(),
            a.ports.len(),
            b.ports.len()
        )));
    }
    let mut out = vec![usize::MAX; a.ports.len()];
    let mut used = vec![false; b.ports.len()];
    for (x, y) in map {
        let i = a
            .ports
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| VerifyError::PortMismatch(format!("unknown port \"{x}\"")))?;
        let j = b
            .ports
            .iter()
            .position(|p| p == y)
            .ok_or_else(|| VerifyError::PortMismatch(format!("unknown port \"{y}\"")))?;
        if out[i] != usize::MAX || used[j] {
            return Err(VerifyError::PortMismatch(format!(
                "\"{x}\" -> \"{y}\" is not a bijection"
            )));
        }
        out[i] = j;
        used[j] = true;
    }
    Ok(out)
}

/// Iterated refinement from the full relation.
pub fn refine(a: &Lts, b: &Lts, map: &[usize]) -> Refinement {
    let n_a = a.states.len();
    let n_b = b.states.len();
    let k = b.ports.len();
    let a_out = a.outgoing();
    // b moves grouped by (state, entry, exit).
    let mut b_out: Vec<Vec<usize>> = vec![Vec::new(); n_b * k * k];
    for m in &b.moves {
        b_out[(m.from * k + m.entry) * k + m.exit].push(m.to);
    }
    let mut removed_at = vec![0u32; n_a * n_b];
    let mut round = 0u32;
    loop {
        round += 1;
        let mut drop = Vec::new();
        for p in 0..n_a {
            for q in 0..n_b {
                if removed_at[p * n_b + q] != 0 {
                    continue;
                }
                let ok = a_out[p].iter().all(|m| {
                    let targets = &b_out[(q * k + map[m.entry]) * k + map[m.exit]];
                    targets.iter().any(|&q2| removed_at[m.to * n_b + q2] == 0)
                });
                if !ok {
                    drop.push(p * n_b + q);
                }
            }
        }
        if drop.is_empty() {
            break;
        }
        for i in drop {
            removed_at[i] = round;
        }
    }
    Refinement { n_b, removed_at }
}

/// Greatest simulation of `a` by `b`, or `None` if it misses the initial pair.
pub fn simulation_preorder(
    a: &Lts,
    b: &Lts,
    map: &[(String, String)],
) -> Result<Option<BTreeSet<(usize, usize)>>, VerifyError> {
    let map = resolve_port_map(a, b, map)?;
    let r = refine(a, b, &map);
    Ok(r.holds(a.initial, b.initial).then(|| r.relation()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    FailSoundness,
    FailCompleteness,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::FailSoundness => "fail-soundness",
            Verdict::FailCompleteness => "fail-completeness",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s {
            "pass" => Some(Verdict::Pass),
            "fail-soundness" => Some(Verdict::FailSoundness),
            "fail-completeness" => Some(Verdict::FailCompleteness),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Attacker moves on one side, defender replies on the other. The last
/// attacker move has no reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub attacker: Vec<LtsMove>,
    pub defender: Vec<LtsMove>,
}

impl Counterexample {
    pub fn render(&self, att: &Lts, def: &Lts) -> Vec<String> {
        let mut out = Vec::new();
        for (i, m) in self.attacker.iter().enumerate() {
            out.push(format!("move  {}", att.label(m)));
            match self.defender.get(i) {
                Some(r) => out.push(format!("reply {}", def.label(r))),
                None => out.push("reply none".to_string()),
            }
        }
        out
    }
}

/// Linear attack against a failed simulation. The attacker always plays a
/// move that drops out earliest, the defender the reply that survives
/// longest; ties go to the least label.
pub fn counterexample(a: &Lts, b: &Lts, map: &[usize], r: &Refinement) -> Option<Counterexample> {
    let (mut p, mut q) = (a.initial, b.initial);
    if r.holds(p, q) {
        return None;
    }
    let a_out = a.outgoing();
    let b_out = b.outgoing();
    let mut cx = Counterexample {
        attacker: Vec::new(),
        defender: Vec::new(),
    };
    loop {
        let level = r.removed_at(p, q);
        // Best reply value for each a-move: highest surviving level among
        // matching b-moves (0 means the pair survives, treated as infinity).
        let reply = |m: &LtsMove| -> Option<LtsMove> {
            b_out[q]
                .iter()
                .filter(|n| n.entry == map[m.entry] && n.exit == map[m.exit])
                .max_by(|x, y| {
                    let lx = lvl(r.removed_at(m.to, x.to));
                    let ly = lvl(r.removed_at(m.to, y.to));
                    lx.cmp(&ly).then(y.cmp(x))
                })
                .copied()
        };
        let mut best: Option<(u32, LtsMove)> = None;
        for m in &a_out[p] {
            let v = match reply(m) {
                None => 0,
                Some(n) => lvl(r.removed_at(m.to, n.to)),
            };
            if v < level && best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, *m));
            }
        }
        let (_, m) = best.expect("a removed pair has a refuting move");
        cx.attacker.push(m);
        match reply(&m) {
            None => return Some(cx),
            Some(n) => {
                cx.defender.push(n);
                p = m.to;
                q = n.to;
            }
        }
    }
}

fn lvl(x: u32) -> u32 {
    if x == 0 {
        u32::MAX
    } else {
        x
    }
}

/// Checks a counterexample mechanically: both traces are executable from
/// the initial states with matching labels, and the final attacker move has
/// no matching reply.
pub fn replay_counterexample(att: &Lts, def: &Lts, map: &[usize], cx: &Counterexample) -> bool {
    if cx.attacker.len() != cx.defender.len() + 1 {
        return false;
    }
    let (mut p, mut q) = (att.initial, def.initial);
    for (i, m) in cx.attacker.iter().enumerate() {
        if m.from != p || !att.moves.contains(m) {
            return false;
        }
        match cx.defender.get(i) {
            Some(n) => {
                if n.from != q || !def.moves.contains(n) || n.entry != map[m.entry] || n.exit != map[m.exit] {
                    return false;
                }
                p = m.to;
                q = n.to;
            }
            None => {
                return !def
                    .moves_from(q)
                    .any(|n| n.entry == map[m.entry] && n.exit == map[m.exit]);
            }
        }
    }
    false
}

#[derive(Debug, Clone)]
pub struct SimReport {
    pub verdict: Verdict,
    /// (network LTS state, target state name) pairs of the soundness relation.
    pub witness_relation: Option<BTreeSet<(usize, String)>>,
    /// (target state name, network LTS state) pairs of the completeness relation.
    pub completeness_relation: Option<BTreeSet<(String, usize)>>,
    pub counterexample: Option<Counterexample>,
    /// Rendered counterexample lines.
    pub trace: Vec<String>,
    /// Network LTS and target LTS, as compared.
    pub network_lts: Lts,
    pub target_lts: Lts,
    /// Port map as network external -> target location indices.
    pub port_map: Vec<usize>,
    pub explored: usize,
}

impl SimReport {
    /// Re-checks the counterexample against both systems.
    pub fn counterexample_replays(&self) -> bool {
        let Some(cx) = &self.counterexample else {
            return false;
        };
        match self.verdict {
            Verdict::Pass => false,
            Verdict::FailSoundness => replay_counterexample(&self.network_lts, &self.target_lts, &self.port_map, cx),
            Verdict::FailCompleteness => {
                replay_counterexample(&self.target_lts, &self.network_lts, &invert(&self.port_map), cx)
            }
        }
    }
}

fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (i, &j) in map.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Mutual similarity of the network's saturated behavior and the target's
/// closure. `port_map` pairs network externals with target locations.
pub fn check_simulation(
    net: &Network,
    g: &Gadget,
    s0: &str,
    port_map: &[(String, String)],
    cap: usize,
) -> Result<SimReport, VerifyError> {
    let s = g
        .state_index(s0)
        .ok_or_else(|| VerifyError::UnknownState(s0.to_string()))?;
    let target = closure_lts(g, s);
    let names = net.external_names();
    if port_map.len() != names.len() {
        return Err(VerifyError::PortMismatch(format!(
            "{} mapped ports for {} externals",
            port_map.len(),
            names.len()
        )));
    }
    for (x, _) in port_map {
        if !names.contains(x) {
            return Err(VerifyError::PortMismatch(format!("unknown external \"{x}\"")));
        }
    }
    let (raw, explored) = net.induced_behavior_stats(cap)?;
    let lts = raw.saturate();
    compare(lts, target, port_map, explored)
}

/// Mutual similarity of two LTSs; `a` plays the network.
pub fn compare(a: Lts, b: Lts, port_map: &[(String, String)], explored: usize) -> Result<SimReport, VerifyError> {
    let map = resolve_port_map(&a, &b, port_map)?;
    let inv = invert(&map);
    let sound = refine(&a, &b, &map);
    let mut report = SimReport {
        verdict: Verdict::Pass,
        witness_relation: None,
        completeness_relation: None,
        counterexample: None,
        trace: Vec::new(),
        network_lts: a.clone(),
        target_lts: b.clone(),
        port_map: map.clone(),
        explored,
    };
    if !sound.holds(a.initial, b.initial) {
        let cx = counterexample(&a, &b, &map, &sound).expect("failed pair");
        report.verdict = Verdict::FailSoundness;
        report.trace = cx.render(&a, &b);
        report.counterexample = Some(cx);
        return Ok(report);
    }
    let complete = refine(&b, &a, &inv);
    if !complete.holds(b.initial, a.initial) {
        let cx = counterexample(&b, &a, &inv, &complete).expect("failed pair");
        report.verdict = Verdict::FailCompleteness;
        report.trace = cx.render(&b, &a);
        report.counterexample = Some(cx);
        return Ok(report);
    }
    report.witness_relation = Some(
        sound
            .relation()
            .into_iter()
            .map(|(p, q)| (p, b.state_labels[q].clone()))
            .collect(),
    );
    report.completeness_relation = Some(
        complete
            .relation()
            .into_iter()
            .map(|(q, p)| (b.state_labels[q].clone(), p))
            .collect(),
    );
    Ok(report)
}

/// Identity port map over shared names.
pub fn identity_map(names: &[String]) -> Vec<(String, String)> {
    names.iter().map(|n| (n.clone(), n.clone())).collect()
}

/// Port map from a name-to-name table.
pub fn map_from(table: &BTreeMap<String, String>) -> Vec<(String, String)> {
    table.iter().map(|(a, b)| (a.clone(), b.clone())).collect()
}
