//! Labeled transition systems over ports: the common currency between a
//! gadget's closure and a network's externally observable behavior.

use std::collections::BTreeSet;

use crate::gadget::Gadget;

/// Enter at `entry` in state `from`, leave at `exit` in state `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LtsMove {
    pub from: usize,
    pub entry: usize,
    pub exit: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    /// Port names, in external order.
    pub ports: Vec<String>,
    /// Underlying per-instance states of each LTS state.
    pub states: Vec<Vec<usize>>,
    pub state_labels: Vec<String>,
    pub initial: usize,
    pub moves: BTreeSet<LtsMove>,
}

impl Lts {
    /// Moves leaving `state`, in label order.
    pub fn moves_from(&self, state: usize) -> impl Iterator<Item = &LtsMove> {
        let lo = LtsMove {
            from: state,
            entry: 0,
            exit: 0,
            to: 0,
        };
        self.moves.range(lo..).take_while(move |m| m.from == state)
    }

    /// Adjacency list indexed by source state.
    pub fn outgoing(&self) -> Vec<Vec<LtsMove>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for m in &self.moves {
            out[m.from].push(*m);
        }
        out
    }

    /// Composes episodes that meet at a port: `(q,a)->(q',b)` and
    /// `(q',b)->(q'',c)` give `(q,a)->(q'',c)`. Adds reflexive moves.
    pub fn saturate(&self) -> Lts {
        let n = self.states.len();
        let k = self.ports.len();
        // reach[(q,a)] = set of (q',b)
        let idx = |q: usize, a: usize| q * k + a;
        let mut adj = vec![Vec::new(); n * k];
        for m in &self.moves {
            adj[idx(m.from, m.entry)].push(idx(m.to, m.exit));
        }
        let mut moves = BTreeSet::new();
        let mut seen = vec![usize::MAX; n * k];
        for q in 0..n {
            for a in 0..k {
                let src = idx(q, a);
                let mut stack = vec![src];
                seen[src] = src;
                while let Some(v) = stack.pop() {
                    moves.insert(LtsMove {
                        from: q,
                        entry: a,
                        exit: v % k,
                        to: v / k,
                    });
                    for &w in &adj[v] {
                        if seen[w] != src {
                            seen[w] = src;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        Lts { moves, ..self.clone() }
    }

    pub fn label(&self, m: &LtsMove) -> String {
        format!(
            "{} : {} -> {} : {}",
            self.state_labels[m.from], self.ports[m.entry], self.ports[m.exit], self.state_labels[m.to]
        )
    }
}

/// Closure of a gadget read as episodes, restricted to the states reachable
/// from `initial`. Ports are the gadget's locations.
pub fn closure_lts(g: &Gadget, initial: usize) -> Lts {
    let reach: Vec<usize> = g.reachable_states(initial).into_iter().collect();
    let mut ix = vec![usize::MAX; g.states().len()];
    for (i, &s) in reach.iter().enumerate() {
        ix[s] = i;
    }
    let base = Lts {
        ports: g.locations().to_vec(),
        states: reach.iter().map(|&s| vec![s]).collect(),
        state_labels: reach.iter().map(|&s| g.state_name(s).to_string()).collect(),
        initial: ix[initial],
        moves: g
            .transitions()
            .iter()
            .filter(|t| ix[t.from_state] != usize::MAX)
            .map(|t| LtsMove {
                from: ix[t.from_state],
                entry: t.from_location,
                exit: t.to_location,
                to: ix[t.to_state],
            })
            .collect(),
    };
    base.saturate()
}

/// Same LTS with ports reordered so that port `i` is `ports[perm[i]]` of the
/// original.
pub fn permute_ports(lts: &Lts, order: &[usize]) -> Lts {
    let mut inv = vec![0; order.len()];
    for (i, &p) in order.iter().enumerate() {
        inv[p] = i;
    }
    Lts {
        ports: order.iter().map(|&p| lts.ports[p].clone()).collect(),
        moves: lts
            .moves
            .iter()
            .map(|m| LtsMove {
                entry: inv[m.entry],
                exit: inv[m.exit],
                ..*m
            })
            .collect(),
        ..lts.clone()
    }
}
