//! Planarity of gadget systems. Each instance becomes a wheel (a hub joined
//! to a cycle of its ports in embedding order), so wires cannot cross the
//! gadget interior and either reflection of the port order is allowed.
//! The planarity test is path addition per biconnected block.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::embedding::equivalent_cycles;
use crate::network::Network;

/// Simple undirected graph with named vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    pub names: Vec<String>,
    pub adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn add_vertex(&mut self, name: String) -> usize {
        self.names.push(name);
        self.adj.push(Vec::new());
        self.names.len() - 1
    }

    /// Adds `u-v` unless present or a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v && !self.adj[u].contains(&v) {
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].retain(|&x| x != v);
        self.adj[v].retain(|&x| x != u);
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            for &v in row {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Cyclic neighbor order at every vertex.
pub type Rotation = Vec<Vec<usize>>;

/// Faces of a rotation system, as dart cycles `(from, to)`.
pub fn trace_faces(g: &Graph, rot: &Rotation) -> Vec<Vec<(usize, usize)>> {
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, r) in rot.iter().enumerate() {
        for (i, &w) in r.iter().enumerate() {
            pos.insert((v, w), i);
        }
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut faces = Vec::new();
    for (u, v) in g.edges().into_iter().flat_map(|(u, v)| [(u, v), (v, u)]) {
        if seen.contains(&(u, v)) {
            continue;
        }
        let mut face = Vec::new();
        let (mut a, mut b) = (u, v);
        while seen.insert((a, b)) {
            face.push((a, b));
            let r = &rot[b];
            let c = r[(pos[&(b, a)] + 1) % r.len()];
            a = b;
            b = c;
        }
        faces.push(face);
    }
    faces
}

/// Connected components of `g`, each as a vertex list.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; g.vertex_count()];
    let mut out = Vec::new();
    for s in 0..g.vertex_count() {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = out.len();
        let mut stack = vec![s];
        comp[s] = c;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &w in &g.adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// `V - E + F == 2` on every connected component.
pub fn euler_check(g: &Graph, rot: &Rotation) -> bool {
    let faces = trace_faces(g, rot);
    let comps = components(g);
    let mut comp_of = vec![0; g.vertex_count()];
    for (c, vs) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = c;
        }
    }
    let mut f = vec![0i64; comps.len()];
    for face in &faces {
        f[comp_of[face[0].0]] += 1;
    }
    comps.iter().enumerate().all(|(c, vs)| {
        let v = vs.len() as i64;
        let e = vs.iter().map(|&x| g.adj[x].len()).sum::<usize>() as i64 / 2;
        let faces = if e == 0 { 1 } else { f[c] };
        v - e + faces == 2
    })
}

/// Biconnected blocks as edge lists.
fn blocks(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut estack: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
            if *i < g.adj[v].len() {
                let w = g.adj[v][*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    estack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    estack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(e) = estack.pop() {
                            block.push(e);
                            if e == (p, v) {
                                break;
                            }
                        }
                        out.push(block);
                    }
                }
            }
        }
    }
    out
}

/// Planar rotation system of `g`, or `None` if `g` is not planar.
pub fn planar_embedding(g: &Graph) -> Option<Rotation> {
    let n = g.vertex_count();
    let mut rot: Rotation = vec![Vec::new(); n];
    for block in blocks(g) {
        let r = embed_block(n, &block)?;
        for (v, order) in r {
            rot[v].extend(order);
        }
    }
    Some(rot)
}

/// Path-addition embedding of one biconnected block.
fn embed_block(n: usize, edges: &[(usize, usize)]) -> Option<Vec<(usize, Vec<usize>)>> {
    if edges.len() == 1 {
        let (u, v) = edges[0];
        return Some(vec![(u, vec![v]), (v, vec![u])]);
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    for row in adj.values_mut() {
        row.sort_unstable();
    }
    let verts: Vec<usize> = adj.keys().copied().collect();
    let total_edges = edges.len();
    if total_edges > 3 * verts.len() - 6 {
        return None;
    }
    let cycle = find_cycle(&adj, verts[0]);
    let mut in_h = vec![false; n];
    let mut h_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        in_h[a] = true;
        h_edges.insert((a.min(b), a.max(b)));
    }
    let mut rev = cycle.clone();
    rev.reverse();
    let mut faces: Vec<Vec<usize>> = vec![cycle, rev];
    while h_edges.len() < total_edges {
        let frags = fragments(&adj, &in_h, &h_edges);
        let mut chosen: Option<(usize, usize)> = None;
        for (fi, frag) in frags.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|a| faces[f].contains(a)))
                .collect();
            match admissible.len() {
                0 => return None,
                1 => {
                    chosen = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if chosen.is_none() {
                        chosen = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, f) = chosen.expect("at least one fragment");
        let path = fragment_path(&adj, &in_h, &frags[fi]);
        for w in path.windows(2) {
            h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        for &v in &path {
            in_h[v] = true;
        }
        let face = faces.swap_remove(f);
        let (u, v) = (path[0], *path.last().unwrap());
        let i = face.iter().position(|&x| x == u).unwrap();
        let j = face.iter().position(|&x| x == v).unwrap();
        let m = face.len();
        let inner = &path[1..path.len() - 1];
        let mut f1: Vec<usize> = (0..=((j + m - i) % m)).map(|k| face[(i + k) % m]).collect();
        f1.extend(inner.iter().rev());
        let mut f2: Vec<usize> = (0..=((i + m - j) % m)).map(|k| face[(j + k) % m]).collect();
        f2.extend(inner.iter());
        faces.push(f1);
        faces.push(f2);
    }
    // rotation: for a->b->c on a face, the neighbor after a around b is c.
    let mut next: HashMap<(usize, usize), usize> = HashMap::new();
    for face in &faces {
        let m = face.len();
        for k in 0..m {
            let (a, b, c) = (face[k], face[(k + 1) % m], face[(k + 2) % m]);
            next.insert((b, a), c);
        }
    }
    let mut out = Vec::new();
    for (&v, row) in &adj {
        let mut order = vec![row[0]];
        let mut cur = row[0];
        while order.len() < row.len() {
            cur = next[&(v, cur)];
            order.push(cur);
        }
        out.push((v, order));
    }
    Some(out)
}

fn find_cycle(adj: &BTreeMap<usize, Vec<usize>>, start: usize) -> Vec<usize> {
    let mut parent: HashMap<usize, usize> = HashMap::from([(start, usize::MAX)]);
    let mut depth: HashMap<usize, usize> = HashMap::from([(start, 0)]);
    let mut stack = vec![(start, 0usize)];
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        let row = &adj[&v];
        if *i >= row.len() {
            stack.pop();
            continue;
        }
        let w = row[*i];
        *i += 1;
        if w == parent[&v] {
            continue;
        }
        if let Some(&dw) = depth.get(&w) {
            if dw < depth[&v] {
                let mut cyc = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[&x];
                    cyc.push(x);
                }
                return cyc;
            }
            continue;
        }
        parent.insert(w, v);
        depth.insert(w, depth[&v] + 1);
        stack.push((w, 0));
    }
    unreachable!("a block with two or more edges has a cycle")
}

struct Fragment {
    /// Interior vertices (empty for a chord).
    interior: Vec<usize>,
    chord: Option<(usize, usize)>,
    attachments: BTreeSet<usize>,
}

fn fragments(adj: &BTreeMap<usize, Vec<usize>>, in_h: &[bool], h_edges: &BTreeSet<(usize, usize)>) -> Vec<Fragment> {
    let mut out = Vec::new();
    for (&u, row) in adj {
        if !in_h[u] {
            continue;
        }
        for &v in row {
            if u < v && in_h[v] && !h_edges.contains(&(u, v)) {
                out.push(Fragment {
                    interior: Vec::new(),
                    chord: Some((u, v)),
                    attachments: BTreeSet::from([u, v]),
                });
            }
        }
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &s in adj.keys() {
        if in_h[s] || seen.contains(&s) {
            continue;
        }
        let mut interior = Vec::new();
        let mut attachments = BTreeSet::new();
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(v) = stack.pop() {
            interior.push(v);
            for &w in &adj[&v] {
                if in_h[w] {
                    attachments.insert(w);
                } else if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        interior.sort_unstable();
        out.push(Fragment {
            interior,
            chord: None,
            attachments,
        });
    }
    out
}

/// A path through the fragment between two distinct attachments.
fn fragment_path(adj: &BTreeMap<usize, Vec<usize>>, in_h: &[bool], frag: &Fragment) -> Vec<usize> {
    if let Some((u, v)) = frag.chord {
        return vec![u, v];
    }
    let inside: BTreeSet<usize> = frag.interior.iter().copied().collect();
    let u = *frag.attachments.iter().next().unwrap();
    let w0 = *adj[&u].iter().find(|w| inside.contains(w)).unwrap();
    let mut parent: HashMap<usize, usize> = HashMap::from([(w0, u)]);
    let mut queue = std::collections::VecDeque::from([w0]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[&x] {
            if in_h[y] && y != u {
                let mut path = vec![y, x];
                let mut z = x;
                while z != w0 {
                    z = parent[&z];
                    path.push(z);
                }
                path.push(u);
                path.reverse();
                return path;
            }
            if inside.contains(&y) && !parent.contains_key(&y) {
                parent.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    unreachable!("a fragment of a block has two attachments")
}

/// Minimal non-planar subgraph by greedy edge deletion; a subdivision of
/// K5 or K3,3.
pub fn obstruction(g: &Graph) -> Vec<(usize, usize)> {
    let mut h = g.clone();
    for (u, v) in g.edges() {
        h.remove_edge(u, v);
        if planar_embedding(&h).is_some() {
            h.add_edge(u, v);
        }
    }
    h.edges()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    AsGiven,
    Reflected,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::AsGiven => "as-given",
            Orientation::Reflected => "reflected",
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PlanarityError {
    #[error("missing-embedding: gadget \"{0}\" has no port order")]
    MissingEmbedding(String),
}

#[derive(Debug, Clone)]
pub struct PlanarityReport {
    pub planar: bool,
    /// Cyclic order of attached ports around each network node.
    pub node_rotation: Option<Vec<(String, Vec<String>)>>,
    /// Reflection chosen for each instance.
    pub orientation: Option<Vec<(String, Orientation)>>,
    /// Edges of a Kuratowski subdivision in the expansion graph.
    pub obstruction: Option<Vec<(String, String)>>,
    pub euler_ok: bool,
    pub graph: Graph,
    pub rotation: Option<Rotation>,
}

/// Vertex layout of the expansion graph.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub graph: Graph,
    /// Port vertex per (instance, location).
    pub port: Vec<Vec<usize>>,
    /// Hub vertex per instance (only for three or more ports).
    pub hub: Vec<Option<usize>>,
    pub node: Vec<usize>,
}

/// Builds the expansion graph. Gadgets with two or fewer locations need no
/// port order.
pub fn expansion_graph(net: &Network) -> Result<Expansion, PlanarityError> {
    let mut g = Graph::default();
    let mut port = Vec::new();
    let mut hub = Vec::new();
    for inst in net.instances() {
        let gd = &inst.gadget;
        let k = gd.locations().len();
        let order: Vec<usize> = match gd.embedding() {
            Some(e) => e.cycle().to_vec(),
            None if k <= 2 => (0..k).collect(),
            None => return Err(PlanarityError::MissingEmbedding(gd.name().to_string())),
        };
        let ps: Vec<usize> = (0..k)
            .map(|l| g.add_vertex(format!("{}.{}", inst.id, gd.location_name(l))))
            .collect();
        for i in 0..k {
            g.add_edge(ps[order[i]], ps[order[(i + 1) % k]]);
        }
        if k >= 3 {
            let h = g.add_vertex(format!("[{}]", inst.id));
            for &p in &ps {
                g.add_edge(h, p);
            }
            hub.push(Some(h));
        } else {
            hub.push(None);
        }
        port.push(ps);
    }
    let node: Vec<usize> = net.nodes().iter().map(|n| g.add_vertex(n.clone())).collect();
    for (i, row) in net.attachments().iter().enumerate() {
        for (l, &n) in row.iter().enumerate() {
            g.add_edge(node[n], port[i][l]);
        }
    }
    let ext = net.externals();
    if net.planar_externals() && ext.len() >= 3 {
        let outer = g.add_vertex("<outer>".to_string());
        for i in 0..ext.len() {
            g.add_edge(outer, node[ext[i]]);
            g.add_edge(node[ext[i]], node[ext[(i + 1) % ext.len()]]);
        }
    }
    Ok(Expansion {
        graph: g,
        port,
        hub,
        node,
    })
}

pub fn check_planarity(net: &Network) -> Result<PlanarityReport, PlanarityError> {
    let ex = expansion_graph(net)?;
    let g = &ex.graph;
    let Some(rot) = planar_embedding(g) else {
        let obs = obstruction(g)
            .into_iter()
            .map(|(u, v)| (g.names[u].clone(), g.names[v].clone()))
            .collect();
        return Ok(PlanarityReport {
            planar: false,
            node_rotation: None,
            orientation: None,
            obstruction: Some(obs),
            euler_ok: false,
            graph: ex.graph,
            rotation: None,
        });
    };
    let euler_ok = euler_check(g, &rot);
    let node_rotation = net
        .nodes()
        .iter()
        .enumerate()
        .map(|(n, name)| {
            let v = ex.node[n];
            let order = rot[v]
                .iter()
                .filter(|&&w| ex.port.iter().flatten().any(|&p| p == w))
                .map(|&w| g.names[w].clone())
                .collect();
            (name.clone(), order)
        })
        .collect();
    let orientation = net
        .instances()
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let o = match (ex.hub[i], inst.gadget.embedding()) {
                (Some(h), Some(e)) => {
                    let around: Vec<usize> = rot[h]
                        .iter()
                        .map(|&w| ex.port[i].iter().position(|&p| p == w).unwrap())
                        .collect();
                    let mut rotated = e.cycle().to_vec();
                    let start = rotated.iter().position(|&l| l == around[0]).unwrap();
                    rotated.rotate_left(start);
                    if rotated == around {
                        Orientation::AsGiven
                    } else {
                        debug_assert!(equivalent_cycles(&around, e.cycle()));
                        Orientation::Reflected
                    }
                }
                _ => Orientation::AsGiven,
            };
            (inst.id.clone(), o)
        })
        .collect();
    Ok(PlanarityReport {
        planar: true,
        node_rotation: Some(node_rotation),
        orientation: Some(orientation),
        obstruction: None,
        euler_ok,
        graph: ex.graph,
        rotation: Some(rot),
    })
}

/// All orders of `items` that keep the first element first.
fn cyclic_orders(items: &[usize]) -> Vec<Vec<usize>> {
    fn perms(rest: &[usize]) -> Vec<Vec<usize>> {
        if rest.len() <= 1 {
            return vec![rest.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..rest.len() {
            let mut r = rest.to_vec();
            let x = r.remove(i);
            for mut p in perms(&r) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    match items.split_first() {
        None => vec![Vec::new()],
        Some((&first, rest)) => perms(rest)
            .into_iter()
            .map(|mut p| {
                p.insert(0, first);
                p
            })
            .collect(),
    }
}

/// Decides planarity without the expansion graph: each gadget is one vertex
/// whose port order is fixed up to reflection, and every cyclic order at
/// every network node is tried against Euler's formula. Returns `None` when
/// more than `limit` rotation systems would be needed.
pub fn planar_by_enumeration(net: &Network, limit: u64) -> Result<Option<bool>, PlanarityError> {
    let n_inst = net.instances().len();
    let n_nodes = net.nodes().len();
    let ext = net.externals();
    let pinned = net.planar_externals() && ext.len() >= 3;
    let n_vert = n_inst + n_nodes + usize::from(pinned);
    // Edge e has dart 2e leaving its first vertex and 2e+1 leaving its second.
    let mut ends: Vec<(usize, usize)> = Vec::new();
    let mut inst_darts: Vec<Vec<usize>> = Vec::new();
    let mut node_darts: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (i, inst) in net.instances().iter().enumerate() {
        let gd = &inst.gadget;
        let k = gd.locations().len();
        let order: Vec<usize> = match gd.embedding() {
            Some(e) => e.cycle().to_vec(),
            None if k <= 2 => (0..k).collect(),
            None => return Err(PlanarityError::MissingEmbedding(gd.name().to_string())),
        };
        let mut darts = Vec::new();
        for l in order {
            let n = net.attachment(i, l);
            let e = ends.len();
            ends.push((i, n_inst + n));
            darts.push(2 * e);
            node_darts[n].push(2 * e + 1);
        }
        inst_darts.push(darts);
    }
    let mut outer_darts = Vec::new();
    if pinned {
        for &n in ext {
            let e = ends.len();
            ends.push((n_vert - 1, n_inst + n));
            outer_darts.push(2 * e);
            node_darts[n].push(2 * e + 1);
        }
    }
    let flips: Vec<usize> = (0..n_inst).filter(|&i| inst_darts[i].len() >= 3).collect();
    let mut total: u64 = 1u64.checked_shl(flips.len() as u32).unwrap_or(u64::MAX);
    for d in &node_darts {
        for f in 2..d.len() as u64 {
            total = total.saturating_mul(f);
        }
    }
    if total > limit {
        return Ok(None);
    }
    let node_choices: Vec<Vec<Vec<usize>>> = node_darts.iter().map(|d| cyclic_orders(d)).collect();
    // Components and isolated vertices do not depend on the rotation.
    let mut parent: Vec<usize> = (0..n_vert).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut degree = vec![0usize; n_vert];
    for &(u, v) in &ends {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
        degree[u] += 1;
        degree[v] += 1;
    }
    let components = (0..n_vert).filter(|&x| find(&mut parent, x) == x).count();
    let isolated = degree.iter().filter(|&&d| d == 0).count();
    let n_darts = 2 * ends.len();
    // Euler: V - E + F = 2C, counting one face per isolated vertex.
    let target_faces = 2 * components + ends.len() - n_vert - isolated;

    let mut next_at = vec![0usize; n_darts];
    let mut seen = vec![false; n_darts];
    let set_cycle = |next_at: &mut [usize], cycle: &[usize]| {
        for j in 0..cycle.len() {
            next_at[cycle[j]] = cycle[(j + 1) % cycle.len()];
        }
    };
    let mut odo = vec![0usize; flips.len() + n_nodes];
    loop {
        for (i, d) in inst_darts.iter().enumerate() {
            let reflect = flips.iter().position(|&f| f == i).is_some_and(|k| odo[k] == 1);
            if reflect {
                let r: Vec<usize> = d.iter().rev().copied().collect();
                set_cycle(&mut next_at, &r);
            } else {
                set_cycle(&mut next_at, d);
            }
        }
        for (n, c) in node_choices.iter().enumerate() {
            set_cycle(&mut next_at, &c[odo[flips.len() + n]]);
        }
        set_cycle(&mut next_at, &outer_darts);
        seen.iter_mut().for_each(|s| *s = false);
        let mut faces = 0;
        for start in 0..n_darts {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                d = next_at[d ^ 1];
            }
        }
        if faces == target_faces {
            return Ok(Some(true));
        }
        let mut k = 0;
        loop {
            if k == odo.len() {
                return Ok(Some(false));
            }
            odo[k] += 1;
            let size = if k < flips.len() {
                2
            } else {
                node_choices[k - flips.len()].len()
            };
            if odo[k] < size {
                break;
            }
            odo[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::default();
        for i in 0..n {
            g.add_vertex(i.to_string());
        }
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        graph(n, &e)
    }

    fn k33() -> Graph {
        let mut e = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                e.push((i, j));
            }
        }
        graph(6, &e)
    }

    #[test]
    fn k4_is_planar_with_euler() {
        let g = complete(4);
        let rot = planar_embedding(&g).unwrap();
        assert!(euler_check(&g, &rot));
    }

    #[test]
    fn k5_and_k33_are_not_planar() {
        assert!(planar_embedding(&complete(5)).is_none());
        assert!(planar_embedding(&k33()).is_none());
    }

    #[test]
    fn obstruction_of_k33_plus_chord_is_k33() {
        let mut g = k33();
        g.add_edge(0, 1);
        assert_eq!(obstruction(&g).len(), 9);
    }

    #[test]
    fn disconnected_and_cut_vertices_embed() {
        let g = graph(7, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (5, 6)]);
        let rot = planar_embedding(&g).unwrap();
        assert!(euler_check(&g, &rot));
    }

    fn grid(w: usize, h: usize) -> Graph {
        let mut e = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                if x + 1 < w {
                    e.push((v, v + 1));
                }
                if y + 1 < h {
                    e.push((v, v + w));
                }
            }
        }
        graph(w * h, &e)
    }

    #[test]
    fn grid_embeds() {
        let g = grid(5, 4);
        let rot = planar_embedding(&g).unwrap();
        assert!(euler_check(&g, &rot));
    }

    /// Planar iff some rotation system has genus 0.
    fn brute_force_planar(g: &Graph) -> bool {
        fn perms(rest: &[usize]) -> Vec<Vec<usize>> {
            if rest.len() <= 1 {
                return vec![rest.to_vec()];
            }
            let mut out = Vec::new();
            for i in 0..rest.len() {
                let mut r = rest.to_vec();
                let x = r.remove(i);
                for mut p in perms(&r) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }
        // Fix the first neighbor; permute the rest.
        let choices: Vec<Vec<Vec<usize>>> = g
            .adj
            .iter()
            .map(|row| {
                if row.is_empty() {
                    return vec![Vec::new()];
                }
                perms(&row[1..])
                    .into_iter()
                    .map(|mut p| {
                        p.insert(0, row[0]);
                        p
                    })
                    .collect()
            })
            .collect();
        let mut idx = vec![0; choices.len()];
        loop {
            let rot: Rotation = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            if euler_check(g, &rot) {
                return true;
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return false;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    proptest! {
        // Any embedding found must pass the Euler check; a graph with a
        // K5 or K3,3 planted on disjoint vertices must be rejected.
        #[test]
        fn embeddings_satisfy_euler(edges in proptest::collection::vec((0usize..9, 0usize..9), 0..20)) {
            let g = graph(9, &edges);
            if let Some(rot) = planar_embedding(&g) {
                prop_assert!(euler_check(&g, &rot));
            }
        }

        #[test]
        fn agrees_with_rotation_enumeration(edges in proptest::collection::vec((0usize..7, 0usize..7), 8..16)) {
            let g = graph(7, &edges);
            prop_assume!(g.adj.iter().all(|r| r.len() <= 5));
            prop_assert_eq!(planar_embedding(&g).is_some(), brute_force_planar(&g));
        }

        #[test]
        fn planted_k5_is_rejected(edges in proptest::collection::vec((5usize..10, 5usize..10), 0..10)) {
            let mut g = complete(5);
            for _ in 0..5 { g.add_vertex(String::new()); }
            for (u, v) in edges { g.add_edge(u, v); }
            prop_assert!(planar_embedding(&g).is_none());
        }
    }
}
