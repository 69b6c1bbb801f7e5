//! Graphviz export. Output order follows declaration order only, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use crate::gadget::{Gadget, Role};
use crate::network::Network;

fn role_color(r: Option<Role>) -> &'static str {
    match r {
        Some(Role::Open) => "palegreen",
        Some(Role::Traverse) => "lightblue",
        Some(Role::Close) => "lightcoral",
        _ => "white",
    }
}

fn edge_color(r: Option<Role>) -> &'static str {
    match r {
        Some(Role::Open) => "green",
        Some(Role::Traverse) => "blue",
        Some(Role::Close) => "red",
        _ => "black",
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn role(g: &Gadget, l: usize) -> Option<Role> {
    g.roles().map(|r| r[l])
}

/// Port order used for drawing: the embedding when present.
fn port_order(g: &Gadget) -> Vec<usize> {
    match g.embedding() {
        Some(e) => e.cycle().to_vec(),
        None => (0..g.locations().len()).collect(),
    }
}

/// Network drawing: instances as tables with ports in embedding order,
/// nodes as points, externals as labelled boxes.
pub fn network_to_dot(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", esc(net.name()));
    let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
    for (i, inst) in net.instances().iter().enumerate() {
        let g = &inst.gadget;
        let _ = write!(
            out,
            "  i{i} [shape=plaintext, label=<<TABLE BORDER=\"0\" CELLBORDER=\"1\" CELLSPACING=\"0\"><TR><TD COLSPAN=\"{}\"><B>{}</B>: {} ({})</TD></TR><TR>",
            g.locations().len().max(1),
            esc(&inst.id),
            esc(g.name()),
            esc(g.state_name(inst.initial)),
        );
        for l in port_order(g) {
            let _ = write!(
                out,
                "<TD PORT=\"p{l}\" BGCOLOR=\"{}\">{}</TD>",
                role_color(role(g, l)),
                esc(g.location_name(l))
            );
        }
        let _ = writeln!(out, "</TR></TABLE>>];");
    }
    let ext = net.externals();
    for (n, name) in net.nodes().iter().enumerate() {
        if ext.contains(&n) {
            let _ = writeln!(out, "  n{n} [shape=box, style=rounded, label=\"{}\"];", esc(name));
        } else {
            let _ = writeln!(out, "  n{n} [shape=point, xlabel=\"{}\"];", esc(name));
        }
    }
    for (i, inst) in net.instances().iter().enumerate() {
        for l in port_order(&inst.gadget) {
            let n = net.attachment(i, l);
            let _ = writeln!(
                out,
                "  i{i}:p{l} -- n{n} [color={}];",
                edge_color(role(&inst.gadget, l))
            );
        }
    }
    out.push_str("}\n");
    out
}

/// State diagram of a gadget; each transition is an edge labelled with its
/// entry and exit locations and colored by the entry location's role.
pub fn gadget_to_dot(g: &Gadget) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", esc(g.name()));
    let _ = writeln!(out, "  node [fontname=\"Helvetica\", shape=ellipse];");
    for (s, name) in g.states().iter().enumerate() {
        let _ = writeln!(out, "  s{s} [label=\"{}\"];", esc(name));
    }
    for t in g.transitions() {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{} / {}\", color={}];",
            t.from_state,
            t.to_state,
            esc(g.location_name(t.from_location)),
            esc(g.location_name(t.to_location)),
            edge_color(role(g, t.from_location)),
        );
    }
    let order: Vec<String> = port_order(g).iter().map(|&l| esc(g.location_name(l))).collect();
    let _ = writeln!(out, "  label=\"ports: {}\";", order.join(" "));
    out.push_str("}\n");
    out
}
