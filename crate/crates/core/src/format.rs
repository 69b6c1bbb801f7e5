//! Versioned text formats for gadgets, networks and constructions, with
//! positioned diagnostics and a canonical serializer.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde_yaml::{Mapping, Value};

use crate::gadget::{Gadget, RawGadget, RawTransition};
use crate::network::{Endpoint, Network, NetworkBuilder};

pub const FORMAT_VERSION: u64 = 1;

/// Parse or validation failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for FormatError {}

/// Source text plus the position search used for semantic diagnostics.
struct Src<'a> {
    text: &'a str,
}

impl<'a> Src<'a> {
    /// Position of the first whole-word `token` after the line of `key:`,
    /// falling back to the key itself and then to the top of the file.
    fn locate(&self, key: &str, token: Option<&str>) -> (usize, usize) {
        let lines: Vec<&str> = self.text.lines().collect();
        let key_line = lines
            .iter()
            .position(|l| l.trim_start().starts_with(&format!("{key}:")));
        let from = key_line.unwrap_or(0);
        if let Some(tok) = token.filter(|t| !t.is_empty()) {
            for (i, l) in lines.iter().enumerate().skip(from) {
                if let Some(c) = find_word(l, tok) {
                    return (i + 1, c + 1);
                }
            }
        }
        match key_line {
            Some(i) => (i + 1, lines[i].len() - lines[i].trim_start().len() + 1),
            None => (1, 1),
        }
    }

    fn err(&self, key: &str, token: Option<&str>, message: impl Into<String>) -> FormatError {
        let (line, column) = self.locate(key, token);
        FormatError {
            line,
            column,
            message: message.into(),
        }
    }
}

fn find_word(line: &str, tok: &str) -> Option<usize> {
    let is_word = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-';
    let mut start = 0;
    while let Some(off) = line[start..].find(tok) {
        let i = start + off;
        let before = line[..i].chars().next_back();
        let after = line[i + tok.len()..].chars().next();
        if !before.is_some_and(is_word) && !after.is_some_and(is_word) {
            return Some(i);
        }
        start = i + tok.len();
    }
    None
}

fn parse_yaml(text: &str) -> Result<Mapping, FormatError> {
    let v: Value = serde_yaml::from_str(text).map_err(|e| {
        let (line, column) = e.location().map(|l| (l.line(), l.column())).unwrap_or((1, 1));
        FormatError {
            line,
            column,
            message: format!("syntax-error: {e}"),
        }
    })?;
    match v {
        Value::Mapping(m) => Ok(m),
        _ => Err(FormatError {
            line: 1,
            column: 1,
            message: "syntax-error: top level must be a mapping".into(),
        }),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Reader over one top-level mapping, tracking unknown keys.
struct Doc<'a> {
    src: Src<'a>,
    map: Mapping,
}

impl<'a> Doc<'a> {
    fn new(text: &'a str, kind: &str, allowed: &[&str]) -> Result<Self, FormatError> {
        let map = parse_yaml(text)?;
        let doc = Doc { src: Src { text }, map };
        for k in doc.map.keys() {
            let k = scalar(k).unwrap_or_default();
            if !allowed.contains(&k.as_str()) {
                return Err(doc.src.err(&k, None, format!("unknown key \"{k}\"")));
            }
        }
        match doc.map.get("format") {
            Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
            Some(_) => return Err(doc.src.err("format", None, "unsupported format version")),
            None => return Err(doc.src.err("format", None, "missing key \"format\"")),
        }
        let k = doc.string("kind")?;
        if k != kind {
            return Err(doc
                .src
                .err("kind", None, format!("expected kind \"{kind}\", found \"{k}\"")));
        }
        Ok(doc)
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    fn string(&self, key: &str) -> Result<String, FormatError> {
        match self.get(key) {
            None => Err(self.src.err(key, None, format!("missing key \"{key}\""))),
            Some(v) => scalar(v).ok_or_else(|| self.src.err(key, None, format!("\"{key}\" must be a scalar"))),
        }
    }

    fn opt_string(&self, key: &str) -> Result<Option<String>, FormatError> {
        match self.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(_) => self.string(key).map(Some),
        }
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool, FormatError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(self.src.err(key, None, format!("\"{key}\" must be true or false"))),
        }
    }

    fn seq<'b>(&'b self, key: &str) -> Result<&'b [Value], FormatError> {
        match self.get(key) {
            None => Ok(&[]),
            Some(Value::Sequence(s)) => Ok(s),
            Some(_) => Err(self.src.err(key, None, format!("\"{key}\" must be a list"))),
        }
    }

    fn strings(&self, key: &str) -> Result<Vec<String>, FormatError> {
        self.seq(key)?
            .iter()
            .map(|v| scalar(v).ok_or_else(|| self.src.err(key, None, format!("\"{key}\" entries must be scalars"))))
            .collect()
    }

    /// A list of scalar lists (transitions, connections, port maps).
    fn rows(&self, key: &str) -> Result<Vec<Vec<String>>, FormatError> {
        self.seq(key)?
            .iter()
            .map(|row| match row {
                Value::Sequence(items) => items
                    .iter()
                    .map(|v| scalar(v).ok_or_else(|| self.src.err(key, None, "expected scalar")))
                    .collect(),
                _ => Err(self.src.err(key, None, format!("\"{key}\" entries must be lists"))),
            })
            .collect()
    }
}

/// Parsed gadget file.
#[derive(Debug, Clone)]
pub struct GadgetFile {
    pub gadget: Gadget,
    pub notes: Option<String>,
}

pub fn parse_gadget(text: &str) -> Result<GadgetFile, FormatError> {
    let doc = Doc::new(
        text,
        "gadget",
        &[
            "format",
            "kind",
            "name",
            "states",
            "locations",
            "transitions",
            "undirected",
            "embedding",
            "roles",
            "notes",
        ],
    )?;
    let name = doc.string("name")?;
    let mut raw = RawGadget {
        name,
        states: doc.strings("states")?,
        locations: doc.strings("locations")?,
        ..Default::default()
    };
    for (key, both) in [("transitions", false), ("undirected", true)] {
        for row in doc.rows(key)? {
            if row.len() != 4 {
                return Err(doc
                    .src
                    .err(key, row.first().map(|s| s.as_str()), "transition needs 4 fields"));
            }
            raw.transitions
                .push(RawTransition::new(&row[0], &row[1], &row[2], &row[3]));
            if both {
                raw.transitions
                    .push(RawTransition::new(&row[0], &row[3], &row[2], &row[1]));
            }
        }
    }
    if doc.get("embedding").is_some() {
        raw.embedding = Some(doc.strings("embedding")?);
    }
    match doc.get("roles") {
        None => {}
        Some(Value::Mapping(m)) => {
            let mut roles = Vec::new();
            for (k, v) in m {
                match (scalar(k), scalar(v)) {
                    (Some(k), Some(v)) => roles.push((k, v)),
                    _ => return Err(doc.src.err("roles", None, "roles map locations to role names")),
                }
            }
            raw.roles = Some(roles);
        }
        Some(_) => return Err(doc.src.err("roles", None, "roles must be a mapping")),
    }
    let notes = doc.opt_string("notes")?;
    match Gadget::new(raw) {
        Ok(gadget) => Ok(GadgetFile { gadget, notes }),
        Err(e) => {
            let v = &e.violations[0];
            let (key, tok) = violation_anchor(v);
            Err(doc.src.err(key, tok.as_deref(), format!("invalid gadget: {v}")))
        }
    }
}

fn violation_anchor(v: &crate::gadget::Violation) -> (&'static str, Option<String>) {
    use crate::gadget::Violation as V;
    let text = v.to_string();
    let quoted = text.split('"').nth(1).map(str::to_string);
    let key = match v {
        V::InvalidName(_) => "name",
        V::NoStates | V::DuplicateState(_) => "states",
        V::DuplicateLocation(_) => "locations",
        V::UnknownState(..) | V::UnknownLocation(..) | V::DuplicateTransition(..) => "transitions",
        V::EmbeddingNotPermutation(_) => "embedding",
        V::UnknownRole { .. } | V::RoleLocationUnknown(_) | V::MissingRole(_) | V::DuplicateRole(_) => "roles",
        V::InvalidIdentifier(_) => "states",
    };
    (key, quoted)
}

/// Resolves gadget imports by name.
pub trait GadgetResolver {
    fn resolve(&self, name: &str) -> Option<Arc<Gadget>>;
}

impl<F: Fn(&str) -> Option<Arc<Gadget>>> GadgetResolver for F {
    fn resolve(&self, name: &str) -> Option<Arc<Gadget>> {
        self(name)
    }
}

#[derive(Debug, Clone)]
pub struct NetworkFile {
    pub network: Network,
    pub notes: Option<String>,
}

const NETWORK_KEYS: &[&str] = &[
    "format",
    "kind",
    "name",
    "gadgets",
    "instances",
    "connections",
    "externals",
    "planar",
    "start",
    "goal",
    "notes",
];

fn network_from_doc(doc: &Doc, resolver: &dyn GadgetResolver) -> Result<Network, FormatError> {
    let name = doc.string("name")?;
    let imports = doc.strings("gadgets")?;
    let mut lib = std::collections::BTreeMap::new();
    for g in &imports {
        let gd = resolver
            .resolve(g)
            .ok_or_else(|| doc.src.err("gadgets", Some(g), format!("unknown-gadget \"{g}\"")))?;
        lib.insert(g.clone(), gd);
    }
    let mut b = NetworkBuilder::new(&name);
    for v in doc.seq("instances")? {
        let Value::Mapping(m) = v else {
            return Err(doc
                .src
                .err("instances", None, "instances are {id, gadget, state} mappings"));
        };
        let field = |k: &str| {
            m.get(k)
                .and_then(scalar)
                .ok_or_else(|| doc.src.err("instances", None, format!("instance lacks \"{k}\"")))
        };
        let (id, gadget, state) = (field("id")?, field("gadget")?, field("state")?);
        let gd = lib.get(&gadget).ok_or_else(|| {
            doc.src.err(
                "instances",
                Some(&gadget),
                format!("unknown-gadget \"{gadget}\" (not imported)"),
            )
        })?;
        if gd.state_index(&state).is_none() {
            return Err(doc.src.err(
                "instances",
                Some(&id),
                format!("unknown-state \"{state}\" for instance \"{id}\""),
            ));
        }
        b.instance(&id, gd, &state);
    }
    let mut instances: Vec<(String, Arc<Gadget>)> = Vec::new();
    for v in doc.seq("instances")? {
        if let Value::Mapping(m) = v {
            let id = m.get("id").and_then(scalar).unwrap_or_default();
            let g = m.get("gadget").and_then(scalar).unwrap_or_default();
            instances.push((id, Arc::clone(&lib[&g])));
        }
    }
    let externals = doc.strings("externals")?;
    for e in &externals {
        b.external(e);
    }
    let endpoint = |key: &str, s: &str| -> Result<Endpoint, FormatError> {
        let e = Endpoint::parse(s).ok_or_else(|| doc.src.err(key, Some(s), format!("bad endpoint \"{s}\"")))?;
        match &e {
            Endpoint::Port(i, l) => {
                let Some((_, g)) = instances.iter().find(|(id, _)| id == i) else {
                    return Err(doc.src.err(
                        key,
                        Some(s),
                        format!("dangling-attachment: unknown instance in \"{s}\""),
                    ));
                };
                if g.location_index(l).is_none() {
                    return Err(doc.src.err(
                        key,
                        Some(s),
                        format!("dangling-attachment: unknown location in \"{s}\""),
                    ));
                }
            }
            Endpoint::Ext(n) => {
                if !externals.contains(n) {
                    return Err(doc.src.err(key, Some(s), format!("unknown-external \"{n}\"")));
                }
            }
        }
        Ok(e)
    };
    for row in doc.rows("connections")? {
        let ends = row
            .iter()
            .map(|s| endpoint("connections", s))
            .collect::<Result<Vec<_>, _>>()?;
        b.connect(&ends);
    }
    if let Some(s) = doc.opt_string("start")? {
        b.start(endpoint("start", &s)?);
    }
    if let Some(s) = doc.opt_string("goal")? {
        b.goal(endpoint("goal", &s)?);
    }
    b.planar_externals(doc.bool("planar", false)?);
    b.build().map_err(|e| {
        let msg = e.to_string();
        let tok = msg.split('"').nth(1).map(str::to_string);
        doc.src.err("connections", tok.as_deref(), msg)
    })
}

pub fn parse_network(text: &str, resolver: &dyn GadgetResolver) -> Result<NetworkFile, FormatError> {
    let doc = Doc::new(text, "network", NETWORK_KEYS)?;
    Ok(NetworkFile {
        network: network_from_doc(&doc, resolver)?,
        notes: doc.opt_string("notes")?,
    })
}

/// A network bundled with the gadget it is meant to simulate.
#[derive(Debug, Clone)]
pub struct ConstructionFile {
    pub network: Network,
    pub target: String,
    pub target_state: String,
    /// Network external -> target location.
    pub port_map: Vec<(String, String)>,
    pub expect_verdict: String,
    pub expect_planar: bool,
    pub provenance: String,
    pub notes: Option<String>,
}

pub fn parse_construction(text: &str, resolver: &dyn GadgetResolver) -> Result<ConstructionFile, FormatError> {
    let mut keys = NETWORK_KEYS.to_vec();
    keys.extend(["target", "target_state", "port_map", "expect", "provenance"]);
    let doc = Doc::new(text, "construction", &keys)?;
    let network = network_from_doc(&doc, resolver)?;
    let target = doc.string("target")?;
    let tg = resolver.resolve(&target).ok_or_else(|| {
        doc.src
            .err("target", Some(&target), format!("unknown-gadget \"{target}\""))
    })?;
    let target_state = doc.string("target_state")?;
    if tg.state_index(&target_state).is_none() {
        return Err(doc
            .src
            .err("target_state", None, format!("unknown-state \"{target_state}\"")));
    }
    let mut port_map = Vec::new();
    for row in doc.rows("port_map")? {
        if row.len() != 2 {
            return Err(doc.src.err("port_map", None, "port_map rows are [external, location]"));
        }
        port_map.push((row[0].clone(), row[1].clone()));
    }
    let (expect_verdict, expect_planar) = match doc.get("expect") {
        Some(Value::Mapping(m)) => (
            m.get("verdict").and_then(scalar).unwrap_or_else(|| "pass".into()),
            matches!(m.get("planar"), Some(Value::Bool(true))),
        ),
        None => ("pass".into(), false),
        Some(_) => return Err(doc.src.err("expect", None, "expect must be a mapping")),
    };
    let provenance = doc.string("provenance")?;
    if provenance.is_empty() {
        return Err(doc.src.err("provenance", None, "provenance must be nonempty"));
    }
    Ok(ConstructionFile {
        network,
        target,
        target_state,
        port_map,
        expect_verdict,
        expect_planar,
        provenance,
        notes: doc.opt_string("notes")?,
    })
}

/// Reads the `kind` of a document without validating the rest.
pub fn document_kind(text: &str) -> Result<String, FormatError> {
    let m = parse_yaml(text)?;
    m.get("kind").and_then(scalar).ok_or(FormatError {
        line: 1,
        column: 1,
        message: "missing key \"kind\"".into(),
    })
}

/// Quotes scalars that would not read back as plain strings.
fn q(s: &str) -> String {
    let plain = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '/'))
        && !s.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '.')
        && !matches!(
            s.to_ascii_lowercase().as_str(),
            "true" | "false" | "null" | "yes" | "no" | "on" | "off" | "y" | "n"
        )
        && !s.ends_with(':')
        && !s.contains(": ");
    if plain {
        s.to_string()
    } else {
        let mut out = String::from("\"");
        for c in s.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
        out
    }
}

fn flow(items: &[String]) -> String {
    let parts: Vec<String> = items.iter().map(|s| q(s)).collect();
    format!("[{}]", parts.join(", "))
}

fn header(out: &mut String, kind: &str, name: &str) {
    let _ = writeln!(out, "format: {FORMAT_VERSION}");
    let _ = writeln!(out, "kind: {kind}");
    let _ = writeln!(out, "name: {}", q(name));
}

fn notes(out: &mut String, notes: Option<&str>) {
    if let Some(n) = notes {
        let _ = writeln!(out, "notes: {}", q(n));
    }
}

/// Canonical gadget text. Undirected shorthand is stored expanded.
pub fn gadget_to_string(g: &Gadget, note: Option<&str>) -> String {
    let raw = g.to_raw();
    let mut out = String::new();
    header(&mut out, "gadget", &raw.name);
    let _ = writeln!(out, "states: {}", flow(&raw.states));
    let _ = writeln!(out, "locations: {}", flow(&raw.locations));
    let _ = writeln!(out, "transitions:");
    for t in &raw.transitions {
        let row = [
            t.from_state.clone(),
            t.from_location.clone(),
            t.to_state.clone(),
            t.to_location.clone(),
        ];
        let _ = writeln!(out, "  - {}", flow(&row));
    }
    if let Some(e) = &raw.embedding {
        let _ = writeln!(out, "embedding: {}", flow(e));
    }
    if let Some(roles) = &raw.roles {
        let _ = writeln!(out, "roles:");
        for (l, r) in roles {
            let _ = writeln!(out, "  {}: {}", q(l), r);
        }
    }
    notes(&mut out, note);
    out
}

fn network_body(out: &mut String, net: &Network) {
    let mut imports: Vec<String> = Vec::new();
    for i in net.instances() {
        let n = i.gadget.name().to_string();
        if !imports.contains(&n) {
            imports.push(n);
        }
    }
    let _ = writeln!(out, "gadgets: {}", flow(&imports));
    let _ = writeln!(out, "instances:");
    for i in net.instances() {
        let _ = writeln!(
            out,
            "  - {{id: {}, gadget: {}, state: {}}}",
            q(&i.id),
            q(i.gadget.name()),
            q(i.gadget.state_name(i.initial))
        );
    }
    let _ = writeln!(out, "externals: {}", flow(&net.external_names()));
    let mut members: Vec<Vec<String>> = vec![Vec::new(); net.nodes().len()];
    for (n, name) in net.nodes().iter().enumerate() {
        if net.externals().contains(&n) {
            members[n].push(format!("ext:{name}"));
        }
    }
    for (i, inst) in net.instances().iter().enumerate() {
        for l in 0..inst.gadget.locations().len() {
            members[net.attachment(i, l)].push(format!("{}.{}", inst.id, inst.gadget.location_name(l)));
        }
    }
    let _ = writeln!(out, "connections:");
    for m in &members {
        if m.len() >= 2 || m.first().is_some_and(|s| s.starts_with("ext:")) {
            let _ = writeln!(out, "  - {}", flow(m));
        }
    }
    if net.planar_externals() {
        let _ = writeln!(out, "planar: true");
    }
    for (key, n) in [("start", net.start()), ("goal", net.goal())] {
        if let Some(n) = n {
            if let Some(e) = members[n].first() {
                let _ = writeln!(out, "{key}: {}", q(e));
            }
        }
    }
}

pub fn network_to_string(net: &Network, note: Option<&str>) -> String {
    let mut out = String::new();
    header(&mut out, "network", net.name());
    network_body(&mut out, net);
    notes(&mut out, note);
    out
}

pub fn construction_to_string(c: &ConstructionFile) -> String {
    let mut out = String::new();
    header(&mut out, "construction", c.network.name());
    network_body(&mut out, &c.network);
    let _ = writeln!(out, "target: {}", q(&c.target));
    let _ = writeln!(out, "target_state: {}", q(&c.target_state));
    let _ = writeln!(out, "port_map:");
    for (a, b) in &c.port_map {
        let _ = writeln!(out, "  - {}", flow(&[a.clone(), b.clone()]));
    }
    let _ = writeln!(
        out,
        "expect: {{verdict: {}, planar: {}}}",
        q(&c.expect_verdict),
        c.expect_planar
    );
    let _ = writeln!(out, "provenance: {}", q(&c.provenance));
    notes(&mut out, c.notes.as_deref());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIODE: &str = "format: 1\nkind: gadget\nname: diode\nstates: [s]\nlocations: [in, out]\ntransitions:\n  - [s, in, s, out]\nembedding: [in, out]\n";

    #[test]
    fn canonical_diode_roundtrips() {
        let g = parse_gadget(DIODE).unwrap().gadget;
        assert_eq!(g.transitions().len(), 1);
        assert_eq!(gadget_to_string(&g, None), DIODE);
    }

    #[test]
    fn unknown_state_reports_position() {
        let bad = DIODE.replace("[s, in, s, out]", "[s, in, t, out]");
        let e = parse_gadget(&bad).unwrap_err();
        assert_eq!((e.line, e.column), (7, 13));
        assert!(e.message.contains("\"t\""), "{}", e.message);
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_gadget("format: 1\nkind: [gadget\n").unwrap_err();
        assert!(e.message.starts_with("syntax-error"));
        assert!(e.line >= 2);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = parse_gadget(&format!("{DIODE}colour: red\n")).unwrap_err();
        assert_eq!(e.line, 9);
    }

    #[test]
    fn numeric_states_are_quoted() {
        let raw = RawGadget::new("t", &["0", "1"], &["a", "b"]).transition("0", "a", "1", "b");
        let g = Gadget::new(raw).unwrap();
        let text = gadget_to_string(&g, Some("two: states"));
        assert!(text.contains("states: [\"0\", \"1\"]"));
        let back = parse_gadget(&text).unwrap();
        assert_eq!(gadget_to_string(&back.gadget, back.notes.as_deref()), text);
    }

    #[test]
    fn undirected_shorthand_expands() {
        let text =
            "format: 1\nkind: gadget\nname: wire\nstates: [s]\nlocations: [a, b]\nundirected:\n  - [s, a, s, b]\n";
        let g = parse_gadget(text).unwrap().gadget;
        assert_eq!(g.transitions().len(), 2);
    }

    #[test]
    fn network_roundtrips() {
        let g = Arc::new(parse_gadget(DIODE).unwrap().gadget);
        let resolve = |n: &str| (n == "diode").then(|| Arc::clone(&g));
        let text = "format: 1\nkind: network\nname: two\ngadgets: [diode]\ninstances:\n  - {id: a, gadget: diode, state: s}\n  - {id: b, gadget: diode, state: s}\nexternals: [in, out]\nconnections:\n  - [ext:in, a.in]\n  - [a.out, b.in]\n  - [ext:out, b.out]\nstart: ext:in\ngoal: ext:out\n";
        let net = parse_network(text, &resolve).unwrap().network;
        assert!(net.solve(100).unwrap().reachable);
        let canon = network_to_string(&net, None);
        let again = parse_network(&canon, &resolve).unwrap().network;
        assert_eq!(network_to_string(&again, None), canon);
    }

    #[test]
    fn dangling_endpoint_is_positioned() {
        let g = Arc::new(parse_gadget(DIODE).unwrap().gadget);
        let resolve = |n: &str| (n == "diode").then(|| Arc::clone(&g));
        let text = "format: 1\nkind: network\nname: x\ngadgets: [diode]\ninstances:\n  - {id: a, gadget: diode, state: s}\nexternals: []\nconnections:\n  - [a.in, a.mid]\n";
        let e = parse_network(text, &resolve).unwrap_err();
        assert_eq!(e.line, 9);
        assert!(e.message.contains("dangling-attachment"));
    }
}
