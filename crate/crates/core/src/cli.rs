//! Command-line front end. `run` returns the process exit code:
//! 0 expected outcome, 1 negative result, 2 input error, 3 cap exceeded.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{render_reports, run_mutations, verify_construction, Catalog, Mutation};
use crate::classify::{classify_planar_door_case, classify_structure, door_parts};
use crate::compiler::{universal_pipeline, DEFAULT_BUDGET};
use crate::dot::{gadget_to_dot, network_to_dot};
use crate::format::{
    construction_to_string, document_kind, parse_construction, parse_gadget, parse_network, ConstructionFile,
    FormatError, GadgetResolver,
};
use crate::gadget::Gadget;
use crate::network::{Network, SearchError, DEFAULT_CAP};
use crate::planarity::check_planarity;
use crate::simulation::{check_simulation, identity_map, Verdict, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "doorkit", version, about = "Motion planning through door gadgets")]
struct Cli {
    /// File format version to read and write.
    #[arg(long, global = true, default_value_t = 1)]
    format: u32,
    /// Extra gadget files or directories used to resolve imports.
    #[arg(long = "lib", global = true)]
    lib: Vec<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Reachability from start to goal.
    Solve(SolveArgs),
    /// Checks that a network simulates a gadget.
    Verify(VerifyArgs),
    /// Checks whether a network is planar.
    Planarity(InputArg),
    /// Builds a door network simulating a gadget.
    Compile(CompileArgs),
    /// Catalog of shipped gadgets and constructions.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Structure of a gadget and its planar door case.
    Classify(InputArg),
    /// Graphviz rendering of a gadget or network.
    ExportDot(ExportArgs),
}

#[derive(Args, Debug)]
struct InputArg {
    /// File path or catalog name.
    input: String,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Network file or catalog construction.
    input: String,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Start endpoint, overriding the file.
    #[arg(long)]
    start: Option<String>,
    /// Goal endpoint, overriding the file.
    #[arg(long)]
    goal: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Network or construction (file path or catalog name).
    #[arg(long)]
    network: String,
    /// Target gadget (file path or catalog name); defaults to the
    /// construction's target.
    #[arg(long)]
    target: Option<String>,
    /// Initial target state.
    #[arg(long)]
    state: Option<String>,
    /// Port pairing `external=location`, repeatable.
    #[arg(long = "map")]
    map: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// Gadget to simulate.
    #[arg(long)]
    target: String,
    /// Initial state of the target; defaults to its first state.
    #[arg(long)]
    state: Option<String>,
    /// Door used as the building block.
    #[arg(long, default_value = "dir-door")]
    door: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Verify the result before writing it.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    input: String,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    /// Lists gadgets and constructions.
    List {
        #[arg(long, value_parser = ["all", "gadgets", "constructions"], default_value = "all")]
        kind: String,
    },
    /// Prints a catalog file.
    Show { name: String },
    /// Verifies constructions against their expectations.
    Verify(CatalogVerifyArgs),
}

#[derive(Args, Debug)]
struct CatalogVerifyArgs {
    /// Restrict to these entries.
    names: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 4)]
    threads: usize,
    /// Also run the designated mutations, each of which must fail.
    #[arg(long)]
    mutations: bool,
    /// Seed for the sampled mutations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of extra randomly sampled mutations (reported, not required
    /// to fail).
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Omit timings so that output is byte-stable.
    #[arg(long)]
    no_timings: bool,
}

/// Failure with an exit code and message.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn input_err(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn search_err(e: SearchError) -> CliError {
    match e {
        SearchError::CapExceeded(_) => CliError {
            code: EXIT_CAP,
            message: e.to_string(),
        },
        _ => input_err(e.to_string()),
    }
}

fn verify_err(e: VerifyError) -> CliError {
    match e {
        VerifyError::Search(s) => search_err(s),
        other => input_err(other.to_string()),
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let mut text = String::new();
    let result = dispatch(&cli, &mut text);
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

struct Resolver {
    libs: Vec<PathBuf>,
    near: Option<PathBuf>,
}

impl Resolver {
    fn read_gadget(&self, path: &Path, name: &str) -> Option<Arc<Gadget>> {
        let text = std::fs::read_to_string(path).ok()?;
        let g = parse_gadget(&text).ok()?.gadget;
        (g.name() == name).then(|| Arc::new(g))
    }
}

impl GadgetResolver for Resolver {
    fn resolve(&self, name: &str) -> Option<Arc<Gadget>> {
        let file = format!("{name}.yaml");
        for l in &self.libs {
            let p = if l.is_dir() { l.join(&file) } else { l.clone() };
            if let Some(g) = self.read_gadget(&p, name) {
                return Some(g);
            }
        }
        if let Some(dir) = &self.near {
            for p in [dir.join(&file), dir.join("..").join("gadgets").join(&file)] {
                if let Some(g) = self.read_gadget(&p, name) {
                    return Some(g);
                }
            }
        }
        Catalog::embedded().resolve(name)
    }
}

enum Loaded {
    Gadget(Arc<Gadget>),
    Network(Network),
    Construction(Box<ConstructionFile>),
}

fn located(path: &str, e: FormatError) -> CliError {
    input_err(format!("{path}:{e}"))
}

fn load(cli: &Cli, input: &str) -> Result<Loaded, CliError> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{input}: {e}")))?;
        let res = Resolver {
            libs: cli.lib.clone(),
            near: path.parent().map(Path::to_path_buf),
        };
        return match document_kind(&text).map_err(|e| located(input, e))?.as_str() {
            "gadget" => Ok(Loaded::Gadget(Arc::new(
                parse_gadget(&text).map_err(|e| located(input, e))?.gadget,
            ))),
            "network" => Ok(Loaded::Network(
                parse_network(&text, &res).map_err(|e| located(input, e))?.network,
            )),
            "construction" => Ok(Loaded::Construction(Box::new(
                parse_construction(&text, &res).map_err(|e| located(input, e))?,
            ))),
            k => Err(input_err(format!("{input}:1:1: unknown kind \"{k}\""))),
        };
    }
    let res = Resolver {
        libs: cli.lib.clone(),
        near: None,
    };
    let cat = Catalog::embedded();
    if let Some(e) = cat.entry(input) {
        return Ok(Loaded::Construction(Box::new(e.file.clone())));
    }
    if let Some(g) = res.resolve(input) {
        return Ok(Loaded::Gadget(g));
    }
    Err(input_err(format!("\"{input}\" is neither a file nor a catalog name")))
}

fn load_network(cli: &Cli, input: &str) -> Result<(Network, Option<ConstructionFile>), CliError> {
    match load(cli, input)? {
        Loaded::Network(n) => Ok((n, None)),
        Loaded::Construction(c) => Ok((c.network.clone(), Some(*c))),
        Loaded::Gadget(_) => Err(input_err(format!("\"{input}\" is a gadget, not a network"))),
    }
}

fn load_gadget(cli: &Cli, input: &str) -> Result<Arc<Gadget>, CliError> {
    match load(cli, input)? {
        Loaded::Gadget(g) => Ok(g),
        _ => Err(input_err(format!("\"{input}\" is not a gadget"))),
    }
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<i32, CliError> {
    if cli.format != 1 {
        return Err(input_err(format!("unsupported format version {}", cli.format)));
    }
    match &cli.cmd {
        Cmd::Solve(a) => solve(cli, a, out),
        Cmd::Verify(a) => verify(cli, a, out),
        Cmd::Planarity(a) => planarity(cli, &a.input, out),
        Cmd::Compile(a) => compile(cli, a, out),
        Cmd::Catalog { cmd } => catalog(cmd, out),
        Cmd::Classify(a) => classify(cli, &a.input, out),
        Cmd::ExportDot(a) => export_dot(cli, a, out),
    }
}

fn endpoint_node(net: &Network, s: &str) -> Result<usize, CliError> {
    let bad = || input_err(format!("bad endpoint \"{s}\""));
    if let Some(name) = s.strip_prefix("ext:") {
        return net.node_index(name).ok_or_else(bad);
    }
    let (inst, loc) = s.split_once('.').ok_or_else(bad)?;
    let i = net.instance_index(inst).ok_or_else(bad)?;
    let l = net.instances()[i].gadget.location_index(loc).ok_or_else(bad)?;
    Ok(net.attachment(i, l))
}

fn solve(cli: &Cli, a: &SolveArgs, out: &mut String) -> Result<i32, CliError> {
    let (mut net, _) = load_network(cli, &a.input)?;
    let start = match &a.start {
        Some(s) => Some(endpoint_node(&net, s)?),
        None => net.start(),
    };
    let goal = match &a.goal {
        Some(s) => Some(endpoint_node(&net, s)?),
        None => net.goal(),
    };
    net = net.with_start_goal(start, goal);
    let r = net.solve(a.cap).map_err(search_err)?;
    let _ = writeln!(out, "network: {}", net.name());
    let _ = writeln!(out, "reachable: {}", r.reachable);
    let _ = writeln!(out, "explored: {}", r.explored);
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness: {} steps", w.len());
        let mut states: Vec<usize> = net.instances().iter().map(|i| i.initial).collect();
        for (k, st) in w.iter().enumerate() {
            let inst = &net.instances()[st.instance];
            let t = inst.gadget.transitions()[st.transition];
            let g = &inst.gadget;
            let _ = writeln!(
                out,
                "  {}. {}: {} -> {} ({} -> {})",
                k + 1,
                inst.id,
                g.location_name(t.from_location),
                g.location_name(t.to_location),
                g.state_name(states[st.instance]),
                g.state_name(t.to_state)
            );
            states[st.instance] = t.to_state;
        }
    }
    Ok(if r.reachable { EXIT_OK } else { EXIT_NEGATIVE })
}

fn verify(cli: &Cli, a: &VerifyArgs, out: &mut String) -> Result<i32, CliError> {
    let (net, cons) = load_network(cli, &a.network)?;
    let (target, mut state, mut map) = match (&a.target, &cons) {
        (Some(t), c) => {
            let g = load_gadget(cli, t)?;
            match c {
                Some(c) if c.target == g.name() => (g, c.target_state.clone(), c.port_map.clone()),
                _ => {
                    let s = g.state_name(0).to_string();
                    (g, s, identity_map(&net.external_names()))
                }
            }
        }
        (None, Some(c)) => (load_gadget(cli, &c.target)?, c.target_state.clone(), c.port_map.clone()),
        (None, None) => return Err(input_err("--target is required for plain networks")),
    };
    if let Some(s) = &a.state {
        state = s.clone();
    }
    if !a.map.is_empty() {
        map = a
            .map
            .iter()
            .map(|m| {
                m.split_once('=')
                    .map(|(x, y)| (x.to_string(), y.to_string()))
                    .ok_or_else(|| input_err(format!("bad --map \"{m}\" (want external=location)")))
            })
            .collect::<Result<_, _>>()?;
    }
    let r = check_simulation(&net, &target, &state, &map, a.cap).map_err(verify_err)?;
    let _ = writeln!(out, "network: {}", net.name());
    let _ = writeln!(out, "target: {} ({})", target.name(), state);
    let _ = writeln!(out, "verdict: {}", r.verdict);
    let _ = writeln!(out, "explored: {}", r.explored);
    let _ = writeln!(out, "network-lts-states: {}", r.network_lts.states.len());
    let _ = writeln!(out, "target-lts-states: {}", r.target_lts.states.len());
    if let Some(rel) = &r.witness_relation {
        let _ = writeln!(out, "relation:");
        for (p, q) in rel {
            let _ = writeln!(out, "  {} <= {}", r.network_lts.state_labels[*p], q);
        }
    }
    if !r.trace.is_empty() {
        let _ = writeln!(out, "counterexample:");
        for line in &r.trace {
            let _ = writeln!(out, "  {line}");
        }
    }
    Ok(if r.verdict == Verdict::Pass {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn planarity(cli: &Cli, input: &str, out: &mut String) -> Result<i32, CliError> {
    let (net, _) = load_network(cli, input)?;
    let r = check_planarity(&net).map_err(|e| input_err(e.to_string()))?;
    let _ = writeln!(out, "network: {}", net.name());
    let _ = writeln!(out, "planar: {}", r.planar);
    if r.planar {
        let _ = writeln!(out, "euler: {}", if r.euler_ok { "ok" } else { "violated" });
    }
    if let Some(o) = &r.orientation {
        let _ = writeln!(out, "orientation:");
        for (id, x) in o {
            let _ = writeln!(out, "  {id}: {}", x.as_str());
        }
    }
    if let Some(rot) = &r.node_rotation {
        let _ = writeln!(out, "node-rotation:");
        for (n, ports) in rot {
            let _ = writeln!(out, "  {n}: [{}]", ports.join(", "));
        }
    }
    if let Some(obs) = &r.obstruction {
        let _ = writeln!(out, "obstruction:");
        for (u, v) in obs {
            let _ = writeln!(out, "  {u} -- {v}");
        }
    }
    Ok(if r.planar { EXIT_OK } else { EXIT_NEGATIVE })
}

fn compile(cli: &Cli, a: &CompileArgs, out: &mut String) -> Result<i32, CliError> {
    let target = load_gadget(cli, &a.target)?;
    let door = load_gadget(cli, &a.door)?;
    let dir_door = Catalog::embedded()
        .gadget("dir-door")
        .cloned()
        .ok_or_else(|| input_err("catalog lacks dir-door"))?;
    let s0 = match &a.state {
        Some(s) => target
            .state_index(s)
            .ok_or_else(|| input_err(format!("unknown-state \"{s}\"")))?,
        None => 0,
    };
    let c = universal_pipeline(&door, &target, s0, &dir_door, a.budget).map_err(|e| input_err(e.to_string()))?;
    let file = ConstructionFile {
        network: c.network,
        target: target.name().to_string(),
        target_state: target.state_name(s0).to_string(),
        port_map: c.port_map,
        expect_verdict: "pass".into(),
        expect_planar: false,
        provenance: "compiled".into(),
        notes: Some(format!("{} built from {} doors", target.name(), door.name())),
    };
    let mut code = EXIT_OK;
    if a.check {
        let r =
            check_simulation(&file.network, &target, &file.target_state, &file.port_map, a.cap).map_err(verify_err)?;
        if r.verdict != Verdict::Pass {
            code = EXIT_NEGATIVE;
        }
        eprintln!("verdict: {} (explored {})", r.verdict, r.explored);
    }
    emit(&construction_to_string(&file), a.output.as_deref(), out)?;
    Ok(code)
}

fn emit(text: &str, path: Option<&Path>, out: &mut String) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| input_err(format!("{}: {e}", p.display()))),
        None => {
            out.push_str(text);
            Ok(())
        }
    }
}

fn catalog(cmd: &CatalogCmd, out: &mut String) -> Result<i32, CliError> {
    let cat = Catalog::embedded();
    match cmd {
        CatalogCmd::List { kind } => {
            if kind != "constructions" {
                for g in cat.list_gadgets() {
                    let _ = writeln!(out, "gadget {g}");
                }
            }
            if kind != "gadgets" {
                for e in cat.entries() {
                    let _ = writeln!(
                        out,
                        "construction {} -> {} [{}]",
                        e.name, e.file.target, e.file.provenance
                    );
                }
            }
            Ok(EXIT_OK)
        }
        CatalogCmd::Show { name } => {
            if let Some(e) = cat.entry(name) {
                out.push_str(e.text);
            } else if let Some(g) = cat.gadget_entry(name) {
                out.push_str(g.text);
            } else {
                return Err(input_err(format!("no catalog entry \"{name}\"")));
            }
            Ok(EXIT_OK)
        }
        CatalogCmd::Verify(a) => catalog_verify(cat, a, out),
    }
}

fn catalog_verify(cat: &Catalog, a: &CatalogVerifyArgs, out: &mut String) -> Result<i32, CliError> {
    let reports = if a.names.is_empty() {
        cat.verify_all(a.cap, a.threads)
    } else {
        a.names
            .iter()
            .map(|n| {
                cat.entry(n)
                    .map(|e| cat.verify_entry(e, a.cap))
                    .ok_or_else(|| input_err(format!("no catalog entry \"{n}\"")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    out.push_str(&render_reports(&reports, !a.no_timings));
    let mut code = EXIT_OK;
    if reports.iter().any(|r| !r.ok()) {
        code = EXIT_NEGATIVE;
    }
    if reports.iter().any(|r| r.cap_exceeded) {
        code = EXIT_CAP;
    }
    if a.mutations {
        let ms = run_mutations(cat, a.cap);
        let _ = writeln!(out, "designated mutations:");
        for m in &ms {
            let v = match &m.verdict {
                Ok(v) => v.as_str().to_string(),
                Err(e) => format!("error: {e}"),
            };
            let _ = writeln!(
                out,
                "  {:<4}  {}: {} -> {}",
                if m.caught() { "ok" } else { "MISS" },
                m.entry,
                m.mutation,
                v
            );
        }
        if ms.iter().any(|m| !m.caught()) && code == EXIT_OK {
            code = EXIT_NEGATIVE;
        }
        if a.random > 0 {
            let (caught, total) = random_mutations(cat, a.seed, a.random, a.cap, out);
            let _ = writeln!(out, "sampled mutations caught: {caught}/{total}");
        }
    }
    Ok(code)
}

/// All single-edit mutations of an entry, in a fixed order.
pub fn all_mutations(c: &ConstructionFile) -> Vec<Mutation> {
    let mut out = Vec::new();
    for inst in c.network.instances() {
        for (s, name) in inst.gadget.states().iter().enumerate() {
            if s != inst.initial {
                out.push(Mutation::InitialState {
                    instance: inst.id.clone(),
                    state: name.clone(),
                });
            }
        }
        for t in 0..inst.gadget.transitions().len() {
            out.push(Mutation::FlipTransition {
                instance: inst.id.clone(),
                transition: t,
            });
        }
    }
    out
}

fn random_mutations(cat: &Catalog, seed: u64, k: usize, cap: usize, out: &mut String) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(String, Mutation)> = cat
        .entries()
        .flat_map(|e| all_mutations(&e.file).into_iter().map(|m| (e.name.clone(), m)))
        .collect();
    pool.shuffle(&mut rng);
    let mut caught = 0;
    let mut total = 0;
    for (name, m) in pool.into_iter().take(k) {
        let e = cat.entry(&name).expect("entry");
        let Ok(mutant) = crate::catalog::mutate(&e.file, &m) else {
            continue;
        };
        total += 1;
        let r = verify_construction(&name, &mutant, cat.gadget(&mutant.target), cap);
        let hit = !matches!(r.verdict, Ok(Verdict::Pass));
        caught += usize::from(hit);
        let _ = writeln!(
            out,
            "  {:<6}  {name}: {m} -> {}",
            if hit { "caught" } else { "benign" },
            r.verdict_str()
        );
    }
    (caught, total)
}

fn classify(cli: &Cli, input: &str, out: &mut String) -> Result<i32, CliError> {
    let g = load_gadget(cli, input)?;
    let r = classify_structure(&g);
    let _ = writeln!(out, "gadget: {}", g.name());
    let _ = writeln!(out, "deterministic: {}", r.deterministic);
    let _ = writeln!(out, "reversible: {}", r.reversible);
    match &r.k_tunnel {
        Some(pairs) => {
            let ps: Vec<String> = pairs
                .iter()
                .map(|&(a, b)| format!("{}-{}", g.location_name(a), g.location_name(b)))
                .collect();
            let _ = writeln!(out, "k-tunnel: {} [{}]", pairs.len(), ps.join(", "));
        }
        None => {
            let _ = writeln!(out, "k-tunnel: no");
        }
    }
    match &r.door_class {
        Some(c) => {
            let _ = writeln!(out, "door: {} {}", c.directedness, c.open_mode);
            if door_parts(&g).is_ok() {
                match classify_planar_door_case(&g) {
                    Ok(case) => {
                        let _ = writeln!(out, "planar-case: {case}");
                    }
                    Err(e) => {
                        let _ = writeln!(out, "planar-case: n/a ({e})");
                    }
                }
            }
        }
        None => {
            let _ = writeln!(out, "door: no");
        }
    }
    Ok(EXIT_OK)
}

fn export_dot(cli: &Cli, a: &ExportArgs, out: &mut String) -> Result<i32, CliError> {
    let text = match load(cli, &a.input)? {
        Loaded::Gadget(g) => gadget_to_dot(&g),
        Loaded::Network(n) => network_to_dot(&n),
        Loaded::Construction(c) => network_to_dot(&c.network),
    };
    emit(&text, a.output.as_deref(), out)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("doorkit").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, err) = run_str(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify") && err.is_empty());
    }

    #[test]
    fn missing_subcommand_is_input_error() {
        let (code, out, err) = run_str(&[]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty() && !err.is_empty());
    }

    #[test]
    fn errors_are_prefixed() {
        let (code, _, err) = run_str(&["solve", "no-such-network"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error: "), "{err}");
    }

    #[test]
    fn search_errors_map_to_exit_codes() {
        assert_eq!(search_err(SearchError::CapExceeded(5)).code, EXIT_CAP);
    }

    #[test]
    fn all_mutations_cover_states_and_transitions() {
        let e = &Catalog::embedded().entry("open-loop").unwrap().file;
        let inst = &e.network.instances()[0];
        let want = inst.gadget.states().len() - 1 + inst.gadget.transitions().len();
        let ms = all_mutations(e);
        assert_eq!(ms.len(), want * e.network.instances().len());
        let states = ms.iter().filter(|m| matches!(m, Mutation::InitialState { .. }));
        assert!(states.clone().count() > 0);
        assert!(states.into_iter().all(|m| crate::catalog::mutate(e, m).is_ok()));
    }

    #[test]
    fn sampled_mutations_are_seeded() {
        let cat = Catalog::embedded();
        let (mut a, mut b) = (String::new(), String::new());
        let ra = random_mutations(cat, 7, 3, 1 << 20, &mut a);
        let rb = random_mutations(cat, 7, 3, 1 << 20, &mut b);
        assert_eq!((ra, &a), (rb, &b));
    }
}
