use std::{env, fs, path::Path};

fn list(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "yaml"))
                .map(|p| {
                    let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
                    (stem, p.canonicalize().unwrap().to_string_lossy().into_owned())
                })
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

fn table(name: &str, files: &[(String, String)]) -> String {
    let mut s = format!("pub static {name}: &[(&str, &str)] = &[\n");
    for (stem, path) in files {
        s.push_str(&format!("    ({stem:?}, include_str!({path:?})),\n"));
    }
    s.push_str("];\n");
    s
}

fn main() {
    let root = Path::new(&env::var("CARGO_MANIFEST_DIR").unwrap()).join("catalog");
    let gadgets = root.join("gadgets");
    let constructions = root.join("constructions");
    println!("cargo:rerun-if-changed={}", gadgets.display());
    println!("cargo:rerun-if-changed={}", constructions.display());
    let mut src = table("GADGET_FILES", &list(&gadgets));
    src.push_str(&table("CONSTRUCTION_FILES", &list(&constructions)));
    let out = Path::new(&env::var("OUT_DIR").unwrap()).join("catalog_files.rs");
    fs::write(out, src).unwrap();
}
