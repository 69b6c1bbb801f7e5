//! The expansion-graph planarity test against exhaustive rotation systems.

use doorkit::catalog::Catalog;
use doorkit::planarity::{check_planarity, planar_by_enumeration};

const LIMIT: u64 = 1 << 22;

#[test]
fn catalog_networks_agree() {
    let cat = Catalog::embedded();
    let mut compared = 0;
    for e in cat.entries() {
        let net = &e.file.network;
        if net.instances().len() > 6 {
            continue;
        }
        let Ok(fast) = check_planarity(net) else { continue };
        if let Some(slow) = planar_by_enumeration(net, LIMIT).unwrap() {
            assert_eq!(fast.planar, slow, "{}", e.name);
            compared += 1;
        }
    }
    println!("compared {compared} networks");
    assert!(compared >= 20, "compared {compared}");
}
