//! Regenerates the bundled data files under `crates/core/data/` from the
//! programmatic constructions. Run after changing any bundled family:
//!
//! ```text
//! cargo run -p specpresheaf --example gen_bundles
//! ```

use std::path::PathBuf;

use specpresheaf::io::{mermin_peres_bundle_doc, save_json, PosetDoc};
use specpresheaf::poset::{ContextPoset, Limits};

fn main() {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(data_dir.join("cn_partitions")).expect("create data dirs");

    let doc = mermin_peres_bundle_doc().expect("magic-square bundle");
    save_json(&data_dir.join("mermin_peres.json"), &doc).expect("write mermin_peres.json");
    println!("wrote mermin_peres.json ({} contexts)", doc.contexts.len());

    let limits = Limits::default();
    for n in 2..=5usize {
        let poset = ContextPoset::full_abelian(n, &limits).expect("full abelian poset");
        let doc = PosetDoc::from_poset(&poset);
        let path = data_dir.join("cn_partitions").join(format!("c{n}.json"));
        save_json(&path, &doc).expect("write poset dump");
        println!("wrote cn_partitions/c{n}.json ({} contexts)", poset.len());
    }
}
