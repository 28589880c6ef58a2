//! Regenerates the example files under `scenarios/`.
//!
//! cargo run -p realembed-cli --example generate_scenarios

use std::path::Path;

use realembed::network::{bell_chsh, bilocal, triangle};
use realembed::protocol::adaptive_example;
use realembed::witness::WitnessInstance;
use realembed_cli::Document;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    std::fs::create_dir_all(&dir).expect("create scenarios/");
    let files = [
        ("bell.json", Document::scenario(bell_chsh())),
        ("bilocal.json", Document::scenario(bilocal())),
        ("triangle.json", Document::scenario(triangle())),
        ("adaptive.json", Document::protocol(adaptive_example())),
        (
            "witness.json",
            Document::witness(WitnessInstance::standard().expect("standard instance")),
        ),
    ];
    for (name, doc) in files {
        let path = dir.join(name);
        std::fs::write(&path, doc.to_json()).expect("write file");
        println!("wrote {}", path.display());
    }
}
