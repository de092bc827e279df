//! Regenerates the shipped synthetic texture corpus.
//!
//! Usage: `cargo run -p agtme --example make_corpus [DIR]` (default
//! `corpus/`). Output is deterministic, so reruns are byte-identical.

use agtme::bench::textures::synthetic_corpus;
use agtme::pnm;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "corpus".to_string());
    std::fs::create_dir_all(&dir).expect("create corpus directory");
    for (id, image) in synthetic_corpus() {
        let path = format!("{dir}/{id}.pgm");
        pnm::write_gray(&image, &path).expect("write texture");
        println!("wrote {path}");
    }
}
