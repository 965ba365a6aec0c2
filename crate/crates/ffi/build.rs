//! Regenerates include/ustpa.h from the exported items when they change.

use std::path::Path;

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR is set");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(Path::new(&crate_dir).join("cbindgen.toml"))
        .expect("cbindgen.toml is valid");
    let header = Path::new(&crate_dir).join("include").join("ustpa.h");

    match cbindgen::Builder::new().with_crate(&crate_dir).with_config(config).generate() {
        Ok(bindings) => {
            // write_to_file only touches the file when content changed,
            // keeping rebuilds quiet.
            bindings.write_to_file(header);
        }
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {
            // In-progress source edits should not break `cargo check`; the
            // previous header stays in place.
        }
        Err(e) => panic!("cbindgen failed: {e}"),
    }
}
