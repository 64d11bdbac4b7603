use std::env;
use std::path::PathBuf;

use cbindgen::{Builder, Config};

fn main() {
    let dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR"));
    let config = Config::from_file(dir.join("cbindgen.toml")).expect("cbindgen.toml");
    Builder::new()
        .with_config(config)
        .with_crate(&dir)
        .generate()
        .expect("unable to generate C bindings")
        .write_to_file(dir.join("include").join("cps_windows.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
