use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(
        env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR env var is not defined"),
    );
    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("unable to read cbindgen.toml");

    match cbindgen::generate_with_config(&crate_dir, config) {
        Ok(writer) => {
            writer.write_to_file(crate_dir.join("include").join("sepprob.h"));
        }
        // Syntax errors surface through rustc anyway; don't fail the build
        // twice with a less readable message.
        Err(err) => println!("cargo:warning=header generation skipped: {err}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
