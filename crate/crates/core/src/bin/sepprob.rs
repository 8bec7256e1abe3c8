use clap::Parser;
use serde_json::json;

use sepprob::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    match cli::execute(&cli) {
        Ok(output) => println!("{output}"),
        Err(err) => {
            let line = json!({
                "error": {
                    "code": cli::error_code_name(&err),
                    "message": err.to_string(),
                }
            });
            eprintln!("{line}");
            std::process::exit(cli::exit_code_for(&err));
        }
    }
}
