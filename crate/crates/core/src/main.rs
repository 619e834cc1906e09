use clap::Parser;

use pseudosun::cli::{run, Args};

fn main() {
    let args = Args::parse();
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("pseudosun: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
