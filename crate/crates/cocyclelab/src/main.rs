use clap::Parser;
use cocyclelab::cli::{execute, Cli};
use cocyclelab::error::{EXIT_OK, EXIT_USAGE};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match execute(&cli) {
        Ok(m) => {
            for o in &m.outputs {
                println!("{}", cli.out.join(o).display());
            }
        }
        Err(e) => {
            eprintln!("cocyclelab: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
