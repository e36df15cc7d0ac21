use clap::Parser;

use kreinkit_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    // 0 or unset leaves the pool at one thread per core
    if let Some(n) = std::env::var("KREINKIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    std::process::exit(kreinkit_cli::execute(&cli));
}
