fn main() { std::process::exit(bright::cli::run()); }
