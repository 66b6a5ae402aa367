fn main() { std::process::exit(riccicert::cli::run(&std::env::args().collect::<Vec<_>>())); }
