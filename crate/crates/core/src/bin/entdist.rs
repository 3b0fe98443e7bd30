fn main() {
    std::process::exit(entdist::cli::run(std::env::args_os()));
}
