fn main() {
    std::process::exit(annular_cap::cli::run(std::env::args_os()));
}
