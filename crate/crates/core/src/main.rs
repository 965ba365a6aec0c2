fn main() {
    std::process::exit(ustpa::cli::run(std::env::args_os()));
}
