fn main() {
    std::process::exit(stablesde::cli::run(std::env::args_os()));
}
