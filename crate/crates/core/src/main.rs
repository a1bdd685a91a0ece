fn main() {
    std::process::exit(eosmap::cli::run(std::env::args_os()));
}
