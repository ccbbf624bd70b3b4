fn main() {
    std::process::exit(macaevlab::cli::run(std::env::args_os()));
}
