fn main() {
    std::process::exit(quenched::harness::cli::run(std::env::args_os()));
}
