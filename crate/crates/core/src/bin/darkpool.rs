fn main() {
    std::process::exit(darkpool::cli::run(std::env::args_os()));
}
