fn main() {
    std::process::exit(qchain::cli::run_main(std::env::args_os()));
}
