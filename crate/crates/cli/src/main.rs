fn main() {
    std::process::exit(hcr_cli::cli::run(std::env::args_os()));
}
