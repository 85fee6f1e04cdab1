fn main() {
    std::process::exit(anc_core::harness::cli::cli_main(std::env::args_os()));
}
