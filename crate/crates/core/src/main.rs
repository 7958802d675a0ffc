fn main() {
    std::process::exit(poisson_lab::harness::cli_main(std::env::args_os()));
}
