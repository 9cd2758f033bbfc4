fn main() {
    std::process::exit(lcslab_cli::run_cli(std::env::args_os()));
}
