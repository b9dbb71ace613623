fn main() {
    std::process::exit(kuramoto3_cli::run_command(std::env::args_os()));
}
