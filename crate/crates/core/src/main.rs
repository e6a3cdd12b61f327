fn main() {
    std::process::exit(ffgroup::cli::run_command(std::env::args_os()));
}
