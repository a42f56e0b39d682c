fn main() {
    std::process::exit(dhillon_cli::main_with(std::env::args_os()));
}
