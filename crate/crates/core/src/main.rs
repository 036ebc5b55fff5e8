fn main() {
    std::process::exit(aqo::cli::main_with(std::env::args_os()));
}
