fn main() {
    std::process::exit(mpscan::cli::main_with(std::env::args_os()));
}
