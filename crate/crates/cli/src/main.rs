fn main() {
    std::process::exit(tmsv_cli::main_with(std::env::args_os()));
}
