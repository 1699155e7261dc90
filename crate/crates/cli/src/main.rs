fn main() {
    std::process::exit(k3tau_cli::main_with_args(std::env::args_os()));
}
