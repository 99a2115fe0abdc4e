fn main() {
    std::process::exit(omegalearn_cli::main_with(std::env::args_os()));
}
