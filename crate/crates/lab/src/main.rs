fn main() {
    std::process::exit(vessel_lab::commands::main_with_args(std::env::args_os()));
}
