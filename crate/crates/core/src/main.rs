fn main() {
    std::process::exit(uav_placement::cli::main_with_args(std::env::args_os()));
}
