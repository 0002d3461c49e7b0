fn main() {
    std::process::exit(cars_dj::cli::main_with_args(std::env::args_os()));
}
