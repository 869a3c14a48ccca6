fn main() {
    std::process::exit(glasscape::cli::main_from_args(std::env::args_os()));
}
