fn main() {
    std::process::exit(hgl_cli::cli::main_with(std::env::args()));
}
