fn main() {
    std::process::exit(spiral_cli::run(std::env::args_os()));
}
