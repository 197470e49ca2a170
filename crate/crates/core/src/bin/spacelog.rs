fn main() {
    std::process::exit(spacelog::cli::run(std::env::args_os()));
}
