fn main() {
    std::process::exit(nvsd::cli::run(std::env::args_os()));
}
