fn main() {
    std::process::exit(tangency::cli::run(std::env::args_os()));
}
