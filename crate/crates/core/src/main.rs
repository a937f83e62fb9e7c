fn main() {
    std::process::exit(ipkit::cli::run(std::env::args_os()));
}
