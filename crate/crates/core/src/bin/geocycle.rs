fn main() {
    std::process::exit(geocycle::cli::run(std::env::args_os()));
}
