fn main() {
    std::process::exit(cfarkit::cli::run(std::env::args_os()));
}
