fn main() {
    std::process::exit(ultraskel::cli::run(std::env::args_os()));
}
