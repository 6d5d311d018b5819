fn main() {
    std::process::exit(hsivis::cli::run(std::env::args_os()));
}
