fn main() {
    std::process::exit(subshift::cli::run(std::env::args_os()));
}
