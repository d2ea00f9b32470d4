fn main() {
    std::process::exit(abid::cli::run(std::env::args_os()));
}
