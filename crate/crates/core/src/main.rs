fn main() {
    std::process::exit(chebmark::cli::run(std::env::args_os()));
}
