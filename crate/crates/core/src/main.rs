fn main() {
    std::process::exit(early_citers::cli::run(std::env::args_os()));
}
