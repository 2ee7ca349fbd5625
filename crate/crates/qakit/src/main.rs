fn main() {
    std::process::exit(qakit::cli::run(std::env::args_os()).code())
}
