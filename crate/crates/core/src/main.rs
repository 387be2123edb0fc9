fn main() {
    std::process::exit(qdarwin::cli::run(std::env::args_os()));
}
