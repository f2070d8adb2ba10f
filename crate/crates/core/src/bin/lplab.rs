fn main() {
    std::process::exit(lplab::cli::run(std::env::args_os()));
}
