fn main() {
    std::process::exit(tdcss::cli::run(std::env::args_os()));
}
