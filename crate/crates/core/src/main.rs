fn main() {
    std::process::exit(lqpd::cli::run(std::env::args_os()));
}
