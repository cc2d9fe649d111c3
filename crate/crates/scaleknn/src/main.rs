fn main() {
    std::process::exit(scaleknn::cli::run(std::env::args_os()));
}
