fn main() {
    std::process::exit(hksflow::bench::cli::run(std::env::args_os()));
}
