fn main() {
    std::process::exit(conekernel::cli::run(std::env::args_os()));
}
