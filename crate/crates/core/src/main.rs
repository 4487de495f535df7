fn main() {
    std::process::exit(dgh_waves::cli::run(std::env::args_os()));
}
