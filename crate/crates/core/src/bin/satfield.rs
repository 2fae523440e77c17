fn main() {
    std::process::exit(satfield::cli::dispatch(std::env::args().collect()));
}
