fn main() {
    std::process::exit(bslab::cli::dispatch(std::env::args()));
}
