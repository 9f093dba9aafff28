fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(mfglab::cli::run(argv));
}
