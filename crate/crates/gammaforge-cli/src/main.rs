fn main() {
    eprintln!("gammaforge: not yet wired up");
    std::process::exit(64);
}
