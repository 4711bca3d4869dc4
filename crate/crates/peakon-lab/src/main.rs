fn main() {
    std::process::exit(peakon_lab::cli::run());
}
