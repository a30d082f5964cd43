fn main() {
    std::process::exit(baire_lab::cli::run(std::env::args_os()));
}
