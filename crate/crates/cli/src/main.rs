fn main() {
    std::process::exit(tori_cli::run(std::env::args_os()));
}
