fn main() {
    std::process::exit(sperner_lab::cli::run(std::env::args_os()));
}
