fn main() {
    std::process::exit(quasilorentz::cli::run(std::env::args_os()));
}
