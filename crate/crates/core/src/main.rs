fn main() {
    std::process::exit(mub_eve::cli::main_with_args(std::env::args_os()));
}
