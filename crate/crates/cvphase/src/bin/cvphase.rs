fn main() {
    std::process::exit(cvphase::cli::main_from_env());
}
