fn main() {
    std::process::exit(reltail::cli::main_from(std::env::args_os()));
}
