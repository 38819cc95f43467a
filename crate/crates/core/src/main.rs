fn main() {
    let result = halmos::cli::run(std::env::args_os());
    std::process::exit(result.exit_code);
}
