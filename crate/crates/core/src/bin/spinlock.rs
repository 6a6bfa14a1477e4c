fn main() {
    std::process::exit(spinlock::cli::main_with_args(std::env::args_os()));
}
