fn main() {
    std::process::exit(cpt_rl::cli::main_with_args(std::env::args_os()));
}
