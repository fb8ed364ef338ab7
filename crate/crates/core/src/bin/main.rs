fn main() {
    std::process::exit(hessian_blowup::cli::main_with_args(std::env::args_os()));
}
