fn main() {
    std::process::exit(emodel_lab::cli::main_with(std::env::args_os()));
}
