fn main() {
    std::process::exit(projconf_cli::main_with(std::env::args_os()));
}
