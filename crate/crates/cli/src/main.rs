fn main() {
    std::process::exit(solidsum::main_with(std::env::args_os()));
}
