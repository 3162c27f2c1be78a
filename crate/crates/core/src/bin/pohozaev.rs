fn main() {
    std::process::exit(pohozaev::run::main_with(std::env::args_os()));
}
