fn main() {
    std::process::exit(plap::run(std::env::args_os()));
}
