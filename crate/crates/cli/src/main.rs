fn main() {
    std::process::exit(way_cli::run(std::env::args_os()));
}
