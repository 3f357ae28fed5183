fn main() {
    std::process::exit(resokam::run(std::env::args_os()));
}
