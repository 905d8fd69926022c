fn main() {
    std::process::exit(tns_lab::cli::run(std::env::args_os()));
}
