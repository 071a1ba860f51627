fn main() {
    std::process::exit(npslab_cli::run(std::env::args_os()));
}
