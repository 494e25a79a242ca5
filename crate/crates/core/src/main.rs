fn main() {
    std::process::exit(flowcorr::cli::run(std::env::args_os()));
}
