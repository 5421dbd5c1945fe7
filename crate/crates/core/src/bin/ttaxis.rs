fn main() {
    let code = traintrack_axis::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
