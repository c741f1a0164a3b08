fn main() {
    std::process::exit(gpduo::cli::dispatch(std::env::args_os()));
}
