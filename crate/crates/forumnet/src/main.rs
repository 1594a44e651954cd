fn main() {
    std::process::exit(forumnet::cli::run(std::env::args_os()));
}
