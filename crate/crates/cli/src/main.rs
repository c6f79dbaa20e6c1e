fn main() {
    std::process::exit(slowfast_sim::run_cli(std::env::args_os()));
}
