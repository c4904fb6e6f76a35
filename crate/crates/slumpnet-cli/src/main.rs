fn main() {
    std::process::exit(slumpnet_cli::commands::run());
}
