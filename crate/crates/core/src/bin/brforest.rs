fn main() -> std::process::ExitCode {
    brforest::cli::main()
}
