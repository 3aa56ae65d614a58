fn main() -> std::process::ExitCode {
    framelab::cli::main()
}
