fn main() -> std::process::ExitCode {
    ptphonon::cli::main()
}
