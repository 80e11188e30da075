fn main() -> std::process::ExitCode {
    erpsift::cli::main()
}
