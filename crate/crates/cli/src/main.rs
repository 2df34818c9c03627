fn main() {
    let code = wmi_cli::run(std::env::args_os());
    std::process::exit(code);
}
