fn main() {
    let (code, text) = hecke_cli::run(std::env::args_os());
    print!("{text}");
    std::process::exit(code);
}
