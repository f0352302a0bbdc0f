use std::io::Write;

fn main() {
    let (text, code) = twisted_cli::run_command(std::env::args_os());
    let out = if code == twisted_cli::EXIT_OK {
        &mut std::io::stdout() as &mut dyn Write
    } else {
        &mut std::io::stderr()
    };
    let _ = out.write_all(text.as_bytes());
    std::process::exit(code);
}
