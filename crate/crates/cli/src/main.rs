use std::io::Write;

fn main() {
    let (out, err, code) = frobsurf_cli::run_cli(std::env::args_os(), &mut std::io::stdin());
    std::io::stdout().write_all(out.as_bytes()).ok();
    std::io::stderr().write_all(err.as_bytes()).ok();
    std::process::exit(code);
}
