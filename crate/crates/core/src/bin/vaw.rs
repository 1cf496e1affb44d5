use std::io::Write;

fn main() {
    let r = vaw_core::cli::run(std::env::args_os());
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(r.output.as_bytes());
    if !r.output.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
    let _ = out.flush();
    std::process::exit(r.code);
}
