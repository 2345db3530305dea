use std::io;

fn main() {
    let threads = std::env::var("MSF_THREADS").ok();
    let code = msf_cli::run(
        std::env::args_os(),
        threads.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
