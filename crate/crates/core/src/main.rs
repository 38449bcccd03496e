use std::io;

use spikecast::cli::{execute, Context};

fn main() {
    let ctx = Context::from_env();
    let stdin = io::stdin().lock();
    let code = execute(std::env::args_os(), &ctx, stdin, &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
