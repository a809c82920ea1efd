use std::io::{Read, Write};
use std::process::ExitCode;

use middleconv_cli::{parse_args, run};

fn main() -> ExitCode {
    let out = match parse_args(std::env::args_os().skip(1)) {
        Ok(cmd) => {
            let mut input = String::new();
            if cmd.wants_stdin() {
                // Unreadable stdin counts as empty.
                let _ = std::io::stdin().lock().read_to_string(&mut input);
            }
            run(&cmd, &input)
        }
        Err(out) => out,
    };
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
