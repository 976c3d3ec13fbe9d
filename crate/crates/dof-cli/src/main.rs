use std::io::Write;

fn main() {
    let inv = dof_cli::run_args(std::env::args_os());
    print!("{}", inv.stdout);
    eprint!("{}", inv.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(inv.code);
}
