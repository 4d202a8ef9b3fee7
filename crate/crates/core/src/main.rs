use std::process::ExitCode;

fn main() -> ExitCode {
    let result = signflow::cli::run(std::env::args_os());
    print!("{}", result.render());
    ExitCode::from(result.exit_code() as u8)
}
