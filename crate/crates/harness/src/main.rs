use std::process::ExitCode;

fn main() -> ExitCode {
    let env_seed = match std::env::var("OPJENSEN_SEED") {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(e) => {
                eprintln!("error: OPJENSEN_SEED={s:?} is not a u64: {e}");
                return ExitCode::from(opjensen::EXIT_USAGE as u8);
            }
        },
        Err(_) => None,
    };
    ExitCode::from(opjensen::cli_entry(std::env::args_os(), env_seed) as u8)
}
