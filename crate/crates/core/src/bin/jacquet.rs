fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let verbose: usize = argv
        .iter()
        .filter(|a| a.starts_with("-v") && a.chars().skip(1).all(|c| c == 'v'))
        .map(|a| a.len() - 1)
        .sum::<usize>()
        + argv.iter().filter(|a| *a == "--verbose").count();
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = jacquet_core::cli::run(&argv);
    print!("{}", outcome.text);
    std::process::exit(outcome.exit_code);
}
