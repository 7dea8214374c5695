fn main() {
    let report = shintani::cli::run(std::env::args_os());
    println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    eprintln!("{}", report.summary());
    std::process::exit(report.exit_code());
}
