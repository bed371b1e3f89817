use clap::Parser;

fn main() {
    nawc_harness::cli::init_logging();
    let code = nawc_harness::cli::execute(nawc_harness::cli::Cli::parse());
    std::process::exit(code);
}
