use clap::Parser;

use ck_cli::commands::{self, Cli};

fn main() {
    // Die quietly on a closed pipe (`ckosc verify | head`) like other
    // line-oriented tools instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(commands::run(Cli::parse()));
}
