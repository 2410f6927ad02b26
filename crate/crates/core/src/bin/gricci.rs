use clap::Parser;

use gricci::cli::{main_with_args, Args};

fn main() {
    std::process::exit(main_with_args(Args::parse()));
}
