fn main() {
    std::process::exit(census_stereo::cli::run(std::env::args_os()));
}
