fn main() {
    std::process::exit(cps_windows::cli::main());
}
