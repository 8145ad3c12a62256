fn main() {
    std::process::exit(gauge_workbench::cli::main());
}
