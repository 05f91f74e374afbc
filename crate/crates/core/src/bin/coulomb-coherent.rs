fn main() {
    std::process::exit(coulomb_coherent::cli::run(std::env::args_os()));
}
