fn main() {
    std::process::exit(wavelimit::cli_main(std::env::args_os()));
}
