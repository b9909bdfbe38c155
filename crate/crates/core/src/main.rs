fn main() {
    env_logger::init();
    std::process::exit(imex_glm::harness::cli_main(std::env::args_os()));
}
