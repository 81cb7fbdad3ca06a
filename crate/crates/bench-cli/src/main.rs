fn main() {
    std::process::exit(louvain_bench::run(std::env::args_os()));
}
