fn main() {
    let out = pathfn::cli::run_args(std::env::args_os());
    print!("{}", out.stdout);
    std::process::exit(out.code);
}
