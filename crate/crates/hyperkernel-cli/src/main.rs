fn main() {
    eprintln!("hyperkernel: command surface under construction");
    std::process::exit(2);
}
