use ridgebound::cli::{run, Exit};

fn main() {
    let exit = run(std::env::args_os());
    match &exit {
        Exit::Ok(text) => print!("{text}"),
        Exit::Usage(text) => eprint!("{text}"),
        Exit::Failed(e) => eprintln!("error: {e}"),
    }
    std::process::exit(exit.code());
}
