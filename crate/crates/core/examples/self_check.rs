//! The quick self-check suite, as run by `greenlab verify --quick`.
use greenlab::verify::{format_table, run_suite, Mode};

fn main() {
    let res = run_suite(Mode::Quick);
    print!("{}", format_table(&res));
    if res.iter().any(|r| !r.passed) {
        std::process::exit(1);
    }
}
