//! `radiant check`: diagnostics only, no artifacts.

use std::path::Path;

use crate::fail::Failure;
use crate::load;

pub fn run(program: &Path, config: &Path) -> Result<(), Failure> {
    let system = load::load_system(config)?;
    load::load_program(program, &system).map(|_| ())
}
