//! Loading steps shared by every subcommand.

use std::fs;
use std::path::Path;

use radiant_core::lang::is_executable;
use radiant_core::{parse_iot_config, parse_radiant, validate, IoTSystem, ProcessDecl};

use crate::fail::Failure;

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Parses and resolves the device configuration; warnings go to stderr.
pub fn load_system(path: &Path) -> Result<IoTSystem, Failure> {
    let text = read(path)?;
    let system = parse_iot_config(&text)
        .map_err(|e| Failure::domain(format!("{}: {e}", path.display())))?;
    for warning in &system.warnings {
        eprintln!("{}: warning: {warning}", path.display());
    }
    Ok(system)
}

/// Parses and validates a program, rendering every diagnostic to stderr.
/// Succeeds only when the program is executable, i.e. free of
/// error-severity diagnostics.
pub fn load_program(path: &Path, system: &IoTSystem) -> Result<ProcessDecl, Failure> {
    let text = read(path)?;
    let (ast, mut diags) = parse_radiant(&text);
    if let Some(process) = &ast {
        diags.extend(validate(process, system));
    }
    let file = path.display().to_string();
    for d in &diags {
        eprintln!("{}", d.render(&file));
    }
    match ast {
        Some(process) if is_executable(&diags) => Ok(process),
        Some(_) => Err(Failure::Silent(1)),
        None => {
            if diags.is_empty() {
                eprintln!("{file}: error: no process declaration found");
            }
            Err(Failure::Silent(1))
        }
    }
}
