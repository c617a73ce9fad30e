//! `radiant compile`: write one detector specification per activity.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use radiant_core::emit_query_text;

use crate::fail::Failure;
use crate::load;

#[derive(Args)]
pub struct CompileArgs {
    /// Activity definition program
    pub program: PathBuf,
    /// Device configuration (YAML)
    pub config: PathBuf,
    /// Output directory, created if absent
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Additionally write reference query text per activity
    #[arg(long = "emit-sql")]
    pub emit_sql: bool,
}

pub fn run(args: &CompileArgs) -> Result<(), Failure> {
    let system = load::load_system(&args.config)?;
    let process = load::load_program(&args.program, &system)?;
    let specs = radiant_core::compile(&process, &system).map_err(|_| Failure::Silent(1))?;

    fs::create_dir_all(&args.out).map_err(|e| write_failure(&args.out, e))?;
    for spec in &specs {
        let json = serde_json::to_string_pretty(spec).expect("detector specs serialize");
        write_artifact(&args.out.join(format!("{}.json", spec.file_stem())), json + "\n")?;
        if args.emit_sql {
            let text = emit_query_text(spec, &system);
            write_artifact(&args.out.join(format!("{}.sql", spec.file_stem())), text)?;
        }
    }
    Ok(())
}

fn write_artifact(path: &Path, content: String) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| write_failure(path, e))?;
    println!("{}", path.display());
    Ok(())
}

fn write_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}
