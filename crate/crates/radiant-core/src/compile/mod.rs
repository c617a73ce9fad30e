//! Compilation of validated programs into detector specifications.

mod emit;
mod lower;

pub use emit::emit_query_text;
pub use lower::{
    compile, CompiledCase, CompiledCondition, CompiledPattern, DetectorSpec, PatternStage,
    Predicate, StationBinding,
};
