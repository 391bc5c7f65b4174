//! Subcommand implementations.

mod eval;
mod generate;
mod render;
mod stats;
mod train;

pub use eval::cmd_eval;
pub use generate::cmd_generate;
pub use render::cmd_render;
pub use stats::cmd_stats;
pub use train::cmd_train;
