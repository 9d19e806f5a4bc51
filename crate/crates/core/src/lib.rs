pub mod error;
pub mod erlang;
pub mod kernel;
pub mod numeric;
pub mod stop_loss;
pub mod sarmanov;
pub mod reinsurance;
pub mod oracle;
pub mod model_file;
pub mod tables;
pub mod cli;
