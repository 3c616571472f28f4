pub mod bench;
pub mod checks;
pub mod cli;
pub mod examples;
pub mod oracle;
