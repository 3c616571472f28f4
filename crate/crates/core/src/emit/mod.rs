//! Waveform and Verilog output.

pub mod vcd;
pub mod verilog;

pub use vcd::write_vcd;
pub use verilog::{emit_verilog, EmitError, Verilog, VerilogUnit};

#[cfg(test)]
mod tests;
