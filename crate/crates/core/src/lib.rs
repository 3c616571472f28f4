pub mod builder;
pub mod designs;
pub mod emit;
pub mod ir;
pub mod logic;
pub mod sim;
pub mod verify;
