pub mod algorithms;
pub mod circuit;
pub mod cli;
pub mod costbench;
pub mod statevector;
pub mod transpiler;
pub mod verify;
