pub mod evaluate;
pub mod simulate;
pub mod synth;
pub mod train;
pub mod validate;
