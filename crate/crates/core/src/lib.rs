pub mod automata;
pub mod graph;
pub mod ltl;
pub mod machine;
pub mod verify;
pub mod solve;
pub mod synth;
