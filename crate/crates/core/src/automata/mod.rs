//! Büchi automata for negated specifications, and the simple-GR(1)
//! classification used by the direct encoding.

mod gr1;
mod guard;
mod nba;
mod tableau;

pub use gr1::{classify_gr1, step_guard, Gr1Class};
pub use guard::Guard;
pub use nba::{nba_accepts, Edge, Nba};
pub use tableau::ltl_to_nba;
