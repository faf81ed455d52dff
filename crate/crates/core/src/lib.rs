pub mod derive;
pub mod kernel;
pub mod session;
pub mod surface;
pub mod term;
