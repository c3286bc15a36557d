pub mod acceptance;
pub mod channels;
pub mod config;
pub mod gutzwiller;
pub mod numerics;
pub mod operators;
pub mod trajectory;
pub mod wkb;
