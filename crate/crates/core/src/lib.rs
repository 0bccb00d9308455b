pub mod bundles;
pub mod catalog;
pub mod cochain;
pub mod complex;
pub mod cyclotomic;
pub mod engine;
pub mod group;
pub mod groupoid;
pub mod phase;
