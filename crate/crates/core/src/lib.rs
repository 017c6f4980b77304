pub mod binpack;
pub mod cluster;
pub mod exec;
pub mod gasoline;
pub mod knapsack;
pub mod lp;
pub mod rational;
pub mod search;

pub use exec::Execution;
pub use rational::Rational;
