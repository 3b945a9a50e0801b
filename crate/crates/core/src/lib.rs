pub mod costmodel;
pub mod decision;
pub mod error;
pub mod fragility;
pub mod inventory;
pub mod knapsack;
pub mod money;
pub mod simulation;
