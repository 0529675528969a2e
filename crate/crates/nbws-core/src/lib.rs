#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

pub mod words;
pub mod tree;
pub mod scalar;
pub mod partition;
pub mod weights;
pub mod operators;
pub mod reducibility;
pub mod render;

pub use scalar::Scalar;
pub use tree::{TreeWord, Window};
pub use words::{FiniteWord, InfiniteWord, Letter};
