pub mod catalog;
pub mod diagnostic;
pub mod document;
pub mod engine;
pub mod pointer;
pub mod report;
pub mod resolve;
pub mod service;
pub mod tree;
