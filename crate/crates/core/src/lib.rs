pub mod adversarial;
pub mod cli;
pub mod metric;
pub mod oracles;
pub mod partition;
pub mod pointset;
pub mod ramsey;
pub mod report;
pub mod skeleton;
pub mod sparsify;
pub mod tree;
pub mod ultrametric;
