pub mod caratheodory;
pub mod group;
pub mod hardy;
pub mod kernels;
pub mod moebius;
pub mod orbit;
pub mod report;
pub mod theta;
